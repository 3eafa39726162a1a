"""Amplitude analysis: distribution norms, separability, split ratios, leaf tables.

Everything here is a pure function of a target state and a partition tree.
The central objects:

* the per-distribution norms c(I) over the weight distributions I,
* the per-node split amplitudes (conditional weight-split probabilities),
* the per-(leaf, weight) normalized local amplitudes that feed the
  Hamming-weight encoders, stored in the enumeration order of
  :func:`leafsep.combinatorics.ehrlich_sequence`.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .combinatorics import ehrlich_sequence
from .core import (PartitionTree, StateVector, TreeNode, enumerate_weight_distributions,
                   index_to_string, leaf_weight_table, popcounts, string_to_index)

DEAD_BRANCH_TOL = 1e-12
REFERENCE_REL_TOL = 1e-9


def _leaf_weights(psi_n: int, tree: PartitionTree) -> np.ndarray:
    return _leaf_weights_cached(psi_n, tuple(leaf.mask(psi_n) for leaf in tree.leaves))


@lru_cache(maxsize=64)
def _leaf_weights_cached(n: int, masks: tuple[int, ...]) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.uint32)
    return np.array([popcounts(idx & np.uint32(m)) for m in masks], dtype=np.int64)


def class_indices(tree: PartitionTree, distribution) -> np.ndarray:
    """Basis indices whose weight distribution equals ``distribution``, ascending."""
    w = _leaf_weights(tree.n, tree)
    hit = np.ones(w.shape[1], dtype=bool)
    for u, target in enumerate(distribution):
        hit &= w[u] == target
    return np.flatnonzero(hit)


def distribution_norm(psi: StateVector, tree: PartitionTree, distribution) -> float:
    """c(I): norm of the target restricted to one weight distribution."""
    idx = class_indices(tree, distribution)
    return float(np.linalg.norm(psi.amplitudes[idx]))


@dataclass(frozen=True)
class DistributionInfo:
    weights: tuple[int, ...]
    norm: float
    reference: str | None      # lexicographically smallest basis string with
    phase: float               # non-negligible amplitude, and its complex argument


def distribution_table(psi: StateVector, tree: PartitionTree,
                       total_weights=None) -> list[DistributionInfo]:
    """All valid distributions for the given total weights, with c(I) and reference."""
    if total_weights is None:
        total_weights = psi.weights_present()
    amps = psi.amplitudes
    cutoff = REFERENCE_REL_TOL * float(np.max(np.abs(amps)))
    out: list[DistributionInfo] = []
    for ell in total_weights:
        for dist in enumerate_weight_distributions(tree.leaf_sizes, ell):
            idx = class_indices(tree, dist)
            vals = amps[idx]
            c = float(np.linalg.norm(vals))
            ref: str | None = None
            phase = 0.0
            live = np.flatnonzero(np.abs(vals) > cutoff)
            if live.size:
                ref_idx = int(idx[live[0]])
                ref = index_to_string(ref_idx, psi.n)
                phase = float(np.angle(amps[ref_idx]))
            out.append(DistributionInfo(weights=dist, norm=c, reference=ref, phase=phase))
    return out


# --- separability ----------------------------------------------------------

@dataclass
class SeparabilityReport:
    separable: bool
    tol: float
    violations: list[dict] = field(default_factory=list)
    distributions: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {"separable": self.separable, "tol": self.tol,
                "violations": self.violations, "distributions": self.distributions}


def _lex_weight_strings(n_bits: int, w: int) -> list[str]:
    return [format(i, f"0{n_bits}b") for i in range(1 << n_bits)
            if bin(i).count("1") == w]


def _replace_leaf(bits: str, leaf: TreeNode, sub: str) -> str:
    return bits[:leaf.start] + sub + bits[leaf.start + leaf.size:]


def is_leaf_separable(psi: StateVector, tree: PartitionTree,
                      tol: float = 1e-9) -> SeparabilityReport:
    """Check the per-distribution product condition, with a violation certificate.

    For every valid distribution I with c(I) > tol, every basis state b in the
    class must satisfy alpha_b / alpha_{b*} = prod_u gamma_u(g_u) within tol,
    where b* is the class reference and gamma_u varies one leaf of b* at a time.
    """
    report = SeparabilityReport(separable=True, tol=tol)
    amps = psi.amplitudes
    for info in distribution_table(psi, tree):
        report.distributions.append({"I": list(info.weights), "c": info.norm})
        if info.norm <= tol:
            continue
        if info.reference is None:
            report.separable = False
            report.violations.append({"I": list(info.weights), "error": "no reference state"})
            continue
        ref = info.reference
        ref_amp = amps[string_to_index(ref)]
        gammas: list[dict[str, complex]] = []
        for u, leaf in enumerate(tree.leaves):
            table: dict[str, complex] = {}
            for g in _lex_weight_strings(leaf.size, info.weights[u]):
                variant = _replace_leaf(ref, leaf, g)
                table[g] = amps[string_to_index(variant)] / ref_amp
            gammas.append(table)
        for idx in class_indices(tree, info.weights):
            bits = index_to_string(int(idx), psi.n)
            predicted = 1.0 + 0.0j
            for u, leaf in enumerate(tree.leaves):
                predicted *= gammas[u][bits[leaf.start:leaf.start + leaf.size]]
            delta = abs(amps[idx] / ref_amp - predicted)
            if delta > tol:
                report.separable = False
                report.violations.append(
                    {"I": list(info.weights), "bitstring": bits, "delta": float(delta)})
                return report
    return report


def tensor_factorization_check(psi: StateVector, tree: PartitionTree,
                               tol: float = 1e-9) -> bool:
    """Independent separability oracle: every projected class must be rank one
    across each leaf-versus-rest cut (checked by singular values)."""
    amps = psi.amplitudes
    for info in distribution_table(psi, tree):
        if info.norm <= tol:
            continue
        leaf_strings = [_lex_weight_strings(leaf.size, info.weights[u])
                        for u, leaf in enumerate(tree.leaves)]
        dims = [len(s) for s in leaf_strings]
        tensor = np.zeros(dims, dtype=np.complex128)
        for combo in itertools.product(*(range(d) for d in dims)):
            bits = "".join(leaf_strings[u][g] for u, g in enumerate(combo))
            tensor[combo] = amps[string_to_index(bits)]
        tensor = tensor / info.norm
        for u in range(len(dims)):
            unfolded = np.moveaxis(tensor, u, 0).reshape(dims[u], -1)
            if min(unfolded.shape) == 1:
                continue
            s = np.linalg.svd(unfolded, compute_uv=False)
            if s[1] > tol * max(s[0], 1.0):
                return False
    return True


# --- node split amplitudes -------------------------------------------------

def node_weight_norms(psi: StateVector, node: TreeNode) -> np.ndarray:
    """Norm of the target restricted to each possible Hamming weight on ``node``."""
    mask = np.uint32(node.mask(psi.n))
    w = popcounts(np.arange(1 << psi.n, dtype=np.uint32) & mask)
    probs = np.abs(psi.amplitudes) ** 2
    sums = np.bincount(w, weights=probs, minlength=node.size + 1)
    return np.sqrt(sums)


def node_split_norms(psi: StateVector, node: TreeNode, total_weight: int) -> np.ndarray:
    """Norms over the (i, total-i) left/right weight splits at an internal node."""
    if node.is_leaf:
        raise ValueError("split norms are defined on internal nodes only")
    wl = popcounts(np.arange(1 << psi.n, dtype=np.uint32) & np.uint32(node.left.mask(psi.n)))
    wr = popcounts(np.arange(1 << psi.n, dtype=np.uint32) & np.uint32(node.right.mask(psi.n)))
    probs = np.abs(psi.amplitudes) ** 2
    out = np.zeros(total_weight + 1)
    for i in range(total_weight + 1):
        sel = (wl == i) & (wr == total_weight - i)
        if np.any(sel):
            out[i] = math.sqrt(float(np.sum(probs[sel])))
    return out


def weight_split_amplitudes(psi: StateVector, node: TreeNode,
                            total_weight: int) -> np.ndarray:
    """Unit-norm non-negative split amplitudes at a node for one incoming weight.

    Entry i is the square root of the conditional probability of seeing the
    split (i, total-i) across the node's children.  Raises when the node
    carries no support at ``total_weight``.
    """
    splits = node_split_norms(psi, node, total_weight)
    total = math.sqrt(float(np.sum(splits ** 2)))
    if total <= DEAD_BRANCH_TOL:
        raise ValueError(f"node carries no weight-{total_weight} support")
    return splits / total


def rotation_ladder_angles(weights) -> list[float]:
    """Hyperspherical ladder angles for a non-negative amplitude vector.

    theta_i = 2*atan2(tail_i, w_i) with tail_i the norm of the entries after i;
    a zero entry with a live tail gives pi (full transfer), a dead tail gives 0.
    """
    w = np.asarray(weights, dtype=float)
    if np.any(w < -1e-15):
        raise ValueError("ladder amplitudes must be non-negative")
    tails = np.sqrt(np.cumsum((w ** 2)[::-1])[::-1])
    return [2.0 * math.atan2(float(tails[i + 1]), float(w[i])) for i in range(len(w) - 1)]


# --- leaf amplitude tables --------------------------------------------------

@dataclass
class LeafAmplitudeTable:
    """Map (leaf index, local weight) -> unit amplitudes in Ehrlich order."""

    leaf_sizes: tuple[int, ...]
    entries: dict = field(default_factory=dict)

    def get(self, leaf: int, weight: int) -> np.ndarray | None:
        return self.entries.get((leaf, weight))

    def amplitude(self, leaf: int, weight: int, bits: str) -> complex:
        order = ehrlich_sequence(self.leaf_sizes[leaf], weight)
        return complex(self.entries[(leaf, weight)][order.index(bits)])

    def classes(self) -> list[tuple[int, int]]:
        return sorted(self.entries)


def leaf_amplitude_table(psi: StateVector, tree: PartitionTree,
                         total_weights=None) -> LeafAmplitudeTable:
    """Per-(leaf, weight) normalized local amplitudes, shared across distributions.

    For each reachable (leaf, weight) class the amplitudes are ratios against
    the class reference state of the first distribution that reaches it,
    normalized to unit 2-norm and reordered to the Ehrlich enumeration.
    Distributions whose reference amplitude is negligible are skipped.
    """
    if total_weights is None:
        total_weights = psi.weights_present()
    amps = psi.amplitudes
    cutoff = REFERENCE_REL_TOL * float(np.max(np.abs(amps)))
    table = LeafAmplitudeTable(leaf_sizes=tree.leaf_sizes)
    for ell in total_weights:
        for dist in enumerate_weight_distributions(tree.leaf_sizes, ell):
            todo = [u for u in range(tree.num_leaves) if (u, dist[u]) not in table.entries]
            if not todo:
                continue
            idx = class_indices(tree, dist)
            live = np.flatnonzero(np.abs(amps[idx]) > cutoff)
            if not live.size:
                continue  # distribution not present
            ref = index_to_string(int(idx[live[0]]), psi.n)
            ref_amp = amps[string_to_index(ref)]
            for u in todo:
                leaf = tree.leaves[u]
                if dist[u] == 0:
                    table.entries[(u, 0)] = np.array([1.0 + 0.0j])
                    continue
                order = ehrlich_sequence(leaf.size, dist[u])
                gammas = np.array([
                    amps[string_to_index(_replace_leaf(ref, leaf, g))] / ref_amp
                    for g in order])
                table.entries[(u, dist[u])] = gammas / np.linalg.norm(gammas)
    return table


def encoder_angles(amplitudes) -> tuple[list[tuple[float, float]], float]:
    """Chain parameters preparing ``amplitudes`` along their enumeration order.

    Returns one (theta, phi) pair per consecutive pair of basis strings plus a
    trailing phase for the final string.  Starting from the first string, step
    t deposits amplitude t-1 and carries the tail; phases ride on phi with the
    residual fixed by the trailing phase.
    """
    a = np.asarray(amplitudes, dtype=np.complex128)
    mags = np.abs(a)
    tails = np.sqrt(np.cumsum((mags ** 2)[::-1])[::-1])
    pairs: list[tuple[float, float]] = []
    chi = 0.0
    for t in range(1, len(a)):
        theta = 2.0 * math.atan2(float(tails[t]), float(mags[t - 1]))
        if mags[t - 1] > 1e-15:
            phi = math.remainder(2.0 * (cmath.phase(a[t - 1]) - chi), 4.0 * math.pi)
        else:
            phi = 0.0
        pairs.append((theta, phi))
        chi -= phi / 2.0
    if len(a) and mags[-1] > 1e-15:
        trailing = math.remainder(cmath.phase(a[-1]) - chi, 2.0 * math.pi)
    else:
        trailing = 0.0
    return pairs, trailing


def mixed_weight_profile(psi: StateVector) -> np.ndarray:
    """Per-weight norms for weights 0..floor(n/2); heavier support is rejected."""
    w = popcounts(np.arange(1 << psi.n))
    probs = np.abs(psi.amplitudes) ** 2
    sums = np.bincount(w, weights=probs, minlength=psi.n + 1)
    half = psi.n // 2
    if float(np.sum(sums[half + 1:])) > 1e-18:
        raise ValueError(f"support above weight {half} is out of scope")
    return np.sqrt(sums[:half + 1])


def reconstruct_amplitudes(psi: StateVector, tree: PartitionTree,
                           total_weights=None) -> StateVector:
    """Rebuild a state from c(I), the reference phases, and the leaf tables.

    For leaf-separable input this reproduces the state entrywise; the residual
    difference is the natural separability error measure.
    """
    table = leaf_amplitude_table(psi, tree, total_weights)
    out = np.zeros_like(psi.amplitudes)
    for info in distribution_table(psi, tree, total_weights):
        if info.norm <= DEAD_BRANCH_TOL or info.reference is None:
            continue
        factor = info.norm * cmath.exp(1j * info.phase)
        leaf_strings = [ehrlich_sequence(leaf.size, info.weights[u])
                        for u, leaf in enumerate(tree.leaves)]
        for combo in itertools.product(*(range(len(s)) for s in leaf_strings)):
            bits = "".join(leaf_strings[u][g] for u, g in enumerate(combo))
            value = factor
            for u, g in enumerate(combo):
                value *= table.entries[(u, info.weights[u])][g]
            out[string_to_index(bits)] = value
    return StateVector(psi.n, out, check=False)
