"""Random target generation and benchmark sweeps (fidelity and gate-cost tables).

Random targets are assembled the same way the synthesizer decomposes them: one
unit vector per reachable (leaf, weight) class, and per-distribution weights
built as products of per-node conditional splits.  The product form matters:
it is exactly the class of states the transfer tree reproduces without loss,
so matched-tree cells in the fidelity sweep sit at fidelity 1 while mismatched
trees expose the approximation.

All randomness flows from integer seeds; per-cell seeds derive from
(master seed, n, k, state index), so results never depend on worker count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .analysis import _lex_weight_strings  # lexicographic class basis order
from .circuit import Circuit, cost, x
from .core import PartitionTree, StateVector, TreeNode, build_partition_tree, \
    enumerate_weight_distributions, string_to_index
from .simulator import simulate
from .synthesis import (MODE_ANCILLA, MODE_FREE, SynthesisConfig,
                        synthesize_full, synthesize_general_baseline,
                        synthesize_hwk_encoder)
from .combinatorics import ehrlich_sequence

FIDELITY_CSV_HEADER = ("n,k,ell,mode,field,seed,mean_fidelity,min_fidelity,"
                       "max_fidelity,std_fidelity,count")
COST_CSV_HEADER = "n,k,method,two_qubit,total,depth"


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def derive_seed(master: int, *parts: int) -> list[int]:
    return [int(master)] + [int(p) for p in parts]


def _sample_unit(rng: np.random.Generator, dim: int, kind: str) -> np.ndarray:
    if kind == "complex":
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    elif kind == "real":
        v = rng.standard_normal(dim).astype(np.complex128)
    elif kind == "nonneg":
        v = (np.abs(rng.standard_normal(dim)) + 0.1).astype(np.complex128)
    else:
        raise ValueError(f"unknown amplitude field {kind!r}")
    return v / np.linalg.norm(v)


def _node_split_samples(tree: PartitionTree, weights, rng, nonneg_floor: float = 0.0):
    """Per-(node, weight) conditional split amplitudes over the feasible window."""
    splits: dict[tuple[TreeNode, int], np.ndarray] = {}
    node_weights: dict[TreeNode, set[int]] = {tree.root: set(weights)}

    def walk(node: TreeNode) -> None:
        if node.is_leaf:
            return
        m, n_r = node.left.size, node.right.size
        for w in sorted(node_weights.get(node, ())):
            i_min, i_max = max(0, w - n_r), min(w, m)
            probs = rng.dirichlet(np.ones(i_max - i_min + 1))
            amp = np.sqrt(probs + nonneg_floor)
            splits[(node, w)] = amp / np.linalg.norm(amp)
            for i in range(i_min, i_max + 1):
                node_weights.setdefault(node.left, set()).add(i)
                node_weights.setdefault(node.right, set()).add(w - i)
        walk(node.left)
        walk(node.right)

    walk(tree.root)
    return splits


def _assemble(tree: PartitionTree, weights, profile, kind: str,
              rng: np.random.Generator) -> StateVector:
    floor = 0.05 if kind == "nonneg" else 0.0
    splits = _node_split_samples(tree, weights, rng, nonneg_floor=floor)

    leaf_vectors: dict[tuple[int, int], np.ndarray] = {}
    reachable: set[tuple[int, int]] = set()
    for ell in weights:
        for dist in enumerate_weight_distributions(tree.leaf_sizes, ell):
            reachable.update((u, w) for u, w in enumerate(dist))
    for u, w in sorted(reachable):
        leaf_vectors[(u, w)] = _sample_unit(rng, math.comb(tree.leaf_sizes[u], w), kind)

    internal = tree.internal_nodes()
    leaf_starts = [leaf.start for leaf in tree.leaves]

    def dist_weight(dist: tuple[int, ...]) -> float:
        value = 1.0
        for node in internal:
            w_node = sum(dist[u] for u, leaf in enumerate(tree.leaves)
                         if leaf.start >= node.start
                         and leaf.start < node.start + node.size)
            w_left = sum(dist[u] for u, leaf in enumerate(tree.leaves)
                         if leaf.start >= node.left.start
                         and leaf.start < node.left.start + node.left.size)
            i_min = max(0, w_node - node.right.size)
            value *= float(splits[(node, w_node)][w_left - i_min].real)
        return value

    amps = np.zeros(1 << tree.n, dtype=np.complex128)
    for ell, weight_amp in zip(weights, profile):
        if weight_amp == 0.0:
            continue
        for dist in enumerate_weight_distributions(tree.leaf_sizes, ell):
            c = weight_amp * dist_weight(dist)
            strings = [_lex_weight_strings(tree.leaf_sizes[u], w)
                       for u, w in enumerate(dist)]
            vectors = [leaf_vectors[(u, w)] for u, w in enumerate(dist)]
            _scatter(amps, tree.n, leaf_starts, strings, vectors, c)
    return StateVector(tree.n, amps, normalize=True)


def _scatter(amps, n, leaf_starts, strings, vectors, weight: float) -> None:
    def rec(u: int, bits: str, value: complex) -> None:
        if u == len(strings):
            amps[string_to_index(bits)] += value
            return
        for g, amp in zip(strings[u], vectors[u]):
            rec(u + 1, bits + g, value * amp)

    rec(0, "", weight)


def random_leaf_separable(n: int, k: int, ell: int, kind: str = "real",
                          seed=0) -> StateVector:
    """Random leaf-separable state exactly preparable on the (n, k) tree.

    One shared unit vector per reachable (leaf, weight) class; distribution
    weights are products of per-node Dirichlet-sampled conditional splits.
    ``kind`` is "real", "complex", or "nonneg" (all-positive amplitudes, used
    for worst-case gate counting).
    """
    tree = build_partition_tree(n, k)
    return _assemble(tree, [ell], [1.0], kind, _rng(seed))


def random_mixed_leaf_separable(n: int, k: int, kind: str = "real", seed=0,
                                max_weight: int | None = None) -> StateVector:
    """Random superposition over weights 0..floor(n/2) with per-weight structure."""
    top = n // 2 if max_weight is None else max_weight
    if top > n // 2:
        raise ValueError(f"max_weight must be at most {n // 2}")
    rng = _rng(seed)
    tree = build_partition_tree(n, k)
    profile = np.sqrt(rng.dirichlet(np.ones(top + 1)))
    return _assemble(tree, list(range(top + 1)), profile, kind, rng)


def random_fixed_weight_state(n: int, w: int, kind: str = "real", seed=0) -> StateVector:
    """Dense random unit vector in the fixed-weight subspace (not leaf-structured)."""
    rng = _rng(seed)
    strings = _lex_weight_strings(n, w)
    vec = _sample_unit(rng, len(strings), kind)
    amps = np.zeros(1 << n, dtype=np.complex128)
    for s, a in zip(strings, vec):
        amps[string_to_index(s)] = a
    return StateVector(n, amps)


# --- sweeps -------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    n_values: tuple[int, ...]
    k_values: tuple[int, ...] | None = None   # None: all k in 1..ceil(n/2)
    ell: int | None = None                    # None: floor(n/2) per n
    states_per_cell: int = 50
    seed: int = 0
    kind: str = "real"
    modes: tuple[str, ...] = (MODE_FREE,)

    def cells(self):
        for n in self.n_values:
            ks = self.k_values if self.k_values is not None \
                else tuple(range(1, math.ceil(n / 2) + 1))
            ell = max(1, n // 2) if self.ell is None else self.ell
            for k in ks:
                if k > n:
                    continue
                for mode in self.modes:
                    yield n, k, ell, mode


def _worker_count() -> int:
    try:
        return max(1, int(os.environ.get("LEAFSEP_THREADS", "1")))
    except ValueError:
        return 1


def _fidelity_cell(args) -> dict:
    n, k, ell, mode, kind, master, count = args
    fids = []
    for idx in range(count):
        psi = random_leaf_separable(n, k, ell, kind, seed=derive_seed(master, n, k, idx))
        circ = synthesize_full(psi, SynthesisConfig(n=n, k=k, mode=mode))
        res = simulate(circ, target=psi)
        fids.append(res.fidelity)
    arr = np.array(fids)
    return {"n": n, "k": k, "ell": ell, "mode": mode, "field": kind, "seed": master,
            "mean_fidelity": float(arr.mean()), "min_fidelity": float(arr.min()),
            "max_fidelity": float(arr.max()), "std_fidelity": float(arr.std()),
            "count": count}


def run_fidelity_sweep(config: ExperimentConfig) -> list[dict]:
    """Synthesize and simulate ``states_per_cell`` targets per (n, k, mode) cell."""
    jobs = [(n, k, ell, mode, config.kind, config.seed, config.states_per_cell)
            for n, k, ell, mode in config.cells()]
    workers = _worker_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_fidelity_cell, jobs))
    return [_fidelity_cell(job) for job in jobs]


COST_METHODS = ("leafsep_free", "leafsep_ancilla", "hwk_encoder", "general_baseline")


def run_cost_sweep(config: ExperimentConfig) -> list[dict]:
    """Worst-case gate counts at k = ceil(n/2) on a full-support target."""
    rows: list[dict] = []
    for n in config.n_values:
        k = math.ceil(n / 2)
        ell = k
        psi = random_leaf_separable(n, k, ell, "nonneg", seed=derive_seed(config.seed, n, 0, 0))
        circuits = {
            "leafsep_free": synthesize_full(psi, SynthesisConfig(n=n, k=k, mode=MODE_FREE)),
            "leafsep_ancilla": synthesize_full(psi, SynthesisConfig(n=n, k=k, mode=MODE_ANCILLA)),
            "general_baseline": synthesize_general_baseline(psi),
        }
        for method in COST_METHODS:
            if method == "hwk_encoder":
                order = ehrlich_sequence(n, ell)
                eta = np.array([psi.amplitude(g) for g in order])
                eta = eta / np.linalg.norm(eta)
                circ = Circuit(n_system=n, metadata={"n": n, "k": k, "ell": ell,
                                                     "mode": "hwk"})
                for q in range(n - ell, n):
                    circ.add(x(q))
                circ.extend(synthesize_hwk_encoder(n, ell, eta))
            else:
                circ = circuits[method]
            report = cost(circ)
            rows.append({"n": n, "k": k, "method": method,
                         "two_qubit": report.two_qubit_count,
                         "total": report.total_gate_count,
                         "depth": report.depth})
    return rows


def fidelity_rows_to_csv(rows: list[dict]) -> str:
    lines = [FIDELITY_CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            str(r["n"]), str(r["k"]), str(r["ell"]), r["mode"], r["field"],
            str(r["seed"]), repr(r["mean_fidelity"]), repr(r["min_fidelity"]),
            repr(r["max_fidelity"]), repr(r["std_fidelity"]), str(r["count"])]))
    return "\n".join(lines) + "\n"


def cost_rows_to_csv(rows: list[dict]) -> str:
    lines = [COST_CSV_HEADER]
    for r in rows:
        lines.append(",".join([str(r["n"]), str(r["k"]), r["method"],
                               str(r["two_qubit"]), str(r["total"]), str(r["depth"])]))
    return "\n".join(lines) + "\n"
