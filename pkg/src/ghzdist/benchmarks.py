"""Microbenchmark: per-gate cost of the table fast path versus the tableau
oracle, across copy sizes.

Run as ``python -m ghzdist.benchmarks``.  The fast path is a permutation
lookup whose cost does not grow with n; the reference path conjugates the
full 2n-qubit stabilizer tableau and grows superlinearly.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

from .bits import SystemState
from .circuits import Circuit, CircuitConfig, GateOp
from .engine import estimate
from .gates import BGate, HGate, HKind, apply_gate, build_permutation_table
from .noise import NoiseModel
from .oracle import clifford_for_gate, conjugate_tableau, ghz_pair_tableau


@dataclass
class BenchResult:
    label: str
    n: int
    per_gate_ns: float


def bench_scalar_lookup(n: int, reps: int = 200_000) -> float:
    """ns per apply_gate call (table lookup, no noise)."""
    gate = BGate(True, True, False, (1, 2))
    build_permutation_table(gate, n)  # build outside the timed region
    state = SystemState(n, [3 % (1 << n), 1])
    t0 = time.perf_counter()
    for _ in range(reps):
        apply_gate(state, gate, 0, 1)
    return (time.perf_counter() - t0) / reps * 1e9


def bench_batch_gate(n: int, gate, trajectories: int = 1 << 16, gates: int = 32) -> float:
    """ns per gate per trajectory in the batched engine, noise included."""
    elements = tuple(GateOp(gate, 0, 1) for _ in range(gates))
    config = CircuitConfig(n=n, N=2, K=2, R=2,
                           noise=NoiseModel(p_gate=0.01), f_in=0.9)
    circuit = Circuit(elements)
    estimate(circuit, config, 1 << 12, seed=0)  # warm tables and code paths
    t0 = time.perf_counter()
    estimate(circuit, config, trajectories, seed=0)
    return (time.perf_counter() - t0) / (trajectories * gates) * 1e9


def bench_tableau_conjugation(n: int, reps: int = 200) -> float:
    """ns per full-tableau gate application through the reference oracle."""
    gate = BGate(True, True, False, (1, 2))
    m = clifford_for_gate(gate, n)
    tab = ghz_pair_tableau(n)
    t0 = time.perf_counter()
    for _ in range(reps):
        tab = conjugate_tableau(tab, m)
    return (time.perf_counter() - t0) / reps * 1e9


def run_all(sizes=(3, 5)) -> list[BenchResult]:
    out = []
    for n in sizes:
        out.append(BenchResult("scalar lookup (B gate)", n, bench_scalar_lookup(n)))
    for n in sizes:
        out.append(BenchResult("batch gate+noise (B gate)", n,
                               bench_batch_gate(n, BGate(True, False, True, (1, 2)))))
    for n in sizes:
        out.append(BenchResult("batch gate+noise (homogeneous)", n,
                               bench_batch_gate(n, HGate(HKind.CNOT12))))
    for n in sizes:
        out.append(BenchResult("tableau oracle conjugation", n, bench_tableau_conjugation(n)))
    return out


def format_table(results: list[BenchResult]) -> str:
    lines = [f"{'path':34} {'n':>2} {'ns/gate':>12}"]
    for r in results:
        lines.append(f"{r.label:34} {r.n:>2} {r.per_gate_ns:>12.1f}")
    by_label = {}
    for r in results:
        by_label.setdefault(r.label, {})[r.n] = r.per_gate_ns
    for label, vals in by_label.items():
        ns = sorted(vals)
        ratio = vals[ns[-1]] / vals[ns[0]]
        lines.append(f"ratio n={ns[-1]} / n={ns[0]} for {label}: {ratio:.2f}x")
    return "\n".join(lines)


if __name__ == "__main__":
    print(format_table(run_all()))
