"""Trajectory-level Monte Carlo execution and statistical estimation.

Two execution paths share one semantics: a scalar per-trajectory runner
(`run_trajectory`) and a batched engine used by `estimate` that evaluates
trajectories in fixed-size numpy blocks.  Each block draws its randomness
from a generator seeded by (seed, block_index) and contributes only
integer counts, so an estimate is bit-identical for a given
(circuit, config, samples, seed) regardless of how blocks are scheduled
across threads.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bits import SystemState, pauli_flip_mask
from .circuits import Circuit, CircuitConfig, GateOp, MeasureOp, PauliOp, RefillOp, validate
from .gates import build_permutation_table
from .noise import (
    gate_touched_qubits,
    measure_copy,
    pauli_masks_for_qubit,
    raw_patterns_from_uniform,
    sample_raw_state,
    twirl,
    twirl_from_uniform,
)

DEFAULT_BLOCK = 1 << 16


@dataclass(frozen=True)
class TrajectoryResult:
    accepted: bool
    output_perfect: bool
    per_copy_perfect: tuple


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo (or exact) estimate of output fidelity and success rate.

    f_out is the per-copy perfect fraction conditioned on acceptance (for
    K = 1 simply the output fidelity); joint_perfect is the probability
    that all K survivors are perfect, a secondary readout for K > 1.
    f_out is NaN when no trajectory was accepted.  Standard errors are
    binomial; exact results carry zero error and samples = 0.
    """

    f_out: float
    f_out_se: float
    p_succ: float
    p_succ_se: float
    samples: int
    accepted: int = 0
    joint_perfect: float = float("nan")
    exact: bool = False


class CircuitInvalidError(ValueError):
    def __init__(self, violations):
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


def _compiled(circuit: Circuit, config: CircuitConfig):
    """Static per-element metadata: tables, touched-qubit noise masks, and
    the slots left live at the end (ascending order)."""
    violations = validate(circuit, config)
    if violations:
        raise CircuitInvalidError(violations)
    n = config.n
    ops = []
    for el in circuit.elements:
        if isinstance(el, GateOp):
            table = build_permutation_table(el.gate, n).table
            slot_of = (el.copy_a, el.copy_b)
            units = tuple(
                (slot_of[sel], pauli_masks_for_qubit(q, n))
                for sel, q in gate_touched_qubits(el.gate, n)
            )
            ops.append(("gate", el, table, units))
        elif isinstance(el, PauliOp):
            ops.append(("pauli", el.copy, pauli_flip_mask(el.pauli, el.qubit, n)))
        elif isinstance(el, MeasureOp):
            ops.append(("measure", el.copy, el.basis))
        elif isinstance(el, RefillOp):
            ops.append(("refill", el.slot))
        else:
            ops.append(("twirl", el.copy))
    live = set(range(config.initial_fill))
    for el in circuit.elements:
        if isinstance(el, MeasureOp):
            live.discard(el.copy)
        elif isinstance(el, RefillOp):
            live.add(el.slot)
    return ops, tuple(sorted(live))


def run_trajectory(circuit: Circuit, config: CircuitConfig,
                   rng: np.random.Generator) -> TrajectoryResult:
    """Run one noise realization; exits early at the first failed measurement."""
    ops, outputs = _compiled(circuit, config)
    n = config.n
    state = SystemState(n, [None] * config.R)
    for slot in range(config.initial_fill):
        state.slots[slot] = sample_raw_state(config.f_in, n, rng)
    for op in ops:
        kind = op[0]
        if kind == "gate":
            _, el, table, units = op
            idx = (state.pattern(el.copy_a) << n) | state.pattern(el.copy_b)
            img = int(table[idx])
            state.slots[el.copy_a] = img >> n
            state.slots[el.copy_b] = img & ((1 << n) - 1)
            _scalar_gate_noise(state, units, config.noise, rng)
        elif kind == "pauli":
            _, slot, mask = op
            state.slots[slot] = state.pattern(slot) ^ mask
        elif kind == "measure":
            _, slot, basis = op
            success, state = measure_copy(state, slot, basis, config.noise, rng)
            if not success:
                return TrajectoryResult(False, False, (False,) * config.K)
        elif kind == "refill":
            state.slots[op[1]] = sample_raw_state(config.f_in, n, rng)
        else:
            state.slots[op[1]] = twirl(state.pattern(op[1]), n, rng)
    per_copy = tuple(state.pattern(s) == 0 for s in outputs)
    return TrajectoryResult(True, all(per_copy), per_copy)


def _scalar_gate_noise(state, units, model, rng):
    px, py, pz = model.pauli_probs
    if px + py + pz == 0.0:
        return
    chosen = units
    if model.scope == "two_random" and len(units) > 2:
        picks = rng.choice(len(units), size=2, replace=False)
        chosen = [units[int(k)] for k in picks]
    for slot, masks in chosen:
        u = rng.random()
        if u < px:
            state.slots[slot] = state.pattern(slot) ^ masks[0]
        elif u < px + py:
            state.slots[slot] = state.pattern(slot) ^ masks[1]
        elif u < px + py + pz:
            state.slots[slot] = state.pattern(slot) ^ masks[2]


# -- batched engine --------------------------------------------------------------

def _block_rng(seed: int, block_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, block_index))))


def _run_block(ops, outputs, config: CircuitConfig, seed: int, block_index: int,
               size: int) -> tuple[int, int, int]:
    """Returns integer counts (accepted, joint_perfect, perfect_copy_total)."""
    rng = _block_rng(seed, block_index)
    n = config.n
    full = np.uint32((1 << n) - 1)
    st = np.zeros((size, config.R), dtype=np.uint32)
    for slot in range(config.initial_fill):
        st[:, slot] = raw_patterns_from_uniform(config.f_in, n, rng.random(size))
    accepted = np.ones(size, dtype=bool)
    px, py, pz = config.noise.pauli_probs
    eta = config.noise.eta
    noisy = px + py + pz > 0.0
    two_random = config.noise.scope == "two_random"

    for op in ops:
        kind = op[0]
        if kind == "gate":
            _, el, table, units = op
            idx = (st[:, el.copy_a] << np.uint32(n)) | st[:, el.copy_b]
            img = table[idx]
            st[:, el.copy_a] = img >> np.uint32(n)
            st[:, el.copy_b] = img & full
            if noisy:
                if two_random and len(units) > 2:
                    m = len(units)
                    i1 = (rng.random(size) * m).astype(np.int64)
                    i2 = (rng.random(size) * (m - 1)).astype(np.int64)
                    i2 += i2 >= i1
                    gates_sel = (i1, i2)
                else:
                    gates_sel = None
                for t, (slot, (mx, my, mz)) in enumerate(units):
                    u = rng.random(size)
                    flip = np.where(
                        u < px, np.uint32(mx),
                        np.where(u < px + py, np.uint32(my),
                                 np.where(u < px + py + pz, np.uint32(mz), np.uint32(0))),
                    )
                    if gates_sel is not None:
                        hit = (gates_sel[0] == t) | (gates_sel[1] == t)
                        flip = np.where(hit, flip, np.uint32(0))
                    st[:, slot] ^= flip
        elif kind == "pauli":
            _, slot, mask = op
            st[:, slot] ^= np.uint32(mask)
        elif kind == "measure":
            _, slot, basis = op
            flips = rng.random((size, n)) < eta
            if basis == "Z":
                word = np.zeros(size, dtype=np.uint32)
                for i in range(1, n):
                    parity = (flips[:, i - 1] ^ flips[:, i]).astype(np.uint32)
                    word |= parity << np.uint32(n - 1 - i)
                zmask = np.uint32((1 << (n - 1)) - 1)
                success = (st[:, slot] & zmask) == word
            else:
                parity = flips[:, 0].astype(np.uint32)
                for i in range(1, n):
                    parity ^= flips[:, i].astype(np.uint32)
                success = (st[:, slot] >> np.uint32(n - 1)) == parity
            accepted &= success
        elif kind == "refill":
            st[:, op[1]] = raw_patterns_from_uniform(config.f_in, n, rng.random(size))
        else:  # twirl
            st[:, op[1]] = twirl_from_uniform(st[:, op[1]], n, rng.random(size))

    perfect = st[:, list(outputs)] == 0
    acc = int(np.count_nonzero(accepted))
    joint = int(np.count_nonzero(accepted & perfect.all(axis=1)))
    percopy = int(perfect[accepted].sum())
    return acc, joint, percopy


def estimate(circuit: Circuit, config: CircuitConfig, samples: int, seed: int,
             threads: int = 1, block_size: int = DEFAULT_BLOCK) -> Estimate:
    """Monte Carlo estimate over `samples` independent trajectories.

    Trajectories are evaluated in blocks of `block_size`; the per-block
    random streams and the integer-count aggregation make the result
    independent of the number of worker threads.  Note that changing
    block_size changes which draws a trajectory sees (it is part of the
    reproducibility key, and left at its default by all CLI paths).
    """
    if samples < 1:
        raise ValueError("need at least one sample")
    ops, outputs = _compiled(circuit, config)
    blocks = [(b, min(block_size, samples - b * block_size))
              for b in range((samples + block_size - 1) // block_size)]

    def work(blk):
        return _run_block(ops, outputs, config, seed, blk[0], blk[1])

    if threads == 0:
        import os
        threads = os.cpu_count() or 1
    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, blocks))
    else:
        results = [work(blk) for blk in blocks]
    acc = sum(r[0] for r in results)
    joint = sum(r[1] for r in results)
    percopy = sum(r[2] for r in results)
    return _estimate_from_counts(samples, acc, joint, percopy, config.K)


def _estimate_from_counts(samples: int, acc: int, joint: int, percopy: int,
                          k: int) -> Estimate:
    p = acc / samples
    p_se = math.sqrt(p * (1.0 - p) / samples)
    if acc == 0:
        return Estimate(float("nan"), float("nan"), p, p_se, samples, 0, float("nan"))
    f = percopy / (k * acc)
    f_se = math.sqrt(f * (1.0 - f) / (k * acc))
    return Estimate(f, f_se, p, p_se, samples, acc, joint / acc)


CSV_COLUMNS = (
    "protocol", "n", "N", "K", "R", "p_gate", "eta", "f_in",
    "f_out", "f_out_se", "p_succ", "p_succ_se", "samples", "seed",
)


def csv_row(protocol: str, config: CircuitConfig, est: Estimate, seed) -> str:
    vals = (
        protocol, config.n, config.N, config.K, config.R,
        repr(config.noise.p_gate), repr(config.noise.eta), repr(config.f_in),
        repr(est.f_out), repr(est.f_out_se), repr(est.p_succ), repr(est.p_succ_se),
        est.samples, seed,
    )
    return ",".join(str(v) for v in vals)
