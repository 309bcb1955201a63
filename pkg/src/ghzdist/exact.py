"""Exact reference oracle over the GHZ-diagonal state space.

Every channel in this simulator (gates, depolarizing noise, outcome-flip
measurement, twirling, raw sampling) keeps the joint state diagonal in
the GHZ product basis, so a circuit can be evaluated exactly by pushing a
probability vector over bit patterns through the element list.

Copies stay in separate tensor factors until a gate entangles them and a
measurement marginalizes them out again, so protocols whose interaction
graph is shallow (pumping, pairwise recurrences) never materialize more
than a few copies jointly; the factor size is capped and exceeding the
cap is an error.
"""
from __future__ import annotations

import math

import numpy as np

from .bits import pauli_flip_mask
from .circuits import Circuit, CircuitConfig, GateOp, MeasureOp, PauliOp, RefillOp, TwirlOp
from .engine import CircuitInvalidError, Estimate
from .gates import build_permutation_table
from .circuits import validate
from .noise import (
    gate_touched_qubits,
    pauli_masks_for_qubit,
    x_acceptance_weights,
    z_acceptance_weights,
)


class StateSpaceError(RuntimeError):
    """A tensor factor would exceed the configured state-space bound."""


def raw_distribution(f_in: float, n: int) -> np.ndarray:
    dim = 1 << n
    d = np.full(dim, (1.0 - f_in) / dim, dtype=np.float64)
    d[0] += f_in
    return d


class _Factor:
    __slots__ = ("slots", "vec", "n")

    def __init__(self, slots, vec, n):
        self.slots = list(slots)
        self.vec = vec
        self.n = n

    def axis(self, slot: int) -> int:
        return self.slots.index(slot)

    def reshaped(self, slot: int):
        """(pre, dim, post) view with the slot's axis exposed."""
        dim = 1 << self.n
        ax = self.axis(slot)
        pre = dim ** ax
        post = dim ** (len(self.slots) - ax - 1)
        return self.vec.reshape(pre, dim, post), ax


class _FactorSet:
    def __init__(self, n: int, max_bits: int):
        self.n = n
        self.max_bits = max_bits
        self.factors: list[_Factor] = []
        self.mass = 1.0

    def add_raw(self, slot: int, dist: np.ndarray):
        self.factors.append(_Factor([slot], dist.copy(), self.n))

    def factor_of(self, slot: int) -> _Factor:
        for f in self.factors:
            if slot in f.slots:
                return f
        raise KeyError(f"slot {slot} is not live")

    def merge(self, a: int, b: int) -> _Factor:
        fa, fb = self.factor_of(a), self.factor_of(b)
        if fa is fb:
            return fa
        bits = self.n * (len(fa.slots) + len(fb.slots))
        if bits > self.max_bits:
            raise StateSpaceError(
                f"joint factor of {len(fa.slots) + len(fb.slots)} copies needs 2^{bits} "
                f"amplitudes, above the 2^{self.max_bits} bound"
            )
        merged = _Factor(fa.slots + fb.slots, np.outer(fa.vec, fb.vec).ravel(), self.n)
        self.factors.remove(fa)
        self.factors.remove(fb)
        self.factors.append(merged)
        return merged

    def apply_pair_permutation(self, a: int, b: int, inverse_table: np.ndarray):
        f = self.merge(a, b)
        dim = 1 << self.n
        # rotate the two operand axes to the end; the slot list tracks the order
        for slot in (a, b):
            ax = f.axis(slot)
            f.vec = np.moveaxis(
                f.vec.reshape((dim,) * len(f.slots)), ax, len(f.slots) - 1
            ).reshape(-1)
            f.slots.append(f.slots.pop(ax))
        flat = f.vec.reshape(-1, dim * dim)
        f.vec = flat[:, inverse_table].reshape(-1)

    def xor_mix(self, slot: int, weights_masks):
        """v <- w0*v + sum w_m * (v shifted by XOR mask m on this slot)."""
        f = self.factor_of(slot)
        view, _ = f.reshaped(slot)
        dim = view.shape[1]
        base_w = 1.0 - sum(w for w, _ in weights_masks)
        out = base_w * view
        idx = np.arange(dim)
        for w, mask in weights_masks:
            if w:
                out = out + w * view[:, idx ^ mask, :]
        f.vec = np.ascontiguousarray(out).reshape(-1)

    def xor_shift(self, slot: int, mask: int):
        f = self.factor_of(slot)
        view, _ = f.reshaped(slot)
        idx = np.arange(view.shape[1]) ^ mask
        f.vec = np.ascontiguousarray(view[:, idx, :]).reshape(-1)

    def measure(self, slot: int, weights: np.ndarray):
        f = self.factor_of(slot)
        view, ax = f.reshaped(slot)
        reduced = (view * weights[None, :, None]).sum(axis=1)
        f.slots.pop(ax)
        if f.slots:
            f.vec = reduced.reshape(-1)
        else:
            self.mass *= float(reduced.reshape(()))
            self.factors.remove(f)

    def twirl(self, slot: int):
        f = self.factor_of(slot)
        view, _ = f.reshaped(slot)
        dim = view.shape[1]
        nonzero_mean = (view.sum(axis=1) - view[:, 0, :]) / (dim - 1)
        out = np.repeat(nonzero_mean[:, None, :], dim, axis=1)
        out[:, 0, :] = view[:, 0, :]
        f.vec = np.ascontiguousarray(out).reshape(-1)


def exact_diagonal_oracle(circuit: Circuit, config: CircuitConfig,
                          max_bits: int = 22) -> Estimate:
    """Exact f_out and p_succ for a circuit, no Monte Carlo error.

    Supports every element kind at the "all_touched" noise scope.  The
    returned Estimate has zero standard errors and samples = 0.
    """
    violations = validate(circuit, config)
    if violations:
        raise CircuitInvalidError(violations)
    if config.noise.scope != "all_touched":
        raise ValueError("the exact oracle supports the all_touched noise scope only")
    n = config.n
    px, py, pz = config.noise.pauli_probs
    fs = _FactorSet(n, max_bits)
    raw = raw_distribution(config.f_in, n)
    for slot in range(config.initial_fill):
        fs.add_raw(slot, raw)
    z_weights = z_acceptance_weights(n, config.noise.eta)
    x_weights = x_acceptance_weights(n, config.noise.eta)

    for el in circuit.elements:
        if isinstance(el, GateOp):
            inv = build_permutation_table(el.gate, n).inverse
            fs.apply_pair_permutation(el.copy_a, el.copy_b, inv)
            if px + py + pz > 0.0:
                slot_of = (el.copy_a, el.copy_b)
                for sel, q in gate_touched_qubits(el.gate, n):
                    mx, my, mz = pauli_masks_for_qubit(q, n)
                    fs.xor_mix(slot_of[sel], ((px, mx), (py, my), (pz, mz)))
        elif isinstance(el, PauliOp):
            fs.xor_shift(el.copy, pauli_flip_mask(el.pauli, el.qubit, n))
        elif isinstance(el, MeasureOp):
            fs.measure(el.copy, z_weights if el.basis == "Z" else x_weights)
        elif isinstance(el, RefillOp):
            fs.add_raw(el.slot, raw)
        elif isinstance(el, TwirlOp):
            fs.twirl(el.copy)

    p_succ = fs.mass * math.prod(float(f.vec.sum()) for f in fs.factors)
    if p_succ <= 0.0:
        return Estimate(float("nan"), 0.0, 0.0, 0.0, 0, 0, float("nan"), exact=True)
    per_slot = []
    joint = fs.mass
    for f in fs.factors:
        total = float(f.vec.sum())
        joint *= float(f.vec[0])
        for slot in list(f.slots):
            view, _ = f.reshaped(slot)
            per_slot.append(float(view[:, 0, :].sum()) / total)
    f_out = sum(per_slot) / len(per_slot)
    return Estimate(f_out, 0.0, p_succ, 0.0, 0, 0, joint / p_succ, exact=True)
