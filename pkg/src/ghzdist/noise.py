"""Noise channels, raw-state sampling, twirling and noisy measurement.

All stochastic noise is Pauli noise acting on phase bits, so every channel
is a classical mixture of XOR masks and the state stays GHZ-diagonal.
Randomness always flows through an explicitly passed numpy Generator.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bits import pauli_flip_mask, x_bit_mask
from .gates import Gate, HGate

NOISE_SCOPES = ("all_touched", "two_random")


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing gate noise plus classical measurement-outcome flips.

    Each gate application depolarizes, independently, every qubit the
    gate touches (2n qubits for a homogeneous gate, 4 for a bilocal one);
    the alternative scope "two_random" instead hits two uniformly chosen
    touched qubits, for sensitivity studies.  Each single-qubit
    measurement outcome flips with probability eta.  An optional bias
    triple (p_x, p_y, p_z) replaces the isotropic p/4 split.
    """

    p_gate: float = 0.0
    eta: float = 0.0
    bias: tuple[float, float, float] | None = None
    scope: str = "all_touched"

    def __post_init__(self):
        if not 0.0 <= self.p_gate <= 1.0:
            raise ValueError("p_gate must be in [0, 1]")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must be in [0, 1]")
        if self.bias is not None:
            if len(self.bias) != 3 or any(p < 0 for p in self.bias):
                raise ValueError("bias must be three non-negative probabilities")
            if sum(self.bias) > 1.0 + 1e-12:
                raise ValueError("bias probabilities must sum to at most 1")
        if self.scope not in NOISE_SCOPES:
            raise ValueError(f"scope must be one of {NOISE_SCOPES}")

    @property
    def pauli_probs(self) -> tuple[float, float, float]:
        """(p_x, p_y, p_z); isotropic depolarizing puts p/4 on each."""
        if self.bias is not None:
            return tuple(self.bias)
        return (self.p_gate / 4.0,) * 3

    @property
    def is_noiseless(self) -> bool:
        px, py, pz = self.pauli_probs
        return px + py + pz == 0.0 and self.eta == 0.0


def sample_raw_state(f_in: float, n: int, rng: np.random.Generator) -> int:
    """Draw one raw copy pattern from the isotropic input mixture.

    The input density operator f_in * GHZ + (1 - f_in) * I / 2^n is
    diagonal in the GHZ basis: the all-zeros pattern carries weight
    f_in + (1 - f_in)/2^n and every other pattern (1 - f_in)/2^n.
    """
    if not 0.0 <= f_in <= 1.0:
        raise ValueError("f_in must be in [0, 1]")
    return int(raw_patterns_from_uniform(f_in, n, rng.random(1))[0])


def raw_patterns_from_uniform(f_in: float, n: int, u: np.ndarray) -> np.ndarray:
    """Map uniform [0,1) draws to raw patterns (vectorized inverse CDF)."""
    dim = 1 << n
    t = f_in + (1.0 - f_in) / dim
    rest = (u - t) / (1.0 - t) if t < 1.0 else np.zeros_like(u)
    nonzero = 1 + np.minimum((rest * (dim - 1)).astype(np.int64), dim - 2)
    return np.where(u < t, 0, nonzero).astype(np.uint32)


def twirl(pattern: int, n: int, rng: np.random.Generator) -> int:
    """Symmetrize one copy: zero stays zero, any error pattern is
    resampled uniformly over the 2^n - 1 nonzero patterns.

    Trajectory-level realization of the isotropic (Werner-like) ensemble
    produced by random-Pauli twirling; the zero-pattern weight, i.e. the
    fidelity, is untouched.
    """
    if pattern == 0:
        return 0
    return int(twirl_from_uniform(np.asarray([pattern], dtype=np.uint32), n, rng.random(1))[0])


def twirl_from_uniform(patterns: np.ndarray, n: int, u: np.ndarray) -> np.ndarray:
    dim = 1 << n
    resampled = 1 + np.minimum((u * (dim - 1)).astype(np.int64), dim - 2)
    return np.where(patterns == 0, 0, resampled).astype(np.uint32)


def gate_touched_qubits(gate: Gate, n: int) -> tuple[tuple[int, int], ...]:
    """Qubits a gate acts on, as (copy_selector, qubit) with selector 0 for
    the gate's first copy operand and 1 for the second; qubits 1-based."""
    if isinstance(gate, HGate):
        nodes = range(1, n + 1)
    else:
        nodes = gate.nodes
    return tuple((c, q) for q in nodes for c in (0, 1))


def pauli_masks_for_qubit(qubit: int, n: int) -> tuple[int, int, int]:
    """(X, Y, Z) flip masks for one qubit of a copy."""
    return (
        pauli_flip_mask("X", qubit, n),
        pauli_flip_mask("Y", qubit, n),
        pauli_flip_mask("Z", qubit, n),
    )


def apply_gate_noise(state, touched, model: NoiseModel, rng: np.random.Generator):
    """Depolarize touched qubits: each independently suffers X/Y/Z with the
    model's Pauli probabilities.

    `touched` is a sequence of (copy_slot, qubit) pairs.  Under the
    "two_random" scope only two uniformly drawn entries are hit.
    """
    px, py, pz = model.pauli_probs
    if px + py + pz == 0.0:
        return state
    touched = list(touched)
    if model.scope == "two_random" and len(touched) > 2:
        picks = rng.choice(len(touched), size=2, replace=False)
        touched = [touched[int(k)] for k in picks]
    n = state.n
    for slot, qubit in touched:
        u = rng.random()
        if u < px:
            mask = pauli_flip_mask("X", qubit, n)
        elif u < px + py:
            mask = pauli_flip_mask("Y", qubit, n)
        elif u < px + py + pz:
            mask = pauli_flip_mask("Z", qubit, n)
        else:
            continue
        state.slots[slot] = state.pattern(slot) ^ mask
    return state


# -- measurement ---------------------------------------------------------------

def z_coincidence_success(pattern: int, flips: np.ndarray, n: int) -> bool:
    """All n nodes measure their qubit in Z; success iff, after the given
    per-qubit outcome flips, all outcomes coincide.

    The raw outcomes of a GHZ-basis copy satisfy o_{i+1} = o_i xor z_i,
    so the adjacent parities equal the z bits xored with the adjacent
    flip parities; the x bit is invisible here.
    """
    word = 0
    for i in range(1, n):
        parity = int(flips[i - 1]) ^ int(flips[i])
        word |= parity << (n - 1 - i)
    zmask = (1 << (n - 1)) - 1
    return (pattern & zmask) == word


def x_parity_success(pattern: int, flips: np.ndarray, n: int) -> bool:
    """All n nodes measure in X; success iff the total outcome parity is
    even, which reads out the x bit (z bits are invisible)."""
    parity = int(np.bitwise_xor.reduce(flips.astype(np.int64))) & 1
    return ((pattern >> (n - 1)) & 1) == parity


def measure_copy(state, copy: int, basis: str, model: NoiseModel,
                 rng: np.random.Generator):
    """Consume one copy with a full-copy X- or Z-basis parity measurement.

    Every one of the n raw single-qubit outcomes independently flips with
    probability eta before the parities are computed.  The measured slot
    becomes free.  Returns (success, state).
    """
    if basis not in ("X", "Z"):
        raise ValueError("basis must be 'X' or 'Z'")
    n = state.n
    pattern = state.pattern(copy)
    flips = rng.random(n) < model.eta
    if basis == "Z":
        success = z_coincidence_success(pattern, flips, n)
    else:
        success = x_parity_success(pattern, flips, n)
    state.slots[copy] = None
    return success, state


def z_acceptance_weights(n: int, eta: float) -> np.ndarray:
    """Exact acceptance probability of the Z-coincidence measurement for
    every copy pattern, marginalized over the outcome-flip noise.

    The flip vectors consistent with coincidence are determined by the
    z bits up to complementation, leaving exactly two of weight w and
    n - w, where w is the prefix-xor weight of the z bits.
    """
    dim = 1 << n
    weights = np.empty(dim, dtype=np.float64)
    zmask = (1 << (n - 1)) - 1
    for pattern in range(dim):
        z = pattern & zmask
        w = 0
        acc = 0
        for i in range(1, n):
            acc ^= (z >> (n - 1 - i)) & 1
            w += acc
        weights[pattern] = eta**w * (1 - eta) ** (n - w) + eta ** (n - w) * (1 - eta) ** w
    return weights


def x_acceptance_weights(n: int, eta: float) -> np.ndarray:
    """Exact acceptance probability of the X-parity measurement per pattern:
    the probability that an even (x bit 0) or odd (x bit 1) number of the
    n outcomes flipped."""
    even = 0.5 * (1.0 + (1.0 - 2.0 * eta) ** n)
    dim = 1 << n
    weights = np.empty(dim, dtype=np.float64)
    xm = x_bit_mask(n)
    for pattern in range(dim):
        weights[pattern] = even if (pattern & xm) == 0 else 1.0 - even
    return weights
