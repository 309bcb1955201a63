"""Phase-bit encoding of GHZ-basis states.

An n-qubit GHZ-basis state is fully described by the signs of its n
stabilizer generators: the X-type generator X^(x)n (one bit) and the n-1
Z-type generators Z_i Z_{i+1} for i = 1..n-1.  A sign of +1 is encoded as
bit 0, -1 as bit 1, so the perfect GHZ state is the all-zeros pattern.

Bit layout of a copy pattern (an int in [0, 2^n)):

    bit n-1      sign of the X-type generator ("x bit")
    bit n-1-i    sign of Z_i Z_{i+1}          ("z bit" i, i = 1..n-1)

Two copies a, b combine into a pair index ``(a << n) | b``; this ordering
is the on-disk and in-memory convention for permutation tables.
"""
from __future__ import annotations

from dataclasses import dataclass, field

PAULIS = ("I", "X", "Y", "Z")


def x_bit_mask(n: int) -> int:
    return 1 << (n - 1)


def z_bits_mask(n: int) -> int:
    return (1 << (n - 1)) - 1


def pauli_flip_mask(pauli: str, qubit: int, n: int) -> int:
    """Phase bits flipped when a single-qubit Pauli acts on one copy.

    A Z on any qubit anticommutes only with the X-type generator, so it
    flips the x bit regardless of the qubit index.  An X on qubit k
    anticommutes with the Z-type generators whose support touches k,
    i.e. Z_{k-1}Z_k and Z_k Z_{k+1} (those that exist).  Y flips the
    union of both sets.

    Args:
        pauli: one of "I", "X", "Y", "Z".
        qubit: 1-based qubit index within the copy.
        n: qubits per copy.

    Returns:
        Bitmask over the copy's phase bits.
    """
    if not 1 <= qubit <= n:
        raise ValueError(f"qubit index {qubit} out of range 1..{n}")
    if pauli not in PAULIS:
        raise ValueError(f"unknown Pauli {pauli!r}")
    if pauli == "I":
        return 0
    zmask = 0
    for i in (qubit - 1, qubit):  # Z-type generators Z_i Z_{i+1} touching `qubit`
        if 1 <= i <= n - 1:
            zmask |= 1 << (n - 1 - i)
    if pauli == "X":
        return zmask
    if pauli == "Z":
        return x_bit_mask(n)
    return zmask | x_bit_mask(n)  # Y = X then Z


@dataclass(frozen=True)
class PhaseBits:
    """Structured view of one copy's phase bits."""

    x_bit: int
    z_bits: tuple[int, ...]

    def __post_init__(self):
        if self.x_bit not in (0, 1) or any(b not in (0, 1) for b in self.z_bits):
            raise ValueError("phase bits must be 0 or 1")

    @property
    def n(self) -> int:
        return len(self.z_bits) + 1

    @property
    def index(self) -> int:
        idx = self.x_bit
        for b in self.z_bits:
            idx = (idx << 1) | b
        return idx

    @classmethod
    def from_index(cls, n: int, index: int) -> "PhaseBits":
        if not 0 <= index < (1 << n):
            raise ValueError(f"pattern {index} out of range for n={n}")
        x = (index >> (n - 1)) & 1
        z = tuple((index >> (n - 1 - i)) & 1 for i in range(1, n))
        return cls(x, z)

    @property
    def is_perfect(self) -> bool:
        return self.x_bit == 0 and not any(self.z_bits)


@dataclass
class SystemState:
    """A register of GHZ-basis copies, each stored as a pattern int.

    ``slots[k] is None`` marks a consumed (measured, not yet refilled)
    register slot.  All gate/Pauli/noise operations mutate in place and
    return the state for chaining; use :meth:`copy` to branch.
    """

    n: int
    slots: list = field(default_factory=list)

    @classmethod
    def perfect(cls, n: int, copies: int) -> "SystemState":
        return cls(n, [0] * copies)

    def copy(self) -> "SystemState":
        return SystemState(self.n, list(self.slots))

    @property
    def live_slots(self) -> list:
        return [k for k, s in enumerate(self.slots) if s is not None]

    def pattern(self, slot: int) -> int:
        p = self.slots[slot]
        if p is None:
            raise IndexError(f"slot {slot} holds no live copy")
        return p

    def phase_bits(self, slot: int) -> PhaseBits:
        return PhaseBits.from_index(self.n, self.pattern(slot))
