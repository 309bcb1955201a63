"""GHZ-preserving gate alphabet and O(1) permutation-table application.

Two gate families act on a pair of GHZ-basis copies:

* homogeneous gates: the same two-qubit gate at every node, between the
  node's qubit of copy a (first slot of the gate) and of copy b (second
  slot).  Six distinct phaseless gates exist; they form a non-Abelian
  group of order 6.
* bilocal gates: CZ and/or paired S gates applied identically at exactly
  two nodes.  Eight per node pair; commuting involutions.

Each gate induces an F2-linear map on the 2n phase bits of the copy pair,
hence a permutation of the 2^(2n) pair indices.  Tables are built once,
verified bijective, memoized per (gate, n), and applied with a single
lookup, making gate cost independent of n.

Tables hold the phaseless canonical form of each gate: the deterministic
x-bit offset that literal bilocal S gates would add (their square is a
Z-type Pauli) is absorbed, i.e. treated as a classically tracked Pauli
frame.  Consequently every table fixes index 0.
"""
from __future__ import annotations

import enum
import os
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bits import pauli_flip_mask, x_bit_mask, z_bits_mask

CACHE_ENV_VAR = "GHZDIST_TABLE_DIR"
_CACHE_MAGIC = b"GHZPERM1"


class HKind(enum.IntEnum):
    IDENTITY = 0
    SWAP = 1
    CNOT12 = 2
    DCX21 = 3
    DCX12 = 4
    CNOT21 = 5


@dataclass(frozen=True)
class HGate:
    kind: HKind

    def __str__(self):
        return f"H:{self.kind.name}"


@dataclass(frozen=True)
class BGate:
    """Bilocal gate CZ^cz (S^s1 x S^s2) on a node pair, applied at both nodes.

    s1 acts on the copy-a qubit, s2 on the copy-b qubit.  Nodes are
    1-based with nodes[0] < nodes[1].
    """

    cz: bool
    s1: bool
    s2: bool
    nodes: tuple[int, int]

    def __post_init__(self):
        i, j = self.nodes
        if not 1 <= i < j:
            raise ValueError(f"node pair must satisfy 1 <= i < j, got {self.nodes}")

    @property
    def flags_index(self) -> int:
        """Stable 0..7 index: (cz, s1, s2) as a 3-bit number, cz most significant."""
        return (self.cz << 2) | (self.s1 << 1) | self.s2

    def __str__(self):
        parts = [p for p, on in (("CZ", self.cz), ("S1", self.s1), ("S2", self.s2)) if on]
        label = "+".join(parts) if parts else "ID"
        return f"B:{label}@{self.nodes[0]},{self.nodes[1]}"


Gate = HGate | BGate

ALL_H_GATES = tuple(HGate(k) for k in HKind)


def all_b_gates(n: int, adjacent_only: bool = False):
    """All bilocal gates on n nodes, in (pair, flags) lexicographic order."""
    pairs = [(i, i + 1) for i in range(1, n)] if adjacent_only else [
        (i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)
    ]
    gates = []
    for pair in pairs:
        for flags in range(8):
            gates.append(BGate(bool(flags & 4), bool(flags & 2), bool(flags & 1), pair))
    return tuple(gates)


def _segment_mask(n: int, i: int, j: int) -> int:
    """z bits of the generators Z_i..Z_{i+1} .. Z_{j-1}Z_j linking nodes i and j."""
    return ((1 << (j - i)) - 1) << (n - j)


def pair_map(gate: Gate, n: int, a: int, b: int) -> tuple[int, int]:
    """Phaseless action of a gate on one pair of copy patterns.

    This is the direct bit-level update rule; the tableau-conjugation
    route in :mod:`ghzdist.oracle` rederives the same permutation
    independently and the test suite compares them entry for entry.
    """
    xm = x_bit_mask(n)
    zm = z_bits_mask(n)
    if isinstance(gate, HGate):
        xa, xb = a & xm, b & xm
        za, zb = a & zm, b & zm
        k = gate.kind
        if k == HKind.IDENTITY:
            pass
        elif k == HKind.SWAP:
            xa, xb, za, zb = xb, xa, zb, za
        elif k == HKind.CNOT12:
            xa, zb = xa ^ xb, za ^ zb
        elif k == HKind.CNOT21:
            xb, za = xa ^ xb, za ^ zb
        elif k == HKind.DCX12:
            xa, xb, za, zb = xb, xa ^ xb, za ^ zb, za
        else:  # DCX21
            xa, xb, za, zb = xa ^ xb, xa, zb, za ^ zb
        return xa | za, xb | zb
    i, j = gate.nodes
    if j > n:
        raise ValueError(f"node pair {gate.nodes} out of range for n={n}")
    seg = _segment_mask(n, i, j)
    # segment parities depend only on z bits, which no factor changes,
    # so the CZ/S1/S2 factors commute and can be applied in any order
    sa = bin(a & seg).count("1") & 1
    sb = bin(b & seg).count("1") & 1
    if gate.s1:
        a ^= sa << (n - 1)
    if gate.s2:
        b ^= sb << (n - 1)
    if gate.cz:
        a ^= sb << (n - 1)
        b ^= sa << (n - 1)
    return a, b


def _popcount_parity(arr: np.ndarray) -> np.ndarray:
    out = arr.copy()
    shift = 1
    while shift < arr.itemsize * 8:
        out ^= out >> shift
        shift <<= 1
    return out & 1


def _pair_map_vectorized(gate: Gate, n: int, idx: np.ndarray) -> np.ndarray:
    """pair_map over an array of pair indices (a<<n|b)."""
    full = np.uint32((1 << n) - 1)
    a = (idx >> np.uint32(n)) & full
    b = idx & full
    xm = np.uint32(x_bit_mask(n))
    zm = np.uint32(z_bits_mask(n))
    if isinstance(gate, HGate):
        xa, xb = a & xm, b & xm
        za, zb = a & zm, b & zm
        k = gate.kind
        if k == HKind.SWAP:
            xa, xb, za, zb = xb, xa, zb, za
        elif k == HKind.CNOT12:
            xa, zb = xa ^ xb, za ^ zb
        elif k == HKind.CNOT21:
            xb, za = xa ^ xb, za ^ zb
        elif k == HKind.DCX12:
            xa, xb, za, zb = xb, xa ^ xb, za ^ zb, za
        elif k == HKind.DCX21:
            xa, xb, za, zb = xa ^ xb, xa, zb, za ^ zb
        a2, b2 = xa | za, xb | zb
    else:
        i, j = gate.nodes
        seg = np.uint32(_segment_mask(n, i, j))
        sa = _popcount_parity(a & seg).astype(np.uint32)
        sb = _popcount_parity(b & seg).astype(np.uint32)
        a2, b2 = a.copy(), b.copy()
        shift = np.uint32(n - 1)
        if gate.s1:
            a2 ^= sa << shift
        if gate.s2:
            b2 ^= sb << shift
        if gate.cz:
            a2 ^= sb << shift
            b2 ^= sa << shift
    return ((a2 << np.uint32(n)) | b2).astype(np.uint32)


@dataclass(frozen=True)
class PermutationTable:
    """Bijective lookup table over the 2^(2n) pair indices of one gate."""

    gate: Gate
    n: int
    table: np.ndarray

    def __post_init__(self):
        self.table.setflags(write=False)

    @property
    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.table)
        inv[self.table] = np.arange(len(self.table), dtype=self.table.dtype)
        return inv


def _gate_key(gate: Gate, n: int):
    if isinstance(gate, HGate):
        return ("H", int(gate.kind), n)
    return ("B", gate.flags_index, gate.nodes, n)


_TABLE_CACHE: dict = {}


def build_permutation_table(gate: Gate, n: int) -> PermutationTable:
    """Build (or fetch memoized / cached-on-disk) the gate's pair permutation.

    Bijectivity and the fixed point table[0] == 0 are asserted at build
    time.  If the environment variable named by ``CACHE_ENV_VAR`` points
    to a directory containing a matching table file, it is loaded
    instead of rebuilt.
    """
    if n < 2:
        raise ValueError("need at least two qubits per copy")
    key = _gate_key(gate, n)
    cached = _TABLE_CACHE.get(key)
    if cached is not None:
        return cached
    cache_dir = os.environ.get(CACHE_ENV_VAR)
    table = None
    if cache_dir:
        path = os.path.join(cache_dir, table_filename(gate, n))
        if os.path.exists(path):
            table = load_table_file(path, expect=(gate, n)).table
    if table is None:
        idx = np.arange(1 << (2 * n), dtype=np.uint32)
        table = _pair_map_vectorized(gate, n, idx)
    if table[0] != 0:
        raise AssertionError(f"{gate} table does not fix the all-plus pair")
    counts = np.bincount(table, minlength=len(table))
    if not (counts == 1).all():
        raise AssertionError(f"{gate} table is not a bijection")
    pt = PermutationTable(gate, n, table)
    _TABLE_CACHE[key] = pt
    return pt


def apply_gate(state, gate: Gate, copy_a: int, copy_b: int):
    """Apply a gate to copies (copy_a, copy_b) via one table lookup."""
    if copy_a == copy_b:
        raise ValueError("gate needs two distinct copies")
    n = state.n
    a = state.pattern(copy_a)
    b = state.pattern(copy_b)
    pt = build_permutation_table(gate, n)
    img = int(pt.table[(a << n) | b])
    state.slots[copy_a] = img >> n
    state.slots[copy_b] = img & ((1 << n) - 1)
    return state


def apply_pauli(state, copy: int, qubit: int, pauli: str):
    """XOR a single-qubit Pauli's flip mask into one copy."""
    state.slots[copy] = state.pattern(copy) ^ pauli_flip_mask(pauli, qubit, state.n)
    return state


# -- H group composition -----------------------------------------------------

@lru_cache(maxsize=None)
def h_compose(first: HKind, then: HKind) -> HKind:
    """Group product: the gate equal to applying `first`, then `then`."""
    t1 = build_permutation_table(HGate(first), 2).table
    t2 = build_permutation_table(HGate(then), 2).table
    combined = t2[t1]
    for k in HKind:
        if np.array_equal(combined, build_permutation_table(HGate(k), 2).table):
            return k
    raise AssertionError("H gates are not closed under composition")


# -- binary table cache files -------------------------------------------------

def _gate_descriptor_bytes(gate: Gate) -> bytes:
    if isinstance(gate, HGate):
        return struct.pack("<BBBB", 0, int(gate.kind), 0, 0)
    return struct.pack("<BBBB", 1, gate.flags_index, gate.nodes[0], gate.nodes[1])


def table_filename(gate: Gate, n: int) -> str:
    if isinstance(gate, HGate):
        return f"h_{gate.kind.name.lower()}_n{n}.tbl"
    return f"b_{gate.flags_index}_{gate.nodes[0]}_{gate.nodes[1]}_n{n}.tbl"


def save_table_file(path: str, pt: PermutationTable) -> None:
    """Header: magic, n (u16), gate descriptor (4 bytes); then 2^(2n) LE u32."""
    with open(path, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<H", pt.n))
        fh.write(_gate_descriptor_bytes(pt.gate))
        fh.write(pt.table.astype("<u4").tobytes())


def load_table_file(path: str, expect: tuple | None = None) -> PermutationTable:
    with open(path, "rb") as fh:
        magic = fh.read(len(_CACHE_MAGIC))
        if magic != _CACHE_MAGIC:
            raise ValueError(f"{path}: not a permutation table file")
        (n,) = struct.unpack("<H", fh.read(2))
        kind, p0, p1, p2 = struct.unpack("<BBBB", fh.read(4))
        if kind == 0:
            gate: Gate = HGate(HKind(p0))
        else:
            gate = BGate(bool(p0 & 4), bool(p0 & 2), bool(p0 & 1), (p1, p2))
        raw = fh.read(4 * (1 << (2 * n)))
        table = np.frombuffer(raw, dtype="<u4").astype(np.uint32)
    if expect is not None and (gate, n) != expect:
        raise ValueError(f"{path}: header {gate}, n={n} does not match requested {expect}")
    if len(table) != 1 << (2 * n):
        raise ValueError(f"{path}: truncated table")
    return PermutationTable(gate, n, table)
