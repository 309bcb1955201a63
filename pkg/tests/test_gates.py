import numpy as np
import pytest

from ghzdist.bits import PhaseBits, SystemState
from ghzdist.gates import (
    ALL_H_GATES,
    BGate,
    HGate,
    HKind,
    all_b_gates,
    apply_gate,
    apply_pauli,
    build_permutation_table,
    h_compose,
    load_table_file,
    pair_map,
    save_table_file,
    table_filename,
)

# multiplication table of the homogeneous group, entry[row][col] = apply row
# first, then col.  Two cells of the published version of this table (row
# CNOT21, columns DCX21/DCX12) are transposed relative to the group law that
# the gates' own tableaux force; the values below are the consistent ones,
# and test_published_table_typo documents the difference.
H_MULT = {
    "IDENTITY": ["IDENTITY", "SWAP", "CNOT12", "DCX21", "DCX12", "CNOT21"],
    "SWAP":     ["SWAP", "IDENTITY", "DCX21", "CNOT12", "CNOT21", "DCX12"],
    "CNOT12":   ["CNOT12", "DCX12", "IDENTITY", "CNOT21", "SWAP", "DCX21"],
    "DCX21":    ["DCX21", "CNOT21", "SWAP", "DCX12", "IDENTITY", "CNOT12"],
    "DCX12":    ["DCX12", "CNOT12", "CNOT21", "IDENTITY", "DCX21", "SWAP"],
    "CNOT21":   ["CNOT21", "DCX21", "DCX12", "SWAP", "CNOT12", "IDENTITY"],
}
COLS = ["IDENTITY", "SWAP", "CNOT12", "DCX21", "DCX12", "CNOT21"]


def all_gates(n):
    return list(ALL_H_GATES) + list(all_b_gates(n))


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_tables_bijective_with_fixed_point(n):
    for gate in all_gates(n):
        pt = build_permutation_table(gate, n)
        assert pt.table[0] == 0
        assert len(np.unique(pt.table)) == len(pt.table)
        # composing with the inverse permutation gives identity
        assert np.array_equal(pt.inverse[pt.table], np.arange(len(pt.table)))


def test_cnot12_linear_rule():
    n = 4
    pt = build_permutation_table(HGate(HKind.CNOT12), n).table
    rng = np.random.default_rng(3)
    for _ in range(100):
        a, b = rng.integers(0, 1 << n, 2)
        img = pt[(a << n) | b]
        a2, b2 = img >> n, img & ((1 << n) - 1)
        xa, xb = a >> (n - 1), b >> (n - 1)
        za, zb = a & ((1 << (n - 1)) - 1), b & ((1 << (n - 1)) - 1)
        assert a2 == ((xa ^ xb) << (n - 1)) | za
        assert b2 == (xb << (n - 1)) | (za ^ zb)


def test_apply_gate_spec_cases():
    st = SystemState(3, [0, 0])
    apply_gate(st, HGate(HKind.IDENTITY), 0, 1)
    assert st.slots == [0, 0]
    # perfect pair is fixed by every gate
    for gate in all_gates(3):
        st = SystemState(3, [0, 0])
        apply_gate(st, gate, 0, 1)
        assert st.slots == [0, 0]
    # phase flip on the target propagates into the control's x bit
    st = SystemState(3, [0b000, 0b100])
    apply_gate(st, HGate(HKind.CNOT12), 0, 1)
    assert st.phase_bits(0) == PhaseBits(1, (0, 0))
    assert st.phase_bits(1) == PhaseBits(1, (0, 0))


def test_apply_gate_rejects_same_copy_and_dead_copy():
    st = SystemState(3, [0, None])
    with pytest.raises(ValueError):
        apply_gate(st, HGate(HKind.SWAP), 0, 0)
    with pytest.raises(IndexError):
        apply_gate(st, HGate(HKind.SWAP), 0, 1)


def test_apply_pauli():
    st = SystemState(3, [0])
    for qubit in (1, 2, 3):
        st.slots[0] = 0
        apply_pauli(st, 0, qubit, "Z")
        assert st.phase_bits(0) == PhaseBits(1, (0, 0))
    st.slots[0] = 0
    apply_pauli(st, 0, 1, "X")
    assert st.phase_bits(0) == PhaseBits(0, (1, 0))
    apply_pauli(st, 0, 1, "X")
    assert st.phase_bits(0).is_perfect  # involution


@pytest.mark.parametrize("n", [3, 4])
def test_b_group_is_z2_cubed(n):
    # per node pair: the eight gates commute pairwise and square to identity
    pairs = {g.nodes for g in all_b_gates(n)}
    for pair in pairs:
        tables = [build_permutation_table(BGate(bool(f & 4), bool(f & 2), bool(f & 1), pair), n).table
                  for f in range(8)]
        eye = np.arange(len(tables[0]))
        for t in tables:
            assert np.array_equal(t[t], eye)
        for i, t1 in enumerate(tables):
            for t2 in tables[i + 1:]:
                assert np.array_equal(t1[t2], t2[t1])


def test_h_multiplication_table():
    for row in COLS:
        for ci, col in enumerate(COLS):
            got = h_compose(HKind[row], HKind[col])
            assert got == HKind[H_MULT[row][ci]], f"{row} then {col}"


def test_published_table_typo_documented():
    # the printed table lists CNOT12/SWAP for these two cells, which would
    # contradict the palindrome identity below
    assert h_compose(HKind.CNOT21, HKind.DCX21) == HKind.SWAP
    assert h_compose(HKind.CNOT21, HKind.DCX12) == HKind.CNOT12


def test_swap_palindrome():
    first = h_compose(HKind.CNOT12, HKind.CNOT21)
    assert h_compose(first, HKind.CNOT12) == HKind.SWAP


def test_bgate_validation():
    with pytest.raises(ValueError):
        BGate(True, False, False, (2, 2))
    with pytest.raises(ValueError):
        BGate(True, False, False, (3, 1))
    with pytest.raises(ValueError):
        pair_map(BGate(True, False, False, (1, 5)), 3, 0, 0)


def test_table_cache_file_roundtrip(tmp_path):
    gate = BGate(True, True, False, (1, 3))
    pt = build_permutation_table(gate, 3)
    path = tmp_path / table_filename(gate, 3)
    save_table_file(str(path), pt)
    loaded = load_table_file(str(path))
    assert loaded.gate == gate and loaded.n == 3
    assert np.array_equal(loaded.table, pt.table)
    with pytest.raises(ValueError):
        load_table_file(str(path), expect=(HGate(HKind.SWAP), 3))


def test_env_cache_dir_used(tmp_path, monkeypatch):
    import ghzdist.gates as gates_mod

    gate = HGate(HKind.DCX12)
    pt = build_permutation_table(gate, 2)
    path = tmp_path / table_filename(gate, 2)
    save_table_file(str(path), pt)
    monkeypatch.setenv(gates_mod.CACHE_ENV_VAR, str(tmp_path))
    gates_mod._TABLE_CACHE.pop(gates_mod._gate_key(gate, 2), None)
    reloaded = build_permutation_table(gate, 2)
    assert np.array_equal(reloaded.table, pt.table)
