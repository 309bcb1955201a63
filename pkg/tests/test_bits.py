import pytest

from ghzdist.bits import PhaseBits, SystemState, pauli_flip_mask, x_bit_mask


def test_z_mask_is_qubit_independent():
    # a phase flip looks the same no matter which qubit carries it
    masks = {pauli_flip_mask("Z", k, 3) for k in (1, 2, 3)}
    assert masks == {x_bit_mask(3)}
    masks5 = {pauli_flip_mask("Z", k, 5) for k in range(1, 6)}
    assert masks5 == {x_bit_mask(5)}


def test_x_mask_flips_adjacent_z_generators():
    # X on qubit 2 of a 3-qubit copy anticommutes with Z1Z2 and Z2Z3
    mask = pauli_flip_mask("X", 2, 3)
    assert PhaseBits.from_index(3, mask) == PhaseBits(0, (1, 1))
    # boundary qubits touch a single Z generator
    assert PhaseBits.from_index(3, pauli_flip_mask("X", 1, 3)) == PhaseBits(0, (1, 0))
    assert PhaseBits.from_index(3, pauli_flip_mask("X", 3, 3)) == PhaseBits(0, (0, 1))


def test_x_mask_matches_sign_pattern_of_flipped_state():
    # X_2 |GHZ_3> = (|010> + |101>)/sqrt(2), whose generator signs are (+,-,-)
    pattern = pauli_flip_mask("X", 2, 3)
    assert PhaseBits.from_index(3, pattern) == PhaseBits(x_bit=0, z_bits=(1, 1))


def test_identity_mask_empty():
    assert pauli_flip_mask("I", 1, 3) == 0


def test_y_mask_is_x_xor_z():
    for n in (2, 3, 4, 5):
        for k in range(1, n + 1):
            assert pauli_flip_mask("Y", k, n) == (
                pauli_flip_mask("X", k, n) ^ pauli_flip_mask("Z", k, n)
            )


def test_masks_are_involutions():
    for n in (2, 4):
        for k in range(1, n + 1):
            for p in "XYZ":
                m = pauli_flip_mask(p, k, n)
                assert (0b1011 % (1 << n)) ^ m ^ m == 0b1011 % (1 << n)


def test_mask_rejects_bad_input():
    with pytest.raises(ValueError):
        pauli_flip_mask("X", 0, 3)
    with pytest.raises(ValueError):
        pauli_flip_mask("X", 4, 3)
    with pytest.raises(ValueError):
        pauli_flip_mask("Q", 1, 3)


def test_phase_bits_roundtrip():
    for n in (2, 3, 5):
        for idx in range(1 << n):
            pb = PhaseBits.from_index(n, idx)
            assert pb.index == idx
            assert pb.n == n
    assert PhaseBits.from_index(3, 0).is_perfect
    assert not PhaseBits.from_index(3, 1).is_perfect


def test_phase_bits_layout_x_most_significant():
    pb = PhaseBits(x_bit=1, z_bits=(0, 0))
    assert pb.index == 0b100
    pb = PhaseBits(x_bit=0, z_bits=(1, 0))
    assert pb.index == 0b010


def test_system_state_slots():
    st = SystemState.perfect(3, 2)
    assert st.live_slots == [0, 1]
    st.slots[0] = None
    assert st.live_slots == [1]
    with pytest.raises(IndexError):
        st.pattern(0)
    clone = st.copy()
    clone.slots[1] = 5
    assert st.slots[1] == 0
