import math

import pytest

from ghzdist.circuits import CircuitConfig, GateOp, MeasureOp, TwirlOp, validate
from ghzdist.exact import exact_diagonal_oracle
from ghzdist.noise import NoiseModel
from ghzdist.protocols import (
    NestedConfig,
    PumpingConfig,
    SequenceConfig,
    exact_nested,
    exact_pumping,
    exact_sequence,
    nested_circuit,
    nested_setup,
    pumping_circuit,
    pumping_round_elements,
    pumping_setup,
    run_nested,
    run_pumping,
    run_sequence,
    sequence_circuit,
    sequence_setup,
)

NOISE = NoiseModel(p_gate=0.01, eta=0.01)


def test_pumping_round_fragment():
    gate, meas = pumping_round_elements()
    assert isinstance(gate, GateOp) and gate.copy_a == 0 and gate.copy_b == 1
    assert isinstance(meas, MeasureOp) and meas.basis == "Z"


def test_protocol_circuits_validate():
    for rounds in (1, 2, 5):
        circuit, dims = pumping_circuit(rounds, 3)
        assert dims["N"] == rounds + 1
        assert validate(circuit, CircuitConfig(noise=NOISE, f_in=0.9, **dims)) == []
    for levels in (1, 2, 3):
        circuit, dims = nested_circuit(levels, 3)
        assert dims["N"] == 2**levels  # levels 2 and 3 consume 4 and 8 raw copies
        assert validate(circuit, CircuitConfig(noise=NOISE, f_in=0.9, **dims)) == []
    for bases in ("Z", "ZX", "ZZX", "XXX"):
        circuit, dims = sequence_circuit(bases, 3)
        assert dims["N"] == 2 ** len(bases)
        assert validate(circuit, CircuitConfig(noise=NOISE, f_in=0.9, **dims)) == []


def test_config_validation():
    with pytest.raises(ValueError):
        PumpingConfig(0)
    with pytest.raises(ValueError):
        NestedConfig(0)
    with pytest.raises(ValueError):
        SequenceConfig("")
    with pytest.raises(ValueError):
        SequenceConfig("ZY")


def test_perfect_noiseless_everywhere():
    clean = NoiseModel()
    assert exact_pumping(PumpingConfig(3, 3, clean, 1.0)).f_out == 1.0
    assert exact_pumping(PumpingConfig(3, 3, clean, 1.0)).p_succ == 1.0
    assert exact_nested(NestedConfig(2, True, 3, clean, 1.0)).f_out == 1.0
    assert exact_sequence(SequenceConfig("ZZX", 3, clean, 1.0)).p_succ == 1.0
    est = run_nested(NestedConfig(2, True, 3, clean, 1.0), 2000, 1)
    assert est.f_out == 1.0 and est.p_succ == 1.0


def test_single_z_round_equals_pumping_round():
    seq, dims_s = sequence_circuit("Z", 3)
    pump, dims_p = pumping_circuit(1, 3)
    assert seq == pump and dims_s == dims_p


def test_nested_level1_without_twirl_equals_one_pump_round():
    nested, dims_n = nested_circuit(1, 3, twirl_between_rounds=False)
    pump, dims_p = pumping_circuit(1, 3)
    assert nested == pump
    assert dims_n == dims_p


def test_pumping_success_multiplicative():
    # acceptance of round k is independent of later rounds, so the exact
    # success probabilities factor as a product of per-round ratios that
    # also show up as the one-longer run's marginal acceptance
    probs = [exact_pumping(PumpingConfig(r, 3, NOISE, 0.9)).p_succ for r in (1, 2, 3, 4)]
    ratios = [probs[0]] + [probs[k] / probs[k - 1] for k in (1, 2, 3)]
    rebuilt = 1.0
    for r in ratios:
        rebuilt *= r
    assert math.isclose(rebuilt, probs[-1], rel_tol=1e-12)
    assert all(0 < r < 1 for r in ratios)


def test_twirl_insertion_invariant_for_isotropic_input():
    # raw copies are already isotropic, so twirling them before a round
    # changes nothing in the exact statistics
    circuit, dims = pumping_circuit(1, 3)
    config = CircuitConfig(noise=NOISE, f_in=0.8, **dims)
    twirled = circuit.__class__((TwirlOp(0), TwirlOp(1)) + circuit.elements)
    a = exact_diagonal_oracle(circuit, config)
    b = exact_diagonal_oracle(twirled, config)
    assert math.isclose(a.f_out, b.f_out) and math.isclose(a.p_succ, b.p_succ)


def test_twirl_makes_survivor_isotropic():
    # with twirling enabled, survivor ensembles between levels are isotropic
    # over nonzero patterns: compare a twirled nested run against a manual
    # computation that replaces the survivor by its isotropic equivalent
    from ghzdist.exact import raw_distribution
    import numpy as np
    from ghzdist.gates import HGate, HKind, build_permutation_table
    from ghzdist.noise import z_acceptance_weights

    n, f_in = 3, 0.8
    noise = NoiseModel(p_gate=0.0, eta=0.0)
    est = exact_nested(NestedConfig(2, True, 3, noise, f_in))
    # manual: survivor fidelity t1 after level 1, isotropize, run level 2
    table = build_permutation_table(HGate(HKind.CNOT12), n).table
    raw = raw_distribution(f_in, n)

    def round_out(dist):
        out = np.zeros_like(dist)
        succ = 0.0
        w = z_acceptance_weights(n, 0.0)
        for a in range(8):
            for b in range(8):
                img = int(table[(a << n) | b])
                keep, meas = img >> n, img & 7
                mass = dist[a] * dist[b] * w[meas]
                out[keep] += mass
                succ += mass
        return out / succ, succ

    d1, s1 = round_out(raw)
    iso = np.full(8, (1 - d1[0]) / 7)
    iso[0] = d1[0]
    d2, s2 = round_out(iso)
    assert math.isclose(est.p_succ, s1 * s1 * s2, rel_tol=1e-12)
    assert math.isclose(est.f_out, d2[0], rel_tol=1e-12)


def test_noiseless_pumping_beats_input_fidelity():
    est = exact_pumping(PumpingConfig(8, 3, NoiseModel(), 0.9))
    assert est.f_out > 0.9


def test_untwirled_pumping_accumulates_phase_errors():
    # without the between-round twirl, Z-coincidence rounds never see the
    # accumulated phase flips and the fidelity decays below the input
    est = exact_pumping(PumpingConfig(8, 3, NoiseModel(), 0.9, twirl_between_rounds=False))
    assert est.f_out < 0.9


def test_monotone_degradation_in_noise():
    # exact pumping fidelity never improves when p or eta grows
    grid = [0.0, 0.005, 0.01, 0.02]
    for eta in grid:
        fs = [exact_pumping(PumpingConfig(3, 3, NoiseModel(p_gate=p, eta=eta), 0.9)).f_out
              for p in grid]
        assert all(a >= b - 1e-12 for a, b in zip(fs, fs[1:]))
    for p in grid:
        fs = [exact_pumping(PumpingConfig(3, 3, NoiseModel(p_gate=p, eta=eta), 0.9)).f_out
              for eta in grid]
        assert all(a >= b - 1e-12 for a, b in zip(fs, fs[1:]))


def test_pumping_curves_monotone_in_input_fidelity():
    for rounds in (3, 4, 5):
        fs = [exact_pumping(PumpingConfig(rounds, 3, NOISE, f)).f_out
              for f in (0.6, 0.7, 0.8, 0.9, 0.99)]
        assert all(a < b for a, b in zip(fs, fs[1:]))


def test_stored_phase_error_survives_pump_round():
    # a phase-flipped stored copy passes the Z round untouched: accepted
    # with certainty yet the output is imperfect
    from ghzdist.circuits import Circuit, PauliOp
    from ghzdist.protocols import pumping_round_elements

    circuit = Circuit((PauliOp(0, 2, "Z"),) + pumping_round_elements())
    config = CircuitConfig(n=3, N=2, K=1, R=2, noise=NoiseModel(), f_in=1.0)
    est = exact_diagonal_oracle(circuit, config)
    assert est.p_succ == 1.0 and est.f_out == 0.0


def test_zzz_beats_xxx_for_ghz_inputs():
    z = exact_sequence(SequenceConfig("ZZZ", 3, NOISE, 0.85))
    x = exact_sequence(SequenceConfig("XXX", 3, NOISE, 0.85))
    assert z.f_out > x.f_out


def test_eight_sequences_distinct():
    points = set()
    for b1 in "ZX":
        for b2 in "ZX":
            for b3 in "ZX":
                est = exact_sequence(SequenceConfig(b1 + b2 + b3, 3, NOISE, 0.85))
                points.add((round(est.f_out, 12), round(est.p_succ, 12)))
    assert len(points) == 8


def test_mc_drivers_track_exact():
    for mc, ex in (
        (run_pumping(PumpingConfig(2, 3, NOISE, 0.85), 150_000, 3),
         exact_pumping(PumpingConfig(2, 3, NOISE, 0.85))),
        (run_sequence(SequenceConfig("ZX", 3, NOISE, 0.85), 150_000, 3),
         exact_sequence(SequenceConfig("ZX", 3, NOISE, 0.85))),
    ):
        assert abs(mc.f_out - ex.f_out) < 4 * mc.f_out_se
        assert abs(mc.p_succ - ex.p_succ) < 4 * mc.p_succ_se


def test_setups_share_dims():
    _, config = pumping_setup(PumpingConfig(4, 3, NOISE, 0.9))
    assert (config.N, config.K, config.R) == (5, 1, 2)
    _, config = nested_setup(NestedConfig(3, True, 3, NOISE, 0.9))
    assert (config.N, config.K, config.R) == (8, 1, 8)
    _, config = sequence_setup(SequenceConfig("ZZX", 3, NOISE, 0.9))
    assert (config.N, config.K, config.R) == (8, 1, 8)
