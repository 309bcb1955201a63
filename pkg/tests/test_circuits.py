import pytest

from ghzdist.circuits import (
    Circuit,
    CircuitConfig,
    CircuitParseError,
    GateOp,
    MeasureOp,
    PauliOp,
    RefillOp,
    TwirlOp,
    circuit_from_json,
    circuit_to_json,
    validate,
)
from ghzdist.gates import BGate, HGate, HKind
from ghzdist.noise import NoiseModel


def cfg(**kw):
    base = dict(n=3, N=2, K=1, R=2, noise=NoiseModel(), f_in=1.0)
    base.update(kw)
    return CircuitConfig(**base)


def test_config_validation():
    with pytest.raises(ValueError):
        cfg(K=0)
    with pytest.raises(ValueError):
        cfg(K=3)  # K > N
    with pytest.raises(ValueError):
        cfg(N=4, K=1, R=1)
    with pytest.raises(ValueError):
        cfg(R=4, K=5, N=6)  # K > R
    assert cfg(N=2, K=2, R=2).initial_fill == 2
    assert cfg(N=5, K=1, R=3).initial_fill == 3


def test_empty_circuit_valid_when_outputs_equal_inputs():
    assert validate(Circuit(), cfg(N=2, K=2, R=2)) == []


def test_gate_on_measured_copy_flagged():
    circuit = Circuit((
        MeasureOp(1, "Z"),
        GateOp(HGate(HKind.CNOT12), 0, 1),
    ))
    violations = validate(circuit, cfg())
    assert any(v.index == 1 and v.rule == "dead-copy" for v in violations)


def test_register_overflow_flagged():
    # R=3 cannot hold a fourth live copy
    circuit = Circuit((RefillOp(0),))
    violations = validate(circuit, CircuitConfig(n=3, N=4, K=3, R=3))
    assert any(v.rule == "register-overflow" for v in violations)


def test_budget_accounting():
    # consuming fewer than N raw copies is a violation
    circuit = Circuit((MeasureOp(1, "Z"),))
    violations = validate(circuit, cfg(N=3, K=1, R=2))
    assert any(v.index == -1 and v.rule == "raw-budget" for v in violations)
    # and so is ending with the wrong number of live copies
    violations = validate(Circuit(), cfg(N=2, K=1, R=2))
    assert any(v.rule == "outputs" for v in violations)


def test_refill_over_budget_flagged():
    circuit = Circuit((MeasureOp(1, "Z"), RefillOp(1), MeasureOp(1, "Z")))
    violations = validate(circuit, cfg(N=2, K=1, R=2))
    assert any(v.rule == "raw-budget" and v.index == 1 for v in violations)


def test_valid_pump_sequence():
    circuit = Circuit((
        GateOp(HGate(HKind.CNOT12), 0, 1),
        MeasureOp(1, "Z"),
        RefillOp(1),
        GateOp(BGate(True, False, True, (1, 2)), 0, 1),
        TwirlOp(0),
        PauliOp(0, 2, "X"),
        MeasureOp(1, "X"),
    ))
    assert validate(circuit, cfg(N=3, K=1, R=2)) == []


def test_json_roundtrip():
    circuit = Circuit((
        GateOp(HGate(HKind.DCX21), 0, 2),
        GateOp(BGate(False, True, True, (2, 3)), 2, 1),
        PauliOp(1, 3, "Y"),
        MeasureOp(2, "X"),
        RefillOp(2),
        TwirlOp(0),
        MeasureOp(0, "Z"),
        MeasureOp(2, "Z"),
    ))
    text = circuit_to_json(circuit, n=3, N=4, K=1, R=3)
    back, dims = circuit_from_json(text)
    assert back == circuit
    assert dims == {"n": 3, "N": 4, "K": 1, "R": 3}


def test_json_parse_errors():
    with pytest.raises(CircuitParseError):
        circuit_from_json("not json at all {")
    with pytest.raises(CircuitParseError):
        circuit_from_json('{"version": 99, "n": 3}')
    with pytest.raises(CircuitParseError):
        circuit_from_json('{"version": 1, "n": 3, "N": 2, "K": 1, "R": 2}')
    with pytest.raises(CircuitParseError, match="element 0"):
        circuit_from_json(
            '{"version": 1, "n": 3, "N": 2, "K": 1, "R": 2,'
            ' "elements": [{"kind": "warp"}]}'
        )
