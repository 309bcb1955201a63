"""Baseline distillation protocols expressed as circuits.

Three references: recurrent pumping (a stored copy repeatedly purified by
fresh raw copies via homogeneous CNOT and Z-coincidence postselection),
the nested binary-tree recursion (optionally twirling survivors between
levels), and the two-colorable recurrence whose per-round measurement
basis is chosen by a Z/X sequence with the matching CNOT orientation.
"""
from __future__ import annotations

from dataclasses import dataclass

from .circuits import Circuit, CircuitConfig, GateOp, MeasureOp, RefillOp, TwirlOp
from .engine import Estimate, estimate
from .exact import exact_diagonal_oracle
from .gates import HGate, HKind
from .noise import NoiseModel

_CNOT = HGate(HKind.CNOT12)


def pumping_round_elements(stored: int = 0, raw: int = 1) -> tuple:
    """One pump round: homogeneous CNOT from the stored copy (control) onto
    the raw copy, then Z-coincidence measurement of the raw copy."""
    return (GateOp(_CNOT, stored, raw), MeasureOp(raw, "Z"))


@dataclass(frozen=True)
class PumpingConfig:
    """Recurrent pumping: N = rounds + 1 raw copies through a 2-slot register.

    The standard protocol symmetrizes the stored copy's errors between
    rounds (its round fidelity is defined under that assumption); without
    the twirl, repeated Z-coincidence rounds let phase errors accumulate
    and the fidelity decays instead of approaching a fixed point.
    """

    rounds: int
    n: int = 3
    noise: NoiseModel = NoiseModel()
    f_in: float = 1.0
    twirl_between_rounds: bool = True

    def __post_init__(self):
        if self.rounds < 1:
            raise ValueError("need at least one pump round")


def pumping_circuit(rounds: int, n: int, twirl_between_rounds: bool = True):
    """(circuit, config-dims): N = rounds + 1 raw copies through a 2-slot register."""
    elements = []
    for r in range(rounds):
        elements.extend(pumping_round_elements(0, 1))
        if r < rounds - 1:
            if twirl_between_rounds:
                elements.append(TwirlOp(0))
            elements.append(RefillOp(1))
    dims = dict(n=n, N=rounds + 1, K=1, R=2)
    return Circuit(tuple(elements)), dims


@dataclass(frozen=True)
class NestedConfig:
    levels: int
    twirl_between_rounds: bool = True
    n: int = 3
    noise: NoiseModel = NoiseModel()
    f_in: float = 1.0

    def __post_init__(self):
        if self.levels < 1:
            raise ValueError("need at least one level")


def nested_circuit(levels: int, n: int, twirl_between_rounds: bool = True):
    """Binary-tree recursion on 2^levels raw copies, all held simultaneously.

    Survivors of each level are pairwise distilled in the next; when
    enabled, survivors that continue to another level are twirled first.
    """
    total = 1 << levels
    elements = []
    survivors = list(range(total))
    for level in range(levels):
        nxt = []
        for k in range(0, len(survivors), 2):
            keep, meas = survivors[k], survivors[k + 1]
            elements.append(GateOp(_CNOT, keep, meas))
            elements.append(MeasureOp(meas, "Z"))
            nxt.append(keep)
        survivors = nxt
        if twirl_between_rounds and level < levels - 1:
            elements.extend(TwirlOp(s) for s in survivors)
    dims = dict(n=n, N=total, K=1, R=total)
    return Circuit(tuple(elements)), dims


@dataclass(frozen=True)
class SequenceConfig:
    bases: str  # e.g. "ZZX": measurement basis per round
    n: int = 3
    noise: NoiseModel = NoiseModel()
    f_in: float = 1.0

    def __post_init__(self):
        if not self.bases or any(b not in "ZX" for b in self.bases):
            raise ValueError("bases must be a non-empty string over {Z, X}")


def sequence_circuit(bases: str, n: int):
    """Pairwise recurrence with per-round basis choice.

    A Z round detects bit-flip errors: CNOT from the kept copy (control)
    onto the measured copy, Z-coincidence readout.  An X round detects
    phase errors: CNOT from the measured copy (control) onto the kept
    copy, X-parity readout of the measured copy.  No twirling.
    """
    rounds = len(bases)
    total = 1 << rounds
    elements = []
    survivors = list(range(total))
    for basis in bases:
        nxt = []
        for k in range(0, len(survivors), 2):
            keep, meas = survivors[k], survivors[k + 1]
            if basis == "Z":
                elements.append(GateOp(_CNOT, keep, meas))
            else:
                elements.append(GateOp(_CNOT, meas, keep))
            elements.append(MeasureOp(meas, basis))
            nxt.append(keep)
        survivors = nxt
    dims = dict(n=n, N=total, K=1, R=total)
    return Circuit(tuple(elements)), dims


def _build(circuit_dims, noise, f_in) -> tuple[Circuit, CircuitConfig]:
    circuit, dims = circuit_dims
    return circuit, CircuitConfig(noise=noise, f_in=f_in, **dims)


def pumping_setup(cfg: PumpingConfig):
    return _build(pumping_circuit(cfg.rounds, cfg.n, cfg.twirl_between_rounds),
                  cfg.noise, cfg.f_in)


def nested_setup(cfg: NestedConfig):
    return _build(nested_circuit(cfg.levels, cfg.n, cfg.twirl_between_rounds),
                  cfg.noise, cfg.f_in)


def sequence_setup(cfg: SequenceConfig):
    return _build(sequence_circuit(cfg.bases, cfg.n), cfg.noise, cfg.f_in)


def run_pumping(cfg: PumpingConfig, samples: int, seed: int, threads: int = 1) -> Estimate:
    circuit, config = pumping_setup(cfg)
    return estimate(circuit, config, samples, seed, threads=threads)


def run_nested(cfg: NestedConfig, samples: int, seed: int, threads: int = 1) -> Estimate:
    circuit, config = nested_setup(cfg)
    return estimate(circuit, config, samples, seed, threads=threads)


def run_sequence(cfg: SequenceConfig, samples: int, seed: int, threads: int = 1) -> Estimate:
    circuit, config = sequence_setup(cfg)
    return estimate(circuit, config, samples, seed, threads=threads)


def exact_pumping(cfg: PumpingConfig) -> Estimate:
    return exact_diagonal_oracle(*pumping_setup(cfg))


def exact_nested(cfg: NestedConfig) -> Estimate:
    return exact_diagonal_oracle(*nested_setup(cfg))


def exact_sequence(cfg: SequenceConfig) -> Estimate:
    return exact_diagonal_oracle(*sequence_setup(cfg))
