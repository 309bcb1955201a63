"""GHZ distillation circuits: O(1) phase-bitstring simulation, gate-group
enumeration against a stabilizer oracle, exact and Monte Carlo protocol
evaluation, and genetic circuit optimization."""

__version__ = "0.1.0"

from .bits import PhaseBits, SystemState, pauli_flip_mask
from .circuits import Circuit, CircuitConfig, GateOp, MeasureOp, PauliOp, RefillOp, TwirlOp, validate
from .engine import Estimate, TrajectoryResult, estimate, run_trajectory
from .exact import exact_diagonal_oracle
from .gates import BGate, HGate, HKind, PermutationTable, apply_gate, apply_pauli, build_permutation_table
from .noise import NoiseModel, measure_copy, sample_raw_state, twirl
from .optimizer import CostFunction, GAConfig, Genome, anneal_accept, evolve, fitness, random_genome
from .oracle import CliffordMap, PauliString, StabilizerTableau, brute_force_converse, enumerate_ghz_preserving, is_ghz_preserving

__all__ = [
    "BGate", "Circuit", "CircuitConfig", "CliffordMap", "CostFunction", "Estimate",
    "GAConfig", "GateOp", "Genome", "HGate", "HKind", "MeasureOp", "NoiseModel",
    "PauliOp", "PauliString", "PermutationTable", "PhaseBits", "RefillOp",
    "StabilizerTableau", "SystemState", "TrajectoryResult", "TwirlOp",
    "anneal_accept", "apply_gate", "apply_pauli", "brute_force_converse",
    "build_permutation_table", "enumerate_ghz_preserving", "estimate", "evolve",
    "exact_diagonal_oracle", "fitness", "is_ghz_preserving", "measure_copy",
    "pauli_flip_mask", "random_genome", "run_trajectory", "sample_raw_state",
    "twirl", "validate",
]
