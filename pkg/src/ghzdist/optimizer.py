"""Genetic search with annealed replacement over GHZ-preserving circuit genomes.

A genome is a circuit element sequence drawn from the closed alphabet
{homogeneous gates x copy pairs, bilocal gates x node pairs x copy pairs,
measurements, refills}; every genome ever evaluated decodes to a circuit
that passes validation, enforced constructively at sampling time and by a
repair pass after crossover/mutation.  Fitness is the Monte Carlo output
fidelity, optionally penalized below a success-probability floor, and
candidate offspring replace incumbents under a Metropolis rule with a
geometrically cooled temperature.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bits import PAULIS
from .circuits import (
    BASES,
    Circuit,
    CircuitConfig,
    Element,
    GateOp,
    MeasureOp,
    PauliOp,
    RefillOp,
)
from .engine import Estimate, estimate
from .exact import exact_diagonal_oracle
from .gates import BGate, HGate, HKind


@dataclass(frozen=True)
class Genome:
    elements: tuple

    def decode(self) -> Circuit:
        return Circuit(self.elements)

    def __len__(self):
        return len(self.elements)


@dataclass(frozen=True)
class CostFunction:
    """fidelity_max ignores success probability; fidelity_under_success_floor
    returns f_out when p_succ >= p_min and applies a linear penalty
    f_out - penalty * (p_min - p_succ) otherwise, so the search can cross
    infeasible regions instead of stalling on hard rejection."""

    mode: str = "fidelity_max"
    p_min: float = 0.0
    penalty: float = 10.0

    def __post_init__(self):
        if self.mode not in ("fidelity_max", "fidelity_under_success_floor"):
            raise ValueError(f"unknown cost mode {self.mode!r}")
        if self.mode == "fidelity_under_success_floor" and not 0.0 < self.p_min <= 1.0:
            raise ValueError("constrained mode needs p_min in (0, 1]")

    def score(self, est: Estimate) -> float:
        if est.accepted == 0 and not est.exact:
            return 0.0
        if math.isnan(est.f_out):
            return 0.0
        if self.mode == "fidelity_max" or est.p_succ >= self.p_min:
            return est.f_out
        return est.f_out - self.penalty * (self.p_min - est.p_succ)


@dataclass(frozen=True)
class GAConfig:
    population: int = 200
    generations: int = 200
    elite: int = 4
    crossover_prob: float = 0.7
    replace_prob: float = 0.08
    insert_prob: float = 0.06
    delete_prob: float = 0.06
    t_initial: float = 0.05
    t_final_ratio: float = 0.01  # T(G) = t_initial * t_final_ratio
    fitness_samples: int = 3000
    max_len: int = 30
    include_paulis: bool = False
    fitness_backend: str = "mc"  # "mc" or "exact"

    def __post_init__(self):
        if self.population < 2 or self.generations < 0:
            raise ValueError("population >= 2 and generations >= 0 required")
        if not 0 <= self.elite < self.population:
            raise ValueError("elite count must be below the population size")
        for p in (self.crossover_prob, self.replace_prob, self.insert_prob, self.delete_prob):
            if not 0.0 <= p <= 1.0:
                raise ValueError("probabilities must be in [0, 1]")
        if self.t_initial <= 0 or not 0 < self.t_final_ratio <= 1:
            raise ValueError("temperature schedule must stay positive")
        if self.fitness_backend not in ("mc", "exact"):
            raise ValueError("fitness_backend must be 'mc' or 'exact'")

    def temperature(self, generation: int) -> float:
        """Geometric cooling from t_initial down to t_initial * t_final_ratio."""
        if self.generations == 0:
            return self.t_initial
        alpha = self.t_final_ratio ** (1.0 / self.generations)
        return self.t_initial * alpha**generation


# -- genome construction ----------------------------------------------------------

def _closure_counts(live: set, consumed: int, config: CircuitConfig):
    refills = config.N - consumed
    measures = len(live) + refills - config.K
    return refills, measures


def _random_gate(config: CircuitConfig, live: list, rng) -> GateOp:
    a, b = rng.choice(len(live), size=2, replace=False)
    copy_a, copy_b = live[int(a)], live[int(b)]
    if config.n >= 2 and rng.random() < 0.5:
        pairs = [(i, j) for i in range(1, config.n + 1) for j in range(i + 1, config.n + 1)]
        i, j = pairs[int(rng.integers(len(pairs)))]
        flags = int(rng.integers(8))
        return GateOp(BGate(bool(flags & 4), bool(flags & 2), bool(flags & 1), (i, j)),
                      copy_a, copy_b)
    return GateOp(HGate(HKind(int(rng.integers(6)))), copy_a, copy_b)


def random_genome(config: CircuitConfig, rng: np.random.Generator,
                  max_len: int = 30, include_paulis: bool = False) -> Genome:
    """Validity-respecting random element sequence.

    Walks a symbolic register, only ever emitting feasible elements, and
    switches to forced closing moves (the outstanding refills and
    measurements) once the length budget requires it, so the result
    always decodes to a circuit that passes validate.
    """
    live = set(range(config.initial_fill))
    consumed = config.initial_fill
    refills, measures = _closure_counts(live, consumed, config)
    min_len = refills + measures
    if min_len > max_len:
        raise ValueError(f"max_len={max_len} cannot close an N={config.N}, K={config.K} run")
    desired = int(rng.integers(min_len, max_len + 1))
    elements: list[Element] = []
    while True:
        refills, measures = _closure_counts(live, consumed, config)
        required = refills + measures
        if required == 0 and len(elements) >= desired:
            break
        slack = desired - len(elements) - required
        kinds = []
        if measures > 0 and live:
            kinds.append("measure")
        if refills > 0 and len(live) < config.R:
            kinds.append("refill")
        if slack > 0:
            if len(live) >= 2:
                kinds.extend(["gate", "gate"])
            if include_paulis and live:
                kinds.append("pauli")
        if not kinds:  # closed early, e.g. K=1 leaves nothing to extend
            break
        kind = kinds[int(rng.integers(len(kinds)))]
        live_list = sorted(live)
        if kind == "gate":
            elements.append(_random_gate(config, live_list, rng))
        elif kind == "pauli":
            copy = live_list[int(rng.integers(len(live_list)))]
            elements.append(PauliOp(copy, int(rng.integers(1, config.n + 1)),
                                    PAULIS[1 + int(rng.integers(3))]))
        elif kind == "measure":
            copy = live_list[int(rng.integers(len(live_list)))]
            elements.append(MeasureOp(copy, BASES[int(rng.integers(2))]))
            live.discard(copy)
        else:
            free = sorted(set(range(config.R)) - live)
            slot = free[int(rng.integers(len(free)))]
            elements.append(RefillOp(slot))
            live.add(slot)
            consumed += 1
    return Genome(tuple(elements))


def repair(elements, config: CircuitConfig, rng: np.random.Generator,
           max_len: int = 30) -> Genome:
    """Make an arbitrary element sequence valid: drop infeasible elements,
    trim optional ones that overflow the length budget, then append the
    forced closing moves.  Only alphabet elements are ever introduced."""
    live = set(range(config.initial_fill))
    consumed = config.initial_fill
    kept: list[Element] = []
    for el in elements:
        if isinstance(el, GateOp):
            if (el.copy_a != el.copy_b and el.copy_a in live and el.copy_b in live
                    and (not isinstance(el.gate, BGate) or el.gate.nodes[1] <= config.n)):
                kept.append(el)
        elif isinstance(el, PauliOp):
            if el.copy in live and 1 <= el.qubit <= config.n:
                kept.append(el)
        elif isinstance(el, MeasureOp):
            _, measures = _closure_counts(live, consumed, config)
            if el.copy in live and measures > 0:
                kept.append(el)
                live.discard(el.copy)
        elif isinstance(el, RefillOp):
            if el.slot < config.R and el.slot not in live and consumed < config.N:
                kept.append(el)
                live.add(el.slot)
                consumed += 1
    refills, measures = _closure_counts(live, consumed, config)
    while len(kept) + refills + measures > max_len:
        for idx in range(len(kept) - 1, -1, -1):
            if isinstance(kept[idx], (GateOp, PauliOp)):
                del kept[idx]
                break
        else:
            raise ValueError("cannot trim sequence into the length budget")
    while refills + measures > 0:
        live_list = sorted(live)
        if refills > 0 and len(live) < config.R:
            free = sorted(set(range(config.R)) - live)
            slot = free[int(rng.integers(len(free)))]
            kept.append(RefillOp(slot))
            live.add(slot)
            consumed += 1
        else:
            copy = live_list[int(rng.integers(len(live_list)))]
            kept.append(MeasureOp(copy, BASES[int(rng.integers(2))]))
            live.discard(copy)
        refills, measures = _closure_counts(live, consumed, config)
    return Genome(tuple(kept))


def crossover(a: Genome, b: Genome, config: CircuitConfig, rng: np.random.Generator,
              max_len: int = 30) -> Genome:
    """Single-point crossover over element sequences, repaired to validity."""
    cut_a = int(rng.integers(len(a) + 1))
    cut_b = int(rng.integers(len(b) + 1))
    return repair(a.elements[:cut_a] + b.elements[cut_b:], config, rng, max_len)


def mutate(genome: Genome, config: CircuitConfig, ga: GAConfig,
           rng: np.random.Generator) -> Genome:
    """Per-element replace/insert/delete, followed by repair."""
    out: list[Element] = []
    live_hint = list(range(config.R))
    for el in genome.elements:
        r = rng.random()
        if r < ga.delete_prob:
            continue
        if r < ga.delete_prob + ga.replace_prob:
            out.append(_unconstrained_element(config, ga, live_hint, rng))
            continue
        out.append(el)
        if rng.random() < ga.insert_prob:
            out.append(_unconstrained_element(config, ga, live_hint, rng))
    if not out:
        out.append(_unconstrained_element(config, ga, live_hint, rng))
    return repair(out, config, rng, ga.max_len)


def _unconstrained_element(config: CircuitConfig, ga: GAConfig, slots, rng) -> Element:
    """Random alphabet element ignoring liveness; repair filters or keeps it."""
    kinds = ["gate", "gate", "measure", "refill"]
    if ga.include_paulis:
        kinds.append("pauli")
    kind = kinds[int(rng.integers(len(kinds)))]
    if kind == "gate":
        return _random_gate(config, slots, rng)
    if kind == "measure":
        return MeasureOp(int(rng.integers(config.R)), BASES[int(rng.integers(2))])
    if kind == "refill":
        return RefillOp(int(rng.integers(config.R)))
    return PauliOp(int(rng.integers(config.R)), int(rng.integers(1, config.n + 1)),
                   PAULIS[1 + int(rng.integers(3))])


# -- fitness and annealing ---------------------------------------------------------

def fitness(genome: Genome, cost: CostFunction, config: CircuitConfig,
            budget: int, seed: int, backend: str = "mc") -> float:
    """Scalar score of one genome; zero accepted trajectories score 0."""
    circuit = genome.decode()
    if backend == "exact":
        est = exact_diagonal_oracle(circuit, config)
    else:
        est = estimate(circuit, config, budget, seed)
    return cost.score(est)


def anneal_accept(current_fitness: float, candidate_fitness: float, temperature: float,
                  rng: np.random.Generator) -> bool:
    """Metropolis rule: always accept improvements or ties, accept a deficit
    d with probability exp(-d / T)."""
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    if candidate_fitness >= current_fitness:
        return True
    return rng.random() < math.exp((candidate_fitness - current_fitness) / temperature)


@dataclass
class EvolveResult:
    best_genome: Genome
    best_circuit: Circuit
    best_fitness: float
    history: list = field(default_factory=list)  # (generation, best, mean, temperature)


def _eval_seed(master: int, generation: int, slot: int) -> int:
    ss = np.random.SeedSequence((master, generation, slot))
    return int(ss.generate_state(1, np.uint64)[0])


def evolve(ga: GAConfig, cost: CostFunction, config: CircuitConfig, seed: int,
           threads: int = 1) -> EvolveResult:
    """Run the search: elitism plus annealed slot replacement.

    Deterministic for fixed (ga, cost, config, seed): all variation flows
    through one seeded generator and every fitness evaluation uses a seed
    derived from (seed, generation, slot).  The returned best genome is
    re-scored at 10x budget with a fresh stream to de-bias the selection
    noise of the winning evaluation.
    """
    rng = np.random.default_rng(np.random.SeedSequence((seed, 0x6A)))
    pop = [random_genome(config, rng, ga.max_len, ga.include_paulis)
           for _ in range(ga.population)]

    def eval_many(genomes, generation, slots):
        def one(args):
            g, slot = args
            return fitness(g, cost, config, ga.fitness_samples,
                           _eval_seed(seed, generation, slot), ga.fitness_backend)
        jobs = list(zip(genomes, slots))
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                return list(pool.map(one, jobs))
        return [one(j) for j in jobs]

    fits = eval_many(pop, 0, range(ga.population))
    history = [(0, max(fits), sum(fits) / len(fits), ga.temperature(0))]

    for gen in range(1, ga.generations + 1):
        t = ga.temperature(gen)
        order = sorted(range(ga.population), key=lambda i: (-fits[i], i))
        elite_idx = order[: ga.elite]
        new_pop = list(pop)
        new_fits = list(fits)
        for rank, src in enumerate(elite_idx):
            new_pop[rank] = pop[src]
            new_fits[rank] = fits[src]
        children = []
        child_slots = []
        for slot in range(ga.elite, ga.population):
            pa = pop[int(rng.integers(ga.population))]
            pb = pop[int(rng.integers(ga.population))]
            if rng.random() < ga.crossover_prob:
                child = crossover(pa, pb, config, rng, ga.max_len)
            else:
                child = Genome(pa.elements)
            child = mutate(child, config, ga, rng)
            children.append(child)
            child_slots.append(slot)
        child_fits = eval_many(children, gen, child_slots)
        for child, slot, cf in zip(children, child_slots, child_fits):
            if anneal_accept(fits[slot], cf, t, rng):
                new_pop[slot] = child
                new_fits[slot] = cf
        pop, fits = new_pop, new_fits
        history.append((gen, max(fits), sum(fits) / len(fits), t))

    best_slot = max(range(ga.population), key=lambda i: (fits[i], -i))
    best = pop[best_slot]
    final_fitness = fitness(best, cost, config, 10 * ga.fitness_samples,
                            _eval_seed(seed, ga.generations + 1, best_slot),
                            ga.fitness_backend)
    return EvolveResult(best, best.decode(), final_fitness, history)
