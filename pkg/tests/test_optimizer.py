import math

import numpy as np
import pytest

from ghzdist.circuits import Circuit, CircuitConfig, validate
from ghzdist.exact import exact_diagonal_oracle
from ghzdist.noise import NoiseModel
from ghzdist.optimizer import (
    CostFunction,
    GAConfig,
    Genome,
    anneal_accept,
    crossover,
    evolve,
    fitness,
    mutate,
    random_genome,
    repair,
)
from ghzdist.protocols import pumping_circuit

CONFIG = CircuitConfig(n=3, N=5, K=1, R=3, noise=NoiseModel(p_gate=0.01, eta=0.01), f_in=0.9)


def test_random_genomes_always_valid():
    rng = np.random.default_rng(0)
    for _ in range(10_000):
        g = random_genome(CONFIG, rng)
        assert validate(g.decode(), CONFIG) == [], g
    # drawn elements only reference live copies by construction; validate
    # would flag any dead-copy access, so an empty violation list covers it


def test_random_genome_respects_length_budget():
    rng = np.random.default_rng(1)
    lengths = {len(random_genome(CONFIG, rng, max_len=12)) for _ in range(300)}
    assert max(lengths) <= 12
    assert min(lengths) >= 6  # 2 refills + 4 measurements are forced


def test_empty_genome_when_outputs_equal_inputs():
    config = CircuitConfig(n=3, N=2, K=2, R=2, noise=NoiseModel(), f_in=1.0)
    rng = np.random.default_rng(2)
    genomes = [random_genome(config, rng, max_len=6) for _ in range(200)]
    assert any(len(g) == 0 for g in genomes)
    for g in genomes:
        assert validate(g.decode(), config) == []


def test_repair_and_variation_closure():
    rng = np.random.default_rng(3)
    ga = GAConfig(population=4, generations=0, elite=1)
    for _ in range(400):
        a = random_genome(CONFIG, rng)
        b = random_genome(CONFIG, rng)
        child = crossover(a, b, CONFIG, rng)
        assert validate(child.decode(), CONFIG) == []
        mutant = mutate(child, CONFIG, ga, rng)
        assert validate(mutant.decode(), CONFIG) == []


def test_repair_handles_garbage():
    rng = np.random.default_rng(4)
    a = random_genome(CONFIG, rng)
    scrambled = a.elements + a.elements  # duplicates overconsume the budget
    fixed = repair(scrambled, CONFIG, rng, max_len=30)
    assert validate(fixed.decode(), CONFIG) == []


def test_fitness_of_trivial_perfect_genome():
    config = CircuitConfig(n=3, N=2, K=2, R=2, noise=NoiseModel(), f_in=1.0)
    assert fitness(Genome(()), CostFunction(), config, budget=500, seed=0) == 1.0


def test_fitness_penalty_ordering():
    cost = CostFunction("fidelity_under_success_floor", p_min=0.99, penalty=10.0)
    circuit, dims = pumping_circuit(1, 3)
    config = CircuitConfig(noise=NoiseModel(), f_in=0.9, **dims)
    genome = Genome(circuit.elements)
    est = exact_diagonal_oracle(circuit, config)
    constrained = fitness(genome, cost, config, budget=4000, seed=1)
    unconstrained = fitness(genome, CostFunction(), config, budget=4000, seed=1)
    assert est.p_succ < 0.99
    assert constrained < unconstrained  # penalty kicked in


def test_fitness_zero_when_nothing_accepted():
    from ghzdist.circuits import GateOp, MeasureOp, PauliOp
    from ghzdist.gates import HGate, HKind

    circuit = Circuit((PauliOp(1, 1, "X"), GateOp(HGate(HKind.IDENTITY), 0, 1),
                       MeasureOp(1, "Z")))
    config = CircuitConfig(n=3, N=2, K=1, R=2, noise=NoiseModel(), f_in=1.0)
    assert fitness(Genome(circuit.elements), CostFunction(), config, 300, seed=0) == 0.0


def test_fitness_tracks_exact_oracle():
    circuit, dims = pumping_circuit(1, 3)
    config = CircuitConfig(noise=NoiseModel(p_gate=0.01, eta=0.01), f_in=0.9, **dims)
    genome = Genome(circuit.elements)
    est = exact_diagonal_oracle(circuit, config)
    score = fitness(genome, CostFunction(), config, budget=60_000, seed=5)
    se = math.sqrt(est.f_out * (1 - est.f_out) / (est.p_succ * 60_000))
    assert abs(score - est.f_out) < 4 * se


def test_anneal_accept_rules():
    rng = np.random.default_rng(6)
    assert anneal_accept(0.5, 0.6, 0.01, rng)
    assert anneal_accept(0.5, 0.5, 0.01, rng)
    with pytest.raises(ValueError):
        anneal_accept(0.5, 0.4, 0.0, rng)


def test_anneal_accept_frequency():
    rng = np.random.default_rng(7)
    t, deficit, m = 0.05, 0.02, 100_000
    hits = sum(anneal_accept(0.9, 0.9 - deficit, t, rng) for _ in range(m))
    expect = math.exp(-deficit / t)
    sigma = math.sqrt(expect * (1 - expect) / m)
    assert abs(hits / m - expect) < 4 * sigma


def test_temperature_schedule():
    ga = GAConfig(population=4, generations=100, elite=1, t_initial=0.05)
    assert math.isclose(ga.temperature(0), 0.05)
    assert math.isclose(ga.temperature(100), 0.0005)
    temps = [ga.temperature(g) for g in range(0, 101, 10)]
    assert all(a >= b for a, b in zip(temps, temps[1:]))


def _tiny_ga(**kw):
    base = dict(population=16, generations=6, elite=2, fitness_samples=400)
    base.update(kw)
    return GAConfig(**base)


def test_evolve_zero_generations_returns_initial_best():
    res = evolve(_tiny_ga(generations=0), CostFunction(), CONFIG, seed=8)
    assert validate(res.best_circuit, CONFIG) == []
    assert len(res.history) == 1


def test_evolve_running_best_non_decreasing():
    res = evolve(_tiny_ga(generations=12), CostFunction(), CONFIG, seed=9)
    best = [row[1] for row in res.history]
    running = best[0]
    for b in best[1:]:
        running = max(running, b)
        assert b >= best[0] or True
    # elites carry their cached scores, so the per-generation best never drops
    assert all(b2 >= b1 for b1, b2 in zip(best, best[1:]))


def test_evolve_reproducible_and_thread_independent():
    a = evolve(_tiny_ga(), CostFunction(), CONFIG, seed=10, threads=1)
    b = evolve(_tiny_ga(), CostFunction(), CONFIG, seed=10, threads=1)
    c = evolve(_tiny_ga(), CostFunction(), CONFIG, seed=10, threads=3)
    assert a.best_genome == b.best_genome == c.best_genome
    assert a.history == b.history == c.history
    d = evolve(_tiny_ga(), CostFunction(), CONFIG, seed=11)
    assert d.history != a.history


def test_evolve_exact_backend():
    ga = _tiny_ga(fitness_backend="exact", generations=4)
    res = evolve(ga, CostFunction(), CONFIG, seed=12)
    est = exact_diagonal_oracle(res.best_circuit, CONFIG)
    assert math.isclose(res.best_fitness, est.f_out)


def test_ga_config_validation():
    with pytest.raises(ValueError):
        GAConfig(population=1)
    with pytest.raises(ValueError):
        GAConfig(elite=200, population=100)
    with pytest.raises(ValueError):
        GAConfig(t_initial=0.0)
    with pytest.raises(ValueError):
        GAConfig(fitness_backend="quantum")
    with pytest.raises(ValueError):
        CostFunction("fidelity_under_success_floor", p_min=0.0)
