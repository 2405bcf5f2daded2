import itertools
import json
import random

import pytest

from construct import mexpr
from construct.check import infer_symbol_types
from construct.container import Trace, VariableDescriptor, VariableTable
from construct.ga import (
    Chromosome, ConstraintsUnsatisfiable, GaConfig, GaProblem, LengthMismatch,
    NoReferenceTrace, SlotsExceedVariables, crossover, generate_individual,
    mutate, report_dict, run_ga, search_space_size,
)
from construct.sim import INVALID
from construct.translate import EquationModel, SymbolSlot


class FixedRng:
    """Plays back queued answers for sample/randrange; everything else
    delegates to a seeded Random."""

    def __init__(self, samples=(), randranges=()):
        self.samples = list(samples)
        self.randranges = list(randranges)
        self._rng = random.Random(0)

    def sample(self, population, k):
        if self.samples:
            return list(self.samples.pop(0))
        return self._rng.sample(population, k)

    def randrange(self, *args):
        if self.randranges:
            return self.randranges.pop(0)
        return self._rng.randrange(*args)

    def random(self):
        return self._rng.random()

    def shuffle(self, xs):
        self._rng.shuffle(xs)

    def choice(self, xs):
        return self._rng.choice(xs)


# ---------------------------------------------------------------------------
# search_space_size
# ---------------------------------------------------------------------------

def test_search_space_full_permutation():
    assert search_space_size(12, 12) == 479001600


def test_search_space_single_slot():
    assert search_space_size(1, 5) == 5


def test_search_space_injective_count():
    assert search_space_size(12, 13) == 6227020800


def test_search_space_slots_exceed_variables():
    with pytest.raises(SlotsExceedVariables):
        search_space_size(5, 4)


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def test_cbt_generation_uniform_chi_square(tiny_case):
    problem = tiny_case["problem"]
    rng = random.Random(1234)
    counts = {}
    draws = 10_000
    for _ in range(draws):
        c = generate_individual("cbt", problem, rng)
        counts[c.genes] = counts.get(c.genes, 0) + 1
    assert set(counts) == set(itertools.permutations(range(3)))
    expected = draws / 6
    chi2 = sum((n - expected) ** 2 / expected for n in counts.values())
    assert chi2 < 15.086  # df=5 critical value at p=0.01


def test_cbc_generation_tiny_instance_is_valid(tiny_case):
    problem = tiny_case["problem"]
    valid = {genes for genes in itertools.permutations(range(3))
             if problem.validate(genes).valid}
    assert len(valid) == 2
    rng = random.Random(9)
    for _ in range(25):
        c = generate_individual("cbc", problem, rng)
        assert c.genes in valid


def test_cbc_generation_on_fixtures(all_cases):
    for name, case in all_cases.items():
        problem = case["problem"]
        rng = random.Random(17)
        for _ in range(8):
            c = generate_individual("cbc", problem, rng)
            assert problem.validate(c.genes).valid, name
            assert problem.fitness_of(c.genes).is_finite, name


def test_cbc_unsatisfiable_when_no_boolean_variable():
    model = infer_symbol_types(EquationModel(
        ((mexpr.Sym(0), mexpr.If(mexpr.Sym(1), mexpr.Const(1.0), mexpr.Const(0.0))),),
        (SymbolSlot(0, "s0", "Real"), SymbolSlot(1, "s1", "Boolean"))))
    vars = VariableTable((
        VariableDescriptor("y", 1, "Real", "output", None),
        VariableDescriptor("u", 2, "Real", "input", None)))
    trace = Trace((0.0, 0.1), {"u": (1.0, 1.0)})
    problem = GaProblem(model, vars, trace, trace)
    with pytest.raises(ConstraintsUnsatisfiable):
        generate_individual("cbc", problem, random.Random(1),
                            GaConfig(population_size=4, elitism=1, retry_budget=5))


# ---------------------------------------------------------------------------
# mutation
# ---------------------------------------------------------------------------

def test_cbt_mutate_swaps_selected_positions(tiny_case):
    rng = FixedRng(samples=[[1, 3]])
    c = Chromosome(("a", "b", "c", "d"))
    out = mutate("cbt", c, tiny_case["problem"], rng)
    assert out.genes == ("a", "d", "c", "b")


def test_mutate_is_involution_at_same_positions(tiny_case):
    rng = FixedRng(samples=[[0, 2], [0, 2]])
    c = Chromosome((5, 6, 7))
    once = mutate("cbt", c, tiny_case["problem"], rng)
    twice = mutate("cbt", once, tiny_case["problem"], rng)
    assert twice == c


def test_cbc_mutate_tiny_returns_constructible(tiny_case):
    # Of the two valid assignments only one causalizes; swapping away
    # from it is rejected, so mutation returns the chromosome unchanged.
    problem = tiny_case["problem"]
    c = Chromosome(tiny_case["ground_truth"])
    rng = random.Random(3)
    for _ in range(10):
        out = mutate("cbc", c, problem, rng)
        assert out == c


def test_cbc_mutate_on_fixture_stays_constructible(pi_case):
    problem = pi_case["problem"]
    rng = random.Random(11)
    c = Chromosome(pi_case["ground_truth"])
    for _ in range(30):
        c = mutate("cbc", c, problem, rng)
        assert problem.validate(c.genes).valid
        assert problem.fitness_of(c.genes).is_finite


# ---------------------------------------------------------------------------
# crossover
# ---------------------------------------------------------------------------

def test_cbt_crossover_may_duplicate(tiny_case):
    a = Chromosome((1, 2, 3, 4))
    b = Chromosome((3, 4, 1, 2))
    rng = FixedRng(randranges=[2])
    c1, c2 = crossover("cbt", a, b, rng)
    assert c1.genes == (1, 2, 1, 2)
    assert c2.genes == (3, 4, 3, 4)


def test_cbt_crossover_with_repair(tiny_case):
    a = Chromosome((1, 2, 3, 4))
    b = Chromosome((3, 4, 1, 2))
    rng = FixedRng(randranges=[2])
    cfg = GaConfig(population_size=4, elitism=1, cbt_repair=True)
    c1, c2 = crossover("cbt", a, b, rng, cfg)
    assert c1.genes == (3, 4, 1, 2)
    assert sorted(c2.genes) == [1, 2, 3, 4]


def test_crossover_k_zero_copies_parents(tiny_case):
    a = Chromosome((1, 2, 3))
    b = Chromosome((4, 5, 6))
    rng = FixedRng(randranges=[0])
    c1, c2 = crossover("cbt", a, b, rng)
    assert c1 == b and c2 == a


def test_crossover_length_mismatch(tiny_case):
    with pytest.raises(LengthMismatch):
        crossover("cbt", Chromosome((1, 2)), Chromosome((1, 2, 3)),
                  random.Random(0))


def test_cbc_crossover_children_constructible(pi_case):
    problem = pi_case["problem"]
    rng = random.Random(23)
    cfg = GaConfig(population_size=4, elitism=1)
    a = generate_individual("cbc", problem, rng, cfg)
    b = generate_individual("cbc", problem, rng, cfg)
    for _ in range(20):
        c1, c2 = crossover("cbc", a, b, rng, cfg, problem)
        for child in (c1, c2):
            assert problem.validate(child.genes).valid
            assert problem.fitness_of(child.genes).is_finite
        a, b = c1, c2


# ---------------------------------------------------------------------------
# run_ga
# ---------------------------------------------------------------------------

def test_run_ga_requires_reference(pi_case):
    problem = pi_case["problem"]
    stripped = GaProblem(problem.model, problem.vars, problem.input_trace, None)
    with pytest.raises(NoReferenceTrace):
        run_ga("cbc", stripped, GaConfig(population_size=4, elitism=1))


def test_run_ga_rejects_unknown_mode(pi_case):
    from construct.ga import GaError
    with pytest.raises(GaError):
        run_ga("annealing", pi_case["problem"], GaConfig(population_size=4, elitism=1))


def test_run_ga_tiny_matches_brute_force(tiny_case):
    problem = tiny_case["problem"]
    fits = [problem.fitness_of(genes)
            for genes in itertools.permutations(range(3))
            if problem.validate(genes).valid]
    brute_best = min(fits)
    for seed in (0, 1, 2):
        cfg = GaConfig(population_size=20, max_generations=5, rng_seed=seed)
        result = run_ga("cbc", problem, cfg)
        assert result.best[1] == brute_best


def test_run_ga_elitism_monotone_and_fraction_one(pi_case):
    cfg = GaConfig(population_size=30, max_generations=6, rng_seed=5)
    result = run_ga("cbc", pi_case["problem"], cfg)
    curve = [g["best_mse"] for g in result.per_generation]
    assert all(a >= b for a, b in zip(curve, curve[1:]))
    assert all(g["simulatable_fraction"] == 1.0 for g in result.per_generation)


def test_run_ga_cbt_mixed_types_collapses(pid_case):
    cfg = GaConfig(population_size=30, max_generations=5, rng_seed=0)
    result = run_ga("cbt", pid_case["problem"], cfg)
    assert all(g["simulatable_fraction"] == 0.0 for g in result.per_generation)
    assert result.best[1] == INVALID


def test_run_ga_seed_determinism(pi_case, monkeypatch):
    cfg = GaConfig(population_size=20, max_generations=4, rng_seed=12)
    blobs = []
    for threads in ("1", "4", "4"):
        monkeypatch.setenv("CONSTRUCT_THREADS", threads)
        result = run_ga("cbc", pi_case["problem"], cfg)
        blobs.append(json.dumps(report_dict(result, "cbc", cfg)))
    assert blobs[0] == blobs[1] == blobs[2]


def test_run_ga_generation_count(pi_case):
    cfg = GaConfig(population_size=10, max_generations=7, rng_seed=1,
                   early_stop=False)
    result = run_ga("cbc", pi_case["problem"], cfg)
    assert len(result.per_generation) == 7
    assert [g["gen"] for g in result.per_generation] == list(range(7))


def test_early_stop_on_exact_hit(tiny_case):
    # the tiny instance contains the exact optimum in every CbC draw pool
    cfg = GaConfig(population_size=10, max_generations=8, rng_seed=0)
    result = run_ga("cbc", tiny_case["problem"], cfg)
    assert result.best[1].mse < 1e-12
    assert len(result.per_generation) < 8
    cfg_full = GaConfig(population_size=10, max_generations=8, rng_seed=0,
                        early_stop=False)
    assert len(run_ga("cbc", tiny_case["problem"], cfg_full).per_generation) == 8


def test_ga_config_invariants():
    with pytest.raises(ValueError):
        GaConfig(population_size=4, elitism=4)
    with pytest.raises(ValueError):
        GaConfig(crossover_rate=1.5)
