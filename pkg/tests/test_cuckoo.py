import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cuckoo_array.cuckoo import (
    Bounds,
    CsaConfig,
    Nest,
    as_bounds,
    init_population,
    levy_step,
    propose_cuckoo,
    run_csa,
    step_iteration,
)
from cuckoo_array.errors import ContractViolation, ObjectiveEvaluationError

import oracles

TARGET = np.array([0.3, -1.2, 2.0, 0.7])


def rng(seed=0):
    return np.random.default_rng(seed)


class TestConfig:
    def test_defaults(self):
        c = CsaConfig()
        assert (c.population, c.pa, c.alpha, c.levy_exponent, c.max_iterations) == (25, 0.25, 0.01, 1.5, 500)

    @pytest.mark.parametrize("kwargs", [
        dict(population=1), dict(pa=-0.1), dict(pa=1.5), dict(levy_exponent=1.0),
        dict(levy_exponent=3.0), dict(max_iterations=0), dict(seed=-1), dict(seed=2**64),
        dict(alpha=-0.01),
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(ContractViolation):
            CsaConfig(**kwargs)

    @pytest.mark.parametrize("pa,pop,expected", [(0.25, 25, 7), (0.2, 25, 5), (0.0, 10, 0), (1.0, 10, 9)])
    def test_abandon_count(self, pa, pop, expected):
        assert CsaConfig(pa=pa, population=pop).n_abandoned() == expected

    def test_bounds_from_pairs(self):
        b = as_bounds([[0, 1], [-2, 3]])
        assert b.dimension == 2 and list(b.width) == [1.0, 5.0]
        with pytest.raises(ContractViolation):
            as_bounds([[1, 0]])
        with pytest.raises(ContractViolation):
            as_bounds([])


class TestInitPopulation:
    def test_two_nests_in_unit_box(self):
        nests = init_population(CsaConfig(population=2), [[0, 1]], lambda x: float(x[0]), rng())
        assert len(nests) == 2
        for n in nests:
            assert 0 <= n.position[0] <= 1
            assert n.objective_value == float(n.position[0])

    def test_same_seed_same_population(self):
        a = init_population(CsaConfig(), Bounds.box(-1, 1, 5), oracles.sphere(np.zeros(5)), rng(42))
        b = init_population(CsaConfig(), Bounds.box(-1, 1, 5), oracles.sphere(np.zeros(5)), rng(42))
        assert all(np.array_equal(x.position, y.position) for x, y in zip(a, b))

    def test_uniform_coordinate_means(self):
        nests = init_population(CsaConfig(population=25), Bounds.box(0, 1, 121), lambda x: 0.0, rng(5))
        means = np.mean([n.position for n in nests], axis=0)
        frac = np.mean((means >= 0.35) & (means <= 0.65))
        # same statistic for an unrelated sampler
        r = random.Random(5)
        ref = np.mean([[r.random() for _ in range(121)] for _ in range(25)], axis=0)
        ref_frac = np.mean((ref >= 0.35) & (ref <= 0.65))
        assert frac >= 0.95 and ref_frac >= 0.95

    def test_invalid_bounds(self):
        with pytest.raises(ContractViolation):
            init_population(CsaConfig(), [[1.0, 1.0]], lambda x: 0.0, rng())


class TestLevyStep:
    def test_shape(self):
        assert levy_step(rng(), 1.5, 3).shape == (3,)

    @pytest.mark.parametrize("exponent", [1.5, 2.5])
    def test_tail_slope(self, exponent):
        s = levy_step(rng(1), exponent, 100_000)
        assert abs(oracles.density_tail_slope(s) + exponent) <= 0.4

    @pytest.mark.parametrize("exponent", [1.5, 2.0, 2.5])
    def test_heavier_than_gaussian(self, exponent):
        s = np.abs(levy_step(rng(2), exponent, 100_000))
        g = np.abs(rng(3).normal(size=100_000))
        assert np.mean(s > 10 * np.median(s)) > np.mean(g > 10 * np.median(g))

    @pytest.mark.parametrize("exponent", [1.0, 3.0, 0.5, 4.0])
    def test_exponent_range(self, exponent):
        with pytest.raises(ContractViolation):
            levy_step(rng(), exponent, 2)

    def test_always_finite(self):
        assert np.all(np.isfinite(levy_step(rng(9), 1.1, 200_000)))


class TestProposeCuckoo:
    def nests(self):
        return Nest([0.2, 0.8], 1.0), Nest([0.5, 0.5], 0.0)

    def test_zero_alpha_is_identity(self):
        nest, best = self.nests()
        x = propose_cuckoo(nest, best, CsaConfig(alpha=0.0), [[0, 1], [0, 1]], rng())
        assert np.array_equal(x, nest.position)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32), st.floats(0, 10), st.booleans())
    def test_stays_in_bounds(self, seed, alpha, raw):
        nest, best = self.nests()
        x = propose_cuckoo(nest, best, CsaConfig(alpha=alpha, raw_levy=raw), [[0, 1], [0, 1]], rng(seed))
        assert np.all((x >= 0) & (x <= 1))

    def test_replaying_rng_state_replays_candidate(self):
        nest, best = self.nests()
        g = rng(17)
        state = g.bit_generator.state
        first = propose_cuckoo(nest, best, CsaConfig(alpha=0.01), [[0, 1], [0, 1]], g)
        g.bit_generator.state = state
        second = propose_cuckoo(nest, best, CsaConfig(alpha=0.01), [[0, 1], [0, 1]], g)
        assert np.array_equal(first, second)

    def test_best_nest_still_moves(self):
        _, best = self.nests()
        x = propose_cuckoo(best, best, CsaConfig(alpha=0.01), [[0, 1], [0, 1]], rng(1))
        assert not np.array_equal(x, best.position)

    def test_step_scales_with_distance_to_best(self):
        best = Nest([0.5, 0.5], 0.0)
        near = Nest([0.5001, 0.5], 1.0)
        x = propose_cuckoo(near, best, CsaConfig(alpha=0.01), [[0, 1], [0, 1]], rng(4))
        # second coordinate equals best, so it cannot move
        assert x[1] == 0.5

    def test_dimension_mismatch(self):
        with pytest.raises(ContractViolation):
            propose_cuckoo(Nest([0.1], 1), Nest([0.1, 0.2], 0), CsaConfig(), [[0, 1]], rng())


def _population(seed, config, bounds, objective):
    nests = init_population(config, bounds, objective, rng(seed))
    return nests, min(nests, key=lambda n: n.objective_value)


class TestStepIteration:
    bounds = Bounds.box(-5, 5, 4)
    objective = staticmethod(oracles.sphere(TARGET))

    def test_pa_zero_moves_only_by_cuckoos(self):
        config = CsaConfig(population=8, pa=0.0)
        nests, best = _population(0, config, self.bounds, self.objective)
        g = rng(1)
        replay = np.random.default_rng()
        replay.bit_generator.state = g.bit_generator.state
        new, _ = step_iteration(nests, best, config, self.bounds, self.objective, g)
        candidates = []
        for nest in nests:
            candidates.append(propose_cuckoo(nest, best, config, self.bounds, replay))
            replay.integers(len(nests))
        allowed = [n.position for n in nests] + candidates
        for n in new:
            assert any(np.array_equal(n.position, a) for a in allowed)

    def test_replacement_never_worsens_a_slot(self):
        config = CsaConfig(population=10, pa=0.0)
        nests, best = _population(2, config, self.bounds, self.objective)
        g = rng(3)
        for _ in range(30):
            new, best = step_iteration(nests, best, config, self.bounds, self.objective, g)
            assert all(b.objective_value <= a.objective_value for a, b in zip(nests, new))
            nests = new

    def test_pa_one_rebuilds_all_but_elite(self):
        calls = []

        def counted(x):
            calls.append(1)
            return self.objective(x)

        config = CsaConfig(population=6, pa=1.0)
        nests, best = _population(4, config, self.bounds, self.objective)
        new, new_best = step_iteration(nests, best, config, self.bounds, counted, rng(5))
        assert len(calls) == 6 + 5
        assert new_best.objective_value <= best.objective_value

    def test_all_positions_in_bounds_every_iteration(self):
        config = CsaConfig(population=12, alpha=1.0)
        nests, best = _population(6, config, self.bounds, self.objective)
        g = rng(7)
        for _ in range(50):
            nests, best = step_iteration(nests, best, config, self.bounds, self.objective, g)
            assert all(self.bounds.contains(n.position) for n in nests)
            assert all(n.objective_value == self.objective(n.position) for n in nests)

    def test_objective_error_carries_context(self):
        config = CsaConfig(population=4)
        nests, best = _population(0, config, self.bounds, self.objective)

        def boom(x):
            raise RuntimeError("bad")

        with pytest.raises(ObjectiveEvaluationError) as info:
            step_iteration(nests, best, config, self.bounds, boom, rng(), iteration=12)
        assert info.value.iteration == 12 and info.value.nest_index == 0
        assert "iteration 12" in str(info.value)

    @pytest.mark.parametrize("seed", range(5))
    def test_sphere_converges(self, seed):
        config = CsaConfig(population=15, max_iterations=200, seed=seed)
        result = run_csa(config, self.bounds, self.objective)
        assert result.best_objective < 1e-3


class TestRunCsa:
    def test_single_iteration_budget(self):
        r = run_csa(CsaConfig(population=2, max_iterations=1), [[0, 1]], lambda x: float(x[0]))
        assert len(r.best_history) == 1 and r.iterations_executed == 1

    def test_bit_identical_reruns_and_parallel(self):
        bounds = Bounds.box(-5, 5, 6)
        f = oracles.sphere(np.linspace(-1, 1, 6))
        config = CsaConfig(max_iterations=60, seed=123)
        a = run_csa(config, bounds, f)
        b = run_csa(config, bounds, f)
        c = run_csa(config, bounds, f, workers=4)
        assert a.to_dict() == b.to_dict() == c.to_dict()
        assert run_csa(CsaConfig(max_iterations=60, seed=124), bounds, f).to_dict() != a.to_dict()

    def test_sphere_ten_dims_defaults(self):
        f = oracles.sphere(np.full(10, 0.5))
        r = run_csa(CsaConfig(seed=0), Bounds.box(-5, 5, 10), f)
        h = np.array(r.best_history)
        assert np.all(np.diff(h) <= 0)
        assert h[-1] < r.initial_best_objective
        assert r.best_objective == h[-1]

    def test_objective_failure_during_init(self):
        with pytest.raises(ObjectiveEvaluationError, match="nest 0"):
            run_csa(CsaConfig(max_iterations=2), [[0, 1]], lambda x: float("nan"))

    def test_callback_sees_every_iteration(self):
        seen = []
        run_csa(CsaConfig(max_iterations=7), [[0, 1]], lambda x: float(x[0]),
                callback=lambda t, best: seen.append(t))
        assert seen == list(range(7))


@settings(max_examples=25, deadline=None)
@given(
    seed=st.integers(0, 2**64 - 1),
    population=st.integers(2, 12),
    pa=st.floats(0, 1),
    exponent=st.floats(1.05, 2.95),
    raw=st.booleans(),
)
def test_elitism_and_delta_consistency(seed, population, pa, exponent, raw):
    config = CsaConfig(population=population, pa=pa, levy_exponent=exponent,
                       max_iterations=40, seed=seed, raw_levy=raw)
    r = run_csa(config, Bounds.box(-3, 3, 3), oracles.sphere([1.0, -0.5, 0.2]))
    h = r.best_history
    assert all(b <= a for a, b in zip(h, h[1:]))
    assert r.fitness_deltas[0] == h[0] - r.initial_best_objective
    assert all(r.fitness_deltas[t] == h[t] - h[t - 1] for t in range(1, len(h)))
    assert all(d <= 0 for d in r.fitness_deltas)
