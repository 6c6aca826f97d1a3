import numpy as np
import pytest

from storalloc import (
    Allocation,
    exact_failure_prob,
    make_profile,
    monte_carlo_failure_prob,
    spread_allocation,
)
from storalloc.evaluate import (
    _enum_failure_prob,
    _subset_table,
    _uniform_failure_prob,
)

from oracles import brute_failure_prob, random_box_instance


def alloc(*xs):
    return Allocation(amounts=np.array(xs, dtype=float))


class TestExactFailureProb:
    def test_single_node(self):
        est = exact_failure_prob(make_profile([0.9], 1.0), alloc(1.0))
        assert est.value == pytest.approx(0.1, abs=1e-15)
        assert est.half_width == 0.0

    def test_two_nodes_both_needed(self):
        est = exact_failure_prob(make_profile([0.5, 0.5], 2.0), alloc(1.0, 1.0))
        assert est.value == pytest.approx(0.25, abs=1e-15)

    def test_three_node_enumeration(self):
        # at most one survivor fails: 0.1*0.4*0.3 + 0.9*0.4*0.3 + 0.1*0.6*0.3
        # + 0.1*0.4*0.7 = 0.166, frozen from the subset oracle
        prof = make_profile([0.9, 0.6, 0.7], 1.5)
        est = exact_failure_prob(prof, alloc(0.5, 0.5, 0.5))
        assert est.value == pytest.approx(0.166, abs=1e-12)
        assert est.value == pytest.approx(
            brute_failure_prob(prof.probs, [0.5, 0.5, 0.5]), abs=1e-14
        )

    def test_exact_threshold_counts_as_success(self):
        # survivors holding exactly one unit succeed
        est = exact_failure_prob(make_profile([0.5, 0.5], 1.0), alloc(0.5, 0.5))
        assert est.value == pytest.approx(0.75, abs=1e-15)

    def test_uniform_dispatches_to_dp(self):
        prof = make_profile([0.75] * 100, 2.0)
        est = exact_failure_prob(prof, spread_allocation(prof))
        assert est.method == "exact-dp"
        assert 0.0 < est.value < 1.0

    def test_all_zero_allocation_always_fails(self):
        est = exact_failure_prob(make_profile([0.9, 0.9], 1.0), alloc(0.0, 0.0))
        assert est.value == 1.0

    def test_dp_matches_enumeration_up_to_n20(self):
        rng = np.random.default_rng(11)
        for n in range(1, 21):
            probs = rng.uniform(0.05, 0.95, n)
            per_node = float(rng.uniform(0.05, 1.0))
            dp = _uniform_failure_prob(probs, per_node)
            en = _enum_failure_prob(probs, np.full(n, per_node))
            assert dp == pytest.approx(en, abs=1e-12)

    def test_enumeration_matches_subset_oracle(self):
        rng = np.random.default_rng(5)
        for _ in range(40):
            probs, amounts = random_box_instance(rng, n_max=10)
            got = _enum_failure_prob(probs, amounts)
            want = brute_failure_prob(probs, amounts)
            assert got == pytest.approx(want, abs=1e-12)

    def test_subset_weights_sum_to_one(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            probs = rng.uniform(0.02, 0.98, int(rng.integers(1, 13)))
            _, mass = _subset_table(probs, np.zeros(probs.size))
            assert mass.sum() == pytest.approx(1.0, abs=1e-12)

    def test_large_nonuniform_rejected(self):
        prof = make_profile([0.6] * 30, 3.0)
        amounts = np.full(30, 0.1)
        amounts[0] = 0.2
        with pytest.raises(ValueError, match="n <= 25"):
            exact_failure_prob(prof, Allocation(amounts=amounts))

    def test_enum_limit_override(self):
        prof = make_profile([0.6] * 8, 2.0)
        amounts = np.linspace(0.1, 0.3, 8)
        with pytest.raises(ValueError):
            exact_failure_prob(prof, Allocation(amounts=amounts), enum_limit=6)

    def test_monotone_under_pointwise_increase(self):
        rng = np.random.default_rng(23)
        for _ in range(30):
            probs, amounts = random_box_instance(rng, n_max=10)
            prof = make_profile(probs, float(amounts.sum()) + 1.0)
            base = exact_failure_prob(prof, Allocation(amounts=amounts)).value
            bumped = amounts.copy()
            bumped[rng.integers(len(amounts))] += float(rng.uniform(0.0, 1.0))
            more = exact_failure_prob(prof, Allocation(amounts=bumped)).value
            assert more <= base + 1e-12

    def test_spread_failure_monotone_in_budget(self):
        probs = np.random.default_rng(2).uniform(0.4, 0.9, 12)
        values = []
        for T in np.linspace(1.2, 6.0, 9):
            prof = make_profile(probs, float(T))
            values.append(exact_failure_prob(prof, spread_allocation(prof)).value)
        assert all(b <= a + 1e-12 for a, b in zip(values, values[1:]))


class TestMonteCarlo:
    def test_single_node_bernoulli_mean(self):
        est = monte_carlo_failure_prob(
            make_profile([0.9], 1.0), alloc(1.0), trials=10**6, seed=17
        )
        assert abs(est.value - 0.1) <= 3.0 * np.sqrt(0.09 / 10**6)
        assert est.method == "monte-carlo"
        assert est.trials == 10**6
        assert est.generator == "philox4x64"

    def test_two_node_joint_failure(self):
        est = monte_carlo_failure_prob(
            make_profile([0.5, 0.5], 2.0), alloc(1.0, 1.0), trials=10**6, seed=4
        )
        assert abs(est.value - 0.25) <= 3.0 * np.sqrt(0.1875 / 10**6)

    def test_agrees_with_enumeration(self):
        rng = np.random.default_rng(31)
        for seed in range(5):
            probs, amounts = random_box_instance(rng, n_max=12)
            prof = make_profile(probs, float(amounts.sum()) + 0.5)
            exact = exact_failure_prob(prof, Allocation(amounts=amounts)).value
            mc = monte_carlo_failure_prob(
                prof, Allocation(amounts=amounts), trials=200_000, seed=seed
            )
            slack = max(3.5 * mc.half_width, 1e-3)
            assert abs(mc.value - exact) <= slack

    def test_seed_determinism(self):
        prof = make_profile([0.7, 0.8, 0.6], 1.5)
        a = alloc(0.5, 0.6, 0.4)
        one = monte_carlo_failure_prob(prof, a, trials=70_001, seed=99)
        two = monte_carlo_failure_prob(prof, a, trials=70_001, seed=99)
        assert one == two
        other = monte_carlo_failure_prob(prof, a, trials=70_001, seed=100)
        assert other.value != one.value

    def test_zero_trials_rejected(self):
        with pytest.raises(ValueError, match="trials"):
            monte_carlo_failure_prob(make_profile([0.5], 1.0), alloc(1.0), trials=0, seed=1)

    def test_half_width_formula(self):
        est = monte_carlo_failure_prob(
            make_profile([0.5], 1.0), alloc(1.0), trials=1000, seed=0
        )
        want = 1.96 * np.sqrt(est.value * (1.0 - est.value) / 1000)
        assert est.half_width == pytest.approx(want, rel=1e-12)
