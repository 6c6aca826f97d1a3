import math

import numpy as np
import pytest

from storalloc import (
    feasibility_margin,
    hoeffding_bound,
    make_profile,
    solve_h1,
)
from storalloc.hoeffding import _margin_value, _maximize_margin, project_onto_simplex


class TestSimplexProjection:
    def test_projection_properties(self):
        rng = np.random.default_rng(2)
        for _ in range(200):
            n = int(rng.integers(1, 20))
            v = rng.normal(0.0, 2.0, n)
            total = float(rng.uniform(0.1, 5.0))
            x = project_onto_simplex(v, total)
            assert np.all(x >= 0.0)
            assert x.sum() == pytest.approx(total, rel=1e-9)

    def test_interior_point_is_fixed(self):
        x = np.array([0.2, 0.3, 0.5])
        np.testing.assert_allclose(project_onto_simplex(x, 1.0), x, atol=1e-12)


class TestFeasibilityMargin:
    def test_zero_coefficient_concentrates_on_best_node(self):
        prof = make_profile([0.8, 0.4], 1.25)
        margin, x = feasibility_margin(prof, 0.0)
        assert margin == pytest.approx(1.25 * 0.8 - 1.0, abs=1e-9)
        np.testing.assert_allclose(x.amounts, [1.25, 0.0], atol=1e-9)

    def test_homogeneous_margin_formula(self):
        rng = np.random.default_rng(4)
        for _ in range(15):
            n = int(rng.integers(2, 40))
            p = float(rng.uniform(0.4, 0.9))
            T = float(rng.uniform(0.5, n / 2))
            c = float(rng.uniform(0.0, 2.0))
            prof = make_profile([p] * n, T)
            margin, x = feasibility_margin(prof, c)
            want = p * T - 1.0 - c * T / math.sqrt(n)
            assert margin == pytest.approx(want, abs=1e-6)

    def test_three_node_grid_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(10):
            prof = make_profile(rng.uniform(0.3, 0.95, 3), float(rng.uniform(0.8, 2.5)))
            margin, _ = feasibility_margin(prof, 0.5)
            T = prof.budget
            grid = np.linspace(0.0, T, 51)
            a, b = np.meshgrid(grid, grid, indexing="ij")
            cc = T - a - b
            ok = cc >= 0.0
            pts = np.stack([a[ok], b[ok], cc[ok]], axis=1)
            vals = pts @ prof.probs - 1.0 - 0.5 * np.linalg.norm(pts, axis=1)
            assert margin >= float(vals.max()) - 1e-3

    def test_negative_coefficient_rejected(self):
        with pytest.raises(ValueError, match="c must be"):
            feasibility_margin(make_profile([0.5], 1.0), -0.1)

    def test_margin_concave_along_segments(self):
        rng = np.random.default_rng(30)
        prof = make_profile(rng.uniform(0.3, 0.9, 6), 2.0)
        c = 0.7
        for _ in range(100):
            a = rng.uniform(0.0, 1.0, 6)
            b = rng.uniform(0.0, 1.0, 6)
            a *= prof.budget / a.sum()
            b *= prof.budget / b.sum()
            mid = 0.5 * (a + b)
            f_mid = _margin_value(prof.probs, c, mid)
            f_avg = 0.5 * (
                _margin_value(prof.probs, c, a) + _margin_value(prof.probs, c, b)
            )
            assert f_mid >= f_avg - 1e-9


class TestSolveH1:
    def test_uniform_feasible_caps_epsilon(self):
        rng = np.random.default_rng(18)
        for _ in range(5):
            n = 40
            probs = rng.uniform(0.5, 1.0 - 1e-12, n)
            T = 2.0
            prof = make_profile(probs, T)
            assert T > 1.0 / prof.p_bar
            sol = solve_h1(prof)
            eps_spread = math.exp(-2.0 * n * (prof.p_bar - 1.0 / T) ** 2)
            assert sol.certified
            assert sol.epsilon_star <= eps_spread
            assert sol.oracle_calls <= 1024

    def test_markov_violated_means_no_certificate(self):
        prof = make_profile([0.6, 0.5], 1.5)  # T * p_max = 0.9 < 1
        sol = solve_h1(prof)
        assert not sol.certified
        assert sol.epsilon_star == 1.0
        assert sol.margin <= 0.0

    def test_epsilon_monotone_in_budget(self):
        rng = np.random.default_rng(55)
        probs = rng.uniform(0.5, 1.0 - 1e-12, 100)
        values = []
        for T in (1.6, 1.8, 2.0, 2.2):
            values.append(solve_h1(make_profile(probs, T)).epsilon_star)
        assert all(b <= a for a, b in zip(values, values[1:]))

    def test_returned_allocation_satisfies_cone_inequality(self):
        rng = np.random.default_rng(61)
        for _ in range(8):
            n = int(rng.integers(3, 60))
            probs = rng.uniform(0.4, 0.98, n)
            T = float(rng.uniform(1.1 / probs.max(), n / 2.0))
            prof = make_profile(probs, T)
            sol = solve_h1(prof)
            if not sol.certified:
                continue
            x = sol.allocation.amounts
            c = math.sqrt(math.log(1.0 / sol.epsilon_star) / 2.0)
            assert c * np.linalg.norm(x) <= float(prof.probs @ x) - 1.0 + 1e-8
            # the declared level is never better than the bound it certifies
            hb = hoeffding_bound(prof, sol.allocation)
            assert math.log(hb) <= math.log(sol.epsilon_star) + 1e-10

    def test_uniform_membership_at_lemma_threshold(self):
        # once n clears ln(1/eps) / (2 (p_bar - 1/T)^2), the uniform
        # allocation itself satisfies the cone inequality at level eps
        for p, T, eps in [(0.75, 2.0, 1e-6), (0.6, 2.5, 1e-3), (0.9, 1.5, 1e-12)]:
            n_eps = math.ceil(math.log(1.0 / eps) / (2.0 * (p - 1.0 / T) ** 2))
            for n in (n_eps, n_eps + 7):
                x = np.full(n, T / n)
                lhs = np.linalg.norm(x) * math.sqrt(math.log(1.0 / eps) / 2.0)
                rhs = p * n * (T / n) - 1.0
                assert lhs <= rhs + 1e-12

    def test_invalid_bracket_rejected(self):
        prof = make_profile([0.9], 2.0)
        with pytest.raises(ValueError, match="eps_lo"):
            solve_h1(prof, eps_lo=0.5, eps_hi=0.1)

    def test_bisection_iterates_are_monotone(self):
        # margins grow as the certified level is relaxed
        prof = make_profile([0.9, 0.7, 0.65], 1.8)
        margins = []
        for eps in (1e-12, 1e-8, 1e-4, 1e-2):
            c = math.sqrt(math.log(1.0 / eps) / 2.0)
            m, _, _, _ = _maximize_margin(prof, c)
            margins.append(m)
        assert all(a <= b + 1e-12 for a, b in zip(margins, margins[1:]))
