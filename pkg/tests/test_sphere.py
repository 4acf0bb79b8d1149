import json
import math

import numpy as np
import pytest
from hypothesis import given
from scipy import integrate

from persphere.data import random_diagram
from persphere.diagram import make_diagram, total_persistence, w1_distance
from persphere.sphere import (evaluate_ps, field_to_csv, field_to_json, lp_distance, lp_norm,
                              make_grid, parse_grid_spec, ps_at, to_feature_vector, zero_field)
from persphere.weighting import Weighting, estimate_constants

from .strategies import diagrams

LAM = Weighting("lambda", 1.0)
ONE = make_diagram([(0, 2)])
EMPTY = make_diagram([])


@pytest.fixture(scope="module")
def fine_grid():
    return make_grid(400, 200)


@pytest.fixture(scope="module")
def small_grid():
    return make_grid(40, 20)


class TestGrid:
    def test_default_size_and_area(self):
        g = make_grid(200, 100)
        assert g.size == 20000 and g.nodes.shape == (20000, 3)
        assert 4 * math.pi * 0.99 <= g.quad_weights.sum() <= 4 * math.pi * 1.01

    def test_tiny_grid_unit_nodes(self):
        g = make_grid(2, 2)
        assert g.size == 4
        np.testing.assert_allclose(np.linalg.norm(g.nodes, axis=1), 1.0, atol=1e-12)

    def test_weights_positive(self):
        assert np.all(make_grid(7, 3).quad_weights > 0)

    def test_area_converges(self):
        errs = [abs(make_grid(n, n).quad_weights.sum() - 4 * math.pi) for n in (4, 8, 16, 32)]
        assert all(a > b for a, b in zip(errs, errs[1:]))

    @pytest.mark.parametrize("n, m", [(1, 5), (5, 1), (0, 0)])
    def test_rejects_small(self, n, m):
        with pytest.raises(ValueError):
            make_grid(n, m)

    def test_parse_grid_spec(self):
        assert parse_grid_spec("200x100") == (200, 100)
        with pytest.raises(ValueError):
            parse_grid_spec("200")


class TestPsAt:
    def test_empty(self):
        assert ps_at(EMPTY, LAM, (1, 0, 0)) == 0

    def test_single_point(self):
        assert ps_at(ONE, LAM, (1, 0, 0)) == pytest.approx(1 / math.sqrt(5), rel=1e-12)
        assert ps_at(ONE, LAM, (0, 0, -1)) == 0

    def test_rejects_non_unit(self):
        with pytest.raises(ValueError):
            ps_at(ONE, LAM, (1, 1, 0))

    def test_matches_grid_evaluation(self, small_grid, rng):
        d = random_diagram(rng, 8)
        w = Weighting("arctan", 1.0, 0.2)
        f = evaluate_ps(d, w, small_grid)
        idx = rng.choice(small_grid.size, 25, replace=False)
        direct = [ps_at(d, w, small_grid.nodes[i]) for i in idx]
        np.testing.assert_allclose(f.values[idx], direct, rtol=1e-12, atol=1e-15)


class TestEvaluate:
    def test_empty_is_zero(self, small_grid):
        assert np.all(evaluate_ps(EMPTY, LAM, small_grid).values == 0)

    def test_sup_single_point(self, fine_grid):
        # sup over the sphere of relu<v, u> is |u|, and |Gamma(0, 2)| = 1
        assert evaluate_ps(ONE, LAM, fine_grid).max() == pytest.approx(1.0, abs=2e-4)

    @given(diagrams(max_points=6, max_mult=2), diagrams(max_points=6, max_mult=2))
    def test_linearity(self, a, b):
        g = make_grid(16, 8)
        both = evaluate_ps(a + b, LAM, g).values
        parts = evaluate_ps(a, LAM, g).values + evaluate_ps(b, LAM, g).values
        np.testing.assert_allclose(both, parts, rtol=1e-12, atol=1e-12)

    @given(diagrams(max_points=8, max_mult=3))
    def test_nonnegative_and_sup_bound(self, d):
        g = make_grid(16, 8)
        f = evaluate_ps(d, LAM, g)
        assert np.all(f.values >= 0)
        assert f.max() <= total_persistence(d) * (1 + 1e-9) + 1e-12

    @pytest.mark.parametrize("workers", [2, 3, 4, 8])
    def test_bitwise_across_workers(self, workers, rng):
        d = random_diagram(rng, 300, min_points=300)
        g = make_grid(60, 30)
        ref = evaluate_ps(d, LAM, g, workers=1).values
        assert np.array_equal(evaluate_ps(d, LAM, g, workers=workers).values, ref)

    def test_env_var_default_workers(self, monkeypatch, rng):
        d = random_diagram(rng, 50, min_points=50)
        g = make_grid(20, 10)
        ref = evaluate_ps(d, LAM, g).values
        monkeypatch.setenv("PERSPHERE_WORKERS", "3")
        assert np.array_equal(evaluate_ps(d, LAM, g).values, ref)


class TestLpDistance:
    def test_closed_form_integrals_are_right(self):
        # independent check of the closed forms with u along the pole
        l1, _ = integrate.dblquad(lambda t, f: max(0.0, math.cos(t)) * math.sin(t), 0, 2 * math.pi, 0, math.pi)
        l2, _ = integrate.dblquad(lambda t, f: max(0.0, math.cos(t)) ** 2 * math.sin(t), 0, 2 * math.pi, 0, math.pi)
        assert l1 == pytest.approx(math.pi, rel=1e-8)
        assert l2 == pytest.approx(2 * math.pi / 3, rel=1e-8)

    def test_identity(self, small_grid):
        f = evaluate_ps(ONE, LAM, small_grid)
        assert lp_distance(f, f, 1) == 0 and lp_distance(f, f, math.inf) == 0

    def test_l1_l2_single_point(self, fine_grid):
        f = evaluate_ps(ONE, LAM, fine_grid)
        assert lp_norm(f, 1) == pytest.approx(math.pi, rel=5e-3)
        assert lp_norm(f, 2) == pytest.approx(math.sqrt(2 * math.pi / 3), rel=5e-3)

    def test_mismatched_grids(self):
        with pytest.raises(ValueError):
            lp_distance(zero_field(make_grid(4, 4)), zero_field(make_grid(4, 5)))

    def test_rejects_p_below_one(self, small_grid):
        with pytest.raises(ValueError):
            lp_distance(zero_field(small_grid), zero_field(small_grid), 0.5)

    def test_finite_p_bounded_by_sup(self, small_grid, rng):
        # ||.||_p <= (area)^(1/p) ||.||_inf on the sphere
        area = small_grid.quad_weights.sum()
        for _ in range(20):
            f = evaluate_ps(random_diagram(rng, 6), LAM, small_grid)
            g = evaluate_ps(random_diagram(rng, 6), LAM, small_grid)
            sup = lp_distance(f, g, math.inf)
            for p in (1, 2, 3):
                assert lp_distance(f, g, p) <= area ** (1 / p) * sup * (1 + 1e-12) + 1e-15


class TestStabilitySmall:
    def test_sup_distance_bounded_by_w1(self, rng):
        g = make_grid(100, 50)
        const = estimate_constants(LAM, (0, 10, 0, 10), samples=20_000, seed=0)
        bound = max(const.lipschitz_c, 1.0)
        for _ in range(100):
            a, b = random_diagram(rng, 10), random_diagram(rng, 10)
            dist = lp_distance(evaluate_ps(a, LAM, g), evaluate_ps(b, LAM, g), math.inf)
            assert dist <= bound * w1_distance(a, b) * 1.02 + 1e-12

    def test_shrinking_point_converges_monotonically(self):
        g = make_grid(100, 50)
        sups = [evaluate_ps(make_diagram([(1, 1 + 1 / n)]), LAM, g).max() for n in (1, 2, 4, 8, 16, 32)]
        assert all(a > b for a, b in zip(sups, sups[1:]))


class TestFeatures:
    def test_zero_field(self, small_grid):
        assert np.all(to_feature_vector(zero_field(small_grid), True) == 0)

    def test_scaled_norm_matches_l2(self, fine_grid):
        v = to_feature_vector(evaluate_ps(ONE, LAM, fine_grid), True)
        assert np.linalg.norm(v) == pytest.approx(math.sqrt(2 * math.pi / 3), rel=5e-3)

    def test_unscaled_length(self):
        g = make_grid(12, 7)
        assert len(to_feature_vector(evaluate_ps(ONE, LAM, g), False)) == 84


class TestExport:
    def test_csv(self):
        g = make_grid(3, 2)
        f = evaluate_ps(ONE, LAM, g)
        text = field_to_csv(f, header={"grid": [3, 2]})
        lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
        assert lines[0] == "theta,phi,value"
        assert len(lines) == 7
        vals = [float(ln.split(",")[2]) for ln in lines[1:]]
        np.testing.assert_array_equal(vals, f.values)

    def test_json(self):
        g = make_grid(3, 2)
        f = evaluate_ps(ONE, LAM, g)
        doc = json.loads(field_to_json(f))
        assert doc["grid"]["n_theta"] == 3 and doc["grid"]["n_phi"] == 2
        assert doc["provenance"]["diagram"] == ONE.digest()
        assert doc["provenance"]["weighting"] == {"kind": "lambda", "alpha": 1.0}
        np.testing.assert_array_equal(doc["values"], f.values)
