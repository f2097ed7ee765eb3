import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from collarmass.errors import GridMismatch, InvalidMetric
from collarmass.surface import (AxisymmetricMetric, BartnikData, SurfaceField, area,
                                bartnik_from_dict, c2tau_distance, gaussian_curvature,
                                integrate, laplace_beltrami, load_bartnik, scalar_curvature)

from conftest import bumpy_metric

coef = st.floats(-0.15, 0.15)


def test_round_sphere_curvature(unit_round):
    assert np.abs(gaussian_curvature(unit_round).values - 1).max() < 1e-9
    assert np.abs(scalar_curvature(AxisymmetricMetric.round(2.0)).values - 0.5).max() < 1e-9


def test_area_of_round_sphere():
    assert abs(area(AxisymmetricMetric.round(3.0)) - 36 * np.pi) < 1e-10


def test_laplacian_of_spherical_harmonics(unit_round):
    t = unit_round.theta
    # Δ cos θ = -2 cos θ, Δ P2 = -6 P2
    assert np.abs(laplace_beltrami(unit_round, np.cos(t)).values + 2 * np.cos(t)).max() < 1e-8
    p2 = 1.5 * np.cos(t) ** 2 - 0.5
    assert np.abs(laplace_beltrami(unit_round, p2).values + 6 * p2).max() < 1e-7


def test_laplacian_of_constant_vanishes():
    g = bumpy_metric([0.1, -0.05, 0.02], [0.1, 0.03])
    assert np.abs(laplace_beltrami(g, np.full(g.n, 3.0)).values).max() < 1e-10


def test_ellipsoid_curvature_matches_closed_form():
    # oblate spheroid x = a sinθ, z = c cosθ: K = c² / (a² cos²θ + c² sin²θ)²... in the
    # parametrization by θ with f² = a²cos²θ + c²sin²θ, h = a sinθ
    a, c = 1.2, 0.8
    g = AxisymmetricMetric.from_functions(lambda t: np.sqrt(a**2 * np.cos(t) ** 2 + c**2 * np.sin(t) ** 2),
                                          lambda t: a * np.sin(t), 257)
    t = g.theta
    exact = c**2 / (a**2 * np.cos(t) ** 2 + c**2 * np.sin(t) ** 2) ** 2
    assert np.abs(gaussian_curvature(g).values - exact).max() < 1e-8


@given(coef, coef, coef, coef, coef)
def test_gauss_bonnet(a0, a1, a2, b0, b1):
    g = bumpy_metric([a0, a1, a2], [b0, b1])
    assert abs(integrate(g, gaussian_curvature(g).values) - 4 * np.pi) < 1e-6


@given(coef, coef, st.floats(0.3, 3.0))
def test_curvature_scales_inversely_with_metric(a0, b0, lam):
    g = bumpy_metric([a0, 0.0, 0.0], [b0, 0.0])
    K, K2 = gaussian_curvature(g).values, gaussian_curvature(g.scaled(lam)).values
    assert np.abs(K2 - K / lam**2).max() <= 1e-10 * np.abs(K2).max()


def test_distance_is_zero_to_itself_and_symmetric():
    g1 = bumpy_metric([0.1, 0, 0], [0, 0])
    g2 = bumpy_metric([0, 0.05, 0], [0.02, 0])
    assert c2tau_distance(g1, g1).c2_tau_total == 0
    assert c2tau_distance(g1, g2).c2_tau_total == pytest.approx(c2tau_distance(g2, g1).c2_tau_total)


def test_distance_components_for_a_constant_shift():
    d = c2tau_distance(SurfaceField(np.full(65, 2.0)), SurfaceField(np.full(65, 1.5)))
    assert d.c0 == pytest.approx(0.5) and d.c1 < 1e-12 and d.c2 < 1e-12


def test_validation_errors_carry_indices():
    t = np.linspace(0, np.pi, 65)
    f = np.ones(65)
    f[10] = -1.0
    with pytest.raises(InvalidMetric, match="10"):
        AxisymmetricMetric(t, f, np.sin(t))
    with pytest.raises(InvalidMetric, match="pole"):
        AxisymmetricMetric(t, np.ones(65), 2 * np.sin(t) * (t < 10))
    with pytest.raises(InvalidMetric):
        AxisymmetricMetric(np.linspace(0, np.pi, 9), np.ones(9), np.sin(np.linspace(0, np.pi, 9)))
    with pytest.raises(GridMismatch):
        AxisymmetricMetric(t, np.ones(64), np.sin(t))


def test_nonpositive_mean_curvature_is_rejected(unit_round):
    H = np.ones(129)
    H[5] = 0
    with pytest.raises(InvalidMetric, match="5"):
        BartnikData(unit_round, SurfaceField(H))


def test_json_round_trip(tmp_path, round_h1):
    path = tmp_path / "data.json"
    path.write_text(json.dumps(round_h1.to_dict()))
    back = load_bartnik(path)
    assert np.array_equal(back.metric.f, round_h1.metric.f)
    with pytest.raises(InvalidMetric, match="missing"):
        bartnik_from_dict({"theta": [0, 1]})
