import numpy as np
import pytest
from hypothesis import given, strategies as st

from collarmass.errors import PositiveCurvatureLost, UnequalArea
from collarmass.paths import area_equalize, build_path, path_constants
from collarmass.surface import AxisymmetricMetric, area, gaussian_curvature, integrate

from conftest import bumpy_metric

coef = st.floats(-0.05, 0.05)


def _equal_area(g, ref):
    return g.scaled(np.sqrt(area(ref) / area(g)))


def test_area_equalize_recovers_reparametrized_round_sphere(unit_round):
    # the round sphere written in a stretched colatitude ψ(θ) = θ + 0.1 sin 2θ
    psi = lambda t: t + 0.1 * np.sin(2 * t)
    g2 = AxisymmetricMetric.from_functions(lambda t: 1 + 0.2 * np.cos(2 * t), lambda t: np.sin(psi(t)))
    ge = area_equalize(unit_round, g2)
    assert np.abs(ge.f - 1).max() < 1e-9 and np.abs(ge.h - np.sin(ge.theta)).max() < 1e-9


def test_identity_path_is_constant(unit_round):
    p = build_path(unit_round, unit_round)
    assert p.alpha == 0 and np.abs(p.speed2).max() == 0
    assert p.beta == pytest.approx(1.0, abs=1e-9)


def test_unequal_area_rejected(unit_round):
    with pytest.raises(UnequalArea):
        build_path(unit_round, AxisymmetricMetric.round(1.1))


@given(coef, coef, coef, coef)
def test_path_is_trace_free_with_fixed_area_form(a0, a1, b0, b1):
    g1 = bumpy_metric([a0, 0, 0], [b0, 0])
    g2 = _equal_area(bumpy_metric([0, a1, 0], [0, b1]), g1)
    p = build_path(g1, g2)
    assert p.trace_defect < 1e-8
    dens = p.f * p.h
    assert np.abs(dens - dens[0]).max() < 1e-12 * dens.max()
    # endpoints keep the total curvature of a sphere
    assert abs(integrate(p.end, gaussian_curvature(p.end).values) - 4 * np.pi) < 1e-6


@given(coef, coef)
def test_alpha_matches_log_ratio_oracle(a0, b1):
    # |ġ|² = 8 L² for the log-linear path, so α = (√2/2) max|L| with L = log(f̃2/f1)
    g1 = bumpy_metric([a0, 0, 0], [0, 0])
    g2 = _equal_area(bumpy_metric([0, 0, 0], [0, b1]), g1)
    p = build_path(g1, g2)
    L = np.log(p.end.f / p.start.f)
    assert p.alpha == pytest.approx(np.sqrt(2) / 2 * np.abs(L).max(), rel=1e-6, abs=1e-12)
    assert path_constants(p) == (p.alpha, p.beta)


def test_strong_deformation_loses_positive_curvature(unit_round):
    g2 = bumpy_metric([0.0, 0.9, 0.0], [0.0, 0.0])
    with pytest.raises(PositiveCurvatureLost) as info:
        build_path(unit_round, _equal_area(g2, unit_round))
    assert info.value.value <= 0
