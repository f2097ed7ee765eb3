import math

import numpy as np
import pytest
from scipy.integrate import quad

from collarmass.corner import (CornerManifold, WarpedManifold, adm_mass, adm_mass_cartesian,
                               check_outer_minimising_proxy, deform_nonstatic, glue_in_collar,
                               load_warped, mollify_corner, sigma_map, verify_pmt_hypotheses,
                               warped_from_dict)
from collarmass.errors import CornerInequalityFailed, PreconditionFailed
from collarmass.surface import BartnikData


@pytest.fixture(scope="module")
def corner():
    return CornerManifold(WarpedManifold.schwarzschild(0.2, 0.5, 1.0, 801),
                          WarpedManifold.schwarzschild(0.3, 1.0))


@pytest.fixture(scope="module")
def exterior():
    return WarpedManifold.schwarzschild(0.4, 1.0)


# warped pieces -------------------------------------------------------------

@pytest.mark.parametrize("m", [0.1, 0.3, 1.0])
def test_schwarzschild_is_scalar_flat_with_adm_m(m):
    w = WarpedManifold.schwarzschild(m, 2.5 * m)
    R = w.scalar_curvature
    assert np.abs(R).max() < 1e-10 / w.rho.min() ** 2
    assert np.allclose(w.mass_function, m, rtol=0, atol=1e-9)
    assert adm_mass(w) == pytest.approx(m, abs=1e-9)
    assert adm_mass_cartesian(w) == pytest.approx(m, abs=1e-6)


def test_arclength_matches_quadrature():
    w = WarpedManifold.schwarzschild(0.3, 0.7, 10.0, 201)
    for rho, s in zip(w.rho[::40], w.s[::40]):
        exact = quad(lambda r: 1 / math.sqrt(1 - 0.6 / r), 0.7, rho, epsabs=1e-13)[0]
        assert s == pytest.approx(exact, abs=1e-10)


def test_flat_and_rescale():
    flat = WarpedManifold.flat(1.0)
    assert adm_mass(flat) == pytest.approx(0.0, abs=1e-14)
    assert np.abs(flat.mean_curvature - 2 / flat.rho).max() < 1e-14
    w = WarpedManifold.schwarzschild(0.3, 1.0)
    assert adm_mass(w.rescale(1.1)) == pytest.approx(0.33, abs=1e-9)
    assert np.allclose(w.rescale(2.0).mean_curvature, w.mean_curvature / 2)


def test_asymptotic_flag_rejects_cone():
    s = np.linspace(0, 1e4, 2001)
    cone = WarpedManifold.from_rho(s, 1 + 0.5 * s, "cone")
    assert not cone.asymptotic_flag
    assert WarpedManifold.schwarzschild(0.3, 1.0).asymptotic_flag


def test_json_round_trip(tmp_path):
    import json
    w = WarpedManifold.schwarzschild(0.3, 1.0)
    path = tmp_path / "w.json"
    path.write_text(json.dumps(w.to_dict()))
    back = load_warped(path)
    assert np.array_equal(back.rho, w.rho) and np.array_equal(back.s, w.s)
    assert np.abs(back.drho - w.drho).max() < 1e-6
    assert adm_mass(warped_from_dict(w.to_dict())) == pytest.approx(0.3, abs=1e-6)


# corners ----------------------------------------------------------------

def test_corner_passes_strictly(corner):
    rep = verify_pmt_hypotheses(corner)
    assert rep.passed and rep.strict
    assert rep.H_minus == pytest.approx(2 * math.sqrt(0.6), abs=1e-12)
    assert rep.H_plus == pytest.approx(2 * math.sqrt(0.4), abs=1e-12)
    assert rep.adm_mass == pytest.approx(0.3, abs=1e-6)
    assert rep.adm_mass_cartesian == pytest.approx(0.3, abs=1e-6)


def test_reversed_corner_fails_ordering():
    cm = CornerManifold(WarpedManifold.schwarzschild(0.3, 0.7, 1.0, 801),
                        WarpedManifold.schwarzschild(0.2, 1.0))
    rep = verify_pmt_hypotheses(cm)
    assert rep.metrics_match and not rep.mean_curvature_ordered and not rep.passed


def test_area_mismatch_fails_match():
    cm = CornerManifold(WarpedManifold.flat(0.5, 1.0, 101), WarpedManifold.flat(1.2))
    rep = verify_pmt_hypotheses(cm, cartesian=False)
    assert not rep.metrics_match and not rep.passed


def test_outer_piece_is_shifted_to_corner(corner):
    assert corner.outer.s[0] == corner.corner_s
    assert corner.corner_area_match < 1e-12


# mollification ---------------------------------------------------------------

def test_mollification_ladder(corner):
    diags = [mollify_corner(corner, sig)[1] for sig in (0.1, 0.05, 0.025)]
    devs = [d.adm_deviation for d in diags]
    assert all(a >= 2 * b for a, b in zip(devs, devs[1:]))
    c0 = [d.c0_distance for d in diags]
    assert all(a > b for a, b in zip(c0, c0[1:])) and c0[-1] < 1e-3
    assert all(d.min_R_near_corner > 0 for d in diags)


def test_mollifying_a_smooth_manifold_is_identity():
    w = WarpedManifold.schwarzschild(0.3, 1.0)
    k = int(np.searchsorted(w.rho, 2.0))
    inner = WarpedManifold(w.s[:k + 1], w.rho[:k + 1], w.drho[:k + 1], w.ddrho[:k + 1])
    outer = WarpedManifold(w.s[k:], w.rho[k:], w.drho[k:], w.ddrho[k:])
    _, diag = mollify_corner(CornerManifold(inner, outer), 0.05)
    assert diag.c0_distance < 1e-9 and diag.adm_deviation < 1e-9


def test_mollifying_reversed_corner_goes_negative():
    cm = CornerManifold(WarpedManifold.schwarzschild(0.3, 0.7, 1.0, 801),
                        WarpedManifold.schwarzschild(0.2, 1.0))
    assert mollify_corner(cm, 0.05)[1].min_R_near_corner < 0


def test_sigma_out_of_range(corner):
    with pytest.raises(ValueError):
        mollify_corner(corner, 0.0)


# deformation --------------------------------------------------------------------

def test_sigma_map_values():
    s, ds, dds = sigma_map(np.array([0.0, 0.5]))
    assert s[0] == 0 and ds[0] == 1 and dds[0] == 0
    exact = 0.5 - quad(lambda u: math.exp(-1 / u**2), 0, 0.5, epsabs=1e-15)[0]
    assert s[1] == pytest.approx(exact, abs=1e-13)
    assert ds[1] == pytest.approx(1 - math.exp(-4), abs=1e-12)
    assert dds[1] == pytest.approx(-16 * math.exp(-4), abs=1e-12)


def test_sigma_map_is_contracting_and_monotone():
    t = np.linspace(0, 2, 401)
    s, ds, _ = sigma_map(t)
    assert np.all(np.diff(s) > 0) and np.all(s <= t) and np.all((ds > 0) & (ds <= 1))


def test_deformation_raises_scalar_curvature():
    w = WarpedManifold.schwarzschild(0.3, 1.0, 10.0, 2001)
    dfm = deform_nonstatic(w, 0.5)
    mask = dfm.deformed_mask
    assert dfm.manifold.scalar_curvature[mask].min() > -1e-14
    # the increment is positive wherever exp(-1/t²) is representable; once it
    # clears the roundoff floor of R the stored curvature is strictly positive
    assert dfm.min_increment > 0
    t = dfm.manifold.s - 0.5
    far = mask & (np.exp(-1 / np.maximum(t, 1e-3) ** 2) > 1e-12)
    assert dfm.manifold.scalar_curvature[far].min() > 0
    assert max(dfm.junction_residuals) < 1e-8
    assert 0 < dfm.unresolved_length < 0.05


def test_deformation_preconditions():
    w = WarpedManifold.schwarzschild(0.3, 1.0, 2.0, 201)
    with pytest.raises(PreconditionFailed):
        deform_nonstatic(w, w.s[-1] + 1)
    with pytest.raises(PreconditionFailed):
        deform_nonstatic(w, 0.1, length=50.0)


# glue ---------------------------------------------------------------------------

def test_glue_pipeline(exterior):
    data = BartnikData.round(1.0, 1.0)
    composite, params, report = glue_in_collar(data, exterior, 0.1)
    assert all(p.passed for p in report.pmt)
    assert report.mass_factor_error < 1e-8
    assert params.mass_factor == pytest.approx(math.sqrt(params.zeta) * 1.1, rel=1e-14)
    assert check_outer_minimising_proxy(composite).passed
    assert report.collar_certificate["valid"]


def test_glue_mass_factor_tends_to_one(exterior):
    data = BartnikData.round(1.0, 1.0)
    factors = [glue_in_collar(data, exterior, e)[1].mass_factor for e in (0.2, 0.1, 0.05)]
    assert factors[0] > factors[1] > factors[2] > 1


def test_glue_rejects_wrong_corner_order():
    with pytest.raises(CornerInequalityFailed):
        glue_in_collar(BartnikData.round(1.0, 1.0), WarpedManifold.schwarzschild(0.3, 1.0), 0.1)


def test_outer_minimising_proxy():
    assert check_outer_minimising_proxy(WarpedManifold.flat(1.0)).passed
    s = np.linspace(0, 2, 401)
    neck = WarpedManifold.from_rho(s, 1 + (s - 1) ** 2, "neck")
    rep = check_outer_minimising_proxy(neck)
    assert not rep.passed and rep.first_violation["check"] == "rho' > 0"
