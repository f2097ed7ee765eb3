"""Rotationally symmetric 3-manifolds ds² + ρ(s)² g_round and corners between them.

Each piece stores ρ, ρ' and ρ'' on its own (possibly nonuniform) arclength
grid, so curvature and mass quantities are pointwise formulas:

    R = 2(1 - ρ'²)/ρ² - 4ρ''/ρ,   H = 2ρ'/ρ,   μ = ρ(1 - ρ'²)/2.
"""

import json
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, CubicSpline
from scipy.special import erfc

from .collar import _arc_increment, build_collar
from .errors import (CollarInfeasible, CollarMassError, CornerInequalityFailed,
                     InvalidMetric, NotAsymptoticallyFlat, PreconditionFailed)
from .surface import AxisymmetricMetric, BartnikData, SurfaceField

CAUCHY_TOL = 1e-6
MATCH_TOL = 1e-10


@dataclass(frozen=True)
class WarpedManifold:
    s: np.ndarray
    rho: np.ndarray
    drho: np.ndarray
    ddrho: np.ndarray
    name: str = ""

    def __post_init__(self):
        arrays = [np.asarray(a, dtype=float) for a in (self.s, self.rho, self.drho, self.ddrho)]
        if len({a.shape for a in arrays}) != 1 or arrays[0].ndim != 1 or len(arrays[0]) < 4:
            raise InvalidMetric("s, rho, rho', rho'' must be 1-d arrays of equal length >= 4")
        if np.any(np.diff(arrays[0]) <= 0):
            raise InvalidMetric("s grid must be strictly increasing", np.nonzero(np.diff(arrays[0]) <= 0)[0])
        bad = np.nonzero(arrays[1] <= 0)[0]
        if len(bad):
            raise InvalidMetric("rho must be positive", bad)
        for name, a in zip(("s", "rho", "drho", "ddrho"), arrays):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    # constructors ---------------------------------------------------------

    @classmethod
    def schwarzschild(cls, m, rho_start, rho_end=1e5, n=4001):
        """Spatial Schwarzschild in arclength, from the sphere of radius rho_start outward."""
        if rho_start <= 2 * m:
            raise ValueError("rho_start must lie outside the horizon")
        rho = np.geomspace(rho_start, rho_end, n)
        if m == 0:
            s = rho - rho_start
        else:
            s = _arc_increment(rho_start, rho, m)
        return cls(s, rho, np.sqrt(1 - 2 * m / rho), m / rho**2, f"schwarzschild({m:g})")

    @classmethod
    def flat(cls, rho_start, rho_end=1e5, n=2001):
        return cls.schwarzschild(0.0, rho_start, rho_end, n)

    @classmethod
    def from_rho(cls, s, rho, name=""):
        """Derivatives from a not-a-knot cubic spline through the samples."""
        spline = CubicSpline(np.asarray(s, float), np.asarray(rho, float))
        return cls(s, rho, spline(s, 1), spline(s, 2), name)

    def rescale(self, c):
        """The metric c²(ds² + ρ²g): s ↦ cs, ρ ↦ cρ, ρ'' ↦ ρ''/c."""
        if not c > 0:
            raise ValueError("scale must be positive")
        return WarpedManifold(c * self.s, c * self.rho, self.drho, self.ddrho / c, self.name)

    def shifted(self, offset):
        return replace(self, s=self.s + offset)

    # pointwise geometry -------------------------------------------------

    @property
    def scalar_curvature(self):
        return 2 * (1 - self.drho**2) / self.rho**2 - 4 * self.ddrho / self.rho

    @property
    def mean_curvature(self):
        return 2 * self.drho / self.rho

    @property
    def mass_function(self):
        return 0.5 * self.rho * (1 - self.drho**2)

    @cached_property
    def asymptotic_flag(self):
        """ρ' → 1 and the mass function settles over the last decade of ρ."""
        if self.rho[-1] < 10 * self.rho[0] or abs(1 - self.drho[-1]) > 1e-2:
            return False
        tail = self.rho >= self.rho[-1] / 10
        mu = self.mass_function[tail]
        return bool(mu.max() - mu.min() < CAUCHY_TOL * max(1.0, abs(mu[-1])))

    def evaluate(self, x):
        """(ρ, ρ', ρ'') at arbitrary s by Hermite interpolation."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.s[0] - 1e-12) or np.any(x > self.s[-1] + 1e-12):
            raise ValueError("evaluation point outside the piece")
        r = CubicHermiteSpline(self.s, self.rho, self.drho)(x)
        d = CubicHermiteSpline(self.s, self.drho, self.ddrho)(x)
        dd = CubicSpline(self.s, self.ddrho)(x)
        return r, d, dd

    def to_dict(self):
        return {"s": self.s.tolist(), "rho": self.rho.tolist(), "asymptotic": self.asymptotic_flag}


def warped_from_dict(doc):
    for key in ("s", "rho"):
        if key not in doc:
            raise InvalidMetric(f"warped-manifold document missing '{key}'")
    w = WarpedManifold.from_rho(doc["s"], doc["rho"], doc.get("name", ""))
    if doc.get("asymptotic") and not w.asymptotic_flag:
        raise NotAsymptoticallyFlat("document claims asymptotic flatness but the tail check fails")
    return w


def load_warped(path):
    return warped_from_dict(json.loads(Path(path).read_text()))


# ADM mass -----------------------------------------------------------------

def adm_mass(w):
    """lim ρ(1 - ρ'²)/2, read off at the outer end of the grid."""
    if not w.asymptotic_flag:
        raise NotAsymptoticallyFlat(f"{w.name or 'manifold'} fails the asymptotic tail check")
    return float(w.mass_function[-1])


def _flux_mass(psi, radius, n_theta=8, n_phi=16, step=1e-3):
    """(1/16π)∮(∂_i γ_ij - ∂_j γ_ii)ν^j dA for γ_ij = δ_ij + ψ(|x|) n_i n_j."""
    xg, wg = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    ct, ph = np.meshgrid(xg, phi, indexing="ij")
    st = np.sqrt(1 - ct**2)
    nu = np.stack([st * np.cos(ph), st * np.sin(ph), ct], axis=-1)
    x = radius * nu
    h = step * radius

    def gamma(y):
        r = np.linalg.norm(y, axis=-1)
        n = y / r[..., None]
        return np.eye(3) + psi(r)[..., None, None] * n[..., :, None] * n[..., None, :]

    dgamma = []  # dgamma[k][..., i, j] = ∂_k γ_ij, fourth-order central
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        dgamma.append((-gamma(x + 2 * e) + 8 * gamma(x + e) - 8 * gamma(x - e) + gamma(x - 2 * e)) / (12 * h))
    div = sum(dgamma[i][..., i, :] for i in range(3))            # ∂_i γ_ij
    grad_tr = np.stack([np.trace(dgamma[j], axis1=-2, axis2=-1) for j in range(3)], axis=-1)
    integrand = np.einsum("...j,...j->...", div - grad_tr, nu) * radius**2
    total = np.sum(integrand * wg[:, None]) * (2 * np.pi / n_phi)
    return total / (16 * np.pi)


def adm_mass_cartesian(w, radius=1e3):
    """ADM mass from flux integrals in the areal Cartesian chart.

    Uses γ_ij = δ_ij + (1/ρ'² - 1) n_i n_j with ρ' read as a function of ρ,
    and Richardson extrapolation over radii R, 2R, 4R (finite-radius error
    behaves like a power series in 1/R).
    """
    if not w.asymptotic_flag:
        raise NotAsymptoticallyFlat(f"{w.name or 'manifold'} fails the asymptotic tail check")
    if w.rho[-1] < 4.1 * radius:
        raise ValueError("grid does not reach four times the extraction radius")
    keep = w.rho >= radius / 4
    mu = CubicSpline(np.log(w.rho[keep]), w.mass_function[keep])

    def psi(r):
        return 1 / (1 - 2 * mu(np.log(r)) / r) - 1

    m1, m2, m4 = (_flux_mass(psi, c * radius) for c in (1, 2, 4))
    return float((8 * m4 - 6 * m2 + m1) / 3)


# corners ------------------------------------------------------------------

@dataclass(frozen=True)
class CornerManifold:
    inner: WarpedManifold
    outer: WarpedManifold

    def __post_init__(self):
        # place the outer piece so the grids meet at the corner
        object.__setattr__(self, "outer", self.outer.shifted(self.inner.s[-1] - self.outer.s[0]))

    @property
    def corner_s(self):
        return float(self.inner.s[-1])

    @property
    def corner_area_match(self):
        return float(abs(self.inner.rho[-1] - self.outer.rho[0]))

    @property
    def H_minus(self):
        return float(self.inner.mean_curvature[-1])

    @property
    def H_plus(self):
        return float(self.outer.mean_curvature[0])


def corner_mean_curvatures(cm):
    return cm.H_minus, cm.H_plus


@dataclass(frozen=True)
class PMTReport:
    inner_nonnegative_R: bool
    outer_nonnegative_R: bool
    metrics_match: bool
    mean_curvature_ordered: bool
    strict: bool
    H_minus: float
    H_plus: float
    adm_mass: Optional[float]
    adm_mass_cartesian: Optional[float]

    @property
    def passed(self):
        return (self.inner_nonnegative_R and self.outer_nonnegative_R
                and self.metrics_match and self.mean_curvature_ordered)

    def to_dict(self):
        d = dict(self.__dict__)
        d["passed"] = self.passed
        return d


def verify_pmt_hypotheses(cm, tol=1e-10, cartesian=True):
    """Check the corner hypotheses; failures are report entries, not exceptions."""
    def nonneg(w):
        scale = np.max(np.abs(2 * (1 - w.drho**2) / w.rho**2)) + 1.0 / w.rho.min() ** 2
        return bool(w.scalar_curvature.min() >= -tol * scale)

    Hm, Hp = corner_mean_curvatures(cm)
    adm = adm_c = None
    if cm.outer.asymptotic_flag:
        adm = adm_mass(cm.outer)
        if cartesian and cm.outer.rho[-1] >= 4.1e3:
            adm_c = adm_mass_cartesian(cm.outer)
    return PMTReport(
        inner_nonnegative_R=nonneg(cm.inner),
        outer_nonnegative_R=nonneg(cm.outer),
        metrics_match=cm.corner_area_match < MATCH_TOL * max(1.0, cm.inner.rho[-1]),
        mean_curvature_ordered=Hm >= Hp - tol * max(abs(Hm), 1.0),
        strict=Hm > Hp + tol * max(abs(Hm), 1.0),
        H_minus=Hm, H_plus=Hp, adm_mass=adm, adm_mass_cartesian=adm_c,
    )


# mollification ---------------------------------------------------------------

_GL = np.polynomial.legendre.leggauss(64)


def _bump(u):
    out = np.zeros_like(u)
    inside = np.abs(u) < 1
    out[inside] = np.exp(-1 / (1 - u[inside] ** 2))
    return out


_BUMP_NORM = float(np.sum(_GL[1] * _bump(_GL[0])))


def bump_cdf(u):
    """∫_{-1}^{u} of the normalized bump kernel exp(-1/(1-x²)), clipped to [0, 1]."""
    u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
    x, wq = _GL
    pts = -1 + (u[..., None] + 1) * (x + 1) / 2
    return np.sum(wq * _bump(pts), axis=-1) * (u + 1) / 2 / _BUMP_NORM


@dataclass(frozen=True)
class MollificationDiagnostics:
    sigma: float
    min_R_near_corner: float
    c0_distance: float
    adm_deviation: Optional[float]
    tail_shift: float

    def to_dict(self):
        return dict(self.__dict__)


def mollify_corner(cm, sigma, n_local=801):
    """Smooth the jump of ρ' across the corner over [s0-σ, s0+σ].

    Each side keeps its own ρ' and absorbs the jump through a smoothed step;
    the jump D(s) is the gap between the first-order Taylor extensions of the
    two sides, so a smooth manifold is left untouched.
    """
    s0 = cm.corner_s
    inner, outer = cm.inner, cm.outer
    half = 0.5 * min(inner.s[-1] - inner.s[0], outer.s[-1] - outer.s[0])
    if not 0 < sigma < half:
        raise ValueError(f"sigma must lie in (0, {half:.4g}) for this corner")
    a, b = inner.drho[-1], outer.drho[0]
    da, db = inner.ddrho[-1], outer.ddrho[0]

    def jump(x):
        return (b - a) + (db - da) * (x - s0)

    x = np.linspace(s0 - sigma, s0 + sigma, n_local)
    left = x <= s0
    theta = bump_cdf((x - s0) / sigma)
    dtheta = _bump((x - s0) / sigma) / (_BUMP_NORM * sigma)
    d = np.empty_like(x)
    dd = np.empty_like(x)
    _, dl, ddl = inner.evaluate(x[left])
    _, dr, ddr = outer.evaluate(x[~left])
    d[left] = dl + jump(x[left]) * theta[left]
    dd[left] = ddl + (db - da) * theta[left] + jump(x[left]) * dtheta[left]
    d[~left] = dr - jump(x[~left]) * (1 - theta[~left])
    dd[~left] = ddr - (db - da) * (1 - theta[~left]) + jump(x[~left]) * dtheta[~left]

    rho_start = inner.evaluate(x[:1])[0][0]
    r = rho_start + CubicHermiteSpline(x, d, dd).antiderivative()(x) \
        - CubicHermiteSpline(x, d, dd).antiderivative()(x[0])
    shift = float(r[-1] - outer.evaluate(x[-1:])[0][0])

    keep_in = inner.s < x[0]
    keep_out = outer.s > x[-1]
    s = np.concatenate([inner.s[keep_in], x, outer.s[keep_out]])
    rho = np.concatenate([inner.rho[keep_in], r, outer.rho[keep_out] + shift])
    drho = np.concatenate([inner.drho[keep_in], d, outer.drho[keep_out]])
    ddrho = np.concatenate([inner.ddrho[keep_in], dd, outer.ddrho[keep_out]])
    smoothed = WarpedManifold(s, rho, drho, ddrho, f"mollified({sigma:g})")

    original = np.where(left, inner.evaluate(np.minimum(x, s0))[0],
                        outer.evaluate(np.maximum(x, s0))[0])
    c0 = max(float(np.abs(r - original).max()), abs(shift))
    R_local = smoothed.scalar_curvature[keep_in.sum():keep_in.sum() + n_local]
    dev = None
    if outer.asymptotic_flag:
        dev = abs(float(smoothed.mass_function[-1]) - adm_mass(outer))
    return smoothed, MollificationDiagnostics(sigma, float(R_local.min()), c0, dev, shift)


# non-static deformation -------------------------------------------------------

def sigma_map(t):
    """σ(t) = t - ∫₀ᵗ exp(-1/u²) du with its first two derivatives."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        e = np.where(t > 0, np.exp(-1 / t**2), 0.0)
        integral = np.where(t > 0, t * e - math.sqrt(math.pi) * erfc(1 / np.where(t > 0, t, 1)), 0.0)
        dd = np.where(t > 0, -2 * e / np.where(t > 0, t, 1) ** 3, 0.0)
    return t - integral, 1 - e, dd


@dataclass(frozen=True)
class Deformation:
    manifold: WarpedManifold
    omega_end: float
    length: float
    min_R_deformed: float        # min of R over t > 0
    min_increment: float         # min of R - σ'²R(original) where exp(-1/t²) is representable
    unresolved_length: float     # t-range next to the junction where exp(-1/t²) underflows
    junction_residuals: tuple    # (value, first derivative, second derivative)

    @property
    def deformed_mask(self):
        s = self.manifold.s
        return (s > self.omega_end) & (s <= self.omega_end + self.length)


def deform_nonstatic(w, omega_end, length=0.5, n=401):
    """ρ̃(s_Ω + t) = ρ(s_Ω + σ(t)) on (s_Ω, s_Ω + length]; unchanged up to s_Ω."""
    if not w.s[0] <= omega_end < w.s[-1]:
        raise PreconditionFailed("omega_end must lie inside the piece")
    beyond = w.s >= omega_end
    if w.scalar_curvature[beyond].min() < -1e-10 / w.rho.min() ** 2:
        raise PreconditionFailed("scalar curvature is negative beyond omega_end")
    _, d0, _ = w.evaluate([omega_end])
    if d0[0] <= 0:
        raise PreconditionFailed("boundary at omega_end is not strictly mean convex")
    t = np.linspace(0.0, length, n)
    sig, dsig, ddsig = sigma_map(t)
    if omega_end + sig[-1] > w.s[-1]:
        raise PreconditionFailed("piece too short for the requested deformation length")
    r, d, dd = w.evaluate(omega_end + sig)
    keep = w.s < omega_end
    out = WarpedManifold(
        np.concatenate([w.s[keep], omega_end + t]),
        np.concatenate([w.rho[keep], r]),
        np.concatenate([w.drho[keep], d * dsig]),
        np.concatenate([w.ddrho[keep], dd * dsig**2 + d * ddsig]),
        f"deformed({w.name})",
    )
    # σ'²R(γ) + increment, increment = 2(1 - σ'²)/ρ² - 4ρ'σ''/ρ with 1 - σ'² = e(2 - e)
    with np.errstate(divide="ignore"):
        e = np.where(t > 0, np.exp(-1 / np.where(t > 0, t, 1) ** 2), 0.0)
    R_base = CubicSpline(w.s, w.scalar_curvature)(omega_end + sig)
    increment = 2 * e * (2 - e) / r**2 - 4 * d * ddsig / r
    R = dsig**2 * R_base + increment
    resolved = e > 0
    window = t <= 0.1
    r_id, d_id, dd_id = w.evaluate(omega_end + t[window])
    new_d, new_dd = d * dsig, dd * dsig**2 + d * ddsig
    res = (float(np.abs(r[window] - r_id).max()), float(np.abs(new_d[window] - d_id).max()),
           float(np.abs(new_dd[window] - dd_id).max()))
    return Deformation(out, float(omega_end), float(length),
                       float(R[1:].min()),
                       float(increment[resolved].min()) if resolved.any() else float("nan"),
                       float(t[resolved][0]) if resolved.any() else float(length), res)


# glue-in pipeline ------------------------------------------------------------------

@dataclass(frozen=True)
class GlueParameters:
    zeta: float
    epsilon: float
    delta: float

    @property
    def rescale_factor(self):
        return self.zeta * (1 + self.epsilon) ** 2

    @property
    def mass_factor(self):
        return math.sqrt(self.rescale_factor)

    def to_dict(self):
        return {"zeta": self.zeta, "epsilon": self.epsilon, "delta": self.delta,
                "rescale_factor": self.rescale_factor, "mass_factor": self.mass_factor}


@dataclass(frozen=True)
class Composite:
    pieces: tuple          # inner, collar, exterior
    corners: tuple         # CornerManifold between consecutive pieces

    def to_dict(self):
        return {"pieces": [dict(name=p.name, **p.to_dict()) for p in self.pieces],
                "corners": [{"s": c.corner_s, "H_minus": c.H_minus, "H_plus": c.H_plus,
                             "area_match": c.corner_area_match} for c in self.corners]}


@dataclass(frozen=True)
class GlueReport:
    pmt: tuple
    Hhat: float
    H_exterior: float
    predicted_mass: float
    measured_mass: float
    collar_certificate: dict
    assumed: str = "exterior not static (not checked)"

    @property
    def mass_factor_error(self):
        return abs(self.measured_mass - self.predicted_mass)

    def to_dict(self):
        return {"pmt": [p.to_dict() for p in self.pmt], "Hhat": self.Hhat,
                "H_exterior": self.H_exterior, "predicted_mass": self.predicted_mass,
                "measured_mass": self.measured_mass, "mass_factor_error": self.mass_factor_error,
                "collar_certificate": self.collar_certificate, "assumed": self.assumed}


def _round_profile(data):
    g = data.metric
    r0 = float(np.mean(g.f))
    H = data.H.values
    if (np.ptp(g.f) > 1e-10 * r0 or np.abs(g.h - r0 * np.sin(g.theta)).max() > 1e-10 * r0
            or np.ptp(H) > 1e-10 * H.max()):
        raise PreconditionFailed("glue_in_collar needs a round cross-section with constant H")
    return r0, float(H[0])


def glue_in_collar(inner_data, exterior, epsilon, delta=None, n_leaves=257):
    """Insert a δ-extension and an ε-collar between the data and a rescaled exterior.

    The inner region is the Schwarzschild piece whose boundary sphere carries
    the given round metric and mean curvature.
    """
    r0, H1 = _round_profile(inner_data)
    if abs(exterior.rho[0] - r0) > MATCH_TOL * r0:
        raise PreconditionFailed("exterior boundary area does not match the data")
    H_plus = float(exterior.mean_curvature[0])
    if H_plus > H1:
        raise CornerInequalityFailed(f"H+={H_plus:.6g} exceeds H-={H1:.6g} at the original corner",
                                     where="original corner")
    if not exterior.asymptotic_flag:
        raise NotAsymptoticallyFlat("exterior fails the asymptotic tail check")

    # inner region and its δ-extension
    m_in = 0.5 * r0 * (1 - (H1 * r0 / 2) ** 2)
    start = max(0.5 * r0, 2 * m_in * (1 + 1e-3))
    base = WarpedManifold.schwarzschild(m_in, start, 4 * r0, 2001)
    s_omega = float(np.interp(r0, base.rho, base.s))
    delta = 0.1 * epsilon * r0 if delta is None else delta
    deformed = deform_nonstatic(base, s_omega, delta)
    inner = deformed.manifold
    rho1, H_ext = float(inner.rho[-1]), float(inner.mean_curvature[-1])
    zeta = (rho1 / r0) ** 2

    # collar from the extended boundary to the (1+ε)-enlarged round sphere
    n = inner_data.metric.n
    ext_data = BartnikData.round(rho1, H_ext, n)
    try:
        spec = build_collar(ext_data, AxisymmetricMetric.round(rho1, n), epsilon)
    except CollarMassError as exc:
        raise CollarInfeasible(f"no valid collar: {exc}") from exc
    from .collar import certify
    cert = certify(spec, with_oracle=False)
    if not cert.valid:
        raise CollarInfeasible(f"collar certificate invalid: {cert.conditions}")
    A = float(spec.A[0])
    tk = np.linspace(0.0, spec.k, n_leaves)
    v = spec.profile.v_polished(tk)
    dv = np.sqrt(1 - 2 * spec.m / v)
    collar = WarpedManifold(A * tk, v, dv / A, spec.m / v**2 / A**2, "collar")
    Hhat = float(collar.mean_curvature[-1])

    params = GlueParameters(zeta, epsilon, delta)
    scaled = exterior.rescale(params.mass_factor)
    H_E = float(scaled.mean_curvature[0])
    if H_E >= Hhat:
        raise CornerInequalityFailed(f"exterior mean curvature {H_E:.6g} >= collar Hhat {Hhat:.6g}",
                                     where="collar end")

    c1 = CornerManifold(inner, collar)
    c2 = CornerManifold(c1.outer, scaled)
    composite = Composite((inner, c1.outer, c2.outer), (c1, c2))
    report = GlueReport(
        pmt=(verify_pmt_hypotheses(c1), verify_pmt_hypotheses(c2)),
        Hhat=Hhat, H_exterior=H_E,
        predicted_mass=params.mass_factor * adm_mass(exterior),
        measured_mass=adm_mass(c2.outer),
        collar_certificate=cert.to_dict(),
    )
    return composite, params, report


@dataclass(frozen=True)
class OuterMinimisingReport:
    passed: bool
    first_violation: Optional[dict]
    label: str = "sufficient proxy: mean-convex foliation with increasing area"

    def to_dict(self):
        return dict(self.__dict__)


def check_outer_minimising_proxy(obj):
    """Mean-convex leaves (ρ' > 0, H > 0) with area increasing outward."""
    pieces = obj.pieces[1:] if isinstance(obj, Composite) else (obj,)
    prev = None
    for piece in pieces:
        checks = (("rho' > 0", piece.drho > 0), ("H > 0", piece.mean_curvature > 0),
                  ("area increasing", np.concatenate([[True], np.diff(piece.rho) > 0])))
        for what, ok in checks:
            if not ok.all():
                i = int(np.argmin(ok))
                return OuterMinimisingReport(False, {"piece": piece.name, "s": float(piece.s[i]),
                                                     "rho": float(piece.rho[i]), "check": what})
        if prev is not None and piece.rho[0] < prev - MATCH_TOL * prev:
            return OuterMinimisingReport(False, {"piece": piece.name, "s": float(piece.s[0]),
                                                 "rho": float(piece.rho[0]), "check": "area jump"})
        prev = piece.rho[-1]
    return OuterMinimisingReport(True, None)
