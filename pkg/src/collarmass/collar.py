"""Schwarzschild-profile collars γ = k²A(x)²ds² + r0⁻² v_m(ks)² g(s) on [0,1]×S².

The closed-form scalar curvature of γ is cross-checked against a generic
finite-difference evaluator that only sees the three metric coefficients on
the (s, θ) grid.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (BracketViolation, ConditionViolated, HorizonError,
                     NonPositiveMass)
from .fd import diff_open, diff_parity
from .paths import S_SAMPLES, TraceFreePath, build_path
from .surface import AxisymmetricMetric, BartnikData, SurfaceField, area, laplace_beltrami

VALID_END_METRIC_TOL = 1e-8
CLOSED_FORM_TOL = 1e-8


def _arc_increment(r0, v, m):
    """∫_{r0}^{v} dw / sqrt(1 - 2m/w), written in v - r0 so nothing large cancels."""
    d = v - r0
    sa, sb = np.sqrt(r0), np.sqrt(v)
    qa, qb = np.sqrt(r0 - 2 * m), np.sqrt(v - 2 * m)
    return (d * (v + r0 - 2 * m) / (sa * qa + sb * qb)
            + 2 * m * np.log1p(d * (1 / (sa + sb) + 1 / (qa + qb)) / (sa + qa)))


def schwarzschild_radius(m, r0, t, iterations=100):
    """v_m(t) by Newton iteration on the closed-form inverse (vectorized in t)."""
    t = np.asarray(t, dtype=float)
    if r0 <= 2 * m:
        raise HorizonError(f"r0={r0} is at or inside the horizon 2m={2 * m}")
    if m == 0:
        return r0 + t
    v = r0 + t * np.sqrt(1.0 - 2.0 * m / r0) if m < 0 else r0 + t
    for _ in range(iterations):
        step = (_arc_increment(r0, v, m) - t) * np.sqrt(1.0 - 2.0 * m / v)
        v = np.maximum(v - step, 0.5 * (v + 2 * m))
        if np.all(np.abs(step) <= 4e-16 * v):
            break
    return v


@dataclass(frozen=True)
class SchwarzschildProfile:
    """Solution of v' = sqrt(1 - 2m/v), v(0) = r0, on [0, t_max]."""

    m: float
    r0: float
    t_max: float
    _solution: object = field(repr=False, compare=False)

    def v(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < -1e-14) or np.any(t > self.t_max * (1 + 1e-12)):
            raise ValueError("t outside the integrated range")
        out = self._solution.sol(np.clip(t, 0.0, self.t_max).ravel())[0]
        return out.reshape(t.shape)

    def v_polished(self, t, dtype=np.float64):
        """Dense-output value refined by Newton steps on the closed-form inverse.

        The interpolant is accurate to ~1e-13 but not smooth at that level;
        the polished values are, which matters once they are differenced.
        """
        t = np.asarray(t).astype(dtype)
        v = self.v(np.asarray(t, dtype=float)).astype(dtype)
        for _ in range(3):
            v = v - (self.t_of_v(v) - t) * np.sqrt(1 - 2 * dtype(self.m) / v)
        return v

    def dv(self, t):
        return np.sqrt(1.0 - 2.0 * self.m / self.v(t))

    def ddv(self, t):
        return self.m / self.v(t) ** 2

    def t_of_v(self, v):
        """Closed-form inverse, t(v) = ∫_{r0}^{v} dw / sqrt(1 - 2m/w)."""
        v = np.asarray(v)
        v = v.astype(np.result_type(v.dtype, np.float64))
        m, r0 = v.dtype.type(self.m), v.dtype.type(self.r0)
        if m == 0:
            return v - r0
        return _arc_increment(r0, v, m)

    def k_for(self, target):
        return float(self.t_of_v(target))

    @cached_property
    def samples(self):
        t = np.linspace(0.0, self.t_max, 257)
        return t, self.v(t)

    def ode_residual(self, step=None):
        """max |v' - sqrt(1 - 2m/v)| with v' from a sixth-order stencil of the dense output."""
        t, _ = self.samples
        step = step or 1e-3 * max(self.t_max, self.r0)
        inner = t[(t > 3 * step) & (t < self.t_max - 3 * step)]
        if len(inner) == 0:
            return 0.0
        w = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
        dv = sum(wk * self.v(inner + (k - 3) * step) for k, wk in enumerate(w)) / step
        return float(np.abs(dv - self.dv(inner)).max())

    def closed_form_defect(self):
        t, v = self.samples
        return float(np.abs(self.t_of_v(v) - t).max())


def solve_profile(m, r0, t_max):
    if r0 <= 0:
        raise ValueError("r0 must be positive")
    if r0 <= 2 * m:
        raise HorizonError(f"r0={r0} is at or inside the horizon 2m={2 * m}")
    if t_max < 0:
        raise ValueError("t_max must be non-negative")
    span = max(t_max, 1e-300)
    sol = solve_ivp(lambda t, v: np.sqrt(1.0 - 2.0 * m / v), (0.0, span), [r0],
                    method="DOP853", rtol=1e-13, atol=1e-14 * r0, dense_output=True)
    return SchwarzschildProfile(float(m), float(r0), float(t_max), sol)


def path_curvature_terms(path, H):
    """R(g(s)) - 2HΔ_{g(s)}(1/H) on the (s, θ) grid."""
    H = H.values if isinstance(H, SurfaceField) else np.asarray(H, dtype=float)
    inv = 1.0 / H
    rows = []
    for i in range(len(path.s_grid)):
        lap = laplace_beltrami(path.metric(i), inv).values
        rows.append(2.0 * path.curvature[i] - 2.0 * H * lap)
    return np.array(rows)


def choose_mass_parameter(g1, H1, path, Q=None):
    """χ, pointwise Ξ and the single mass parameter m of the collar."""
    H = H1.values if isinstance(H1, SurfaceField) else np.asarray(H1, dtype=float)
    if Q is None:
        Q = path_curvature_terms(path, H)
    margin0 = Q[0] - 0.5 * H**2
    if margin0.min() <= 0:
        raise ConditionViolated(
            f"convexity condition fails at s=0: margin {margin0.min():.3e} "
            f"at theta={g1.theta[np.argmin(margin0)]:.4f}")
    chi = float(Q.min())
    if chi <= 0.5 * H.max() ** 2:
        raise ConditionViolated(f"chi={chi:.6g} <= max H^2/2={0.5 * H.max() ** 2:.6g}")
    Xi = 0.5 * (1.0 + H**2 / (2.0 * chi))
    r0 = np.sqrt(area(g1) / (4 * np.pi))
    m = 0.5 * r0 * float(np.min(1.0 - H**2 / (2.0 * Xi * chi)))
    if m <= 0:
        raise NonPositiveMass(f"mass parameter {m:.3e} is not positive")
    if np.any(0.5 * H**2 / (1.0 - 2.0 * m / r0) >= chi):
        raise ConditionViolated("H^2/2 (1-2m/r0)^-1 < chi fails")
    return chi, Xi, m


@dataclass(frozen=True)
class CollarSpec:
    epsilon: float
    path: TraceFreePath
    H1: SurfaceField
    r0: float
    m: float
    k: float
    A: np.ndarray
    Q: np.ndarray              # R(g(s)) - 2H1 Δ_{g(s)}(1/H1)
    profile: SchwarzschildProfile
    chi: Optional[float] = None
    Xi: Optional[np.ndarray] = None
    mass_rule: str = "min-over-theta"

    @property
    def s_grid(self):
        return self.path.s_grid

    @property
    def theta(self):
        return self.path.theta

    @cached_property
    def v_leaf(self):
        return self.profile.v_polished(self.k * self.s_grid)

    @property
    def lapse_factor(self):
        """c = (1 - 2m/r0)^-1."""
        return 1.0 / (1.0 - 2.0 * self.m / self.r0)

    def coefficients(self, dtype=np.float64):
        """Orthogonal frame lengths (E_s, E_θ, E_φ) of γ on the (s, θ) grid.

        With an extended ``dtype`` the leaf radii and the path are re-evaluated
        in that precision rather than cast.
        """
        if dtype == np.float64:
            w = (self.v_leaf / self.r0)[:, None]
            f, h = self.path.f, self.path.h
        else:
            s = np.linspace(dtype(0), dtype(1), len(self.s_grid))
            w = (self.profile.v_polished(dtype(self.k) * s, dtype) / dtype(self.r0))[:, None]
            f0 = self.path.f[0].astype(dtype)
            h0 = self.path.h[0].astype(dtype)
            L = np.log(self.path.f[-1].astype(dtype) / f0)
            f = f0 * np.exp(np.outer(s, L))
            h = h0 * np.exp(-np.outer(s, L))
        E1 = np.broadcast_to(dtype(self.k) * self.A.astype(dtype), f.shape)
        return E1, w * f, w * h

    @property
    def k_bracket(self):
        ends = sorted([self.epsilon * self.r0,
                       self.epsilon * self.r0 * np.sqrt(self.lapse_factor)])
        return tuple(ends)

    def to_dict(self, certificate=None):
        doc = {
            "parameters": {"epsilon": self.epsilon, "m": self.m, "k": self.k, "chi": self.chi,
                           "r0": self.r0, "mass_rule": self.mass_rule,
                           "alpha": self.path.alpha, "beta": self.path.beta,
                           "k_bracket": list(self.k_bracket)},
            "theta": self.theta.tolist(),
            "A": self.A.tolist(),
            "leaves": [
                {"s": float(s), "v": float(v), "scale": float((v / self.r0) ** 2),
                 "H": leaf_mean_curvature(self, s).values.tolist()}
                for s, v in zip(self.s_grid, self.v_leaf)
            ],
        }
        if self.Xi is not None:
            doc["Xi"] = self.Xi.tolist()
        if certificate is not None:
            doc["certificate"] = certificate.to_dict()
        return doc


def make_collar(data, path, m, k, epsilon=None, Q=None, chi=None, Xi=None, mass_rule="given"):
    """Assemble γ for explicit (m, k); ``epsilon`` defaults to v_m(k)/r0 - 1."""
    r0 = data.metric.area_radius()
    if k <= 0:
        raise ValueError("k must be positive (k = 0 is an empty collar)")
    profile = solve_profile(m, r0, k)
    if epsilon is None:
        epsilon = float(profile.v(k)) / r0 - 1.0
    H = data.H.values
    if Q is None:
        Q = path_curvature_terms(path, H)
    A = 2.0 / (H * r0) * np.sqrt(1.0 - 2.0 * m / r0)
    return CollarSpec(float(epsilon), path, data.H, r0, float(m), float(k), A, Q, profile,
                      chi, Xi, mass_rule)


def build_collar(data, g2, epsilon, m=None, n_s=S_SAMPLES):
    """ε-collar from (g1, H1) to g2.

    With ``m=None`` the mass parameter follows the pointwise-minimum rule; an
    explicit ``m`` is used as given (for instance to reproduce a Schwarzschild
    annulus).
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive; epsilon = 0 gives an empty collar")
    path = build_path(data.metric, g2, n_s)
    H = data.H.values
    Q = path_curvature_terms(path, H)
    chi = float(Q.min())
    Xi = 0.5 * (1.0 + H**2 / (2.0 * chi))
    rule = "given"
    if m is None:
        chi, Xi, m = choose_mass_parameter(data.metric, data.H, path, Q)
        rule = "min-over-theta"
    r0 = data.metric.area_radius()
    if r0 <= 2 * m:
        raise HorizonError("mass parameter puts r0 at or inside the horizon")
    k = float(_arc_increment(r0, r0 * (1 + epsilon), m)) if m else r0 * epsilon
    spec = make_collar(data, path, m, k, epsilon, Q, chi, Xi, rule)
    lo, hi = spec.k_bracket
    if not (lo * (1 - 1e-12) <= k <= hi * (1 + 1e-12)):
        raise BracketViolation(f"k={k:.12g} outside [{lo:.12g}, {hi:.12g}]")
    return spec


def leaf_mean_curvature(spec, s):
    v = float(spec.profile.v(spec.k * s))
    return SurfaceField(2.0 / (spec.A * v) * np.sqrt(1.0 - 2.0 * spec.m / v), "1/length")


def analytic_scalar_curvature(spec):
    """R(γ) from the closed-form expression in terms of g(s), H1, m, k."""
    H2 = spec.H1.values[None, :] ** 2
    c = spec.lapse_factor
    v = spec.v_leaf[:, None]
    return spec.r0**2 * (
        (spec.Q - 0.5 * H2 * c) / v**2 - H2 / 16.0 * c / spec.k**2 * spec.path.speed2
    )


def oracle_scalar_curvature(spec, accuracy=6):
    """Scalar curvature of E1²ds² + E2²dθ² + E3²dφ² by finite differences.

    Uses R = 2K_q - 2Δ_q E3 / E3 for the base metric q = E1²ds² + E2²dθ²;
    nothing from the closed form is reused. Runs in extended precision:
    second s-differences on 65 samples are amplified by 1/(k ds)², which in
    double precision puts the roundoff floor right at the 1e-8 level.
    """
    dtype = np.longdouble
    E1, E2, E3 = (np.asarray(e) for e in spec.coefficients(dtype))
    ds = dtype(1) / (len(spec.s_grid) - 1)
    dth = dtype(spec.theta[1] - spec.theta[0])

    def Ds(u):
        return diff_open(u, ds, 1, accuracy, axis=0)

    def Dss(a, u):
        return Ds(a * Ds(u))

    def Dt(u, parity, deriv=1):
        return diff_parity(u, dth, deriv, accuracy, parity, axis=1)

    Kq = -(Dss(1 / E1, E2) + Dt(Dt(E1, 1) / E2, -1)) / (E1 * E2)
    p = (E1 / E2) * Dt(E3, -1)                    # even in θ
    E3t = Dt(E3, -1)
    lap_s = np.empty_like(E3)
    lap_t = np.empty_like(E3)
    interior = slice(1, -1)
    lap_s[:, interior] = Dss(E2 / E1, E3)[:, interior] / E3[:, interior]
    lap_t[:, interior] = Dt(p, 1)[:, interior] / E3[:, interior]
    poles = [0, -1]
    lap_s[:, poles] = Dss(E2 / E1, E3t)[:, poles] / E3t[:, poles]
    lap_t[:, poles] = Dt(p, 1, 2)[:, poles] / E3t[:, poles]
    return (2 * Kq - 2 * (lap_s + lap_t) / (E1 * E2)).astype(np.float64)


@dataclass(frozen=True)
class CurvatureComparison:
    analytic: np.ndarray
    oracle: np.ndarray

    @property
    def max_abs_difference(self):
        return float(np.abs(self.analytic - self.oracle).max())

    def relative_discrepancy(self, r0):
        scale = max(float(np.abs(self.analytic).max()), 1.0 / r0**2)
        return self.max_abs_difference / scale


def collar_scalar_curvature(spec, oracle_accuracy=6):
    return CurvatureComparison(analytic_scalar_curvature(spec),
                               oracle_scalar_curvature(spec, oracle_accuracy))


def velocity_lower_bound(spec):
    """r0²χ(v⁻²(1-Ξ) - ½Ξk⁻²α) with pointwise Ξ."""
    v = spec.v_leaf[:, None]
    Xi = spec.Xi[None, :]
    return spec.r0**2 * spec.chi * ((1 - Xi) / v**2 - 0.5 * Xi * spec.path.alpha / spec.k**2)


def alpha_threshold(spec):
    """Pointwise right side of the α-inequality and the binding index."""
    H = spec.H1.values
    rhs = 2 * H * spec.epsilon**2 * (1 - spec.Xi) / (H + spec.epsilon * np.sqrt(2 * spec.Xi * spec.chi))
    j = int(np.argmin(rhs))
    return rhs, j


def hhat_closed_form(spec):
    """Mean curvature of the far leaf from the product formula.

    The ratio 2Ξχ/H1² is replaced by (1-2m/r0)⁻¹, which it equals at the
    point that fixes m and which makes the formula exact for any m.
    """
    eps = spec.epsilon
    ratio = spec.lapse_factor
    return np.sqrt((1 + eps * ratio) / (1 + eps)) * spec.H1.values / (1 + eps)


@dataclass(frozen=True)
class CollarCertificate:
    min_scalar_curvature: float
    min_leaf_H: float
    end_metric_check: float
    Hhat: np.ndarray
    Hhat_closed_form_defect: float
    margin: float
    hhat_below_H1: bool
    alpha: float
    alpha_threshold: Optional[float]
    alpha_binding_theta: Optional[float]
    alpha_inequality_ok: Optional[bool]
    oracle_discrepancy: float
    scalar_tolerance: float

    @property
    def strict(self):
        return self.min_scalar_curvature > self.scalar_tolerance

    @property
    def conditions(self):
        return {
            "nonnegative_scalar_curvature": self.min_scalar_curvature >= -self.scalar_tolerance,
            "end_metric": self.end_metric_check < VALID_END_METRIC_TOL,
            "hhat_sandwich": self.hhat_below_H1 and self.margin > 0,
            "mean_convex_leaves": self.min_leaf_H > 0,
        }

    @property
    def valid(self):
        return all(self.conditions.values())

    def to_dict(self):
        return {
            "valid": self.valid,
            "strict_positive_scalar_curvature": self.strict,
            "conditions": self.conditions,
            "min_scalar_curvature": self.min_scalar_curvature,
            "min_leaf_H": self.min_leaf_H,
            "end_metric_check": self.end_metric_check,
            "Hhat": self.Hhat.tolist(),
            "Hhat_closed_form_defect": self.Hhat_closed_form_defect,
            "margin": self.margin,
            "alpha": self.alpha,
            "alpha_threshold": self.alpha_threshold,
            "alpha_binding_theta": self.alpha_binding_theta,
            "alpha_inequality_ok": self.alpha_inequality_ok,
            "oracle_discrepancy": self.oracle_discrepancy,
        }


def certify(spec, with_oracle=True, scalar_tolerance=None):
    """Evaluate the four defining conditions of an ε-collar connection."""
    R = analytic_scalar_curvature(spec)
    disc = float("nan")
    if with_oracle:
        disc = collar_scalar_curvature(spec).relative_discrepancy(spec.r0)
    tol = 1e-9 / spec.r0**2 if scalar_tolerance is None else scalar_tolerance
    leaf_H = np.array([leaf_mean_curvature(spec, s).values for s in spec.s_grid])
    w = spec.v_leaf[-1] / spec.r0
    end = spec.path.end
    target = (1 + spec.epsilon) ** 2
    end_check = max(np.abs(w**2 * end.f**2 - target * end.f**2).max(),
                    np.abs(w**2 * end.h**2 - target * end.h**2).max())
    Hhat = leaf_H[-1]
    H1 = spec.H1.values
    closed = hhat_closed_form(spec)
    thr = binding = ok = None
    if spec.Xi is not None and spec.chi is not None and spec.chi > 0:
        rhs, j = alpha_threshold(spec)
        thr, binding = float(rhs[j]), float(spec.theta[j])
        ok = bool(spec.path.alpha < thr)
    return CollarCertificate(
        min_scalar_curvature=float(R.min()),
        min_leaf_H=float(leaf_H.min()),
        end_metric_check=float(end_check),
        Hhat=Hhat,
        Hhat_closed_form_defect=float(np.abs(Hhat - closed).max()),
        margin=float(np.min(Hhat - H1 / (1 + spec.epsilon))),
        hhat_below_H1=bool(np.all(Hhat < H1)),
        alpha=spec.path.alpha,
        alpha_threshold=thr,
        alpha_binding_theta=binding,
        alpha_inequality_ok=ok,
        oracle_discrepancy=disc,
        scalar_tolerance=tol,
    )
