"""Mass diagnostics and the collar-to-horizon upper bound U(g, H).

U is not the Bartnik mass. It is the smallest horizon mass r1/2 reachable by
a Schwarzschild-profile collar that starts at (g, H), ends on a round sphere
of radius r1 and has positive scalar curvature on the grid. Every report
names it as such.
"""

import csv
import io
import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .collar import (CollarCertificate, build_collar, certify, make_collar,
                     path_curvature_terms, schwarzschild_radius)
from .errors import (CollarMassError, NoDeltaFound, PreconditionFailed,
                     SearchExhausted)
from .paths import build_path
from .surface import (AxisymmetricMetric, BartnikData, SurfaceField, area, c2tau_distance,
                      integrate, laplace_beltrami, scalar_curvature)

BOUND_LABEL = "collar-to-horizon upper bound U (not the Bartnik infimum)"


def _H(data):
    return data.H.values


def convexity_margin(data):
    """min of R(g) - 2HΔ(1/H) - H²/2 over the grid."""
    H = _H(data)
    R = scalar_curvature(data.metric).values
    lap = laplace_beltrami(data.metric, 1.0 / H).values
    return float(np.min(R - 2 * H * lap - 0.5 * H**2))


def horizon_condition_margin(data, literal=False):
    """min of R(g) - 2HΔ(1/H), the hypothesis the horizon bound needs.

    ``literal=True`` drops the H factor; that variant is not scale invariant
    (its two terms scale as λ⁻² and λ⁻¹) and is only reported.
    """
    H = _H(data)
    R = scalar_curvature(data.metric).values
    lap = laplace_beltrami(data.metric, 1.0 / H).values
    return float(np.min(R - 2 * lap if literal else R - 2 * H * lap))


def hawking_mass(data):
    A = area(data.metric)
    return float(math.sqrt(A / (16 * math.pi)) * (1 - integrate(data.metric, _H(data) ** 2) / (16 * math.pi)))


def scale_data(data, lam):
    """(λ²g, H/λ)."""
    if not lam > 0:
        raise ValueError("scale factor must be positive")
    return BartnikData(data.metric.scaled(lam), SurfaceField(_H(data) / lam, data.H.units), data.tau)


@dataclass(frozen=True)
class BoundOptions:
    """Search box in units of the area radius r0."""

    m_min: float = -100.0
    m_max: float = 0.49
    m_small: float = 1e-3
    n_m_negative: int = 24
    n_m_positive: int = 16
    k_min: float = 1e-4
    k_max: float = 10.0
    n_k: int = 81
    refine: int = 2
    refine_points: int = 9
    n_s: int = 65
    check_hypothesis: bool = False

    def m_grid(self):
        neg = -np.logspace(np.log10(-self.m_min), np.log10(self.m_small), self.n_m_negative)
        pos = np.logspace(np.log10(self.m_small), np.log10(self.m_max), self.n_m_positive)
        return np.concatenate([neg, [0.0], pos])

    def k_grid(self):
        return np.logspace(np.log10(self.k_min), np.log10(self.k_max), self.n_k)

    def to_dict(self):
        return dict(self.__dict__)


@dataclass(frozen=True)
class MassReport:
    area_radius: float
    convexity_margin: float
    horizon_condition_margin: float
    literal_condition_margin: float
    hawking_mass: float
    upper_bound: float
    bound_parameters: dict
    certificate: Optional[CollarCertificate]
    label: str = BOUND_LABEL
    hypothesis_flag: Optional[bool] = None

    def to_dict(self):
        return {
            "label": self.label,
            "area_radius": self.area_radius,
            "convexity_margin": self.convexity_margin,
            "horizon_condition_margin": self.horizon_condition_margin,
            "literal_condition_margin": self.literal_condition_margin,
            "hawking_mass": self.hawking_mass,
            "upper_bound": self.upper_bound,
            "bound_parameters": self.bound_parameters,
            "bound_below_area_mass": self.hypothesis_flag,
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }


class _Feasibility:
    """Sign of min over (s, x) of v²R(γ)/r0² for the normalized data (r0 = 1)."""

    def __init__(self, Q, H, speed2, s_grid):
        self.Q, self.s = Q, s_grid
        self.a = 0.5 * H[None, :] ** 2
        self.b = (H[None, :] ** 2 / 16.0) * speed2
        self.Qmin = float(Q.min())
        self.moving = bool(np.any(speed2 > 0))

    def values(self, m, ks):
        c = 1.0 / (1.0 - 2.0 * m)
        ks = np.atleast_1d(np.asarray(ks, dtype=float))
        base = (self.Q - c * self.a).min()
        if not self.moving:
            return np.full(ks.shape, float(base))
        w = (schwarzschild_radius(m, 1.0, np.outer(ks, self.s)) / ks[:, None]) ** 2
        out = np.empty(ks.shape)
        for i in range(len(ks)):
            out[i] = (self.Q - c * self.a - c * w[i][:, None] * self.b).min()
        return out

    def value(self, m, k):
        return float(self.values(m, [k])[0])

    def smallest_k(self, m, ks):
        """Smallest feasible k on the grid, sharpened by bisection; None if none."""
        vals = self.values(m, ks)
        ok = np.nonzero(vals > 0)[0]
        if len(ok) == 0:
            return None
        j = ok[0]
        if j == 0:
            return float(ks[0])
        lo, hi = float(ks[j - 1]), float(ks[j])
        for _ in range(64):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if self.value(m, mid) > 0:
                hi = mid
            else:
                lo = mid
        return hi


def _search(feas, opts):
    ks = opts.k_grid()

    def radius(m):
        k = feas.smallest_k(m, ks)
        return (np.inf, None) if k is None else (float(schwarzschild_radius(m, 1.0, k)), k)

    ms = opts.m_grid()
    results = [radius(m) for m in ms]
    for _ in range(opts.refine):
        r = np.array([x[0] for x in results])
        if not np.isfinite(r).any():
            break
        j = int(np.argmin(r))
        lo, hi = ms[max(j - 1, 0)], ms[min(j + 1, len(ms) - 1)]
        ms = np.linspace(lo, hi, opts.refine_points)
        results = [radius(m) for m in ms]
    r = np.array([x[0] for x in results])
    if not np.isfinite(r).any():
        raise SearchExhausted(
            f"no feasible (m, k) in m/r0 in [{opts.m_min}, {opts.m_max}], "
            f"k/r0 in [{opts.k_min}, {opts.k_max}]")
    j = int(np.argmin(r))
    return float(ms[j]), results[j][1], results[j][0]


def upper_bound_mass(data, options=None, with_certificate=True):
    """U(g, H): half the smallest reachable horizon radius."""
    opts = options or BoundOptions()
    H = _H(data)
    margin = horizon_condition_margin(data)
    if margin <= 0 or np.any(H <= 0):
        raise PreconditionFailed(f"R(g) - 2HΔ(1/H) > 0 fails (margin {margin:.3e})")
    r0 = data.metric.area_radius()
    norm = scale_data(data, 1.0 / r0)
    target = AxisymmetricMetric.round(1.0, data.metric.n)
    path = build_path(norm.metric, target, opts.n_s)
    Q = path_curvature_terms(path, _H(norm))
    feas = _Feasibility(Q, _H(norm), path.speed2, path.s_grid)
    m, k, r1 = _search(feas, opts)

    cert = None
    if with_certificate:
        spec = make_collar(norm, path, m, k, Q=Q, mass_rule="horizon-search")
        cert = certify(spec, with_oracle=False)
    bound = 0.5 * r1 * r0
    flag = bool(bound <= 0.5 * r0) if opts.check_hypothesis else None
    return MassReport(
        area_radius=r0,
        convexity_margin=convexity_margin(data),
        horizon_condition_margin=margin,
        literal_condition_margin=horizon_condition_margin(data, literal=True),
        hawking_mass=hawking_mass(data),
        upper_bound=bound,
        bound_parameters={"m": m * r0, "k": k * r0, "epsilon": r1 - 1.0, "r1": r1 * r0,
                          "feasibility_slack": feas.value(m, k)},
        certificate=cert,
        hypothesis_flag=flag,
    )


def cmc_comparison_bound(data, options=None):
    """U evaluated at the constant field min H, reported as a bound for (g, H)."""
    Hmin = float(_H(data).min())
    const = BartnikData(data.metric, SurfaceField(np.full(data.metric.n, Hmin), data.H.units), data.tau)
    return replace(upper_bound_mass(const, options), label="CMC comparison: " + BOUND_LABEL)


# perturbations ---------------------------------------------------------------

N_MODES = 6


@dataclass(frozen=True)
class PerturbationShape:
    """Unit-amplitude Fourier bumps for f, h (jointly) and H."""

    u: np.ndarray   # cos coefficients, modes 1..6, in log f and log h
    w: np.ndarray   # cos coefficients of the sin²θ-damped extra term in log h
    bump: np.ndarray

    def fields(self, theta):
        n = np.arange(1, N_MODES + 1)
        C = np.cos(np.outer(theta, n))
        return C @ self.u, np.sin(theta) ** 2 * (C @ self.w), C @ self.bump


def sample_shapes(count, seed=0):
    rng = np.random.default_rng(seed)
    return [PerturbationShape(*(rng.normal(size=(3, N_MODES)) / np.arange(1, N_MODES + 1)))
            for _ in range(count)]


def apply_shape(data, shape, metric_amp, h_amp):
    """f ↦ f e^{tu}, h ↦ h e^{t(u + w)}, H ↦ H + t_H·bump; poles stay closed."""
    u, w, bump = shape.fields(data.metric.theta)
    f = data.metric.f * np.exp(metric_amp * u)
    h = data.metric.h * np.exp(metric_amp * (u + w))
    metric = AxisymmetricMetric(data.metric.theta, f, h, data.metric.closure_tol)
    return BartnikData(metric, SurfaceField(_H(data) + h_amp * bump, data.H.units), data.tau)


def perturb_to_distance(data, shape, delta, tau=0.5):
    """Perturbation whose metric C^{2,τ} and H C² distances from ``data`` both equal δ."""
    if delta == 0:
        return data
    _, _, bump = shape.fields(data.metric.theta)
    h_amp = delta / c2tau_distance(SurfaceField(bump), SurfaceField(np.zeros_like(bump)), tau).c2_total

    def dist(t):
        return c2tau_distance(apply_shape(data, shape, t, 0.0).metric, data.metric, tau).c2_tau_total

    t0, t1 = 0.0, 1e-3
    d0, d1 = 0.0, dist(t1)
    t1 = delta / d1 * t1
    d1 = dist(t1)
    for _ in range(40):
        if abs(d1 - delta) <= 1e-10 * delta or d1 == d0:
            break
        t0, t1, d0 = t1, t1 - (d1 - delta) * (t1 - t0) / (d1 - d0), d1
        d1 = dist(t1)
    return apply_shape(data, shape, t1, h_amp)


def equalize_area(metric, reference):
    lam = math.sqrt(area(reference) / area(metric))
    return metric.scaled(lam)


# neighbourhoods and continuity ----------------------------------------------

@dataclass(frozen=True)
class NeighborhoodCertificate:
    delta: float
    epsilon: float
    pairs: int
    worst_margin: float
    worst_alpha_slack: float
    worst_min_R: float
    history: list = field(default_factory=list)
    kind: str = "sampled (non-rigorous)"

    def to_dict(self):
        return dict(self.__dict__)


def _pair_ok(base, shape1, shape2, delta, epsilon):
    try:
        d1 = perturb_to_distance(base, shape1, delta)
        g2 = equalize_area(perturb_to_distance(base, shape2, delta).metric, d1.metric)
        spec = build_collar(d1, g2, epsilon)
    except CollarMassError:
        return False, None
    cert = certify(spec, with_oracle=False)
    ok = cert.valid and cert.strict and bool(cert.alpha_inequality_ok)
    return ok, cert


def neighborhood_certificate(data0, epsilon, pairs=64, delta0=1.0, floor=1e-6, seed=0):
    """Largest δ on the halving ladder for which every sampled pair gives a valid collar."""
    if convexity_margin(data0) <= 0:
        raise PreconditionFailed("convexity margin of the base data is not positive")
    shapes = sample_shapes(2 * pairs, seed)
    delta = delta0
    history = []
    while delta >= floor:
        certs, ok = [], True
        for i in range(pairs):
            good, cert = _pair_ok(data0, shapes[2 * i], shapes[2 * i + 1], delta, epsilon)
            if not good:
                ok = False
                break
            certs.append(cert)
        history.append((delta, ok))
        if ok:
            return NeighborhoodCertificate(
                delta=delta, epsilon=epsilon, pairs=pairs,
                worst_margin=min(c.margin for c in certs),
                worst_alpha_slack=min(c.alpha_threshold - c.alpha for c in certs),
                worst_min_R=min(c.min_scalar_curvature for c in certs),
                history=history)
        delta *= 0.5
    raise NoDeltaFound(f"no sampled neighbourhood certified down to delta={floor:g}")


@dataclass(frozen=True)
class ContinuityRow:
    delta: float
    samples: int
    max_deviation: float
    failures: int
    epsilon_used: Optional[float] = None


@dataclass(frozen=True)
class ContinuityTable:
    base_bound: float
    rows: tuple

    def __post_init__(self):
        d = [r.delta for r in self.rows]
        if any(b >= a for a, b in zip(d, d[1:])):
            raise ValueError("deltas must be strictly decreasing")

    def to_csv(self):
        buf = io.StringIO()
        out = csv.writer(buf, lineterminator="\n")
        out.writerow(["delta", "samples", "max_deviation", "failures"])
        for r in self.rows:
            out.writerow([repr(r.delta), r.samples, repr(r.max_deviation), r.failures])
        return buf.getvalue()

    def scaled(self, lam):
        return ContinuityTable(lam * self.base_bound,
                               tuple(replace(r, delta=r.delta, max_deviation=lam * r.max_deviation)
                                     for r in self.rows))


def continuity_sweep(data0, deltas, samples_per_delta=32, seed=0, options=None):
    """max |U(sample) - U(data0)| for samples at distance δ, per δ."""
    if convexity_margin(data0) <= 0:
        raise PreconditionFailed("convexity margin of the base data is not positive")
    deltas = sorted(set(float(d) for d in deltas), reverse=True)
    base = upper_bound_mass(data0, options, with_certificate=False).upper_bound
    area0 = area(data0.metric)
    shapes = sample_shapes(samples_per_delta, seed)
    rows = []
    for delta in deltas:
        devs, failures = [], 0
        for shape in (shapes if delta > 0 else shapes[:1]):
            sample = perturb_to_distance(data0, shape, delta)
            zeta = area0 / area(sample.metric)
            lam = math.sqrt(zeta)
            try:
                u = upper_bound_mass(scale_data(sample, lam), options,
                                     with_certificate=False).upper_bound / lam
            except CollarMassError:
                failures += 1
                continue
            devs.append(abs(u - base))
        rows.append(ContinuityRow(delta, samples_per_delta if delta > 0 else 1,
                                  max(devs) if devs else float("nan"), failures))
    return ContinuityTable(base, tuple(rows))
