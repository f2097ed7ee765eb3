"""Axisymmetric metrics f(θ)²dθ² + h(θ)²dφ² on the 2-sphere.

Fields are sampled on a uniform colatitude grid including both poles.
Derivatives use sixth-order central differences with parity reflection across
the poles (f and axisymmetric scalars are even there, h is odd), so every
stencil is centred. Integrals use Clenshaw-Curtis weights in x = cos θ, which
are spectrally accurate on exactly this grid.
"""

from dataclasses import dataclass, field
import json
from pathlib import Path

import numpy as np

from .errors import DegenerateGrid, GridMismatch, InvalidMetric
from .fd import diff_parity

FD_ACCURACY = 6
MIN_POINTS = 33
CLOSURE_TOL = 1e-6
QUADRATURE = "clenshaw-curtis in cos(theta)"


def _check_grid(theta):
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or len(theta) < MIN_POINTS:
        raise InvalidMetric(f"theta grid needs at least {MIN_POINTS} points")
    if abs(theta[0]) > 1e-12 or abs(theta[-1] - np.pi) > 1e-12:
        raise InvalidMetric("theta grid must span [0, pi] including both poles")
    d = np.diff(theta)
    if np.any(d <= 0):
        raise InvalidMetric("theta grid not strictly increasing", np.nonzero(d <= 0)[0])
    step = np.pi / (len(theta) - 1)
    bad = np.nonzero(np.abs(d - step) > 1e-9 * step)[0]
    if len(bad):
        raise InvalidMetric("theta grid is not uniform", bad)
    return theta


def uniform_grid(n=129):
    return np.linspace(0.0, np.pi, n)


@dataclass(frozen=True)
class SurfaceField:
    values: np.ndarray
    units: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(v)):
            raise InvalidMetric("non-finite field values", np.nonzero(~np.isfinite(v))[0])
        object.__setattr__(self, "values", v)

    def __len__(self):
        return len(self.values)


def _values(x):
    return x.values if isinstance(x, SurfaceField) else np.asarray(x, dtype=float)


@dataclass(frozen=True)
class AxisymmetricMetric:
    theta: np.ndarray
    f: np.ndarray
    h: np.ndarray
    closure_tol: float = CLOSURE_TOL
    pole_closure: tuple = field(init=False, default=(np.nan, np.nan))

    def __post_init__(self):
        theta = _check_grid(self.theta)
        f = np.asarray(self.f, dtype=float).copy()
        h = np.asarray(self.h, dtype=float).copy()
        if f.shape != theta.shape or h.shape != theta.shape:
            raise GridMismatch("f, h and theta must have the same length")
        bad = np.nonzero(~(np.isfinite(f) & np.isfinite(h)))[0]
        if len(bad):
            raise InvalidMetric("non-finite metric samples", bad)
        bad = np.nonzero(f <= 0)[0]
        if len(bad):
            raise InvalidMetric("f must be positive", bad)
        bad = np.nonzero(h[1:-1] <= 0)[0] + 1
        if len(bad):
            raise InvalidMetric("h must be positive away from the poles", bad)
        scale = np.max(h)
        for i in (0, len(h) - 1):
            if abs(h[i]) > 1e-12 * scale:
                raise InvalidMetric("h must vanish at the poles", [i])
        h[0] = h[-1] = 0.0
        dh = diff_parity(h, theta[1] - theta[0], 1, FD_ACCURACY, parity=-1)
        closure = (dh[0], dh[-1])
        bad = [i for i, target in ((0, f[0]), (len(f) - 1, -f[-1]))
               if abs(dh[i] - target) > self.closure_tol * f[i]]
        if bad:
            raise InvalidMetric("metric is not smooth across the pole (h' != +-f)", bad)
        for name, arr in (("theta", theta), ("f", f), ("h", h)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "pole_closure", closure)

    @classmethod
    def from_functions(cls, f, h, n=129):
        theta = uniform_grid(n)
        hv = np.asarray(h(theta), dtype=float) * np.ones_like(theta)
        hv[0] = hv[-1] = 0.0
        return cls(theta, np.asarray(f(theta), dtype=float) * np.ones_like(theta), hv)

    @classmethod
    def round(cls, radius=1.0, n=129):
        return cls.from_functions(lambda t: radius * np.ones_like(t),
                                  lambda t: radius * np.sin(t), n)

    @property
    def n(self):
        return len(self.theta)

    @property
    def spacing(self):
        return self.theta[1] - self.theta[0]

    @property
    def resolution(self):
        return {"n_theta": self.n, "grid": "uniform", "fd_accuracy": FD_ACCURACY,
                "quadrature": QUADRATURE}

    def scaled(self, lam):
        """The metric lam² g."""
        return AxisymmetricMetric(self.theta, lam * self.f, lam * self.h, self.closure_tol)

    def area_radius(self):
        return float(np.sqrt(area(self) / (4 * np.pi)))

    def to_dict(self):
        return {"theta": self.theta.tolist(), "f": self.f.tolist(), "h": self.h.tolist()}


def _same_grid(metric, field_values):
    if len(field_values) != metric.n:
        raise GridMismatch(f"field has {len(field_values)} samples, metric has {metric.n}")


def _d(values, metric, deriv, parity):
    return diff_parity(values, metric.spacing, deriv, FD_ACCURACY, parity)


def gaussian_curvature(metric):
    """K = -(1/(f h)) d/dθ (h'/f), with the pole limit taken by L'Hopital."""
    f, h = metric.f, metric.h
    dh = _d(h, metric, 1, -1)
    q = dh / f
    dq = _d(q, metric, 1, 1)
    K = np.empty_like(f)
    K[1:-1] = -dq[1:-1] / (f[1:-1] * h[1:-1])
    d2q = _d(q, metric, 2, 1)
    for i in (0, -1):
        K[i] = -d2q[i] / (f[i] * dh[i])
    if not np.all(np.isfinite(K)):
        raise DegenerateGrid("non-finite curvature estimate")
    return SurfaceField(K, "1/length^2")


def scalar_curvature(metric):
    return SurfaceField(2.0 * gaussian_curvature(metric).values, "1/length^2")


def laplace_beltrami(metric, u):
    """Δu = (1/(f h)) d/dθ ((h/f) u') for an axisymmetric function u."""
    u = _values(u)
    _same_grid(metric, u)
    f, h = metric.f, metric.h
    p = (h / f) * _d(u, metric, 1, 1)
    dp = _d(p, metric, 1, 1)
    out = np.empty_like(u)
    out[1:-1] = dp[1:-1] / (f[1:-1] * h[1:-1])
    d2p = _d(p, metric, 2, 1)
    dh = _d(h, metric, 1, -1)
    for i in (0, -1):
        out[i] = d2p[i] / (f[i] * dh[i])
    return SurfaceField(out)


def _cc_weights(n_intervals):
    # Clenshaw-Curtis weights on x_j = cos(j pi / N), j = 0..N
    N = n_intervals
    th = np.pi * np.arange(N + 1) / N
    w = np.zeros(N + 1)
    v = np.ones(N - 1)
    ii = slice(1, N)
    if N % 2 == 0:
        w[0] = w[N] = 1.0 / (N**2 - 1)
        for k in range(1, N // 2):
            v -= 2 * np.cos(2 * k * th[ii]) / (4 * k**2 - 1)
        v -= np.cos(N * th[ii]) / (N**2 - 1)
    else:
        w[0] = w[N] = 1.0 / N**2
        for k in range(1, (N - 1) // 2 + 1):
            v -= 2 * np.cos(2 * k * th[ii]) / (4 * k**2 - 1)
    w[ii] = 2 * v / N
    return w


_CC_CACHE = {}


def _weights(metric):
    n = metric.n
    if n not in _CC_CACHE:
        _CC_CACHE[n] = _cc_weights(n - 1)
    return _CC_CACHE[n]


def integrate(metric, u):
    """∫_Σ u dA = ∫ 2π f h u dθ, integrated as a function of cos θ."""
    u = _values(u)
    _same_grid(metric, u)
    f, h, th = metric.f, metric.h, metric.theta
    # h / sin θ is smooth; at the poles it tends to f by the closure condition
    ratio = np.empty_like(h)
    ratio[1:-1] = h[1:-1] / np.sin(th[1:-1])
    ratio[0], ratio[-1] = f[0], f[-1]
    return float(np.dot(_weights(metric), 2 * np.pi * f * ratio * u))


def area(metric):
    return integrate(metric, np.ones(metric.n))


@dataclass(frozen=True)
class NormReport:
    c0: float
    c1: float
    c2: float
    holder: float
    tau: float

    @property
    def c2_total(self):
        return self.c0 + self.c1 + self.c2

    @property
    def c2_tau_total(self):
        return self.c0 + self.c1 + self.c2 + self.holder

    def to_dict(self):
        return {"c0": self.c0, "c1": self.c1, "c2": self.c2, "holder": self.holder,
                "tau": self.tau, "c2_tau_total": self.c2_tau_total}


def holder_seminorm(theta, values, tau):
    values = np.atleast_2d(values)
    dt = np.abs(theta[:, None] - theta[None, :])
    np.fill_diagonal(dt, 1.0)
    best = 0.0
    for row in values:
        q = np.abs(row[:, None] - row[None, :]) / dt**tau
        best = max(best, float(q.max()))
    return best


def c2tau_distance(a, b, tau=0.5):
    """Discrete C^{2,τ} size of a - b.

    Metrics are compared through their tensor components f² and h²; fields
    directly. Derivatives are coordinate θ-derivatives on the grid.
    """
    if isinstance(a, AxisymmetricMetric) != isinstance(b, AxisymmetricMetric):
        raise TypeError("cannot compare a metric with a field")
    if isinstance(a, AxisymmetricMetric):
        if a.n != b.n or not np.allclose(a.theta, b.theta, rtol=0, atol=1e-14):
            raise GridMismatch("metrics live on different grids")
        diffs = np.array([a.f**2 - b.f**2, a.h**2 - b.h**2])
        theta, spacing = a.theta, a.spacing
    else:
        va, vb = _values(a), _values(b)
        if va.shape != vb.shape:
            raise GridMismatch("fields have different lengths")
        diffs = np.atleast_2d(va - vb)
        theta = uniform_grid(va.shape[-1])
        spacing = theta[1] - theta[0]
    d1 = diff_parity(diffs, spacing, 1, FD_ACCURACY, parity=1)
    d2 = diff_parity(diffs, spacing, 2, FD_ACCURACY, parity=1)
    return NormReport(
        c0=float(np.abs(diffs).max()),
        c1=float(np.abs(d1).max()),
        c2=float(np.abs(d2).max()),
        holder=holder_seminorm(theta, d2, tau),
        tau=tau,
    )


@dataclass(frozen=True)
class BartnikData:
    """Surface metric g paired with a positive mean-curvature field H."""

    metric: AxisymmetricMetric
    H: SurfaceField
    tau: float = 0.5

    def __post_init__(self):
        H = self.H if isinstance(self.H, SurfaceField) else SurfaceField(self.H, "1/length")
        _same_grid(self.metric, H.values)
        bad = np.nonzero(H.values <= 0)[0]
        if len(bad):
            raise InvalidMetric("mean curvature H must be positive", bad)
        object.__setattr__(self, "H", H)

    @classmethod
    def round(cls, radius=1.0, H=None, n=129):
        H = 2.0 / radius if H is None else H
        metric = AxisymmetricMetric.round(radius, n)
        return cls(metric, SurfaceField(np.full(n, float(H)), "1/length"))

    def to_dict(self):
        d = self.metric.to_dict()
        d.update(H=self.H.values.tolist(), tau=self.tau)
        return d


def bartnik_from_dict(doc):
    missing = [k for k in ("theta", "f", "h", "H") if k not in doc]
    if missing:
        raise InvalidMetric(f"Bartnik-data document missing keys {missing}")
    metric = AxisymmetricMetric(np.asarray(doc["theta"], float), np.asarray(doc["f"], float),
                                np.asarray(doc["h"], float))
    return BartnikData(metric, SurfaceField(np.asarray(doc["H"], float), "1/length"),
                       float(doc.get("tau", 0.5)))


def load_bartnik(path):
    return bartnik_from_dict(json.loads(Path(path).read_text()))
