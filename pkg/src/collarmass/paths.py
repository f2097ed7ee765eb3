"""Trace-free paths between equal-area axisymmetric metrics.

The second metric is first pulled back by the monotone colatitude map that
matches cumulative area, so both endpoints share the area density f h. The
path then keeps f_s h_s fixed and moves log f_s linearly in s, which makes
tr_{g(s)} ġ(s) vanish identically.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.fft import dst

from .errors import InvalidMetric, PositiveCurvatureLost, UnequalArea
from .fd import diff_open, diff_parity
from .surface import FD_ACCURACY, AxisymmetricMetric, area, gaussian_curvature

S_SAMPLES = 65
S_ACCURACY = 4


def _sine_coefficients(odd_values):
    # u(θ_j) = Σ_{n=1}^{N-2} b_n sin(n θ_j) on θ_j = jπ/(N-1)
    interior = odd_values[1:-1]
    return dst(interior, type=1) / (len(odd_values) - 1)


def _sine_eval(b, theta):
    n = np.arange(1, len(b) + 1)
    return np.sin(np.outer(theta, n)) @ b


def _cumulative_eval(b, theta):
    n = np.arange(1, len(b) + 1)
    return (1.0 - np.cos(np.outer(theta, n))) @ (b / n)


def area_equalize(g1, g2, rtol=1e-8):
    """Pull g2 back so that its area density f h equals that of g1 pointwise."""
    if g1.n != g2.n:
        raise InvalidMetric("metrics must share a grid")
    a1, a2 = area(g1), area(g2)
    if abs(a1 - a2) > rtol * a1:
        raise UnequalArea(f"areas differ: {a1:.12g} vs {a2:.12g}")
    theta = g1.theta
    b1 = _sine_coefficients(g1.f * g1.h)
    b2 = _sine_coefficients(g2.f * g2.h)
    bh2 = _sine_coefficients(g2.h)
    total1 = _cumulative_eval(b1, np.array([np.pi]))[0]
    total2 = _cumulative_eval(b2, np.array([np.pi]))[0]
    target = _cumulative_eval(b1, theta) * (total2 / total1)

    psi = theta.copy()
    inner = slice(1, -1)
    for _ in range(100):
        resid = _cumulative_eval(b2, psi[inner]) - target[inner]
        dens = _sine_eval(b2, psi[inner])
        step = resid / dens
        psi[inner] = np.clip(psi[inner] - step, 0.5 * psi[inner], 0.5 * (psi[inner] + np.pi))
        if np.max(np.abs(step)) < 1e-13:
            break
    else:
        raise RuntimeError("area-matching reparametrization did not converge")
    if np.any(np.diff(psi) <= 0):
        raise RuntimeError("cumulative-area map is not monotone")

    h = np.zeros_like(theta)
    h[inner] = _sine_eval(bh2, psi[inner])
    f = np.empty_like(theta)
    f[inner] = g1.f[inner] * g1.h[inner] / h[inner]
    f[0], f[-1] = g1.f[0], g1.f[-1]
    return AxisymmetricMetric(theta, f, h, g2.closure_tol)


@dataclass(frozen=True)
class TraceFreePath:
    s_grid: np.ndarray
    f: np.ndarray          # shape (S, N)
    h: np.ndarray
    gdot_tt: np.ndarray    # d/ds of f_s²
    gdot_pp: np.ndarray    # d/ds of h_s²
    speed2: np.ndarray     # |ġ|²_{g(s)}
    trace: np.ndarray      # tr_{g(s)} ġ(s)
    curvature: np.ndarray  # K(g(s))
    theta: np.ndarray

    @property
    def alpha(self):
        return 0.25 * float(np.sqrt(self.speed2.max()))

    @property
    def beta(self):
        return float(self.curvature.min())

    @property
    def trace_defect(self):
        return float(np.abs(self.trace).max())

    def metric(self, i):
        return AxisymmetricMetric(self.theta, self.f[i], self.h[i])

    @property
    def start(self):
        return self.metric(0)

    @property
    def end(self):
        return self.metric(-1)

    def scaled_velocity(self, factor):
        """Copy whose velocity field is multiplied by ``factor`` (diagnostic use)."""
        return replace(self, gdot_tt=factor * self.gdot_tt, gdot_pp=factor * self.gdot_pp,
                       speed2=factor**2 * self.speed2, trace=factor * self.trace)

    def to_dict(self):
        return {
            "records": [{"s": float(s), "f": self.f[i].tolist(), "h": self.h[i].tolist()}
                        for i, s in enumerate(self.s_grid)],
            "theta": self.theta.tolist(),
            "alpha": self.alpha,
            "beta": self.beta,
            "trace_defect": self.trace_defect,
        }


def build_path(g1, g2, n_s=S_SAMPLES):
    g2e = area_equalize(g1, g2)
    s = np.linspace(0.0, 1.0, n_s)
    L = np.log(g2e.f / g1.f)
    constant = np.abs(L).max() < 1e-12    # endpoints agree to roundoff
    if constant:
        L = np.zeros_like(L)
    f = g1.f[None, :] * np.exp(np.outer(s, L))
    h = g1.h[None, :] * np.exp(-np.outer(s, L))
    if not constant:
        f[-1], h[-1] = g2e.f, g2e.h

    ds = s[1] - s[0]
    gtt = diff_open(f**2, ds, 1, S_ACCURACY, axis=0)
    gpp = diff_open(h**2, ds, 1, S_ACCURACY, axis=0)
    rt = gtt / f**2
    rp = np.empty_like(rt)
    rp[:, 1:-1] = gpp[:, 1:-1] / h[:, 1:-1] ** 2
    # at the poles ġ_φφ / h² tends to d/ds(h_θ²) / h_θ²
    h_theta = diff_parity(h, g1.spacing, 1, FD_ACCURACY, parity=-1, axis=1)
    pole_rate = diff_open(h_theta[:, [0, -1]] ** 2, ds, 1, S_ACCURACY, axis=0)
    rp[:, [0, -1]] = pole_rate / h_theta[:, [0, -1]] ** 2
    if constant:
        # stencil weights do not sum to zero exactly; a constant path has no velocity
        for a in (gtt, gpp, rt, rp):
            a[:] = 0.0

    K = np.array([gaussian_curvature(AxisymmetricMetric(g1.theta, f[i], h[i])).values
                  for i in range(n_s)])
    i, j = np.unravel_index(np.argmin(K), K.shape)
    if K[i, j] <= 0:
        raise PositiveCurvatureLost(s[i], g1.theta[j], K[i, j])

    return TraceFreePath(s_grid=s, f=f, h=h, gdot_tt=gtt, gdot_pp=gpp,
                         speed2=rt**2 + rp**2, trace=rt + rp, curvature=K, theta=g1.theta)


def path_constants(path):
    return path.alpha, path.beta
