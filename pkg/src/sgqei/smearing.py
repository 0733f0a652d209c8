"""Smearing windows along the worldline and 2d adiabatic cutoffs.

Worldline windows support values, derivatives up to third order, a few
exact integrals, and sampling from the density proportional to their
absolute value (used by the importance-sampled estimators).  The default
window is the amplitude-one Gaussian with unit width centered at zero.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad

__all__ = [
    "GaussianWindow",
    "BumpWindow",
    "SquaredWindow",
    "TruncationWindow",
    "Gaussian2D",
    "Bump2D",
    "Plateau2D",
]

_SQRT2PI = math.sqrt(2.0 * math.pi)


class GaussianWindow:
    """amplitude * exp(-(tau - center)^2 / (2 sigma^2))."""

    def __init__(self, sigma: float = 1.0, center: float = 0.0, amplitude: float = 1.0):
        if sigma <= 0.0:
            raise ValueError("sigma must be positive")
        self.sigma = sigma
        self.center = center
        self.amplitude = amplitude

    def __call__(self, tau):
        s = (np.asarray(tau, dtype=float) - self.center) / self.sigma
        return self.amplitude * np.exp(-0.5 * s * s)

    def deriv(self, tau, order: int = 1):
        s = (np.asarray(tau, dtype=float) - self.center) / self.sigma
        f = self.amplitude * np.exp(-0.5 * s * s)
        if order == 0:
            return f
        if order == 1:
            return -s / self.sigma * f
        if order == 2:
            return (s * s - 1.0) / self.sigma**2 * f
        if order == 3:
            return (3.0 * s - s**3) / self.sigma**3 * f
        raise ValueError("derivatives available up to order 3")

    def l1_norm(self) -> float:
        return abs(self.amplitude) * self.sigma * _SQRT2PI

    def l2_norm_sq(self) -> float:
        """Integral of f^2."""
        return self.amplitude**2 * self.sigma * math.sqrt(math.pi)

    def deriv_l2_sq(self) -> float:
        """Integral of f'^2."""
        return self.amplitude**2 * math.sqrt(math.pi) / (2.0 * self.sigma)

    def fourier(self, p):
        """Continuous transform with kernel exp(-i p tau)."""
        p = np.asarray(p, dtype=float)
        mag = self.amplitude * self.sigma * _SQRT2PI * np.exp(-0.5 * self.sigma**2 * p * p)
        return mag * np.exp(-1j * p * self.center)

    def sample(self, rng: np.random.Generator, n: int):
        return rng.normal(self.center, self.sigma, size=n)

    def pdf(self, tau):
        s = (np.asarray(tau, dtype=float) - self.center) / self.sigma
        return np.exp(-0.5 * s * s) / (self.sigma * _SQRT2PI)

    def support(self) -> tuple[float, float]:
        # effective support for grid-based consumers
        return self.center - 10.0 * self.sigma, self.center + 10.0 * self.sigma


def _bump_log_derivs(s):
    """Derivatives of g(s) = -1/(1-s^2) for |s| < 1, orders 1..3."""
    q = 1.0 - s * s
    g1 = -2.0 * s / q**2
    g2 = -(2.0 + 6.0 * s * s) / q**3
    g3 = -24.0 * s * (1.0 + s * s) / q**4
    return g1, g2, g3


class BumpWindow:
    """Smooth window amplitude * exp(1 - 1/(1-s^2)) on (lo, hi), zero outside."""

    def __init__(self, lo: float = -3.0, hi: float = 3.0, amplitude: float = 1.0):
        if hi <= lo:
            raise ValueError("need hi > lo")
        self.lo = lo
        self.hi = hi
        self.amplitude = amplitude
        self._mid = 0.5 * (lo + hi)
        self._half = 0.5 * (hi - lo)
        self._grid = np.linspace(lo, hi, 4001)
        vals = np.abs(self.__call__(self._grid))
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(self._grid))])
        self._l1 = float(cdf[-1])
        self._cdf = cdf / self._l1

    def _s(self, tau):
        return (np.asarray(tau, dtype=float) - self._mid) / self._half

    def __call__(self, tau):
        s = self._s(tau)
        out = np.zeros_like(s)
        inside = np.abs(s) < 1.0
        si = s[inside] if s.ndim else (s if inside else None)
        if s.ndim == 0:
            if inside:
                out = self.amplitude * math.exp(1.0 - 1.0 / (1.0 - float(s) ** 2))
            return float(out)
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - si * si))
        return out

    def deriv(self, tau, order: int = 1):
        s = self._s(tau)
        scalar = s.ndim == 0
        s = np.atleast_1d(s)
        out = np.zeros_like(s)
        inside = np.abs(s) < 1.0
        si = s[inside]
        f = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - si * si))
        g1, g2, g3 = _bump_log_derivs(si)
        h = 1.0 / self._half
        if order == 0:
            out[inside] = f
        elif order == 1:
            out[inside] = f * g1 * h
        elif order == 2:
            out[inside] = f * (g1 * g1 + g2) * h * h
        elif order == 3:
            out[inside] = f * (g1**3 + 3.0 * g1 * g2 + g3) * h**3
        else:
            raise ValueError("derivatives available up to order 3")
        return float(out[0]) if scalar else out

    def l1_norm(self) -> float:
        return self._l1

    def l2_norm_sq(self) -> float:
        val, _ = quad(lambda t: self.__call__(t) ** 2, self.lo, self.hi)
        return val

    def deriv_l2_sq(self) -> float:
        val, _ = quad(lambda t: self.deriv(t, 1) ** 2, self.lo, self.hi, limit=200)
        return val

    def sample(self, rng: np.random.Generator, n: int):
        return np.interp(rng.uniform(0.0, 1.0, size=n), self._cdf, self._grid)

    def pdf(self, tau):
        return np.abs(self.__call__(tau)) / self._l1

    def support(self) -> tuple[float, float]:
        return self.lo, self.hi


class SquaredWindow:
    """The square of a window, with exact derivatives and sampling.

    Squaring a Gaussian yields another Gaussian (width / sqrt(2)), which
    keeps sampling exact; other windows fall back to grid inversion.
    """

    def __init__(self, base):
        self.base = base

    def __call__(self, tau):
        return self.base(tau) ** 2

    def deriv(self, tau, order: int = 1):
        b = self.base
        if order == 0:
            return b(tau) ** 2
        if order == 1:
            return 2.0 * b(tau) * b.deriv(tau, 1)
        if order == 2:
            return 2.0 * b.deriv(tau, 1) ** 2 + 2.0 * b(tau) * b.deriv(tau, 2)
        if order == 3:
            return 6.0 * b.deriv(tau, 1) * b.deriv(tau, 2) + 2.0 * b(tau) * b.deriv(tau, 3)
        raise ValueError("derivatives available up to order 3")

    def l1_norm(self) -> float:
        return self.base.l2_norm_sq()

    def sample(self, rng: np.random.Generator, n: int):
        if isinstance(self.base, GaussianWindow):
            return rng.normal(self.base.center, self.base.sigma / math.sqrt(2.0), size=n)
        lo, hi = self.base.support()
        grid = np.linspace(lo, hi, 4001)
        vals = self.__call__(grid)
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(grid))])
        cdf /= cdf[-1]
        return np.interp(rng.uniform(0.0, 1.0, size=n), cdf, grid)

    def pdf(self, tau):
        return self.__call__(tau) / self.l1_norm()

    def support(self) -> tuple[float, float]:
        return self.base.support()


def _phi(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0.0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def _phi_prime(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0.0
    out[pos] = np.exp(-1.0 / x[pos]) / x[pos] ** 2
    return out


def smoothstep(x):
    """phi(x) / (phi(x) + phi(1-x)): 0 for x <= 0, 1 for x >= 1."""
    a = _phi(x)
    b = _phi(1.0 - np.asarray(x, dtype=float))
    return a / (a + b)


def smoothstep_prime(x):
    x = np.asarray(x, dtype=float)
    a, b = _phi(x), _phi(1.0 - x)
    ap, bp = _phi_prime(x), _phi_prime(1.0 - x)
    return (ap * b + a * bp) / (a + b) ** 2


class TruncationWindow:
    """Compactly supported truncation chi_N of a window f.

    chi_N is 1 on [-N, N], 0 outside [-N-2, N+2], built from two
    smoothsteps over ramps of width 2 so that |chi_N'| <= 1, which gives
    |(chi_N f)'| <= |f| + |f'| pointwise.
    """

    def __init__(self, base, n_window: float):
        self.base = base
        self.n_window = float(n_window)

    def chi(self, tau):
        tau = np.asarray(tau, dtype=float)
        n = self.n_window
        return smoothstep((tau + n + 2.0) / 2.0) * smoothstep((n + 2.0 - tau) / 2.0)

    def chi_prime(self, tau):
        tau = np.asarray(tau, dtype=float)
        n = self.n_window
        up, down = (tau + n + 2.0) / 2.0, (n + 2.0 - tau) / 2.0
        return 0.5 * (
            smoothstep_prime(up) * smoothstep(down) - smoothstep(up) * smoothstep_prime(down)
        )

    def __call__(self, tau):
        return self.chi(tau) * self.base(tau)

    def deriv(self, tau, order: int = 1):
        if order == 0:
            return self.__call__(tau)
        if order != 1:
            raise ValueError("only the first derivative is provided")
        return self.chi_prime(tau) * self.base(tau) + self.chi(tau) * self.base.deriv(tau, 1)

    def deriv_l2_sq(self) -> float:
        n = self.n_window
        val, _ = quad(lambda t: self.deriv(t, 1) ** 2, -n - 2.0, n + 2.0, limit=400)
        return val

    def support(self) -> tuple[float, float]:
        return -self.n_window - 2.0, self.n_window + 2.0


class Gaussian2D:
    """Separable Gaussian cutoff g0 exp(-t^2/(2 s0^2) - x^2/(2 s1^2))."""

    def __init__(self, sigma0: float = 2.0, sigma1: float = 2.0, amplitude: float = 1.0):
        if sigma0 <= 0.0 or sigma1 <= 0.0:
            raise ValueError("widths must be positive")
        self.sigma0 = sigma0
        self.sigma1 = sigma1
        self.amplitude = amplitude

    def __call__(self, t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.exp(
            -0.5 * (t / self.sigma0) ** 2 - 0.5 * (x / self.sigma1) ** 2
        )

    def l1_norm(self) -> float:
        return abs(self.amplitude) * 2.0 * math.pi * self.sigma0 * self.sigma1

    def sample(self, rng: np.random.Generator, n: int):
        t = rng.normal(0.0, self.sigma0, size=n)
        x = rng.normal(0.0, self.sigma1, size=n)
        return t, x

    def pdf(self, t, x):
        return (
            np.exp(-0.5 * (np.asarray(t) / self.sigma0) ** 2 - 0.5 * (np.asarray(x) / self.sigma1) ** 2)
            / (2.0 * math.pi * self.sigma0 * self.sigma1)
        )


class Bump2D:
    """Product of two bump windows, compact support, three derivatives."""

    def __init__(self, t_lo: float, t_hi: float, x_lo: float, x_hi: float, amplitude: float = 1.0):
        self.ft = BumpWindow(t_lo, t_hi, 1.0)
        self.fx = BumpWindow(x_lo, x_hi, 1.0)
        self.amplitude = amplitude

    def __call__(self, t, x):
        return self.amplitude * self.ft(t) * self.fx(x)

    def partial(self, t, x, dt: int, dx: int):
        """Mixed partial derivative of order (dt, dx), each <= 3."""
        return self.amplitude * self.ft.deriv(t, dt) * self.fx.deriv(x, dx)

    def support(self) -> tuple[float, float, float, float]:
        return self.ft.lo, self.ft.hi, self.fx.lo, self.fx.hi


class Plateau2D:
    """Flat cutoff: amplitude inside a rectangle, bump-ramped to zero.

    Constant on [t0+r, t1-r] x [x0+r, x1-r], supported on the full
    rectangle; the ramps are smoothsteps of width r.
    """

    def __init__(self, t0: float, t1: float, x0: float, x1: float, ramp: float, amplitude: float = 1.0):
        if t1 - t0 <= 2 * ramp or x1 - x0 <= 2 * ramp:
            raise ValueError("rectangle too small for the requested ramp")
        self.t0, self.t1, self.x0, self.x1 = t0, t1, x0, x1
        self.ramp = ramp
        self.amplitude = amplitude

    def _edge(self, y, lo, hi):
        return smoothstep((np.asarray(y, dtype=float) - lo) / self.ramp) * smoothstep(
            (hi - np.asarray(y, dtype=float)) / self.ramp
        )

    def __call__(self, t, x):
        return self.amplitude * self._edge(t, self.t0, self.t1) * self._edge(x, self.x0, self.x1)

    def support(self) -> tuple[float, float, float, float]:
        return self.t0, self.t1, self.x0, self.x1
