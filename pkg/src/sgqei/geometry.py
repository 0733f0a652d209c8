"""Timelike worldlines in 2d Minkowski space and their light-cone data.

Conventions: metric signature (-,+), light-cone coordinates of a
displacement are u = dt - dx and v = t + x evaluated per point,
so u(z) = z0 - z1 and v(z) = z0 + z1.  All worldlines are parametrized
by proper time tau with unit future-directed velocity, which makes
both u(z(tau)) and v(z(tau)) strictly increasing.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

__all__ = [
    "Frame",
    "Worldline",
    "StaticLine",
    "BoostedLine",
    "AcceleratedLine",
    "TabulatedLine",
    "lightcone_pair_contraction",
]


@dataclass(frozen=True)
class Frame:
    """Velocity frame at one point of a worldline.

    a = v0 - v1 and b = v0 + v1 are the light-cone velocity components
    (a*b = 1 for a unit timelike velocity); adot, bdot their proper-time
    derivatives.  The orthogonal unit vector is w = (v1, v0).
    """

    v0: float
    v1: float
    a: float
    b: float
    adot: float
    bdot: float

    @property
    def w0(self) -> float:
        return self.v1

    @property
    def w1(self) -> float:
        return self.v0


class Worldline(ABC):
    """Unit-speed timelike curve tau -> z(tau)."""

    @abstractmethod
    def position(self, tau: float) -> tuple[float, float]:
        """Return (z0, z1) at proper time tau."""

    @abstractmethod
    def velocity1(self, tau: float) -> float:
        """Spatial velocity component v1(tau)."""

    @abstractmethod
    def accel1(self, tau: float) -> float:
        """Proper-time derivative of v1."""

    def velocity(self, tau: float) -> tuple[float, float]:
        v1 = self.velocity1(tau)
        return math.sqrt(1.0 + v1 * v1), v1

    def frame(self, tau: float) -> Frame:
        v0, v1 = self.velocity(tau)
        vdot1 = self.accel1(tau)
        # (v0 - v1)(v0 + v1) = 1: evaluate the additive side, where no
        # cancellation happens, and take the reciprocal for the other,
        # which stays accurate at rapidities where the naive difference
        # loses every digit.
        if v1 >= 0.0:
            b = v0 + v1
            a = 1.0 / b
        else:
            a = v0 - v1
            b = 1.0 / a
        # adot/bdot follow from v0 dot = v1 vdot1 / v0.
        adot = -vdot1 * a / v0
        bdot = vdot1 * b / v0
        return Frame(v0=v0, v1=v1, a=a, b=b, adot=adot, bdot=bdot)

    def u_of_tau(self, tau: float) -> float:
        z0, z1 = self.position(tau)
        return z0 - z1

    def v_of_tau(self, tau: float) -> float:
        z0, z1 = self.position(tau)
        return z0 + z1

    def tau_of_u(self, u: float) -> float:
        return _invert_increasing(self.u_of_tau, u)

    def tau_of_v(self, v: float) -> float:
        return _invert_increasing(self.v_of_tau, v)

    def tau_of_t(self, t: float) -> float:
        """Proper time at which the curve crosses coordinate time t."""
        return _invert_increasing(lambda tau: self.position(tau)[0], t)


def _invert_increasing(func, target: float, tol: float = 1e-13) -> float:
    """Invert a strictly increasing scalar function by bracketed bisection.

    The bracket is grown geometrically from [-1, 1]; bisection runs to
    width tol * (1 + |target|) and two Newton steps with a central
    difference polish the root.
    """
    lo, hi = -1.0, 1.0
    span = 1.0
    while func(lo) > target:
        span *= 2.0
        lo -= span
        if span > 1e18:
            raise ValueError("inversion target below parameter range")
    while func(hi) < target:
        span *= 2.0
        hi += span
        if span > 1e18:
            raise ValueError("inversion target above parameter range")
    width = tol * (1.0 + abs(target))
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if func(mid) < target:
            lo = mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    for _ in range(2):
        h = 1e-7 * (1.0 + abs(root))
        deriv = (func(root + h) - func(root - h)) / (2.0 * h)
        if deriv > 0.0:
            root -= (func(root) - target) / deriv
    return root


class StaticLine(Worldline):
    """Inertial observer at rest at spatial position x0."""

    def __init__(self, x0: float = 0.0):
        self.x0 = x0

    def position(self, tau: float) -> tuple[float, float]:
        return tau, self.x0

    def velocity1(self, tau: float) -> float:
        return 0.0

    def accel1(self, tau: float) -> float:
        return 0.0

    def tau_of_u(self, u: float) -> float:
        return u + self.x0

    def tau_of_v(self, v: float) -> float:
        return v - self.x0

    def tau_of_t(self, t: float) -> float:
        return t


class BoostedLine(Worldline):
    """Inertial observer with constant rapidity eta through the origin."""

    def __init__(self, eta: float):
        self.eta = eta
        self._ch = math.cosh(eta)
        self._sh = math.sinh(eta)

    def position(self, tau: float) -> tuple[float, float]:
        return tau * self._ch, tau * self._sh

    def velocity1(self, tau: float) -> float:
        return self._sh

    def accel1(self, tau: float) -> float:
        return 0.0

    def tau_of_u(self, u: float) -> float:
        return u * math.exp(self.eta)

    def tau_of_v(self, v: float) -> float:
        return v * math.exp(-self.eta)

    def tau_of_t(self, t: float) -> float:
        return t / self._ch


class AcceleratedLine(Worldline):
    """Uniformly accelerated observer, proper acceleration a > 0.

    z(tau) = (sinh(a tau)/a, (cosh(a tau) - 1)/a), so the curve passes
    through the origin at tau = 0 with zero velocity.  u(z(tau)) is
    bounded above by 1/a and v(z(tau)) below by -1/a.
    """

    def __init__(self, a: float):
        if a <= 0.0:
            raise ValueError("proper acceleration must be positive")
        self.a = a

    def position(self, tau: float) -> tuple[float, float]:
        a = self.a
        return math.sinh(a * tau) / a, (math.cosh(a * tau) - 1.0) / a

    def velocity1(self, tau: float) -> float:
        return math.sinh(self.a * tau)

    def accel1(self, tau: float) -> float:
        return self.a * math.cosh(self.a * tau)

    def u_of_tau(self, tau: float) -> float:
        # (1 - exp(-a tau))/a, written to stay accurate near tau = 0
        return -math.expm1(-self.a * tau) / self.a

    def v_of_tau(self, tau: float) -> float:
        return math.expm1(self.a * tau) / self.a

    def tau_of_u(self, u: float) -> float:
        au = self.a * u
        if au >= 1.0:
            raise ValueError("u beyond the horizon of the accelerated line")
        return -math.log1p(-au) / self.a

    def tau_of_v(self, v: float) -> float:
        av = self.a * v
        if av <= -1.0:
            raise ValueError("v beyond the horizon of the accelerated line")
        return math.log1p(av) / self.a

    def tau_of_t(self, t: float) -> float:
        return math.asinh(self.a * t) / self.a


class TabulatedLine(Worldline):
    """Worldline reconstructed from samples of the spatial path x(tau).

    A cubic spline interpolates the given x samples; the time component
    is the numerically accumulated antiderivative of sqrt(1 + x'(tau)^2),
    so the velocity used everywhere is exactly unit-normalized.  Curves
    whose accumulated time component drifts from that normalization by
    more than 1e-8 (too sparse a table, or a kink) are rejected.
    """

    def __init__(self, taus: np.ndarray, xs: np.ndarray):
        taus = np.asarray(taus, dtype=float)
        xs = np.asarray(xs, dtype=float)
        if taus.ndim != 1 or taus.shape != xs.shape or taus.size < 4:
            raise ValueError("need matching 1d tables with at least 4 samples")
        if np.any(np.diff(taus) <= 0.0):
            raise ValueError("tau samples must be strictly increasing")
        self._x = CubicSpline(taus, xs)
        self._xp = self._x.derivative()
        self._xpp = self._x.derivative(2)
        # The time component accumulates sqrt(1 + x'^2) on a grid tied to
        # the table's own resolution; consistency is then checked between
        # the grid points, where interpolation error is visible.  A table
        # too coarse for its own wiggle fails the unit-speed check there.
        dense = np.linspace(taus[0], taus[-1], 16 * taus.size)
        speed = np.sqrt(1.0 + self._xp(dense) ** 2)
        self._t = CubicSpline(dense, speed).antiderivative()
        self.tau_min = float(taus[0])
        self.tau_max = float(taus[-1])
        mid = 0.5 * (dense[:-1] + dense[1:])
        tdot = self._t.derivative()(mid)
        vdotv = -(tdot**2) + self._xp(mid) ** 2
        if np.max(np.abs(vdotv + 1.0)) > 1e-8:
            raise ValueError("table too sparse for a unit-speed reconstruction")

    def position(self, tau: float) -> tuple[float, float]:
        self._check(tau)
        return float(self._t(tau)), float(self._x(tau))

    def velocity1(self, tau: float) -> float:
        self._check(tau)
        return float(self._xp(tau))

    def accel1(self, tau: float) -> float:
        self._check(tau)
        return float(self._xpp(tau))

    def _check(self, tau: float) -> None:
        if tau < self.tau_min or tau > self.tau_max:
            raise ValueError("tau outside the tabulated range")


def lightcone_pair_contraction(frame: Frame, pu: float, pv: float, qu: float, qv: float) -> float:
    """Contract two covectors with (v v + w w)/2 at one worldline point.

    Covectors are given by their light-cone components (coefficients of
    du and dv).  The mixed u-v terms cancel identically, leaving
    a^2 pu qu + b^2 pv qv.
    """
    return frame.a**2 * pu * qu + frame.b**2 * pv * qv
