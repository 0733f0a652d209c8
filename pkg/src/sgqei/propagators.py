"""Two-point kernels of the massless 2d scalar at finite regulator.

All kernels are functions of the light-cone separations u = dt - dx and
v = dt + dx of the two points, with a fixed infrared scale mu and a
regulator eps > 0.  Complex logarithms are principal branch throughout;
the positive-frequency kernel is built factor-wise, which keeps every
identity below exact at finite eps:

  * time-ordered kernel  = step-function combination of the
    positive-frequency one (both orderings),
  * anti-time-ordered    = minus the conjugate of the time-ordered one,
  * their sum            = the symmetric (real-part) combination,
  * retarded             = real, supported inside the forward cone up to
    atan tails of width eps.

The mixed second derivative of the time-ordered kernel vanishes almost
everywhere; its distributional content on the cone is a nascent delta
exercised by the fundamental-solution tests and consumed by the series
estimators through collapsed one-dimensional integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Regulators",
    "wightman",
    "wightman_du",
    "wightman_dv",
    "feynman",
    "feynman_du",
    "feynman_dv",
    "dyson",
    "dyson_du",
    "dyson_dv",
    "retarded",
    "retarded_du",
    "retarded_dv",
    "renormalized_product",
    "bessel_k0",
    "massive_kernel",
    "massive_mass",
]

_I4PI = 1j / (4.0 * math.pi)


@dataclass(frozen=True)
class Regulators:
    """Regulator bundle shared by every kernel evaluation.

    epsilon smooths the light cone, mu sets the logarithm scale.  There
    is deliberately no field for the charge cutoff: its limit is taken
    analytically upstream (only neutral sectors are ever enumerated), so
    a numeric value would be dead weight.
    """

    epsilon: float
    mu: float = 1.0

    def __post_init__(self):
        if not self.epsilon > 0.0:
            raise ValueError("epsilon must be positive")
        if not self.mu > 0.0:
            raise ValueError("mu must be positive")


def _cross(u, v, eps):
    """(eps + i u)(eps + i v) assembled with the cone-adapted imaginary part."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return -u * v + 1j * eps * np.abs(u + v) + eps * eps


def wightman(u, v, eps: float, mu: float = 1.0):
    """Positive-frequency kernel, factor-wise principal logarithms."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return _I4PI * (np.log(mu * (eps + 1j * u)) + np.log(mu * (eps + 1j * v)))


def wightman_du(u, eps: float):
    return -1.0 / (4.0 * math.pi) / (eps + 1j * np.asarray(u, dtype=float))


def wightman_dv(v, eps: float):
    return -1.0 / (4.0 * math.pi) / (eps + 1j * np.asarray(v, dtype=float))


def feynman(u, v, eps: float, mu: float = 1.0):
    """Time-ordered kernel in closed form."""
    return _I4PI * np.log(mu * mu * _cross(u, v, eps))


def feynman_du(u, v, eps: float):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    au = -v + 1j * eps * np.sign(u + v)
    return _I4PI * au / _cross(u, v, eps)


def feynman_dv(u, v, eps: float):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    av = -u + 1j * eps * np.sign(u + v)
    return _I4PI * av / _cross(u, v, eps)


def dyson(u, v, eps: float, mu: float = 1.0):
    """Anti-time-ordered kernel: minus the conjugate of the time-ordered one."""
    return _I4PI * np.log(mu * mu * np.conj(_cross(u, v, eps)))


def dyson_du(u, v, eps: float):
    return -np.conj(feynman_du(u, v, eps))


def dyson_dv(u, v, eps: float):
    return -np.conj(feynman_dv(u, v, eps))


def retarded(u, v, eps: float):
    """Retarded propagator; real, mu-independent."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    step = np.where(u + v > 0.0, 1.0, np.where(u + v < 0.0, 0.0, 0.5))
    return -step / (2.0 * math.pi) * (np.arctan(u / eps) + np.arctan(v / eps))


def retarded_du(u, v, eps: float):
    """u-derivative away from the cone (the cone line carries no extra term)."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    step = np.where(u + v > 0.0, 1.0, np.where(u + v < 0.0, 0.0, 0.5))
    return -step * eps / (2.0 * math.pi) / (u * u + eps * eps)


def retarded_dv(u, v, eps: float):
    return retarded_du(v, u, eps)


def renormalized_product(kind: str, component: str, u, v, eps: float, mu: float = 1.0):
    """Renormalized product of two kernel derivatives at one point pair.

    kind is "timeordered" or "positive"; component is "uu", "vv" or "uv".
    These are the almost-everywhere closed forms; for the time-ordered
    "uv" component the cone-supported contact part is excluded here and
    handled by the series estimators.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if kind == "positive":
        if component == "uu":
            return -1.0 / (16.0 * math.pi**2) / (u - 1j * eps) ** 2
        if component == "vv":
            return -1.0 / (16.0 * math.pi**2) / (v - 1j * eps) ** 2
        if component == "uv":
            return wightman_du(u, eps) * wightman_dv(v, eps)
        raise ValueError(f"unknown component {component!r}")
    if kind == "timeordered":
        cross = _cross(u, v, eps)
        if component == "uu":
            au = -v + 1j * eps * np.sign(u + v)
            return -1.0 / (16.0 * math.pi**2) * (au / cross) ** 2
        if component == "vv":
            av = -u + 1j * eps * np.sign(u + v)
            return -1.0 / (16.0 * math.pi**2) * (av / cross) ** 2
        if component == "uv":
            return 1.0 / (16.0 * math.pi**2) / cross
        raise ValueError(f"unknown component {component!r}")
    raise ValueError(f"unknown kind {kind!r}")


def massive_mass(lam: float) -> float:
    """Mass parameter of the auxiliary massive kernel for cutoff lam."""
    return 2.0 * lam * math.exp(-np.euler_gamma)


def _bessel_k0(z):
    """Modified Bessel K0 for complex z with Re z >= 0.

    Power series below |z| = 9 (accuracy limited there by the log/series
    cancellation, about 1e-8 relative at the seam), optimally truncated
    asymptotic expansion above.  Both branches are cross-validated
    against mpmath and an independent integral representation in the
    tests.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z) < 9.0
    if np.any(small):
        zs = z[small]
        q = 0.25 * zs * zs
        term = np.ones_like(zs)
        i0 = np.ones_like(zs)
        acc = np.zeros_like(zs)
        harmonic = 0.0
        for k in range(1, 60):
            term = term * q / (k * k)
            i0 = i0 + term
            harmonic += 1.0 / k
            acc = acc + term * harmonic
        out[small] = -(np.log(0.5 * zs) + np.euler_gamma) * i0 + acc
    big = ~small
    if np.any(big):
        zb = z[big]
        # sum to the smallest term; the term ratio is -(2k-1)^2 / (8 k z)
        term = np.ones_like(zb)
        series = np.ones_like(zb)
        active = np.ones(zb.shape, dtype=bool)
        prev = np.ones(zb.shape)
        for k in range(1, 60):
            term = term * (-((2 * k - 1) ** 2)) / (8.0 * k * zb)
            mag = np.abs(term)
            active &= mag < prev
            series = np.where(active, series + term, series)
            prev = mag
            if not active.any():
                break
        out[big] = np.sqrt(0.5 * math.pi / zb) * np.exp(-zb) * series
    return out


def bessel_k0(z):
    """Public wrapper keeping scalar inputs scalar."""
    arr = _bessel_k0(z)
    if np.ndim(z) == 0:
        return complex(arr[0])
    return arr


def massive_kernel(u, v, eps: float, lam: float):
    """Positive-frequency kernel of the auxiliary massive comparison field.

    Reduces to minus the massless logarithm plus a lam-dependent constant
    as lam -> 0 (up to O(lam^2 log lam)), and satisfies the massive wave
    equation away from coincidence.
    """
    m = massive_mass(lam)
    arg = m * np.sqrt((eps + 1j * np.asarray(u, dtype=float)) * (eps + 1j * np.asarray(v, dtype=float)))
    return bessel_k0(arg) / (2.0 * math.pi)
