"""Order-by-order evaluation of the interacting energy density.

The expansion at order n splits into neutral charge sectors labelled by
s in {-1, 0, +1}; every other sector drops out when the normal-ordering
cutoff is removed.  This module enumerates the sectors, evaluates the
pair exponential E and the linear kernel sums G / G-bar, assembles the
energy-density kernels for worldline and spacetime smearing, and
estimates the smeared terms by importance-sampled Monte Carlo with a
deterministic, thread-count-independent stream layout.

Squares of kernel derivatives at a single insertion point are never
formed numerically.  On the worldline they are replaced, under the time
integral, by second derivatives of the smearing window acting on the
kernel value plus frame-curvature terms and (for time-ordered kernels)
a contact term sampled on the cone; in the spacetime check the same
replacement happens by moving two derivatives onto the test function.
Both routes keep the full distributional content at finite epsilon, so
the epsilon ladder extrapolates cleanly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

import numpy as np
from scipy import integrate

from .propagators import (
    Regulators,
    dyson,
    dyson_du,
    dyson_dv,
    feynman,
    feynman_du,
    feynman_dv,
    renormalized_product,
    wightman,
    wightman_du,
    wightman_dv,
)

__all__ = [
    "ModelParams",
    "SeriesIndex",
    "MCConfig",
    "TermEstimate",
    "OrderOneQuadrature",
    "enumerate_sector",
    "coefficient",
    "identity_sums",
    "cal_E",
    "cal_G",
    "bar_cal_G",
    "vanishing_sum",
    "theta_worldline",
    "theta_spacetime",
    "order1_quadrature",
    "term_value",
    "conservation_check",
    "majorant",
    "majorant_odd",
    "majorant_tail",
    "fit_majorant",
]

_CHUNK = 4096
_I4PI = 1j / (4.0 * math.pi)
_POWERS_OF_I = (1.0 + 0.0j, 1.0j, -1.0 + 0.0j, -1.0j)
_GL8 = np.polynomial.legendre.leggauss(8)


@dataclass(frozen=True)
class ModelParams:
    """Coupling and adiabatic cutoff of the interaction."""

    beta: float
    g: object
    mc_default_beta_sq_cap: float = math.pi

    def __post_init__(self):
        bsq = self.beta * self.beta
        if not 0.0 < bsq < 4.0 * math.pi:
            raise ValueError("coupling must satisfy 0 < beta^2 < 4 pi")

    @property
    def beta_sq(self) -> float:
        return self.beta * self.beta


@dataclass(frozen=True)
class SeriesIndex:
    """One term of the expansion: order n, split k, and the counts l, m
    of anti-time-ordered x-points and time-ordered x-points."""

    n: int
    k: int
    l: int
    m: int

    def __post_init__(self):
        if not (0 <= self.l <= self.k <= self.n):
            raise ValueError("need 0 <= l <= k <= n")
        if not (0 <= self.m <= self.n - self.k):
            raise ValueError("need 0 <= m <= n - k")
        if self.sector not in (-1, 0, 1):
            raise ValueError("index lies in a sector that does not survive "
                             "the neutrality limit")

    @property
    def sector(self) -> int:
        return 2 * (self.l + self.m) - self.n

    @property
    def count_x(self) -> int:
        return self.l + self.m

    @property
    def count_y(self) -> int:
        return self.n - self.l - self.m

    @property
    def anti_x(self) -> int:
        return self.l

    @property
    def time_x(self) -> int:
        return self.m

    @property
    def anti_y(self) -> int:
        return self.k - self.l

    @property
    def time_y(self) -> int:
        return self.n - self.k - self.m


@dataclass(frozen=True)
class MCConfig:
    """Monte Carlo driver settings."""

    samples: int = 100_000
    seed: int = 2024
    epsilon_ladder: tuple = (1e-2, 5e-3, 2.5e-3)
    max_order: int = 4
    threads: int = 1

    def __post_init__(self):
        if self.samples <= 0:
            raise ValueError("samples must be positive")
        if len(self.epsilon_ladder) not in (1, 3):
            raise ValueError("ladder must have one rung or three halving rungs")
        if any(e <= 0.0 for e in self.epsilon_ladder):
            raise ValueError("ladder entries must be positive")
        if len(self.epsilon_ladder) == 3:
            e0, e1, e2 = self.epsilon_ladder
            if abs(e0 / e1 - 2.0) > 1e-9 or abs(e1 / e2 - 2.0) > 1e-9:
                raise ValueError("three-rung ladder must halve at each step")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")


@dataclass(frozen=True)
class TermEstimate:
    """Monte Carlo estimate of one order/sector contribution."""

    value: float
    std_error: float
    samples: int
    seed: int
    epsilon_ladder: tuple
    imag_value: float = 0.0
    imag_std_error: float = 0.0
    flagged: bool = False


def enumerate_sector(n: int, s: int):
    """All valid indices of order n in charge sector s."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    if s not in (-1, 0, 1):
        raise ValueError("sector must be -1, 0 or +1")
    out = []
    for k in range(n + 1):
        for l in range(k + 1):
            for m in range(n - k + 1):
                if 2 * (l + m) == n + s:
                    out.append(SeriesIndex(n, k, l, m))
    return out


def coefficient(idx: SeriesIndex) -> complex:
    """Exact series weight (-1)^k i^n / (l! (k-l)! m! (n-k-m)!)."""
    denom = (math.factorial(idx.l) * math.factorial(idx.k - idx.l)
             * math.factorial(idx.m) * math.factorial(idx.n - idx.k - idx.m))
    mag = float(Fraction(1, denom))
    sign = -1.0 if idx.k % 2 else 1.0
    return _POWERS_OF_I[idx.n % 4] * sign * mag


def identity_sums(n: int):
    """The two collapse sums in exact rational arithmetic.

    Returns (even, odd): the sum of 1/(l!(k-l)!(n-l)!(n-k+l)!) over the
    even-sector index range, and the shifted odd-sector analogue.  They
    equal 2^{2n}/(n!)^2 and 2^{2n+1}/(n!(n+1)!).
    """
    if not 0 <= n <= 64:
        raise ValueError("supported for 0 <= n <= 64")
    f = math.factorial
    even = Fraction(0)
    for k in range(2 * n + 1):
        for l in range(max(0, k - n), min(k, n) + 1):
            even += Fraction(1, f(l) * f(k - l) * f(n - l) * f(n - k + l))
    odd = Fraction(0)
    for k in range(2 * n + 2):
        for l in range(max(0, k - n - 1), min(k, n) + 1):
            odd += Fraction(1, f(l) * f(k - l) * f(n - l) * f(n + 1 - k + l))
    return even, odd


# ---------------------------------------------------------------------------
# point bookkeeping


def _as_points(pts, count):
    arr = np.asarray(pts, dtype=float).reshape(-1, 2)
    if arr.shape[0] != count:
        raise ValueError(f"expected {count} points, got {arr.shape[0]}")
    return arr


def _lightcone(pts):
    """(u, v) arrays from rows (t, x); leading axes preserved."""
    t = pts[..., 0]
    x = pts[..., 1]
    return t - x, t + x


def _kernel_value(kind, du, dv, eps, mu):
    if kind == "positive":
        return wightman(du, dv, eps, mu)
    return feynman(du, dv, eps, mu)


def _kernel_du(kind, du, dv, eps):
    """Derivative in the first separation argument."""
    if kind == "positive":
        return wightman_du(du, eps)
    return feynman_du(du, dv, eps)


def _kernel_dv(kind, du, dv, eps):
    if kind == "positive":
        return wightman_dv(dv, eps)
    return feynman_dv(du, dv, eps)


def _cal_e_batch(idx, ux, vx, uy, vy, eps, mu, beta_sq, state):
    """Pair exponential over batched configurations.

    ux, vx have shape (..., count_x); uy, vy shape (..., count_y).
    """
    nx, ny = idx.count_x, idx.count_y
    la, ka = idx.l, idx.k - idx.l
    if nx:
        lead = np.asarray(ux).shape[:-1]
    elif ny:
        lead = np.asarray(uy).shape[:-1]
    else:
        lead = (1,)
    expo = np.zeros(lead, dtype=complex)
    ib = 1j * beta_sq

    def pair(ua, va, ub, vb):
        return ua - ub, va - vb

    # like-sign pairs carry a minus, mixed x-y pairs a plus; the
    # positive-frequency kernel always sees the anti-ordered point first
    for i in range(nx):
        for j in range(i + 1, nx):
            du, dv = pair(ux[..., i], vx[..., i], ux[..., j], vx[..., j])
            if j < la:
                expo -= ib * dyson(du, dv, eps, mu)
            elif i >= la:
                expo -= ib * feynman(du, dv, eps, mu)
            else:
                expo -= ib * wightman(du, dv, eps, mu)
    for i in range(ny):
        for j in range(i + 1, ny):
            du, dv = pair(uy[..., i], vy[..., i], uy[..., j], vy[..., j])
            if j < ka:
                expo -= ib * dyson(du, dv, eps, mu)
            elif i >= ka:
                expo -= ib * feynman(du, dv, eps, mu)
            else:
                expo -= ib * wightman(du, dv, eps, mu)
    for i in range(nx):
        for j in range(ny):
            du, dv = pair(ux[..., i], vx[..., i], uy[..., j], vy[..., j])
            if i < la and j < ka:
                expo += ib * dyson(du, dv, eps, mu)
            elif i >= la and j >= ka:
                expo += ib * feynman(du, dv, eps, mu)
            elif i < la:
                expo += ib * wightman(du, dv, eps, mu)
            else:
                # time-ordered x against anti-ordered y: y comes first
                expo += ib * wightman(-du, -dv, eps, mu)

    coin = state.coincidence()

    def wblock(ua, va, na, ub, vb, nb):
        tot = np.zeros(lead)
        for i in range(na):
            for j in range(nb):
                tot = tot + state.w(ua[..., i] - ub[..., j], va[..., i] - vb[..., j])
        return tot

    def wself(ua, va, na):
        tot = np.zeros(lead)
        for i in range(na):
            tot = tot + coin
            for j in range(i + 1, na):
                tot = tot + 2.0 * state.w(ua[..., i] - ua[..., j], va[..., i] - va[..., j])
        return tot

    expo = expo - 0.5 * beta_sq * wself(ux, vx, nx)
    expo = expo - 0.5 * beta_sq * wself(uy, vy, ny)
    expo = expo + beta_sq * wblock(ux, vx, nx, uy, vy, ny)
    return np.exp(expo)


def cal_E(idx, xs, ys, r: Regulators, p: ModelParams, state) -> complex:
    """Pair exponential for one configuration."""
    xs = _as_points(xs, idx.count_x)
    ys = _as_points(ys, idx.count_y)
    ux, vx = _lightcone(xs[np.newaxis])
    uy, vy = _lightcone(ys[np.newaxis])
    out = _cal_e_batch(idx, ux, vx, uy, vy, r.epsilon, r.mu, p.beta_sq, state)
    return complex(out[0])


def _g_point_terms(idx, ux, vx, uy, vy, uz, vz):
    """Per insertion point: (sign, kernel kind, du, dv) relative to z."""
    terms = []
    for i in range(idx.count_x):
        kind = "positive" if i < idx.l else "timeordered"
        terms.append((1.0, kind, ux[..., i] - uz, vx[..., i] - vz))
    ka = idx.k - idx.l
    for j in range(idx.count_y):
        kind = "positive" if j < ka else "timeordered"
        terms.append((-1.0, kind, uy[..., j] - uz, vy[..., j] - vz))
    return terms


def _g_w_parts(idx, terms, state, order):
    """State contribution to the kernel sum or its z-derivatives.

    order 0 gives -i sum_x W + i sum_y W; order (1,0) and (0,1) give the
    z-derivatives, which flip the sign of the separation derivative.
    """
    tot = 0.0j
    for sign, _kind, du, dv in terms:
        if order == (0, 0):
            tot = tot - 1j * sign * state.w(du, dv)
        elif order == (1, 0):
            tot = tot + 1j * sign * state.w_deriv(du, dv, 1, 0)
        else:
            tot = tot + 1j * sign * state.w_deriv(du, dv, 0, 1)
    return tot


def _g_sum_batch(idx, ux, vx, uy, vy, uz, vz, eps, mu, state, du_order=0, dv_order=0):
    terms = _g_point_terms(idx, ux, vx, uy, vy, uz, vz)
    tot = 0.0j
    for sign, kind, du, dv in terms:
        if du_order == 0 and dv_order == 0:
            tot = tot + sign * _kernel_value(kind, du, dv, eps, mu)
        elif du_order == 1:
            tot = tot - sign * _kernel_du(kind, du, dv, eps)
        else:
            tot = tot - sign * _kernel_dv(kind, du, dv, eps)
    order = (du_order, dv_order)
    return tot + _g_w_parts(idx, terms, state, order)


def cal_G(idx, xs, ys, z, r: Regulators, p: ModelParams, state, du=0, dv=0) -> complex:
    """Linear kernel sum at z, optionally one z-derivative (du or dv)."""
    del p
    if du + dv > 1 or du < 0 or dv < 0:
        raise ValueError("at most one first derivative is available")
    xs = _as_points(xs, idx.count_x)
    ys = _as_points(ys, idx.count_y)
    ux, vx = _lightcone(xs[np.newaxis])
    uy, vy = _lightcone(ys[np.newaxis])
    uz = np.array([z[0] - z[1]])
    vz = np.array([z[0] + z[1]])
    out = _g_sum_batch(idx, ux, vx, uy, vy, uz, vz, r.epsilon, r.mu, state, du, dv)
    return complex(np.asarray(out).ravel()[0])


def bar_cal_G(idx, xs, ys, z, r: Regulators, p: ModelParams, state, du=0, dv=0) -> complex:
    """Conjugate-ordering kernel sum: anti points carry the negative-
    frequency kernel, time-ordered points the positive one with z first.
    The state part is identical to cal_G, so the difference of the two
    sums is state independent."""
    del p
    if du + dv > 1 or du < 0 or dv < 0:
        raise ValueError("at most one first derivative is available")
    xs = _as_points(xs, idx.count_x)
    ys = _as_points(ys, idx.count_y)
    ux, vx = _lightcone(xs[np.newaxis])
    uy, vy = _lightcone(ys[np.newaxis])
    uz = np.array([z[0] - z[1]])
    vz = np.array([z[0] + z[1]])
    eps, mu = r.epsilon, r.mu

    tot = 0.0j
    ka = idx.k - idx.l
    groups = (
        (1.0, idx.count_x, idx.l, ux, vx),
        (-1.0, idx.count_y, ka, uy, vy),
    )
    for sign, count, n_anti, uu, vv in groups:
        for i in range(count):
            duz = uz - uu[..., i]
            dvz = vz - vv[..., i]
            anti = i < n_anti
            if du == 0 and dv == 0:
                ker = dyson(duz, dvz, eps, mu) if anti else wightman(duz, dvz, eps, mu)
            elif du == 1:
                ker = dyson_du(duz, dvz, eps) if anti else wightman_du(duz, eps)
            else:
                ker = dyson_dv(duz, dvz, eps) if anti else wightman_dv(dvz, eps)
            tot = tot + sign * ker

    terms = _g_point_terms(idx, ux, vx, uy, vy, uz, vz)
    tot = tot + _g_w_parts(idx, terms, state, (du, dv))
    return complex(np.asarray(tot).ravel()[0])


def vanishing_sum(n, xs, ys, r: Regulators, p: ModelParams, state=None) -> complex:
    """Symmetrized alternating sum of pair exponentials at order 2n.

    Vanishes identically for n >= 1; evaluated here as a cross-check of
    the kernel assembly.  The default state is W = 0.
    """
    if n < 1:
        raise ValueError("defined for n >= 1")
    if state is None:
        from .states import VacuumState

        state = VacuumState()
    xs = _as_points(xs, n)
    ys = _as_points(ys, n)
    f = math.factorial
    total = 0.0j
    count = 0
    for px in permutations(range(n)):
        for py in permutations(range(n)):
            xp = xs[list(px)]
            yp = ys[list(py)]
            for k in range(2 * n + 1):
                for l in range(max(0, k - n), min(k, n) + 1):
                    w = Fraction((-1) ** (k + n),
                                 f(l) * f(k - l) * f(n - l) * f(n - k + l))
                    idx = SeriesIndex(2 * n, k, l, n - l)
                    total += float(w) * cal_E(idx, xp, yp, r, p, state)
            count += 1
    return total / count


# ---------------------------------------------------------------------------
# energy-density kernels


def theta_worldline(idx, xs, ys, tau, worldline, r: Regulators, p: ModelParams, state) -> complex:
    """Kernel of the worldline-smeared energy density at proper time tau.

    Sector 0 combines the frame-contracted square of the kernel sum with
    the state coincidence tensor; single-point squares are routed through
    the renormalized products (their off-cone values coincide with the
    plain squares, the cone content is restored by the term estimator).
    Sectors -1 and +1 are the vertex kernels, which enter with an
    overall minus for a timelike unit velocity.
    """
    z = worldline.position(float(tau))
    fr = worldline.frame(float(tau))
    xs = _as_points(xs, idx.count_x)
    ys = _as_points(ys, idx.count_y)
    ux, vx = _lightcone(xs[np.newaxis])
    uy, vy = _lightcone(ys[np.newaxis])
    uz = np.array([z[0] - z[1]])
    vz = np.array([z[0] + z[1]])
    eps, mu = r.epsilon, r.mu

    if idx.sector == 0:
        terms = _g_point_terms(idx, ux, vx, uy, vy, uz, vz)
        hu = [-sign * _kernel_du(kind, du, dv, eps) for sign, kind, du, dv in terms]
        hv = [-sign * _kernel_dv(kind, du, dv, eps) for sign, kind, du, dv in terms]
        su = sum(hu) + _g_w_parts(idx, terms, state, (1, 0))
        sv = sum(hv) + _g_w_parts(idx, terms, state, (0, 1))
        qu = su * su
        qv = sv * sv
        for (sign, kind, du, dv), hup, hvp in zip(terms, hu, hv):
            del sign
            qu = qu - hup * hup + renormalized_product(
                "positive" if kind == "positive" else "timeordered", "uu", du, dv, eps, mu)
            qv = qv - hvp * hvp + renormalized_product(
                "positive" if kind == "positive" else "timeordered", "vv", du, dv, eps, mu)
        cu, cv = state.hessian_coincidence()
        val = p.beta_sq * (fr.a**2 * qu + fr.b**2 * qv) + fr.a**2 * cu + fr.b**2 * cv
        return complex(np.asarray(val).ravel()[0])

    g_sum = _g_sum_batch(idx, ux, vx, uy, vy, uz, vz, eps, mu, state)
    phase = np.exp(1j * idx.sector * p.beta_sq * g_sum - 0.5 * p.beta_sq * state.coincidence())
    val = -(1.0 - p.beta_sq / (8.0 * math.pi)) * p.g(z[0], z[1]) * phase
    return complex(np.asarray(val).ravel()[0])


def theta_spacetime(idx, xs, ys, z, r: Regulators, p: ModelParams, state):
    """Full two-index kernel at the spacetime point z, trace terms included.

    Returns a complex 2x2 array in (t, x) components with signature
    eta = diag(-1, +1).  The velocity-frame contraction of the sector-0
    tensor reproduces theta_worldline by construction.
    """
    eta = np.diag([-1.0, 1.0])
    xs = _as_points(xs, idx.count_x)
    ys = _as_points(ys, idx.count_y)
    ux, vx = _lightcone(xs[np.newaxis])
    uy, vy = _lightcone(ys[np.newaxis])
    uz = np.array([z[0] - z[1]])
    vz = np.array([z[0] + z[1]])
    eps, mu = r.epsilon, r.mu

    if idx.sector != 0:
        g_sum = _g_sum_batch(idx, ux, vx, uy, vy, uz, vz, eps, mu, state)
        phase = np.exp(1j * idx.sector * p.beta_sq * g_sum - 0.5 * p.beta_sq * state.coincidence())
        scal = (1.0 - p.beta_sq / (8.0 * math.pi)) * p.g(z[0], z[1]) * phase
        return complex(np.asarray(scal).ravel()[0]) * eta.astype(complex)

    terms = _g_point_terms(idx, ux, vx, uy, vy, uz, vz)
    hu = [-sign * _kernel_du(kind, du, dv, eps) for sign, kind, du, dv in terms]
    hv = [-sign * _kernel_dv(kind, du, dv, eps) for sign, kind, du, dv in terms]
    su = sum(hu) + _g_w_parts(idx, terms, state, (1, 0))
    sv = sum(hv) + _g_w_parts(idx, terms, state, (0, 1))
    puu = su * su
    pvv = sv * sv
    puv = su * sv
    for (sign, kind, du, dv), hup, hvp in zip(terms, hu, hv):
        del sign
        kk = "positive" if kind == "positive" else "timeordered"
        puu = puu - hup * hup + renormalized_product(kk, "uu", du, dv, eps, mu)
        pvv = pvv - hvp * hvp + renormalized_product(kk, "vv", du, dv, eps, mu)
        puv = puv - hup * hvp + renormalized_product(kk, "uv", du, dv, eps, mu)
    puu = complex(np.asarray(puu).ravel()[0])
    pvv = complex(np.asarray(pvv).ravel()[0])
    puv = complex(np.asarray(puv).ravel()[0])
    ptt = puu + 2.0 * puv + pvv
    ptx = pvv - puu
    pxx = puu - 2.0 * puv + pvv
    pair = p.beta_sq * (np.array([[ptt, ptx], [ptx, pxx]]) + 2.0 * puv * eta)
    cu, cv = state.hessian_coincidence()
    wmat = np.array([[cu + cv, cv - cu], [cv - cu, cu + cv]], dtype=complex)
    return pair + wmat


# ---------------------------------------------------------------------------
# deterministic first-order reference


@dataclass(frozen=True)
class OrderOneQuadrature:
    value: float
    rungs: tuple
    ladder: tuple


def _cutoff_box(g):
    if hasattr(g, "support"):
        return g.support()
    return (-8.0 * g.sigma0, 8.0 * g.sigma0, -8.0 * g.sigma1, 8.0 * g.sigma1)


def order1_quadrature(worldline, window, params: ModelParams, ladder=(1e-2, 5e-3, 2.5e-3),
                      mu: float = 1.0) -> OrderOneQuadrature:
    """Deterministic value of the combined first-order term for W = 0.

    Both vertex sectors together reduce to a three-fold integral of the
    cutoff times the imaginary part of a complex power over the past
    region; this evaluates it with fixed Gauss-Legendre panels refined
    on the light cone, then Richardson-extrapolates over the ladder.
    """
    alpha = params.beta_sq / (4.0 * math.pi)
    pref = 1.0 - params.beta_sq / (8.0 * math.pi)

    gt0, gt1, gx0, gx1 = _cutoff_box(params.g)
    lo, hi = window.support()
    n_tau = 96
    tau_x, tau_w = np.polynomial.legendre.leggauss(n_tau)
    tau = 0.5 * (lo + hi) + 0.5 * (hi - lo) * tau_x
    tau_w = 0.5 * (hi - lo) * tau_w
    zpos = np.array([worldline.position(float(t)) for t in tau])
    tz, xz = zpos[:, 0], zpos[:, 1]
    # the vertex carries the cutoff at the worldline point as well
    fvals = window(tau) * params.g(tz, xz)

    s_lo = 2.0 * (gt0 - tz.max())
    d_lo = 2.0 * (xz.min() - gx1)
    d_hi = 2.0 * (xz.max() - gx0)
    if s_lo >= 0.0:
        return OrderOneQuadrature(0.0, tuple(0.0 for _ in ladder), tuple(ladder))

    gl_n, gl_w = np.polynomial.legendre.leggauss(20)

    th_n, th_w = np.polynomial.legendre.leggauss(48)
    theta = 0.5 * math.pi * th_n
    th_w = 0.5 * math.pi * th_w
    sin_t = np.sin(theta)
    cos_t = np.cos(theta)

    def accumulate(s_nodes, s_wts, d_nodes, d_wts, eps, total):
        s_b = s_nodes[:, None]
        du = 0.5 * (s_b + d_nodes)
        dv = 0.5 * (s_b - d_nodes)
        zc = mu * mu * (eps - 1j * du) * (eps - 1j * dv)
        kern = np.imag(zc ** (-alpha)) * d_wts
        for it in range(n_tau):
            gval = params.g(tz[it] + 0.5 * s_b, xz[it] - 0.5 * d_nodes)
            inner = np.sum(gval * kern, axis=-1)
            total += tau_w[it] * fvals[it] * float(s_wts @ inner)
        return total

    def rung_value(eps):
        # geometric s-panels down to a fraction of eps
        breaks = [s_lo]
        cur = s_lo
        while abs(cur) > 0.05 * eps:
            cur *= 0.6
            breaks.append(cur)
        breaks.append(0.0)
        breaks = np.array(breaks)
        total = 0.0
        ladder = [10.0 * eps * 4.0**k for k in range(14)]
        for a, b in zip(breaks[:-1], breaks[1:]):
            s_nodes = 0.5 * (a + b) + 0.5 * (b - a) * gl_n
            s_wts = 0.5 * (b - a) * gl_w
            sa = np.abs(s_nodes)
            # timelike interior: d = |s| sin(theta) turns the quarter-power
            # cone growth into a smooth half-power of the cosine
            d_int = sa[:, None] * sin_t
            w_int = sa[:, None] * cos_t * th_w
            total = accumulate(s_nodes, s_wts, d_int, w_int, eps, total)
            # spacelike exteriors, graded away from each cone line
            for sgn in (-1.0, 1.0):
                cols = [sgn * sa]
                for wk in ladder:
                    cols.append(sgn * (sa + wk))
                cols.append(np.full_like(sa, d_hi if sgn > 0 else d_lo))
                edges = np.stack(cols, axis=-1)
                edges = np.clip(edges, d_lo, d_hi)
                if sgn < 0:
                    edges = edges[:, ::-1]
                plo = edges[:, :-1]
                phi = edges[:, 1:]
                width = np.maximum(phi - plo, 0.0)
                d_nodes = (plo[..., None] + width[..., None] * 0.5 * (gl_n + 1.0))
                d_wts = width[..., None] * 0.5 * gl_w
                total = accumulate(s_nodes, s_wts,
                                   d_nodes.reshape(len(s_nodes), -1),
                                   d_wts.reshape(len(s_nodes), -1), eps, total)
        return pref * total

    rungs = tuple(rung_value(e) for e in ladder)
    if len(rungs) == 3:
        a1 = 2.0 * rungs[1] - rungs[0]
        b1 = 2.0 * rungs[2] - rungs[1]
        value = (4.0 * b1 - a1) / 3.0
    else:
        value = rungs[0]
    return OrderOneQuadrature(value, rungs, tuple(ladder))


# ---------------------------------------------------------------------------
# Monte Carlo engine


def _stream_id(n, s, substream):
    return 16 * n + 4 * (s + 1) + substream


def _stream_rng(seed, stream, chunk):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream, chunk)))


def _draw_points(g, rng, count, batch):
    if count == 0:
        return np.zeros((batch, 0, 2))
    if hasattr(g, "sample"):
        cols = []
        for _ in range(count):
            t, x = g.sample(rng, batch)
            cols.append(np.stack([t, x], axis=-1))
        return np.stack(cols, axis=1)
    t0, t1, x0, x1 = g.support()
    t = rng.uniform(t0, t1, (batch, count))
    x = rng.uniform(x0, x1, (batch, count))
    return np.stack([t, x], axis=-1)


def _plain_pdf(g, pts):
    if hasattr(g, "pdf"):
        return g.pdf(pts[..., 0], pts[..., 1])
    t0, t1, x0, x1 = g.support()
    area = (t1 - t0) * (x1 - x0)
    inside = ((pts[..., 0] >= t0) & (pts[..., 0] <= t1)
              & (pts[..., 1] >= x0) & (pts[..., 1] <= x1))
    return np.where(inside, 1.0 / area, 0.0)


def _point_weights(g, pts):
    pdf = _plain_pdf(g, pts)
    val = g(pts[..., 0], pts[..., 1])
    return np.where(pdf > 0.0, val / np.where(pdf > 0.0, pdf, 1.0), 0.0)


def _pair_radius(g):
    if hasattr(g, "support"):
        t0, t1, x0, x1 = g.support()
        return 0.5 * min(t1 - t0, x1 - x0)
    return 2.0 * max(g.sigma0, g.sigma1)


def _radial_pdf(rho, alpha, radius):
    """Two-dimensional density of the cone-focusing proposal."""
    norm = (2.0 - alpha) / (2.0 * math.pi * radius ** (2.0 - alpha))
    out = np.where((rho > 0.0) & (rho <= radius), norm * rho ** (-alpha), 0.0)
    return out


def _frames_batch(worldline, tau):
    pos = np.empty((tau.size, 2))
    a = np.empty(tau.size)
    b = np.empty(tau.size)
    adot = np.empty(tau.size)
    bdot = np.empty(tau.size)
    for i, t in enumerate(tau):
        pos[i] = worldline.position(float(t))
        fr = worldline.frame(float(t))
        a[i], b[i], adot[i], bdot[i] = fr.a, fr.b, fr.adot, fr.bdot
    return pos, a, b, adot, bdot


def _richardson(vals):
    """Two-stage extrapolation along a halving ladder (or identity)."""
    if len(vals) == 1:
        return vals[0]
    a1 = 2.0 * vals[1] - vals[0]
    b1 = 2.0 * vals[2] - vals[1]
    return (4.0 * b1 - a1) / 3.0


def _reduce_chunks(parts):
    cnt = sum(p[0] for p in parts)
    sre = math.fsum(p[1] for p in parts)
    sre2 = math.fsum(p[2] for p in parts)
    sim = math.fsum(p[3] for p in parts)
    sim2 = math.fsum(p[4] for p in parts)
    return cnt, sre, sre2, sim, sim2


def _chunk_stats(vals):
    re = np.ascontiguousarray(vals.real)
    im = np.ascontiguousarray(vals.imag)
    return (vals.size, math.fsum(re.tolist()), math.fsum((re * re).tolist()),
            math.fsum(im.tolist()), math.fsum((im * im).tolist()))


def _estimate_from_sums(cnt, sre, sre2, sim, sim2, seed, ladder):
    mean = sre / cnt
    imean = sim / cnt
    if cnt > 1:
        var = max(sre2 - sre * sre / cnt, 0.0) / (cnt - 1)
        ivar = max(sim2 - sim * sim / cnt, 0.0) / (cnt - 1)
        serr = math.sqrt(var / cnt)
        iserr = math.sqrt(ivar / cnt)
    else:
        serr = iserr = 0.0
    flagged = serr > abs(mean) and serr > 1e-10
    return TermEstimate(mean, serr, cnt, seed, tuple(ladder), imean, iserr, flagged)


def _excluded_products(weights):
    """weights: (batch, count); product over all slots but one, per slot."""
    batch, count = weights.shape
    out = np.empty((batch, count))
    for p in range(count):
        cols = [weights[:, q] for q in range(count) if q != p]
        out[:, p] = np.prod(np.stack(cols, axis=1), axis=1) if cols else 1.0
    return out


def term_value(n, s, state, params: ModelParams, worldline, window, mc: MCConfig) -> TermEstimate:
    """Monte Carlo estimate of the order-n, sector-s term of the smeared
    energy density.

    Insertion points are drawn from the normalized cutoff density (with
    a cone-focusing mixture for the cross pairs once beta^2 reaches the
    variance cap), the time argument from the normalized window.  All
    rungs of the epsilon ladder share every draw, and the sample stream
    is keyed on (seed, order, sector, chunk), so results are bit
    identical for any thread count.
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n > mc.max_order:
        raise ValueError(f"order {n} above configured maximum {mc.max_order}")
    ladder = tuple(mc.epsilon_ladder)
    idxs = enumerate_sector(n, s)
    if not idxs:
        return TermEstimate(0.0, 0.0, 0, mc.seed, ladder)

    if n == 0:
        cu, cv = state.hessian_coincidence()
        if cu == 0.0 and cv == 0.0:
            return TermEstimate(0.0, 0.0, 0, mc.seed, ladder)

        def dens(t):
            fr = worldline.frame(t)
            return window(t) * (fr.a**2 * cu + fr.b**2 * cv)

        lo, hi = window.support()
        val, _ = integrate.quad(dens, lo, hi, limit=200)
        return TermEstimate(val, 0.0, 0, mc.seed, ladder)

    beta_sq = params.beta_sq
    pref = 1.0 - beta_sq / (8.0 * math.pi)
    alpha = beta_sq / (4.0 * math.pi)
    mu = 1.0
    nx, ny = idxs[0].count_x, idxs[0].count_y
    coeffs = [coefficient(i) for i in idxs]
    mixture = beta_sq >= params.mc_default_beta_sq_cap and nx > 0 and ny > 0
    radius = _pair_radius(params.g)
    coin = state.coincidence()
    cu, cv = state.hessian_coincidence()
    n_chunks = -(-mc.samples // _CHUNK)
    stream = _stream_id(n, s, 0)

    def eval_chunk(chunk):
        rng = _stream_rng(mc.seed, stream, chunk)
        batch = min(_CHUNK, mc.samples - chunk * _CHUNK)
        tau = np.asarray(window.sample(rng, batch), dtype=float)
        xs = _draw_points(params.g, rng, nx, batch)
        ys = _draw_points(params.g, rng, ny, batch)
        if mixture:
            take = rng.random((batch, ny)) < 0.5
            partner = rng.integers(0, nx, size=(batch, ny))
            rho = radius * rng.random((batch, ny)) ** (1.0 / (2.0 - alpha))
            phi = rng.uniform(0.0, 2.0 * math.pi, (batch, ny))
            off = np.stack([rho * np.cos(phi), rho * np.sin(phi)], axis=-1)
            anchor = xs[np.arange(batch)[:, None], partner]
            ys = np.where(take[..., None], anchor + off, ys)
        cauchy = rng.standard_cauchy((batch, nx + ny)) if s == 0 else None

        wtau = window(tau) / window.pdf(tau)
        wf2 = window.deriv(tau, 2) / window.pdf(tau) if s == 0 else None
        wx = _point_weights(params.g, xs)
        if mixture:
            base = _plain_pdf(params.g, ys)
            rad = np.zeros((batch, ny))
            for i in range(nx):
                sep = ys - xs[:, i:i + 1, :]
                rho_all = np.hypot(sep[..., 0], sep[..., 1])
                rad += _radial_pdf(rho_all, alpha, radius)
            pdf_y = 0.5 * base + 0.5 * rad / nx
            gy = params.g(ys[..., 0], ys[..., 1])
            wy = np.where(pdf_y > 0.0, gy / np.where(pdf_y > 0.0, pdf_y, 1.0), 0.0)
        else:
            wy = _point_weights(params.g, ys)
        wpts = np.prod(wx, axis=1) * np.prod(wy, axis=1)
        w_excl = _excluded_products(np.concatenate([wx, wy], axis=1))

        zpos, fa, fb, fadot, fbdot = _frames_batch(worldline, tau)
        uz, vz = _lightcone(zpos)
        ux, vx = _lightcone(xs)
        uy, vy = _lightcone(ys)

        rung_vals = []
        for eps in ladder:
            acc = np.zeros(batch, dtype=complex)
            for idx, cf in zip(idxs, coeffs):
                e_fac = _cal_e_batch(idx, ux, vx, uy, vy, eps, mu, beta_sq, state)
                if s != 0:
                    g_sum = _g_sum_batch(idx, ux, vx, uy, vy, uz, vz, eps, mu, state)
                    phase = np.exp(1j * s * beta_sq * g_sum - 0.5 * beta_sq * coin)
                    theta = -pref * params.g(zpos[:, 0], zpos[:, 1]) * phase
                    acc += cf * wpts * wtau * e_fac * theta
                    continue
                terms = _g_point_terms(idx, ux, vx, uy, vy, uz, vz)
                hu = [-sg * _kernel_du(kind, du, dv, eps) for sg, kind, du, dv in terms]
                hv = [-sg * _kernel_dv(kind, du, dv, eps) for sg, kind, du, dv in terms]
                su = sum(hu) + _g_w_parts(idx, terms, state, (1, 0))
                sv = sum(hv) + _g_w_parts(idx, terms, state, (0, 1))
                cross_u = su * su
                cross_v = sv * sv
                for hup, hvp in zip(hu, hv):
                    cross_u = cross_u - hup * hup
                    cross_v = cross_v - hvp * hvp
                main = beta_sq * (fa**2 * cross_u + fb**2 * cross_v) + fa**2 * cu + fb**2 * cv
                acc += cf * wpts * wtau * e_fac * main

                # single-point squares, moved onto the window: kernel value
                # against f'' plus frame-curvature against first derivatives,
                # and a cone contact for the time-ordered kernels
                pieces = np.zeros(batch, dtype=complex)
                for sg, kind, du, dv in terms:
                    del sg
                    kval = _kernel_value(kind, du, dv, eps, mu)
                    kdu = _kernel_du(kind, du, dv, eps)
                    kdv = _kernel_dv(kind, du, dv, eps)
                    pieces += beta_sq * (-_I4PI) * (
                        wf2 * kval + wtau * (fadot * kdu + fbdot * kdv))
                acc += cf * wpts * e_fac * pieces

                for pslot, (sg, kind, du, dv) in enumerate(terms):
                    del sg, du, dv
                    if kind != "timeordered":
                        continue
                    pc_t = zpos[:, 0]
                    pc_x = zpos[:, 1] + eps * cauchy[:, pslot]
                    upc = pc_t - pc_x
                    vpc = pc_t + pc_x
                    if pslot < nx:
                        ux_r = ux.copy()
                        vx_r = vx.copy()
                        ux_r[:, pslot] = upc
                        vx_r[:, pslot] = vpc
                        uy_r, vy_r = uy, vy
                    else:
                        uy_r = uy.copy()
                        vy_r = vy.copy()
                        uy_r[:, pslot - nx] = upc
                        vy_r[:, pslot - nx] = vpc
                        ux_r, vx_r = ux, vx
                    e_repl = _cal_e_batch(idx, ux_r, vx_r, uy_r, vy_r, eps,
                                          mu, beta_sq, state)
                    contact = (-1j * beta_sq / (8.0 * math.pi)) * wtau * \
                        params.g(pc_t, pc_x) * e_repl
                    acc += cf * w_excl[:, pslot] * contact
            rung_vals.append(acc)
        vals = _richardson(rung_vals)
        return _chunk_stats(vals)

    parts = _run_chunks(eval_chunk, n_chunks, mc.threads)
    cnt, sre, sre2, sim, sim2 = _reduce_chunks(parts)
    return _estimate_from_sums(cnt, sre, sre2, sim, sim2, mc.seed, ladder)


def _run_chunks(fn, n_chunks, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, range(n_chunks)))
    return [fn(c) for c in range(n_chunks)]


def conservation_check(order, f2d, params: ModelParams, state, mc: MCConfig):
    """Divergence of the spacetime-smeared assembly against the test
    function's raised gradient; returns (time component, space component).

    Order 0 vanishes identically (the coincidence tensor is constant and
    the gradient integrates to zero).  Order 1 combines the first-order
    vertex terms with the second-order neutral sector, which share one
    power of the squared cutoff amplitude; single-point squares are
    handled by moving both derivatives onto the test function, which
    needs its third partials.  Pair insertions are averaged with their
    coordinate-exchanged partners and the smearing point is integrated
    along its null sections, which tames the near-lightcone tails enough
    for the returned standard errors to be trustworthy.
    """
    ladder = tuple(mc.epsilon_ladder)
    if order == 0:
        zero = TermEstimate(0.0, 0.0, 0, mc.seed, ladder)
        return zero, zero
    if order != 1:
        raise ValueError("implemented for orders 0 and 1")

    beta_sq = params.beta_sq
    pref = 1.0 - beta_sq / (8.0 * math.pi)
    coin = state.coincidence()
    cu, cv = state.hessian_coincidence()
    t0, t1, x0, x1 = f2d.support()
    area = (t1 - t0) * (x1 - x0)
    vert_idxs = enumerate_sector(1, -1) + enumerate_sector(1, 1)
    vert_coeffs = [coefficient(i) for i in vert_idxs]
    pair_idxs = enumerate_sector(2, 0)
    pair_coeffs = [coefficient(i) for i in pair_idxs]
    n_chunks = -(-mc.samples // _CHUNK)
    stream = _stream_id(1, 0, 1)

    def eval_chunk(chunk):
        rng = _stream_rng(mc.seed, stream, chunk)
        batch = min(_CHUNK, mc.samples - chunk * _CHUNK)
        zt = rng.uniform(t0, t1, batch)
        zx = rng.uniform(x0, x1, batch)
        p1 = _draw_points(params.g, rng, 1, batch)
        w1 = np.prod(_point_weights(params.g, p1), axis=1)
        # Pair insertions are drawn uniformly in null coordinates over the
        # bounding box of the cutoff support.  That box is a product set,
        # so exchanging the two u (or v) coordinates between the points is
        # a measure-preserving involution of the draw region; averaging
        # each channel with its exchanged partner cancels the near-null
        # pair pinch, whose 1/separation tail otherwise ruins the tail of
        # the sample distribution.
        gt0, gt1, gx0, gx1 = params.g.support()
        u2 = rng.uniform(gt0 - gx1, gt1 - gx0, (batch, 2))
        v2 = rng.uniform(gt0 + gx0, gt1 + gx1, (batch, 2))
        null_w = (gt1 - gt0) + (gx1 - gx0)
        pair_vol = 0.5 * null_w * null_w

        def pair_weight(uu, vv):
            gvals = params.g(0.5 * (uu + vv), 0.5 * (vv - uu))
            return np.prod(gvals * pair_vol, axis=1)

        w2 = pair_weight(u2, v2)
        w2u = pair_weight(u2[:, ::-1], v2)
        w2v = pair_weight(u2, v2[:, ::-1])

        ft = f2d.partial(zt, zx, 1, 0)
        fx = f2d.partial(zt, zx, 0, 1)
        f30 = f2d.partial(zt, zx, 3, 0)
        f21 = f2d.partial(zt, zx, 2, 1)
        f12 = f2d.partial(zt, zx, 1, 2)
        f03 = f2d.partial(zt, zx, 0, 3)
        d2u_fv = (f30 - f21 - f12 + f03) / 8.0
        d2v_fu = (f30 + f21 - f12 - f03) / 8.0

        uz, vz = zt - zx, zt + zx
        u1, v1 = _lightcone(p1)
        gz = params.g(zt, zx)

        # The squared kernel-sum term is sharply peaked where z crosses a
        # lightcone of the pair, which ruins the variance of a pointwise
        # estimate.  Since z is uniform on a box, one lightcone coordinate
        # can be integrated out exactly at fixed partner coordinate; panels
        # graded toward the pole locations resolve the regulator scale.
        glx, glw = _GL8
        # innermost ring well below eps / max |dv| so the pole layer of
        # every rung stays resolved; the top ring exceeds the box scale
        rings = (min(ladder) / 16.0) * 4.0 ** np.arange(10)
        offs = np.concatenate([-rings[::-1], np.zeros(1), rings])

        def section_nodes(lo, hi, poles, jumps):
            grid = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, 9)
            edges = np.concatenate(
                [
                    (poles[:, :, None] + offs).reshape(batch, -1),
                    jumps,
                    grid,
                ],
                axis=1,
            )
            np.clip(edges, lo[:, None], hi[:, None], out=edges)
            edges.sort(axis=1)
            half = 0.5 * (edges[:, 1:] - edges[:, :-1])
            mid = 0.5 * (edges[:, 1:] + edges[:, :-1])
            nodes = (mid[:, :, None] + half[:, :, None] * glx).reshape(batch, -1)
            wts = (half[:, :, None] * glw).reshape(batch, -1)
            return nodes, wts

        u_lo = np.maximum(2.0 * t0 - vz, vz - 2.0 * x1)
        u_hi = np.minimum(2.0 * t1 - vz, vz - 2.0 * x0)
        v_lo = np.maximum(2.0 * t0 - uz, uz + 2.0 * x0)
        v_hi = np.minimum(2.0 * t1 - uz, uz + 2.0 * x1)
        # panel edges at the regulator kinks of every exchange partner
        u_jumps = np.concatenate(
            [u2 + (v2 - vz[:, None]), u2[:, ::-1] + (v2 - vz[:, None])], axis=1)
        v_jumps = np.concatenate(
            [v2 + (u2 - uz[:, None]), v2[:, ::-1] + (u2 - uz[:, None])], axis=1)
        un, uw = section_nodes(u_lo, u_hi, u2, u_jumps)
        vn, vw = section_nodes(v_lo, v_hi, v2, v_jumps)

        tn = 0.5 * (un + vz[:, None])
        xn = 0.5 * (vz[:, None] - un)
        fv_nodes = 0.5 * (f2d.partial(tn, xn, 1, 0) + f2d.partial(tn, xn, 0, 1))
        uw = uw * fv_nodes / np.maximum(u_hi - u_lo, 1e-300)[:, None]
        tn = 0.5 * (uz[:, None] + vn)
        xn = 0.5 * (vn - uz[:, None])
        fu_nodes = 0.5 * (f2d.partial(tn, xn, 1, 0) - f2d.partial(tn, xn, 0, 1))
        vw = vw * fu_nodes / np.maximum(v_hi - v_lo, 1e-300)[:, None]

        # Moving both derivatives of a squared time-ordered kernel onto the
        # test function is exact only up to a line term on the insertion's
        # cone: the second separation derivative carries 2i eps delta(s)
        # over the cross factor, which survives the limit.  Evaluated here
        # as a transverse integral at the insertion time.
        no_jumps = np.zeros((batch, 0))
        xlo = np.full(batch, x0)
        xhi = np.full(batch, x1)

        def build_corr(uu, vv):
            tp = 0.5 * (uu + vv)
            xp = 0.5 * (vv - uu)
            lst = []
            for pslot in range(2):
                cn, cw = section_nodes(xlo, xhi, xp[:, pslot:pslot + 1], no_jumps)
                tc = tp[:, pslot:pslot + 1]
                ftc = f2d.partial(tc, cn, 1, 0)
                fxc = f2d.partial(tc, cn, 0, 1)
                lst.append((cn, cw, 0.5 * (ftc + fxc), 0.5 * (ftc - fxc),
                            xp[:, pslot:pslot + 1]))
            return lst

        corr_orig = build_corr(u2, v2)
        corr_uswp = build_corr(u2[:, ::-1], v2)
        corr_vswp = build_corr(u2, v2[:, ::-1])

        def pair_channels(uu, vv, corr, eps, want_u, want_v):
            """u and/or v channel of the pair sector for one exchange
            configuration: kernel-sum square over the section, single
            kernel diagonal moved onto the test function, and the cone
            line correction of the time-ordered slots."""
            t_u = np.zeros(batch, dtype=complex)
            t_v = np.zeros(batch, dtype=complex)
            for idx, cf in zip(pair_idxs, pair_coeffs):
                ux = uu[:, :idx.count_x]
                vx = vv[:, :idx.count_x]
                uy = uu[:, idx.count_x:]
                vy = vv[:, idx.count_x:]
                e_fac = _cal_e_batch(idx, ux, vx, uy, vy, eps, 1.0, beta_sq, state)
                comp_u = 0.0
                comp_v = 0.0
                if want_u:
                    tms = _g_point_terms(idx, ux[:, None, :], vx[:, None, :],
                                         uy[:, None, :], vy[:, None, :], un, vz[:, None])
                    hu = [-sg * _kernel_du(kind, du, dv, eps) for sg, kind, du, dv in tms]
                    su = sum(hu) + _g_w_parts(idx, tms, state, (1, 0))
                    xuu = su * su
                    for hup in hu:
                        xuu = xuu - hup * hup
                    comp_u = -2.0 * np.sum(uw * (beta_sq * xuu + cu), axis=1)
                if want_v:
                    tms = _g_point_terms(idx, ux[:, None, :], vx[:, None, :],
                                         uy[:, None, :], vy[:, None, :], uz[:, None], vn)
                    hv = [-sg * _kernel_dv(kind, du, dv, eps) for sg, kind, du, dv in tms]
                    sv = sum(hv) + _g_w_parts(idx, tms, state, (0, 1))
                    xvv = sv * sv
                    for hvp in hv:
                        xvv = xvv - hvp * hvp
                    comp_v = -2.0 * np.sum(vw * (beta_sq * xvv + cv), axis=1)
                terms = _g_point_terms(idx, ux, vx, uy, vy, uz, vz)
                for pslot, (sg, kind, du, dv) in enumerate(terms):
                    del sg
                    kval = _kernel_value(kind, du, dv, eps, 1.0)
                    if want_u:
                        comp_u = comp_u - 2.0 * beta_sq * (-_I4PI) * d2u_fv * kval
                    if want_v:
                        comp_v = comp_v - 2.0 * beta_sq * (-_I4PI) * d2v_fu * kval
                    if kind == "timeordered":
                        cn, cw, fv_c, fu_c, xpc = corr[pslot]
                        cau = eps / ((cn - xpc) ** 2 + eps * eps)
                        # already a completed z-integral, so undo the
                        # area factor applied to the whole accumulator
                        line = 1j * beta_sq / (8.0 * math.pi ** 2) / area
                        if want_u:
                            comp_u = comp_u + line * np.sum(cw * fv_c * cau, axis=1)
                        if want_v:
                            comp_v = comp_v + line * np.sum(cw * fu_c * cau, axis=1)
                t_u = t_u + cf * e_fac * comp_u
                t_v = t_v + cf * e_fac * comp_v
            return t_u, t_v

        rung_t = []
        rung_x = []
        for eps in ladder:
            dt_acc = np.zeros(batch, dtype=complex)
            dx_acc = np.zeros(batch, dtype=complex)
            for idx, cf in zip(vert_idxs, vert_coeffs):
                if idx.count_x == 1:
                    ux, vx = u1, v1
                    uy = np.zeros((batch, 0))
                    vy = uy
                else:
                    ux = np.zeros((batch, 0))
                    vx = ux
                    uy, vy = u1, v1
                e_fac = _cal_e_batch(idx, ux, vx, uy, vy, eps, 1.0, beta_sq, state)
                g_sum = _g_sum_batch(idx, ux, vx, uy, vy, uz, vz, eps, 1.0, state)
                phase = np.exp(1j * idx.sector * beta_sq * g_sum - 0.5 * beta_sq * coin)
                scal = cf * w1 * e_fac * pref * gz * phase
                dt_acc += scal * ft
                dx_acc += scal * fx
            cu_o, cv_o = pair_channels(u2, v2, corr_orig, eps, True, True)
            cu_s, _ = pair_channels(u2[:, ::-1], v2, corr_uswp, eps, True, False)
            _, cv_s = pair_channels(u2, v2[:, ::-1], corr_vswp, eps, False, True)
            chan_u = 0.5 * (w2 * cu_o + w2u * cu_s)
            chan_v = 0.5 * (w2 * cv_o + w2v * cv_s)
            dt_acc += chan_u + chan_v
            dx_acc += chan_v - chan_u
            rung_t.append(area * dt_acc)
            rung_x.append(area * dx_acc)
        return (_chunk_stats(_richardson(rung_t)), _chunk_stats(_richardson(rung_x)))

    parts = _run_chunks(eval_chunk, n_chunks, mc.threads)
    t_est = _estimate_from_sums(*_reduce_chunks([p[0] for p in parts]), mc.seed, ladder)
    x_est = _estimate_from_sums(*_reduce_chunks([p[1] for p in parts]), mc.seed, ladder)
    return t_est, x_est


# ---------------------------------------------------------------------------
# convergence majorants


def majorant(n, c_hat, k_hat, beta) -> float:
    """Even-sector envelope C (n+1)^2 (2K)^{2n} / (n!)^{1 - beta^2/4pi}."""
    bsq = beta * beta
    if not bsq < 4.0 * math.pi:
        raise ValueError("requires beta^2 < 4 pi")
    expo = 1.0 - bsq / (4.0 * math.pi)
    return c_hat * (n + 1) ** 2 * (2.0 * k_hat) ** (2 * n) / math.factorial(n) ** expo


def majorant_odd(n, c_hat, k_hat, beta) -> float:
    """Odd-sector envelope C K (n+1) (2K)^{2n} / (n!)^{1 - beta^2/4pi}."""
    bsq = beta * beta
    if not bsq < 4.0 * math.pi:
        raise ValueError("requires beta^2 < 4 pi")
    expo = 1.0 - bsq / (4.0 * math.pi)
    return c_hat * k_hat * (n + 1) * (2.0 * k_hat) ** (2 * n) / math.factorial(n) ** expo


def majorant_tail(n_start, c_hat, k_hat, beta, rtol=1e-12, n_max=500) -> float:
    """Sum of both envelopes from n_start on; converges for any K since
    the factorial wins for beta^2 < 4 pi."""
    total = 0.0
    for n in range(n_start, n_max):
        term = majorant(n, c_hat, k_hat, beta) + majorant_odd(n, c_hat, k_hat, beta)
        total += term
        if n > n_start + 2 and term < rtol * total:
            break
    return total


def fit_majorant(first_order: TermEstimate, beta):
    """Envelope constants from the first-order estimate, then frozen.

    K is set to one; C is chosen so that the n=1 envelope sits fifty
    percent above the estimated magnitude plus three standard errors.
    No sharpness is claimed, only a documented convention.
    """
    k_hat = 1.0
    target = 1.5 * (abs(first_order.value) + 3.0 * first_order.std_error)
    c_hat = target / majorant(1, 1.0, k_hat, beta)
    return c_hat, k_hat
