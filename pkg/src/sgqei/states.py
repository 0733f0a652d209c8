"""State-dependent two-point part of quasi-free states.

Two families are shipped: a vanishing choice and a thermal window, whose
mode weight 1/(E (e^{bE} - 1)) is supported on energies [e_lo, e_hi] and
acts on both chiralities.  The window state reduces to separated
light-cone profiles

    W(x, y) = P(u(x,y)) + P(v(x,y)),
    P(s) = (1/2pi) int_window dE cos(E s) / (E (e^{bE} - 1)),

which makes it a bisolution of the wave equation with smooth, bounded
kernels.  Energies down to zero are rejected: the weight is not
integrable there.

All evaluation is vectorized over separations with a fixed
Gauss-Legendre rule on the window; the tests validate the rule against
adaptive quadrature including large separations.  The massive
deformation keeps each windowed mode at its label E and moves it onto
the mass shell, attaching the complementary light-cone phase m^2/(4E);
it restores the massless kernels as m -> 0 and solves the massive wave
equation in each argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .propagators import massive_mass

__all__ = [
    "VacuumState",
    "ThermalWindowState",
    "PositivityReport",
    "conditional_positivity",
    "discrete_neutral_form",
    "massive_state_quadratic_form",
]

_BLOCK = 1 << 15


class VacuumState:
    """W identically zero."""

    def w(self, u, v):
        return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape)

    def w_deriv(self, u, v, du=0, dv=0):
        if du < 0 or dv < 0 or du + dv > 2:
            raise ValueError("derivative orders limited to total order 2")
        return self.w(u, v)

    def coincidence(self):
        return 0.0

    def hessian_coincidence(self):
        return 0.0, 0.0

    def massive_w(self, m, u, v):
        return self.w(u, v)

    def zero_mean_form(self, amp, centers, widths):
        return 0.0

    def massive_form_part(self, modal, m):
        return 0.0


class ThermalWindowState:
    """Thermal occupation in an energy window at inverse temperature b."""

    def __init__(self, e_lo: float = 0.5, e_hi: float = 2.0, b: float = 1.0, nodes: int = 256):
        if not 0.0 < e_lo < e_hi:
            raise ValueError("need 0 < e_lo < e_hi; the mode weight is not integrable down to zero energy")
        if b <= 0.0:
            raise ValueError("inverse temperature b must be positive")
        self.e_lo = float(e_lo)
        self.e_hi = float(e_hi)
        self.b = float(b)
        x, wq = np.polynomial.legendre.leggauss(nodes)
        self._e = 0.5 * (e_hi + e_lo) + 0.5 * (e_hi - e_lo) * x
        # quadrature weights with the mode weight folded in
        self._w = 0.5 * (e_hi - e_lo) * wq / (self._e * np.expm1(self.b * self._e))

    def profile(self, s, order: int = 0):
        """d^order/ds^order of the single-chirality kernel P(s)."""
        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).reshape(-1)
        out = np.empty(flat.shape)
        for i in range(0, flat.size, _BLOCK):
            ph = np.outer(flat[i:i + _BLOCK], self._e)
            if order == 0:
                blk = np.cos(ph) @ self._w
            elif order == 1:
                blk = -np.sin(ph) @ (self._e * self._w)
            elif order == 2:
                blk = -np.cos(ph) @ (self._e**2 * self._w)
            else:
                raise ValueError("profile derivatives available up to order 2")
            out[i:i + _BLOCK] = blk
        return out.reshape(s.shape) / (2.0 * math.pi)

    def w(self, u, v):
        return self.profile(u) + self.profile(v)

    def w_deriv(self, u, v, du=0, dv=0):
        """Separation derivatives; mixed ones vanish (separated chiralities)."""
        if du < 0 or dv < 0 or du + dv > 2:
            raise ValueError("derivative orders limited to total order 2")
        if du == 0 and dv == 0:
            return self.w(u, v)
        if dv == 0:
            return self.profile(u, du)
        if du == 0:
            return self.profile(v, dv)
        return np.zeros(np.broadcast(np.asarray(u), np.asarray(v)).shape)

    def coincidence(self) -> float:
        return 2.0 * float(self.profile(0.0))

    def hessian_coincidence(self):
        """(∂_u ∂_u' W, ∂_v ∂_v' W) at coincidence; both equal and >= 0."""
        c = -float(self.profile(0.0, 2))
        return c, c

    def massive_w(self, m, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        shape = np.broadcast(u, v).shape
        uf = np.broadcast_to(u, shape).reshape(-1)
        vf = np.broadcast_to(v, shape).reshape(-1)
        q = m * m / (4.0 * self._e)
        out = np.empty(uf.shape)
        for i in range(0, uf.size, _BLOCK):
            ub = uf[i:i + _BLOCK, None]
            vb = vf[i:i + _BLOCK, None]
            core = np.cos(self._e * ub + q * vb) + np.cos(q * ub + self._e * vb)
            out[i:i + _BLOCK] = core @ self._w
        return out.reshape(shape) / (2.0 * math.pi)

    def zero_mean_form(self, amp, centers, widths):
        """Re W(f, f*) for f = amp (g1/||g1||_1 - g2/||g2||_1), g_i Gaussians.

        The difference of normalized bumps has exactly zero mean, so the
        conditional positivity hypothesis holds by construction.  The
        form reduces to window integrals of squared mode integrals.
        """
        t1, x1, t2, x2 = centers
        st1, sx1, st2, sx2 = widths
        s1 = st1**2 + sx1**2
        s2 = st2**2 + sx2**2
        total = 0.0
        for a1, a2 in ((t1 - x1, t2 - x2), (t1 + x1, t2 + x2)):
            for sign in (1.0, -1.0):
                e = sign * self._e
                mode = np.exp(-1j * e * a1 - 0.5 * e**2 * s1) - np.exp(-1j * e * a2 - 0.5 * e**2 * s2)
                total += 0.5 * float(self._w @ np.abs(amp * mode) ** 2)
        return total / (2.0 * math.pi)

    def massive_form_part(self, modal, m):
        """State part of the massive smeared form: windowed mode squares."""
        q = m * m / (4.0 * self._e)
        total = np.zeros_like(self._e)
        for p_arr, q_arr in ((self._e, q), (q, self._e)):
            total += np.abs(modal(p_arr, q_arr)) ** 2
            total += np.abs(modal(-p_arr, -q_arr)) ** 2
        return float(self._w @ total) / (4.0 * math.pi)


@dataclass
class PositivityReport:
    min_quadratic_form: float
    ensemble_size: int
    seed: int


def conditional_positivity(state, n_ensemble: int = 100, seed: int = 42) -> PositivityReport:
    """Minimum of Re W(f, f*) over random zero-mean complex test functions."""
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(n_ensemble):
        amp = complex(rng.normal(), rng.normal())
        centers = rng.uniform(-3.0, 3.0, size=4)
        widths = rng.uniform(0.3, 1.5, size=4)
        worst = min(worst, state.zero_mean_form(amp, centers, widths))
    return PositivityReport(worst, n_ensemble, seed)


def discrete_neutral_form(state, xs, ys) -> float:
    """Sum_ij [W(x_i,x_j) - W(y_i,x_j) - W(x_i,y_j) + W(y_i,y_j)].

    Points are rows (t, x); the result is nonnegative for conditionally
    positive W up to quadrature error.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.atleast_2d(np.asarray(ys, dtype=float))
    pts = np.concatenate([xs, ys], axis=0)
    sgn = np.concatenate([np.ones(len(xs)), -np.ones(len(ys))])
    dt = pts[:, 0, None] - pts[None, :, 0]
    dx = pts[:, 1, None] - pts[None, :, 1]
    w = state.w(dt - dx, dt + dx)
    return float(sgn @ w @ sgn)


def massive_state_quadratic_form(state, lam: float, eps: float, f, box=(-10.0, 10.0),
                                 n_grid: int = 384, n_y: int = 240) -> float:
    """Re of the auxiliary massive two-point function smeared with f ⊗ f*.

    f is a callable (t, x) -> complex evaluated on a tensor quadrature
    grid over box x box.  The scale part is computed through its mass
    shell representation: a positive weight times |mode integral|^2 with
    the regulator entering as exp(-eps (p + q)), so the result is a sum
    of manifestly nonnegative contributions; the state part adds its own
    windowed mode squares.  The shell parameter range is capped where
    the spatial rule stops resolving the oscillation; the discarded tail
    is negligible for test functions whose transforms decay inside the
    cap.  Cross-validation against direct quadrature of the Bessel
    kernel lives in the tests.
    """
    if lam <= 0.0 or eps <= 0.0:
        raise ValueError("need lam > 0 and eps > 0")
    m = massive_mass(lam)
    lo, hi = box
    xg, wg = np.polynomial.legendre.leggauss(n_grid)
    g = 0.5 * (hi + lo) + 0.5 * (hi - lo) * xg
    wgt = 0.5 * (hi - lo) * wg
    tt, xx = np.meshgrid(g, g, indexing="ij")
    fw = (wgt[:, None] * wgt[None, :]) * np.asarray(f(tt, xx), dtype=complex)

    def modal(p_arr, q_arr):
        # int f(t,x) exp(-i p u - i q v) dt dx on the grid
        wt = np.asarray(p_arr, dtype=float) + np.asarray(q_arr, dtype=float)
        wx = np.asarray(q_arr, dtype=float) - np.asarray(p_arr, dtype=float)
        et = np.exp(-1j * np.outer(wt, g))
        ex = np.exp(-1j * np.outer(wx, g))
        return np.einsum("mt,tx,mx->m", et, fw, ex, optimize=True)

    omega_cap = 1.5 * n_grid / (hi - lo)
    y_max = math.log(2.0 * omega_cap / m)
    yg, wy = np.polynomial.legendre.leggauss(n_y)
    a = np.exp(y_max * yg)
    p = 0.5 * m * a
    q = 0.5 * m / a
    modes = modal(p, q)
    bessel_part = float((y_max * wy) @ (np.abs(modes) ** 2 * np.exp(-eps * (p + q)))) / (4.0 * math.pi)
    return bessel_part + state.massive_form_part(modal, m)
