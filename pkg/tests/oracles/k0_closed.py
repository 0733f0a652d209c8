"""Closed forms frozen into the bound-assembly tests.

Derives, with sympy, the exact values used in test_qei.py:
  * the free-bound integrals for a unit Gaussian window on static and
    uniformly accelerated lines,
  * the frame-difference diagonal on the accelerated line and the
    assembled diagonal combination,
  * the equivalence of the off-diagonal frame-difference expression with
    the diagonal formula in the coincidence limit (generic worldline).

Run:  python3 tests/oracles/k0_closed.py
"""

import sympy as sp


def main():
    tau, a = sp.symbols("tau a", real=True, positive=True)
    f = sp.exp(-tau**2 / 2)

    # static line: straight part (1/24 pi) 6 int f'^2
    straight = sp.Rational(6, 1) * sp.integrate(sp.diff(f, tau) ** 2,
                                                (tau, -sp.oo, sp.oo)) / (24 * sp.pi)
    assert sp.simplify(straight - 1 / (8 * sp.sqrt(sp.pi))) == 0
    print("static straight part:", sp.nsimplify(straight), "=", float(straight))

    # accelerated line x^1 = cosh(a tau)/a: velocity sinh, acceleration a cosh
    v1 = sp.sinh(a * tau)
    ratio = sp.simplify(sp.diff(v1, tau) ** 2 / (1 + v1**2))
    assert ratio == a**2
    accel = a**2 * sp.integrate(f**2, (tau, -sp.oo, sp.oo)) / (24 * sp.pi)
    total = sp.simplify(straight + accel)
    print("accelerated parts: straight", float(straight),
          " accel(a)/a^2:", float(accel.subs(a, 1)))
    print("sum check vs sqrt(pi)(3+a^2)/(24 pi):",
          sp.simplify(total - sp.sqrt(sp.pi) * (3 + a**2) / (24 * sp.pi)))

    # frame-difference diagonal on the accelerated line: A = exp(-a tau)
    big_a = sp.exp(-a * tau)
    diag_u = sp.simplify(-sp.Rational(1, 3) * big_a ** sp.Rational(-3, 2)
                         * sp.diff(big_a ** sp.Rational(-1, 2), tau, 2))
    assert sp.simplify(diag_u + a**2 / 12 * sp.exp(2 * a * tau)) == 0
    print("accelerated diagonal (u):", diag_u)

    # assembled combination (1/4 pi)(A^2 diag_u + B^2 diag_v) per unit f^2
    big_b = sp.exp(a * tau)
    diag_v = sp.simplify(-sp.Rational(1, 3) * big_b ** sp.Rational(-3, 2)
                         * sp.diff(big_b ** sp.Rational(-1, 2), tau, 2))
    assembled = sp.simplify((big_a**2 * diag_u + big_b**2 * diag_v) / (4 * sp.pi))
    assert sp.simplify(assembled + a**2 / (24 * sp.pi)) == 0
    print("assembled diagonal per f^2:", assembled, "= -a^2/(24 pi)")

    # coincidence limit of the off-diagonal expression, generic u(tau):
    # substitute taup = tau + h and expand in h
    up = sp.Function("u", positive=True)
    h = sp.symbols("h", real=True)
    u_shift = up(tau) + sum(sp.diff(up(tau), tau, k) * h**k / sp.factorial(k)
                            for k in range(1, 6)) + sp.O(h**6)
    udot_shift = sp.diff(u_shift, h)
    off = 1 / (up(tau) - u_shift) ** 2 \
        - 1 / (sp.diff(up(tau), tau) * udot_shift * h ** 2)
    limit = sp.expand(sp.series(sp.expand(off), h, 0, 1).removeO()).subs(h, 0)
    udot = sp.diff(up(tau), tau)
    diag = sp.simplify(-sp.Rational(1, 3) * udot ** sp.Rational(-3, 2)
                       * sp.diff(udot ** sp.Rational(-1, 2), tau, 2))
    assert sp.simplify(limit - diag) == 0
    print("off-diagonal coincidence limit equals the diagonal formula")


if __name__ == "__main__":
    main()
