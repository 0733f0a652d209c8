"""Regenerate the frozen first-order reference values used in test_series.py.

Both first-order sectors combine, for the static line with a unit Gaussian
window, the default Gaussian cutoff and W = 0, into

    T1(eps) = (7/8) * int ds dd  C(s, d) Im[((eps - i du)(eps - i dv))^{-1/4}]

over s < 0, with du = (s+d)/2, dv = (s-d)/2 and the closed-form weight

    C(s, d) = sqrt(4 pi / 3) exp(-5 s^2/192 - d^2/32)

obtained by doing the time integral of f(tau) g(tau, 0) g(y(tau, s, d))
analytically.  The timelike interior is integrated after d = |s| sin(theta),
which removes the quarter-power cone growth, so plain Gauss-Legendre panels
converge to well below 1e-6 relative.  The eps -> 0 limit has its own closed
form over the past quadrant, kept as an independent consistency number.  A
common-random-number Monte Carlo cross-check is included as well.  Run
directly to print everything.
"""

import math

import numpy as np

ALPHA = 0.25        # beta^2 / 4 pi at beta^2 = pi
PREF = 7.0 / 8.0    # 1 - beta^2 / 8 pi
LADDER = (1e-2, 5e-3, 2.5e-3)


def weight_c(s, d):
    return math.sqrt(4 * math.pi / 3) * np.exp(-5.0 * s**2 / 192.0 - d**2 / 32.0)


def kern(s, d, eps):
    du = 0.5 * (s + d)
    dv = 0.5 * (s - d)
    z = (eps - 1j * du) * (eps - 1j * dv)
    return np.imag(z ** (-ALPHA))


def gl_panel(a, b, n):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * (b - a) * x + 0.5 * (a + b), 0.5 * (b - a) * w


def t1_at_eps(eps, ns=32, nd=48, nth=48, dmax=44.0, smax=52.0):
    sb = [-smax]
    cur = -smax
    while abs(cur) > 0.05 * eps:
        cur *= 0.6
        sb.append(cur)
    sb.append(0.0)
    total = 0.0
    tn, tw = gl_panel(-0.5 * math.pi, 0.5 * math.pi, nth)
    for lo, hi in zip(sb[:-1], sb[1:]):
        sn, sw = gl_panel(lo, hi, ns)
        for s, ws in zip(sn, sw):
            a = abs(s)
            d = a * np.sin(tn)
            jac = a * np.cos(tn)
            inner = float((tw * jac) @ (weight_c(s, d) * kern(s, d, eps)))
            for sgn in (-1.0, 1.0):
                br = [a]
                w = 10 * eps
                while a + w < dmax:
                    br.append(a + w)
                    w *= 4
                br.append(dmax)
                for p0, p1 in zip(br[:-1], br[1:]):
                    dn, dw = gl_panel(p0, p1, nd)
                    inner += float(dw @ (weight_c(s, sgn * dn) * kern(s, sgn * dn, eps)))
            total += ws * inner
    return PREF * total


def t1_closed_form():
    # eps -> 0: the kernel becomes -sin(pi alpha) |du dv|^{-1/4} on the past
    # quadrant; substitute du = -xi^{4/3} (same for dv) to flatten it
    xi, wx = gl_panel(0.0, 30.0 ** 0.75, 320)
    du = -xi ** (4.0 / 3.0)
    f = np.zeros(len(xi))
    for j in range(len(xi)):
        dv = -xi ** (4.0 / 3.0)
        s = du[j] + dv
        d = du[j] - dv
        f[j] = float(wx @ weight_c(s, d))
    val = float(wx @ f) * (4.0 / 3.0) ** 2
    return -PREF * math.sin(math.pi * ALPHA) * 2.0 * val


def richardson(vals):
    a = 2 * vals[1] - vals[0]
    b = 2 * vals[2] - vals[1]
    return (4 * b - a) / 3.0


def mc_cross_check(n=1_000_000, seed=2024):
    rng = np.random.default_rng(seed)
    norm = math.sqrt(2 * math.pi) * 8 * math.pi
    acc = [0.0, 0.0]
    chunk = 1 << 14
    done = 0
    while done < n:
        m = min(chunk, n - done)
        tau = rng.normal(0.0, 1.0, m)
        ty = rng.normal(0.0, 2.0, m)
        xy = rng.normal(0.0, 2.0, m)
        du = (ty - xy) - tau
        dv = (ty + xy) - tau
        s = du + dv
        gz = np.exp(-tau**2 / 8.0)
        rung = []
        for eps in LADDER:
            b = np.where(s < 0.0, kern(s, du - dv, eps), 0.0)
            rung.append(PREF * norm * gz * 4.0 * b)
        a1 = 2 * rung[1] - rung[0]
        b1 = 2 * rung[2] - rung[1]
        vals = (4 * b1 - a1) / 3.0
        acc[0] += float(vals.sum())
        acc[1] += float((vals * vals).sum())
        done += m
    mean = acc[0] / n
    err = math.sqrt((acc[1] / n - mean * mean) / (n - 1))
    return mean, err


if __name__ == "__main__":
    vals = [t1_at_eps(e) for e in LADDER]
    for e, v in zip(LADDER, vals):
        print(f"T1({e:g}) = {v:.8f}")
    extr = richardson(vals)
    closed = t1_closed_form()
    print(f"richardson  = {extr:.8f}")
    print(f"closed form = {closed:.8f}  rel diff {abs(extr - closed) / abs(closed):.1e}")
    mean, err = mc_cross_check()
    print(f"mc 1e6      = {mean:.6f} +- {err:.6f}")
