import math

import numpy as np
from scipy.integrate import quad

from sgqei.smearing import (
    Bump2D,
    BumpWindow,
    Gaussian2D,
    GaussianWindow,
    Plateau2D,
    SquaredWindow,
    TruncationWindow,
    smoothstep,
    smoothstep_prime,
)


def fd(fun, x, order, h=None):
    # step sizes chosen so the difference stays above the float64 noise floor
    if order == 1:
        h = h or 1e-5
        return (fun(x + h) - fun(x - h)) / (2 * h)
    if order == 2:
        h = h or 1e-4
        return (fun(x + h) - 2 * fun(x) + fun(x - h)) / h**2
    if order == 3:
        h = h or 1e-3
        return (fun(x + 2 * h) - 2 * fun(x + h) + 2 * fun(x - h) - fun(x - 2 * h)) / (2 * h**3)
    raise ValueError


def test_gaussian_derivatives():
    f = GaussianWindow(sigma=1.3, center=0.4, amplitude=2.0)
    for tau in (-1.2, 0.0, 0.7, 2.1):
        for order in (1, 2, 3):
            np.testing.assert_allclose(f.deriv(tau, order), fd(f, tau, order), rtol=2e-5, atol=2e-5)


def test_gaussian_integrals():
    f = GaussianWindow(sigma=0.8, amplitude=1.5)
    np.testing.assert_allclose(f.l1_norm(), quad(f, -20, 20)[0], rtol=1e-10)
    np.testing.assert_allclose(f.l2_norm_sq(), quad(lambda t: f(t) ** 2, -20, 20)[0], rtol=1e-10)
    np.testing.assert_allclose(
        f.deriv_l2_sq(), quad(lambda t: f.deriv(t, 1) ** 2, -20, 20)[0], rtol=1e-10
    )


def test_gaussian_fourier_matches_quadrature():
    f = GaussianWindow(sigma=1.1, center=-0.3)
    for p in (0.0, 0.5, 2.0):
        re = quad(lambda t: f(t) * math.cos(p * t), -20, 20)[0]
        im = -quad(lambda t: f(t) * math.sin(p * t), -20, 20)[0]
        np.testing.assert_allclose(f.fourier(p), re + 1j * im, atol=1e-10)


def test_bump_derivatives_and_support():
    f = BumpWindow(-2.0, 1.0, amplitude=0.7)
    assert f(-2.0) == 0.0 and f(1.0) == 0.0 and f(2.0) == 0.0
    assert f(-0.5) > 0.0
    for tau in (-1.7, -0.5, 0.2, 0.8):
        for order in (1, 2, 3):
            np.testing.assert_allclose(
                f.deriv(tau, order), fd(f, tau, order), rtol=5e-4, atol=5e-6
            )


def test_sampling_matches_density():
    rng = np.random.default_rng(5)
    for f in (GaussianWindow(1.0), BumpWindow(-3.0, 3.0)):
        draws = f.sample(rng, 200_000)
        hist, edges = np.histogram(draws, bins=50, density=True)
        mids = 0.5 * (edges[1:] + edges[:-1])
        np.testing.assert_allclose(hist, f.pdf(mids), atol=0.02)


def test_squared_window_derivatives():
    base = GaussianWindow(sigma=1.2, center=0.1)
    sq = SquaredWindow(base)
    for tau in (-0.8, 0.3, 1.4):
        for order in (1, 2, 3):
            np.testing.assert_allclose(
                sq.deriv(tau, order), fd(sq, tau, order), rtol=2e-4, atol=2e-5
            )
    np.testing.assert_allclose(sq.l1_norm(), quad(sq, -20, 20)[0], rtol=1e-10)
    draws = sq.sample(np.random.default_rng(6), 100_000)
    np.testing.assert_allclose(np.std(draws), base.sigma / math.sqrt(2), rtol=0.02)


def test_smoothstep_shape():
    xs = np.linspace(-1.0, 2.0, 301)
    vals = smoothstep(xs)
    assert np.all(vals >= 0.0) and np.all(vals <= 1.0)
    assert np.all(np.diff(vals) >= -1e-15)
    assert smoothstep(np.array(0.5)) == 0.5
    np.testing.assert_allclose(
        smoothstep_prime(xs), np.gradient(vals, xs), atol=5e-2
    )
    # ramp slope stays below 2, so chi built from half-width ramps has |chi'| <= 1
    assert np.max(smoothstep_prime(xs)) <= 2.0 + 1e-12


def test_truncation_window_bounds():
    f = GaussianWindow(1.0)
    for n in (4.0, 6.0, 8.0):
        fn = TruncationWindow(f, n)
        taus = np.linspace(-n - 3, n + 3, 1201)
        chi = fn.chi(taus)
        assert np.all((chi >= 0) & (chi <= 1.0 + 1e-12))
        inner = np.abs(taus) <= n
        np.testing.assert_allclose(chi[inner], 1.0, atol=1e-12)
        assert np.all(chi[np.abs(taus) >= n + 2] == 0.0)
        assert np.max(np.abs(fn.chi_prime(taus))) <= 1.0 + 1e-12
        bound = np.abs(f(taus)) + np.abs(f.deriv(taus, 1))
        assert np.all(np.abs(fn.deriv(taus, 1)) <= bound + 1e-12)


def test_truncation_derivative_matches_fd():
    fn = TruncationWindow(GaussianWindow(1.0), 4.0)
    for tau in (-5.5, -4.2, 0.0, 4.6, 5.9):
        np.testing.assert_allclose(fn.deriv(tau, 1), fd(fn, tau, 1, h=1e-5), atol=1e-6)


def test_gaussian2d_norms_and_sampling():
    g = Gaussian2D(2.0, 2.0, amplitude=0.3)
    np.testing.assert_allclose(g.l1_norm(), 0.3 * 2 * math.pi * 4.0, rtol=1e-12)
    t, x = g.sample(np.random.default_rng(7), 100_000)
    np.testing.assert_allclose(np.std(t), 2.0, rtol=0.02)
    np.testing.assert_allclose(np.std(x), 2.0, rtol=0.02)
    np.testing.assert_allclose(
        g(1.0, -1.0) / g.l1_norm(), g.pdf(1.0, -1.0), rtol=1e-12
    )


def test_bump2d_partials():
    f = Bump2D(-1.0, 1.0, -2.0, 2.0, amplitude=1.1)
    h = 1e-5
    t0, x0 = 0.3, -0.6
    np.testing.assert_allclose(
        f.partial(t0, x0, 1, 0), (f(t0 + h, x0) - f(t0 - h, x0)) / (2 * h), rtol=1e-4
    )
    np.testing.assert_allclose(
        f.partial(t0, x0, 1, 2),
        (f.partial(t0 + h, x0, 0, 2) - f.partial(t0 - h, x0, 0, 2)) / (2 * h),
        rtol=1e-4,
    )


def test_plateau_flat_region():
    g = Plateau2D(-4.0, 4.0, -5.0, 5.0, ramp=1.0, amplitude=0.2)
    for t in (-2.9, 0.0, 2.9):
        for x in (-3.9, 0.0, 3.9):
            np.testing.assert_allclose(g(t, x), 0.2, rtol=1e-12)
    assert g(-4.0, 0.0) == 0.0
    assert g(0.0, 5.0) == 0.0
