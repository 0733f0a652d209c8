"""Sector enumeration, exact combinatorics, kernel assembly and the
Monte Carlo term estimates."""

import math
from fractions import Fraction

import numpy as np
import pytest

from sgqei import series
from sgqei.geometry import BoostedLine, StaticLine
from sgqei.propagators import Regulators, dyson, feynman, retarded, wightman
from sgqei.series import (
    MCConfig,
    ModelParams,
    SeriesIndex,
    bar_cal_G,
    cal_E,
    cal_G,
    coefficient,
    conservation_check,
    enumerate_sector,
    identity_sums,
    majorant,
    majorant_odd,
    majorant_tail,
    order1_quadrature,
    term_value,
    theta_spacetime,
    theta_worldline,
    vanishing_sum,
)
from sgqei.smearing import Bump2D, Gaussian2D, GaussianWindow, Plateau2D
from sgqei.states import ThermalWindowState, VacuumState

RNG = np.random.default_rng(20240819)
BETA = math.sqrt(math.pi)


def make_params(**kw):
    return ModelParams(beta=kw.pop("beta", BETA), g=kw.pop("g", Gaussian2D()), **kw)


# ---------------------------------------------------------------------------
# enumeration and combinatorics


def test_sector_sizes_low_orders():
    sizes = {n: [len(enumerate_sector(n, s)) for s in (-1, 0, 1)] for n in range(5)}
    assert sizes[0] == [0, 1, 0]
    assert sizes[1] == [2, 0, 2]
    assert sizes[2] == [0, 4, 0]
    assert sizes[3] == [6, 0, 6]
    assert sizes[4] == [0, 9, 0]


def test_enumerate_partitions_all_neutral_indices():
    # every (k, l, m) with the right parity shows up in exactly one sector
    for n in range(6):
        seen = set()
        for s in (-1, 0, 1):
            for idx in enumerate_sector(n, s):
                assert idx.sector == s
                assert idx.anti_x + idx.time_x == idx.count_x
                assert idx.anti_y + idx.time_y == idx.count_y
                seen.add((idx.k, idx.l, idx.m))
        expected = {(k, l, m)
                    for k in range(n + 1)
                    for l in range(k + 1)
                    for m in range(n - k + 1)
                    if abs(2 * (l + m) - n) <= 1}
        assert seen == expected


def test_series_index_validation():
    with pytest.raises(ValueError):
        SeriesIndex(2, 3, 0, 0)
    with pytest.raises(ValueError):
        SeriesIndex(2, 1, 2, 0)
    with pytest.raises(ValueError):
        SeriesIndex(4, 0, 0, 0)  # sector -4 does not survive neutrality


def test_coefficient_examples():
    assert coefficient(SeriesIndex(1, 0, 0, 0)) == 1j
    assert coefficient(SeriesIndex(1, 1, 0, 0)) == -1j
    assert coefficient(SeriesIndex(2, 1, 0, 1)) == 1.0
    assert coefficient(SeriesIndex(2, 0, 0, 1)) == -1.0
    assert coefficient(SeriesIndex(4, 2, 1, 1)) == complex(Fraction(1, 1))
    assert coefficient(SeriesIndex(3, 1, 1, 1)) == 1j  # i^3 * (-1) / 1


def test_identity_sums_closed_forms():
    for n in range(33):
        even, odd = identity_sums(n)
        assert even == Fraction(2 ** (2 * n), math.factorial(n) ** 2)
        assert odd == Fraction(2 ** (2 * n + 1),
                               math.factorial(n) * math.factorial(n + 1))


def test_identity_sums_worked_example_and_range():
    _, odd5 = identity_sums(5)
    assert odd5 == Fraction(2 ** 11, math.factorial(5) * math.factorial(6))
    identity_sums(64)
    with pytest.raises(ValueError):
        identity_sums(65)


# ---------------------------------------------------------------------------
# pair exponential


def test_cal_e_empty_configuration_is_one():
    r = Regulators(epsilon=1e-3)
    idx = SeriesIndex(0, 0, 0, 0)
    val = cal_E(idx, np.zeros((0, 2)), np.zeros((0, 2)), r, make_params(), VacuumState())
    assert val == 1.0 + 0.0j


def test_cal_e_single_point_state_weight():
    r = Regulators(epsilon=1e-3)
    idx = SeriesIndex(1, 0, 0, 0)
    state = ThermalWindowState(1.0)
    val = cal_E(idx, np.zeros((0, 2)), np.array([[0.3, -0.2]]), r, make_params(), state)
    expect = math.exp(-0.5 * math.pi * state.coincidence())
    np.testing.assert_allclose(val, expect, rtol=1e-12)


def test_cal_e_order_two_closed_form():
    # one time-ordered x against one time-ordered y: exp(i beta^2 H_F)
    r = Regulators(epsilon=1e-3)
    p = make_params()
    idx = SeriesIndex(2, 0, 0, 1)
    for _ in range(20):
        xs = RNG.normal(size=(1, 2))
        ys = RNG.normal(size=(1, 2))
        du = (xs[0, 0] - xs[0, 1]) - (ys[0, 0] - ys[0, 1])
        dv = (xs[0, 0] + xs[0, 1]) - (ys[0, 0] + ys[0, 1])
        expect = np.exp(1j * p.beta_sq * feynman(du, dv, r.epsilon, r.mu))
        np.testing.assert_allclose(cal_E(idx, xs, ys, r, p, VacuumState()),
                                   complex(expect), rtol=1e-12)


def test_cal_e_exchange_symmetry():
    r = Regulators(epsilon=2e-3)
    p = make_params()
    state = ThermalWindowState(1.0)
    n = 2
    for _ in range(10):
        xs = RNG.normal(size=(n, 2))
        ys = RNG.normal(size=(n, 2))
        for k in range(2 * n + 1):
            for l in range(max(0, k - n), min(k, n) + 1):
                idx = SeriesIndex(2 * n, k, l, n - l)
                swap = SeriesIndex(2 * n, k, k - l, n - (k - l))
                a = cal_E(idx, xs, ys, r, p, state)
                b = cal_E(swap, ys, xs, r, p, state)
                np.testing.assert_allclose(a, b, rtol=1e-12)


# ---------------------------------------------------------------------------
# linear kernel sums


def test_cal_g_no_points_is_zero():
    r = Regulators(epsilon=1e-3)
    idx = SeriesIndex(0, 0, 0, 0)
    z = (0.1, 0.2)
    assert cal_G(idx, np.zeros((0, 2)), np.zeros((0, 2)), z, r, make_params(),
                 VacuumState()) == 0.0


def test_cal_g_single_point_values():
    r = Regulators(epsilon=1e-3)
    p = make_params()
    state = ThermalWindowState(1.0)
    idx = SeriesIndex(1, 0, 0, 1)  # one time-ordered x
    x = np.array([[0.7, -0.4]])
    z = (0.05, 0.3)
    du = (x[0, 0] - x[0, 1]) - (z[0] - z[1])
    dv = (x[0, 0] + x[0, 1]) - (z[0] + z[1])
    expect = feynman(du, dv, r.epsilon, r.mu) - 1j * state.w(du, dv)
    np.testing.assert_allclose(cal_G(idx, x, np.zeros((0, 2)), z, r, p, state),
                               complex(expect), rtol=1e-12)


def test_cal_g_minus_bar_is_retarded_sum():
    # the orderings collapse to retarded propagators; state part cancels
    r = Regulators(epsilon=1e-6)
    p = make_params()
    state = ThermalWindowState(1.0)
    idx = SeriesIndex(4, 2, 1, 1)
    for _ in range(5):
        xs = RNG.normal(size=(2, 2))
        ys = RNG.normal(size=(2, 2))
        z = RNG.normal(size=2)
        diff = cal_G(idx, xs, ys, z, r, p, state) - bar_cal_G(idx, xs, ys, z, r, p, state)
        acc = 0.0
        for row, sgn in ((xs[0], 1.0), (xs[1], 1.0), (ys[0], -1.0), (ys[1], -1.0)):
            du = (row[0] - row[1]) - (z[0] - z[1])
            dv = (row[0] + row[1]) - (z[0] + z[1])
            acc += sgn * retarded(du, dv, r.epsilon)
        np.testing.assert_allclose(diff, acc, atol=1e-10)


def test_cal_g_derivatives_match_finite_differences():
    r = Regulators(epsilon=5e-3)
    p = make_params()
    state = ThermalWindowState(1.0)
    idx = SeriesIndex(2, 1, 0, 1)
    xs = RNG.normal(size=(1, 2))
    ys = RNG.normal(size=(1, 2))
    z = np.array([0.12, -0.33])
    h = 1e-6
    for fn in (cal_G, bar_cal_G):
        for comp, step in ((1, np.array([0.5, -0.5])), (2, np.array([0.5, 0.5]))):
            plus = fn(idx, xs, ys, z + h * step, r, p, state)
            minus = fn(idx, xs, ys, z - h * step, r, p, state)
            fd = (plus - minus) / (2.0 * h)
            kw = {"du": 1} if comp == 1 else {"dv": 1}
            np.testing.assert_allclose(fn(idx, xs, ys, z, r, p, state, **kw),
                                       fd, rtol=2e-5)


# ---------------------------------------------------------------------------
# vanishing sums


def test_vanishing_sum_order_one_pointwise():
    r = Regulators(epsilon=1e-3)
    p = make_params()
    for _ in range(10):
        xs = RNG.normal(size=(1, 2))
        ys = RNG.normal(size=(1, 2))
        assert abs(vanishing_sum(1, xs, ys, r, p)) <= 1e-12


def test_vanishing_sum_order_one_state_independent():
    r = Regulators(epsilon=1e-3)
    p = make_params()
    state = ThermalWindowState(1.0)
    xs = RNG.normal(size=(1, 2))
    ys = RNG.normal(size=(1, 2))
    assert abs(vanishing_sum(1, xs, ys, r, p, state)) <= 1e-12


def test_vanishing_sum_order_two_seeded_configs():
    r = Regulators(epsilon=1e-3)
    p = make_params()
    f = math.factorial
    for seed in range(20):
        rng = np.random.default_rng(3000 + seed)
        xs = rng.normal(size=(2, 2))
        ys = rng.normal(size=(2, 2))
        val = vanishing_sum(2, xs, ys, r, p)
        # scale: largest weighted term in the sum
        scale = 0.0
        for k in range(5):
            for l in range(max(0, k - 2), min(k, 2) + 1):
                idx = SeriesIndex(4, k, l, 2 - l)
                w = 1.0 / (f(l) * f(k - l) * f(2 - l) * f(2 - k + l))
                scale = max(scale, w * abs(cal_E(idx, xs, ys, r, p, VacuumState())))
        assert abs(val) <= 1e-10 * scale


# ---------------------------------------------------------------------------
# energy-density kernels


def test_theta_worldline_order_zero():
    r = Regulators(epsilon=1e-3)
    p = make_params()
    idx = SeriesIndex(0, 0, 0, 0)
    none = np.zeros((0, 2))
    assert theta_worldline(idx, none, none, 0.3, StaticLine(), r, p, VacuumState()) == 0.0
    state = ThermalWindowState(1.0)
    wl = BoostedLine(0.7)
    fr = wl.frame(0.3)
    cu, cv = state.hessian_coincidence()
    np.testing.assert_allclose(
        theta_worldline(idx, none, none, 0.3, wl, r, p, state),
        fr.a**2 * cu + fr.b**2 * cv, rtol=1e-12)


def test_theta_worldline_vertex_hand_assembled():
    r = Regulators(epsilon=1e-3)
    p = make_params()
    pref = 1.0 - p.beta_sq / (8.0 * math.pi)
    wl = StaticLine()
    for _ in range(10):
        tau = RNG.normal()
        ypt = RNG.normal(size=(1, 2))
        z = wl.position(tau)
        du = (ypt[0, 0] - ypt[0, 1]) - (z[0] - z[1])
        dv = (ypt[0, 0] + ypt[0, 1]) - (z[0] + z[1])
        # time-ordered y insertion: the kernel sum is -H_F, sector is -1
        got = theta_worldline(SeriesIndex(1, 0, 0, 0), np.zeros((0, 2)), ypt,
                              tau, wl, r, p, VacuumState())
        expect = -pref * p.g(z[0], z[1]) * np.exp(
            1j * p.beta_sq * feynman(du, dv, r.epsilon, r.mu))
        np.testing.assert_allclose(got, complex(expect), rtol=1e-12)
        # anti-ordered y insertion
        got = theta_worldline(SeriesIndex(1, 1, 0, 0), np.zeros((0, 2)), ypt,
                              tau, wl, r, p, VacuumState())
        expect = -pref * p.g(z[0], z[1]) * np.exp(
            1j * p.beta_sq * wightman(du, dv, r.epsilon, r.mu))
        np.testing.assert_allclose(got, complex(expect), rtol=1e-12)


def test_theta_spacetime_traceless_and_contracts_to_worldline():
    r = Regulators(epsilon=1e-3)
    p = make_params()
    state = ThermalWindowState(1.0)
    wl = BoostedLine(0.3)
    eta_inv = np.diag([-1.0, 1.0])
    for idx in (SeriesIndex(2, 1, 0, 1), SeriesIndex(2, 0, 0, 1), SeriesIndex(2, 2, 1, 0)):
        xs = RNG.normal(size=(1, 2))
        ys = RNG.normal(size=(1, 2))
        tau = RNG.normal()
        tens = theta_spacetime(idx, xs, ys, wl.position(tau), r, p, state)
        trace = np.tensordot(eta_inv, tens)
        assert abs(trace) <= 1e-12 * np.abs(tens).max()
        fr = wl.frame(tau)
        v = np.array([fr.v0, fr.v1])
        np.testing.assert_allclose(
            v @ tens @ v,
            theta_worldline(idx, xs, ys, tau, wl, r, p, state), rtol=1e-12)


def test_theta_spacetime_vertex_is_diagonal():
    r = Regulators(epsilon=1e-3)
    p = make_params()
    idx = SeriesIndex(1, 0, 0, 0)
    tens = theta_spacetime(idx, np.zeros((0, 2)), RNG.normal(size=(1, 2)),
                           (0.1, 0.4), r, p, VacuumState())
    assert tens[0, 1] == 0.0 and tens[1, 0] == 0.0
    np.testing.assert_allclose(tens[0, 0], -tens[1, 1], rtol=1e-15)


# ---------------------------------------------------------------------------
# first-order reference quadrature

# frozen by tests/oracles/order1_vertex.py (independent scheme with the
# time integral done in closed form)
ORACLE_RUNGS = (-31.40674848, -31.51355199, -31.56802899)
ORACLE_CLOSED_FORM = -31.62368390


def test_order1_quadrature_matches_oracle():
    q = order1_quadrature(StaticLine(), GaussianWindow(1.0), make_params())
    np.testing.assert_allclose(q.rungs, ORACLE_RUNGS, rtol=1e-6)
    assert q.ladder == (1e-2, 5e-3, 2.5e-3)
    # extrapolation consistent with the regulator-free closed form
    assert abs(q.value - ORACLE_CLOSED_FORM) <= 1e-4 * abs(ORACLE_CLOSED_FORM)


# ---------------------------------------------------------------------------
# Monte Carlo terms


def test_term_value_order_zero_paths():
    mc = MCConfig(samples=10)
    p = make_params()
    est = term_value(0, 0, VacuumState(), p, StaticLine(), GaussianWindow(1.0), mc)
    assert (est.value, est.std_error, est.samples) == (0.0, 0.0, 0)
    state = ThermalWindowState(1.0)
    est = term_value(0, 0, state, p, StaticLine(), GaussianWindow(1.0), mc)
    cu, cv = state.hessian_coincidence()
    np.testing.assert_allclose(est.value, (cu + cv) * math.sqrt(2.0 * math.pi),
                               rtol=1e-8)
    assert est.std_error == 0.0 and not est.flagged


def test_term_value_empty_sector_and_order_cap():
    mc = MCConfig(samples=10, max_order=4)
    p = make_params()
    est = term_value(1, 0, VacuumState(), p, StaticLine(), GaussianWindow(1.0), mc)
    assert est.samples == 0 and est.value == 0.0
    with pytest.raises(ValueError):
        term_value(5, -1, VacuumState(), p, StaticLine(), GaussianWindow(1.0), mc)


def test_term_value_first_order_matches_quadrature():
    p = make_params()
    wl = StaticLine()
    f = GaussianWindow(1.0)
    mc = MCConfig(samples=200_000, seed=2024)
    minus = term_value(1, -1, VacuumState(), p, wl, f, mc)
    plus = term_value(1, 1, VacuumState(), p, wl, f, mc)
    total = minus.value + plus.value
    err = math.hypot(minus.std_error, plus.std_error)
    ref = order1_quadrature(wl, f, p).value
    assert abs(total - ref) <= 3.0 * err
    assert total < 0.0


def test_term_value_thread_count_invariance():
    p = make_params()
    wl = StaticLine()
    f = GaussianWindow(1.0)
    one = term_value(1, -1, VacuumState(), p, wl, f,
                     MCConfig(samples=20_000, seed=7, threads=1))
    four = term_value(1, -1, VacuumState(), p, wl, f,
                      MCConfig(samples=20_000, seed=7, threads=4))
    assert one == four


def test_term_value_order_two_imaginary_part_consistent_with_zero():
    p = make_params()
    mc = MCConfig(samples=60_000, seed=11)
    est = term_value(2, 0, VacuumState(), p, StaticLine(), GaussianWindow(1.0), mc)
    assert abs(est.imag_value) <= 3.0 * est.imag_std_error


# ---------------------------------------------------------------------------
# majorants


def test_majorant_worked_example():
    np.testing.assert_allclose(majorant(3, 1.0, 1.0, 0.0), 16.0 * 64.0 / 6.0,
                               rtol=1e-15)


def test_majorant_crossover_and_tail():
    beta = BETA
    ratios = [majorant(n + 1, 1.0, 1.0, beta) / majorant(n, 1.0, 1.0, beta)
              for n in range(20)]
    assert ratios[0] > 1.0       # envelope first grows
    assert ratios[-1] < 1.0      # factorial eventually wins
    crossings = sum(1 for a, b in zip(ratios[:-1], ratios[1:]) if a >= 1.0 > b)
    assert crossings == 1        # single crossover
    tail = majorant_tail(8, 1.0, 1.0, beta)
    assert tail > majorant(8, 1.0, 1.0, beta) + majorant_odd(8, 1.0, 1.0, beta)
    assert np.isfinite(tail)


def test_majorant_rejects_strong_coupling():
    with pytest.raises(ValueError):
        majorant(2, 1.0, 1.0, 4.0)


# ---------------------------------------------------------------------------
# conservation


def test_conservation_order_zero_exact():
    p = ModelParams(beta=math.sqrt(0.2), g=Plateau2D(-4.0, 4.0, -4.0, 4.0, ramp=1.0))
    f2d = Bump2D(-1.5, 1.5, -1.5, 1.5)
    dt, dx = conservation_check(0, f2d, p, VacuumState(), MCConfig(samples=100, seed=1))
    assert dt.value == 0.0 and dt.std_error == 0.0
    assert dx.value == 0.0 and dx.std_error == 0.0


def test_conservation_rejects_higher_orders():
    p = ModelParams(beta=math.sqrt(0.2), g=Plateau2D(-4.0, 4.0, -4.0, 4.0, ramp=1.0))
    with pytest.raises(ValueError):
        conservation_check(2, Bump2D(-1.5, 1.5, -1.5, 1.5), p, VacuumState(),
                           MCConfig(samples=100, seed=1))


def test_conservation_order_one_within_noise():
    """Smeared divergence at first order, both components consistent with
    zero.  Slow: one minute of quadrature-in-Monte-Carlo."""
    p = ModelParams(beta=math.sqrt(0.2), g=Plateau2D(-4.0, 4.0, -4.0, 4.0, ramp=1.0))
    f2d = Bump2D(-1.5, 1.5, -1.5, 1.5)
    mc = MCConfig(samples=20_000, seed=2024, threads=4)
    dt, dx = conservation_check(1, f2d, p, VacuumState(), mc)
    assert dt.std_error > 0.0 and dx.std_error > 0.0
    assert abs(dt.value) <= 3.0 * dt.std_error
    assert abs(dx.value) <= 3.0 * dx.std_error
