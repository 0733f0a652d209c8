"""First-order Monte Carlo against the deterministic quadrature oracle."""

import math
import time

from sgqei.geometry import StaticLine
from sgqei.series import MCConfig, ModelParams, order1_quadrature, term_value
from sgqei.smearing import Gaussian2D, GaussianWindow, SquaredWindow
from sgqei.states import VacuumState

wl = StaticLine()
# The QEI weight is the square of the sampling window; both routes get
# the same weight object so the comparison is exact.
w2 = SquaredWindow(GaussianWindow(1.0))
params = ModelParams(beta=math.sqrt(math.pi), g=Gaussian2D())

ref = order1_quadrature(wl, w2, params)
print(f"quadrature value: {ref.value:+.6f}")

for samples in (20_000, 80_000, 320_000):
    mc = MCConfig(samples=samples, seed=2024, threads=4)
    t0 = time.time()
    lo = term_value(1, -1, VacuumState(), params, wl, w2, mc)
    hi = term_value(1, +1, VacuumState(), params, wl, w2, mc)
    value = lo.value + hi.value
    sigma = math.hypot(lo.std_error, hi.std_error)
    z = abs(value - ref.value) / sigma
    print(f"N = {samples:7d}: {value:+.6f} +- {sigma:.6f}"
          f"  z = {z:.2f}  ({time.time() - t0:.1f}s)")
