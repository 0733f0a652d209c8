"""Assemble the worldline bound one piece at a time and print the ledger.

Runs the smallest interesting cell (vacuum state, uniformly accelerated
line) with a modest sample count, so it finishes in a few seconds while
still exercising every component that goes into the verdict.
"""

import math

from sgqei.geometry import AcceleratedLine
from sgqei.qei import k0, kh_majorant, kv_majorant, qei_verify
from sgqei.series import MCConfig, ModelParams
from sgqei.smearing import Bump2D, GaussianWindow
from sgqei.states import VacuumState

ACCEL = 1.0
SAMPLES = 8_000
SEED = 2024


def main():
    wl = AcceleratedLine(ACCEL)
    f = GaussianWindow(1.0)
    params = ModelParams(beta=math.sqrt(math.pi),
                         g=Bump2D(-1.5, 1.5, -1.5, 1.5, 1e-5))
    mc = MCConfig(samples=SAMPLES, seed=SEED, threads=2, max_order=2)

    print(f"worldline: accelerated, a = {ACCEL}")
    print(f"window:    gaussian, sigma = 1")
    print(f"coupling:  beta^2 = pi, g0 = {params.g.amplitude:g}")
    print()

    # Free part first: two one-dimensional integrals, no sampling.
    straight, accel = k0(wl, f)
    closed = math.sqrt(math.pi) * (3.0 + ACCEL ** 2) / (24.0 * math.pi)
    print(f"K0 straight     = {straight:.10f}")
    print(f"K0 acceleration = {accel:.10f}")
    print(f"K0 total        = {straight + accel:.10f}"
          f"   (closed form {closed:.10f})")
    print()

    # Remainder majorants.  Both are deterministic; only their size
    # depends on the coupling scale.
    kv = kv_majorant(params, wl, f)
    kh = kh_majorant(params, wl, f)
    print(f"KV = {kv:.6e}")
    print(f"KH = {kh:.6e}")
    print()

    # Interacting corrections, then the verdict.
    report = qei_verify(VacuumState(), wl, f, params, mc.max_order, mc)
    for n, est in report.e_truncated:
        flag = "  [flagged]" if est.flagged else ""
        print(f"E term order {n}: {est.value:+.6e} +- {est.std_error:.3e}{flag}")
    print()
    print(f"E truncated = {report.e_value:+.6e} +- {report.e_sigma:.3e}")
    print(f"K total     = {report.k_total:.6e}")
    print(f"E + K       = {report.e_value + report.k_total:+.6e}")
    print(f"verdict     = {report.verdict}")


if __name__ == "__main__":
    main()
