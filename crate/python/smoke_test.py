#!/usr/bin/env python3
"""Smoke test for the Python bindings.

Builds the extension (if needed), loads it straight from the cargo target
directory, and exercises the main operations against known values.

Usage: python3 python/smoke_test.py
"""

import math
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_and_load():
    lib = REPO / "target" / "release" / "libalgrf_py.so"
    if not lib.exists():
        print("building algrf-py ...")
        subprocess.run(
            ["cargo", "build", "-p", "algrf-py", "--release"],
            cwd=REPO,
            check=True,
        )
    tmp = Path(tempfile.mkdtemp(prefix="algrf-smoke-"))
    shutil.copy2(lib, tmp / "algrf.so")
    sys.path.insert(0, str(tmp))
    import algrf  # noqa: E402

    return algrf


def approx(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


def main():
    algrf = build_and_load()

    # fiber spectrum: unit square torus
    spec = algrf.FiberSpectrum.flat_torus([1.0, 1.0], 200.0)
    approx(spec.smallest_positive_sqrt(), 2.0 * math.pi, 1e-12)
    eigs = spec.eigenvalues()
    assert eigs[0] == (0.0, 1)
    approx(eigs[1][0], 4.0 * math.pi**2, 1e-9)
    assert eigs[1][1] == 4
    assert spec.validate() == []
    round_trip = algrf.FiberSpectrum.from_json(spec.to_json())
    approx(round_trip.volume, 1.0, 0.0)

    # census
    summary = algrf.census_summary()
    assert summary["table1_total"] == 848
    assert summary["table2_total"] == 767
    assert summary["table3_total"] == 23
    assert summary["grand_total"] == 1638
    assert summary["distinct_triples"] == 64
    assert len(summary["discrepancies"]) == 1
    rows = algrf.census_rows()
    assert len(rows) == 65
    orders = algrf.admissible_orders()
    assert len(orders) == 39 and max(orders) == 66 and 60 not in orders

    # volume-form nonlinearity: λ = (a, b) gives Q = −ab
    approx(algrf.ma_nonlinearity_q([0.3, -0.2]), 0.06, 1e-15)
    t = 0.11
    approx(algrf.ma_nonlinearity_q([t, t, t]), -(3 * t**2 + t**3), 1e-15)

    # energy decay exponent
    approx(algrf.energy_exponent(0.5), 1.0, 0.0)
    approx(algrf.energy_exponent(0.25), 2.0, 0.0)

    # decay fit on an exact power law
    samples = [(5.0 * 1.5**i, 2.0 * (5.0 * 1.5**i) ** -1.5) for i in range(12)]
    beta, r2 = algrf.fit_decay(samples)
    approx(beta, 1.5, 1e-9)
    assert r2 > 1 - 1e-9

    # Green solve residual
    sol = algrf.greens_solve_bump(2, 1)
    assert sol["relative_residual"] <= 1e-6
    assert len(sol["r"]) == 512

    # harmonic profile decays like r^{-3} for the (3, 0) mode
    r, u = algrf.harmonic_profile(3, 0)
    mid = len(r) // 2
    approx(u[mid] * r[mid] ** 3, 1.0, 1e-9)

    # Poincaré constant of a thin annulus is about the mean radius squared
    p = algrf.poincare_annulus(10.0, 10.1, 4)
    assert abs(p / 101.0 - 1.0) < 0.05

    # cutoff moment of the standard trapezoid
    approx(algrf.gamma_chi("trapezoid"), 5.0, 1e-12)

    # constraint solve at K = 1 collapses to the closed form
    c = algrf.constraint(3, 1.0, 2, 1.0, 0.7, 1.0)
    closed = 2 * 0.7 * c["t"] ** 2 / (2 * math.pi * 6 * 1.0 * c["gamma_chi"])
    approx(c["s0"], closed, 1e-9 * abs(closed))
    # at K = 1 the interval collapses to a point; allow root-finder slack
    lo, hi = c["s0_interval"]
    pad = 1e-9 * max(abs(lo), abs(hi))
    assert lo - pad <= c["s0"] <= hi + pad

    # radial potential of f ≡ 1: closed form on the support
    rho, printed, corrected = algrf.radial_potential_constant(1.0)
    for p_, h_p, h_c in zip(rho, printed, corrected):
        if p_ <= 1.0:
            expect = 2 * math.log(p_) + 1 - p_**2
            assert abs(h_p - expect) < 1e-6
            assert abs(h_c + expect) < 1e-6
        else:
            assert h_p == 0.0 and h_c == 0.0

    # one bootstrap step doubles the decay exponent
    chain = algrf.bootstrap_chain(0.5, 1)
    (step, beta_in, beta_q, beta_out) = chain[0]
    assert step == 0 and beta_in == 0.5
    assert abs(beta_q - 1.0) < 0.1
    assert beta_out >= 0.95

    print("smoke test: all checks passed")


if __name__ == "__main__":
    main()
