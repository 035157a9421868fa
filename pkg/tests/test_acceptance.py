"""The ten acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
Run directly with ``python tests/test_acceptance.py``.
"""

import json
import sys

import numpy as np
import pytest

import oracles
from conftest import ACCEPTANCE_LINES
from hkhitchin import cli, family, hitchin
from hkhitchin.lattice import Grid, random_configuration, random_tangent
from hkhitchin.verify import run_suite


def record(num, title, ok, detail):
    line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append((num, line))
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def suites():
    return {N: run_suite(Grid(N), seed=1) for N in (16, 32)}


def worst(suites, name):
    return max(s.checks[name].measured for s in suites.values())


def checks_pass(suites, names):
    return all(s.checks[n].passed for s in suites.values() for n in names)


def test_criterion_01_quaternion_algebra(suites):
    m = worst(suites, "quaternion_algebra")
    record(1, "quaternion algebra", m <= 1e-13 and checks_pass(suites, ["quaternion_algebra"]),
           f"max per-site error {m:.2e} (tol 1e-13, 100 vectors, N=16 and 32)")


def test_criterion_02_compatibility(suites):
    names = ["compat_omega_gI", "compat_q1_gJ", "compat_q2_gK"]
    m = max(worst(suites, n) for n in names)
    pd = min(s.checks["positive_definite"].measured for s in suites.values())
    record(2, "metric compatibility", m <= 1e-10 and pd > 0 and checks_pass(suites, names + ["positive_definite"]),
           f"max relative error {m:.2e} (tol 1e-10); min g(X,X)/|X|^2 over 1000 samples {pd:.3f} > 0")


def test_criterion_03_metric_chain(suites):
    names = ["metric_g1", "metric_hodge", "metric_alpha_star1"]
    m = max(worst(suites, n) for n in names)
    record(3, "metric equivalence chain", m <= 1e-10 and checks_pass(suites, names),
           f"max relative error {m:.2e} (tol 1e-10)")


def test_criterion_04_q_sum(suites):
    m = worst(suites, "q_sum")
    record(4, "Q = Q1 + i Q2", m <= 1e-10, f"max relative error {m:.2e} over 100 pairs (tol 1e-10)")


def test_criterion_05_exactness(suites):
    a = max(worst(suites, "dtheta1_analytic"), worst(suites, "dtheta2_analytic"))
    f = max(worst(suites, "dtheta1_fd"), worst(suites, "dtheta2_fd"))
    record(5, "exactness d(theta_i) = Q_i", a <= 1e-10 and f <= 1e-6,
           f"analytic {a:.2e} (tol 1e-10), finite difference {f:.2e} (tol 1e-6)")


def test_criterion_06_gauge_invariance(suites):
    const = worst(suites, "gauge_constant")
    band = suites[32].checks["gauge_band_limited"].measured
    record(6, "gauge invariance of g, Omega, Q1, Q2, theta1, theta2, energy", const <= 1e-12 and band <= 1e-6,
           f"constant gauge {const:.2e} (tol 1e-12), band-limited at N=32 {band:.2e} (tol 1e-6)")


def test_criterion_07_solver(solved_reference):
    c0, c, trace = solved_reference
    E = trace.energies
    monotone = all(b < a for a, b in zip(E, E[1:]))
    # directional derivatives of the independent oracle energy against the analytic gradient
    ga, gp = hitchin.energy_gradient(c0)
    g = c0.grid
    err = 0.0
    for s in range(5):
        V = random_tangent(100 + s, g, cutoff=g.N // 8)
        eps = 1e-6
        ep = oracles.energy((c0.a_zbar + eps * V.alpha_zbar).data, (c0.phi_z + eps * V.gamma_z).data, g)
        em = oracles.energy((c0.a_zbar - eps * V.alpha_zbar).data, (c0.phi_z - eps * V.gamma_z).data, g)
        fd = (ep - em) / (2 * eps)
        an = (np.vdot(ga.data, V.alpha_zbar.data) + np.vdot(gp.data, V.gamma_z.data)).real
        err = max(err, abs(an - fd) / abs(fd))
    ok = (trace.status == "converged" and trace.final_energy <= 1e-12 and trace.iterations <= 5000
          and monotone and err <= 1e-6)
    record(7, "gradient-flow solver", ok,
           f"energy {trace.final_energy:.3e} after {trace.iterations} iterations (tol 1e-12, budget 5000), "
           f"monotone={monotone}, gradient vs FD {err:.2e} (tol 1e-6)")


def test_criterion_08_lambda_family(suites):
    names = ["f_lambda_decomposition", "special_lambda", "tau_curvatures"]
    vals = {n: worst(suites, n) for n in names}
    record(8, "F_lambda family", all(v <= 1e-10 for v in vals.values()),
           ", ".join(f"{n} {v:.2e}" for n, v in vals.items()) + " (tol 1e-10, 16 roots)")


def test_criterion_09_flatness(solved_reference):
    exact = hitchin.normal_higgs_fixture(Grid(16))
    f_exact = max(family.flatness_scan(exact, 16).flatness_norms)
    _, c, _ = solved_reference
    scan = family.flatness_scan(c, 16)
    f_solved = max(scan.flatness_norms)
    lap = max(scan.decomposition_residuals)
    rand = random_configuration(9, Grid(16), 2)
    lap = max(lap, max(family.flatness_scan(rand, 16).decomposition_residuals))
    record(9, "flatness equivalence", f_exact <= 1e-12 and f_solved <= 1e-5 and lap <= 1e-11,
           f"exact {f_exact:.2e} (tol 1e-12), solved {f_solved:.2e} (tol 1e-5), "
           f"per-site Laurent {lap:.2e} (tol 1e-11)")


def test_criterion_10_reproducibility(tmp_path):
    bodies = []
    for i, threads in enumerate((1, 1, 4)):
        out = tmp_path / f"run{i}"
        assert cli.main(["verify", "--out", str(out), "--threads", str(threads)]) == 0
        obj = json.loads((out / "report.json").read_text())
        obj.pop("timing")
        bodies.append(obj)
    same = bodies[0] == bodies[1] == bodies[2]
    record(10, "reproducibility", same, f"verify reports identical apart from timing for --threads 1, 1, 4: {same}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
