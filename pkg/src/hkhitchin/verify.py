"""Seeded verification suite over random tangent vectors.

Each check returns a measured error and compares it against a tolerance.
Bilinear identities are measured relative to ``sqrt(g(X,X) g(Y,Y))``, the
natural scale of a form bounded by the metric.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List


from . import family, hitchin, hk
from .lattice import (Configuration, Grid, TangentVector, constant_unitary,
                      gauge_act, gauge_act_tangent, random_configuration,
                      random_gauge, random_tangent)

DEFAULT_TOLERANCES = {
    "quaternion_algebra": 1e-13,
    "compat_omega_gI": 1e-10,
    "compat_q1_gJ": 1e-10,
    "compat_q2_gK": 1e-10,
    "positive_definite": 0.0,
    "identity4": 1e-10,
    "q_sum": 1e-10,
    "dtheta1_analytic": 1e-10,
    "dtheta2_analytic": 1e-10,
    "dtheta1_fd": 1e-6,
    "dtheta2_fd": 1e-6,
    "metric_g1": 1e-10,
    "metric_hodge": 1e-10,
    "metric_alpha_star1": 1e-10,
    "gauge_constant": 1e-12,
    "gauge_band_limited": 1e-6,
    "f_lambda_decomposition": 1e-10,
    "special_lambda": 1e-10,
    "tau_curvatures": 1e-10,
    "flatness_laurent": 1e-11,
}

SUITES = [
    ("quaternion", ["quaternion_algebra"]),
    ("compatibility", ["compat_omega_gI", "compat_q1_gJ", "compat_q2_gK", "positive_definite"]),
    ("identity4", ["identity4"]),
    ("q_sum", ["q_sum"]),
    ("exactness", ["dtheta1_analytic", "dtheta2_analytic", "dtheta1_fd", "dtheta2_fd"]),
    ("metric_chain", ["metric_g1", "metric_hodge", "metric_alpha_star1"]),
    ("gauge_invariance", ["gauge_constant", "gauge_band_limited"]),
    ("f_lambda", ["f_lambda_decomposition", "flatness_laurent"]),
    ("special_lambda", ["special_lambda"]),
    ("tau", ["tau_curvatures"]),
]


@dataclass
class CheckResult:
    measured: float
    tolerance: float
    # positive_definite is a lower bound, everything else an upper bound
    lower_bound: bool = False

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.measured):
            return False
        if self.lower_bound:
            return self.measured > self.tolerance
        return self.measured <= self.tolerance

    def to_dict(self) -> dict:
        return {"pass": self.passed, "measured": self.measured, "tolerance": self.tolerance}


@dataclass
class VerificationReport:
    checks: Dict[str, CheckResult] = field(default_factory=dict)
    environment: dict = field(default_factory=dict)
    timing: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def failing(self) -> List[str]:
        return [k for k, c in self.checks.items() if not c.passed]

    def to_dict(self, include_timing: bool = True) -> dict:
        out = {
            "pass": self.passed,
            "checks": {k: c.to_dict() for k, c in self.checks.items()},
            "environment": dict(self.environment),
        }
        if include_timing:
            out["timing"] = dict(self.timing)
        return out


def pair_scale(X: TangentVector, Y: TangentVector) -> float:
    return math.sqrt(hk.metric_g(X, X) * hk.metric_g(Y, Y))


def _pair(seed: int, i: int, grid: Grid):
    base = seed * 1_000_003 + 2 * i
    return random_tangent(base, grid), random_tangent(base + 1, grid)


class _Suite:
    def __init__(self, grid: Grid, seed: int, pairs: int, pd_samples: int, K: int):
        self.grid = grid
        self.seed = seed
        self.pairs = [_pair(seed, i, grid) for i in range(pairs)]
        self.pd_samples = pd_samples
        self.K = K
        self.config = random_configuration(seed * 7 + 1, grid, max(1, grid.N // 8))

    # each method returns {check_name: measured}

    def quaternion(self):
        I, J, K = hk.apply_I, hk.apply_J, hk.apply_K
        rels = [
            (lambda X: I(I(X)), lambda X: -X),
            (lambda X: J(J(X)), lambda X: -X),
            (lambda X: K(K(X)), lambda X: -X),
            (lambda X: I(J(X)), K),
            (lambda X: J(I(X)), lambda X: -K(X)),
            (lambda X: J(K(X)), I),
            (lambda X: K(J(X)), lambda X: -I(X)),
            (lambda X: K(I(X)), J),
            (lambda X: I(K(X)), lambda X: -J(X)),
        ]
        err = 0.0
        for X, _ in self.pairs:
            for lhs, rhs in rels:
                err = max(err, lhs(X).max_diff(rhs(X)))
        return {"quaternion_algebra": err}

    def compatibility(self):
        e = {"compat_omega_gI": 0.0, "compat_q1_gJ": 0.0, "compat_q2_gK": 0.0}
        for X, Y in self.pairs:
            s = pair_scale(X, Y)
            e["compat_omega_gI"] = max(e["compat_omega_gI"], abs(hk.omega(X, Y) - hk.metric_g(X, hk.apply_I(Y))) / s)
            e["compat_q1_gJ"] = max(e["compat_q1_gJ"], abs(hk.q1(X, Y) - hk.metric_g(X, hk.apply_J(Y))) / s)
            e["compat_q2_gK"] = max(e["compat_q2_gK"], abs(hk.q2(X, Y) - hk.metric_g(X, hk.apply_K(Y))) / s)
        gmin = math.inf
        for i in range(self.pd_samples):
            X = random_tangent(self.seed * 1_000_003 + 500_000 + i, self.grid)
            gmin = min(gmin, hk.metric_g(X, X) / (X.max_norm() ** 2))
        e["positive_definite"] = gmin
        return e

    def identity4(self):
        err = 0.0
        for X, Y in self.pairs:
            lhs, rhs = hk.identity4_sides(X, Y)
            err = max(err, abs(lhs - rhs) / pair_scale(X, Y))
        return {"identity4": err}

    def q_sum(self):
        err = 0.0
        for X, Y in self.pairs:
            q = hk.q_complex(X, Y)
            err = max(err, abs(q - (hk.q1(X, Y) + 1j * hk.q2(X, Y))) / pair_scale(X, Y))
        return {"q_sum": err}

    def exactness(self):
        e = dict.fromkeys(["dtheta1_analytic", "dtheta2_analytic", "dtheta1_fd", "dtheta2_fd"], 0.0)
        c = self.config
        for X, Y in self.pairs:
            s = pair_scale(X, Y)
            for k, qf in ((1, hk.q1), (2, hk.q2)):
                dt = hk.dtheta(k, c, X, Y)
                q = qf(X, Y)
                e[f"dtheta{k}_analytic"] = max(e[f"dtheta{k}_analytic"], abs(dt.analytic - q) / s)
                e[f"dtheta{k}_fd"] = max(e[f"dtheta{k}_fd"], abs(dt.finite_difference - q) / s)
        return e

    def metric_chain(self):
        e = {"metric_g1": 0.0, "metric_hodge": 0.0, "metric_alpha_star1": 0.0}
        for X, Y in self.pairs:
            s = pair_scale(X, Y)
            gxx = hk.metric_g(X, X)
            e["metric_g1"] = max(e["metric_g1"], abs(gxx - hk.hitchin_g1(X)) / gxx)
            e["metric_hodge"] = max(e["metric_hodge"], abs(hk.metric_g(X, Y) - hk.metric_hodge(X, Y)) / s)
            e["metric_alpha_star1"] = max(e["metric_alpha_star1"],
                                          abs(hk.metric_alpha_hodge(X, Y) - hk.metric_alpha_im(X, Y)) / s)
        return e

    def gauge_invariance(self):
        c = self.config
        out = {}
        for name, G in (("gauge_constant", constant_unitary(self.seed, self.grid)),
                        ("gauge_band_limited", random_gauge(self.seed, self.grid))):
            err = 0.0
            gc = gauge_act(G, c)
            for X, Y in self.pairs[:20]:
                gX, gY = gauge_act_tangent(G, X), gauge_act_tangent(G, Y)
                s = pair_scale(X, Y)
                for f in (hk.metric_g, hk.omega, hk.q1, hk.q2):
                    err = max(err, abs(f(gX, gY) - f(X, Y)) / s)
                sc = math.sqrt(hk.metric_g(X, X) * hk.metric_g(_higgs_vector(c), _higgs_vector(c)))
                for th in (hk.theta1, hk.theta2):
                    err = max(err, abs(th(gc, gX) - th(c, X)) / sc)
            E = hitchin.energy(c)
            err = max(err, abs(hitchin.energy(gc) - E) / E)
            out[name] = err
        return out

    def f_lambda(self):
        err = 0.0
        lams = family.roots_of_unity(self.K)
        for X, Y in self.pairs:
            s = pair_scale(X, Y)
            w1, w2, w3 = family.omega123(X, Y)
            for lam in lams:
                pred = 1j / (2 * math.pi) * (w1 + lam * w2 + w3 / lam)
                err = max(err, abs(family.f_lambda(X, Y, lam) - pred) / s)
        lap = 0.0
        for lam in lams:
            lap = max(lap, (family.flatness(self.config, lam) - family.laurent_prediction(self.config, lam)).max_norm())
        return {"f_lambda_decomposition": err, "flatness_laurent": lap}

    def special_lambda(self):
        err = 0.0
        k = 1j / (2 * math.pi)
        for X, Y in self.pairs:
            s = pair_scale(X, Y)
            om, a, b = hk.omega(X, Y), hk.q1(X, Y), hk.q2(X, Y)
            for lam, want in ((1j, k * (om - 1j * a)), (-1j, k * (om + 1j * a)),
                              (1.0, k * (om - 1j * b)), (-1.0, k * (om + 1j * b))):
                err = max(err, abs(family.f_lambda(X, Y, lam) - want) / s)
        return {"special_lambda": err}

    def tau(self):
        err = 0.0
        for X, Y in self.pairs:
            s = pair_scale(X, Y)
            tau = family.tau_curvature(X, Y)
            t1, t2 = family.trivial_bundle_curvatures(X, Y)
            err = max(err,
                      abs(tau - 1j / math.pi * hk.omega(X, Y)) / s,
                      abs(t1 - hk.q1(X, Y) / math.pi) / s,
                      abs(t2 - hk.q2(X, Y) / math.pi) / s)
        return {"tau_curvatures": err}


def _higgs_vector(c: Configuration) -> TangentVector:
    return TangentVector(c.a_zbar * 0, c.phi_z)


def run_suite(grid: Grid, seed: int = 1, pairs: int = 100, pd_samples: int = 1000, K: int = 16,
               tolerances: Dict[str, float] = None,
               clock: Callable[[], float] = time.perf_counter) -> VerificationReport:
    """Run every suite in order and collect a :class:`VerificationReport`."""
    tol = dict(DEFAULT_TOLERANCES)
    for k, v in (tolerances or {}).items():
        if k not in tol:
            raise KeyError(f"unknown check {k!r}")
        tol[k] = float(v)
    suite = _Suite(grid, seed, pairs, pd_samples, K)
    report = VerificationReport(environment={
        "grid": {"N": grid.N, "Lx": grid.Lx, "Ly": grid.Ly, "n": grid.n},
        "seed": seed, "scheme": grid.deriv_scheme, "pairs": pairs, "K": K,
    })
    for name, _ in SUITES:
        t0 = clock()
        measured = getattr(suite, name)()
        report.timing[name] = clock() - t0
        for check, value in measured.items():
            report.checks[check] = CheckResult(float(value), tol[check], check == "positive_definite")
    return report
