"""Command-line driver: ``verify``, ``solve``, ``family`` and ``report``.

Configuration is a JSON file merged over built-in defaults, then over
``--seed``/``--out`` and any dotted overrides such as ``--grid.N=32`` or
``--tolerances.q_sum=1e-12``. Override values are parsed as JSON when
possible and kept as strings otherwise.

Exit codes: 0 success, 1 numerical failure, 2 usage or configuration error.
Reports are written even when checks fail.
"""

from __future__ import annotations

import argparse
import copy
import json
import logging
import math
import os
import sys
import time
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.fft

from . import family, hitchin, hk
from .fieldio import dumps17, read_configuration, write_configuration
from .lattice import Configuration, Grid, random_tangent
from .verify import DEFAULT_TOLERANCES, VerificationReport, run_suite

log = logging.getLogger("hkhitchin")

EXIT_OK = 0
EXIT_NUMERICAL = 1
EXIT_USAGE = 2

COMMANDS = ("verify", "solve", "family", "report")
FIXTURES = ("zero", "diag-higgs", "diag-higgs-perturbed")

DEFAULTS = {
    "grid": {"N": 16, "Lx": 1.0, "Ly": 1.0, "n": 2, "deriv_scheme": "spectral"},
    "seed": 1,
    "pairs": 100,
    "pd_samples": 1000,
    "tolerances": {},
    "input": None,
    "out": "out",
    "fixture": "diag-higgs-perturbed",
    "amplitude": 1e-2,
    "solve": {"max_iters": 5000, "tol": 1e-12, "step0": 1e-3, "sigma": 0.0},
    "family": {"K": 16, "decomposition_tol": 1e-11, "cross_tol": 1e-10},
    "report": {"project": False, "identity_tol": 1e-10},
}


class ConfigError(ValueError):
    """Bad configuration; maps to exit code 2."""


@dataclass
class RunConfig:
    command: str
    grid: Grid
    seed: int
    pairs: int
    pd_samples: int
    tolerances: dict
    input: Optional[str]
    out: str
    fixture: str
    amplitude: float
    solve: dict = field(default_factory=dict)
    family: dict = field(default_factory=dict)
    report: dict = field(default_factory=dict)
    threads: int = 1


# ----------------------------------------------------------------------------
# configuration


def _merge(base: dict, extra: dict, path: str = "") -> None:
    for k, v in extra.items():
        where = f"{path}{k}"
        if k not in base:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(base[k], dict) and k != "tolerances":
            if not isinstance(v, dict):
                raise ConfigError(f"config key {where!r} must be an object")
            _merge(base[k], v, where + ".")
        elif k == "tolerances":
            if not isinstance(v, dict):
                raise ConfigError("'tolerances' must be an object")
            base[k].update(v)
        else:
            base[k] = v


def _parse_value(text: str):
    try:
        return json.loads(text)
    except ValueError:
        return text


def parse_overrides(items: List[str]) -> dict:
    """Turn ``--a.b=value`` strings into a nested dict."""
    out: dict = {}
    for item in items:
        if not item.startswith("--") or "=" not in item:
            raise ConfigError(f"unrecognized argument {item!r} (overrides look like --grid.N=32)")
        key, _, value = item[2:].partition("=")
        parts = key.split(".")
        if not all(parts):
            raise ConfigError(f"bad override key {key!r}")
        node = out
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"conflicting override {key!r}")
        node[parts[-1]] = _parse_value(value)
    return out


def build_config(command: str, config_path: Optional[str] = None, overrides: Optional[dict] = None,
                 threads: int = 1) -> RunConfig:
    raw = copy.deepcopy(DEFAULTS)
    if config_path is not None:
        if not os.path.isfile(config_path):
            raise ConfigError(f"config file not found: {config_path}")
        try:
            with open(config_path) as fh:
                loaded = json.load(fh)
        except ValueError as exc:
            raise ConfigError(f"cannot parse config {config_path}: {exc}") from None
        if not isinstance(loaded, dict):
            raise ConfigError("config file must hold a JSON object")
        _merge(raw, loaded)
    _merge(raw, overrides or {})

    try:
        g = raw["grid"]
        grid = Grid(int(g["N"]), float(g["Lx"]), float(g["Ly"]), int(g["n"]), str(g["deriv_scheme"]))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid grid: {exc}") from None

    tolerances = {}
    for k, v in raw["tolerances"].items():
        if k not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {k!r}")
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0 or not math.isfinite(v):
            raise ConfigError(f"tolerance {k!r} must be a positive number")
        tolerances[k] = float(v)

    for section, keys in (("solve", ("tol", "step0")), ("family", ("decomposition_tol", "cross_tol")),
                          ("report", ("identity_tol",))):
        for k in keys:
            v = raw[section][k]
            if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
                raise ConfigError(f"{section}.{k} must be a positive number")

    for k in ("seed", "pairs", "pd_samples"):
        if not isinstance(raw[k], int) or isinstance(raw[k], bool):
            raise ConfigError(f"{k!r} must be an integer")
    if raw["pairs"] < 1 or raw["pd_samples"] < 1:
        raise ConfigError("'pairs' and 'pd_samples' must be positive")
    if raw["seed"] < 0:
        raise ConfigError("'seed' must be non-negative")
    if raw["fixture"] not in FIXTURES:
        raise ConfigError(f"unknown fixture {raw['fixture']!r}; choose from {', '.join(FIXTURES)}")
    if not isinstance(threads, int) or threads < 1:
        raise ConfigError("--threads must be a positive integer")
    if raw["family"]["K"] < 4:
        raise ConfigError("family.K must be at least 4")

    inp, out = raw["input"], str(raw["out"])
    if inp is not None:
        inp = str(inp)
        if not os.path.isfile(inp):
            raise ConfigError(f"input file not found: {inp}")
        if os.path.abspath(inp) == os.path.abspath(out):
            raise ConfigError("input and output paths must differ")

    return RunConfig(command, grid, raw["seed"], raw["pairs"], raw["pd_samples"], tolerances, inp, out,
                     raw["fixture"], float(raw["amplitude"]), dict(raw["solve"]), dict(raw["family"]),
                     dict(raw["report"]), threads)


def initial_configuration(cfg: RunConfig) -> Configuration:
    """Load ``cfg.input`` or build the named fixture on ``cfg.grid``."""
    if cfg.input is not None:
        try:
            return read_configuration(cfg.input)
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"cannot read configuration {cfg.input}: {exc}") from None
    if cfg.fixture == "zero":
        return Configuration.zero(cfg.grid)
    if cfg.fixture == "diag-higgs":
        return hitchin.normal_higgs_fixture(cfg.grid)
    return hitchin.perturbed_fixture(cfg.grid, cfg.seed, amplitude=cfg.amplitude)


def _write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        fh.write(dumps17(obj))
        fh.write("\n")


def _out_dir(cfg: RunConfig) -> str:
    os.makedirs(cfg.out, exist_ok=True)
    return cfg.out


def _env(cfg: RunConfig) -> dict:
    g = cfg.grid
    return {"grid": {"N": g.N, "Lx": g.Lx, "Ly": g.Ly, "n": g.n}, "seed": cfg.seed,
            "scheme": g.deriv_scheme}


# ----------------------------------------------------------------------------
# commands


def run_verify(cfg: RunConfig) -> VerificationReport:
    """Run the verification suite and write ``report.json``."""
    report = run_suite(cfg.grid, seed=cfg.seed, pairs=cfg.pairs, pd_samples=cfg.pd_samples,
                       K=int(cfg.family["K"]), tolerances=cfg.tolerances)
    _write_json(os.path.join(_out_dir(cfg), "report.json"), report.to_dict())
    for name in report.failing():
        c = report.checks[name]
        print(f"FAIL {name}: measured {c.measured:.3e}, tolerance {c.tolerance:.3e}")
    print(f"verify: {len(report.checks) - len(report.failing())}/{len(report.checks)} checks passed")
    return report


def run_solve(cfg: RunConfig) -> int:
    c0 = initial_configuration(cfg)
    opts = cfg.solve
    t0 = time.perf_counter()
    c, trace = hitchin.solve(c0, max_iters=int(opts["max_iters"]), tol=float(opts["tol"]),
                             step0=float(opts["step0"]), sigma=float(opts["sigma"]))
    elapsed = time.perf_counter() - t0
    out = _out_dir(cfg)
    write_configuration(os.path.join(out, "configuration.json"), c)
    with open(os.path.join(out, "trace.jsonl"), "w") as fh:
        for rec in trace.jsonl_lines():
            fh.write(dumps17(rec))
            fh.write("\n")
    last = trace.records[-1]
    _write_json(os.path.join(out, "report.json"), {
        "status": trace.status, "iterations": trace.iterations, "final_energy": last.energy,
        "r1_norm": last.r1_norm, "r2_norm": last.r2_norm, "tol": float(opts["tol"]),
        "environment": _env(cfg), "timing": {"solve": elapsed},
    })
    print(f"solve: {trace.status} after {trace.iterations} iterations, energy {last.energy:.6e}")
    return EXIT_OK if trace.status == "converged" else EXIT_NUMERICAL


def cross_prediction(c: Configuration, K: int) -> float:
    """Fit the per-site Laurent coefficients from the cube roots of unity and
    return the worst mismatch against direct curvature at the ``K`` roots,
    relative to ``max(1, largest curvature entry)``."""
    fit_l = family.roots_of_unity(3)
    coeffs = family.laurent_coefficients(fit_l, [family.flatness(c, lam).data for lam in fit_l])
    worst, scale = 0.0, 1.0
    for lam in family.roots_of_unity(K):
        F = family.flatness(c, lam).data
        scale = max(scale, float(np.max(np.abs(F))))
        worst = max(worst, float(np.max(np.abs(family.laurent_eval(coeffs, lam) - F))))
    return worst / scale


def bilinear_cross_prediction(X, Y, K: int) -> float:
    fit_l = family.roots_of_unity(3)
    coeffs = family.laurent_coefficients(fit_l, [family.f_lambda(X, Y, lam) for lam in fit_l])
    worst = 0.0
    scale = math.sqrt(hk.metric_g(X, X) * hk.metric_g(Y, Y))
    for lam in family.roots_of_unity(K):
        worst = max(worst, abs(family.laurent_eval(coeffs, lam) - family.f_lambda(X, Y, lam)) / scale)
    return worst


def run_family(cfg: RunConfig) -> int:
    c = initial_configuration(cfg)
    K = int(cfg.family["K"])
    t0 = time.perf_counter()
    scan = family.flatness_scan(c, K)
    cross = cross_prediction(c, K)
    X = random_tangent(cfg.seed * 2 + 1, c.grid)
    Y = random_tangent(cfg.seed * 2 + 2, c.grid)
    bcross = bilinear_cross_prediction(X, Y, K)
    elapsed = time.perf_counter() - t0
    dec_tol, cross_tol = float(cfg.family["decomposition_tol"]), float(cfg.family["cross_tol"])
    ok = max(scan.decomposition_residuals) <= dec_tol and cross <= cross_tol and bcross <= cross_tol
    out = _out_dir(cfg)
    _write_json(os.path.join(out, "scan.json"), scan.to_dict())
    _write_json(os.path.join(out, "report.json"), {
        "pass": ok, "scan": scan.to_dict(), "energy": hitchin.energy(c),
        "max_flatness_norm": max(scan.flatness_norms),
        "max_decomposition_residual": max(scan.decomposition_residuals),
        "laurent_cross_prediction": cross, "bilinear_cross_prediction": bcross,
        "tolerances": {"decomposition": dec_tol, "cross_prediction": cross_tol},
        "environment": _env(cfg), "timing": {"family": elapsed},
    })
    print(f"family: K={K}, max flatness {max(scan.flatness_norms):.3e}, "
          f"max decomposition residual {max(scan.decomposition_residuals):.3e}, "
          f"cross-prediction {cross:.3e}")
    return EXIT_OK if ok else EXIT_NUMERICAL


def run_report(cfg: RunConfig) -> int:
    """Evaluate every bilinear form on one seeded pair of tangent vectors."""
    c = initial_configuration(cfg)
    X = random_tangent(cfg.seed * 2 + 1, c.grid)
    Y = random_tangent(cfg.seed * 2 + 2, c.grid)
    if cfg.report["project"]:
        X = hitchin.project_orthogonal(X, c)
        Y = hitchin.project_orthogonal(Y, c)
    rep = hk.bilinear_report(X, Y)
    tol = float(cfg.report["identity_tol"])
    ok = all(v <= tol for v in rep.identity_residuals.values())
    body = rep.to_dict()
    body.update({"pass": ok, "identity_tol": tol, "projected": bool(cfg.report["project"]),
                 "kw_forms": list(hk.kw_forms(X, Y)),
                 "prequantum_curvatures": [[z.real, z.imag] for z in hk.prequantum_curvatures(X, Y)],
                 "environment": _env(cfg)})
    _write_json(os.path.join(_out_dir(cfg), "report.json"), body)
    worst = max(rep.identity_residuals.values())
    print(f"report: g={rep.g:.6e} omega={rep.omega:.6e} q1={rep.q1:.6e} q2={rep.q2:.6e}, "
          f"worst identity residual {worst:.3e}")
    return EXIT_OK if ok else EXIT_NUMERICAL


# ----------------------------------------------------------------------------
# entry point


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hkhitchin", description=__doc__.split("\n")[0])
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", metavar="PATH", help="JSON config file")
    p.add_argument("--seed", type=int, help="random seed")
    p.add_argument("--out", metavar="DIR", help="output directory")
    p.add_argument("--threads", type=int, default=1, help="FFT worker threads")
    p.add_argument("--input", metavar="PATH", help="configuration file for solve/family/report")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = make_parser()
    args, rest = parser.parse_known_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        overrides = parse_overrides(rest)
        for key in ("seed", "out", "input"):
            val = getattr(args, key)
            if val is not None:
                overrides[key] = val
        cfg = build_config(args.command, args.config, overrides, args.threads)
        runners = {"verify": lambda: EXIT_OK if run_verify(cfg).passed else EXIT_NUMERICAL,
                   "solve": lambda: run_solve(cfg),
                   "family": lambda: run_family(cfg),
                   "report": lambda: run_report(cfg)}
        with scipy.fft.set_workers(cfg.threads):
            return runners[args.command]()
    except ConfigError as exc:
        print(f"hkhitchin: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except hitchin.NonFiniteFieldError as exc:
        print(f"hkhitchin: error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
