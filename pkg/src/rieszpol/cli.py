"""Command-line experiment runner.

    rieszpol sigma --config circle_s3.toml --out results/
    rieszpol verify trivials

Each run writes ``<name>.json`` (validated against the shipped schema) and
``<name>.csv`` with columns N, value, lower, upper, tau, ratio.  Exit status
is 0 on success, 2 when a budget ran out but results were written, and 1 on
error (in which case nothing is written).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import math
import os
import sys
import tempfile
import time
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__
from . import asymptotics as asy
from . import distribution as dist
from . import energy as en
from . import extremal as ext
from . import geometry as geo
from . import solver as sol
from . import verification as ver
from .config import TASKS, ConfigError, ExperimentConfig, load_config
from .errors import RieszPolError, UnavailableConstantError
from .potential import polarization

log = logging.getLogger("rieszpol")

CSV_COLUMNS = ("N", "value", "lower", "upper", "tau", "ratio")
SCHEMA_VERSION = 1


def load_schema() -> dict:
    return json.loads(resources.files("rieszpol").joinpath("schemas/result.schema.json").read_text())


def _clean(x):
    """JSON-safe copy: numpy scalars/arrays to Python, non-finite floats to None."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else None
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _tau_or_none(cfg: ExperimentConfig, N: int):
    k = cfg.kernel
    if k.is_log or k.s < cfg.set.hausdorff_dim or N < 2:
        return None
    return asy.tau(k.s, cfg.set.hausdorff_dim, N)


def _record(N, value, lower=None, upper=None, tau=None):
    ratio = None if (tau is None or value is None) else value / tau
    return {"N": int(N), "value": value, "lower": lower, "upper": upper, "tau": tau, "ratio": ratio}


def _gap_kw(cfg: ExperimentConfig) -> dict:
    return {"rel_gap": cfg.rel_gap, "target_gap": cfg.target_gap}


def _solve_one(cfg: ExperimentConfig, N: int):
    return sol.optimize(cfg.set, cfg.kernel, N, method=cfg.method, seed=cfg.seed, budget=cfg.budget,
                        rel_gap=max(cfg.rel_gap, 1e-12))


def run_solve(cfg: ExperimentConfig):
    records, configs, exhausted = [], [], False
    for N in cfg.Ns:
        log.info("solve N=%d", N)
        r = _solve_one(cfg, N)
        exhausted |= r.budget_exhausted or r.estimate.budget_exhausted
        e = r.estimate
        records.append(_record(N, e.lower, e.lower, e.upper, _tau_or_none(cfg, N)))
        configs.append({"N": N, "points": r.config.points, "trace": r.to_dict()["trace"]})
    return records, {"configurations": configs}, exhausted


def _energy_tau(cfg: ExperimentConfig, N: int):
    d, k = cfg.set.hausdorff_dim, cfg.kernel
    if k.is_log or k.s < d or N < 2:
        return None
    return N * N * math.log(N) if k.s == d else N ** (1 + k.s / d)


def run_energy(cfg: ExperimentConfig):
    records, configs, exhausted = [], [], False
    for N in cfg.Ns:
        log.info("energy N=%d", N)
        r = en.minimize_energy(cfg.set, cfg.kernel, N, seed=cfg.seed, budget=cfg.budget)
        exhausted |= r.budget_exhausted
        records.append(_record(N, r.value, None, r.value, _energy_tau(cfg, N)))
        configs.append({"N": N, "points": r.config.points, "trace": r.trace})
    return records, {"configurations": configs, "normalization": "N^(1+s/d), or N^2 log N when s = d"}, exhausted


def _series_configs(cfg: ExperimentConfig, N: int):
    """Certified estimate for the configuration used at N in series tasks."""
    c = cfg.set
    if cfg.configs == "equally-spaced":
        if isinstance(c, geo.Arc) and c.is_full and not cfg.kernel.is_weighted:
            return asy.symmetric_circle_polarization(N, cfg.kernel, c.radius, **_gap_kw(cfg)), None
        conf = sol.seed_configuration(c, N, sol.default_seed_style(c, N))
        return polarization(conf, cfg.kernel, **_gap_kw(cfg)), conf
    r = _solve_one(cfg, N)
    return r.estimate, r.config


def run_sigma(cfg: ExperimentConfig):
    entries, records, exhausted = [], [], False
    d = cfg.set.hausdorff_dim
    for N in cfg.Ns:
        log.info("sigma N=%d", N)
        est, _ = _series_configs(cfg, N)
        exhausted |= est.budget_exhausted
        t = asy.tau(cfg.kernel.s, d, N)
        value = est.upper if cfg.configs == "equally-spaced" else est.lower
        entries.append(asy.RatioEntry(N, value, value / t, est.lower, est.upper, t))
        records.append(_record(N, value, est.lower, est.upper, t))
    series = asy.RatioSeries(entries, cfg.kernel.s, d)
    summary = {"tail_model": "c + b*N^(-1/d)"}
    if len(entries) >= 4:
        e = asy.estimate_limit(series)
        summary["estimate"] = {"value": e.value, "uncertainty": e.uncertainty, "low_confidence": e.low_confidence,
                               "meta": e.meta}
    summary["ratios_bounded"] = asy.ratios_bounded(series)
    try:
        summary["predicted_limit"] = asy.predicted_limit(cfg.set, cfg.weight, cfg.kernel.s).to_dict()
    except UnavailableConstantError as err:
        summary["predicted_limit"] = None
        summary["note"] = str(err)
    return records, summary, exhausted


def run_distribution(cfg: ExperimentConfig):
    configs, lows, records, exhausted = [], [], [], False
    for N in cfg.Ns:
        log.info("distribution N=%d", N)
        est, conf = _series_configs(cfg, N)
        if conf is None:
            conf = asy.equally_spaced_circle(N, cfg.set.radius)
        exhausted |= est.budget_exhausted
        configs.append(conf)
        lows.append(est.lower)
        records.append(_record(N, est.lower, est.lower, est.upper, _tau_or_none(cfg, N)))
    s = cfg.kernel.s if not cfg.kernel.is_log else float(cfg.set.hausdorff_dim)
    rep = dist.compare_distribution(configs, cfg.weight, s, k=cfg.partition, tolerance=cfg.tolerance,
                                    log_kernel=cfg.kernel.is_log, certified=lows)
    rows = []
    for rec in rep.records:
        for label, m, cnt in zip(rep.regions, rep.masses, rec.counts):
            rows.append({"N": rec.N, "region": label, "predicted": m / rep.total_mass, "empirical": cnt / rec.N})
    return records, {"report": rep.to_dict(), "_regions_rows": rows}, exhausted


def run_limits(cfg: ExperimentConfig):
    records, reports = [], []
    for N in cfg.Ns:
        log.info("limits N=%d", N)
        c = cfg.set
        conf = sol.seed_configuration(c, N, sol.default_seed_style(c, N))
        rep = ext.check_large_s_limits(conf, cfg.s_list)
        last = rep.records[-1]
        records.append(_record(N, last.covering_product))
        reports.append(rep.to_dict())
    return records, {"reports": reports, "value": "P_s^(1/s) * rho at the largest s"}, False


RUNNERS = {
    "solve": run_solve,
    "energy": run_energy,
    "sigma": run_sigma,
    "distribution": run_distribution,
    "limits": run_limits,
}


def _csv_text(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r.get(k) is None else (repr(r[k]) if isinstance(r[k], float) else r[k])) for k in columns})
    return buf.getvalue()


def _write_atomic(files: dict[Path, str]):
    """Write every file to a temp name first, then rename them all into place."""
    staged = []
    try:
        for path, text in files.items():
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            staged.append((tmp, path))
    except BaseException:
        for tmp, _ in staged:
            os.unlink(tmp)
        raise
    for tmp, path in staged:
        os.replace(tmp, path)


def build_document(task: str, inputs: dict, records: list, summary: dict, exhausted: bool, seed, started: float) -> dict:
    elapsed = time.time() - started
    stamp = _dt.datetime.now(_dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "task": task,
        "inputs": inputs,
        "records": records,
        "summary": summary,
        "budget_exhausted": bool(exhausted),
        "metadata": {
            "seed": seed,
            "tool_version": __version__,
            # the only field that changes between identical runs
            "timestamp": f"{stamp} elapsed={elapsed:.3f}s",
        },
    }
    return _clean(doc)


def run_experiment(cfg: ExperimentConfig, out_dir: Path, name: str) -> int:
    started = time.time()
    if cfg.task == "verify":
        return run_verify(cfg.suite, out_dir, name)
    records, summary, exhausted = RUNNERS[cfg.task](cfg)
    extra_rows = summary.pop("_regions_rows", None) if isinstance(summary, dict) else None
    doc = build_document(cfg.task, cfg.raw, records, summary, exhausted, cfg.seed, started)
    jsonschema.validate(doc, load_schema())
    files = {
        out_dir / f"{name}.json": json.dumps(doc, indent=2) + "\n",
        out_dir / f"{name}.csv": _csv_text(doc["records"], CSV_COLUMNS),
    }
    if extra_rows is not None:
        files[out_dir / f"{name}-regions.csv"] = _csv_text(_clean(extra_rows), ("N", "region", "predicted", "empirical"))
    _write_atomic(files)
    return 2 if exhausted else 0


def format_table(checks) -> str:
    head = ("claim", "expected", "observed", "tolerance", "verdict")
    rows = [(c.claim, c.expected, c.observed, c.tolerance, "PASS" if c.passed else "FAIL") for c in checks]
    widths = [min(max(len(r[i]) for r in rows + [head]), 60) for i in range(5)]

    def fmt(r):
        return "  ".join(str(v)[:w].ljust(w) for v, w in zip(r, widths))

    return "\n".join([fmt(head), fmt(tuple("-" * w for w in widths))] + [fmt(r) for r in rows])


def run_verify(suite: str, out_dir: Path | None, name: str | None = None) -> int:
    started = time.time()
    checks = ver.run_suite(suite)
    print(format_table(checks))
    failed = sum(not c.passed for c in checks)
    print(f"{len(checks) - failed}/{len(checks)} checks passed")
    if out_dir is not None:
        doc = build_document("verify", {"suite": suite}, [], {"checks": [c.to_dict() for c in checks]}, False, None,
                             started)
        jsonschema.validate(doc, load_schema())
        stem = name or f"verify-{suite}"
        _write_atomic({out_dir / f"{stem}.json": json.dumps(doc, indent=2) + "\n",
                       out_dir / f"{stem}.csv": _csv_text([], CSV_COLUMNS)})
    return 1 if failed else 0


def _set_threads(k: int | None):
    if k is None:
        return
    import numba

    if k < 1:
        raise ConfigError("--threads", "must be >= 1")
    numba.set_num_threads(min(k, numba.config.NUMBA_NUM_THREADS))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rieszpol", description="Riesz polarization experiments")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)
    for task in TASKS:
        if task == "verify":
            p = sub.add_parser("verify", help="run a named verification suite")
            p.add_argument("suite", nargs="?", help=f"one of: {', '.join(ver.SUITES)}, all")
            p.add_argument("--config", type=Path, help="config file naming the suite instead")
        else:
            p = sub.add_parser(task, help=f"run a {task} experiment")
            p.add_argument("--config", type=Path, required=True)
        p.add_argument("--out", type=Path, default=None, help="output directory (default: current directory)")
        p.add_argument("--threads", type=int, default=None, help="cap on worker threads; results do not change")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse exits with 2 on usage errors; 2 is reserved for "budget exhausted"
        return 1 if e.code else 0
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        _set_threads(args.threads)
        if args.command == "verify" and args.config is None:
            if not args.suite:
                raise ConfigError("suite", "give a suite name or --config")
            return run_verify(args.suite, args.out)
        cfg = load_config(args.config)
        if cfg.task != args.command:
            raise ConfigError("task", f"config task is {cfg.task!r} but the subcommand is {args.command!r}")
        if args.seed is not None:
            cfg.seed = args.seed
        out = args.out if args.out is not None else Path.cwd()
        return run_experiment(cfg, out, args.config.stem)
    except ConfigError as e:
        print(f"rieszpol: config error in field '{e.field}': {e.args[0]}", file=sys.stderr)
        return 1
    except (RieszPolError, ValueError, OSError, jsonschema.ValidationError) as e:
        print(f"rieszpol: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
