"""Experiment configuration files (TOML, one experiment per file).

Example::

    version = 1
    task = "sigma"

    [set]
    kind = "circle"
    radius = 1.0

    [kernel]
    kind = "riesz"
    s = 3.0

    [schedule]
    N = [64, 128, 256]

    [solver]
    method = "multistart(4)"
    seed = 0
    budget = 20000
    rel_gap = 1e-10
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import tomli

from . import geometry as geo
from . import kernel as kern
from .errors import InvalidArgumentError

CONFIG_VERSION = 1
TASKS = ("solve", "energy", "sigma", "distribution", "limits", "verify")


class ConfigError(InvalidArgumentError):
    """A config value is missing or invalid; ``field`` names the offending key."""

    def __init__(self, field_name: str, msg: str):
        super().__init__(f"{field_name}: {msg}")
        self.field = field_name


@dataclass
class ExperimentConfig:
    task: str
    set: geo.SetDescriptor | None
    kernel: kern.KernelSpec | None
    Ns: list = field(default_factory=list)
    seed: int = 0
    method: str = "multistart(4)"
    budget: int = 20_000
    target_gap: float = 0.0
    rel_gap: float = 1e-10
    configs: str = "optimize"
    s_list: list = field(default_factory=list)
    partition: int = 16
    tolerance: float | None = None
    suite: str | None = None
    raw: dict = field(default_factory=dict)

    @property
    def weight(self):
        return None if self.kernel is None else self.kernel.weight


def _need(tbl: dict, key: str, where: str):
    if key not in tbl:
        raise ConfigError(f"{where}.{key}" if where else key, "missing")
    return tbl[key]


def _num(x, name: str) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError(name, f"expected a number, got {x!r}")
    return float(x)


def _parse_set(tbl: dict) -> geo.SetDescriptor:
    kind = _need(tbl, "kind", "set")
    try:
        if kind == "interval":
            return geo.interval(_num(tbl.get("a", -1.0), "set.a"), _num(tbl.get("b", 1.0), "set.b"))
        if kind == "circle":
            return geo.circle(_num(tbl.get("radius", 1.0), "set.radius"), tuple(tbl.get("center", (0.0, 0.0))))
        if kind == "arc":
            return geo.arc(_num(_need(tbl, "theta0", "set"), "set.theta0"), _num(_need(tbl, "theta1", "set"), "set.theta1"),
                           _num(tbl.get("radius", 1.0), "set.radius"), tuple(tbl.get("center", (0.0, 0.0))))
        if kind == "sphere":
            return geo.sphere(int(tbl.get("p", 3)))
        if kind == "ball":
            return geo.ball(int(tbl.get("p", 2)))
        if kind == "cube":
            return geo.cube(int(tbl.get("p", 2)))
        if kind == "box":
            return geo.box(_need(tbl, "lo", "set"), _need(tbl, "hi", "set"))
        if kind == "union":
            return geo.union(*[_parse_set(m) for m in _need(tbl, "members", "set")])
    except ConfigError:
        raise
    except (InvalidArgumentError, ValueError, TypeError) as e:
        raise ConfigError("set", str(e)) from e
    raise ConfigError("set.kind", f"unknown set kind {kind!r}")


def _parse_modulation(tbl, name: str) -> kern.Modulation | None:
    if tbl is None:
        return None
    if not isinstance(tbl, dict):
        raise ConfigError(name, "expected a table with offset, slope, axis")
    return kern.Modulation(_num(tbl.get("offset", 1.0), f"{name}.offset"), _num(tbl.get("slope", 0.0), f"{name}.slope"),
                           int(tbl.get("axis", 0)))


def _parse_weight(tbl: dict) -> kern.WeightSpec:
    kind = _need(tbl, "kind", "kernel.weight")
    if kind == "constant":
        return kern.constant_weight(_num(_need(tbl, "c", "kernel.weight"), "kernel.weight.c"))
    if kind == "separable":
        return kern.separable_weight(_parse_modulation(tbl.get("u"), "kernel.weight.u"),
                                     _parse_modulation(tbl.get("v"), "kernel.weight.v"))
    raise ConfigError("kernel.weight.kind", f"unknown weight kind {kind!r} (custom weights are library-only)")


def _parse_kernel(tbl: dict) -> kern.KernelSpec:
    kind = _need(tbl, "kind", "kernel")
    eps = tbl.get("eps")
    try:
        if kind == "log":
            return kern.log_kernel(eps)
        if kind == "riesz":
            return kern.riesz(_num(_need(tbl, "s", "kernel"), "kernel.s"), eps)
        if kind == "weighted-riesz":
            w = _parse_weight(_need(tbl, "weight", "kernel"))
            return kern.weighted_riesz(_num(_need(tbl, "s", "kernel"), "kernel.s"), w, eps)
    except ConfigError:
        raise
    except InvalidArgumentError as e:
        raise ConfigError("kernel", str(e)) from e
    raise ConfigError("kernel.kind", f"unknown kernel kind {kind!r}")


def parse_config(doc: dict) -> ExperimentConfig:
    version = doc.get("version")
    if version != CONFIG_VERSION:
        raise ConfigError("version", f"expected {CONFIG_VERSION}, got {version!r}")
    task = _need(doc, "task", "")
    if task not in TASKS:
        raise ConfigError("task", f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
    if task == "verify":
        suite = _need(doc, "suite", "")
        return ExperimentConfig(task, None, None, suite=suite, raw=doc)
    set_ = _parse_set(_need(doc, "set", ""))
    kernel = _parse_kernel(_need(doc, "kernel", ""))
    sched = doc.get("schedule", {})
    Ns = list(_need(sched, "N", "schedule"))
    if not Ns or any(not isinstance(n, int) or n < 1 for n in Ns):
        raise ConfigError("schedule.N", "expected a non-empty list of positive integers")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ConfigError("schedule.N", "must be strictly increasing")
    sol = doc.get("solver", {})
    cfg = ExperimentConfig(
        task=task, set=set_, kernel=kernel, Ns=Ns,
        seed=int(sol.get("seed", 0)),
        method=str(sol.get("method", "multistart(4)")),
        budget=int(sol.get("budget", 20_000)),
        target_gap=_num(sol.get("target_gap", 0.0), "solver.target_gap"),
        rel_gap=_num(sol.get("rel_gap", 1e-10), "solver.rel_gap"),
        configs=str(sol.get("configs", "optimize")),
        s_list=[_num(x, "limits.s") for x in doc.get("limits", {}).get("s", [])],
        partition=int(doc.get("distribution", {}).get("bins", 16)),
        tolerance=doc.get("distribution", {}).get("tolerance", 0.1),
        raw=doc,
    )
    if cfg.configs not in ("optimize", "equally-spaced"):
        raise ConfigError("solver.configs", "expected 'optimize' or 'equally-spaced'")
    if cfg.budget <= 0:
        raise ConfigError("solver.budget", "must be positive")
    if task == "limits" and not cfg.s_list:
        raise ConfigError("limits.s", "missing")
    if task == "sigma" and (kernel.is_log or kernel.s < set_.hausdorff_dim):
        raise ConfigError("kernel.s", "sigma runs need a Riesz kernel with s >= d")
    if cfg.tolerance is not None and not (isinstance(cfg.tolerance, (int, float)) and math.isfinite(cfg.tolerance)):
        raise ConfigError("distribution.tolerance", "expected a number")
    return cfg


def load_config(path) -> ExperimentConfig:
    p = Path(path)
    try:
        doc = tomli.loads(p.read_text())
    except FileNotFoundError as e:
        raise ConfigError("config", f"no such file {p}") from e
    except tomli.TOMLDecodeError as e:
        raise ConfigError("config", f"not valid TOML: {e}") from e
    return parse_config(doc)
