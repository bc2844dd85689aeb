import pytest

from rieszpol.config import ConfigError, load_config, parse_config

BASE = {
    "version": 1,
    "task": "sigma",
    "set": {"kind": "circle"},
    "kernel": {"kind": "riesz", "s": 3.0},
    "schedule": {"N": [8, 16]},
}


def with_(**kw):
    doc = {k: (dict(v) if isinstance(v, dict) else v) for k, v in BASE.items()}
    for path, val in kw.items():
        keys = path.split("__")
        tgt = doc
        for k in keys[:-1]:
            tgt = tgt.setdefault(k, {})
        if val is None:
            tgt.pop(keys[-1], None)
        else:
            tgt[keys[-1]] = val
    return doc


def test_minimal_config():
    cfg = parse_config(BASE)
    assert cfg.task == "sigma" and cfg.Ns == [8, 16]
    assert cfg.set.kind == "circle" and cfg.kernel.s == 3.0
    assert cfg.method == "multistart(4)" and cfg.seed == 0


def test_weighted_kernel_and_union():
    cfg = parse_config(with_(
        set={"kind": "union", "members": [{"kind": "arc", "theta0": 0.0, "theta1": 1.0},
                                          {"kind": "arc", "theta0": 2.0, "theta1": 3.0}]},
        kernel={"kind": "weighted-riesz", "s": 3.0,
                "weight": {"kind": "separable", "u": {"offset": 2.0, "slope": 1.0, "axis": 0}}},
    ))
    assert cfg.kernel.weight.u([1.0, 0.0]) == 3.0
    assert len(cfg.set.parts()) == 2


@pytest.mark.parametrize("doc,field", [
    (with_(version=2), "version"),
    (with_(task="bake"), "task"),
    (with_(set={"kind": "torus"}), "set.kind"),
    (with_(kernel={"kind": "yukawa"}), "kernel.kind"),
    (with_(kernel={"kind": "riesz", "s": "three"}), "kernel.s"),
    (with_(kernel={"kind": "riesz"}), "kernel.s"),
    (with_(schedule={"N": [16, 8]}), "schedule.N"),
    (with_(schedule={"N": []}), "schedule.N"),
    (with_(schedule=None), "schedule.N"),
    (with_(solver={"budget": 0}), "solver.budget"),
    (with_(solver={"configs": "random"}), "solver.configs"),
    (with_(kernel={"kind": "riesz", "s": 0.5}), "kernel.s"),
    (with_(task="limits"), "limits.s"),
    (with_(kernel={"kind": "weighted-riesz", "s": 3.0, "weight": {"kind": "lambda"}}), "kernel.weight.kind"),
])
def test_errors_name_the_field(doc, field):
    with pytest.raises(ConfigError) as ei:
        parse_config(doc)
    assert ei.value.field == field


def test_load_errors(tmp_path):
    with pytest.raises(ConfigError) as ei:
        load_config(tmp_path / "missing.toml")
    assert ei.value.field == "config"
    bad = tmp_path / "bad.toml"
    bad.write_text("version = = 1")
    with pytest.raises(ConfigError):
        load_config(bad)


def test_verify_task():
    cfg = parse_config({"version": 1, "task": "verify", "suite": "trivials"})
    assert cfg.suite == "trivials"
