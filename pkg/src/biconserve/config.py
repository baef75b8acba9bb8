"""Run configuration: JSON file plus command-line overrides."""

from dataclasses import asdict, dataclass, fields
import json
from pathlib import Path

from .errors import ConfigError

STAGES = ("profile", "metric", "conformal", "embedding", "flattener")
# stage -> stages it needs
DEPENDS = {
    "profile": (),
    "metric": ("profile",),
    "conformal": ("metric",),
    "embedding": ("metric",),
    "flattener": ("metric",),
}
FLATTEN_METHODS = ("shooting", "collocation")


@dataclass
class RunConfig:
    c: float = 0.0
    k0: float = -1.0
    kprime0: float = 1.0
    u_span: tuple = (0.0, 0.5)
    s_extent: float = 1.0
    nu: int = 201
    ns: int = 201
    ode_tol: float = 1e-10
    flat_tol: float = 1e-3
    solver_tol: float = 1e-8
    r_init: tuple = (0.5, 0.0, 0.0, 0.0)
    flatten_methods: tuple = FLATTEN_METHODS
    variant: str = "biconservative"
    stages: tuple = STAGES
    out: str = "biconserve_out"
    plots: bool = True

    def to_dict(self):
        d = asdict(self)
        for k, v in d.items():
            if isinstance(v, tuple):
                d[k] = list(v)
        return d

    def enabled(self, stage):
        return stage in self.stages


_FIELDS = {f.name: f for f in fields(RunConfig)}


def _coerce(name, value):
    default = _FIELDS[name].default
    try:
        if name == "u_span":
            lo, hi = (float(x) for x in value)
            return (lo, hi)
        if name == "r_init":
            vals = tuple(float(x) for x in value)
            if len(vals) != 4:
                raise ConfigError(name, "needs four values r, r', r'', r'''")
            return vals
        if name in ("stages", "flatten_methods"):
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            return tuple(str(v) for v in value)
        if isinstance(default, bool):
            if isinstance(value, str):
                return value.lower() in ("1", "true", "yes", "on")
            return bool(value)
        if isinstance(default, int):
            if isinstance(value, float) and not value.is_integer():
                raise ConfigError(name, f"expected an integer, got {value!r}")
            return int(value)
        if isinstance(default, float):
            return float(value)
        return str(value)
    except ConfigError:
        raise
    except (TypeError, ValueError):
        raise ConfigError(name, f"cannot interpret {value!r}") from None


def validate(cfg):
    if not cfg.c - cfg.k0 > 0:
        raise ConfigError("k0", "c − k0 ≤ 0")
    if not cfg.kprime0 > 0:
        raise ConfigError("kprime0", "kprime0 must be positive")
    if cfg.nu < 5 or cfg.ns < 5:
        raise ConfigError("nu" if cfg.nu < 5 else "ns", "grid sizes must be >= 5")
    for name in ("ode_tol", "flat_tol", "solver_tol"):
        if not getattr(cfg, name) > 0:
            raise ConfigError(name, "tolerances must be positive")
    if not cfg.u_span[1] > cfg.u_span[0]:
        raise ConfigError("u_span", "needs u_span[1] > u_span[0]")
    if not cfg.s_extent > 0:
        raise ConfigError("s_extent", "must be positive")
    for st in cfg.stages:
        if st not in STAGES:
            raise ConfigError("stages", f"unknown stage {st!r}")
    for m in cfg.flatten_methods:
        if m not in FLATTEN_METHODS:
            raise ConfigError("flatten_methods", f"unknown method {m!r}")
    if cfg.variant not in ("minimal", "biconservative"):
        raise ConfigError("variant", f"unknown variant {cfg.variant!r}")
    # keep stage order canonical so runs with permuted lists are identical
    cfg.stages = tuple(s for s in STAGES if s in cfg.stages)
    return cfg


def parse_config(path=None, overrides=None):
    """Defaults < JSON file < ``overrides`` (values of None are ignored)."""
    values = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError("config", f"file not found: {path}")
        text = path.read_text().strip()
        if text:
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise ConfigError("config", f"invalid JSON: {exc}") from None
            if not isinstance(data, dict):
                raise ConfigError("config", "top level must be an object")
            values.update(data)
    for k, v in (overrides or {}).items():
        if v is not None:
            values[k] = v
    unknown = sorted(set(values) - set(_FIELDS))
    if unknown:
        raise ConfigError(unknown[0], "unknown field")
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    return validate(cfg)
