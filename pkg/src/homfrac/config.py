"""Experiment configuration: a YAML document with a fixed schema.

Unknown keys are errors.  ``ExperimentConfig.to_dict`` / ``from_dict`` round
trip exactly, and ``validate`` applies the same exponent classification the
verification suites use, so a rejected configuration carries the same
explanation text.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import yaml

from .funcspace import EXPRESSIONS, Ball, Box, make_ball_family
from .inequalities.exponents import ExponentConfig, classify
from .kernel import KERNEL_NAMES, make_kernel
from .norms import NORM_KINDS

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "dump_config", "config_hash",
           "SWEEP_KEYS"]

SWEEP_KEYS = ("alpha", "p", "kappa", "s", "resolution")


class ConfigError(ValueError):
    """Schema or hypothesis violation in an experiment configuration."""


@dataclass
class BoxSpec:
    half_width: float = 2.0


@dataclass
class KernelSpec:
    name: str = "const"
    params: dict = field(default_factory=dict)


@dataclass
class OperatorSpec:
    alpha: float | None = None
    shell_count: int = 32
    radii_count: int = 512
    inner_cutoff: float | None = None
    stride: int = 4


@dataclass
class ExponentSpec:
    s: float | None = None
    p: float | None = None
    q: float | None = None
    kappa: float | None = None
    r: float | None = None
    lam: float | None = None


@dataclass
class FamilySpec:
    center_stride: int | None = None
    radii_count: int = 8
    rmin: float | None = None
    rmax: float | None = None


@dataclass
class FunctionSpec:
    expression: str = "ball_indicator"
    params: dict = field(default_factory=dict)


@dataclass
class NormSpecConfig:
    kind: str = "lp"
    p: float = 2.0
    kappa: float | None = None
    ball: dict | None = None


@dataclass
class ExperimentConfig:
    dimension: int = 2
    box: BoxSpec = field(default_factory=BoxSpec)
    resolution: int = 128
    kernel: KernelSpec = field(default_factory=KernelSpec)
    operator: OperatorSpec = field(default_factory=OperatorSpec)
    exponents: ExponentSpec = field(default_factory=ExponentSpec)
    family: FamilySpec = field(default_factory=FamilySpec)
    seed: int = 0
    suites: list = field(default_factory=list)
    output: str = "out"
    function: FunctionSpec = field(default_factory=FunctionSpec)
    norm: NormSpecConfig = field(default_factory=NormSpecConfig)
    sweep: dict = field(default_factory=dict)

    # ------------------------------------------------------------ (de)serialisation

    def to_dict(self):
        return _encode(asdict(self))

    @classmethod
    def from_dict(cls, d):
        if d is None:
            d = {}
        if not isinstance(d, dict):
            raise ConfigError("configuration must be a mapping")
        return _build(cls, d, "")

    # ------------------------------------------------------------ derived objects

    def make_box(self):
        return Box.cube(self.dimension, self.box.half_width, self.resolution)

    def make_kernel(self):
        """``None`` for ``Omega = 1`` so the fast path is used."""
        if self.kernel.name == "const" and not self.kernel.params:
            return None
        return make_kernel(self.kernel.name, self.dimension, **self.kernel.params)

    def make_family(self, box, lattice_stride=None):
        fs = self.family
        stride = self.operator.stride if lattice_stride is None else lattice_stride
        rmin = fs.rmin if fs.rmin is not None else 2 * stride * max(box.h)
        cs = fs.center_stride or max(1, self.resolution // 8)
        return make_ball_family(box, cs, fs.radii_count, rmin, fs.rmax)

    def operator_kw(self):
        op = self.operator
        return {"shell_count": op.shell_count, "radii_count": op.radii_count,
                "inner_cutoff": op.inner_cutoff}

    def exponent_overrides(self):
        """Exponent fields set in the document (``alpha`` from the operator section)."""
        ov = {k: v for k, v in asdict(self.exponents).items() if v is not None}
        if self.operator.alpha is not None:
            ov["alpha"] = self.operator.alpha
        return ov

    def exponent_config(self):
        ov = self.exponent_overrides()
        s = ov.pop("s", math.inf)
        return ExponentConfig(n=self.dimension, s=s, **ov)

    def make_ball(self):
        b = self.norm.ball
        if b is None:
            return None
        return Ball(tuple(b.get("center", (0.0,) * self.dimension)), float(b["radius"]))

    # ------------------------------------------------------------ validation

    def validate(self):
        """Raise :class:`ConfigError` on any schema or hypothesis violation."""
        if self.dimension not in (2, 3):
            raise ConfigError(f"dimension must be 2 or 3, got {self.dimension}")
        if not self.box.half_width > 0:
            raise ConfigError("box.half_width must be positive")
        if self.resolution < 8:
            raise ConfigError("resolution must be at least 8")
        if self.kernel.name not in KERNEL_NAMES:
            raise ConfigError(f"unknown kernel {self.kernel.name!r}; "
                              f"choose from {', '.join(KERNEL_NAMES)}")
        try:
            make_kernel(self.kernel.name, self.dimension, **self.kernel.params)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"kernel: {e}") from None
        op = self.operator
        if op.alpha is not None and not 0 < op.alpha < self.dimension:
            raise ConfigError(f"operator.alpha must lie in (0, {self.dimension})")
        if op.shell_count < 1 or op.radii_count < 2 or op.stride < 1:
            raise ConfigError("operator.shell_count, radii_count and stride must be positive")
        if self.resolution % op.stride:
            raise ConfigError("resolution must be a multiple of operator.stride")
        fs = self.family
        if fs.radii_count < 1 or (fs.center_stride is not None and fs.center_stride < 1):
            raise ConfigError("family.radii_count and center_stride must be positive")
        if self.function.expression not in EXPRESSIONS:
            raise ConfigError(f"unknown expression {self.function.expression!r}; "
                              f"choose from {', '.join(sorted(EXPRESSIONS))}")
        if self.norm.kind not in NORM_KINDS:
            raise ConfigError(f"unknown norm kind {self.norm.kind!r}; "
                              f"choose from {', '.join(NORM_KINDS)}")
        if self.norm.ball is not None:
            extra = set(self.norm.ball) - {"center", "radius"}
            if extra or "radius" not in self.norm.ball:
                raise ConfigError("norm.ball needs 'radius' and optionally 'center'")
        from .inequalities.suites import SUITES

        for s in self.suites:
            if s not in SUITES:
                raise ConfigError(f"unknown suite {s!r}; choose from {', '.join(SUITES)}")
        for k, v in self.sweep.items():
            if k not in SWEEP_KEYS:
                raise ConfigError(f"sweep.{k}: unknown parameter; choose from "
                                  f"{', '.join(SWEEP_KEYS)}")
            if not isinstance(v, list) or not v:
                raise ConfigError(f"sweep.{k} must be a non-empty list")
        self._validate_exponents()

    def _validate_exponents(self):
        ov = self.exponent_overrides()
        kappa = ov.get("kappa")
        if kappa is not None and not 0 <= kappa <= 1:
            raise ConfigError(f"kappa must lie in [0, 1], got {kappa}")
        enough = ("p" in ov and ("alpha" in ov or "lam" in ov))
        if not enough:
            return
        c = classify(self.exponent_config())
        if not c.ok:
            raise ConfigError("; ".join(c.explanations))


def _encode(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, dict):
        return {k: _encode(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_encode(x) for x in v]
    return v


def _decode_float(v, where):
    if isinstance(v, str) and v.strip().lower() in ("inf", "+inf", ".inf", "infinity"):
        return math.inf
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {v!r}")
    return float(v)


def _build(cls, d, prefix):
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(d) - set(known))
    if unknown:
        raise ConfigError(f"unknown key(s) {', '.join(prefix + u for u in unknown)}")
    kwargs = {}
    for name, value in d.items():
        f = known[name]
        where = prefix + name
        kwargs[name] = _coerce(f.type, value, where, f)
    return cls(**kwargs)


_SECTIONS = {"BoxSpec": BoxSpec, "KernelSpec": KernelSpec, "OperatorSpec": OperatorSpec,
             "ExponentSpec": ExponentSpec, "FamilySpec": FamilySpec,
             "FunctionSpec": FunctionSpec, "NormSpecConfig": NormSpecConfig}


def _coerce(tp, value, where, f):
    tp = tp if isinstance(tp, str) else getattr(tp, "__name__", str(tp))
    if tp in _SECTIONS:
        if not isinstance(value, dict):
            raise ConfigError(f"{where} must be a mapping")
        return _build(_SECTIONS[tp], value, where + ".")
    optional = tp.endswith("| None")
    base = tp.replace("| None", "").strip()
    if value is None:
        if optional:
            return None
        raise ConfigError(f"{where} must not be null")
    if base == "float":
        return _decode_float(value, where)
    if base == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return int(value)
    if base == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a string, got {value!r}")
        return value
    if base == "dict":
        if not isinstance(value, dict):
            raise ConfigError(f"{where} must be a mapping")
        if where == "sweep":
            return {k: [_sweep_value(k, x, where) for x in (v if isinstance(v, list) else [v])]
                    if isinstance(v, list) else v for k, v in value.items()}
        return dict(value)
    if base == "list":
        if not isinstance(value, list):
            raise ConfigError(f"{where} must be a list")
        return list(value)
    raise ConfigError(f"{where}: unsupported field type {tp}")


def _sweep_value(k, x, where):
    if k == "resolution":
        if isinstance(x, bool) or not isinstance(x, int):
            raise ConfigError(f"{where}.{k}: expected integers")
        return x
    return _decode_float(x, f"{where}.{k}")


def load_config(path=None, text=None):
    """Parse and validate a YAML configuration (defaults when both are ``None``)."""
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as e:
            raise ConfigError(f"cannot read config {path}: {e.strerror}") from None
    try:
        data = yaml.safe_load(text) if text else {}
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}") from None
    cfg = ExperimentConfig.from_dict(data)
    cfg.validate()
    return cfg


def dump_config(cfg):
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)


def config_hash(cfg, extra=None):
    """sha256 of the canonical JSON of the resolved config (plus ``extra``)."""
    payload = {"config": cfg.to_dict(), "extra": extra}
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def with_overrides(cfg, seed=None, resolution=None):
    if seed is not None:
        cfg = replace(cfg, seed=int(seed))
    if resolution is not None:
        cfg = replace(cfg, resolution=int(resolution))
    return cfg
