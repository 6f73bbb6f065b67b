"""Boxes, sampled functions and the finite ball families used for sup-over-balls."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "Box",
    "Ball",
    "GridFunction",
    "BallFamily",
    "EXPRESSIONS",
    "sample",
    "dilate",
    "make_ball_family",
    "zoo",
    "save_grid_function",
    "load_grid_function",
    "export_slice_csv",
]

GRID_FORMAT = "homfrac-grid/1"


@dataclass(frozen=True)
class Box:
    """Axis-aligned box with a uniform cell-centred grid."""

    lower: tuple
    upper: tuple
    resolution: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lower)
        hi = tuple(float(v) for v in self.upper)
        res = tuple(int(v) for v in self.resolution)
        if not (len(lo) == len(hi) == len(res)):
            raise ValueError("lower, upper and resolution must have equal length")
        if any(r < 1 for r in res):
            raise ValueError("resolution must be positive")
        if any(not b > a for a, b in zip(lo, hi)):
            raise ValueError("upper corner must exceed lower corner on every axis")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)
        object.__setattr__(self, "resolution", res)

    @classmethod
    def cube(cls, n=2, half_width=2.0, resolution=128):
        return cls((-half_width,) * n, (half_width,) * n, (resolution,) * n)

    @property
    def n(self):
        return len(self.resolution)

    @property
    def shape(self):
        return self.resolution

    @property
    def h(self):
        return np.array([(b - a) / r for a, b, r in zip(self.lower, self.upper, self.resolution)])

    @property
    def cell_volume(self):
        return float(np.prod(self.h))

    @property
    def volume(self):
        return float(np.prod(np.subtract(self.upper, self.lower)))

    @property
    def diameter(self):
        return float(np.linalg.norm(np.subtract(self.upper, self.lower)))

    def axes(self):
        return [a + (np.arange(r) + 0.5) * h
                for a, r, h in zip(self.lower, self.resolution, self.h)]

    def centers(self):
        """Cell centres, shape ``resolution + (n,)``."""
        return np.stack(np.meshgrid(*self.axes(), indexing="ij"), axis=-1)

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= self.lower) and np.all(x <= self.upper))

    def scaled(self, factor):
        """The box with both corners multiplied by ``factor``."""
        return Box(tuple(factor * v for v in self.lower),
                   tuple(factor * v for v in self.upper), self.resolution)

    def refined(self, factor=2):
        return Box(self.lower, self.upper, tuple(factor * r for r in self.resolution))

    def index_of(self, x):
        """Fractional cell coordinates of ``x`` (cell ``i`` spans ``[i, i+1)``)."""
        return (np.asarray(x, float) - np.asarray(self.lower)) / self.h

    def to_dict(self):
        return {"lower": list(self.lower), "upper": list(self.upper),
                "resolution": list(self.resolution)}


@dataclass(frozen=True)
class Ball:
    center: tuple
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n(self):
        return len(self.center)

    def measure(self):
        from .operators import unit_ball_volume
        return unit_ball_volume(self.n) * self.radius ** self.n


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Real samples at the cell centres of ``box``; immutable."""

    box: Box
    values: np.ndarray
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True)
        if v.shape != self.box.shape:
            raise ValueError(f"values shape {v.shape} does not match grid {self.box.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self):
        return self.box.n

    def integral(self):
        return float(np.sum(self.values) * self.box.cell_volume)

    def with_values(self, values, label=None):
        return GridFunction(self.box, values, self.label if label is None else label)

    def abs(self):
        return self.with_values(np.abs(self.values), f"|{self.label}|")

    def power(self, t):
        return self.with_values(np.abs(self.values) ** t, f"|{self.label}|^{t:g}")

    def scaled(self, c):
        return self.with_values(c * self.values, f"{c:g}*{self.label}")

    def __add__(self, other):
        if other.box != self.box:
            raise ValueError("grid functions live on different boxes")
        return self.with_values(self.values + other.values, f"{self.label}+{other.label}")

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            if other.box != self.box:
                raise ValueError("grid functions live on different boxes")
            return self.with_values(self.values * other.values, f"{self.label}*{other.label}")
        return self.scaled(float(other))

    __rmul__ = __mul__

    def restrict(self, ball):
        """Zero outside ``ball`` (cell inclusion by centre)."""
        mask = ball_mask(self.box, ball)
        return self.with_values(np.where(mask, self.values, 0.0), f"{self.label}|B")


def ball_mask(box, ball):
    c = box.centers()
    d2 = np.sum((c - np.asarray(ball.center)) ** 2, axis=-1)
    return d2 < ball.radius**2


# ---------------------------------------------------------------- expressions


def _radius(x, center):
    return np.linalg.norm(x - np.asarray(center, float), axis=-1)


def _gaussian(x, center=None, sigma=0.5, amplitude=1.0):
    center = np.zeros(x.shape[-1]) if center is None else center
    return amplitude * np.exp(-_radius(x, center) ** 2 / (2 * sigma**2))


def _ball_indicator(x, center=None, radius=1.0, value=1.0):
    center = np.zeros(x.shape[-1]) if center is None else center
    return np.where(_radius(x, center) < radius, float(value), 0.0)


def _power(x, beta=0.25, center=None, cutoff=None, cap=None):
    """``|x - c|^{-beta}``, optionally zero beyond ``cutoff`` and truncated at
    ``cap``; inf at the centre unless capped."""
    center = np.zeros(x.shape[-1]) if center is None else center
    r = _radius(x, center)
    with np.errstate(divide="ignore"):
        v = np.where(r > 0, r ** (-float(beta)), np.inf)
    if cutoff is not None:
        v = np.where(r < cutoff, v, 0.0)
    if cap is not None:
        v = np.minimum(v, float(cap))
    return v


def _log_abs(x, center=None, cutoff=None):
    center = np.zeros(x.shape[-1]) if center is None else center
    r = _radius(x, center)
    with np.errstate(divide="ignore"):
        v = np.where(r > 0, np.log(np.where(r > 0, r, 1.0)), -np.inf)
    if cutoff is not None:
        v = np.where(r < cutoff, v, 0.0)
    return v


def _bump_sum(x, seed=0, count=6, spread=1.2):
    rng = np.random.default_rng(int(seed))
    n = x.shape[-1]
    out = np.zeros(x.shape[:-1])
    for _ in range(int(count)):
        c = rng.uniform(-spread, spread, n)
        s = rng.uniform(0.15, 0.5)
        a = rng.uniform(-1.0, 1.0)
        out += a * np.exp(-np.sum((x - c) ** 2, axis=-1) / (2 * s**2))
    return out


def _constant(x, value=1.0):
    return np.full(x.shape[:-1], float(value))


def _half_plane(x, axis=0, offset=0.0):
    return np.where(x[..., int(axis)] > offset, 1.0, 0.0)


EXPRESSIONS = {
    "gaussian": _gaussian,
    "ball_indicator": _ball_indicator,
    "power": _power,
    "log_abs": _log_abs,
    "bump_sum": _bump_sum,
    "constant": _constant,
    "half_plane": _half_plane,
}


def _describe(name, params):
    if not params:
        return name
    inner = ",".join(f"{k}={_fmt(v)}" for k, v in sorted(params.items()))
    return f"{name}({inner})"


def _fmt(v):
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ",".join(_fmt(x) for x in v) + "]"
    if isinstance(v, float):
        return f"{v:g}"
    return str(v)


def sample(expression, box, **params):
    """Sample a named zoo expression at the cell centres of ``box``.

    Non-finite samples (a singular centre landing on a node) are replaced by
    the mean over a 4-per-axis sub-grid of the cell, and the label notes it.
    """
    if expression not in EXPRESSIONS:
        raise ValueError(f"unknown expression {expression!r}; "
                         f"choose from {', '.join(sorted(EXPRESSIONS))}")
    fn = EXPRESSIONS[expression]
    x = box.centers()
    vals = np.asarray(fn(x, **params), dtype=float)
    label = _describe(expression, params)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        sub = (np.arange(4) + 0.5) / 4 - 0.5
        offs = np.stack(np.meshgrid(*([sub] * box.n), indexing="ij"), -1).reshape(-1, box.n)
        for idx in zip(*np.nonzero(bad)):
            pts = x[idx] + offs * box.h
            vals[idx] = float(np.mean(fn(pts, **params)))
        if not np.all(np.isfinite(vals)):
            raise ValueError(f"{label}: sub-sampled cell average is not finite")
        label += f" [cell-averaged {int(bad.sum())}]"
    return GridFunction(box, vals, label)


def dilate(f, lam):
    """Samples of ``x -> f(lam x)``: same values on the box scaled by ``1/lam``."""
    if not lam > 0:
        raise ValueError("dilation factor must be positive")
    if lam == 1:
        return f
    return GridFunction(f.box.scaled(1.0 / lam), f.values, f"{f.label}(x*{lam:g})")


# ---------------------------------------------------------------- ball families


@dataclass(frozen=True, eq=False)
class BallFamily:
    """Finite list of balls; ``centers`` is ``(B, n)`` and ``radii`` is ``(B,)``."""

    centers: np.ndarray
    radii: np.ndarray
    provenance: str = ""
    spec: dict = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.centers, dtype=float, ndmin=2, copy=True)
        r = np.array(self.radii, dtype=float, ndmin=1, copy=True)
        if len(c) != len(r):
            raise ValueError("centers and radii differ in length")
        if np.any(r <= 0):
            raise ValueError("radii must be positive")
        c.setflags(write=False)
        r.setflags(write=False)
        object.__setattr__(self, "centers", c)
        object.__setattr__(self, "radii", r)

    def __len__(self):
        return len(self.radii)

    def __iter__(self):
        for c, r in zip(self.centers, self.radii):
            yield Ball(c, r)

    @classmethod
    def single(cls, ball):
        return cls(np.asarray(ball.center)[None], [ball.radius], "single")

    def refined(self):
        s = self.spec
        if not s:
            raise ValueError("family was not generated from a grid spec")
        return make_ball_family(Box(**s["box"]), max(1, s["center_stride"] // 2),
                                2 * s["radii_count"] - 1, s["rmin"], s.get("rmax"))

    def key(self):
        return (self.centers.tobytes(), self.radii.tobytes())


def make_ball_family(box, center_stride, radii_count, rmin=None, rmax=None):
    """Centres on every ``center_stride``-th cell, radii log-spaced.

    Centre indices are the ones congruent to ``res // 2`` modulo the stride on
    each axis, so halving the stride keeps every old centre.  Radii run from
    ``rmin`` (default twice the largest cell size) to ``rmax`` (default half
    the box diameter); ``2k - 1`` radii contain the ``k`` radii of the coarser
    family.
    """
    center_stride = int(center_stride)
    radii_count = int(radii_count)
    if center_stride < 1 or radii_count < 1:
        raise ValueError("center_stride and radii_count must be positive")
    rmin = 2 * float(np.max(box.h)) if rmin is None else float(rmin)
    rmax = box.diameter / 2 if rmax is None else float(rmax)
    if not 0 < rmin <= rmax:
        raise ValueError("need 0 < rmin <= rmax")
    axes = []
    for ax, r in zip(box.axes(), box.resolution):
        start = (r // 2) % center_stride
        axes.append(ax[start::center_stride])
    cs = np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, box.n)
    if radii_count == 1:
        radii = np.array([rmin])
    else:
        radii = rmin * (rmax / rmin) ** (np.arange(radii_count) / (radii_count - 1))
    centers = np.repeat(cs, radii_count, axis=0)
    rr = np.tile(radii, len(cs))
    prov = (f"box={box.lower}..{box.upper} res={box.resolution} stride={center_stride} "
            f"radii={radii_count} rmin={rmin:.6g} rmax={rmax:.6g}")
    spec = {"box": box.to_dict(), "center_stride": center_stride,
            "radii_count": radii_count, "rmin": rmin, "rmax": rmax}
    return BallFamily(centers, rr, prov, spec)


# ---------------------------------------------------------------- zoo


_INDICATORS = [((0.0, 0.0), 1.0), ((0.5, -0.3), 0.5), ((-0.8, 0.6), 0.7),
               ((0.2, 0.9), 0.3), ((-0.4, -0.7), 1.1)]
_SIGMAS = [0.2, 0.35, 0.5, 0.7, 1.0]
_POWERS = [(0.1, (0.0, 0.0)), (0.2, (0.3, 0.2)), (0.25, (-0.5, 0.1)),
           (0.3, (0.1, -0.4)), (0.4, (0.01, 0.01))]


def _pad(c, n):
    return tuple(c) + (0.0,) * (n - len(c))


def zoo(box, seed=0):
    """The fixed 20-member test zoo: 5 indicators, 5 gaussians, 5 truncated
    sub-critical powers and 5 seeded random bump sums."""
    n = box.n
    out = []
    for c, r in _INDICATORS:
        out.append(sample("ball_indicator", box, center=_pad(c, n), radius=r))
    for k, s in enumerate(_SIGMAS):
        c = _pad(((-1) ** k * 0.1 * k, 0.05 * k), n)
        out.append(sample("gaussian", box, center=c, sigma=s))
    for beta, c in _POWERS:
        out.append(sample("power", box, beta=beta, center=_pad(c, n), cutoff=1.2))
    for k in range(5):
        out.append(sample("bump_sum", box, seed=int(seed) + k))
    return out


# ---------------------------------------------------------------- export


def save_grid_function(f, stem):
    """Write ``stem.json`` (header) and ``stem.bin`` (little-endian float64, C order)."""
    stem = Path(stem)
    header = {
        "format": GRID_FORMAT,
        "dimension": f.n,
        "lower": list(f.box.lower),
        "upper": list(f.box.upper),
        "resolution": list(f.box.resolution),
        "label": f.label,
        "dtype": "<f8",
        "order": "C",
    }
    stem.parent.mkdir(parents=True, exist_ok=True)
    try:
        stem.with_suffix(".json").write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
        stem.with_suffix(".bin").write_bytes(np.ascontiguousarray(f.values, "<f8").tobytes())
    except OSError as exc:
        raise OSError(f"cannot write grid function to {stem}: {exc}") from exc
    return stem.with_suffix(".json"), stem.with_suffix(".bin")


def load_grid_function(stem):
    stem = Path(stem)
    header = json.loads(stem.with_suffix(".json").read_text())
    if header.get("format") != GRID_FORMAT:
        raise ValueError(f"{stem}: unsupported grid format {header.get('format')!r}")
    box = Box(header["lower"], header["upper"], header["resolution"])
    vals = np.frombuffer(stem.with_suffix(".bin").read_bytes(), dtype=header["dtype"])
    return GridFunction(box, vals.reshape(box.shape), header["label"])


def export_slice_csv(f, axis, path):
    """CSV of the 1-D slice along ``axis`` through the box centre."""
    path = Path(path)
    idx = [r // 2 for r in f.box.resolution]
    idx[axis] = slice(None)
    coords = f.box.axes()[axis]
    vals = f.values[tuple(idx)]
    lines = [f"x{axis},value"]
    lines += [f"{repr(float(c))},{repr(float(v))}" for c, v in zip(coords, vals)]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path
