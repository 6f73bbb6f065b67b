"""Fractional integrals and maximal operators on grid functions.

Every operator is a product-integration rule ``sum_c f_c W(x - y_c)``.  Far
from ``x`` the weight is the midpoint rule for ``Omega(d)|d|^(alpha-n)``;
inside a small ball of radius ``inner_cutoff`` a polar rule (graded in the
radius so that ``r^(alpha-1) dr`` is integrated exactly) is applied against
the cell values, and the cells straddling that ball are sub-sampled.  Cell
contributions are binned into dyadic shells ``2^-j D <= |x-y| < 2^(1-j) D``
and the shell totals are added in a fixed order.

Maximal operators use ball integrals with a linear ramp of width one cell at
the ball boundary, normalized by the analytic ball measure, and a sup over a
log-spaced radius grid.

Field versions evaluate on the coarsened lattice of cell centres with
indices ``stride*j + stride//2``; they go through the compiled stencil core.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gamma as _gamma

from . import _backend
from .funcspace import Box, GridFunction
from .kernel import Kernel, make_kernel, sphere_norm, sphere_quadrature

__all__ = [
    "OperatorParams",
    "gamma_alpha",
    "unit_ball_volume",
    "frac_integral",
    "riesz_potential",
    "frac_maximal",
    "hl_maximal",
    "power_maximal",
    "sharp_maximal",
    "ball_oscillations",
    "hedberg_split_radius",
    "split_terms",
    "frac_integral_field",
    "riesz_potential_field",
    "frac_maximal_field",
    "hl_maximal_field",
    "power_maximal_field",
    "lattice_box",
    "lattice_points",
]

_IDENTITY = {}


def _identity_kernel(n):
    if n not in _IDENTITY:
        _IDENTITY[n] = make_kernel("const", n)
    return _IDENTITY[n]


@dataclass(frozen=True)
class OperatorParams:
    """Order, kernel and quadrature knobs shared by all operators.

    ``kernel=None`` means ``Omega = 1``.  ``inner_cutoff`` is in physical
    units; ``None`` means two cells.  ``atol`` > 0 drops the innermost shells
    once their a priori bound ``||Omega||_1 r^alpha / alpha * max|f|`` falls
    below it.
    """

    alpha: float
    kernel: Kernel | None = None
    shell_count: int = 32
    inner_cutoff: float | None = None
    radii_count: int = 512
    atol: float = 0.0
    subsamples: int = 8
    polar_radial: int = 16
    polar_angular: int = 64

    def __post_init__(self):
        if self.shell_count < 16:
            raise ValueError("shell_count must be at least 16")
        if self.radii_count < 2:
            raise ValueError("radii_count must be at least 2")
        if self.inner_cutoff is not None and not self.inner_cutoff > 0:
            raise ValueError("inner_cutoff must be positive")
        if self.atol < 0:
            raise ValueError("atol must be nonnegative")

    def check(self, n):
        if not 0 < self.alpha < n:
            raise ValueError(f"alpha must lie in (0, {n}), got {self.alpha}")
        if self.kernel is not None and self.kernel.n != n:
            raise ValueError("kernel dimension does not match the grid")

    def omega(self, n):
        return _identity_kernel(n) if self.kernel is None else self.kernel

    def cutoff(self, box):
        return 2 * float(np.max(box.h)) if self.inner_cutoff is None else float(self.inner_cutoff)

    def radii(self, box):
        """Log-spaced radii from two cells to the box diameter."""
        return np.geomspace(2 * float(np.max(box.h)), box.diameter, self.radii_count)


def gamma_alpha(alpha, n):
    """``2^alpha pi^(n/2) Gamma(alpha/2) / Gamma((n-alpha)/2)``."""
    if not 0 < alpha < n:
        raise ValueError(f"gamma_alpha needs 0 < alpha < n, got alpha={alpha}, n={n}")
    return float(2.0**alpha * np.pi ** (n / 2) * _gamma(alpha / 2) / _gamma((n - alpha) / 2))


def unit_ball_volume(n):
    return float(np.pi ** (n / 2) / _gamma(n / 2 + 1))


def _check_point(box, x):
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape != (box.n,):
        raise ValueError(f"evaluation point must have {box.n} coordinates")
    if not box.contains(x):
        raise ValueError(f"evaluation point {tuple(x)} lies outside the box")
    return x


# ---------------------------------------------------------------- near rule


def _polar_nodes(n, radial, angular):
    u, wu = np.polynomial.legendre.leggauss(radial)
    u = 0.5 * (u + 1)
    wu = 0.5 * wu
    if n == 2:
        t = 2 * np.pi * np.arange(angular) / angular
        th = np.stack([np.cos(t), np.sin(t)], -1)
        wt = np.full(angular, 2 * np.pi / angular)
    else:
        q = sphere_quadrature(3, max(4, angular // 8))
        th, wt = np.asarray(q.nodes), np.asarray(q.weights)
    return u, wu, th, wt


@lru_cache(maxsize=64)
def _near_rule_cached(h, params_key, frac, kernel, n):
    alpha, rho, sub, radial, angular = params_key
    h = np.asarray(h)
    frac = np.asarray(frac)
    halfdiag = 0.5 * float(np.linalg.norm(h))
    K = int(np.ceil((rho + halfdiag) / h.min())) + 1
    rng = np.arange(-K, K + 1)
    ms = np.stack(np.meshgrid(*([rng] * n), indexing="ij"), -1).reshape(-1, n)
    cdist = np.linalg.norm((ms + 0.5 - frac) * h, axis=-1)
    ms = ms[cdist < rho + halfdiag]
    vol = float(np.prod(h))
    weights = {}

    # sub-sampled midpoint rule outside the polar ball
    s = (np.arange(sub) + 0.5) / sub
    offs = np.stack(np.meshgrid(*([s] * n), indexing="ij"), -1).reshape(-1, n)
    for m in ms:
        d = (frac - m - offs) * h
        r = np.linalg.norm(d, axis=-1)
        keep = r >= rho
        w = 0.0
        if np.any(keep):
            dk = d[keep]
            w = float(np.sum(kernel(dk) * r[keep] ** (alpha - n))) * vol / len(offs)
        weights[tuple(m)] = w

    # graded polar rule inside: r = rho u^(1/alpha), r^(alpha-1) dr = rho^alpha/alpha du
    u, wu, th, wt = _polar_nodes(n, radial, angular)
    r = rho * u ** (1.0 / alpha)
    om = kernel.on_sphere(th)
    for ri, wi in zip(r, wu):
        d = ri * th
        cells = np.floor(frac - d / h).astype(int)
        ww = rho**alpha / alpha * wi * wt * om
        for c, w in zip(map(tuple, cells), ww):
            weights[c] = weights.get(c, 0.0) + float(w)
    keys = sorted(weights)
    m_near = np.array(keys, dtype=np.int64).reshape(-1, n)
    w_near = np.array([weights[k] for k in keys])
    return m_near, w_near


def _near_rule(box, params, frac):
    n = box.n
    key = (float(params.alpha), params.cutoff(box), int(params.subsamples),
           int(params.polar_radial), int(params.polar_angular))
    return _near_rule_cached(tuple(box.h), key, tuple(np.round(frac, 15)),
                             params.omega(n), n)


# ---------------------------------------------------------------- shells


def _shell_bins(dist, D, shell_count):
    with np.errstate(divide="ignore"):
        j = np.floor(np.log2(D / dist)).astype(np.int64) + 1
    return np.clip(j, 1, shell_count)


def _truncation_radius(f, params, n):
    """Radius below which the shells may be dropped under ``atol``."""
    if params.atol <= 0:
        return 0.0
    fmax = float(np.max(np.abs(f.values)))
    if fmax == 0:
        return 0.0
    om1 = sphere_norm(params.omega(n), 1)
    if om1 == 0:
        return np.inf
    return (params.atol * params.alpha / (fmax * om1)) ** (1.0 / params.alpha)


def _pointwise_weights(f, params, x):
    """Cell weights ``W``, shell bins (0 = near zone) and distances for point ``x``."""
    box = f.box
    n = box.n
    params.check(n)
    x = _check_point(box, x)
    kernel = params.omega(n)
    h = box.h
    xf = box.index_of(x)
    i0 = np.floor(xf).astype(np.int64)
    frac = xf - i0
    d = x - box.centers()
    dist = np.linalg.norm(d, axis=-1)
    vol = box.cell_volume
    W = np.zeros(box.shape)
    far = dist > 0
    W[far] = kernel(d[far]) * dist[far] ** (params.alpha - n) * vol
    bins = _shell_bins(np.where(far, dist, 1.0), box.diameter, params.shell_count)
    m_near, w_near = _near_rule(box, params, frac)
    cells = i0 + m_near
    inside = np.all((cells >= 0) & (cells < np.asarray(box.shape)), axis=1)
    near_mask = np.zeros(box.shape, dtype=bool)
    # the near zone replaces the midpoint weights of every cell it touches
    all_cells = i0 + m_near
    ok = np.all((all_cells >= 0) & (all_cells < np.asarray(box.shape)), axis=1)
    near_mask[tuple(all_cells[ok].T)] = True
    W[near_mask] = 0.0
    np.add.at(W, tuple(cells[inside].T), w_near[inside])
    bins[near_mask] = 0
    rt = _truncation_radius(f, params, n)
    if rt > params.cutoff(box):
        drop = dist < rt
        bins[drop] = -1
    return W, bins, dist


def _binned_total(W, bins, fv, nbins):
    keep = (bins.ravel() >= 0) & (fv.ravel() != 0)
    b = bins.ravel()[keep]
    shells = np.bincount(b, weights=W.ravel()[keep] * fv.ravel()[keep], minlength=nbins)
    return float(np.sum(shells)), shells


def frac_integral(f, params, x, return_shells=False):
    """``T_{Omega,alpha} f(x) = int Omega(x-y)|x-y|^(alpha-n) f(y) dy``."""
    W, bins, _ = _pointwise_weights(f, params, x)
    total, shells = _binned_total(W, bins, f.values, params.shell_count + 1)
    if not np.isfinite(total):
        raise FloatingPointError("non-finite accumulation in frac_integral")
    return (total, shells) if return_shells else total


def riesz_potential(f, alpha, x, **kw):
    """``I_alpha f(x)``: the ``Omega = 1`` integral divided by ``gamma(alpha)``."""
    params = OperatorParams(alpha, None, **kw)
    return frac_integral(f, params, x) / gamma_alpha(alpha, f.n)


def split_terms(f, params, x, sigma):
    """Near and far parts ``(I, II)`` of ``T_{|Omega|,alpha}|f|(x)`` split at ``sigma``."""
    if not sigma > 0:
        raise ValueError("split radius must be positive")
    absparams = OperatorParams(params.alpha, params.omega(f.n).absolute(), params.shell_count,
                               params.inner_cutoff, params.radii_count, 0.0,
                               params.subsamples, params.polar_radial, params.polar_angular)
    W, bins, dist = _pointwise_weights(f, absparams, x)
    a = W * np.abs(f.values)
    inner = (dist < sigma) | (bins == 0)
    return float(np.sum(a[inner])), float(np.sum(a[~inner]))


# ---------------------------------------------------------------- maximal


def _ramp_centres(radii, hr, n):
    """Ramp midpoints whose smoothed ball has the exact volume ``v_n r^n``.

    A linear ramp of width ``w`` centred at ``c`` has volume
    ``pi (c^2 + w^2/12)`` in the plane and ``4 pi/3 (c^3 + c w^2/4)`` in space.
    """
    if n == 2:
        return np.sqrt(radii**2 - hr**2 / 12)
    c = radii.copy()
    for _ in range(30):
        c -= (c**3 + c * hr**2 / 4 - radii**3) / (3 * c**2 + hr**2 / 4)
    return c


def _ramp_edges(radii, hr):
    edges = np.concatenate([radii - hr / 2, radii + hr / 2])
    order = np.argsort(edges, kind="stable")
    pos = np.empty_like(order)
    pos[order] = np.arange(len(order))
    k = len(radii)
    return edges[order], pos[:k], pos[k:]


def _ramp_ball_sums(A, AD, lo, hi, centres, hr):
    """Ramp-smoothed ball integrals from binned mass ``A`` and first moment ``AD``.

    Bins are indexed by ``searchsorted(edges, d, 'right')``; mass in bins
    ``<= e`` lies strictly inside edge ``e``.
    """
    cA = np.cumsum(A, axis=-1)
    cD = np.cumsum(AD, axis=-1)
    inner = cA[..., lo]
    band = cA[..., hi] - cA[..., lo]
    band_d = cD[..., hi] - cD[..., lo]
    return inner + band * (0.5 + centres / hr) - band_d / hr


def _maximal_setup(box, radii_count):
    radii = np.geomspace(2 * float(np.max(box.h)), box.diameter, radii_count)
    hr = float(np.mean(box.h))
    centres = _ramp_centres(radii, hr, box.n)
    edges, lo, hi = _ramp_edges(centres, hr)
    return radii, centres, hr, edges, lo, hi


def _maximal_value(S, radii, alpha, n):
    meas = unit_ball_volume(n) * radii**n
    vals = S / meas ** (1.0 - alpha / n)
    return vals.max(axis=-1)


def _maximal_point(f, kernel, alpha, x, radii_count):
    box = f.box
    n = box.n
    x = _check_point(box, x)
    radii, centres, hr, edges, lo, hi = _maximal_setup(box, radii_count)
    d = x - box.centers()
    dist = np.linalg.norm(d, axis=-1)
    om = np.empty(box.shape)
    far = dist > 0
    om[far] = np.abs(kernel(d[far]))
    if np.any(~far):
        om[~far] = float(np.mean(np.abs(kernel.on_sphere(sphere_quadrature(n).nodes))))
    a = om * np.abs(f.values) * box.cell_volume
    b = np.searchsorted(edges, dist.ravel(), side="right")
    nb = len(edges) + 1
    A = np.bincount(b, weights=a.ravel(), minlength=nb)
    AD = np.bincount(b, weights=(a * dist).ravel(), minlength=nb)
    S = _ramp_ball_sums(A, AD, lo, hi, centres, hr)
    return float(_maximal_value(S, radii, alpha, n))


def frac_maximal(f, params, x):
    """``M_{Omega,alpha} f(x) = sup_r m(B(x,r))^(alpha/n-1) int_B |Omega(x-y) f(y)| dy``."""
    params.check(f.n)
    return _maximal_point(f, params.omega(f.n), params.alpha, x, params.radii_count)


def hl_maximal(f, x, radii_count=512):
    """Hardy-Littlewood maximal function (centred balls)."""
    return _maximal_point(f, _identity_kernel(f.n), 0.0, x, radii_count)


def power_maximal(f, t, x, radii_count=512):
    """``M_t f(x) = (M |f|^t (x))^(1/t)``; ``t = inf`` is not allowed."""
    if not (np.isfinite(t) and t >= 1):
        raise ValueError("power_maximal needs a finite exponent t >= 1")
    return hl_maximal(f.power(t), x, radii_count) ** (1.0 / t)


# ---------------------------------------------------------------- sharp maximal


_BALL_CACHE = {}


def _ball_regions(box, family):
    """Per ball: bounding-box slices and a boolean mask of the cells (by centre
    inclusion) inside it.  Cached per (box, family)."""
    key = (box, family.key())
    hit = _BALL_CACHE.get(key)
    if hit is not None:
        return hit
    axes = box.axes()
    out = []
    for c, r in zip(family.centers, family.radii):
        sl, sub = [], []
        for a, ci in zip(axes, c):
            lo = int(np.searchsorted(a, ci - r, side="left"))
            hi = int(np.searchsorted(a, ci + r, side="right"))
            sl.append(slice(lo, hi))
            sub.append(a[lo:hi] - ci)
        if any(len(x) == 0 for x in sub):
            out.append((tuple(slice(0, 0) for _ in axes), np.zeros((0,) * box.n, bool)))
            continue
        d2 = sum(np.meshgrid(*[x**2 for x in sub], indexing="ij"))
        out.append((tuple(sl), d2 < r**2))
    if len(_BALL_CACHE) > 16:
        _BALL_CACHE.clear()
    _BALL_CACHE[key] = out
    return out


def ball_values(f, family):
    """Yield the samples of ``f`` inside each ball of ``family``."""
    v = f.values
    for sl, mask in _ball_regions(f.box, family):
        yield v[sl][mask]


def ball_counts(box, family):
    return np.array([int(m.sum()) for _, m in _ball_regions(box, family)])


def ball_oscillations(f, family):
    """Discrete mean oscillation of ``f`` over each ball (NaN for empty balls)."""
    out = np.full(len(family), np.nan)
    for k, w in enumerate(ball_values(f, family)):
        if w.size:
            out[k] = float(np.mean(np.abs(w - np.mean(w))))
    return out


def sharp_maximal(f, family, x, oscillations=None):
    """``M^# f(x)``: max of the mean oscillation over family balls containing ``x``."""
    x = np.asarray(x, float)
    osc = ball_oscillations(f, family) if oscillations is None else oscillations
    contains = np.sum((family.centers - x) ** 2, axis=1) < family.radii**2
    contains &= np.isfinite(osc)
    if not np.any(contains):
        raise ValueError(f"no ball of the family contains the point {tuple(x)}")
    return float(np.max(osc[contains]))


def hedberg_split_radius(f, p, t, x, radii_count=512):
    """``sigma = (||f||_p / M_t f(x))^(p/n)``, the balance radius of the near/far split."""
    from .norms import lp_norm

    mt = hl_maximal(f, x, radii_count) if t == 1 or t == np.inf else \
        power_maximal(f, t, x, radii_count)
    if mt == 0:
        raise ValueError("maximal function vanishes: f is zero, no split radius")
    return (lp_norm(f, p) / mt) ** (p / f.n)


# ---------------------------------------------------------------- fields


def lattice_points(box, stride):
    """Index array ``(P, n)`` of the coarsened lattice in C order."""
    axes = [np.arange(r // stride) * stride + stride // 2 for r in box.resolution]
    return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, box.n)


def lattice_box(box, stride):
    """Box whose cell centres are the lattice points of ``stride``."""
    h = box.h
    shift = (stride // 2 + 0.5 - stride / 2) * h
    lower = np.asarray(box.lower) + shift
    res = tuple(r // stride for r in box.resolution)
    upper = lower + np.asarray(res) * stride * h
    return Box(tuple(lower), tuple(upper), res)


def _offset_grid(box):
    """Displacements ``k h`` for offsets ``k in [-(N-1), N-1]^n``."""
    axes = [np.arange(-(r - 1), r) * hh for r, hh in zip(box.resolution, box.h)]
    return np.stack(np.meshgrid(*axes, indexing="ij"), -1)


@lru_cache(maxsize=16)
def _integral_stencil(box, params):
    n = box.n
    kernel = params.omega(n)
    d = _offset_grid(box)
    dist = np.linalg.norm(d, axis=-1)
    W = np.zeros(dist.shape)
    far = dist > 0
    W[far] = kernel(d[far]) * dist[far] ** (params.alpha - n) * box.cell_volume
    bins = _shell_bins(np.where(far, dist, 1.0), box.diameter, params.shell_count)
    m_near, w_near = _near_rule(box, params, np.full(n, 0.5))
    centre = np.asarray(box.resolution) - 1
    k = centre - m_near
    ok = np.all((k >= 0) & (k < np.asarray(W.shape)), axis=1)
    kk = tuple(k[ok].T)
    W[kk] = 0.0
    np.add.at(W, kk, w_near[ok])
    bins[kk] = 0
    bins = bins.astype(np.intc)
    W.setflags(write=False)
    bins.setflags(write=False)
    return W, bins, dist


def _chunked(points, size=256):
    for i in range(0, len(points), size):
        yield points[i:i + size]


def frac_integral_field(f, params, stride=4):
    """``T_{Omega,alpha} f`` on the stride lattice, as a GridFunction."""
    box = f.box
    params.check(box.n)
    W, bins, dist = _integral_stencil(box, params)
    bins_used = bins
    rt = _truncation_radius(f, params, box.n)
    if rt > params.cutoff(box):
        bins_used = np.where(dist < rt, -1, bins).astype(np.intc)
    pts = lattice_points(box, stride)
    nb = params.shell_count + 1
    out = np.empty(len(pts))
    for start, chunk in zip(range(0, len(pts), 256), _chunked(pts)):
        sums = _backend.binned_stencil_sums(W[None], bins_used, f.values, chunk, nb)
        out[start:start + len(chunk)] = sums[:, 0, :].sum(axis=-1)
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite accumulation in frac_integral_field")
    lb = lattice_box(box, stride)
    name = "T" if params.kernel is None else f"T[{params.kernel.label}]"
    return GridFunction(lb, out.reshape(lb.shape), f"{name}_{params.alpha:g}({f.label})")


def riesz_potential_field(f, alpha, stride=4, **kw):
    params = OperatorParams(alpha, None, **kw)
    T = frac_integral_field(f, params, stride)
    return T.with_values(T.values / gamma_alpha(alpha, f.n), f"I_{alpha:g}({f.label})")


@lru_cache(maxsize=16)
def _maximal_stencil(box, kernel, radii_count):
    n = box.n
    radii, centres, hr, edges, lo, hi = _maximal_setup(box, radii_count)
    d = _offset_grid(box)
    dist = np.linalg.norm(d, axis=-1)
    om = np.empty(dist.shape)
    far = dist > 0
    om[far] = np.abs(kernel(d[far]))
    om[~far] = float(np.mean(np.abs(kernel.on_sphere(sphere_quadrature(n).nodes))))
    w0 = om * box.cell_volume
    W = np.stack([w0, w0 * dist])
    bins = np.searchsorted(edges, dist, side="right").astype(np.intc)
    W.setflags(write=False)
    return W, bins, radii, centres, hr, lo, hi, len(edges) + 1


def _maximal_field(f, kernel, alpha, radii_count, stride, label):
    box = f.box
    W, bins, radii, centres, hr, lo, hi, nb = _maximal_stencil(box, kernel, radii_count)
    pts = lattice_points(box, stride)
    absf = np.abs(f.values)
    out = np.empty(len(pts))
    for start, chunk in zip(range(0, len(pts), 256), _chunked(pts)):
        sums = _backend.binned_stencil_sums(W, bins, absf, chunk, nb)
        S = _ramp_ball_sums(sums[:, 0], sums[:, 1], lo, hi, centres, hr)
        out[start:start + len(chunk)] = _maximal_value(S, radii, alpha, box.n)
    lb = lattice_box(box, stride)
    return GridFunction(lb, out.reshape(lb.shape), label)


def frac_maximal_field(f, params, stride=4):
    params.check(f.n)
    name = "M" if params.kernel is None else f"M[{params.kernel.label}]"
    return _maximal_field(f, params.omega(f.n), params.alpha, params.radii_count, stride,
                          f"{name}_{params.alpha:g}({f.label})")


def hl_maximal_field(f, stride=4, radii_count=512):
    return _maximal_field(f, _identity_kernel(f.n), 0.0, radii_count, stride, f"M({f.label})")


def power_maximal_field(f, t, stride=4, radii_count=512):
    if not (np.isfinite(t) and t >= 1):
        raise ValueError("power_maximal needs a finite exponent t >= 1")
    M = hl_maximal_field(f.power(t), stride, radii_count)
    return M.with_values(M.values ** (1.0 / t), f"M_{t:g}({f.label})")
