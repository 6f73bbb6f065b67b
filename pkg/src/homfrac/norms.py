"""Lebesgue, weak Lebesgue, Morrey, weak Morrey, BMO and Orlicz functionals.

Regions are ``None`` (the whole box) or a :class:`~homfrac.funcspace.Ball`;
a cell belongs to a ball when its centre does.  Sup-over-balls norms are maxima
over a finite :class:`~homfrac.funcspace.BallFamily` and are lower bounds of
the true sup.  Ball measures are analytic (``v_n r^n``) unless
``measure="discrete"`` is requested, in which case the covered cell volume is
used.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .funcspace import Ball, BallFamily
from .operators import ball_counts, ball_values, unit_ball_volume

__all__ = [
    "NormSpec",
    "NORM_KINDS",
    "lp_norm",
    "weak_lp_norm",
    "morrey_norm",
    "weak_morrey_norm",
    "bmo_norm",
    "luxemburg_lplogl",
    "morrey_llogl_norm",
    "morrey_ball_values",
    "weak_morrey_ball_values",
    "llogl_ball_values",
    "log_plus",
    "evaluate_norm",
]

NORM_KINDS = ("lp", "weak_lp", "morrey", "weak_morrey", "bmo", "luxemburg_lplogl", "morrey_llogl")


def log_plus(t):
    """``max(log t, 0)`` with ``log+ 0 = 0``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(t > 1, np.log(np.where(t > 1, t, 1.0)), 0.0)


def _check_p(p, allow_inf=True):
    if p == np.inf and allow_inf:
        return
    if not (np.isfinite(p) and p > 0):
        raise ValueError(f"exponent must be positive, got {p}")


def _check_kappa(kappa):
    if not 0 <= kappa <= 1:
        raise ValueError(f"kappa must lie in [0, 1], got {kappa}")


def _check_family(family):
    if family is None or len(family) == 0:
        raise ValueError("ball family is empty")


def _check_measure(measure):
    if measure not in ("analytic", "discrete"):
        raise ValueError("measure must be 'analytic' or 'discrete'")


def _region_values(f, region):
    if region is None:
        return f.values.ravel()
    if isinstance(region, Ball):
        return next(ball_values(f, BallFamily.single(region)))
    raise TypeError("region must be None or a Ball")


def _measure(family, measure, box):
    if measure == "analytic":
        return unit_ball_volume(family.centers.shape[1]) * family.radii ** family.centers.shape[1]
    if measure == "discrete":
        return ball_counts(box, family) * box.cell_volume
    raise ValueError("measure must be 'analytic' or 'discrete'")


def lp_norm(f, p, region=None):
    """Riemann-sum ``L^p`` (quasi-)norm over ``region``; ``p = inf`` gives the max."""
    _check_p(p)
    v = np.abs(_region_values(f, region))
    if v.size == 0:
        return 0.0
    if p == np.inf:
        return float(v.max())
    return float(np.sum(v**p) * f.box.cell_volume) ** (1.0 / p)


def _weak_from_values(v, p, vol):
    if v.size == 0:
        return 0.0
    if p == np.inf:
        return float(np.max(v))
    s = np.sort(v)[::-1]
    k = np.arange(1, len(s) + 1)
    return float(np.max(s * (k * vol) ** (1.0 / p)))


def weak_lp_norm(f, p, region=None):
    """``sup_lambda lambda m(|f| > lambda)^(1/p)``, attained at the sample values."""
    _check_p(p)
    return _weak_from_values(np.abs(_region_values(f, region)), p, f.box.cell_volume)


def morrey_ball_values(f, p, kappa, family, measure="analytic"):
    """Per-ball ``m(B)^(-kappa/p) ||f chi_B||_p``."""
    _check_p(p, allow_inf=False)
    _check_kappa(kappa)
    _check_family(family)
    _check_measure(measure)
    vol = f.box.cell_volume
    a = f.abs() if p == 1 else f.power(p)
    ints = np.array([np.sum(w) * vol for w in ball_values(a, family)])
    m = _measure(family, measure, f.box)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(m > 0, (ints / m**kappa) ** (1.0 / p), 0.0)
    return out


def morrey_norm(f, p, kappa, family, measure="analytic"):
    return float(np.max(morrey_ball_values(f, p, kappa, family, measure)))


def weak_morrey_ball_values(f, p, kappa, family, measure="analytic"):
    _check_p(p, allow_inf=False)
    _check_kappa(kappa)
    _check_family(family)
    _check_measure(measure)
    vol = f.box.cell_volume
    w = np.array([_weak_from_values(np.abs(x), p, vol) for x in ball_values(f, family)])
    m = _measure(family, measure, f.box)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(m > 0, w / m ** (kappa / p), 0.0)


def weak_morrey_norm(f, p, kappa, family, measure="analytic"):
    return float(np.max(weak_morrey_ball_values(f, p, kappa, family, measure)))


def bmo_norm(f, family):
    """Max over the family of the discrete mean oscillation."""
    from .operators import ball_oscillations

    _check_family(family)
    osc = ball_oscillations(f, family)
    osc = osc[np.isfinite(osc)]
    return float(osc.max()) if osc.size else 0.0


def _luxemburg_values(v, p, vol):
    """``inf{lam : int (|f|/lam)^p (1 + log+(|f|/lam)) <= 1}`` for samples ``v``.

    In ``mu = log lam`` the functional is convex and decreasing, so Newton's
    method started left of the root (at the ``L^p`` norm, a lower bound)
    increases monotonically to it.  Bisection on the documented bracket is the
    fallback.
    """
    v = np.abs(np.asarray(v, dtype=float))
    v = v[v > 0]
    if v.size == 0:
        return 0.0
    M = float(v.max())
    t = v / M
    logt = np.log(t)
    tp = t**p

    def phi(mu):
        # returns F(mu) - 1 and dF/dmu, with values in units of M
        e = np.exp(-p * mu)
        ex = np.maximum(logt - mu, 0.0)
        F = e * float(np.sum(tp * (1 + ex))) * vol
        dF = -p * F - e * float(np.sum(tp[ex > 0])) * vol
        return F - 1.0, dF

    mu = np.log(float(np.sum(tp) * vol)) / p
    for _ in range(100):
        g, dg = phi(mu)
        if g <= 0:
            break
        step = g / dg
        mu -= step
        if abs(step) <= 1e-14 * max(1.0, abs(mu)):
            return M * float(np.exp(mu))
    if abs(phi(mu)[0]) <= 1e-13:
        return M * float(np.exp(mu))

    # bracket [1e-9, m (1 + log+ M) + 1/M] in units of M, widened if needed
    mass = v.size * vol
    lo = np.log(1e-9)
    hi = np.log(mass * (1 + max(np.log(M), 0.0)) + 1.0 / M + 1.0)
    while phi(lo)[0] <= 0:
        lo -= 10.0
    while phi(hi)[0] > 0:
        hi += 10.0
    root = brentq(lambda m: phi(m)[0], lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps,
                  maxiter=500)
    return M * float(np.exp(root))


def luxemburg_lplogl(f, p, region=None):
    """Luxemburg norm for ``Phi(t) = t^p (1 + log+ t)`` over ``region``."""
    _check_p(p, allow_inf=False)
    if p < 1:
        raise ValueError("luxemburg_lplogl needs p >= 1")
    return _luxemburg_values(_region_values(f, region), p, f.box.cell_volume)


def llogl_ball_values(f, p, kappa, family, measure="analytic"):
    _check_p(p, allow_inf=False)
    if p < 1:
        raise ValueError("morrey_llogl_norm needs p >= 1")
    _check_kappa(kappa)
    _check_family(family)
    _check_measure(measure)
    vol = f.box.cell_volume
    lux = np.array([_luxemburg_values(x, p, vol) for x in ball_values(f, family)])
    m = _measure(family, measure, f.box)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(m > 0, lux / m ** (kappa / p), 0.0)


def morrey_llogl_norm(f, p, kappa, family, measure="analytic"):
    """``sup_B m(B)^(-kappa/p) ||f||_{L^p log L(B)}`` over the family."""
    return float(np.max(llogl_ball_values(f, p, kappa, family, measure)))


@dataclass(frozen=True)
class NormSpec:
    """Which norm to take, with the parameters that kind needs."""

    kind: str
    p: float = 2.0
    kappa: float | None = None
    family: BallFamily | None = None
    ball: Ball | None = None

    def __post_init__(self):
        if self.kind not in NORM_KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}; choose from {', '.join(NORM_KINDS)}")
        morrey = self.kind in ("morrey", "weak_morrey", "morrey_llogl")
        if morrey != (self.kappa is not None):
            raise ValueError(f"kappa is required exactly for Morrey kinds (kind={self.kind})")
        if (morrey or self.kind == "bmo") and self.family is None:
            raise ValueError(f"norm kind {self.kind} needs a ball family")
        if self.kappa is not None:
            _check_kappa(self.kappa)
        if self.kind != "bmo":
            _check_p(self.p)


def evaluate_norm(f, spec):
    k = spec.kind
    if k == "lp":
        return lp_norm(f, spec.p, spec.ball)
    if k == "weak_lp":
        return weak_lp_norm(f, spec.p, spec.ball)
    if k == "morrey":
        return morrey_norm(f, spec.p, spec.kappa, spec.family)
    if k == "weak_morrey":
        return weak_morrey_norm(f, spec.p, spec.kappa, spec.family)
    if k == "bmo":
        return bmo_norm(f, spec.family)
    if k == "luxemburg_lplogl":
        return luxemburg_lplogl(f, spec.p, spec.ball)
    return morrey_llogl_norm(f, spec.p, spec.kappa, spec.family)
