"""Empirical checks of the pointwise estimates, norm inequalities and embeddings.

A :class:`Workbench` holds one resolution of the test setup (box, zoo, ball
family, lattice) and caches operator fields.  Checks take a workbench and
return a :class:`~homfrac.inequalities.report.VerificationReport`; "<~"
estimates are run on the workbench and its refinement (double resolution,
double family density) and judged by the stability of the fitted constant.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import replace
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ..funcspace import Ball, BallFamily, Box, GridFunction, make_ball_family, zoo
from ..kernel import dini_integral, make_kernel, shell_shift_deviation
from ..norms import (
    bmo_norm,
    llogl_ball_values,
    lp_norm,
    luxemburg_lplogl,
    morrey_ball_values,
    morrey_llogl_norm,
    morrey_norm,
    weak_lp_norm,
    weak_morrey_ball_values,
    weak_morrey_norm,
)
from ..operators import (
    OperatorParams,
    ball_oscillations,
    frac_integral_field,
    frac_maximal_field,
    gamma_alpha,
    hedberg_split_radius,
    hl_maximal_field,
    lattice_box,
    power_maximal_field,
    sharp_maximal,
    split_terms,
    unit_ball_volume,
)
from .exponents import ExponentConfig, classify, conjugate
from .report import (
    EXACT_TOLERANCE,
    FAIL,
    INCONCLUSIVE,
    PASS,
    VerificationReport,
    bounded_verdict,
    exact_verdict,
)

__all__ = [
    "Workbench",
    "kernel_key",
    "hedberg_field",
    "hedberg_check",
    "split_points",
    "adams_field",
    "adams_check",
    "BOUNDEDNESS",
    "boundedness_ratio",
    "bounded_sweep",
    "embedding_check",
    "weak_lp_morrey_constant",
    "weak_lp_morrey_check",
    "hls_form",
    "hls_adjoint_form",
    "hls_bruteforce",
    "hls_check",
    "product_check",
    "olsen_check",
    "holder_check",
    "domination_check",
    "sharp_band",
    "kernel_shift_check",
    "is_dini",
    "maximal_llogl_check",
    "lplogl_check",
]


def kernel_key(kernel):
    if kernel is None:
        return ("const", 0, "{}")
    return (kernel.label, kernel.n, json.dumps(kernel.params, sort_keys=True))


def _fkey(f):
    return (f.label, f.box, hashlib.sha1(f.values.tobytes()).hexdigest())


def _arg_key(a):
    if isinstance(a, BallFamily):
        return a.key()
    if isinstance(a, Ball):
        return (tuple(np.asarray(a.center, dtype=float)), float(a.radius))
    return a


def _is_const(kernel):
    return kernel is None or kernel.constant == 1.0


class Workbench:
    """Box, zoo, ball family and an operator-field cache at one resolution."""

    def __init__(self, resolution=128, n=2, half_width=2.0, seed=0, stride=4,
                 family=None, family_radii=8, operator_kw=None, family_centers=8):
        self.resolution = int(resolution)
        self.n = int(n)
        self.half_width = float(half_width)
        self.seed = int(seed)
        self.stride = int(stride)
        self.family_radii = int(family_radii)
        self.operator_kw = dict(operator_kw or {})
        self.box = Box.cube(self.n, self.half_width, self.resolution)
        self.zoo = zoo(self.box, self.seed)
        self.lattice = lattice_box(self.box, self.stride)
        if family is None:
            h = float(np.max(self.box.h))
            family = make_ball_family(self.box, max(1, self.resolution // family_centers),
                                      self.family_radii, rmin=2 * self.stride * h)
        self.family = family
        self._cache = {}
        self._refined = None

    def refined(self):
        """Double resolution and ball-family density; the family is a superset."""
        if self._refined is None:
            self._refined = Workbench(2 * self.resolution, self.n, self.half_width, self.seed,
                                      self.stride, self.family.refined(), self.family_radii,
                                      self.operator_kw)
        return self._refined

    def params(self, alpha, kernel=None):
        return OperatorParams(alpha, None if _is_const(kernel) else kernel, **self.operator_kw)

    def _cached(self, key, build):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]

    def T(self, f, kernel, alpha):
        """``T_{Omega,alpha} f`` on the lattice."""
        key = ("T", _fkey(f), kernel_key(None if _is_const(kernel) else kernel), float(alpha))
        return self._cached(key, lambda: frac_integral_field(f, self.params(alpha, kernel),
                                                             self.stride))

    def M(self, f, kernel, alpha):
        """``M_{Omega,alpha} f`` on the lattice."""
        key = ("M", _fkey(f), kernel_key(None if _is_const(kernel) else kernel), float(alpha))
        return self._cached(key, lambda: frac_maximal_field(f, self.params(alpha, kernel),
                                                            self.stride))

    def Ms(self, f, t):
        """``M_t f`` on the lattice (``t = 1`` is the Hardy-Littlewood maximal function)."""
        rc = self.operator_kw.get("radii_count", 512)
        key = ("Ms", _fkey(f), float(t))
        if t == 1:
            return self._cached(key, lambda: hl_maximal_field(f, self.stride, rc))
        return self._cached(key, lambda: power_maximal_field(f, t, self.stride, rc))

    def norm(self, fn, f, *args):
        """``fn(f, *args)`` cached on the function's content."""
        key = (fn.__name__, _fkey(f)) + tuple(_arg_key(a) for a in args)
        return self._cached(key, lambda: fn(f, *args))

    def on_lattice(self, f):
        """Samples of a fine grid function at the lattice points."""
        s = self.stride
        sl = tuple(slice(s // 2, (r // s) * s, s) for r in f.box.resolution)
        return GridFunction(lattice_box(f.box, s), f.values[sl], f.label)

    def largest_ball(self):
        """The biggest family ball whose centre is closest to the origin."""
        fam = self.family
        d = np.linalg.norm(fam.centers, axis=1)
        order = np.lexsort((-fam.radii, d))
        k = order[0]
        return Ball(fam.centers[k], fam.radii[k])

    def pairs(self):
        """Fixed (f, g) pairs from the zoo."""
        z = self.zoo
        return [(z[i], z[(i + 7) % len(z)]) for i in range(len(z))]


def _cfg_text(cfg):
    return ", ".join(f"{k}={v}" for k, v in cfg.to_dict().items() if v is not None)


def _require(cfg, *tags):
    c = classify(cfg)
    if not any(t in c.tags for t in tags):
        why = "; ".join(c.explanations) or f"tags {sorted(c.tags)} do not include {tags}"
        raise ValueError(f"configuration ({_cfg_text(cfg)}) does not satisfy the hypotheses: {why}")
    return c


def _ms(wb, f, s):
    sc = conjugate(s)
    return wb.Ms(f, sc if np.isfinite(sc) else 1.0)


# ---------------------------------------------------------------- pointwise


def _ratio_field(T, Ms, norm, p, q):
    denom = Ms.values ** (p / q) * norm ** (1 - p / q)
    with np.errstate(divide="ignore", invalid="ignore"):
        R = np.where(denom > 0, np.abs(T.values) / denom, np.where(T.values == 0, 0.0, np.inf))
    return T.with_values(R, f"R({T.label})")


def hedberg_field(wb, f, kernel, cfg):
    """``|T f| / ([M_{s'} f]^{p/q} ||f||_p^{1-p/q})`` on the lattice."""
    c = _require(cfg, "strong-lebesgue", "weak-lebesgue")
    q = c.derived["q"]
    return _ratio_field(wb.T(f, kernel, cfg.alpha), _ms(wb, f, cfg.s), lp_norm(f, cfg.p),
                        cfg.p, q)


def split_points(n, per_axis=3, spread=0.9):
    """Fixed physical sample points for the near/far split.

    The shift keeps them off the cell lattice and at least ~0.19 away from the
    singular centres of the zoo powers, where the maximal function is not yet
    resolved at the base grid.
    """
    ax = np.linspace(-spread, spread, per_axis)
    pts = np.stack(np.meshgrid(*([ax] * n), indexing="ij"), -1).reshape(-1, n)
    shift = np.zeros(n)
    shift[:2] = (0.13, -0.21)
    return pts + shift


def _split_constants(wb, f, kernel, cfg, norm, points):
    """Near/far split at the balance radius: fitted constants of both bounds."""
    from ..operators import hl_maximal, power_maximal

    n, a, p = wb.n, cfg.alpha, cfg.p
    sc = conjugate(cfg.s)
    t = sc if np.isfinite(sc) else 1.0
    params = wb.params(a, kernel)
    rc = wb.operator_kw.get("radii_count", 512)
    cI, cII = 0.0, 0.0
    for x in points:
        sigma = hedberg_split_radius(f, p, t, x, rc)
        mt = hl_maximal(f, x, rc) if t == 1 else power_maximal(f, t, x, rc)
        I, II = split_terms(f, params, x, sigma)
        cI = max(cI, I / (sigma**a * mt))
        cII = max(cII, II / (sigma ** (a - n / p) * norm))
    return cI, cII


def hedberg_check(wb, f, kernel, cfg, points=3):
    """Sup of the pointwise ratio for one function, plus the two split-term constants."""
    if not np.any(f.values):
        return VerificationReport("hedberg", "hedberg", cfg, [f.label], [math.nan], math.nan,
                                  INCONCLUSIVE, kernel=kernel_key(kernel)[0],
                                  details={"reason": "f is identically zero"})
    R = hedberg_field(wb, f, kernel, cfg)
    sup = float(np.max(R.values))
    details = {}
    if points:
        cI, cII = _split_constants(wb, f, kernel, cfg, lp_norm(f, cfg.p),
                                   split_points(wb.n, points))
        details = {"split_near_constant": cI, "split_far_constant": cII}
    verdict = PASS if np.isfinite(sup) else FAIL
    return VerificationReport("hedberg", "hedberg", cfg, [f.label], [sup], sup, verdict,
                              kernel=kernel_key(kernel)[0], details=details)


def adams_field(wb, f, kernel, cfg, family=None):
    """``|T f| / ([M_{s'} f]^{p/q} ||f||_{L^{p,kappa}}^{1-p/q})`` with the Adams ``q``."""
    c = _require(cfg, "strong-morrey", "weak-morrey")
    q = c.derived["q"]
    family = wb.family if family is None else family
    norm = morrey_norm(f, cfg.p, cfg.kappa, family)
    return _ratio_field(wb.T(f, kernel, cfg.alpha), _ms(wb, f, cfg.s), norm, cfg.p, q)


def adams_check(wb, f, kernel, cfg, family=None):
    if not np.any(f.values):
        return VerificationReport("adams", "adams", cfg, [f.label], [math.nan], math.nan,
                                  INCONCLUSIVE, kernel=kernel_key(kernel)[0],
                                  details={"reason": "f is identically zero"})
    sup = float(np.max(adams_field(wb, f, kernel, cfg, family).values))
    return VerificationReport("adams", "adams", cfg, [f.label], [sup], sup,
                              PASS if np.isfinite(sup) else FAIL, kernel=kernel_key(kernel)[0])


# ---------------------------------------------------------------- boundedness

# check id -> (required tag, operator, target norm, source norm)
BOUNDEDNESS = {
    "lebesgue-strong": ("strong-lebesgue", "T", "lp_q", "lp_p"),
    "lebesgue-weak": ("weak-lebesgue", "T", "weak_lp_q", "lp_p"),
    "lebesgue-weak-strongnorm": ("weak-lebesgue", "T", "lp_q", "lp_p"),
    "lebesgue-logl": ("endpoint-logl", "T", "lp_q_ball", "lplogl_p_ball"),
    "morrey-strong": ("strong-morrey", "T", "morrey_q", "morrey_p"),
    "morrey-weak": ("weak-morrey", "T", "weak_morrey_q", "morrey_p"),
    "morrey-logl": ("endpoint-morrey-logl", "T", "morrey_q", "llogl_p"),
    "bmo-lebesgue": ("bmo-critical", "T", "bmo", "lp_p"),
    "linf-lebesgue": ("linf-critical", "M", "linf", "lp_p"),
    "bmo-morrey": ("morrey-critical-bmo", "T", "bmo", "morrey_p"),
    "linf-morrey": ("morrey-critical-linf", "M", "linf", "morrey_p"),
    "bmo-weak-lebesgue": ("weak-critical-bmo", "T", "bmo", "weak_lp_p"),
    "linf-weak-lebesgue": ("weak-critical-linf", "M", "linf", "weak_lp_p"),
}


def _source_norm(wb, kind, f, cfg, family, ball):
    p, k = cfg.p, cfg.kappa
    if kind == "lp_p":
        return lp_norm(f, p)
    if kind == "weak_lp_p":
        return wb.norm(weak_lp_norm, f, p)
    if kind == "lplogl_p_ball":
        return wb.norm(luxemburg_lplogl, f, p, ball)
    if kind == "morrey_p":
        return wb.norm(morrey_norm, f, p, k, family)
    if kind == "llogl_p":
        return wb.norm(morrey_llogl_norm, f, p, k, family)
    raise ValueError(kind)


def _target_norm(kind, F, q, cfg, family, ball):
    k = cfg.kappa
    if kind == "lp_q":
        return lp_norm(F, q)
    if kind == "weak_lp_q":
        return weak_lp_norm(F, q)
    if kind == "lp_q_ball":
        return lp_norm(F, q, ball)
    if kind == "morrey_q":
        return morrey_norm(F, q, k, family)
    if kind == "weak_morrey_q":
        return weak_morrey_norm(F, q, k, family)
    if kind == "bmo":
        return bmo_norm(F, family)
    if kind == "linf":
        return lp_norm(F, np.inf)
    raise ValueError(kind)


def boundedness_ratio(wb, check, f, kernel, cfg, family=None, operator=None):
    """``target(op f) / source(f)`` for the named boundedness statement.

    ``operator`` may force ``"I"`` (Riesz potential, ``Omega = 1``) instead of
    the statement's own operator.  Endpoint statements on a ball use the
    largest family ball and restrict ``f`` to it.
    """
    tag, op, target, source = BOUNDEDNESS[check]
    c = classify(cfg)
    if tag not in c.tags:
        why = "; ".join(c.explanations) or f"configuration is classified as {sorted(c.tags)}"
        raise ValueError(f"{check} needs tag {tag!r}: {why}")
    family = wb.family if family is None else family
    ball = wb.largest_ball() if target.endswith("_ball") else None
    if ball is not None:
        f = f.restrict(ball)
    op = operator or op
    if op == "T":
        F = wb.T(f, kernel, cfg.alpha)
    elif op == "I":
        if not _is_const(kernel):
            raise ValueError("the Riesz path needs Omega = 1")
        T = wb.T(f, None, cfg.alpha)
        F = T.with_values(T.values / gamma_alpha(cfg.alpha, wb.n))
    else:
        F = wb.M(f, kernel, cfg.alpha)
    q = c.derived.get("q", cfg.q)
    src = _source_norm(wb, source, f, cfg, family, ball)
    if src == 0:
        raise ValueError("source norm vanishes")
    return _target_norm(target, F, q, cfg, family, ball) / src


def _sweep(wb, fn):
    labels, ratios = [], []
    for f in wb.zoo:
        labels.append(f.label)
        ratios.append(float(fn(wb, f)))
    return labels, ratios


def bounded_sweep(check_id, suite, wb, cfg, kernel, fn, refine=True, details=None):
    """Run ``fn(wb, f)`` over the zoo, then on the refined workbench, and judge stability."""
    labels, ratios = _sweep(wb, fn)
    C0 = float(np.max(ratios))
    if refine:
        wr = refine if isinstance(refine, Workbench) else wb.refined()
        _, r2 = _sweep(wr, fn)
        verdict, delta = bounded_verdict(ratios, r2)
        C1 = float(np.max(r2))
    else:
        verdict = PASS if np.all(np.isfinite(ratios)) else FAIL
        delta, C1 = None, None
    return VerificationReport(check_id, suite, cfg, labels, ratios, C0, verdict, C1, delta,
                              0.10 if refine else None, kernel_key(kernel)[0], details or {})


# ---------------------------------------------------------------- embeddings


def embedding_check(f, q, kappa, q_star, family, weak=False):
    """Ballwise ``L^{q,kappa} -> L^{q*,kappa*}`` with constant 1.

    Returns a report whose ratios are the per-ball maxima of
    ``lhs / rhs`` under the discrete and the analytic ball measure.
    """
    if not q_star < q:
        raise ValueError("inclusion needs q* < q")
    kappa_star = 1 - (1 - kappa) * q_star / q
    vals = weak_morrey_ball_values if weak else morrey_ball_values
    out = {}
    for measure in ("discrete", "analytic"):
        lhs = vals(f, q_star, kappa_star, family, measure)
        rhs = vals(f, q, kappa, family, measure)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(rhs > 0, lhs / rhs, np.where(lhs == 0, 0.0, np.inf))
        out[measure] = float(np.max(r))
    ok = out["discrete"] <= 1 + 1e-12 and out["analytic"] <= 1 + EXACT_TOLERANCE
    cid = "weak-morrey-inclusion" if weak else "morrey-inclusion"
    cfg = ExponentConfig(n=f.n, p=q, q=q_star, kappa=kappa)
    return VerificationReport(cid, "embeddings", cfg, [f.label], [out["analytic"]],
                              out["analytic"], PASS if ok else FAIL, threshold=1 + EXACT_TOLERANCE,
                              details={"kappa_star": kappa_star, "discrete_max": out["discrete"],
                                       "analytic_max": out["analytic"]})


def weak_lp_morrey_constant(p, q):
    """``(p/(p-q))^(1/q)``."""
    if not 1 <= q < p:
        raise ValueError("the weak L^p to Morrey bound needs 1 <= q < p")
    return (p / (p - q)) ** (1.0 / q)


def weak_lp_morrey_check(f, p, q, family):
    """``||f||_{L^{q,1-q/p}} <= (p/(p-q))^(1/q) ||f||_{L^{p,inf}}`` ballwise."""
    C = weak_lp_morrey_constant(p, q)
    kappa = 1 - q / p
    w = weak_lp_norm(f, p)
    out = {}
    for measure in ("discrete", "analytic"):
        lhs = morrey_ball_values(f, q, kappa, family, measure)
        out[measure] = float(np.max(lhs)) / (C * w) if w > 0 else 0.0
    ok = out["discrete"] <= 1 + 1e-12 and out["analytic"] <= 1 + EXACT_TOLERANCE
    cfg = ExponentConfig(n=f.n, p=p, q=q, kappa=kappa)
    return VerificationReport("weak-lp-in-morrey", "embeddings", cfg, [f.label], [out["analytic"]],
                              out["analytic"], PASS if ok else FAIL, threshold=1 + EXACT_TOLERANCE,
                              details={"constant": C, "discrete_max": out["discrete"],
                                       "analytic_max": out["analytic"]})


def holder_check(F, G, p, q, family=None, kappa=None):
    """Holder with constant 1: on the whole box, or ballwise in Morrey form."""
    r = 1.0 / (1.0 / p + 1.0 / q)
    FG = F * G
    if family is None:
        lhs = lp_norm(FG, r)
        rhs = lp_norm(F, p) * lp_norm(G, q)
        ratio = lhs / rhs if rhs > 0 else 0.0
        cid = "holder"
    else:
        lhs = morrey_ball_values(FG, r, kappa, family)
        rhs = morrey_ball_values(F, p, kappa, family) * morrey_ball_values(G, q, kappa, family)
        with np.errstate(divide="ignore", invalid="ignore"):
            rr = np.where(rhs > 0, lhs / rhs, np.where(lhs == 0, 0.0, np.inf))
        ratio = float(np.max(rr))
        cid = "morrey-holder"
    cfg = ExponentConfig(n=F.n, p=p, q=q, r=r, kappa=kappa)
    return VerificationReport(cid, "olsen", cfg, [f"{F.label} x {G.label}"], [ratio], ratio,
                              PASS if ratio <= 1 + 1e-12 else FAIL, threshold=1.0)


# ---------------------------------------------------------------- HLS / bilinear


def hls_form(f, g, kernel, lam, stride=1, params_kw=None):
    """``|int f T_{Omega,n-lam} g|`` on the stride lattice."""
    n = f.n
    if not 0 < lam < n:
        raise ValueError(f"lambda must lie in (0, {n})")
    if f.box != g.box:
        raise ValueError("f and g live on different boxes")
    kern = None if _is_const(kernel) else kernel
    Tg = frac_integral_field(g, OperatorParams(n - lam, kern, **(params_kw or {})), stride)
    fl = _lattice_samples(f, stride)
    return abs(float(np.sum(fl * Tg.values)) * Tg.box.cell_volume)


def hls_adjoint_form(f, g, kernel, lam, stride=1, params_kw=None):
    """``|int T_{Omega~,n-lam} f g|`` with the reflected kernel."""
    n = f.n
    kern = None if _is_const(kernel) else kernel.reflected()
    Tf = frac_integral_field(f, OperatorParams(n - lam, kern, **(params_kw or {})), stride)
    gl = _lattice_samples(g, stride)
    return abs(float(np.sum(Tf.values * gl)) * Tf.box.cell_volume)


def _lattice_samples(f, s):
    sl = tuple(slice(s // 2, (r // s) * s, s) for r in f.box.resolution)
    return f.values[sl]


@lru_cache(maxsize=32)
def _self_term(h0, h1, lam, kkey, kernel):
    """``int_cell int_cell Omega(x-y)|x-y|^-lam dx dy`` in the plane, in polar form."""
    def radial(t):
        c, s = abs(math.cos(t)), abs(math.sin(t))
        R = min(h0 / c if c > 0 else math.inf, h1 / s if s > 0 else math.inf)
        val = (h0 * h1 * R ** (2 - lam) / (2 - lam)
               - (h0 * s + h1 * c) * R ** (3 - lam) / (3 - lam)
               + c * s * R ** (4 - lam) / (4 - lam))
        om = 1.0 if kernel is None else float(kernel.on_sphere(np.array([math.cos(t), math.sin(t)])))
        return om * val

    # split at the corner directions where R(t) has kinks
    breaks = [0.0]
    a = math.atan2(h1, h0)
    for b in (a, math.pi / 2, math.pi - a, math.pi, math.pi + a, 1.5 * math.pi,
              2 * math.pi - a, 2 * math.pi):
        breaks.append(b)
    total = 0.0
    for lo, hi in zip(breaks[:-1], breaks[1:]):
        total += quad(radial, lo, hi, epsabs=0, epsrel=1e-12, limit=200)[0]
    return total


def hls_bruteforce(f, g, kernel, lam):
    """Double sum over cell pairs with an exact same-cell term (plane only).

    Off-diagonal pairs use the midpoint rule
    ``f_c g_c' Omega(y_c - y_c') |y_c - y_c'|^-lam vol^2``.
    """
    if f.n != 2:
        raise ValueError("the brute-force oracle is implemented in the plane")
    kern = None if _is_const(kernel) else kernel
    box = f.box
    y = box.centers().reshape(-1, 2)
    fv = f.values.ravel()
    gv = g.values.ravel()
    vol = box.cell_volume
    total = 0.0
    nz_f = np.nonzero(fv)[0]
    nz_g = np.nonzero(gv)[0]
    yg = y[nz_g]
    for i in nz_f:
        d = y[i] - yg
        r = np.hypot(d[:, 0], d[:, 1])
        mask = r > 0
        om = np.ones(mask.sum()) if kern is None else kern(d[mask])
        total += fv[i] * float(np.sum(gv[nz_g][mask] * om * r[mask] ** (-lam))) * vol**2
    h0, h1 = box.h
    diag = float(np.sum(fv * gv))
    total += diag * _self_term(float(h0), float(h1), float(lam), kernel_key(kern), kern)
    return abs(total)


def _pair_sweep(wb, fn):
    labels, ratios = [], []
    for f, g in wb.pairs():
        labels.append(f"{f.label} x {g.label}")
        ratios.append(float(fn(wb, f, g)))
    return labels, ratios


def hls_check(wb, kernel, cfg, refine=True):
    """Sup over zoo pairs of ``|int int Omega f g / |x-y|^lam| / (||f||_p ||g||_q)``."""
    c = _require(cfg, "hls")
    q = c.derived["q"]

    def fn(w, f, g):
        return hls_form(f, g, kernel, cfg.lam, w.stride, w.operator_kw) / (
            lp_norm(f, cfg.p) * lp_norm(g, q))

    return _bilinear_report("hls", "hls", wb, cfg, kernel, fn, refine)


def _bilinear_report(cid, suite, wb, cfg, kernel, fn, refine, details=None):
    labels, ratios = _pair_sweep(wb, fn)
    C0 = float(np.max(ratios))
    if refine:
        _, r2 = _pair_sweep(wb.refined() if not isinstance(refine, Workbench) else refine, fn)
        verdict, delta = bounded_verdict(ratios, r2)
        C1 = float(np.max(r2))
    else:
        verdict, delta, C1 = (PASS if np.all(np.isfinite(ratios)) else FAIL), None, None
    return VerificationReport(cid, suite, cfg, labels, ratios, C0, verdict, C1, delta,
                              0.10 if refine else None, kernel_key(kernel)[0], details or {})


def _product_field(wb, f, g, kernel, alpha):
    """``f * T g`` on the lattice."""
    Tg = wb.T(g, kernel, alpha)
    return Tg.with_values(wb.on_lattice(f).values * Tg.values, f"{f.label}*T({g.label})")


def product_check(wb, kernel, cfg, variant, refine=True):
    """Bilinear product bounds in Lebesgue form.

    ``variant``: ``"strong"`` (``L^r``), ``"weak"`` (``L^{r,inf}``),
    ``"logl-f"`` / ``"logl-g"`` (``L^r(B)`` against ``L^p log L(B)`` on ``f``
    or on ``g``, over the largest family ball).
    """
    tag = {"strong": "product-strong", "weak": "product-weak",
           "logl-f": "product-logl-f", "logl-g": "product-logl-g"}[variant]
    _require(cfg, tag)
    p, q, r, a = cfg.p, cfg.q, cfg.r, cfg.alpha

    def fn(w, f, g):
        if variant.startswith("logl"):
            B = w.largest_ball()
            f, g = f.restrict(B), g.restrict(B)
            P = _product_field(w, f, g, kernel, a)
            lhs = lp_norm(P, r, B)
            if variant == "logl-f":
                rhs = luxemburg_lplogl(f, p, B) * lp_norm(g, q, B)
            else:
                rhs = lp_norm(f, p, B) * luxemburg_lplogl(g, q, B)
            return lhs / rhs
        P = _product_field(w, f, g, kernel, a)
        lhs = lp_norm(P, r) if variant == "strong" else weak_lp_norm(P, r)
        return lhs / (lp_norm(f, p) * lp_norm(g, q))

    return _bilinear_report(f"product-{variant}", "hls", wb, cfg, kernel, fn, refine)


def olsen_check(wb, kernel, cfg, variant, refine=True, family=None):
    """Olsen-type bounds ``||f T g||`` in Morrey form over the family."""
    tag = {"strong": "olsen-strong", "weak": "olsen-weak",
           "logl-f": "olsen-logl-f", "logl-g": "olsen-logl-g"}[variant]
    _require(cfg, tag)
    p, q, r, k, a = cfg.p, cfg.q, cfg.r, cfg.kappa, cfg.alpha

    def fn(w, f, g):
        fam = w.family if family is None else family
        P = _product_field(w, f, g, kernel, a)
        if variant == "weak":
            lhs = weak_morrey_norm(P, r, k, fam)
        else:
            lhs = morrey_norm(P, r, k, fam)
        nf = w.norm(morrey_llogl_norm if variant == "logl-f" else morrey_norm, f, p, k, fam)
        ng = w.norm(morrey_llogl_norm if variant == "logl-g" else morrey_norm, g, q, k, fam)
        return lhs / (nf * ng)

    cid = f"olsen-{variant}"
    return _bilinear_report(cid, "olsen", wb, cfg, kernel, fn, refine)


# ---------------------------------------------------------------- domination


def domination_check(wb, f, kernel, alpha):
    """``M_{Omega,alpha} f <= v_n^{alpha/n-1} T_{|Omega|,alpha}|f|`` on the lattice.

    For ``Omega = 1`` this is ``M_alpha f <= gamma(alpha)/v_n^{1-alpha/n} I_alpha|f|``.
    The ratio is ``max lhs / (constant * rhs)``; the check passes when it is at
    most ``1.01``.
    """
    n = wb.n
    if not 0 < alpha < n:
        raise ValueError("alpha must lie in (0, n)")
    const = _is_const(kernel)
    absf = f.abs()
    M = wb.M(f, kernel, alpha)
    if const:
        T = wb.T(absf, None, alpha)
        I = T.values / gamma_alpha(alpha, n)
        C = gamma_alpha(alpha, n) / unit_ball_volume(n) ** (1 - alpha / n)
        rhs = C * I
    else:
        T = wb.T(absf, kernel.absolute(), alpha)
        C = unit_ball_volume(n) ** (alpha / n - 1)
        rhs = C * T.values
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(rhs > 0, M.values / rhs, np.where(M.values == 0, 0.0, np.inf))
    ratio = float(np.max(r))
    with np.errstate(divide="ignore", invalid="ignore"):
        fitted = float(np.max(np.where(rhs > 0, M.values * C / rhs, 0.0)))
    cfg = ExponentConfig(n=n, alpha=alpha)
    return VerificationReport("domination" if const else "domination-kernel", "domination", cfg,
                              [f.label], [ratio], fitted, exact_verdict([ratio]),
                              threshold=1 + EXACT_TOLERANCE, kernel=kernel_key(kernel)[0],
                              details={"constant": C})


# ---------------------------------------------------------------- sharp maximal band


def sharp_band(wb, f, kernel, alpha, points_stride=4, radii_count=8):
    """Band ``[c1, c2]`` of ``M^#(T f) / M_{Omega,alpha} f`` over lattice points."""
    T = wb.T(f, kernel, alpha)
    M = wb.M(f, kernel, alpha)
    fam = make_ball_family(T.box, 2, radii_count)
    osc = ball_oscillations(T, fam)
    cs = T.box.centers()
    sl = tuple(slice(0, None, points_stride) for _ in range(wb.n))
    pts = cs[sl].reshape(-1, wb.n)
    mv = M.values[sl].ravel()
    ratios = []
    for x, m in zip(pts, mv):
        if m > 0:
            ratios.append(sharp_maximal(T, fam, x, osc) / m)
    ratios = np.asarray(ratios)
    return float(ratios.min()), float(ratios.max())


# ---------------------------------------------------------------- Dini / kernel shift


_DINI = {}


def is_dini(kernel, s, n=2):
    """Finite ``int_0^1 omega_s / delta`` (cached per kernel and exponent)."""
    key = (kernel_key(kernel), n if kernel is None else kernel.n, float(s))
    if key not in _DINI:
        _DINI[key] = dini_integral(make_kernel("const", n) if kernel is None else kernel, s)
    return _DINI[key]


def kernel_shift_check(kernel, alpha, s, radii=(1.0, 2.0, 4.0), fractions=(0.05, 0.1, 0.2),
                     angle=0.3):
    """Ratios ``lhs / rhs_shape`` of the kernel-shift shell estimate over an R, |x| sweep.

    Passes when the spread ``max / min`` of the ratios is at most 4.
    """
    labels, ratios = [], []
    u = np.zeros(kernel.n)
    u[0], u[1] = math.cos(angle), math.sin(angle)
    for R in radii:
        for t in fractions:
            lhs, rhs = shell_shift_deviation(kernel, alpha, R, t * R * u, s)
            labels.append(f"R={R:g},|x|/R={t:g}")
            ratios.append(lhs / rhs)
    ratios = np.asarray(ratios)
    spread = float(ratios.max() / ratios.min())
    verdict = PASS if np.all(np.isfinite(ratios)) and spread <= 4 else FAIL
    cfg = ExponentConfig(n=kernel.n, alpha=alpha, s=s)
    return VerificationReport("kernel-shift", "dini-lemma", cfg, labels, ratios.tolist(),
                              float(ratios.max()), verdict, threshold=4.0,
                              kernel=kernel_key(kernel)[0], details={"spread": spread})


# ---------------------------------------------------------------- Orlicz facts


def lplogl_check(f, p, family):
    """``||f||_{L^p(B)} <= ||f||_{L^p log L(B)}`` and the power rule on every family ball.

    Returns two reports: ``lplogl`` and ``pp``.  The power rule is tested in
    the form ``|| |f|^p ||_{L log L(B)} <= ||f||^p_{L^p log L(B)}``.
    """
    fp = f.power(p)
    r_l, r_pp = [], []
    for B in family:
        lux = luxemburg_lplogl(f, p, B)
        if lux == 0:
            continue
        r_l.append(lp_norm(f, p, B) / lux)
        r_pp.append(luxemburg_lplogl(fp, 1, B) / lux**p)
    ml = max(r_l) if r_l else 0.0
    mp = max(r_pp) if r_pp else 0.0
    cfg = ExponentConfig(n=f.n, p=p)
    a = VerificationReport("lp-below-lplogl", "endpoint-logl", cfg, [f.label], [ml], ml,
                           PASS if ml <= 1 + 1e-12 else FAIL, threshold=1.0)
    b = VerificationReport("power-rule", "endpoint-logl", cfg, [f.label], [mp], mp,
                           PASS if mp <= 1 + 1e-12 else FAIL, threshold=1.0,
                           details={"max_over_p": mp / p})
    return a, b


def maximal_llogl_check(wb, f, ball):
    """``int_B M f / ||f||_{L log L(B)}`` for ``f`` restricted to ``ball``."""
    fb = f.restrict(ball)
    lux = luxemburg_lplogl(fb, 1, ball)
    if lux == 0:
        return math.nan
    M = wb.Ms(fb, 1)
    return lp_norm(M, 1, ball) / lux
