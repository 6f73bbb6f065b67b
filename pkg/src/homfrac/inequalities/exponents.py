"""Exponent bookkeeping: conjugates, the scaling relations, and ``classify``."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, replace

__all__ = [
    "ExponentConfig",
    "Classification",
    "TAGS",
    "conjugate",
    "sobolev_q",
    "adams_q",
    "product_r",
    "olsen_r",
    "hls_q",
    "classify",
    "with_solved_q",
]

TOL = 1e-12

TAGS = (
    "strong-lebesgue", "weak-lebesgue", "endpoint-logl",
    "bmo-critical", "linf-critical", "weak-critical-bmo", "weak-critical-linf",
    "strong-morrey", "weak-morrey", "endpoint-morrey-logl",
    "morrey-critical-bmo", "morrey-critical-linf",
    "hls",
    "product-strong", "product-weak", "product-logl-f", "product-logl-g",
    "olsen-strong", "olsen-weak", "olsen-logl-f", "olsen-logl-g",
)


def conjugate(t):
    """Holder conjugate ``t' = t/(t-1)`` with ``1' = inf`` and ``inf' = 1``."""
    if t == math.inf:
        return 1.0
    if t == 1:
        return math.inf
    if t < 1:
        raise ValueError(f"conjugate exponent needs t >= 1, got {t}")
    return t / (t - 1)


def _inv(x):
    return math.inf if x == 0 else 1.0 / x


def sobolev_q(n, alpha, p):
    """``q`` with ``1/q = 1/p - alpha/n``."""
    return _inv(1.0 / p - alpha / n)


def adams_q(n, alpha, p, kappa):
    """``q`` with ``1/q = 1/p - alpha/(n(1-kappa))``."""
    return _inv(1.0 / p - alpha / (n * (1 - kappa)))


def product_r(n, alpha, p, q):
    """``r`` with ``1/p + 1/q = 1/r + alpha/n``."""
    return _inv(1.0 / p + 1.0 / q - alpha / n)


def olsen_r(n, alpha, p, q, kappa):
    """``r`` with ``1/p + 1/q = 1/r + alpha/(n(1-kappa))``."""
    return _inv(1.0 / p + 1.0 / q - alpha / (n * (1 - kappa)))


def hls_q(n, p, lam):
    """``q`` with ``1/p + 1/q + lam/n = 2``."""
    return _inv(2 - 1.0 / p - lam / n)


def _eq(a, b):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= TOL * max(1.0, abs(a), abs(b))


@dataclass(frozen=True)
class ExponentConfig:
    """Exponents of one inequality.  Unused fields stay ``None``."""

    n: int = 2
    alpha: float | None = None
    s: float = math.inf
    p: float | None = None
    q: float | None = None
    kappa: float | None = None
    r: float | None = None
    lam: float | None = None

    def to_dict(self):
        return {k: _jsonable(v) for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: _from_json(v) for k, v in d.items()})

    @property
    def s_conj(self):
        return conjugate(self.s)


def _jsonable(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf"
    return v


def _from_json(v):
    if v in ("inf", "Infinity"):
        return math.inf
    return v


@dataclass(frozen=True)
class Classification:
    tags: frozenset
    derived: dict = field(default_factory=dict)
    explanations: tuple = ()

    @property
    def ok(self):
        return not self.explanations

    def __contains__(self, tag):
        return tag in self.tags


def _single_operator(cfg, sc, tags, derived, why):
    n, a, p = cfg.n, cfg.alpha, cfg.p
    kappa = cfg.kappa or 0.0
    if p < 1:
        why.append(f"p = {p:g} must be at least 1")
        return
    crit = n / a
    if kappa == 0:
        if p < crit and not _eq(p, crit):
            q = sobolev_q(n, a, p)
            derived["q"] = q
            if cfg.q is not None and not _eq(1 / cfg.q, 1 / q):
                why.append(f"q = {cfg.q:g} violates 1/q = 1/p - alpha/n (expected q = {q:g})")
                return
            if _eq(sc, p):
                tags.update({"weak-lebesgue", "endpoint-logl"})
            elif sc < p:
                tags.add("strong-lebesgue")
            else:
                why.append(f"p = {p:g} is below s' = {sc:g}; no (p,q) result applies")
        elif _eq(p, crit):
            smin = n / (n - a)
            if cfg.s >= smin or _eq(cfg.s, smin):
                tags.update({"bmo-critical", "linf-critical"})
                if cfg.s > smin and not _eq(cfg.s, smin):
                    tags.update({"weak-critical-bmo", "weak-critical-linf"})
            else:
                why.append(f"critical case p = n/alpha needs s >= n/(n-alpha) = {smin:g}")
        else:
            why.append(f"p = {p:g} exceeds n/alpha = {crit:g}")
        return
    if not 0 < kappa < 1:
        why.append(f"kappa = {kappa:g} must lie in (0, 1)")
        return
    if not (p < crit and not _eq(p, crit)):
        why.append(f"p = {p:g} must be below n/alpha = {crit:g}")
        return
    if sc > p and not _eq(sc, p):
        why.append(f"p = {p:g} is below s' = {sc:g}; no Morrey result applies")
        return
    kcrit = 1 - a * p / n
    if _eq(kappa, kcrit):
        q = sobolev_q(n, a, p)
        derived["q"] = q
        if cfg.q is not None and not _eq(1 / cfg.q, 1 / q):
            why.append(f"q = {cfg.q:g} violates 1/q = 1/p - alpha/n (expected q = {q:g})")
            return
        tags.update({"morrey-critical-bmo", "morrey-critical-linf"})
        return
    if kappa > kcrit:
        why.append(f"kappa = {kappa:g} exceeds 1 - alpha p/n = {kcrit:g}")
        return
    q = adams_q(n, a, p, kappa)
    derived["q"] = q
    qs = sobolev_q(n, a, p)
    derived["q_star"] = qs
    derived["kappa_star"] = kappa * qs / p
    if cfg.q is not None and not _eq(1 / cfg.q, 1 / q):
        why.append(f"q = {cfg.q:g} violates 1/q = 1/p - alpha/(n(1-kappa)) (expected q = {q:g})")
        return
    if _eq(sc, p):
        tags.update({"weak-morrey", "endpoint-morrey-logl"})
    else:
        tags.add("strong-morrey")


def _bilinear(cfg, sc, tags, derived, why):
    n, a, p, q, r = cfg.n, cfg.alpha, cfg.p, cfg.q, cfg.r
    kappa = cfg.kappa or 0.0
    if q is None:
        why.append("bilinear inequalities need both p and q")
        return
    if kappa == 0:
        rr = product_r(n, a, p, q)
        rel = "1/p + 1/q = 1/r + alpha/n"
        prefix = "product"
    else:
        if not 0 < kappa < 1:
            why.append(f"kappa = {kappa:g} must lie in (0, 1)")
            return
        rr = olsen_r(n, a, p, q, kappa)
        rel = "1/p + 1/q = 1/r + alpha/(n(1-kappa))"
        prefix = "olsen"
    derived["r"] = rr
    if not _eq(1 / r, 1 / rr):
        why.append(f"r = {r:g} violates {rel} (expected r = {rr:g})")
        return
    if not (0 < r < min(p, q)) or _eq(r, min(p, q)):
        why.append(f"r = {r:g} must satisfy 0 < r < min(p, q) = {min(p, q):g}")
        return
    lo_p, lo_q = sc < p and not _eq(sc, p), sc < q and not _eq(sc, q)
    if lo_p and lo_q:
        tags.add(f"{prefix}-strong")
    elif _eq(sc, p) and lo_q:
        tags.update({f"{prefix}-weak", f"{prefix}-logl-f"})
    elif _eq(sc, q) and lo_p:
        tags.update({f"{prefix}-weak", f"{prefix}-logl-g"})
    else:
        why.append(f"p, q must satisfy s' <= p, q with at most one equality (s' = {sc:g})")


def _hls(cfg, sc, tags, derived, why):
    n, lam, p, q = cfg.n, cfg.lam, cfg.p, cfg.q
    if not 0 < lam < n:
        why.append(f"lambda = {lam:g} must lie in (0, n)")
        return
    if p is None:
        why.append("HLS needs p")
        return
    qq = hls_q(n, p, lam)
    derived["q"] = qq
    derived["alpha"] = n - lam
    if q is not None and not _eq(1 / q, 1 / qq):
        why.append(f"q = {q:g} violates 1/p + 1/q + lambda/n = 2 (expected q = {qq:g})")
        return
    q = qq
    if not (1 < p < math.inf and 1 < q < math.inf):
        why.append("HLS needs 1 < p, q < inf")
        return
    if not (sc < p and sc < q) or _eq(sc, p) or _eq(sc, q):
        why.append(f"HLS with a kernel in L^s needs s' < p, q (s' = {sc:g})")
        return
    tags.add("hls")


def classify(cfg):
    """Tags of the results whose hypotheses ``cfg`` satisfies, with derived exponents.

    Inconsistent relations produce explanations instead of tags.
    """
    tags, derived, why = set(), {}, []
    if cfg.n < 1:
        why.append("dimension must be positive")
    if not (cfg.s >= 1):
        why.append(f"s = {cfg.s} must be at least 1")
    if why:
        return Classification(frozenset(), derived, tuple(why))
    sc = conjugate(cfg.s)
    derived["s_conj"] = sc
    if cfg.p is not None and cfg.p >= 1:
        derived["p_conj"] = conjugate(cfg.p)
    if cfg.lam is not None:
        _hls(cfg, sc, tags, derived, why)
        return Classification(frozenset(tags), derived, tuple(why))
    if cfg.alpha is None or not 0 < cfg.alpha < cfg.n:
        why.append(f"alpha must lie in (0, n = {cfg.n})")
        return Classification(frozenset(), derived, tuple(why))
    derived["p_critical"] = cfg.n / cfg.alpha
    if cfg.p is None:
        why.append("p is required")
    elif cfg.r is not None:
        _bilinear(cfg, sc, tags, derived, why)
    else:
        _single_operator(cfg, sc, tags, derived, why)
    return Classification(frozenset(tags), derived, tuple(why))


def with_solved_q(cfg):
    """``cfg`` with ``q`` filled in from whichever relation applies."""
    c = classify(replace(cfg, q=None) if cfg.r is None else cfg)
    if "q" in c.derived and cfg.r is None:
        return replace(cfg, q=c.derived["q"])
    return cfg
