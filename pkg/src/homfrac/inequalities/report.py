"""Verification reports and their verdict rule."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .exponents import ExponentConfig

__all__ = ["VerificationReport", "PASS", "FAIL", "INCONCLUSIVE", "bounded_verdict",
           "exact_verdict", "STABILITY_THRESHOLD", "EXACT_TOLERANCE", "CSV_HEADER"]

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
STABILITY_THRESHOLD = 0.10
EXACT_TOLERANCE = 0.01


@dataclass
class VerificationReport:
    """Outcome of one check: per-function ratios, fitted constant and verdict.

    ``fitted_constant`` is the max ratio at the base resolution;
    ``refined_constant`` the same after doubling resolution and ball-family
    density, and ``refinement_delta`` their relative change.
    """

    check_id: str
    suite: str
    config: ExponentConfig
    labels: list
    ratios: list
    fitted_constant: float
    verdict: str
    refined_constant: float | None = None
    refinement_delta: float | None = None
    threshold: float | None = None
    kernel: str = "const"
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "check_id": self.check_id,
            "suite": self.suite,
            "kernel": self.kernel,
            "config": self.config.to_dict(),
            "labels": list(self.labels),
            "ratios": [_num(r) for r in self.ratios],
            "fitted_constant": _num(self.fitted_constant),
            "refined_constant": _num(self.refined_constant),
            "refinement_delta": _num(self.refinement_delta),
            "threshold": _num(self.threshold),
            "verdict": self.verdict,
            "details": _clean(self.details),
        }

    def rows(self):
        c = self.config
        for lab, r in zip(self.labels, self.ratios):
            yield [self.suite, self.check_id, _fmt(c.alpha), _fmt(c.p), _fmt(c.q),
                   _fmt(c.kappa), _fmt(c.s), lab, _fmt(r), _fmt(self.fitted_constant),
                   self.verdict]


CSV_HEADER = ["suite", "check_id", "alpha", "p", "q", "kappa", "s", "function",
              "ratio", "fitted_constant", "verdict"]


def _num(v):
    if v is None:
        return None
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _fmt(v):
    if v is None:
        return ""
    return repr(float(v))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return _num(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    return obj


def bounded_verdict(coarse, refined, threshold=STABILITY_THRESHOLD):
    """Verdict for a ``<~`` estimate: finite ratios whose max is stable under refinement.

    Returns ``(verdict, delta)``.  Non-finite ratios fail; an unstable max is
    inconclusive since growth may be discretization masking a blow-up.
    """
    coarse = np.asarray(coarse, float)
    refined = np.asarray(refined, float)
    if not (np.all(np.isfinite(coarse)) and np.all(np.isfinite(refined))):
        return FAIL, math.nan
    c0, c1 = float(np.max(coarse)), float(np.max(refined))
    if c0 <= 0:
        return INCONCLUSIVE, math.nan
    delta = abs(c1 - c0) / c0
    return (PASS if delta < threshold else INCONCLUSIVE), delta


def exact_verdict(ratios, tol=EXACT_TOLERANCE):
    """Ratios are ``lhs / (stated constant * rhs)``; pass iff all are ``<= 1 + tol``."""
    r = np.asarray(ratios, float)
    if not np.all(np.isfinite(r)):
        return FAIL
    return PASS if np.all(r <= 1 + tol) else FAIL
