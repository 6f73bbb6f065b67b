"""Named verification suites.

Each suite runs a fixed set of cases on a :class:`Workbench` and returns a
list of reports.  ``overrides`` replace exponent fields in every case (the
dependent exponent is re-solved from its relation), and ``kernel`` replaces
the kernel of cases that do not require ``Omega = 1``.
"""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np

from ..kernel import make_kernel
from ..norms import luxemburg_lplogl
from .checks import (
    Workbench,
    adams_check,
    bounded_sweep,
    boundedness_ratio,
    weak_lp_morrey_check,
    kernel_shift_check,
    domination_check,
    embedding_check,
    hedberg_check,
    hls_adjoint_form,
    hls_check,
    hls_form,
    holder_check,
    is_dini,
    kernel_key,
    lplogl_check,
    maximal_llogl_check,
    olsen_check,
    product_check,
    sharp_band,
)
from .exponents import ExponentConfig, classify, olsen_r, product_r
from .report import FAIL, INCONCLUSIVE, PASS, VerificationReport, bounded_verdict

__all__ = ["SUITES", "run_suite", "resolve_config", "suite_verdict"]

INF = math.inf


def resolve_config(cfg, overrides=None):
    """Apply exponent overrides and re-solve the dependent exponent."""
    if not overrides:
        return cfg
    cfg = replace(cfg, **overrides)
    if cfg.lam is not None:
        return replace(cfg, q=None) if "q" not in overrides else cfg
    if cfg.r is not None:
        if "r" in overrides:
            return cfg
        if cfg.kappa:
            return replace(cfg, r=olsen_r(cfg.n, cfg.alpha, cfg.p, cfg.q, cfg.kappa))
        return replace(cfg, r=product_r(cfg.n, cfg.alpha, cfg.p, cfg.q))
    return replace(cfg, q=None) if "q" not in overrides else cfg


def _kernels(names, override, n):
    if override is not None:
        return [override]
    return [None if k == "const" else make_kernel(k, n) for k in names]


def _skip(check_id, suite, cfg, kernel, reason):
    return VerificationReport(check_id, suite, cfg, [], [], math.nan, INCONCLUSIVE,
                              kernel=kernel_key(kernel)[0], details={"skipped": reason})


def _with_q(cfg):
    c = classify(cfg)
    q = c.derived.get("q")
    return replace(cfg, q=q) if q is not None and cfg.r is None else cfg


def _aggregate(check_id, suite, cfg, kernel, reports, details=None):
    """Fold per-function reports of one check into one report."""
    labels = [l for r in reports for l in r.labels]
    ratios = [x for r in reports for x in r.ratios]
    verdicts = {r.verdict for r in reports}
    verdict = FAIL if FAIL in verdicts else (INCONCLUSIVE if INCONCLUSIVE in verdicts else PASS)
    fitted = max(r.fitted_constant for r in reports) if reports else math.nan
    threshold = reports[0].threshold if reports else None
    d = dict(details or {})
    for key in ("discrete_max", "analytic_max"):
        vals = [r.details[key] for r in reports if key in r.details]
        if vals:
            d[key] = max(vals)
    return VerificationReport(check_id, suite, cfg, labels, ratios, fitted, verdict,
                              threshold=threshold, kernel=kernel_key(kernel)[0], details=d)


# ---------------------------------------------------------------- pointwise suites


def _pointwise_suite(name, wb, overrides, kernel, cases, check):
    out = []
    wr = wb.refined()
    for base, kernels in cases:
        cfg = _with_q(resolve_config(base, overrides))
        for k in _kernels(kernels, kernel, wb.n):
            c = classify(cfg)
            if not c.ok:
                out.append(_skip(name, name, cfg, k, "; ".join(c.explanations)))
                continue
            coarse = [check(wb, f, k, cfg) for f in wb.zoo]
            fine = [check(wr, f, k, cfg) for f in wr.zoo]
            labels = [r.labels[0] for r in coarse]
            for cid, get in ((name, lambda r: r.ratios[0]),
                             (f"{name}-split-near", lambda r: r.details.get("split_near_constant")),
                             (f"{name}-split-far", lambda r: r.details.get("split_far_constant"))):
                a = [get(r) for r in coarse]
                if any(v is None for v in a):
                    continue
                b = [get(r) for r in fine]
                verdict, delta = bounded_verdict(a, b)
                out.append(VerificationReport(cid, name, cfg, labels, a, float(np.max(a)), verdict,
                                              float(np.max(b)), delta, 0.10, kernel_key(k)[0]))
    return out


def suite_hedberg(wb, overrides=None, kernel=None):
    cases = [(ExponentConfig(2, 0.5, INF, 2.0), ["const"]),
             (ExponentConfig(2, 0.5, 4.0, 2.0), ["cos"])]
    return _pointwise_suite("hedberg", wb, overrides, kernel, cases, hedberg_check)


def suite_adams(wb, overrides=None, kernel=None):
    cases = [(ExponentConfig(2, 0.5, INF, 2.0, kappa=0.25), ["const"]),
             (ExponentConfig(2, 0.5, 4.0, 2.0, kappa=0.25), ["cos"])]
    return _pointwise_suite("adams", wb, overrides, kernel, cases, adams_check)


# ---------------------------------------------------------------- boundedness suites


def _boundedness_suite(name, wb, overrides, kernel, cases, dini=False):
    out = []
    for check_id, base, kernels, extra in cases:
        cfg = _with_q(resolve_config(base, overrides))
        for k in _kernels(kernels, kernel, wb.n):
            c = classify(cfg)
            if not c.ok:
                out.append(_skip(check_id, name, cfg, k, "; ".join(c.explanations)))
                continue
            details = {}
            if dini:
                d = is_dini(k, cfg.s, wb.n)
                details["dini_integral"] = d.value
                if not d.finite:
                    rep = _skip(check_id, name, cfg, k, "kernel is not Dini")
                    rep.details["informational"] = True
                    out.append(rep)
                    continue
            fn = (lambda w, f, cid=check_id, k=k, cfg=cfg, op=extra.get("operator"):
                  boundedness_ratio(w, cid, f, k, cfg, operator=op))
            rep = bounded_sweep(check_id, name, wb, cfg, k, fn, wb.refined(), details)
            if extra.get("informational"):
                rep.details["informational"] = True
            out.append(rep)
    return out


def suite_lebesgue(wb, overrides=None, kernel=None):
    strong = ExponentConfig(2, 0.5, 4.0, 2.0)
    weak = ExponentConfig(2, 0.5, 2.0, 2.0)
    cases = [("lebesgue-strong", strong, ["const", "cos"], {}),
             ("lebesgue-weak", weak, ["const", "cos"], {}),
             ("lebesgue-weak-strongnorm", weak, ["const", "cos"], {"informational": True})]
    return _boundedness_suite("lebesgue", wb, overrides, kernel, cases)


def suite_morrey(wb, overrides=None, kernel=None):
    strong = ExponentConfig(2, 0.5, 4.0, 2.0, kappa=0.25)
    weak = ExponentConfig(2, 0.5, 2.0, 2.0, kappa=0.25)
    cases = [("morrey-strong", strong, ["const", "cos"], {}),
             ("morrey-weak", weak, ["const", "cos"], {})]
    return _boundedness_suite("morrey", wb, overrides, kernel, cases)


def suite_endpoint_logl(wb, overrides=None, kernel=None):
    cases = [("lebesgue-logl", ExponentConfig(2, 0.5, 2.0, 2.0), ["const", "cos"], {}),
             ("morrey-logl", ExponentConfig(2, 0.5, 2.0, 2.0, kappa=0.25), ["const", "cos"], {})]
    out = _boundedness_suite("endpoint-logl", wb, overrides, kernel, cases)
    out.extend(_orlicz_facts(wb))
    return out


def _orlicz_facts(wb, p=2.0):
    """Norm comparison, the power rule as stated, the power rule with constant p, and
    the fitted maximal-function constant."""
    cfg = ExponentConfig(n=wb.n, p=p)
    fam = wb.family
    a, b = zip(*(lplogl_check(f, p, fam) for f in wb.zoo))
    rep_l = _aggregate("lp-below-lplogl", "endpoint-logl", cfg, None, a)
    rep_p = _aggregate("power-rule", "endpoint-logl", cfg, None, b)
    corr = [r.ratios[0] / p for r in b]
    ok = all(x <= 1 + 1e-12 for x in corr)
    rep_c = VerificationReport("power-rule-constant-p", "endpoint-logl", cfg, rep_p.labels, corr,
                               max(corr), PASS if ok else FAIL, threshold=1.0)
    ball = wb.largest_ball()
    ratios = [maximal_llogl_check(wb, f, ball) for f in wb.zoo]
    ratios = [r for r in ratios if np.isfinite(r)]
    spread = max(ratios) / min(ratios)
    rep_m = VerificationReport("maximal-llogl", "endpoint-logl", ExponentConfig(n=wb.n, p=1.0),
                               [f.label for f in wb.zoo], ratios, max(ratios),
                               PASS if spread <= 4 else FAIL, threshold=4.0,
                               details={"spread": spread, "ball_radius": ball.radius})
    return [rep_l, rep_p, rep_c, rep_m]


def suite_critical_bmo(wb, overrides=None, kernel=None):
    cases = [("bmo-lebesgue", ExponentConfig(2, 1.0, 2.0, 2.0), ["const", "cos"], {}),
             ("bmo-morrey", ExponentConfig(2, 0.5, 4.0, 2.0, kappa=0.5), ["const", "cos"], {}),
             ("bmo-weak-lebesgue", ExponentConfig(2, 1.0, 4.0, 2.0), ["const", "cos"], {})]
    out = _boundedness_suite("critical-bmo", wb, overrides, kernel, cases, dini=True)
    k = kernel
    cfg = resolve_config(ExponentConfig(2, 1.0, 2.0, 2.0), overrides)
    bands = [sharp_band(wb, f, k, cfg.alpha) for f in wb.zoo[:5]]
    lo, hi = min(b[0] for b in bands), max(b[1] for b in bands)
    out.append(VerificationReport("sharp-band", "critical-bmo", cfg,
                                  [f.label for f in wb.zoo[:5]], [b[1] / b[0] for b in bands],
                                  hi, PASS, kernel=kernel_key(k)[0],
                                  details={"informational": True, "band_low": lo, "band_high": hi}))
    return out


def suite_critical_linf(wb, overrides=None, kernel=None):
    cases = [("linf-lebesgue", ExponentConfig(2, 1.0, 2.0, 2.0), ["const", "cos"], {}),
             ("linf-morrey", ExponentConfig(2, 0.5, 4.0, 2.0, kappa=0.5), ["const", "cos"], {}),
             ("linf-weak-lebesgue", ExponentConfig(2, 1.0, 4.0, 2.0), ["const", "cos"], {})]
    return _boundedness_suite("critical-linf", wb, overrides, kernel, cases, dini=True)


# ---------------------------------------------------------------- exact-constant suites


CPQ_TRIPLES = ((2.0, 1.0), (3.0, 2.0), (4.0, 2.0))


def suite_embeddings(wb, overrides=None, kernel=None):
    ov = overrides or {}
    q, kappa = ov.get("p", 4.0), ov.get("kappa", 0.5)
    q_star = ov.get("q", 2.0)
    cfg = ExponentConfig(n=wb.n, p=q, q=q_star, kappa=kappa)
    fam = wb.family
    out = [_aggregate("morrey-inclusion", "embeddings", cfg, None,
                      [embedding_check(f, q, kappa, q_star, fam) for f in wb.zoo]),
           _aggregate("weak-morrey-inclusion", "embeddings", cfg, None,
                      [embedding_check(f, q, kappa, q_star, fam, weak=True) for f in wb.zoo])]
    for p, qq in CPQ_TRIPLES:
        reps = [weak_lp_morrey_check(f, p, qq, fam) for f in wb.zoo]
        rep = _aggregate("weak-lp-in-morrey", "embeddings", reps[0].config, None, reps,
                         details=reps[0].details and {"constant": reps[0].details["constant"]})
        out.append(rep)
    return out


def suite_domination(wb, overrides=None, kernel=None):
    ov = overrides or {}
    alphas = [ov["alpha"]] if "alpha" in ov else [0.5, 1.0]
    out = []
    for a in alphas:
        reps = [domination_check(wb, f, None, a) for f in wb.zoo]
        out.append(_aggregate("domination", "domination", reps[0].config, None, reps,
                              details={"constant": reps[0].details["constant"]}))
    k = kernel if kernel is not None else make_kernel("cos", wb.n)
    for a in alphas:
        reps = [domination_check(wb, f, k, a) for f in wb.zoo]
        out.append(_aggregate("domination-kernel", "domination", reps[0].config, k, reps,
                              details={"constant": reps[0].details["constant"]}))
    return out


# ---------------------------------------------------------------- bilinear suites


def suite_hls(wb, overrides=None, kernel=None):
    out = []
    wr = wb.refined()
    hls = resolve_config(ExponentConfig(2, s=INF, p=4 / 3, lam=1.0), overrides)
    c = classify(hls)
    for k in _kernels(["const", "cos"], kernel, wb.n):
        if not c.ok:
            out.append(_skip("hls", "hls", hls, k, "; ".join(c.explanations)))
            continue
        out.append(hls_check(wb, k, hls, wr))
        # Fubini: the form equals its adjoint with the reflected kernel; both
        # are evaluated at full resolution so the outer quadrature is exact
        rel = []
        for f, g in wb.pairs()[:5]:
            a = hls_form(f, g, k, hls.lam, 1, wb.operator_kw)
            b = hls_adjoint_form(f, g, k, hls.lam, 1, wb.operator_kw)
            rel.append(abs(a - b) / max(abs(a), abs(b)) if max(abs(a), abs(b)) > 0 else 0.0)
        out.append(VerificationReport("hls-adjoint", "hls", hls,
                                      [f"{f.label} x {g.label}" for f, g in wb.pairs()[:5]],
                                      rel, max(rel), PASS if max(rel) <= 1e-2 else FAIL,
                                      threshold=1e-2, kernel=kernel_key(k)[0]))
    cases = [("strong", ExponentConfig(2, 0.5, 4.0, 2.0, q=2.0, r=4 / 3)),
             ("weak", ExponentConfig(2, 0.5, 2.0, 2.0, q=3.0, r=12 / 7)),
             ("logl-f", ExponentConfig(2, 0.5, 2.0, 2.0, q=3.0, r=12 / 7)),
             ("logl-g", ExponentConfig(2, 0.5, 2.0, 3.0, q=2.0, r=12 / 7))]
    for variant, base in cases:
        cfg = resolve_config(base, overrides)
        for k in _kernels(["const", "cos"], kernel, wb.n):
            try:
                out.append(product_check(wb, k, cfg, variant, wr))
            except ValueError as e:
                cid = f"product-{variant}"
                out.append(_skip(cid, "hls", cfg, k, str(e)))
    return out


def suite_olsen(wb, overrides=None, kernel=None):
    out = []
    wr = wb.refined()
    r_weak = olsen_r(2, 0.5, 2.0, 2.5, 0.25)
    cases = [("strong", ExponentConfig(2, 0.5, 4.0, 2.0, q=2.0, kappa=0.25, r=1.5)),
             ("weak", ExponentConfig(2, 0.5, 2.0, 2.0, q=2.5, kappa=0.25, r=r_weak)),
             ("logl-f", ExponentConfig(2, 0.5, 2.0, 2.0, q=2.5, kappa=0.25, r=r_weak)),
             ("logl-g", ExponentConfig(2, 0.5, 2.0, 2.5, q=2.0, kappa=0.25, r=r_weak))]
    for variant, base in cases:
        cfg = resolve_config(base, overrides)
        for k in _kernels(["const", "cos"], kernel, wb.n):
            try:
                out.append(olsen_check(wb, k, cfg, variant, wr))
            except ValueError as e:
                cid = f"olsen-{variant}"
                out.append(_skip(cid, "olsen", cfg, k, str(e)))
    pairs = wb.pairs()
    out.append(_aggregate("holder", "olsen", ExponentConfig(n=wb.n, p=2.0, q=2.0, r=1.0), None,
                          [holder_check(f, g, 2.0, 2.0) for f, g in pairs]))
    out.append(_aggregate("morrey-holder", "olsen",
                          ExponentConfig(n=wb.n, p=2.0, q=2.0, r=1.0, kappa=0.25), None,
                          [holder_check(f, g, 2.0, 2.0, wb.family, 0.25) for f, g in pairs]))
    return out


# ---------------------------------------------------------------- kernel shift


def suite_kernel_shift(wb, overrides=None, kernel=None):
    ov = overrides or {}
    alpha, s = ov.get("alpha", 0.5), ov.get("s", 2.0)
    kernels = [kernel] if kernel is not None else [make_kernel("cos", wb.n),
                                                   make_kernel("cos2", wb.n)]
    out = []
    for k in kernels:
        d = is_dini(k, s)
        if not d.finite:
            out.append(_skip("kernel-shift", "dini-lemma", ExponentConfig(n=wb.n, alpha=alpha, s=s),
                             k, "kernel is not Dini"))
            continue
        rep = kernel_shift_check(k, alpha, s)
        rep.details["dini_integral"] = d.value
        out.append(rep)
    return out


SUITES = {
    "hedberg": suite_hedberg,
    "adams": suite_adams,
    "lebesgue": suite_lebesgue,
    "morrey": suite_morrey,
    "endpoint-logl": suite_endpoint_logl,
    "critical-bmo": suite_critical_bmo,
    "critical-linf": suite_critical_linf,
    "embeddings": suite_embeddings,
    "hls": suite_hls,
    "olsen": suite_olsen,
    "domination": suite_domination,
    "dini-lemma": suite_kernel_shift,
}


def run_suite(name, wb=None, overrides=None, kernel=None):
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    wb = Workbench() if wb is None else wb
    return SUITES[name](wb, overrides, kernel)


def suite_verdict(reports):
    """Worst verdict over non-informational reports."""
    vs = {r.verdict for r in reports if not r.details.get("informational")}
    if FAIL in vs:
        return FAIL
    if INCONCLUSIVE in vs:
        return INCONCLUSIVE
    return PASS
