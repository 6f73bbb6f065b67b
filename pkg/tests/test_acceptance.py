"""Acceptance criteria, one test per criterion.

Each test prints a single ``PASS`` / ``FAIL`` line.  Criteria 5, 6 and 8 run
at the default scale (resolution 128, refined to 256).
"""

import json
import math
import time

import numpy as np
import pytest
from scipy.integrate import quad

from homfrac.cli import main
from homfrac.funcspace import EXPRESSIONS, Box, GridFunction, sample, zoo
from homfrac.inequalities import PASS, Workbench, run_suite
from homfrac.inequalities.checks import (hls_adjoint_form, hls_bruteforce, hls_form,
                                         holder_check, lplogl_check)
from homfrac.kernel import ball_ls_integral, make_kernel
from homfrac.norms import luxemburg_lplogl
from homfrac.operators import (OperatorParams, frac_integral, frac_integral_field, frac_maximal,
                               frac_maximal_field, gamma_alpha, lattice_box, riesz_potential)


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, text):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {text}")
        return ok
    return emit


@pytest.fixture(scope="module")
def wb128():
    return Workbench(resolution=128)


def _bounded_ok(reports):
    bad = [r for r in reports
           if not r.details.get("informational") and r.verdict != PASS]
    return not bad, bad


def test_criterion_01_closed_form_values(verdict, unit_indicator256):
    t0 = time.perf_counter()
    i1 = riesz_potential(unit_indicator256, 1.0, [0.0, 0.0])
    m1 = frac_maximal(unit_indicator256, OperatorParams(1.0), [0.0, 0.0])
    dt = time.perf_counter() - t0
    e1, e2 = abs(i1 - 1), abs(m1 / math.sqrt(math.pi) - 1)
    ok = e1 <= 2e-2 and e2 <= 2e-2 and dt < 10
    assert verdict(1, ok, f"I_1 chi(0) = {i1:.5f}, M_1 chi(0)/sqrt(pi) = "
                          f"{m1 / math.sqrt(math.pi):.5f}, {dt:.2f} s")


def test_criterion_02_constant_kernel_reduction(verdict):
    box = Box.cube(2, 2.0, 128)
    const = make_kernel("const")
    alpha = 0.7
    gamma = gamma_alpha(alpha, 2)
    lb = lattice_box(box, 4)
    centres = lb.centers().reshape(-1, 2)
    pick = np.random.default_rng(7).choice(len(centres), 100, replace=False)
    worst = 0.0
    for f in zoo(box):
        # field route with an explicit kernel object vs pointwise fast route
        T = frac_integral_field(f, OperatorParams(alpha, const), 4).values.reshape(-1)
        M = frac_maximal_field(f, OperatorParams(alpha, const), 4).values.reshape(-1)
        for k in pick:
            x = centres[k]
            ti = gamma * riesz_potential(f, alpha, x)
            mi = frac_maximal(f, OperatorParams(alpha), x)
            worst = max(worst, abs(T[k] - ti) / max(abs(ti), 1e-300),
                        abs(M[k] - mi) / max(abs(mi), 1e-300))
    assert verdict(2, worst <= 1e-10, f"max relative difference {worst:.2e} over 20 x 100")


SCALING_FUNCS = [
    ("ball_indicator", dict(center=(0.5, -0.3), radius=0.5)),
    ("gaussian", dict(center=(0.1, 0.05), sigma=0.35)),
    ("power", dict(beta=0.25, center=(-0.5, 0.1), cutoff=1.2)),
    ("gaussian", dict(center=(-0.2, 0.1), sigma=0.2)),
    ("bump_sum", dict(seed=1, spread=0.6, count=4)),
]
SCALING_POINTS = np.array([(0.13, -0.21), (0.4, 0.3), (-0.35, 0.2), (0.1, 0.5), (-0.2, -0.45)])


def test_criterion_03_scaling_covariance(verdict):
    # f(lam x) is sampled directly on the same grid, not by relabelling the box
    box = Box.cube(2, 4.0, 512)
    alpha = 0.7
    worst = 0.0
    for name in ("const", "cos", "sgn-smooth"):
        params = OperatorParams(alpha, None if name == "const" else make_kernel(name))
        for expr, kw in SCALING_FUNCS:
            f = GridFunction(box, EXPRESSIONS[expr](box.centers(), **kw))
            for lam in (0.5, 2.0):
                g = GridFunction(box, EXPRESSIONS[expr](lam * box.centers(), **kw))
                for x in SCALING_POINTS:
                    lhs = frac_integral(g, params, x)
                    rhs = lam ** (-alpha) * frac_integral(f, params, lam * x)
                    worst = max(worst, abs(lhs - rhs) / abs(rhs))
    assert verdict(3, worst <= 2e-2, f"max relative deviation {worst:.4f} "
                                     "(3 kernels x 5 functions x 2 dilations)")


def test_criterion_04_polar_identity(verdict):
    kernels = [make_kernel(k) for k in ("const", "cos", "sgn-smooth", "bump")]
    s = 3.0
    # sphere norms from scipy quad in the angle: an independent route
    norms = [quad(lambda t, k=k: abs(float(k.on_sphere(np.array([math.cos(t), math.sin(t)]))))
                  ** s, 0, 2 * math.pi, limit=200, epsabs=1e-13)[0] for k in kernels]
    t0 = time.perf_counter()
    worst = 0.0
    for k, ns in zip(kernels, norms):
        for R in (0.5, 1.0, 3.0):
            got = ball_ls_integral(k, s, R) ** s
            worst = max(worst, abs(got - ns * R**2 / 2) / (ns * R**2 / 2))
    dt = time.perf_counter() - t0
    assert verdict(4, worst <= 1e-6 and dt < 1, f"max relative error {worst:.2e}, {dt:.3f} s")


def test_criterion_05_pointwise_suites(verdict, wb128):
    reports = run_suite("hedberg", wb128) + run_suite("adams", wb128)
    ok, bad = _bounded_ok(reports)
    finite = all(np.all(np.isfinite(r.ratios)) and len(r.ratios) == 20 for r in reports)
    dmax = max(r.refinement_delta for r in reports)
    assert verdict(5, ok and finite, f"{len(reports)} reports, max change {dmax:.3f} under "
                                     f"128 -> 256; not passing: {[r.check_id for r in bad]}")


def test_criterion_06_exact_constants(verdict, wb128):
    reports = run_suite("embeddings", wb128) + run_suite("domination", wb128)
    consts = [r.details["constant"] for r in reports if r.check_id == "domination"]
    pairs = wb128.pairs()
    reports += [holder_check(f, g, 2.0, 2.0, wb128.family, 0.25) for f, g in pairs]
    reports += [holder_check(f, g, 2.0, 2.0) for f, g in pairs]
    ok = all(r.verdict == PASS for r in reports)
    ok &= any(abs(c - 2 * math.sqrt(math.pi)) < 1e-12 for c in consts)
    weak_lp = [r for r in reports if r.check_id == "weak-lp-in-morrey"]
    ok &= len(weak_lp) == 3
    worst = max(r.fitted_constant for r in reports if r.check_id in ("morrey-inclusion", "holder",
                                                                     "morrey-holder"))
    assert verdict(6, ok, f"inclusion, 3 weak L^p triples, domination (2 sqrt(pi)), Holder; "
                          f"largest ratio to constant 1: {worst:.4f}")


def test_criterion_07_luxemburg(verdict, wb128):
    one = [luxemburg_lplogl(sample("constant", Box.cube(2, 0.5, 8), value=c), 2.0) / c - 1
           for c in (0.3, 1.0, 7.0)]
    four = luxemburg_lplogl(sample("constant", Box.cube(2, 1.0, 8)), 1.0) / 4 - 1
    closed = max(map(abs, one + [four])) <= 1e-6
    norm_cmp = [lplogl_check(f, 2.0, wb128.family)[0] for f in wb128.zoo]
    ok = closed and all(r.verdict == PASS for r in norm_cmp)
    assert verdict(7, ok, f"closed forms within {max(map(abs, one + [four])):.1e}; "
                          "L^p <= L^p log L on the full zoo")


@pytest.mark.xfail(strict=True, reason="the power rule ||f^p||_{LlogL} <= ||f||^p_{LplogL} "
                   "is false for sets of small measure; it holds with constant p")
def test_criterion_07_power_rule(verdict, wb128):
    reps = [lplogl_check(f, 2.0, wb128.family)[1] for f in wb128.zoo]
    worst = max(r.fitted_constant for r in reps)
    ok = all(r.verdict == PASS for r in reps)
    verdict(7, ok, f"power rule on the full zoo: max ratio {worst:.3f} (needs <= 1); "
                   f"divided by p: {worst / 2:.3f}")
    assert ok


def test_criterion_08_boundedness_suites(verdict, wb128):
    t0 = time.perf_counter()
    ids = {"lebesgue-strong", "lebesgue-weak", "morrey-strong", "morrey-weak", "lebesgue-logl", "morrey-logl", "bmo-lebesgue",
           "linf-lebesgue", "bmo-morrey", "linf-morrey", "bmo-weak-lebesgue", "linf-weak-lebesgue"}
    reports = []
    for name in ("lebesgue", "morrey", "endpoint-logl", "critical-bmo", "critical-linf"):
        reports += [r for r in run_suite(name, wb128) if r.check_id in ids]
    dt = time.perf_counter() - t0
    ok, bad = _bounded_ok(reports)
    ok &= {r.check_id for r in reports} == ids and dt < 600
    dmax = max(r.refinement_delta for r in reports)
    assert verdict(8, ok, f"{len(reports)} checks, max change {dmax:.3f}, {dt:.0f} s; "
                          f"not passing: {[(r.check_id, r.kernel) for r in bad]}")


def test_criterion_09_hls_bruteforce(verdict):
    box = Box.cube(2, 2.0, 64)
    z = zoo(box)
    worst, adj = 0.0, 0.0
    for i, j in ((0, 7), (3, 12), (9, 16)):
        f, g = z[i], z[j]
        for kernel in (None, make_kernel("cos")):
            a = hls_form(f, g, kernel, 1.0, stride=1)
            b = hls_bruteforce(f, g, kernel, 1.0)
            worst = max(worst, abs(a - b) / b)
            c = hls_adjoint_form(f, g, kernel, 1.0, stride=1)
            adj = max(adj, abs(a - c) / max(a, c))
    ok = worst <= 2e-2 and adj <= 1e-2
    assert verdict(9, ok, f"form vs double sum {worst:.4f}; adjoint {adj:.1e}")


def test_criterion_10_kernel_shift(verdict):
    reports = run_suite("dini-lemma", Workbench(resolution=32))
    spreads = [r.details["spread"] for r in reports]
    ok = len(reports) == 2 and all(r.verdict == PASS for r in reports)
    assert verdict(10, ok, f"spreads {', '.join(f'{s:.3f}' for s in spreads)} (limit 4)")


def test_criterion_11_determinism(verdict, tmp_path):
    cfg = tmp_path / "cfg.yaml"
    cfg.write_text("resolution: 64\nseed: 3\n")
    for d in ("a", "b"):
        rc = main(["verify", "embeddings", "domination", "--config", str(cfg),
                   "--out", str(tmp_path / d)])
        assert rc == 0
    same = all((tmp_path / "a" / n).read_bytes() == (tmp_path / "b" / n).read_bytes()
               for n in ("embeddings_domination.csv", "embeddings_domination.json"))
    doc = json.loads((tmp_path / "a" / "embeddings_domination.json").read_text())
    assert verdict(11, same and doc["verdict"] == "pass",
                   f"byte-identical CSV and JSON: {same}")
