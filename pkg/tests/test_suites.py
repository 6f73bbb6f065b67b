import math
import runpy
from pathlib import Path

import pytest

from homfrac.inequalities import (FAIL, INCONCLUSIVE, PASS, SUITES, ExponentConfig,
                                  VerificationReport, Workbench, run_suite, suite_verdict)
from homfrac.inequalities.suites import resolve_config


def rep(verdict, informational=False):
    d = {"informational": True} if informational else {}
    return VerificationReport("x", "s", ExponentConfig(), [], [], 1.0, verdict, details=d)


def test_suite_verdict_ignores_informational():
    assert suite_verdict([rep(PASS), rep(FAIL, True)]) == PASS
    assert suite_verdict([rep(PASS), rep(INCONCLUSIVE)]) == INCONCLUSIVE
    assert suite_verdict([rep(INCONCLUSIVE), rep(FAIL)]) == FAIL


def test_resolve_config_resolves_dependent_exponent():
    base = ExponentConfig(2, 0.5, math.inf, 2.0, q=4.0)
    assert resolve_config(base, {"p": 1.5}).q is None
    assert resolve_config(base, {"p": 1.5, "q": 3.0}).q == 3.0
    bil = ExponentConfig(2, 0.5, 4.0, 2.0, q=2.0, r=4 / 3)
    assert resolve_config(bil, {"alpha": 1.0}).r == pytest.approx(2.0)
    ols = ExponentConfig(2, 0.5, 4.0, 2.0, q=2.0, kappa=0.25, r=1.5)
    assert resolve_config(ols, {"kappa": 0.5}).r == pytest.approx(2.0)
    assert resolve_config(base, None) is base


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suite("nope", Workbench(resolution=16))


def test_invalid_override_is_skipped_not_crashed():
    reps = run_suite("lebesgue", Workbench(resolution=32), overrides={"p": 10.0})
    assert reps and all(r.verdict == INCONCLUSIVE and "skipped" in r.details for r in reps)


def test_embeddings_suite_passes_small():
    reps = run_suite("embeddings", Workbench(resolution=32))
    assert suite_verdict(reps) == PASS
    assert {r.check_id for r in reps} == {"morrey-inclusion", "weak-morrey-inclusion", "weak-lp-in-morrey"}


def test_every_suite_is_registered():
    assert len(SUITES) == 12


def test_benchmark_runs(capsys):
    path = Path(__file__).resolve().parents[1] / "benchmarks" / "bench_core.py"
    mod = runpy.run_path(str(path))
    mod["main"](["--resolution", "32", "--points", "8", "--repeat", "1"])
    out = capsys.readouterr().out
    assert "python" in out and "fields agree: True" in out
