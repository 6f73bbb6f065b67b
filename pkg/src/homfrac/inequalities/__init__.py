"""Exponent bookkeeping, empirical checks and named verification suites."""

from .exponents import ExponentConfig, classify, with_solved_q
from .report import FAIL, INCONCLUSIVE, PASS, VerificationReport
from .checks import Workbench
from .suites import SUITES, run_suite, suite_verdict

__all__ = ["ExponentConfig", "classify", "with_solved_q", "VerificationReport", "PASS", "FAIL",
           "INCONCLUSIVE", "Workbench", "SUITES", "run_suite", "suite_verdict"]
