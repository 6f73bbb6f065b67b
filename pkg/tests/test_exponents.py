import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homfrac.inequalities.exponents import (ExponentConfig, adams_q, classify, conjugate,
                                            hls_q, olsen_r, product_r, sobolev_q,
                                            with_solved_q)


def test_conjugate():
    assert conjugate(2) == 2
    assert conjugate(4) == pytest.approx(4 / 3)
    assert conjugate(1) == math.inf
    assert conjugate(math.inf) == 1
    with pytest.raises(ValueError):
        conjugate(0.5)


def test_relations():
    assert sobolev_q(2, 1, 1) == pytest.approx(2)
    assert sobolev_q(2, 1, 2) == math.inf
    assert adams_q(2, 0.5, 2, 0.25) == pytest.approx(6)
    assert product_r(2, 0.5, 2, 2) == pytest.approx(4 / 3)
    assert olsen_r(2, 0.5, 2, 2, 0.25) == pytest.approx(1.5)
    assert hls_q(2, 4 / 3, 1) == pytest.approx(4 / 3)


def cfg(**kw):
    return ExponentConfig(n=2, **kw)


def test_strong_and_weak_lebesgue():
    c = classify(cfg(alpha=0.5, p=2))
    assert c.ok and "strong-lebesgue" in c and c.derived["q"] == pytest.approx(4)
    c = classify(cfg(alpha=0.5, s=2, p=2))
    assert {"weak-lebesgue", "endpoint-logl"} <= c.tags
    c = classify(cfg(alpha=0.5, s=4 / 3, p=2))
    assert not c.ok and "below s'" in c.explanations[0]


def test_wrong_q_is_explained():
    c = classify(cfg(alpha=0.5, p=2, q=3))
    assert not c.ok and "expected q = 4" in c.explanations[0]


def test_critical_cases():
    c = classify(cfg(alpha=1, s=2, p=2))
    assert {"bmo-critical", "linf-critical"} <= c.tags
    assert "weak-critical-bmo" not in c
    c = classify(cfg(alpha=1, s=4, p=2))
    assert {"weak-critical-bmo", "weak-critical-linf"} <= c.tags
    assert not classify(cfg(alpha=1, s=1.5, p=2)).ok
    assert not classify(cfg(alpha=1, p=3)).ok


def test_morrey_cases():
    c = classify(cfg(alpha=0.5, s=4, p=2, kappa=0.25))
    assert "strong-morrey" in c and c.derived["q"] == pytest.approx(6)
    assert c.derived["kappa_star"] == pytest.approx(0.25 * 4 / 2)
    c = classify(cfg(alpha=0.5, s=4, p=2, kappa=0.5))
    assert "morrey-critical-bmo" in c
    assert not classify(cfg(alpha=0.5, p=2, kappa=0.7)).ok
    assert {"weak-morrey", "endpoint-morrey-logl"} <= classify(
        cfg(alpha=0.5, s=2, p=2, kappa=0.25)).tags


def test_bilinear_cases():
    assert "product-strong" in classify(cfg(alpha=0.5, s=4, p=2, q=2, r=4 / 3))
    c = classify(cfg(alpha=1, s=4, p=2, q=2, r=2))
    assert not c.ok and "min(p, q)" in c.explanations[0]
    c = classify(cfg(alpha=0.5, s=2, p=2, q=3, r=12 / 7))
    assert {"product-weak", "product-logl-f"} <= c.tags
    c = classify(cfg(alpha=0.5, s=2, p=3, q=2, r=12 / 7))
    assert "product-logl-g" in c
    assert "olsen-strong" in classify(cfg(alpha=0.5, s=4, p=2, q=2, kappa=0.25, r=1.5))


def test_hls():
    c = classify(cfg(lam=1, p=4 / 3))
    assert "hls" in c and c.derived["q"] == pytest.approx(4 / 3)
    assert not classify(cfg(lam=2.5, p=2)).ok


def test_roundtrip_with_inf():
    c = cfg(alpha=0.5, p=2, s=math.inf)
    d = c.to_dict()
    assert d["s"] == "inf"
    assert ExponentConfig.from_dict(d) == c


@given(alpha=st.floats(0.05, 1.95), p=st.floats(1.0, 20.0), kappa=st.floats(0, 0.95))
def test_solved_q_satisfies_its_relation(alpha, p, kappa):
    c = with_solved_q(cfg(alpha=alpha, p=p, kappa=kappa or None))
    cls = classify(c)
    if cls.ok and c.q is not None and math.isfinite(c.q) and "q_star" in cls.derived:
        assert 1 / c.q == pytest.approx(1 / p - alpha / (2 * (1 - kappa)), abs=1e-9)
    elif cls.ok and c.q is not None and math.isfinite(c.q):
        assert 1 / c.q == pytest.approx(1 / p - alpha / 2, abs=1e-9)


@given(alpha=st.floats(-1, 3), p=st.floats(0.1, 10), s=st.floats(0.5, 10),
       kappa=st.one_of(st.none(), st.floats(-0.5, 1.5)))
def test_classify_never_raises(alpha, p, s, kappa):
    c = classify(cfg(alpha=alpha, p=p, s=s, kappa=kappa))
    assert c.ok or c.explanations
