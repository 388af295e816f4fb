import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from mertens.enclosure import (
    Enclosure,
    EnclosureDomainError,
    directed_sum,
    euler_gamma,
    log_int,
    log_rational,
    pi_enclosure,
    pi_squared,
    sum_enclosure,
    zeta_half,
    zeta_real,
)

mpmath.mp.dps = 60


def contains_mp(e: Enclosure, v) -> bool:
    return mpmath.mpf(e.lo) <= v <= mpmath.mpf(e.hi)


def test_point_and_exact_arithmetic():
    a = Enclosure.from_int(3)
    b = Enclosure.from_int(4)
    assert (a + b).lo == 7.0 and (a + b).hi == 7.0  # exact adds stay points
    prod = a * b
    assert prod.contains(12) and prod.width <= 4 * 12 * 2.0 ** -52
    s = Enclosure.from_int(25).sqrt()
    assert s.lo == 5.0 and s.hi == 5.0  # exact square roots stay points
    one = Enclosure.from_int(1)
    assert one.log().lo == 0.0 and one.log().hi == 0.0
    assert Enclosure.zero().exp().lo == 1.0


def test_fraction_endpoints_outward():
    e = Enclosure.from_fraction(Fraction(1, 3))
    assert e.lo < 1 / 3 < e.hi or (e.lo <= Fraction(1, 3) <= e.hi)
    assert Fraction(e.lo) <= Fraction(1, 3) <= Fraction(e.hi)
    assert e.width > 0


def test_division_by_interval_containing_zero_raises():
    with pytest.raises(EnclosureDomainError):
        Enclosure.from_int(1) / Enclosure(-1.0, 1.0)
    with pytest.raises(EnclosureDomainError):
        Enclosure(-1.0, 1.0).log()
    with pytest.raises(EnclosureDomainError):
        Enclosure(-2.0, -1.0).sqrt()


def test_ordering_predicates():
    e = Enclosure(0.5, 0.6)
    assert e.strictly_below(0.61)
    assert not e.strictly_below(0.6)
    assert e.strictly_above(0.49)
    assert e.is_positive()
    assert Enclosure(-1.0, 1.0).contains_zero()
    assert Enclosure(0.5, 0.6).contains(Fraction(11, 20))


def _random_fraction(rng):
    return Fraction(rng.randint(-1000, 1000), rng.randint(1, 1000))


def random_tree_check(rng) -> None:
    """Build a random expression, track an exact value, check containment."""
    depth = rng.randint(1, 5)
    val = _random_fraction(rng)
    enc = Enclosure.from_fraction(val)
    exact = mpmath.mpf(val.numerator) / val.denominator
    for _ in range(depth):
        op = rng.choice(("add", "sub", "mul", "div", "sqrt", "log", "exp",
                         "abs", "neg", "powi"))
        if op in ("add", "sub", "mul", "div"):
            w = _random_fraction(rng)
            if op == "div" and w == 0:
                w = Fraction(1)
            we = Enclosure.from_fraction(w)
            wm = mpmath.mpf(w.numerator) / w.denominator
            if op == "add":
                enc, exact = enc + we, exact + wm
            elif op == "sub":
                enc, exact = enc - we, exact - wm
            elif op == "mul":
                enc, exact = enc * we, exact * wm
            else:
                if we.contains_zero():
                    continue
                enc, exact = enc / we, exact / wm
        elif op == "sqrt":
            if enc.lo < 0:
                continue
            enc, exact = enc.sqrt(), mpmath.sqrt(exact)
        elif op == "log":
            if enc.lo <= 0:
                continue
            enc, exact = enc.log(), mpmath.log(exact)
        elif op == "exp":
            if enc.hi > 200:
                continue
            enc, exact = enc.exp(), mpmath.exp(exact)
        elif op == "abs":
            enc, exact = abs(enc), abs(exact)
        elif op == "neg":
            enc, exact = -enc, -exact
        else:
            k = rng.randint(0, 3)
            if abs(float(exact)) > 50 and k > 1:
                continue
            enc, exact = enc.pow(k), exact ** k
    assert contains_mp(enc, exact), (enc, exact)


def test_random_expression_trees_small():
    rng = random.Random(20260826)
    for _ in range(2000):
        random_tree_check(rng)


def test_directed_sum_contains_exact():
    rng = np.random.default_rng(7)
    for _ in range(50):
        arr = rng.standard_normal(rng.integers(1, 5000)) * 10.0 ** rng.integers(-8, 8)
        s, err = directed_sum(arr)
        exact = sum(Fraction(float(v)) for v in arr)
        assert Fraction(s) - Fraction(err) <= exact <= Fraction(s) + Fraction(err)


def test_directed_sum_empty_and_zero_exact():
    assert directed_sum(np.zeros(10)) == (0.0, 0.0)
    assert directed_sum(np.zeros(0)) == (0.0, 0.0)
    e = sum_enclosure(np.zeros(4), np.zeros(4))
    assert e.lo == 0.0 and e.hi == 0.0


def test_pinned_constants_against_mpmath():
    assert contains_mp(pi_enclosure(), mpmath.pi)
    assert contains_mp(pi_squared(), mpmath.pi ** 2)
    assert contains_mp(euler_gamma(), mpmath.euler)
    assert contains_mp(zeta_half(), mpmath.zeta(mpmath.mpf("0.5")))
    assert zeta_half().width < 1e-12


def test_zeta_real_against_mpmath():
    for s in (Fraction(3, 2), 2, Fraction(11, 10), 3.5):
        e = zeta_real(s)
        assert contains_mp(e, mpmath.zeta(mpmath.mpf(str(float(s)))))


def test_log_helpers():
    assert contains_mp(log_int(7), mpmath.log(7))
    assert contains_mp(log_rational(22, 7), mpmath.log(mpmath.mpf(22) / 7))
    assert log_rational(1, 1).lo == 0.0


def test_hull_and_widen():
    a, b = Enclosure(1.0, 2.0), Enclosure(1.5, 3.0)
    h = a.hull(b)
    assert h.lo == 1.0 and h.hi == 3.0
    w = a.widen(0.5)
    assert w.lo <= 0.5 and w.hi >= 2.5
