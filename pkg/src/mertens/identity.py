"""Exact identities linking M, N, psi and the floor-function machinery.

The two headline identities relate the weighted Moebius sum N(x) to
convolution sums over M and psi split at a parameter y.  They hold exactly,
so their residuals, evaluated entirely in enclosure arithmetic, must contain
zero with no tolerance.  The module also evaluates the step function
A(t) = floor(t) - floor(t/2) - floor(t/3) - floor(t/5) + floor(t/30), whose
Mellin transforms produce the constants alpha and beta, exactly between
integer breakpoints.

Split parameters y are taken as exact rationals; all boundary comparisons
(k <= y, j <= x/y) are exact, never floating-point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .enclosure import (
    Enclosure,
    log_array_enclosure,
    nudge_down_array,
    nudge_up_array,
    sqrt_array_enclosure,
    sum_enclosure,
    zeta_half,
    zeta_real,
)
from .sieve import DEFAULT_SEGMENT, Segment, sieve_mangoldt, sieve_mobius
from .summatory import (
    ScanReport,
    _aligned_segments,
    _check_ceiling,
    _sparse_terms,
    mertens_scan,
    n_scan,
)

__all__ = [
    "IdentityResidual",
    "hyperbola_residual",
    "schoenfeld_residual",
    "chebyshev_A",
    "alpha_constant",
    "beta_constant",
    "step_mellin_integral",
    "mellin_identity_check",
    "mobius_floor_identity_check",
    "mn_gap_scan",
    "n_via_abel",
]

Rational = Union[int, float, Fraction]


@dataclass(frozen=True, slots=True)
class IdentityResidual:
    """Both sides of an exact identity and their difference."""

    x: int
    y: Fraction
    lhs: Enclosure
    rhs_terms: dict
    residual: Enclosure

    @property
    def passes(self) -> bool:
        return self.residual.contains_zero()


def _as_fraction(y: Rational) -> Fraction:
    return y if isinstance(y, Fraction) else Fraction(y)


# ---------------------------------------------------------------------------
# Cached lookup tables.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=4)
def _mobius_dense(x: int) -> np.ndarray:
    """mu(1..x) as one int8 array (x is desk scale here)."""
    return np.concatenate([
        sieve_mobius(Segment(lo + 1, hi + 1)).mu
        for lo, hi in _aligned_segments(0, x, DEFAULT_SEGMENT, DEFAULT_SEGMENT)
    ])


@lru_cache(maxsize=4)
def _mertens_dense(x: int) -> np.ndarray:
    """M(1..x) as one int64 array."""
    return np.cumsum(_mobius_dense(x).astype(np.int64))


@lru_cache(maxsize=4)
def _n_value(x: int) -> Enclosure:
    return n_scan(x, max(x, 1)).final_value


def _psi_at_points(points: tuple) -> dict:
    """Enclosures of psi at each point, one streaming pass."""
    pts = sorted(set(int(p) for p in points))
    out = {p: Enclosure.zero() for p in pts if p < 2}
    pts = [p for p in pts if p >= 2]
    if not pts:
        return out
    cur = Enclosure.zero()
    arr = np.asarray(pts, dtype=np.int64)
    for lo, hi in _aligned_segments(0, pts[-1], DEFAULT_SEGMENT, DEFAULT_SEGMENT):
        ns, tlo, thi = _sparse_terms("psi", lo, hi)
        here = arr[(arr > lo) & (arr <= hi)]
        prev = 0
        for p in here.tolist():
            idx = int(np.searchsorted(ns, p, side="right"))
            if idx > prev:
                cur = cur + sum_enclosure(tlo[prev:idx], thi[prev:idx])
            out[p] = cur
            prev = idx
        if prev < ns.size:
            cur = cur + sum_enclosure(tlo[prev:], thi[prev:])
    return out


def _signed_product(lo_a, hi_a, b):
    """Endpoint arrays for interval-times-exact-float products."""
    p1, p2 = lo_a * b, hi_a * b
    return (nudge_down_array(np.minimum(p1, p2)),
            nudge_up_array(np.maximum(p1, p2)))


def _lambda_M_sum(x: int, fy: int, Mdense: np.ndarray) -> Enclosure:
    """Sum over prime powers k <= fy of log(p) * M(floor(x/k))."""
    total = Enclosure.zero()
    for lo, hi in _aligned_segments(0, fy, DEFAULT_SEGMENT, DEFAULT_SEGMENT):
        blk = sieve_mangoldt(Segment(lo + 1, hi + 1))
        if blk.n.size == 0:
            continue
        llo, lhi = log_array_enclosure(blk.p)
        Mv = Mdense[x // blk.n - 1].astype(np.float64)  # exact: |M| small
        tlo, thi = _signed_product(llo, lhi, Mv)
        total = total + sum_enclosure(tlo, thi)
    return total


def _m1_rational(t: Fraction, *, segment_size: int = DEFAULT_SEGMENT) -> Enclosure:
    """Enclosure of m1(t) = sum over n <= t of (mu(n)/n)(1 - n/t).

    With t = p/q each term is mu(n)(p - nq)/(np); numerator and denominator
    are exact integers, converted with directed rounding.
    """
    if t < 1:
        raise ValueError("t must be >= 1")
    p, q = t.numerator, t.denominator
    top = p // q
    if p.bit_length() > 62 or (top * p).bit_length() > 62:
        raise ValueError("rational split point too fine for int64 arithmetic")
    total = Enclosure.zero()
    for lo, hi in _aligned_segments(0, top, segment_size, segment_size):
        blk = sieve_mobius(Segment(lo + 1, hi + 1))
        nz = np.flatnonzero(blk.mu)
        ns = nz.astype(np.int64) + lo + 1
        mu = blk.mu[nz]
        num = (p - ns * q).astype(np.float64)
        keep = num != 0.0
        ns, mu, num = ns[keep], mu[keep], num[keep]
        if ns.size == 0:
            continue
        nlo, nhi = nudge_down_array(num), nudge_up_array(num)
        den = (ns * p).astype(np.float64)
        dlo, dhi = nudge_down_array(den), nudge_up_array(den)
        tlo = nudge_down_array(nlo / dhi)
        thi = nudge_up_array(nhi / dlo)
        total = total + sum_enclosure(np.where(mu > 0, tlo, -thi),
                                      np.where(mu > 0, thi, -tlo))
    return total


# ---------------------------------------------------------------------------
# The two identities.
# ---------------------------------------------------------------------------


def hyperbola_residual(x: int, y: Rational) -> IdentityResidual:
    """Residual of the normalized hyperbola identity at split point y.

    -N(x)/x  =  (1/x) sum_{k<=y} Lambda(k) M(x/k)
              + (1/x) sum_{j<=x/y} mu(j) (psi(x/j) - x/j)
              - (1/x) (psi(y) - y) M(x/y)
              + m1(x/y)
    """
    y = _as_fraction(y)
    if x < 1 or y < 1 or y > x:
        raise ValueError("need 1 <= y <= x")
    _check_ceiling(x)
    fy = int(y)  # floor: y >= 1
    jmax = int(Fraction(x) / y)
    Mdense = _mertens_dense(x)
    xe = Enclosure.from_int(x)

    lambda_sum = _lambda_M_sum(x, fy, Mdense) / xe

    js = np.arange(1, jmax + 1, dtype=np.int64)
    mu = _mobius_dense(x)[js - 1]
    nz = mu != 0
    js, mu = js[nz], mu[nz]
    vs = x // js
    uniq = np.unique(vs)
    psi = _psi_at_points(tuple(int(v) for v in uniq) + (fy,))
    plo = np.array([psi[int(v)].lo for v in uniq])
    phi = np.array([psi[int(v)].hi for v in uniq])
    idx = np.searchsorted(uniq, vs)
    ratio = float(x) / js.astype(np.float64)
    rlo, rhi = nudge_down_array(ratio), nudge_up_array(ratio)
    dlo = nudge_down_array(plo[idx] - rhi)
    dhi = nudge_up_array(phi[idx] - rlo)
    psi_sum = sum_enclosure(np.where(mu > 0, dlo, -dhi),
                            np.where(mu > 0, dhi, -dlo)) / xe

    M_xy = int(Mdense[int(Fraction(x) / y) - 1])
    boundary = -(psi[fy] - Enclosure.from_fraction(y)) * M_xy / xe
    m1_term = _m1_rational(Fraction(x) / y)

    lhs = -_n_value(x) / xe
    terms = {"lambda_sum": lambda_sum, "psi_sum": psi_sum,
             "boundary_term": boundary, "m1_term": m1_term}
    residual = lhs - (lambda_sum + psi_sum + boundary + m1_term)
    return IdentityResidual(x, y, lhs, terms, residual)


def schoenfeld_residual(x: int, y: Rational) -> IdentityResidual:
    """Residual of the unnormalized identity with exact floor terms.

    -N(x) - 1  =  sum_{k<=y} (Lambda(k) - 1) M(x/k)
                + sum_{j<=x/y} mu(j) (psi(x/j) - floor(x/j))
                - (psi(y) - floor(y)) M(x/y)
    """
    y = _as_fraction(y)
    if x < 1 or y < 1 or y > x:
        raise ValueError("need 1 <= y <= x")
    _check_ceiling(x)
    fy = int(y)
    jmax = int(Fraction(x) / y)
    Mdense = _mertens_dense(x)

    ks = np.arange(1, fy + 1, dtype=np.int64)
    minus_one_part = -int(np.sum(Mdense[x // ks - 1]))
    lambda_sum = _lambda_M_sum(x, fy, Mdense) + minus_one_part

    js = np.arange(1, jmax + 1, dtype=np.int64)
    mu = _mobius_dense(x)[js - 1]
    nz = mu != 0
    js, mu = js[nz], mu[nz]
    vs = x // js
    uniq = np.unique(vs)
    psi = _psi_at_points(tuple(int(v) for v in uniq) + (fy,))
    plo = np.array([psi[int(v)].lo for v in uniq])
    phi = np.array([psi[int(v)].hi for v in uniq])
    idx = np.searchsorted(uniq, vs)
    vf = vs.astype(np.float64)  # exact: v <= x < 2**53
    dlo = nudge_down_array(plo[idx] - vf)
    dhi = nudge_up_array(phi[idx] - vf)
    psi_sum = sum_enclosure(np.where(mu > 0, dlo, -dhi),
                            np.where(mu > 0, dhi, -dlo))

    M_xy = int(Mdense[int(Fraction(x) / y) - 1])
    boundary = -(psi[fy] - fy) * M_xy

    lhs = -_n_value(x) - 1
    terms = {"lambda_sum": lambda_sum, "psi_sum": psi_sum,
             "boundary_term": boundary, "m1_term": Enclosure.zero()}
    residual = lhs - (lambda_sum + psi_sum + boundary)
    return IdentityResidual(x, y, lhs, terms, residual)


# ---------------------------------------------------------------------------
# The step function A and its Mellin transforms.
# ---------------------------------------------------------------------------


def chebyshev_A(t: Rational) -> int:
    """A(t) = floor(t) - floor(t/2) - floor(t/3) - floor(t/5) + floor(t/30)."""
    t = _as_fraction(t)
    if t < 1:
        raise ValueError("t must be >= 1")
    return int(t) - int(t / 2) - int(t / 3) - int(t / 5) + int(t / 30)


def _one_minus_A_values(T: int) -> np.ndarray:
    """1 - A(n) for n = 1..T-1; A is constant on [n, n+1)."""
    ns = np.arange(1, T, dtype=np.int64)
    a = ns - ns // 2 - ns // 3 - ns // 5 + ns // 30
    return (1 - a).astype(np.int64)


def step_mellin_integral(s: Fraction, T: int) -> Enclosure:
    """Enclosure of the integral of |1 - A(t)| t^(-1-s) over [1, infinity).

    A is constant between consecutive integers, so the head is the exact sum
    of |1 - A(n)| (n^-s - (n+1)^-s)/s over n < T; the tail past T lies in
    [0, T^-s / s] because 0 <= 1 - A <= 1.
    """
    s = Fraction(s)
    if s <= 0:
        raise ValueError("s must be positive")
    if T < 2:
        raise ValueError("T must be >= 2")
    w = np.abs(_one_minus_A_values(T)).astype(np.float64)  # values in {0,1}
    ns = np.arange(1, T, dtype=np.int64)
    p_lo, p_hi = _int_pow_arrays(ns, -s)
    q_lo, q_hi = _int_pow_arrays(ns + 1, -s)
    tlo = nudge_down_array((p_lo - q_hi) * w)
    thi = nudge_up_array((p_hi - q_lo) * w)
    head = sum_enclosure(tlo, thi) / Enclosure.from_fraction(s)
    tail_hi = Enclosure.from_int(T).pow(-s) / Enclosure.from_fraction(s)
    return Enclosure(head.lo, (head + tail_hi).hi)


def _int_pow_arrays(ns: np.ndarray, e: Fraction):
    """Directed endpoint arrays for n**e at exact integers n."""
    ef = float(e)
    if e == Fraction(-1, 2):
        slo, shi = sqrt_array_enclosure(ns)
        return nudge_down_array(1.0 / shi), nudge_up_array(1.0 / slo)
    if e.denominator == 1:
        v = ns.astype(np.float64) ** int(e)
        return nudge_down_array(v, 2), nudge_up_array(v, 2)
    llo, lhi = log_array_enclosure(ns)
    a = np.minimum(llo * ef, lhi * ef)
    b = np.maximum(llo * ef, lhi * ef)
    return (nudge_down_array(np.exp(nudge_down_array(a)), 3),
            nudge_up_array(np.exp(nudge_up_array(b)), 3))


@lru_cache(maxsize=1)
def alpha_constant() -> Enclosure:
    """alpha = integral of |1-A(t)| t^(-3/2), via its closed form
    2 - 2 (1 - 2^(-1/2) - 3^(-1/2) - 5^(-1/2) + 30^(-1/2)) zeta(1/2)."""
    h = Fraction(-1, 2)
    inner = (1 - Enclosure.from_int(2).pow(h) - Enclosure.from_int(3).pow(h)
             - Enclosure.from_int(5).pow(h) + Enclosure.from_int(30).pow(h))
    return 2 - 2 * inner * zeta_half()


@lru_cache(maxsize=1)
def beta_constant() -> Enclosure:
    """beta = integral of |1-A(t)| t^(-2)
    = 1 - log2/2 - log3/3 - log5/5 + log30/30."""
    return (1 - Enclosure.from_int(2).log() / 2
            - Enclosure.from_int(3).log() / 3
            - Enclosure.from_int(5).log() / 5
            + Enclosure.from_int(30).log() / 30)


def mellin_identity_check(s: Rational, T: int = 10 ** 5) -> Enclosure:
    """Residual of the Mellin evaluation of the A-integral at real s >= 1.05.

    integral_1^inf |1-A(t)| t^(-1-s) dt
        = 1/s - (zeta(s)/s)(1 - 2^-s - 3^-s - 5^-s + 30^-s)
    The quadrature side uses exact stepwise integration plus a tail bound;
    the closed-form side uses the zeta enclosure.  Must contain zero.
    """
    s = Fraction(s)
    if s < Fraction("1.05"):
        raise ValueError("s must be >= 1.05")
    lhs = step_mellin_integral(s, T)
    inner = (1 - Enclosure.from_int(2).pow(-s) - Enclosure.from_int(3).pow(-s)
             - Enclosure.from_int(5).pow(-s) + Enclosure.from_int(30).pow(-s))
    se = Enclosure.from_fraction(s)
    rhs = 1 / se - (zeta_real(s) / se) * inner
    return lhs - rhs


def mobius_floor_identity_check(u: Rational, k: int) -> bool:
    """Exact check of sum_{n<=u} mu(n) floor(u/(kn)) == [u >= k]."""
    u = _as_fraction(u)
    if u < 1 or k < 1:
        raise ValueError("need u >= 1 and k >= 1")
    _check_ceiling(int(u))
    top = int(u)
    p, q = u.numerator, u.denominator
    mu = _mobius_dense(top)[:top].astype(np.int64)
    ns = np.arange(1, top + 1, dtype=np.int64)
    # floor(u / (k n)) with u = p/q, all in exact integer arithmetic
    if p < 2 ** 62 and k * q * top < 2 ** 62:
        floors = p // (k * q * ns)
    else:
        floors = np.array([p // (k * q * int(n)) for n in ns], dtype=np.int64)
    total = int(np.sum(mu * floors))
    return total == (1 if u >= k else 0)


# ---------------------------------------------------------------------------
# The N <-> M gap.
# ---------------------------------------------------------------------------


def n_via_abel(x: int, *, segment_size: int = DEFAULT_SEGMENT) -> Enclosure:
    """N(x) through Abel summation: M(x) log x - sum_{n<x} M(n) log(1+1/n)."""
    if x < 1:
        raise ValueError("x must be >= 1")
    _check_ceiling(x)
    total = Enclosure.zero()
    offset = 0
    for lo, hi in _aligned_segments(0, x, segment_size, segment_size):
        blk = sieve_mobius(Segment(lo + 1, hi + 1))
        run = offset + np.cumsum(blk.mu.astype(np.int64))
        offset = int(run[-1])
        ns = np.arange(lo + 1, hi + 1, dtype=np.int64)
        keep = ns < x
        ns, Mv = ns[keep], run[keep].astype(np.float64)
        if ns.size == 0:
            continue
        l = np.log1p(1.0 / ns.astype(np.float64))
        llo = nudge_down_array(l, 3)
        lhi = nudge_up_array(l, 3)
        tlo, thi = _signed_product(llo, lhi, Mv)
        total = total + sum_enclosure(tlo, thi)
    return offset * Enclosure.from_int(x).log() - total


def mn_gap_scan(X_lo: int, X_hi: int, stride: int = 10 ** 6) -> ScanReport:
    """Check |N(x) - M(x) log x| <= 0.227 sqrt(x) at stride checkpoints.

    This is the gap bound |N(x)/(x log x) - M(x)/x| <= 0.227/(sqrt(x) log x)
    cleared of its positive denominators.  Valid from 1.3e9 up.
    """
    if X_lo < 1_300_000_000 or X_hi < X_lo:
        raise ValueError("need 1.3e9 <= X_lo <= X_hi")
    _check_ceiling(X_hi)
    ms = mertens_scan(X_hi, stride)
    ns = n_scan(X_hi, stride)
    limit = Fraction("0.227")
    violations: list[int] = []
    inconclusive: list[int] = []
    best_lo = best_hi = -1.0
    argmax = X_lo
    for (x, Mx), (x2, Nx) in zip(ms.checkpoints, ns.checkpoints):
        assert x == x2
        if x < X_lo:
            continue
        d = abs(Nx - Mx * Enclosure.from_int(x).log())
        r = d / Enclosure.from_int(x).sqrt()
        if Fraction(r.hi) <= limit:
            pass
        elif Fraction(r.lo) > limit:
            violations.append(x)
        else:
            inconclusive.append(x)
        if r.hi > best_hi:
            best_lo, best_hi, argmax = r.lo, r.hi, x
    return ScanReport(X_lo, X_hi, "mn_gap_0.227",
                      Enclosure(min(best_lo, best_hi), best_hi),
                      argmax, violations, inconclusive)
