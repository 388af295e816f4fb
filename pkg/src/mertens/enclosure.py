"""Directed-rounding interval arithmetic and rigorous constant enclosures.

An :class:`Enclosure` is a pair of IEEE-754 doubles ``[lo, hi]`` guaranteed to
contain an exact real value.  Outward rounding is realised by nudging each
endpoint a fixed number of ulps after every operation instead of switching
the FPU rounding mode, which keeps the arithmetic portable and testable.

Nudge budget per operation:

* ``+ - * / sqrt`` -- 1 ulp.  IEEE 754 guarantees these are correctly
  rounded, so the exact result lies within half an ulp of the computed one.
* ``log exp pow`` -- 2 ulps.  libm is not certified correctly rounded; glibc
  documents sub-ulp errors for these functions and we double that margin.

Scalars mixed into expressions are treated as exact: ``int`` and ``Fraction``
are converted with outward rounding when not representable, a raw ``float``
is taken at face value (it *is* an exact binary rational).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Union

import numpy as np

__all__ = [
    "Enclosure",
    "EnclosureDomainError",
    "arith",
    "ConstantTable",
    "constants",
    "pi_enclosure",
    "pi_squared",
    "euler_gamma",
    "zeta_half",
    "zeta_real",
    "log_int",
    "log_rational",
    "sum_enclosure",
    "directed_sum",
    "nudge_down",
    "nudge_up",
    "nudge_down_array",
    "nudge_up_array",
    "log_array_enclosure",
    "sqrt_array_enclosure",
]

_INF = math.inf

# Libm results get twice the nudge of correctly rounded primitives.
_ULPS_EXACT = 1
_ULPS_LIBM = 2

# Unit roundoff of binary64 under round-to-nearest.
_UNIT_ROUNDOFF = 2.0 ** -53

Scalar = Union[int, float, Fraction]


class EnclosureDomainError(ValueError):
    """Raised when an operation is applied outside its real domain."""


def nudge_down(x: float, n: int = _ULPS_EXACT) -> float:
    for _ in range(n):
        x = math.nextafter(x, -_INF)
    return x


def nudge_up(x: float, n: int = _ULPS_EXACT) -> float:
    for _ in range(n):
        x = math.nextafter(x, _INF)
    return x


def nudge_down_array(a: np.ndarray, n: int = _ULPS_EXACT) -> np.ndarray:
    for _ in range(n):
        a = np.nextafter(a, -_INF)
    return a


def nudge_up_array(a: np.ndarray, n: int = _ULPS_EXACT) -> np.ndarray:
    for _ in range(n):
        a = np.nextafter(a, _INF)
    return a


@dataclass(frozen=True, slots=True)
class Enclosure:
    """A closed interval of doubles containing an exact real value."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise EnclosureDomainError(f"non-finite endpoints [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise EnclosureDomainError(f"inverted interval [{self.lo}, {self.hi}]")

    # -- constructors -------------------------------------------------

    @staticmethod
    def point(x: float) -> "Enclosure":
        return Enclosure(float(x), float(x))

    @staticmethod
    def from_int(n: int) -> "Enclosure":
        f = float(n)
        if int(f) == n and abs(n) <= 2 ** 53:
            return Enclosure(f, f)
        return Enclosure(nudge_down(f), nudge_up(f))

    @staticmethod
    def from_fraction(q: Fraction) -> "Enclosure":
        f = float(q)  # correctly rounded by CPython
        if Fraction(f) == q:
            return Enclosure(f, f)
        return Enclosure(nudge_down(f), nudge_up(f))

    @staticmethod
    def from_decimal(s: str) -> "Enclosure":
        return Enclosure.from_fraction(Fraction(s))

    @staticmethod
    def zero() -> "Enclosure":
        return Enclosure(0.0, 0.0)

    # -- inspection ----------------------------------------------------

    @property
    def width(self) -> float:
        return nudge_up(self.hi - self.lo)

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: Scalar) -> bool:
        q = x if isinstance(x, Fraction) else Fraction(x)
        return Fraction(self.lo) <= q <= Fraction(self.hi)

    def contains_enclosure(self, other: "Enclosure") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0.0 <= self.hi

    def strictly_below(self, x: Scalar) -> bool:
        q = x if isinstance(x, Fraction) else Fraction(x)
        return Fraction(self.hi) < q

    def strictly_above(self, x: Scalar) -> bool:
        q = x if isinstance(x, Fraction) else Fraction(x)
        return Fraction(self.lo) > q

    def is_positive(self) -> bool:
        return self.lo > 0.0

    def is_negative(self) -> bool:
        return self.hi < 0.0

    def hull(self, other: "Enclosure") -> "Enclosure":
        return Enclosure(min(self.lo, other.lo), max(self.hi, other.hi))

    def widen(self, eps: float) -> "Enclosure":
        if eps < 0:
            raise EnclosureDomainError("widen() requires eps >= 0")
        return Enclosure(nudge_down(self.lo - eps), nudge_up(self.hi + eps))

    def __repr__(self) -> str:  # keeps derivation traces readable
        return f"[{self.lo!r}, {self.hi!r}]"

    # -- arithmetic ----------------------------------------------------

    @staticmethod
    def _coerce(x: Union["Enclosure", Scalar]) -> "Enclosure":
        if isinstance(x, Enclosure):
            return x
        if isinstance(x, bool):
            raise TypeError("bool is not a number here")
        if isinstance(x, int):
            return Enclosure.from_int(x)
        if isinstance(x, float):
            if not math.isfinite(x):
                raise EnclosureDomainError(f"non-finite scalar {x}")
            return Enclosure(x, x)
        if isinstance(x, Fraction):
            return Enclosure.from_fraction(x)
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other):
        o = Enclosure._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if self.lo == self.hi and o.lo == o.hi:
            s = self.lo + o.lo
            if s - o.lo == self.lo and s - self.lo == o.lo:  # exact add
                return Enclosure(s, s)
        return Enclosure(nudge_down(self.lo + o.lo), nudge_up(self.hi + o.hi))

    __radd__ = __add__

    def __neg__(self):
        return Enclosure(-self.hi, -self.lo)

    def __sub__(self, other):
        o = Enclosure._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Enclosure(nudge_down(self.lo - o.hi), nudge_up(self.hi - o.lo))

    def __rsub__(self, other):
        o = Enclosure._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = Enclosure._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        cands = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Enclosure(nudge_down(min(cands)), nudge_up(max(cands)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Enclosure._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        if o.lo <= 0.0 <= o.hi:
            raise EnclosureDomainError(f"division by interval containing zero: {o}")
        cands = (self.lo / o.lo, self.lo / o.hi, self.hi / o.lo, self.hi / o.hi)
        return Enclosure(nudge_down(min(cands)), nudge_up(max(cands)))

    def __rtruediv__(self, other):
        o = Enclosure._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return o / self

    def __abs__(self):
        if self.lo >= 0.0:
            return self
        if self.hi <= 0.0:
            return -self
        return Enclosure(0.0, max(-self.lo, self.hi))

    def reciprocal(self) -> "Enclosure":
        return Enclosure(1.0, 1.0) / self

    def sqrt(self) -> "Enclosure":
        if self.lo < 0.0:
            raise EnclosureDomainError(f"sqrt of interval below zero: {self}")
        rlo = math.sqrt(self.lo)
        rhi = math.sqrt(self.hi)
        # Exactness must be decided in exact arithmetic: rlo*rlo == lo in
        # floats merely says the square rounds back, not that rlo is sqrt(lo).
        lo = rlo if Fraction(rlo) ** 2 == Fraction(self.lo) \
            else nudge_down(rlo)
        hi = rhi if Fraction(rhi) ** 2 == Fraction(self.hi) \
            else nudge_up(rhi)
        return Enclosure(max(lo, 0.0), hi)

    def log(self) -> "Enclosure":
        if self.lo <= 0.0:
            raise EnclosureDomainError(f"log of interval touching zero: {self}")
        lo = 0.0 if self.lo == 1.0 else nudge_down(math.log(self.lo), _ULPS_LIBM)
        hi = 0.0 if self.hi == 1.0 else nudge_up(math.log(self.hi), _ULPS_LIBM)
        return Enclosure(lo, hi)

    def exp(self) -> "Enclosure":
        lo = 1.0 if self.lo == 0.0 else nudge_down(math.exp(self.lo), _ULPS_LIBM)
        hi = 1.0 if self.hi == 0.0 else nudge_up(math.exp(self.hi), _ULPS_LIBM)
        return Enclosure(lo, hi)

    def pow(self, e: Union[int, Fraction, "Enclosure"]) -> "Enclosure":
        if isinstance(e, int):
            return self._int_pow(e)
        ee = Enclosure._coerce(e)
        if self.lo <= 0.0:
            raise EnclosureDomainError("non-integer power needs a positive base")
        return (ee * self.log()).exp()

    def __pow__(self, e):
        return self.pow(e)

    def _int_pow(self, n: int) -> "Enclosure":
        if n == 0:
            return Enclosure(1.0, 1.0)
        if n < 0:
            return self._int_pow(-n).reciprocal()
        result = Enclosure(1.0, 1.0)
        base = self
        k = n
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        if n % 2 == 0 and self.lo < 0.0 < self.hi:
            result = Enclosure(0.0, result.hi)
        return result


def arith(op: str, a: Enclosure, b: Optional[Enclosure] = None) -> Enclosure:
    """Named dispatcher over the interval operation set."""
    binary = {"add": Enclosure.__add__, "sub": Enclosure.__sub__,
              "mul": Enclosure.__mul__, "div": Enclosure.__truediv__,
              "pow": Enclosure.pow}
    unary = {"sqrt": Enclosure.sqrt, "log": Enclosure.log, "exp": Enclosure.exp}
    if op in binary:
        if b is None:
            raise TypeError(f"{op} needs two operands")
        return binary[op](a, b)
    if op in unary:
        if b is not None:
            raise TypeError(f"{op} takes one operand")
        return unary[op](a)
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# Rigorous summation of term arrays.
# ---------------------------------------------------------------------------

_SUM_CHUNK = 4096


def directed_sum(arr: np.ndarray) -> tuple[float, float]:
    """Sum a float64 array, returning ``(value, error_bound)``.

    The bound is valid for *any* order in which numpy performs the per-chunk
    additions: a sum of ``m`` doubles carries at most ``(m-1)·u`` relative
    error against the sum of absolute values, whatever the summation tree.
    Chunk totals are then combined exactly-rounded with ``math.fsum``.
    """
    arr = np.ascontiguousarray(arr, dtype=np.float64)
    n = arr.size
    if n == 0:
        return 0.0, 0.0
    pad = (-n) % _SUM_CHUNK
    if pad:
        arr = np.concatenate([arr, np.zeros(pad)])
    view = arr.reshape(-1, _SUM_CHUNK)
    chunk_sums = view.sum(axis=1)
    chunk_abs = np.abs(view).sum(axis=1)
    total_abs = math.fsum(chunk_abs)
    if total_abs == 0.0:
        return 0.0, 0.0
    u = _UNIT_ROUNDOFF
    coef = (_SUM_CHUNK - 1) * u / (1.0 - _SUM_CHUNK * u)
    # total_abs itself is only approximate; inflate defensively.
    err = coef * total_abs * (1.0 + 2.0 * coef) * 1.0625
    s = math.fsum(chunk_sums)
    err = nudge_up(err + 2.0 * abs(s) * u + 5e-324, 2)
    return s, err


def sum_enclosure(lo_terms: np.ndarray, hi_terms: np.ndarray) -> Enclosure:
    """Rigorous enclosure of a sum given per-term endpoint arrays."""
    slo, elo = directed_sum(lo_terms)
    shi, ehi = directed_sum(hi_terms)
    lo = slo if elo == 0.0 else nudge_down(slo - elo, 2)
    hi = shi if ehi == 0.0 else nudge_up(shi + ehi, 2)
    return Enclosure(lo, hi)


def log_array_enclosure(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint arrays for ``log`` of exact positive integers (< 2**53)."""
    x = n.astype(np.float64)
    l = np.log(x)
    lo = nudge_down_array(l, _ULPS_LIBM)
    hi = nudge_up_array(l, _ULPS_LIBM)
    exact = x == 1.0
    if exact.any():
        lo = np.where(exact, 0.0, lo)
        hi = np.where(exact, 0.0, hi)
    return lo, hi


def sqrt_array_enclosure(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Endpoint arrays for ``sqrt`` of exact non-negative integers."""
    x = n.astype(np.float64)
    r = np.sqrt(x)
    return nudge_down_array(r), nudge_up_array(r)


# ---------------------------------------------------------------------------
# Constants.
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def pi_enclosure() -> Enclosure:
    return Enclosure(nudge_down(math.pi), nudge_up(math.pi))


@lru_cache(maxsize=1)
def pi_squared() -> Enclosure:
    return pi_enclosure() * pi_enclosure()


@lru_cache(maxsize=1)
def euler_gamma() -> Enclosure:
    # Hardcoded: gamma only enters through the remainder form of the
    # Lambda(k)/k partial-sum bound, where a 1e-10-wide pin is ample.
    return Enclosure(nudge_down(float(Fraction("0.5772156649"))),
                     nudge_up(float(Fraction("0.5772156650"))))


def log_int(n: int) -> Enclosure:
    if n <= 0:
        raise EnclosureDomainError("log_int needs n >= 1")
    return Enclosure.from_int(n).log()


def log_rational(p: int, q: int = 1) -> Enclosure:
    if p <= 0 or q <= 0:
        raise EnclosureDomainError("log_rational needs positive integers")
    if q == 1:
        return log_int(p)
    return log_int(p) - log_int(q)


# Cross-check pin for zeta(1/2); the computed enclosure must land inside.
_ZETA_HALF_CHECK = (-1.46035451, -1.46035450)


@lru_cache(maxsize=1)
def zeta_half() -> Enclosure:
    """Enclosure of zeta(1/2) via accelerated summation of eta(1/2).

    Uses the Chebyshev-polynomial acceleration of Cohen, Rodriguez Villegas
    and Zagier for alternating series.  The coefficients a_k = (k+1)^{-1/2}
    form a moment sequence, so the scheme's proven error bound
    ``3/(3+sqrt(8))^n`` applies; with n = 40 that is below 1e-30.
    """
    n = 40
    # d_k = ((3+sqrt8)^k + (3-sqrt8)^k)/2 satisfies d_k = 6 d_{k-1} - d_{k-2}.
    d_prev, d = 1, 3
    for _ in range(n - 1):
        d_prev, d = d, 6 * d - d_prev
    b = Fraction(-1)
    c = Fraction(-d)
    acc = Enclosure.zero()
    for k in range(n):
        c = b - c
        a_k = Enclosure.from_int(k + 1).sqrt().reciprocal()
        acc = acc + Enclosure.from_fraction(c) * a_k
        b = b * Fraction(2 * (k + n) * (k - n), (2 * k + 1) * (k + 1))
    eta = (acc / Enclosure.from_int(d)).widen(float(Fraction(3, 2 * d - 1)))
    # zeta(s) = eta(s) / (1 - 2^{1-s});  at s = 1/2 the factor is 1 - sqrt(2).
    z = eta / (1 - Enclosure.from_int(2).sqrt())
    if not (_ZETA_HALF_CHECK[0] <= z.lo and z.hi <= _ZETA_HALF_CHECK[1]):
        raise AssertionError(f"zeta(1/2) enclosure {z} failed its cross-check pin")
    return z


def zeta_real(s: Union[Fraction, int, float], cutoff: Optional[int] = None) -> Enclosure:
    """Enclosure of zeta(s) for real s >= 1.05 by direct summation.

    The tail past the cutoff N is bracketed between the integral bounds
    ``(N+1)^{1-s}/(s-1) <= sum_{n>N} n^{-s} <= N^{1-s}/(s-1)``.
    """
    sq = Fraction(s)
    if sq < Fraction("1.05"):
        raise EnclosureDomainError("zeta_real needs s >= 1.05 (pole stand-off)")
    se = Enclosure.from_fraction(sq)
    if cutoff is None:
        # Aim the tail width (~ N^-s) at 1e-12, capped for runtime.
        target = 10.0 ** (12.0 / float(sq))
        cutoff = int(min(max(target, 64.0), 2_000_000.0))
    ns = np.arange(1, cutoff + 1, dtype=np.int64)
    llo, lhi = log_array_enclosure(ns)
    # n^{-s} is decreasing in s (n >= 1), so pair s.hi with log.hi for lo.
    t_lo = nudge_down_array(np.exp(nudge_down_array(-se.hi * lhi)), _ULPS_LIBM + 1)
    t_hi = nudge_up_array(np.exp(nudge_up_array(-se.lo * llo)), _ULPS_LIBM + 1)
    head = sum_enclosure(t_lo, t_hi)
    s_minus_1 = se - 1
    tail_hi = Enclosure.from_int(cutoff).pow(Fraction(1) - sq) / s_minus_1
    tail_lo = Enclosure.from_int(cutoff + 1).pow(Fraction(1) - sq) / s_minus_1
    return head + Enclosure(tail_lo.lo, tail_hi.hi)


class ConstantTable:
    """Named enclosures of the transcendental constants the bound chain uses."""

    @property
    def zeta_half(self) -> Enclosure:
        return zeta_half()

    @property
    def euler_gamma(self) -> Enclosure:
        return euler_gamma()

    @property
    def pi_squared(self) -> Enclosure:
        return pi_squared()

    @staticmethod
    def log(p: int, q: int = 1) -> Enclosure:
        return log_rational(p, q)


constants = ConstantTable()
