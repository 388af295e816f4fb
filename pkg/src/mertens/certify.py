"""The bound-certification chain for |M(x)|/x and |N(x)|/(x log x).

Every evaluator here turns one analytic estimate into enclosure arithmetic,
hardcoding term by term which endpoint of the x-range maximizes it (each
such choice is commented where it happens).  Three pipelines compose them:

* ``first_range_pipeline`` -- [1e16, 2e16], the sharpest piece, producing
  the headline constant 160 383;
* ``dyadic_pipeline`` -- doubling windows covering [2e16, 1e19];
* ``large_x_iteration`` -- a bootstrap for x >= 1e19 in which each proven
  bound 1/L widens the admissible split point and yields a better bound.

``theorem_A_assembly`` glues the certificates and extends them down to
T = (0.571*160383)^2 via the square-root model.  External inputs all come
from a :class:`~mertens.hypotheses.HypothesisLedger`; certificates carry a
full derivation trace that replays bitwise.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

from .enclosure import Enclosure, pi_squared
from .hypotheses import HypothesisLedger, LedgerEntry, RootModel, default_ledger
from .identity import alpha_constant, beta_constant

__all__ = [
    "RootModel",
    "HypothesisLedger",
    "LedgerEntry",
    "default_ledger",
    "PipelineError",
    "TraceTerm",
    "BoundCertificate",
    "TheoremAssembly",
    "printed_unit",
    "within_one_unit",
    "not_exceeding",
    "M_SPLIT",
    "bound_tail_small",
    "bound_lambda_part_small",
    "bound_psi_part_small",
    "gap_0227_check",
    "first_range_pipeline",
    "n_to_m_gap",
    "gap_linear_constant",
    "dyadic_step",
    "dyadic_pipeline",
    "large_x_step",
    "large_x_iteration",
    "lstar_enclosure",
    "mu2_sum_bounds",
    "theorem_A_assembly",
    "ramare_crossover",
    "PRINTED_DYADIC",
    "PRINTED_LARGE_X_N",
    "PRINTED_LARGE_X_M",
    "LARGE_X_L_SEQUENCE",
    "SWEEPABLE",
]

# Coefficients whose magnitude the pipeline bounds are monotone increasing
# in: enlarging any of these by a small factor can only weaken (raise) the
# certified bounds.  Reciprocal-form inputs (cdm_reciprocal, the m1 tail
# anchor) and the sharp-constant pair mn_ramare_a/b are deliberately
# excluded -- perturbing them flips direction or moves a split point.
SWEEPABLE = (
    "M_sqrt", "psi_sqrt", "m1_inv_sqrt",
    "fk_psi_relative", "mu2_partial_log",
)

# Structural split-point coefficient: wherever a range is *chosen* as
# y = (0.571 L)^2 or T = (0.571 * 160383)^2, the 0.571 is part of the chosen
# split, exactly rational, and deliberately not tied to the ledger's model
# coefficient (perturbing the hypothesis must not move the split points).
M_SPLIT = Fraction("0.571")

_X16 = 10 ** 16
_X19 = 10 ** 19


class PipelineError(RuntimeError):
    """A certification step failed; the message names the failing term."""


@dataclass(frozen=True, slots=True)
class TraceTerm:
    tag: str
    name: str
    value: Enclosure
    hypotheses: tuple = ()


@dataclass(frozen=True, slots=True)
class BoundCertificate:
    """An upper bound with the ordered terms that sum to it."""

    quantity: str
    x_lo: float
    x_hi: Optional[float]  # None means unbounded above
    bound: Enclosure
    trace: tuple

    def replay(self) -> bool:
        """Re-fold the trace; must reproduce the bound bitwise."""
        acc = Enclosure.zero()
        for term in self.trace:
            acc = acc + term.value
        return acc.lo == self.bound.lo and acc.hi == self.bound.hi

    def hypotheses_used(self) -> tuple:
        seen: list[str] = []
        for term in self.trace:
            for h in term.hypotheses:
                if h not in seen:
                    seen.append(h)
        return tuple(seen)

    def to_json(self) -> str:
        return json.dumps({
            "quantity": self.quantity,
            "x_lo": self.x_lo,
            "x_hi": self.x_hi,
            "bound_lo": self.bound.lo.hex(),
            "bound_hi": self.bound.hi.hex(),
            "bound": self.bound.hi,
            "trace": [
                {"tag": t.tag, "name": t.name,
                 "lo": t.value.lo.hex(), "hi": t.value.hi.hex(),
                 "hypotheses": list(t.hypotheses)}
                for t in self.trace
            ],
        }, indent=2)


def _fold(quantity, x_lo, x_hi, terms) -> BoundCertificate:
    acc = Enclosure.zero()
    for t in terms:
        acc = acc + t.value
    return BoundCertificate(quantity, x_lo, x_hi, acc, tuple(terms))


# ---------------------------------------------------------------------------
# Printed-value comparison helpers.
# ---------------------------------------------------------------------------


def printed_unit(printed: str) -> Fraction:
    """One unit in the last digit of a printed decimal like '6.234983e-6'."""
    mant, _, exp = printed.lower().partition("e")
    scale = Fraction(10) ** int(exp or 0)
    if "." in mant:
        places = len(mant.split(".")[1])
    else:
        places = 0
    return Fraction(10) ** (-places) * scale


def within_one_unit(value: Union[float, Enclosure], printed: str) -> bool:
    """|value - printed| <= one unit in the printed value's last digit."""
    v = Fraction(value.hi if isinstance(value, Enclosure) else value)
    p = Fraction(printed)
    return abs(v - p) <= printed_unit(printed)


def not_exceeding(value: Union[float, Enclosure], printed: str,
                  slack: Fraction = Fraction(0)) -> bool:
    """value <= printed + slack (printed values are rounded-up bounds)."""
    v = Fraction(value.hi if isinstance(value, Enclosure) else value)
    return v <= Fraction(printed) + slack


def _log_e(x) -> Enclosure:
    if isinstance(x, Enclosure):
        return x.log()
    if isinstance(x, int):
        return Enclosure.from_int(x).log()
    return Enclosure.from_fraction(Fraction(x)).log()


def _sqrt_e(x) -> Enclosure:
    if isinstance(x, Enclosure):
        return x.sqrt()
    if isinstance(x, int):
        return Enclosure.from_int(x).sqrt()
    return Enclosure.from_fraction(Fraction(x)).sqrt()


# ---------------------------------------------------------------------------
# First range [1e16, 2e16].
# ---------------------------------------------------------------------------


def bound_tail_small(m1_value: Enclosure, y: int = 10 ** 8,
                     x_range: tuple = (_X16, 2 * _X16),
                     ledger: Optional[HypothesisLedger] = None) -> Enclosure:
    """Boundary-plus-m1 contribution: (psi_c*M_c/sqrt(x) + |m1(y)|)/log x.

    Both summands and 1/log x decrease in x, so everything is evaluated at
    x_lo.
    """
    led = ledger or default_ledger()
    x_lo, x_hi = x_range
    mm = led.model("M_sqrt")
    pm = led.model("psi_sqrt")
    if not mm.covers(y, y):
        raise PipelineError(f"hypothesis M_sqrt does not cover y={y}")
    if not pm.covers(x_lo // y, -(-x_hi // y)):
        raise PipelineError("hypothesis psi_sqrt does not cover x/y")
    core = pm.coefficient * mm.coefficient / _sqrt_e(x_lo) + abs(m1_value)
    return core / _log_e(x_lo)


def bound_lambda_part_small(y: int = 10 ** 8,
                            x_range: tuple = (_X16, 2 * _X16),
                            ledger: Optional[HypothesisLedger] = None, *,
                            lambda_log_const: Fraction = Fraction("0.14"),
                            M_coefficient: Optional[Enclosure] = None
                            ) -> Enclosure:
    """Prime-power convolution part over 1 < k <= x/y.

    Cauchy-style regrouping against the Lambda/sqrt(k) envelope gives
    M_c*(2 sqrt(y))/(sqrt(x) log x) + M_c*c/sqrt(x)
    - M_c*(1.19 + c log y)/(sqrt(x) log x); the positive terms peak at x_lo,
    the negative correction is smallest in magnitude at x_hi.
    ``lambda_log_const`` defaults to the sharper 0.14; pass 0.47 for the
    conservative variant backed directly by the envelope estimate.
    """
    led = ledger or default_ledger()
    x_lo, x_hi = x_range
    mc = M_coefficient if M_coefficient is not None \
        else led.model("M_sqrt").coefficient
    c = Enclosure.from_fraction(Fraction(lambda_log_const))
    log_y = _log_e(y)
    t1 = mc * 2 * _sqrt_e(y) / (_sqrt_e(x_lo) * _log_e(x_lo))
    t2 = mc * c / _sqrt_e(x_lo)
    t3 = -(mc * (Fraction("1.19") + c * log_y)
           / (_sqrt_e(x_hi) * _log_e(x_hi)))
    return t1 + t2 + t3


def bound_psi_part_small(mu2_sqrt_sum: Enclosure, y: int = 10 ** 8,
                         x_range: tuple = (_X16, 2 * _X16),
                         ledger: Optional[HypothesisLedger] = None, *,
                         psi_coefficient: Optional[Enclosure] = None
                         ) -> Enclosure:
    """Squarefree-psi part: psi_c * S / (sqrt(x) log x), peak at x_lo."""
    led = ledger or default_ledger()
    x_lo, x_hi = x_range
    pc = psi_coefficient if psi_coefficient is not None \
        else led.model("psi_sqrt").coefficient
    if not led.model("psi_sqrt").covers(x_lo // y, x_hi):
        raise PipelineError("hypothesis psi_sqrt does not cover [x/y, x]")
    s_hi = Enclosure(max(mu2_sqrt_sum.hi, 0.0), max(mu2_sqrt_sum.hi, 0.0))
    return pc * s_hi / (_sqrt_e(x_lo) * _log_e(x_lo))


def gap_0227_check(ledger: Optional[HypothesisLedger] = None, *,
                   strict: bool = True) -> Enclosure:
    """Re-derive the 0.227 gap constant and confirm it is justified.

    The gap satisfies |N/(x log x) - M/x| <= (alpha*M_c + log x/sqrt(x)
    + 5/sqrt(x)) / (sqrt(x) log x); its numerator, evaluated at x = 1.3e9
    where it is largest, must stay below 0.227.
    """
    led = ledger or default_ledger()
    x0 = 1_300_000_000
    mc = led.model("M_sqrt").coefficient
    val = (alpha_constant() * mc + _log_e(x0) / _sqrt_e(x0)
           + 5 / _sqrt_e(x0))
    if strict and not val.strictly_below(Fraction("0.227")):
        raise PipelineError("gap constant 0.227 is not justified by alpha")
    return val


def first_range_pipeline(m1_value: Optional[Enclosure] = None,
                         mu2_sqrt_sum: Optional[Enclosure] = None,
                         ledger: Optional[HypothesisLedger] = None, *,
                         strict: bool = True,
                         lambda_log_const: Fraction = Fraction("0.14")
                         ) -> tuple:
    """Certificates for sup |N|/(x log x) and sup |M|/x on [1e16, 2e16].

    If the big summatory inputs are not supplied they are computed (the
    m1(1e8) and squarefree 1/sqrt(j) scans take a few minutes together).
    In strict mode the certificate bounds are cross-checked against the
    reference values 6.234983e-6 and 6.235045e-6 and must not exceed them.
    """
    led = ledger or default_ledger()
    if m1_value is None:
        from .summatory import m1_at
        m1_value = m1_at(10 ** 8)
    if mu2_sqrt_sum is None:
        from .summatory import weighted_sum
        mu2_sqrt_sum = weighted_sum("mu2_over_sqrt", 10 ** 8)
    if strict:
        if not (m1_value.lo > 0 and m1_value.strictly_below(Fraction("1.195e-6"))):
            raise PipelineError(f"m1(1e8) enclosure {m1_value} outside (0, 1.195e-6)")
        if not not_exceeding(mu2_sqrt_sum, "12158.55"):
            raise PipelineError(f"mu2/sqrt sum {mu2_sqrt_sum} exceeds 12158.55")
    x_range = (_X16, 2 * _X16)
    terms_n = [
        TraceTerm("boundary+m1", "tail_small",
                  bound_tail_small(m1_value, 10 ** 8, x_range, led),
                  ("psi_sqrt", "M_sqrt")),
        TraceTerm("lambda-convolution", "lambda_part",
                  bound_lambda_part_small(10 ** 8, x_range, led,
                                          lambda_log_const=lambda_log_const),
                  ("M_sqrt",)),
        TraceTerm("squarefree-psi", "psi_part",
                  bound_psi_part_small(mu2_sqrt_sum, 10 ** 8, x_range, led),
                  ("psi_sqrt",)),
    ]
    cert_n = _fold("sup |N(x)|/(x log x)", float(_X16), float(2 * _X16), terms_n)
    if strict and not not_exceeding(cert_n.bound, "6.234983e-6",
                                    Fraction("1e-11")):
        raise PipelineError(
            f"first-range N bound {cert_n.bound.hi} exceeds 6.234983e-6")

    derived = gap_0227_check(led, strict=strict)
    # 0.227/(sqrt(x) log x) decreases in x: peak at x_lo.  Outside strict
    # mode (coefficient sweeps) the derived constant may exceed 0.227 and
    # is then used directly, keeping the bound monotone in the hypotheses.
    gap_c = Enclosure.from_decimal("0.227")
    if not strict and derived.hi > gap_c.hi:
        gap_c = Enclosure(gap_c.lo, derived.hi)
    gap = gap_c / (_sqrt_e(_X16) * _log_e(_X16))
    terms_m = [
        TraceTerm("first-range N", "n_bound", cert_n.bound,
                  cert_n.hypotheses_used()),
        TraceTerm("N-to-M gap", "gap_0227", gap, ("M_sqrt",)),
    ]
    cert_m = _fold("sup |M(x)|/x", float(_X16), float(2 * _X16), terms_m)
    if strict and not not_exceeding(cert_m.bound, "6.235045e-6",
                                    Fraction("1e-11")):
        raise PipelineError(
            f"first-range M bound {cert_m.bound.hi} exceeds 6.235045e-6")
    return cert_n, cert_m


# ---------------------------------------------------------------------------
# The generic N -> M gap (split at T) and the dyadic windows.
# ---------------------------------------------------------------------------


def default_gap_split() -> Fraction:
    """T = (0.571 * 160383)^2, the split point of the headline constant."""
    return (M_SPLIT * 160_383) ** 2


def gap_linear_constant(T: Optional[Fraction] = None) -> Enclosure:
    """The 5 + 0.571*2*sqrt(T) constant of the gap bound."""
    T = default_gap_split() if T is None else Fraction(T)
    return 5 + Enclosure.from_fraction(M_SPLIT) * 2 * _sqrt_e(T)


def n_to_m_gap(x_lo, sup_M_hyp: Enclosure,
               T: Optional[Fraction] = None,
               ledger: Optional[HypothesisLedger] = None) -> Enclosure:
    """Upper bound on |N/(x log x) - M/x| for x >= x_lo.

    beta*sup/log x + (5 + 0.571*2*sqrt(T))/(x log x) + 1/x, with beta
    rounded up to 0.08; every term decreases in x, so all are evaluated at
    x_lo.  Requires |M(u)|/u <= sup_M_hyp on [T, x/6].
    """
    T = default_gap_split() if T is None else Fraction(T)
    if not (33 <= T <= _X16):
        raise PipelineError(f"gap split T={float(T)} outside [33, 1e16]")
    beta = Enclosure.from_decimal("0.08")
    if not beta_constant().strictly_below(Fraction("0.08")):
        raise PipelineError("beta exceeds its rounded value 0.08")
    x_lo = Fraction(x_lo)
    log_x = _log_e(x_lo)
    xe = Enclosure.from_fraction(x_lo)
    return (beta * sup_M_hyp / log_x
            + gap_linear_constant(T) / (xe * log_x)
            + 1 / xe)


def dyadic_step(a, sup_M_hyp: Enclosure,
                ledger: Optional[HypothesisLedger] = None, *,
                lambda_log_const: Fraction = Fraction("0.14"),
                mu2_log_const: Fraction = Fraction("0.17")) -> tuple:
    """(N_bound, M_bound) on the window [X, 2X] with X = a*1e16, y = sqrt(X).

    The window is only useful to the chain for 2 <= a <= 500; terms are
    maximized at x = X (they all decrease in x) except the Lambda/k head,
    which is constant in x once bounded by log(2a-1) * sup.
    """
    a = Fraction(a)
    if not (1 <= a <= 500):
        raise PipelineError(f"dyadic parameter a={a} outside [1, 500]")
    led = ledger or default_ledger()
    X = a * _X16
    sqrt_X = _sqrt_e(X)
    y = sqrt_X  # split point y = sqrt(X); then x/y ranges over [y, 2y]
    sqrt_y = sqrt_X.sqrt()
    log_X = _log_e(X)
    log_y = log_X / 2
    mc = led.model("M_sqrt").coefficient
    pc = led.model("psi_sqrt").coefficient
    m1c = led.model("m1_inv_sqrt").coefficient
    if not led.model("m1_inv_sqrt").covers(
            math.isqrt(int(X)), math.isqrt(int(2 * X)) + 1):
        raise PipelineError("hypothesis m1_inv_sqrt does not cover x/y")
    # boundary + m1 terms, both at x = X
    t1 = (pc * mc / sqrt_X + m1c / sqrt_y) / log_X
    # squarefree-psi sum via the 12/pi^2 estimate, at x = X
    t2 = pc * (12 / (pi_squared() * sqrt_y)) / log_X
    t3 = Enclosure.from_fraction(Fraction(mu2_log_const)) * pc / sqrt_X
    # Lambda/k head: k <= 2a-1 keeps x/k >= 1e16 where only sup applies
    t4 = _log_e(2 * a - 1) / log_X * sup_M_hyp if a > 1 else Enclosure.zero()
    # Lambda/sqrt(k) tail against the square-root model
    c = Enclosure.from_fraction(Fraction(lambda_log_const))
    t5 = mc * (2 * sqrt_y + c * log_y - Fraction("1.19")) / (sqrt_X * log_X)
    n_bound = t1 + t2 + t3 + t4 + t5
    m_bound = n_bound + n_to_m_gap(X, sup_M_hyp, ledger=led)
    return n_bound, m_bound


PRINTED_DYADIC = (
    (2, "5.60", "5.61"), (4, "4.79", "4.80"), (8, "4.13", "4.14"),
    (16, "3.59", "3.60"), (32, "3.16", "3.18"), (64, "2.82", "2.84"),
    (128, "2.56", "2.57"), (256, "2.35", "2.36"), (500, "2.19", "2.20"),
)


def dyadic_pipeline(ledger: Optional[HypothesisLedger] = None, *,
                    strict: bool = True) -> list:
    """Certificates covering [2e16, 1e19] window by window.

    Each window assumes sup |M(t)|/t <= 1/160383 on [1e16, 2X], justified by
    the first-range certificate plus all previous windows; the step's own M
    bound must then re-establish the same constant ("oui" column).
    """
    led = ledger or default_ledger()
    sup = Enclosure.from_fraction(Fraction(1, 160_383))
    certs = []
    covered_hi = 2 * _X16  # from the first range
    for a, printed_n, printed_m in PRINTED_DYADIC:
        X = a * _X16
        if strict and X > covered_hi:
            raise PipelineError(f"dyadic chain break: window a={a} starts at "
                                f"{X} beyond covered {covered_hi}")
        n_bound, m_bound = dyadic_step(a, sup, led)
        if strict:
            unit = Fraction(printed_unit(printed_n)) * Fraction("1e-6")
            if not (abs(Fraction(n_bound.hi) - Fraction(printed_n) * Fraction("1e-6")) <= unit):
                raise PipelineError(
                    f"dyadic a={a}: N bound {n_bound.hi} vs printed {printed_n}e-6")
            if not (abs(Fraction(m_bound.hi) - Fraction(printed_m) * Fraction("1e-6")) <= unit):
                raise PipelineError(
                    f"dyadic a={a}: M bound {m_bound.hi} vs printed {printed_m}e-6")
            if not m_bound.strictly_below(Fraction(1, 160_383)):
                raise PipelineError(f"dyadic a={a}: M bound fails 1/160383")
        certs.append(_fold(
            "sup |M(x)|/x", float(X), float(2 * X),
            [TraceTerm("dyadic window", f"a={a}:N", n_bound,
                       ("M_sqrt", "psi_sqrt", "m1_inv_sqrt")),
             TraceTerm("N-to-M gap", f"a={a}:gap",
                       m_bound - n_bound, ("M_sqrt",))]))
        covered_hi = max(covered_hi, 2 * X)
    return certs


# ---------------------------------------------------------------------------
# x >= 1e19: the bootstrap iteration.
# ---------------------------------------------------------------------------


def lstar_enclosure() -> Enclosure:
    """L* with (0.571 L*)^2 = sqrt(1e19): the largest iterable level."""
    return _sqrt_e(_X19).sqrt() / Enclosure.from_fraction(M_SPLIT)


def _large_x_split(L) -> tuple:
    """(y, inv_L, sqrt_y) for level L; L=None means the L* cap."""
    if L is None:
        y = _sqrt_e(_X19)  # y^2 = 1e19 exactly at the cap
        sqrt_y = y.sqrt()
        inv_l = Enclosure.from_fraction(M_SPLIT) / sqrt_y
        return y, inv_l, sqrt_y
    y = (M_SPLIT * Fraction(L)) ** 2
    if y * y > _X19:
        raise PipelineError(
            f"level L={L} gives y^2 > 1e19; cap the iteration at L*")
    ye = Enclosure.from_fraction(y)
    return ye, Enclosure.from_fraction(Fraction(1, Fraction(L))), ye.sqrt()


def large_x_step(L, ledger: Optional[HypothesisLedger] = None) -> tuple:
    """(N_bound, M_bound) for x >= 1e19 given |M(u)|/u <= 1/L for u >= y.

    y = (0.571 L)^2 so that 1/L = 0.571/sqrt(y); pass L=None for the L* cap
    where y = sqrt(1e19).  All x-dependent terms peak at x = 1e19.
    """
    led = ledger or default_ledger()
    y, inv_l, sqrt_y = _large_x_split(L)
    pc = led.model("psi_sqrt").coefficient
    m1c = led.model("m1_inv_sqrt").coefficient
    fk = led.value("fk_psi_relative", math.exp(40))
    log19 = _log_e(_X19)
    Y = Enclosure.from_int(40).exp()  # Y = exp(40)

    # Negativity side condition allowing the clean mid-range regrouping:
    # -12/(pi^2 sqrt(Y)) + 1.31 sqrt(Y)/x < 0 at x = 1e19 (x only helps).
    side = (-12 / (pi_squared() * Y.sqrt())
            + led.value("mu2_partial_sqrt") * Y.sqrt() / Fraction(_X19))
    if not side.is_negative():
        raise PipelineError("mid-range regrouping side condition failed")

    # m1 argument x/y >= 1e19/y; the model is monotone so the sup sits at
    # min(1e19/y, A) with A the tail anchor.
    A = Fraction("2.18e12")
    xy_lo = Fraction(_X19) / Fraction(y.hi)
    m1_arg = min(xy_lo, A)
    t_tail = (pc * inv_l / sqrt_y + m1c / _sqrt_e(m1_arg)) / log19
    # Lambda/k head against sum Lambda(k)/k <= log y - 0.5 (y >= 300).
    if not (y.lo >= 300):
        raise PipelineError("split y below 300; harmonic envelope unusable")
    t_lambda = inv_l * (y.log() - Fraction("0.5")) / log19
    # j <= x/Y: relative psi bound beyond Y = exp(40).
    t_far = 6 / pi_squared() * fk
    # x/Y < j <= x/y: psi root model against the squarefree tail estimate.
    c035 = led.value("mu2_partial_log")
    t_mid = pc * (12 / (pi_squared() * sqrt_y)
                  + c035 * (40 - y.log()) / _sqrt_e(_X19)) / log19
    n_bound = t_tail + t_lambda + t_far + t_mid

    # N -> M at split T = y (33 <= y <= 1e16 holds for every level used).
    log_x = log19
    xe = Enclosure.from_int(_X19)
    gap = (Enclosure.from_decimal("0.08") * inv_l / log_x
           + (5 + Enclosure.from_fraction(M_SPLIT) * 2 * sqrt_y) / (xe * log_x)
           + 1 / xe)
    return n_bound, n_bound + gap


LARGE_X_L_SEQUENCE = (4345, 11035, 25266, 53119, None)
PRINTED_LARGE_X_N = (11086, 25372, 53324, 104069, 180799)
PRINTED_LARGE_X_M = (11035, 25266, 53119, 103697, 180194)


def large_x_iteration(ledger: Optional[HypothesisLedger] = None, *,
                      strict: bool = True) -> list:
    """Bootstrap levels 4345 -> 11035 -> 25266 -> 53119 -> L* (capped).

    The first level comes from the x/4345 hypothesis; each later level L
    must be justified by the previous step's M bound (1/M_bound >= L).
    Returns one (L, N_bound, M_bound) row per level.
    """
    led = ledger or default_ledger()
    entry = led["cdm_reciprocal"]
    y1 = (M_SPLIT * 4345) ** 2
    entry.require_range(float(y1))
    rows = []
    prev_m: Optional[Enclosure] = None
    for i, L in enumerate(LARGE_X_L_SEQUENCE):
        if i >= 10:
            raise PipelineError("large-x iteration failed to converge")
        if strict and prev_m is not None:
            level = Fraction(lstar_enclosure().lo) if L is None else Fraction(L)
            if not (1 / Fraction(prev_m.hi) >= level):
                raise PipelineError(
                    f"large-x chain break: level {L} not justified by "
                    f"previous bound {prev_m.hi}")
        n_bound, m_bound = large_x_step(L, led)
        if strict and not m_bound.strictly_below(
                Fraction(1, PRINTED_LARGE_X_M[i])):
            raise PipelineError(
                f"large-x level {L}: M bound {m_bound.hi} exceeds "
                f"1/{PRINTED_LARGE_X_M[i]}")
        rows.append((L, n_bound, m_bound))
        prev_m = m_bound
    return rows


# ---------------------------------------------------------------------------
# Squarefree-sum estimates (used above; exposed for direct checking).
# ---------------------------------------------------------------------------


def mu2_sum_bounds(x, y, Y, ledger: Optional[HypothesisLedger] = None) -> dict:
    """The three rigorous squarefree-sum upper bounds as closed forms.

    ``harmonic_log7``:    sum mu^2(n)/n for n <= x       <= (6/pi^2) log(7x)
    ``sqrt_weighted``:    (1/sqrt x) sum_{k<=x/y} mu^2/sqrt(k)
                          <= 12/(pi^2 sqrt y) + 0.17 log(x/y)/sqrt(x)
    ``dyadic_tail``:      sum_{x/Y<j<=x/y} mu^2(j)/(j sqrt(x/j))
                          <= (6/pi^2)(2/sqrt y - 2/sqrt Y)
                             + 1.31 sqrt(Y)/x + 0.35 log(Y/y)/sqrt(x)
    The integrals behind the last form are the exact antiderivatives of
    t^(-3/2) and t^(-1) between y and Y.
    """
    led = ledger or default_ledger()
    x, y, Y = Fraction(x), Fraction(y), Fraction(Y)
    if not (x >= Y >= y >= 1):
        raise PipelineError("need x >= Y >= y >= 1")
    out = {}
    out["harmonic_log7"] = 6 / pi_squared() * _log_e(7 * x)
    if x / y >= 10 ** 4:
        out["sqrt_weighted"] = (12 / (pi_squared() * _sqrt_e(y))
                                + Enclosure.from_decimal("0.17")
                                * _log_e(x / y) / _sqrt_e(x))
    out["dyadic_tail"] = (
        6 / pi_squared() * (2 / _sqrt_e(y) - 2 / _sqrt_e(Y))
        + led.value("mu2_partial_sqrt") * _sqrt_e(Y) / Enclosure.from_fraction(x)
        + led.value("mu2_partial_log") * (_log_e(Y) - _log_e(y)) / _sqrt_e(x))
    return out


# ---------------------------------------------------------------------------
# Final assembly and the crossover comparison.
# ---------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class TheoremAssembly:
    threshold: Enclosure          # T = (0.571 * 160383)^2
    main_constant: int            # 160383
    large_x_constant: int         # 180194
    certificates: tuple           # coverage of [T, infinity)

    def coverage_gaps(self) -> list:
        """Gaps in [T, inf) left by the certificate ranges, if any."""
        ranges = sorted((c.x_lo, math.inf if c.x_hi is None else c.x_hi)
                        for c in self.certificates)
        gaps = []
        reach = self.threshold.hi
        for lo, hi in ranges:
            if lo > reach:
                gaps.append((reach, lo))
            reach = max(reach, hi)
        if reach != math.inf:
            gaps.append((reach, math.inf))
        return gaps


def theorem_A_assembly(m1_value: Optional[Enclosure] = None,
                       mu2_sqrt_sum: Optional[Enclosure] = None,
                       ledger: Optional[HypothesisLedger] = None, *,
                       strict: bool = True) -> TheoremAssembly:
    """Glue all pipelines into |M(x)|/x <= 1/160383 for x >= T <= 8.4e9.

    The root model gives 0.571/sqrt(x) <= 1/160383 exactly for x >= T
    = (0.571*160383)^2, extending the certified range downward from 1e16.
    Also certifies |M(x)|/x <= 1/180194 for x >= 1e19.
    """
    led = ledger or default_ledger()
    cert_n, cert_m = first_range_pipeline(m1_value, mu2_sqrt_sum, led,
                                          strict=strict)
    dyadic = dyadic_pipeline(led, strict=strict)
    rows = large_x_iteration(led, strict=strict)

    T = default_gap_split()
    Te = Enclosure.from_fraction(T)
    if strict and not (float(T) <= 8.4e9):
        raise PipelineError("threshold exceeds 8.4e9")
    # The chain is pinned to the constant 160383 (T and every dyadic window
    # assume it); certify that the first-range bound actually delivers it.
    main_c = 160_383
    if strict and int(1 / Fraction(cert_m.bound.hi)) < main_c:
        raise PipelineError("first-range bound weaker than 1/160383")
    final_m = rows[-1][2]
    large_c = 180_194
    if strict and not final_m.strictly_below(Fraction(1, large_c)):
        raise PipelineError("large-x constant 180194 not certified")

    mm = led.model("M_sqrt")
    root_cert = _fold(
        "sup |M(x)|/x", float(T), float(_X16),
        [TraceTerm("root model", "0.571/sqrt(x) at x=T",
                   mm.coefficient / Te.sqrt(), ("M_sqrt",))])
    # T is the square of a rational, so 0.571/sqrt(T) = 1/160383 exactly;
    # the structural identity is exact, the enclosure must merely contain it.
    if strict:
        coeff = Fraction(mm.coefficient.lo)
        if not (coeff <= M_SPLIT and M_SPLIT / (M_SPLIT * 160_383)
                == Fraction(1, 160_383)):
            raise PipelineError("root-model extension identity broken")
        if not root_cert.bound.contains(Fraction(1, 160_383)):
            raise PipelineError("root-model extension fails at T")
    tail_cert = _fold(
        "sup |M(x)|/x", float(_X19), None,
        [TraceTerm("large-x bootstrap", "final level", final_m,
                   ("cdm_reciprocal", "psi_sqrt", "m1_inv_sqrt",
                    "fk_psi_relative", "mu2_partial_log", "mu2_partial_sqrt"))])
    certs = (root_cert, cert_m) + tuple(dyadic) + (tail_cert,)
    asm = TheoremAssembly(Te, main_c, large_c, certs)
    if strict and asm.coverage_gaps():
        raise PipelineError(f"certificate coverage gaps: {asm.coverage_gaps()}")
    return asm


def ramare_crossover(ledger: Optional[HypothesisLedger] = None) -> Enclosure:
    """log10 of the x where 0.130/log x - 0.118/log^2 x equals 1/160383.

    With u = 1/log x this is the smaller root of 0.118 u^2 - 0.130 u + c = 0;
    beyond that x the constant bound 1/160383 is the weaker one.
    """
    led = ledger or default_ledger()
    a = led.value("mn_ramare_b")   # 0.118
    b = led.value("mn_ramare_a")   # 0.130
    c = Enclosure.from_fraction(Fraction(1, 160_383))
    disc = (b * b - 4 * a * c).sqrt()
    u = (b - disc) / (2 * a)
    log_x = 1 / u
    return log_x / _log_e(10)
