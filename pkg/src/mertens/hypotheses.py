"""Root models and the ledger of external hypotheses feeding certification.

A :class:`RootModel` states an envelope of the form ``|f(x)| <= c*sqrt(x)``
or ``|f(x)| <= c/sqrt(x)`` on an x-range.  The :class:`HypothesisLedger`
collects every numerical input the bound chain consumes that is not derived
inside this package: each entry carries an enclosure of its coefficient, a
validity range, and a provenance tag, so certificates can list exactly what
they relied on.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional

from .enclosure import Enclosure

__all__ = ["RootModel", "LedgerEntry", "HypothesisLedger", "default_ledger"]

_TARGETS = {"M", "psi_minus_x", "m1", "Q_minus_density"}
_FORMS = {"sqrt_upper", "inv_sqrt_upper", "linear_upper", "flat"}


@dataclass(frozen=True, slots=True)
class RootModel:
    """Envelope ``|f(x)| <= coefficient * g(x)`` valid on ``[x_lo, x_hi]``.

    ``form`` selects g: ``sqrt_upper`` means sqrt(x), ``inv_sqrt_upper``
    means 1/sqrt(x), ``linear_upper`` means x, ``flat`` means 1.
    ``x_hi = None`` means unbounded above.
    """

    target: str
    form: str
    coefficient: Enclosure
    x_lo: int
    x_hi: Optional[int]
    provenance: str

    def __post_init__(self) -> None:
        if self.target not in _TARGETS:
            raise ValueError(f"unknown target {self.target!r}")
        if self.form not in _FORMS:
            raise ValueError(f"unknown form {self.form!r}")
        if self.coefficient.lo <= 0.0:
            raise ValueError("model coefficient must be positive")
        if self.x_hi is not None and self.x_hi < self.x_lo:
            raise ValueError("empty model range")

    def covers(self, x_lo: int, x_hi: int) -> bool:
        return self.x_lo <= x_lo and (self.x_hi is None or x_hi <= self.x_hi)

    def envelope_at(self, x: int) -> Enclosure:
        """Enclosure of coefficient * g(x) at an exact integer x."""
        xe = Enclosure.from_int(x)
        if self.form == "sqrt_upper":
            return self.coefficient * xe.sqrt()
        if self.form == "inv_sqrt_upper":
            return self.coefficient / xe.sqrt()
        if self.form == "linear_upper":
            return self.coefficient * xe
        return self.coefficient

    def with_coefficient(self, coefficient: Enclosure) -> "RootModel":
        return replace(self, coefficient=coefficient)


@dataclass(frozen=True, slots=True)
class LedgerEntry:
    name: str
    value: Enclosure
    x_lo: float
    x_hi: Optional[float]
    provenance: str
    note: str = ""

    def require_range(self, x_lo: float, x_hi: Optional[float] = None) -> None:
        hi = x_hi if x_hi is not None else x_lo
        if x_lo < self.x_lo or (self.x_hi is not None and hi > self.x_hi):
            raise ValueError(
                f"hypothesis {self.name!r} valid on "
                f"[{self.x_lo}, {self.x_hi if self.x_hi is not None else 'inf'}], "
                f"requested [{x_lo}, {hi}]"
            )


def _pin(text: str) -> Enclosure:
    return Enclosure.from_decimal(text)


def _entry(name, text, x_lo, x_hi, provenance, note=""):
    return LedgerEntry(name, _pin(text), x_lo, x_hi, provenance, note)


@dataclass
class HypothesisLedger:
    """Named external constants with provenance and validity ranges."""

    entries: dict[str, LedgerEntry] = field(default_factory=dict)
    models: dict[str, RootModel] = field(default_factory=dict)

    def __getitem__(self, name: str) -> LedgerEntry:
        return self.entries[name]

    def value(self, name: str, x_lo: float = None, x_hi: float = None) -> Enclosure:
        e = self.entries[name]
        if x_lo is not None:
            e.require_range(x_lo, x_hi)
        return e.value

    def model(self, name: str) -> RootModel:
        return self.models[name]

    def add(self, entry: LedgerEntry) -> None:
        self.entries[entry.name] = entry

    def add_model(self, name: str, model: RootModel) -> None:
        self.models[name] = model

    def perturbed(self, name: str, factor: float) -> "HypothesisLedger":
        """Copy of the ledger with one coefficient scaled by ``factor``."""
        out = HypothesisLedger(dict(self.entries), dict(self.models))
        if name in out.entries:
            e = out.entries[name]
            out.entries[name] = replace(e, value=e.value * Enclosure.point(factor))
        elif name in out.models:
            m = out.models[name]
            out.models[name] = m.with_coefficient(m.coefficient * Enclosure.point(factor))
        else:
            raise KeyError(name)
        return out

    def coefficient_names(self) -> list[str]:
        return sorted(self.entries) + sorted(self.models)

    # -- serialization --------------------------------------------------

    def dump(self) -> str:
        lines = ["# hypothesis ledger v1"]
        for name in sorted(self.models):
            m = self.models[name]
            hi = "inf" if m.x_hi is None else str(m.x_hi)
            lines.append(
                f"model {name} {m.target} {m.form} "
                f"{m.coefficient.lo.hex()} {m.coefficient.hi.hex()} "
                f"{m.x_lo} {hi} | {m.provenance}"
            )
        for name in sorted(self.entries):
            e = self.entries[name]
            # Ranges are serialized as floats so a dump/load roundtrip is
            # textually stable (and hence digest-stable).
            hi = "inf" if e.x_hi is None else repr(float(e.x_hi))
            lines.append(
                f"entry {name} {e.value.lo.hex()} {e.value.hi.hex()} "
                f"{float(e.x_lo)!r} {hi} | {e.provenance}"
            )
        return "\n".join(lines) + "\n"

    @staticmethod
    def load(text: str) -> "HypothesisLedger":
        ledger = HypothesisLedger()
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            body, _, prov = line.partition("|")
            parts = body.split()
            if parts[0] == "model":
                _, name, target, form, lo, hi, xlo, xhi = parts
                ledger.add_model(name, RootModel(
                    target, form,
                    Enclosure(float.fromhex(lo), float.fromhex(hi)),
                    int(xlo), None if xhi == "inf" else int(xhi),
                    prov.strip()))
            elif parts[0] == "entry":
                _, name, lo, hi, xlo, xhi = parts
                ledger.add(LedgerEntry(
                    name,
                    Enclosure(float.fromhex(lo), float.fromhex(hi)),
                    float(xlo), None if xhi == "inf" else float(xhi),
                    prov.strip()))
            else:
                raise ValueError(f"bad ledger line: {raw!r}")
        return ledger

    def digest(self) -> str:
        return hashlib.sha256(self.dump().encode()).hexdigest()[:16]


def default_ledger() -> HypothesisLedger:
    """The stock ledger used by the standard certification pipelines."""
    led = HypothesisLedger()

    led.add_model("M_sqrt", RootModel(
        "M", "sqrt_upper", _pin("0.571"), 33, 10 ** 16,
        "Hurst 2018; Buthe verification"))
    led.add_model("psi_sqrt", RootModel(
        "psi_minus_x", "sqrt_upper", _pin("0.94"), 11, 10 ** 19,
        "Buthe 2018"))
    led.add_model("m1_inv_sqrt", RootModel(
        "m1", "inv_sqrt_upper", _pin("0.129"), 5 * 10 ** 6, 10 ** 16,
        "Daval computation"))

    led.add(_entry("cdm_reciprocal", "4345", 2_160_535, None,
                   "Cohen-Dress-El Marraki 1996",
                   "|M(x)| <= x/4345"))
    led.add(_entry("fk_psi_relative", "8.6386e-8", math.exp(40), None,
                   "Faber-Kadiri 2015",
                   "|psi(x)-x| <= 8.6386e-8 x for x >= exp(40)"))
    led.add(_entry("m1_tail_anchor", "2.18e12", 2.18e12, None,
                   "Daval computation",
                   "anchor A with |m1(X)| <= 0.129/sqrt(A) for X >= A"))
    led.add(_entry("q_excess_upper", "0.1333", 1, None,
                   "squarefree counting bound",
                   "Q(x) <= (6/pi^2) x + 0.1333 sqrt(x)"))
    led.add(_entry("q_excess_lower", "0.5", 1, None,
                   "squarefree counting bound",
                   "Q(x) >= (6/pi^2) x - 0.5 sqrt(x)"))
    led.add(_entry("lambda_harmonic_remainder_sqrt", "1.31", 1, None,
                   "Ramare 2013",
                   "sum Lambda(k)/k = log y - gamma + R(y), |R(y)| <= 1.31/sqrt(y)"))
    led.add(_entry("lambda_harmonic_remainder_log", "0.0067", 2, None,
                   "Ramare 2013",
                   "|R(y)| <= 0.0067/log y"))
    led.add(_entry("mu2_over_n_lower_const", "0.578", 1, None,
                   "squarefree harmonic sum bracket",
                   "sum mu^2/n >= (6/pi^2) log x + 0.578"))
    led.add(_entry("mu2_over_n_upper_const", "1.166", 1, None,
                   "squarefree harmonic sum bracket",
                   "sum mu^2/n <= (6/pi^2) log x + 1.166"))
    led.add(_entry("mu2_partial_sqrt", "1.31", 1, None,
                   "squarefree partial-sum constant",
                   "used in the Y-tail estimate together with 0.35"))
    led.add(_entry("mu2_partial_log", "0.35", 1, None,
                   "squarefree partial-sum constant",
                   "log-factor constant of the Y-tail estimate"))
    led.add(_entry("mn_ramare_a", "0.130", 2, None,
                   "Ramare 2013",
                   "|M(x)| <= (0.130/log x - 0.118/log^2 x) x"))
    led.add(_entry("mn_ramare_b", "0.118", 2, None,
                   "Ramare 2013",
                   "second coefficient of the same envelope"))
    return led
