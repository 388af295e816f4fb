"""Command-line surface: scans, identity checks, and bound certification.

Commands
--------
compute          checkpointed series / point values of M, psi, N, m, m1, Q
verify           identity residuals, envelope models, per-integer scans
certify          the certification pipelines (always rigorous, single thread)
scan-threshold   last x <= X with |M(x)| > x / R, exact and resumable
constants        the analytic constants used by the pipelines

Outputs are self-describing: every document starts with a versioned header
and the SHA-256 digest of the hypothesis ledger in force, so a certificate
can be audited offline.  Exit status is 0 iff every requested check passed
conclusively.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import certify as cert
from . import identity, summatory
from .enclosure import Enclosure, euler_gamma, zeta_half
from .hypotheses import HypothesisLedger, default_ledger

__all__ = ["main"]

_VERSION = "mertens-cli v1"


def exact_int(text: str) -> int:
    """Parse '1000000', '1e6', '1.3e9', '2_160_535' as an exact integer."""
    q = Fraction(text.replace("_", ""))
    if q.denominator != 1:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer")
    return q.numerator


class _Report:
    """Rows of (x, lo, hi, pass) plus free-form notes, in three formats."""

    def __init__(self, command: str, ledger: HypothesisLedger):
        self.command = command
        self.digest = ledger.digest()
        self.rows: list[dict] = []
        self.notes: list[str] = []
        self.extra: dict = {}

    def row(self, x, lo, hi, ok) -> None:
        self.rows.append({"x": x, "lo": lo, "hi": hi, "pass": bool(ok)})

    def enclosure_row(self, x, e: Enclosure, ok) -> None:
        self.row(x, e.lo, e.hi, ok)

    def note(self, text: str) -> None:
        self.notes.append(text)

    @property
    def all_pass(self) -> bool:
        return all(r["pass"] for r in self.rows)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps({
                "version": _VERSION,
                "ledger": self.digest,
                "command": self.command,
                "rows": self.rows,
                "notes": self.notes,
                "pass": self.all_pass,
                **self.extra,
            }, indent=2, default=str)
        head = [f"# {_VERSION}", f"# ledger {self.digest}",
                f"# command {self.command}"]
        if fmt == "csv":
            lines = head + ["x,lo,hi,pass"]
            for r in self.rows:
                lines.append(f"{r['x']},{r['lo']!r},{r['hi']!r},"
                             f"{str(r['pass']).lower()}")
            lines += [f"# {n}" for n in self.notes]
            return "\n".join(lines) + "\n"
        # table
        lines = list(head)
        if self.rows:
            lines.append(f"{'x':>22}  {'lo':>26}  {'hi':>26}  pass")
            for r in self.rows:
                lines.append(f"{r['x']!s:>22}  {r['lo']!r:>26}  "
                             f"{r['hi']!r:>26}  {'ok' if r['pass'] else 'FAIL'}")
        lines += self.notes
        return "\n".join(lines) + "\n"


def _emit(report: _Report, args) -> int:
    text = report.render(args.format)
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if report.all_pass else 1


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------

_SCANNERS = {"M": summatory.mertens_scan, "Q": summatory.q_scan,
             "psi": summatory.psi_scan, "N": summatory.n_scan,
             "m": summatory.m_scan}


def _cmd_compute(args, ledger) -> int:
    rep = _Report(f"compute {args.function} {args.x}", ledger)
    if args.function == "m1":
        e = summatory.m1_at(args.x)
        rep.enclosure_row(args.x, e, True)
        return _emit(rep, args)
    scan = _SCANNERS[args.function]
    kwargs = dict(segment_size=args.segment_size,
                  checkpoint_path=args.checkpoint, workers=args.workers)
    if args.function in ("M", "Q"):
        series = scan(args.x, args.stride, **kwargs)
        for x, v in series.checkpoints:
            rep.row(x, v, v, True)
    else:
        series = scan(args.x, args.stride, mode=args.mode, **kwargs)
        for x, v in series.checkpoints:
            rep.enclosure_row(x, v, True)
    return _emit(rep, args)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _cmd_verify(args, ledger) -> int:
    rep = _Report(f"verify {args.what}", ledger)
    if args.what == "identity":
        x, y = args.x, args.y if args.y is not None else args.x
        h = identity.hyperbola_residual(x, y)
        s = identity.schoenfeld_residual(x, y)
        rep.enclosure_row(x, h.residual, h.passes)
        rep.enclosure_row(x, s.residual, s.passes)
        rep.note(f"hyperbola residual at (x={x}, y={y}): "
                 f"{'contains 0' if h.passes else 'EXCLUDES 0'}")
        rep.note(f"factored-out-floor residual: "
                 f"{'contains 0' if s.passes else 'EXCLUDES 0'}")
    elif args.what == "model":
        model = ledger.model({"M": "M_sqrt", "psi": "psi_sqrt"}[args.target])
        lo = args.x_from if args.x_from is not None else model.x_lo
        hi = args.x_to
        model = replace(model, x_lo=min(model.x_lo, lo),
                        x_hi=max(model.x_hi, hi))
        if args.coefficient is not None:
            model = model.with_coefficient(
                Enclosure.from_decimal(args.coefficient))
        report = summatory.verify_root_model(model, lo, hi)
        rep.enclosure_row(report.argmax_x, report.max_ratio,
                          report.conclusive_pass)
        rep.note(f"max |f(x)|/sqrt(x) = {report.max_ratio!r} "
                 f"at x = {report.argmax_x}")
        for v in report.violations[:20]:
            rep.note(f"violation at x = {v}")
        for v in report.inconclusive[:20]:
            rep.note(f"inconclusive at x = {v}")
    elif args.what == "envelope":
        report = summatory.lambda_sqrt_envelope_check(
            args.x_from if args.x_from is not None else
            (300 if args.kind == "harmonic" else 11),
            args.x_to, kind=args.kind)
        rep.enclosure_row(report.argmax_x, report.max_ratio,
                          report.conclusive_pass)
        rep.note(f"largest excursion toward the envelope: "
                 f"{report.max_ratio!r} at x = {report.argmax_x}")
    elif args.what == "mn-gap":
        report = identity.mn_gap_scan(args.x_from, args.x_to,
                                      stride=args.stride)
        rep.enclosure_row(report.argmax_x, report.max_ratio,
                          report.conclusive_pass)
    return _emit(rep, args)


# ---------------------------------------------------------------------------
# certify
# ---------------------------------------------------------------------------


def _parse_enclosure(text):
    if text is None:
        return None
    lo, _, hi = text.partition(",")
    lo = float.fromhex(lo) if "0x" in lo else float(lo)
    hi = float.fromhex(hi) if "0x" in hi else float(hi)
    return Enclosure(lo, hi)


def _cmd_certify(args, ledger) -> int:
    rep = _Report(f"certify {args.pipeline}", ledger)
    m1 = _parse_enclosure(args.m1)
    mu2 = _parse_enclosure(args.mu2)
    try:
        if args.pipeline == "first-range":
            cn, cm = cert.first_range_pipeline(m1, mu2, ledger)
            rep.enclosure_row("N/(x log x)", cn.bound, cn.replay())
            rep.enclosure_row("M/x", cm.bound, cm.replay())
            rep.extra["certificates"] = [json.loads(cn.to_json()),
                                         json.loads(cm.to_json())]
            rep.note(f"sup |N|/(x log x) on [1e16, 2e16] <= {cn.bound.hi!r} "
                     f"(reference 6.234983e-6)")
            rep.note(f"sup |M|/x on [1e16, 2e16] <= {cm.bound.hi!r} "
                     f"(reference 6.235045e-6)")
        elif args.pipeline == "dyadic":
            certs = cert.dyadic_pipeline(ledger)
            ok_all = True
            for (a, pn, pm), c in zip(cert.PRINTED_DYADIC, certs):
                n = c.trace[0].value
                m = c.bound
                oui = m.strictly_below(Fraction(1, 160_383))
                ok = (oui and c.replay()
                      and cert.within_one_unit(n, pn + "e-6")
                      and cert.within_one_unit(m, pm + "e-6"))
                ok_all &= ok
                rep.row(f"a={a}", n.hi, m.hi, ok)
                rep.note(f"a={a:>3}: N <= {n.hi:.6e} ({pn}e-6)  "
                         f"M <= {m.hi:.6e} ({pm}e-6)  "
                         f"{'oui' if oui else 'NON'}")
        elif args.pipeline == "large-x":
            rows = cert.large_x_iteration(ledger)
            for (L, n, m), pn, pm in zip(rows, cert.PRINTED_LARGE_X_N,
                                         cert.PRINTED_LARGE_X_M):
                fn = int(1 / Fraction(n.hi))
                fm = int(1 / Fraction(m.hi))
                ok = fn >= pn and fm >= pm
                rep.row(f"L={'L*' if L is None else L}", n.hi, m.hi, ok)
                rep.note(f"L={'L*' if L is None else L}: N <= 1/{fn} "
                         f"(printed 1/{pn})  M <= 1/{fm} (printed 1/{pm})")
            rep.note(f"L* = {cert.lstar_enclosure()!r}")
        elif args.pipeline == "theorem-a":
            asm = cert.theorem_A_assembly(m1, mu2, ledger)
            gaps = asm.coverage_gaps()
            rep.enclosure_row("threshold", asm.threshold,
                              asm.threshold.hi <= 8.4e9 and not gaps)
            rep.note(f"|M(x)| <= x/{asm.main_constant} for all "
                     f"x >= {asm.threshold.hi:.6e} (<= 8.4e9)")
            rep.note(f"|M(x)| <= x/{asm.large_x_constant} for all x >= 1e19")
            rep.extra["certificates"] = [json.loads(c.to_json())
                                         for c in asm.certificates]
    except cert.PipelineError as exc:
        rep.row("pipeline", None, None, False)
        rep.note(f"pipeline failure: {exc}")
    return _emit(rep, args)


# ---------------------------------------------------------------------------
# scan-threshold and constants
# ---------------------------------------------------------------------------


def _cmd_scan_threshold(args, ledger) -> int:
    rep = _Report(f"scan-threshold {args.reciprocal} {args.x_hi}", ledger)
    last = summatory.threshold_scan(args.reciprocal, args.x_hi,
                                    checkpoint_stride=args.stride,
                                    checkpoint_path=args.checkpoint)
    if last is None:
        rep.note(f"no x <= {args.x_hi} has |M(x)| > x/{args.reciprocal}")
    else:
        rep.row(last, None, None, True)
        rep.note(f"largest x <= {args.x_hi} with |M(x)| > "
                 f"x/{args.reciprocal}: {last}")
    return _emit(rep, args)


def _cmd_constants(args, ledger) -> int:
    rep = _Report("constants", ledger)
    for name, e in [
        ("alpha", identity.alpha_constant()),
        ("beta", identity.beta_constant()),
        ("zeta(1/2)", zeta_half()),
        ("euler_gamma", euler_gamma()),
        ("L*", cert.lstar_enclosure()),
    ]:
        rep.enclosure_row(name, e, True)
    return _emit(rep, args)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mertens",
        description="Summatory-function scans and rigorous bound certification.")
    p.add_argument("--ledger", help="hypothesis ledger file (default built-in)")
    p.add_argument("--format", choices=("table", "json", "csv"),
                   default="table")
    p.add_argument("--output", help="write the report to a file")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="compute a summatory series or value")
    c.add_argument("function", choices=("M", "psi", "N", "m", "m1", "Q"))
    c.add_argument("x", type=exact_int)
    c.add_argument("--stride", type=exact_int,
                   default=summatory.DEFAULT_STRIDE)
    c.add_argument("--mode", choices=("rigorous", "fast"), default="rigorous")
    c.add_argument("--workers", type=int, default=None)
    c.add_argument("--segment-size", type=exact_int, default=1 << 22)
    c.add_argument("--checkpoint", help="checkpoint file (resumable)")
    c.set_defaults(func=_cmd_compute)

    v = sub.add_parser("verify", help="identity / model / envelope checks")
    v.add_argument("what", choices=("identity", "model", "envelope", "mn-gap"))
    v.add_argument("target", nargs="?", choices=("M", "psi"),
                   help="model target (verify model)")
    v.add_argument("--x", type=exact_int, help="identity: x")
    v.add_argument("--y", type=exact_int, help="identity: split point y")
    v.add_argument("--from", dest="x_from", type=exact_int)
    v.add_argument("--to", dest="x_to", type=exact_int)
    v.add_argument("--kind", choices=("sqrt", "harmonic"), default="sqrt")
    v.add_argument("--stride", type=exact_int, default=10 ** 6)
    v.add_argument("--coefficient", help="override the model coefficient")
    v.set_defaults(func=_cmd_verify)

    ce = sub.add_parser("certify", help="run a certification pipeline")
    ce.add_argument("pipeline", choices=("first-range", "dyadic", "large-x",
                                         "theorem-a"))
    ce.add_argument("--m1", help="precomputed m1(1e8) enclosure as LO,HI")
    ce.add_argument("--mu2",
                    help="precomputed sum mu^2/sqrt(j), j<=1e8, as LO,HI")
    ce.set_defaults(func=_cmd_certify)

    st = sub.add_parser("scan-threshold",
                        help="last x with |M(x)| > x / RECIPROCAL")
    st.add_argument("reciprocal", type=exact_int)
    st.add_argument("x_hi", type=exact_int)
    st.add_argument("--stride", type=exact_int,
                    default=summatory.DEFAULT_STRIDE)
    st.add_argument("--checkpoint", help="checkpoint file (resumable)")
    st.set_defaults(func=_cmd_scan_threshold)

    k = sub.add_parser("constants", help="print the analytic constants")
    k.set_defaults(func=_cmd_constants)
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "verify":
        if args.what == "identity" and args.x is None:
            print("verify identity requires --x", file=sys.stderr)
            return 2
        if args.what == "model" and (args.target is None or args.x_to is None):
            print("verify model requires a target and --to", file=sys.stderr)
            return 2
        if args.what in ("envelope", "mn-gap") and args.x_to is None:
            print(f"verify {args.what} requires --to", file=sys.stderr)
            return 2
    ledger = (HypothesisLedger.load(Path(args.ledger).read_text())
              if args.ledger else default_ledger())
    return args.func(args, ledger)


if __name__ == "__main__":
    sys.exit(main())
