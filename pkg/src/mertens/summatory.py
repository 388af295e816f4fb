"""Streamed summatory functions of the Moebius and von Mangoldt functions.

Computes M(x), psi(x), N(x), m(x), m1(x), Q(x) and the weighted partial sums
the certification layer consumes.  Integer-valued series (M, Q) are exact;
real-valued series come in two modes:

* ``rigorous`` -- every term is an outward-rounded enclosure, partial sums
  are reduced per stride-sized block with a proven floating-point error
  bound, and blocks are folded with interval additions.  The resulting
  enclosures are certificates.
* ``fast`` -- hardware floats with Neumaier-compensated block folding and a
  reported worst-case error estimate.  For exploration only.

Block boundaries sit at multiples of the checkpoint stride, so results are
bitwise independent of segment size and worker count: parallel runs compute
the same per-block payloads and fold them in the same ascending order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

import numpy as np

from .enclosure import (
    Enclosure,
    log_array_enclosure,
    nudge_down,
    nudge_down_array,
    nudge_up,
    nudge_up_array,
    sqrt_array_enclosure,
    sum_enclosure,
)
from .hypotheses import RootModel
from .sieve import DEFAULT_SEGMENT, Segment, base_primes, sieve_mangoldt, sieve_mobius

__all__ = [
    "DEFAULT_STRIDE",
    "ResourceLimitError",
    "SummatorySeries",
    "ScanReport",
    "scan_ceiling",
    "mertens_scan",
    "q_scan",
    "psi_scan",
    "n_scan",
    "m_scan",
    "m1_at",
    "m_at",
    "weighted_sum",
    "verify_root_model",
    "lambda_sqrt_envelope_check",
    "threshold_scan",
]

DEFAULT_STRIDE = 10_000
_DEFAULT_CEILING = 20_000_000_000
_U = 2.0 ** -53

_INT_KINDS = {"M", "Q"}
_REAL_KINDS = {"psi", "N", "m"}
_WEIGHTED_KINDS = {
    "lambda_over_k",
    "lambda_over_sqrt_k",
    "mu2_over_sqrt",
    "mu2_over_n",
    "absM_log_weight",
}


class ResourceLimitError(RuntimeError):
    """Requested range exceeds the configured scan ceiling."""


def scan_ceiling() -> int:
    return int(os.environ.get("MERTENS_SCAN_CEILING", _DEFAULT_CEILING))


def _check_ceiling(x: int) -> None:
    c = scan_ceiling()
    if x > c:
        raise ResourceLimitError(
            f"x = {x} exceeds the scan ceiling {c}; "
            "raise MERTENS_SCAN_CEILING to override"
        )


@dataclass(frozen=True, slots=True)
class SummatorySeries:
    """Checkpointed values of one summatory function.

    ``checkpoints`` holds (x, value) pairs with strictly increasing x, the
    last being (final_x, final value).  Values are exact ints for kinds M
    and Q, Enclosures otherwise.
    """

    kind: str
    mode: str
    stride: int
    checkpoints: list
    final_x: int

    def __post_init__(self) -> None:
        xs = [x for x, _ in self.checkpoints]
        if xs != sorted(set(xs)):
            raise ValueError("checkpoints must be strictly increasing in x")
        if xs and xs[-1] != self.final_x:
            raise ValueError("last checkpoint must sit at final_x")

    @property
    def final_value(self):
        return self.checkpoints[-1][1]

    def value_at(self, x: int):
        for cx, v in self.checkpoints:
            if cx == x:
                return v
        raise KeyError(f"no checkpoint at x={x}")


@dataclass(frozen=True, slots=True)
class ScanReport:
    """Outcome of an exhaustive envelope verification."""

    x_lo: int
    x_hi: int
    model: object
    max_ratio: Enclosure
    argmax_x: int
    violations: list
    inconclusive: list = field(default_factory=list)

    @property
    def conclusive_pass(self) -> bool:
        return not self.violations and not self.inconclusive


# ---------------------------------------------------------------------------
# Checkpoint files.
# ---------------------------------------------------------------------------

_CKPT_MAGIC = "# summatory-checkpoint v1"


def _ckpt_header(kind: str, stride: int, mode: str) -> str:
    return f"{_CKPT_MAGIC}\nkind {kind}\nstride {stride}\nmode {mode}\n"


def _ckpt_load(path: Path, kind: str, stride: int, mode: str):
    """Return (records, resume_state) from an existing checkpoint file."""
    lines = path.read_text().splitlines()
    if lines[:4] != _ckpt_header(kind, stride, mode).splitlines():
        raise ValueError(
            f"checkpoint file {path} header mismatch: expected "
            f"kind={kind} stride={stride} mode={mode}"
        )
    records = []
    for line in lines[4:]:
        if not line.strip():
            continue
        parts = line.split()
        if parts[0] != "rec":
            raise ValueError(f"bad checkpoint record: {line!r}")
        x = int(parts[1])
        if kind in _INT_KINDS:
            records.append((x, int(parts[2])))
        else:
            records.append((x, tuple(float.fromhex(p) for p in parts[2:])))
    return records


def _ckpt_format(kind: str, x: int, state) -> str:
    if kind in _INT_KINDS:
        return f"rec {x} {state}\n"
    return "rec " + str(x) + " " + " ".join(v.hex() for v in state) + "\n"


class _CkptWriter:
    def __init__(self, path: Optional[Path], kind: str, stride: int, mode: str,
                 fresh: bool):
        self.path = path
        self.kind = kind
        if path is not None and fresh:
            path.write_text(_ckpt_header(kind, stride, mode))

    def write(self, x: int, state) -> None:
        if self.path is not None:
            with self.path.open("a") as fh:
                fh.write(_ckpt_format(self.kind, x, state))


# ---------------------------------------------------------------------------
# Per-segment term generation (top-level so worker processes can pickle it).
# ---------------------------------------------------------------------------


def _sparse_terms(kind: str, lo: int, hi: int):
    """Term positions and enclosure endpoints for n in (lo, hi]."""
    seg = Segment(lo + 1, hi + 1)
    if kind in ("psi", "lambda_over_k", "lambda_over_sqrt_k"):
        blk = sieve_mangoldt(seg)
        ns = blk.n
        llo, lhi = log_array_enclosure(blk.p)
        if kind == "psi":
            return ns, llo, lhi
        if kind == "lambda_over_k":
            d = ns.astype(np.float64)
            return ns, nudge_down_array(llo / d), nudge_up_array(lhi / d)
        slo, shi = sqrt_array_enclosure(ns)
        return ns, nudge_down_array(llo / shi), nudge_up_array(lhi / slo)
    blk = sieve_mobius(seg)
    nz = np.flatnonzero(blk.mu)
    ns = nz.astype(np.int64) + seg.lo
    mu = blk.mu[nz].astype(np.float64)
    if kind == "N":
        llo, lhi = log_array_enclosure(ns)
        return ns, np.where(mu > 0, llo, -lhi), np.where(mu > 0, lhi, -llo)
    if kind == "m":
        inv = 1.0 / ns.astype(np.float64)
        ilo, ihi = nudge_down_array(inv), nudge_up_array(inv)
        return ns, np.where(mu > 0, ilo, -ihi), np.where(mu > 0, ihi, -ilo)
    if kind == "mu2_over_sqrt":
        slo, shi = sqrt_array_enclosure(ns)
        return ns, nudge_down_array(1.0 / shi), nudge_up_array(1.0 / slo)
    if kind == "mu2_over_n":
        inv = 1.0 / ns.astype(np.float64)
        return ns, nudge_down_array(inv), nudge_up_array(inv)
    raise ValueError(f"unknown term kind {kind!r}")


def _block_edges(lo: int, hi: int, stride: int) -> np.ndarray:
    """Right edges of stride-aligned blocks covering (lo, hi]."""
    first = (lo // stride + 1) * stride
    edges = np.arange(first, hi + 1, stride, dtype=np.int64)
    if edges.size == 0 or edges[-1] != hi:
        edges = np.append(edges, hi)
    return edges


def _rigorous_block_payload(args):
    """Per-block (lo, hi) partial sums for one segment, outward rounded."""
    kind, lo, hi, stride = args
    ns, tlo, thi = _sparse_terms(kind, lo, hi)
    edges = _block_edges(lo, hi, stride)
    nb = edges.size
    idx = np.searchsorted(edges, ns, side="left")
    slo = np.bincount(idx, weights=tlo, minlength=nb)
    shi = np.bincount(idx, weights=thi, minlength=nb)
    counts = np.bincount(idx, minlength=nb)
    sabs = np.bincount(idx, weights=np.maximum(np.abs(tlo), np.abs(thi)),
                       minlength=nb)
    # Any-order bound for summing m doubles: (m-1)u against the abs sum.
    # Blocks whose terms are all exactly zero stay exactly zero.
    live = sabs > 0.0
    err = counts * _U * sabs * 1.0625 + np.where(live, 5e-324, 0.0)
    blo = np.where(live, nudge_down_array(slo - err, 2), 0.0)
    bhi = np.where(live, nudge_up_array(shi + err, 2), 0.0)
    return edges, blo, bhi


def _fast_block_payload(args):
    """Per-block (sum, abs sum, count) for one segment, hardware floats."""
    kind, lo, hi, stride = args
    ns, tlo, thi = _sparse_terms(kind, lo, hi)
    mid = 0.5 * (tlo + thi)
    edges = _block_edges(lo, hi, stride)
    nb = edges.size
    idx = np.searchsorted(edges, ns, side="left")
    s = np.bincount(idx, weights=mid, minlength=nb)
    sabs = np.bincount(idx, weights=np.abs(mid), minlength=nb)
    counts = np.bincount(idx, minlength=nb)
    return edges, s, sabs, counts


def _int_block_payload(args):
    """Per-block exact integer partial sums (kinds M and Q)."""
    kind, lo, hi, stride = args
    blk = sieve_mobius(Segment(lo + 1, hi + 1))
    vals = blk.mu.astype(np.int64) if kind == "M" else (blk.mu != 0).astype(np.int64)
    edges = _block_edges(lo, hi, stride)
    nb = edges.size
    ns = np.arange(lo + 1, hi + 1, dtype=np.int64)
    idx = np.searchsorted(edges, ns, side="left")
    return edges, np.bincount(idx, weights=vals, minlength=nb).astype(np.int64)


# ---------------------------------------------------------------------------
# The scan engine.
# ---------------------------------------------------------------------------


def _aligned_segments(start: int, X: int, stride: int, segment_size: int):
    """Stride-aligned (lo, hi] windows from start (a stride multiple) to X."""
    size = max(stride, (segment_size // stride) * stride)
    a = start
    while a < X:
        b = min(a + size, X)
        yield a, b
        a = b


def _map_payloads(fn, jobs, workers):
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            yield from ex.map(fn, jobs, chunksize=1)
    else:
        for job in jobs:
            yield fn(job)


def _scan(kind: str, X: int, stride: int, mode: str, segment_size: int,
          checkpoint_path, workers) -> SummatorySeries:
    if X < 1:
        raise ValueError("X must be >= 1")
    if stride < 1:
        raise ValueError("checkpoint_stride must be >= 1")
    _check_ceiling(X)

    is_int = kind in _INT_KINDS
    path = Path(checkpoint_path) if checkpoint_path else None
    checkpoints: list = []
    start = 0
    if is_int:
        state = 0
    elif mode == "rigorous":
        state = (0.0, 0.0)
    else:
        state = (0.0, 0.0, 0.0)  # Neumaier sum, compensation, error estimate

    if path is not None and path.exists():
        records = _ckpt_load(path, kind, stride, mode)
        for x, st in records:
            if x > X:
                break
            checkpoints.append((x, _state_to_value(kind, mode, st)))
            start, state = x, st
        fresh = False
    else:
        fresh = True
    writer = _CkptWriter(path, kind, stride, mode, fresh)
    if start >= X:
        if not checkpoints or checkpoints[-1][0] != X:
            raise ValueError("checkpoint file extends past requested X off-stride")
        return SummatorySeries(kind, mode, stride, checkpoints, X)
    if start % stride:
        raise ValueError("cannot resume from an off-stride checkpoint")

    jobs = [(kind, lo, hi, stride) for lo, hi in
            _aligned_segments(start, X, stride, segment_size)]
    payload_fn = (_int_block_payload if is_int
                  else _rigorous_block_payload if mode == "rigorous"
                  else _fast_block_payload)

    for payload in _map_payloads(payload_fn, jobs, workers):
        edges = payload[0]
        for i, edge in enumerate(edges.tolist()):
            if is_int:
                state = state + int(payload[1][i])
            elif mode == "rigorous":
                blo, bhi = float(payload[1][i]), float(payload[2][i])
                if blo != 0.0 or bhi != 0.0:
                    state = (nudge_down(state[0] + blo),
                             nudge_up(state[1] + bhi))
            else:
                state = _neumaier_step(state, float(payload[1][i]),
                                       float(payload[2][i]),
                                       int(payload[3][i]))
            if edge % stride == 0 or edge == X:
                checkpoints.append((edge, _state_to_value(kind, mode, state)))
                writer.write(edge, state)
    return SummatorySeries(kind, mode, stride, checkpoints, X)


def _neumaier_step(state, block_sum, block_abs, count):
    s, comp, err = state
    t = s + block_sum
    if abs(s) >= abs(block_sum):
        comp += (s - t) + block_sum
    else:
        comp += (block_sum - t) + s
    err += count * _U * block_abs + 2.0 * _U * (abs(t) + block_abs)
    return (t, comp, err)


def _state_to_value(kind, mode, state):
    if kind in _INT_KINDS:
        return state
    if mode == "rigorous":
        return Enclosure(state[0], state[1])
    s, comp, err = state
    v = s + comp
    return Enclosure(nudge_down(v - err, 2), nudge_up(v + err, 2))


def mertens_scan(X: int, checkpoint_stride: int = DEFAULT_STRIDE, *,
                 segment_size: int = DEFAULT_SEGMENT,
                 checkpoint_path=None, workers: Optional[int] = None
                 ) -> SummatorySeries:
    """Exact M(x) at every checkpoint up to X."""
    return _scan("M", X, checkpoint_stride, "exact", segment_size,
                 checkpoint_path, workers)


def q_scan(X: int, checkpoint_stride: int = DEFAULT_STRIDE, *,
           segment_size: int = DEFAULT_SEGMENT,
           checkpoint_path=None, workers: Optional[int] = None
           ) -> SummatorySeries:
    """Exact squarefree count Q(x) at every checkpoint up to X."""
    return _scan("Q", X, checkpoint_stride, "exact", segment_size,
                 checkpoint_path, workers)


def psi_scan(X: int, checkpoint_stride: int = DEFAULT_STRIDE, *,
             mode: str = "rigorous", segment_size: int = DEFAULT_SEGMENT,
             checkpoint_path=None, workers: Optional[int] = None
             ) -> SummatorySeries:
    """Chebyshev psi(x) = sum of Lambda(n) for n <= x, checkpointed."""
    return _scan("psi", X, checkpoint_stride, mode, segment_size,
                 checkpoint_path, workers)


def n_scan(X: int, checkpoint_stride: int = DEFAULT_STRIDE, *,
           mode: str = "rigorous", segment_size: int = DEFAULT_SEGMENT,
           checkpoint_path=None, workers: Optional[int] = None
           ) -> SummatorySeries:
    """N(x) = sum of mu(n) log n for n <= x, checkpointed."""
    return _scan("N", X, checkpoint_stride, mode, segment_size,
                 checkpoint_path, workers)


def m_scan(X: int, checkpoint_stride: int = DEFAULT_STRIDE, *,
           mode: str = "rigorous", segment_size: int = DEFAULT_SEGMENT,
           checkpoint_path=None, workers: Optional[int] = None
           ) -> SummatorySeries:
    """m(x) = sum of mu(n)/n for n <= x, checkpointed."""
    return _scan("m", X, checkpoint_stride, mode, segment_size,
                 checkpoint_path, workers)


# ---------------------------------------------------------------------------
# Point evaluations and weighted sums.
# ---------------------------------------------------------------------------


def m_at(X: int, *, segment_size: int = DEFAULT_SEGMENT) -> Enclosure:
    """Rigorous enclosure of m(X) = sum of mu(n)/n for n <= X."""
    return m_scan(X, DEFAULT_STRIDE, segment_size=segment_size).final_value


def m1_at(X: int, *, segment_size: int = DEFAULT_SEGMENT) -> Enclosure:
    """Rigorous enclosure of m1(X) = sum of (mu(n)/n)(1 - n/X) for n <= X.

    Each term is mu(n)(X - n)/(nX) with X - n computed exactly and the
    product nX outward rounded; the n = X term vanishes identically.
    """
    if X < 1:
        raise ValueError("X must be >= 1")
    _check_ceiling(X)
    total = Enclosure.zero()
    for lo, hi in _aligned_segments(0, X, segment_size, segment_size):
        blk = sieve_mobius(Segment(lo + 1, hi + 1))
        nz = np.flatnonzero(blk.mu)
        ns = nz.astype(np.int64) + lo + 1
        mu = blk.mu[nz].astype(np.float64)
        num = (X - ns).astype(np.float64)  # exact: |X - n| < 2**53
        keep = num != 0.0
        ns, mu, num = ns[keep], mu[keep], num[keep]
        den = ns.astype(np.float64) * float(X)
        dlo, dhi = nudge_down_array(den), nudge_up_array(den)
        tlo = nudge_down_array(num / dhi)
        thi = nudge_up_array(num / dlo)
        total = total + sum_enclosure(np.where(mu > 0, tlo, -thi),
                                      np.where(mu > 0, thi, -tlo))
    return total


def weighted_sum(kind: str, X: int, *,
                 segment_size: int = DEFAULT_SEGMENT) -> Enclosure:
    """Rigorous enclosure of one of the weighted partial sums up to X."""
    if kind not in _WEIGHTED_KINDS:
        raise ValueError(f"unknown weighted sum kind {kind!r}")
    if X < 1:
        raise ValueError("X must be >= 1")
    _check_ceiling(X)
    if kind == "absM_log_weight":
        total = Enclosure.zero()
        m = 0
        mu = sieve_mobius(Segment(1, X + 1)).mu
        for n in range(1, X + 1):
            m += int(mu[n - 1])
            total = total + abs(m) * (Enclosure.from_int(n + 1).log()
                                      - Enclosure.from_int(n).log())
        return total
    total = Enclosure.zero()
    for lo, hi in _aligned_segments(0, X, segment_size, segment_size):
        _, tlo, thi = _sparse_terms(kind, lo, hi)
        total = total + sum_enclosure(tlo, thi)
    return total


# ---------------------------------------------------------------------------
# Exhaustive envelope verification.
# ---------------------------------------------------------------------------


def _ratio_track(num_lo, num_hi, sqrt_lo, sqrt_hi):
    """Directed per-x enclosures of |f(x)|/sqrt(x) from a diff enclosure."""
    a = np.abs(num_lo)
    b = np.abs(num_hi)
    hi_mag = np.maximum(a, b)
    straddle = (num_lo < 0.0) & (num_hi > 0.0)
    lo_mag = np.where(straddle, 0.0, np.minimum(a, b))
    r_hi = nudge_up_array(hi_mag / sqrt_lo, 2)
    r_lo = np.maximum(nudge_down_array(lo_mag / sqrt_hi, 2), 0.0)
    return r_lo, r_hi


def _report(model, x_lo, x_hi, best_lo, best_hi, argmax, violations, inconclusive):
    return ScanReport(x_lo, x_hi, model,
                      Enclosure(min(best_lo, best_hi), best_hi),
                      argmax, violations, inconclusive)


def verify_root_model(model: RootModel, X_lo: int, X_hi: int, *,
                      segment_size: int = DEFAULT_SEGMENT) -> ScanReport:
    """Exhaustive per-integer check of a root model on [X_lo, X_hi].

    Exact integer targets (M, Q) get a directed-rounding ratio check with an
    exact rational fallback at any inconclusive point, so their verdicts are
    decisive.  The psi target uses per-integer enclosures; a point is a
    violation or a pass only when its enclosure clears the envelope.
    """
    if X_lo < 1 or X_hi < X_lo:
        raise ValueError("need 1 <= X_lo <= X_hi")
    if not model.covers(X_lo, X_hi):
        raise ValueError(
            f"model valid on [{model.x_lo}, {model.x_hi}], "
            f"requested [{X_lo}, {X_hi}]")
    if model.form != "sqrt_upper":
        raise ValueError("scanning supports sqrt-envelope models only")
    _check_ceiling(X_hi)
    if model.target in ("M", "Q_minus_density"):
        return _verify_exact_target(model, X_lo, X_hi, segment_size)
    if model.target == "psi_minus_x":
        return _verify_psi(model, X_lo, X_hi, segment_size)
    raise ValueError(f"per-integer scanning not supported for {model.target!r}")


def _verify_exact_target(model, X_lo, X_hi, segment_size):
    from .enclosure import pi_squared

    c = model.coefficient
    best_lo = best_hi = -1.0
    argmax = X_lo
    violations: list[int] = []
    inconclusive: list[int] = []
    offset = 0
    if model.target == "Q_minus_density":
        dens = 6 / pi_squared()
    for lo, hi in _aligned_segments(0, X_hi, max(segment_size, 1), segment_size):
        blk = sieve_mobius(Segment(lo + 1, hi + 1))
        if model.target == "M":
            vals = blk.mu.astype(np.int64)
        else:
            vals = (blk.mu != 0).astype(np.int64)
        run = offset + np.cumsum(vals)
        offset = int(run[-1])
        xs = np.arange(lo + 1, hi + 1, dtype=np.int64)
        mask = xs >= X_lo
        if not mask.any():
            continue
        xs, run = xs[mask], run[mask]
        xf = xs.astype(np.float64)  # exact below 2**53
        if model.target == "M":
            num_lo = num_hi = run.astype(np.float64)  # exact, |M| small
        else:
            dx_lo = nudge_down_array(dens.lo * xf)
            dx_hi = nudge_up_array(dens.hi * xf)
            num_lo = nudge_down_array(run.astype(np.float64) - dx_hi)
            num_hi = nudge_up_array(run.astype(np.float64) - dx_lo)
        slo, shi = sqrt_array_enclosure(xs)
        r_lo, r_hi = _ratio_track(num_lo, num_hi, slo, shi)
        bad = r_lo > c.hi
        unsure = (r_hi > c.lo) & ~bad
        if model.target == "M" and unsure.any():
            # Exact rational tie-break: |M| <= c sqrt(x) iff M^2 q <= p x
            # with c^2 = p/q.
            for j in np.flatnonzero(unsure):
                x = int(xs[j]); Mx = int(run[j])
                c2lo = Fraction(c.lo) ** 2
                c2hi = Fraction(c.hi) ** 2
                if Fraction(Mx * Mx) <= c2lo * x:
                    unsure[j] = False
                elif Fraction(Mx * Mx) > c2hi * x:
                    unsure[j] = False
                    bad[j] = True
        violations.extend(int(v) for v in xs[bad][:1000])
        inconclusive.extend(int(v) for v in xs[unsure][:1000])
        k = int(np.argmax(r_hi))
        if r_hi[k] > best_hi:
            best_hi = float(r_hi[k]); best_lo = float(r_lo[k])
            argmax = int(xs[k])
    return _report(model, X_lo, X_hi, best_lo, best_hi, argmax,
                   violations, inconclusive)


def _verify_psi(model, X_lo, X_hi, segment_size):
    c = model.coefficient
    best_lo = best_hi = -1.0
    argmax = X_lo
    violations: list[int] = []
    inconclusive: list[int] = []
    offset = Enclosure.zero()
    for lo, hi in _aligned_segments(0, X_hi, max(segment_size, 1), segment_size):
        ns, tlo, thi = _sparse_terms("psi", lo, hi)
        size = hi - lo
        dense_lo = np.zeros(size)
        dense_hi = np.zeros(size)
        pos = ns - lo - 1
        dense_lo[pos] = tlo
        dense_hi[pos] = thi
        cum_lo = np.cumsum(dense_lo) + offset.lo
        cum_hi = np.cumsum(dense_hi) + offset.hi
        # All prefix sums share one conservative rounding budget.
        seg_abs = abs(offset.hi) + float(np.sum(thi))
        eps = (ns.size + 2) * _U * seg_abs * 1.0625 + 5e-324
        xs = np.arange(lo + 1, hi + 1, dtype=np.int64)
        xf = xs.astype(np.float64)
        num_lo = nudge_down_array(cum_lo - eps - xf)
        num_hi = nudge_up_array(cum_hi + eps - xf)
        offset = offset + sum_enclosure(tlo, thi)
        mask = xs >= X_lo
        if mask.any():
            xs_m, nl, nh = xs[mask], num_lo[mask], num_hi[mask]
            slo, shi = sqrt_array_enclosure(xs_m)
            r_lo, r_hi = _ratio_track(nl, nh, slo, shi)
            bad = r_lo > c.hi
            unsure = (r_hi > c.lo) & ~bad
            violations.extend(int(v) for v in xs_m[bad][:1000])
            inconclusive.extend(int(v) for v in xs_m[unsure][:1000])
            k = int(np.argmax(r_hi))
            if r_hi[k] > best_hi:
                best_hi = float(r_hi[k]); best_lo = float(r_lo[k])
                argmax = int(xs_m[k])
    return _report(model, X_lo, X_hi, best_lo, best_hi, argmax,
                   violations, inconclusive)


def lambda_sqrt_envelope_check(X_lo: int, X_hi: int, *, kind: str = "sqrt",
                               segment_size: int = DEFAULT_SEGMENT
                               ) -> ScanReport:
    """Per-integer envelope check on running von Mangoldt sums.

    ``kind="sqrt"`` checks that sum_{k<=X} Lambda(k)/sqrt(k) - 2 sqrt(X)
    stays inside [-5.44 - 0.47 log X, 0.47 log X - 1.19] (needs X_lo >= 11).
    ``kind="harmonic"`` checks sum_{k<=X} Lambda(k)/k <= log X - 0.5
    (needs X_lo >= 300).
    """
    if kind not in ("sqrt", "harmonic"):
        raise ValueError(f"unknown envelope kind {kind!r}")
    min_lo = 11 if kind == "sqrt" else 300
    if X_lo < min_lo or X_hi < X_lo:
        raise ValueError(f"need {min_lo} <= X_lo <= X_hi")
    _check_ceiling(X_hi)
    term_kind = "lambda_over_sqrt_k" if kind == "sqrt" else "lambda_over_k"
    violations: list[int] = []
    inconclusive: list[int] = []
    best_lo = best_hi = -math.inf
    argmax = X_lo
    offset = Enclosure.zero()
    for lo, hi in _aligned_segments(0, X_hi, max(segment_size, 1), segment_size):
        ns, tlo, thi = _sparse_terms(term_kind, lo, hi)
        size = hi - lo
        dense_lo = np.zeros(size)
        dense_hi = np.zeros(size)
        pos = ns - lo - 1
        dense_lo[pos] = tlo
        dense_hi[pos] = thi
        cum_lo = np.cumsum(dense_lo) + offset.lo
        cum_hi = np.cumsum(dense_hi) + offset.hi
        seg_abs = abs(offset.hi) + float(np.sum(thi))
        eps = (ns.size + 2) * _U * seg_abs * 1.0625 + 5e-324
        offset = offset + sum_enclosure(tlo, thi)
        xs = np.arange(lo + 1, hi + 1, dtype=np.int64)
        mask = xs >= X_lo
        if not mask.any():
            continue
        xs = xs[mask]
        s_lo = nudge_down_array(cum_lo[mask] - eps)
        s_hi = nudge_up_array(cum_hi[mask] + eps)
        llo, lhi = log_array_enclosure(xs)
        if kind == "sqrt":
            rlo, rhi = sqrt_array_enclosure(xs)
            d_lo = nudge_down_array(s_lo - nudge_up_array(2.0 * rhi))
            d_hi = nudge_up_array(s_hi - nudge_down_array(2.0 * rlo))
            env_lo_out = nudge_down_array(-5.44 - nudge_up_array(0.47 * lhi))
            env_lo_in = nudge_up_array(-5.44 - nudge_down_array(0.47 * llo))
            env_hi_in = nudge_down_array(nudge_down_array(0.47 * llo) - 1.19)
            env_hi_out = nudge_up_array(nudge_up_array(0.47 * lhi) - 1.19)
            bad = (d_hi < env_lo_out) | (d_lo > env_hi_out)
            sure = (d_lo >= env_lo_in) & (d_hi <= env_hi_in)
            gauge_hi = np.maximum(nudge_up_array(d_hi - env_hi_in),
                                  nudge_up_array(env_lo_in - d_lo))
            gauge_lo = np.maximum(nudge_down_array(d_lo - env_hi_out),
                                  nudge_down_array(env_lo_out - d_hi))
        else:
            env_in = nudge_down_array(llo - 0.5)
            env_out = nudge_up_array(lhi - 0.5)
            bad = s_lo > env_out
            sure = s_hi <= env_in
            gauge_hi = nudge_up_array(s_hi - env_in)
            gauge_lo = nudge_down_array(s_lo - env_out)
        unsure = ~sure & ~bad
        violations.extend(int(v) for v in xs[bad][:1000])
        inconclusive.extend(int(v) for v in xs[unsure][:1000])
        k = int(np.argmax(gauge_hi))
        if float(gauge_hi[k]) > best_hi:
            best_hi = float(gauge_hi[k]); best_lo = float(gauge_lo[k])
            argmax = int(xs[k])
    # max_ratio here gauges slack: the largest signed excursion toward the
    # envelope; negative means everything stayed strictly inside.
    return _report(kind, X_lo, X_hi, best_lo, best_hi, argmax,
                   violations, inconclusive)


# ---------------------------------------------------------------------------
# Exact threshold scan: last crossing of |M(x)| > x / R.
# ---------------------------------------------------------------------------


def threshold_scan(bound_reciprocal: int, X_hi: int, *,
                   checkpoint_stride: int = DEFAULT_STRIDE,
                   segment_size: int = DEFAULT_SEGMENT,
                   checkpoint_path=None) -> Optional[int]:
    """Largest x <= X_hi with |M(x)| * R > x, exactly; None if no crossing.

    Everything is integer arithmetic, so an interrupted-and-resumed run is
    bitwise identical to an uninterrupted one.  Checkpoint records carry
    (x, M(x), last crossing so far) at every stride multiple.
    """
    R = int(bound_reciprocal)
    if R < 1 or X_hi < 1:
        raise ValueError("need bound_reciprocal >= 1 and X_hi >= 1")
    _check_ceiling(X_hi)
    kind = f"Mthr{R}"
    path = Path(checkpoint_path) if checkpoint_path is not None else None
    start, m_off, last = 0, 0, -1
    fresh = True
    if path is not None and path.exists():
        header = _ckpt_header(kind, checkpoint_stride, "exact").splitlines()
        lines = path.read_text().splitlines()
        if lines[:4] != header:
            raise ValueError(
                f"checkpoint file {path} header mismatch: expected "
                f"kind={kind} stride={checkpoint_stride} mode=exact")
        for line in lines[4:]:
            if not line.strip():
                continue
            parts = line.split()
            if parts[0] != "rec" or len(parts) != 4:
                raise ValueError(f"bad checkpoint record: {line!r}")
            x, m, lc = int(parts[1]), int(parts[2]), int(parts[3])
            if x <= X_hi and x % checkpoint_stride == 0 and x > start:
                start, m_off, last = x, m, lc
        fresh = start == 0
    if path is not None and fresh:
        path.write_text(_ckpt_header(kind, checkpoint_stride, "exact"))
    for lo, hi in _aligned_segments(start, X_hi, checkpoint_stride,
                                    segment_size):
        mu = sieve_mobius(Segment(lo + 1, hi + 1)).mu
        csum = np.cumsum(mu, dtype=np.int64) + m_off
        absM = np.abs(csum)
        ns = np.arange(lo + 1, hi + 1, dtype=np.int64)
        if R * int(absM.max(initial=0)) < 2 ** 63:
            crossing = np.flatnonzero(R * absM > ns)
        else:  # overflow-safe fallback for enormous R
            crossing = np.array([i for i in range(hi - lo)
                                 if R * int(absM[i]) > lo + 1 + i])
        if crossing.size:
            last = lo + 1 + int(crossing[-1])
        m_off = int(csum[-1])
        if path is not None and (hi % checkpoint_stride == 0 or hi == X_hi):
            with path.open("a") as fh:
                fh.write(f"rec {hi} {m_off} {last}\n")
    return None if last < 0 else last
