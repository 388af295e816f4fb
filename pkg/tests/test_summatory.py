import math
import os
from fractions import Fraction

import mpmath
import numpy as np
import pytest
import sympy

from mertens.enclosure import Enclosure
from mertens.hypotheses import default_ledger
from mertens.sieve import Segment, sieve_mobius
from mertens.summatory import (
    DEFAULT_STRIDE,
    ResourceLimitError,
    lambda_sqrt_envelope_check,
    m1_at,
    m_at,
    m_scan,
    mertens_scan,
    n_scan,
    psi_scan,
    q_scan,
    threshold_scan,
    verify_root_model,
    weighted_sum,
)

mpmath.mp.dps = 50

N_SMALL = 10 ** 4


@pytest.fixture(scope="module")
def mu_small():
    return sieve_mobius(Segment(1, N_SMALL + 1)).mu


def _contains_mp(e: Enclosure, v) -> bool:
    return mpmath.mpf(e.lo) <= v <= mpmath.mpf(e.hi)


def test_mertens_scan_exact_vs_brute(mu_small):
    series = mertens_scan(N_SMALL, 1000)
    csum = np.cumsum(mu_small, dtype=np.int64)
    for x, v in series.checkpoints:
        assert v == int(csum[x - 1])


def test_q_scan_vs_brute(mu_small):
    series = q_scan(N_SMALL, 2500)
    qsum = np.cumsum(mu_small != 0, dtype=np.int64)
    for x, v in series.checkpoints:
        assert v == int(qsum[x - 1])


def test_psi_small_values():
    # psi(10) = 3 log 2 + 2 log 3 + log 5 + log 7
    e = psi_scan(10, 10).final_value
    exact = 3 * mpmath.log(2) + 2 * mpmath.log(3) + mpmath.log(5) + mpmath.log(7)
    assert _contains_mp(e, exact)
    assert e.width < 1e-12
    assert psi_scan(1, 1).final_value.lo == 0.0  # empty sum is exactly zero


def test_n_scan_vs_mpmath(mu_small):
    e = n_scan(N_SMALL, N_SMALL).final_value
    exact = mpmath.fsum(int(mu_small[n - 1]) * mpmath.log(n)
                        for n in range(2, N_SMALL + 1) if mu_small[n - 1])
    assert _contains_mp(e, exact)


def test_m_scan_vs_fraction(mu_small):
    e = m_scan(N_SMALL, N_SMALL).final_value
    exact = sum(Fraction(int(mu_small[n - 1]), n) for n in range(1, N_SMALL + 1))
    assert Fraction(e.lo) <= exact <= Fraction(e.hi)
    assert _contains_mp(m_at(N_SMALL),
                        mpmath.mpf(exact.numerator) / exact.denominator)


def test_m1_vs_fraction(mu_small):
    X = N_SMALL
    e = m1_at(X)
    exact = sum(Fraction(int(mu_small[n - 1]), n) * (1 - Fraction(n, X))
                for n in range(1, X + 1))
    assert Fraction(e.lo) <= exact <= Fraction(e.hi)
    z = m1_at(1)
    assert z.lo == 0.0 and z.hi == 0.0


def test_weighted_sums_vs_oracles(mu_small):
    X = N_SMALL
    e = weighted_sum("mu2_over_sqrt", X)
    exact = mpmath.fsum(1 / mpmath.sqrt(n) for n in range(1, X + 1)
                        if mu_small[n - 1])
    assert _contains_mp(e, exact)
    e = weighted_sum("mu2_over_n", X)
    exact_q = sum(Fraction(1, n) for n in range(1, X + 1) if mu_small[n - 1])
    assert Fraction(e.lo) <= exact_q <= Fraction(e.hi)
    e = weighted_sum("lambda_over_k", X)
    exact = mpmath.fsum(mpmath.log(sympy.primefactors(k)[0]) / k
                        for k in range(2, X + 1)
                        if len(sympy.factorint(k)) == 1)
    assert _contains_mp(e, exact)


def test_parallel_and_segmentation_bitwise_determinism():
    X = 3 * 10 ** 5
    base = psi_scan(X, 10 ** 4)
    for kwargs in (dict(segment_size=1 << 12), dict(workers=3),
                   dict(workers=2, segment_size=1 << 13)):
        other = psi_scan(X, 10 ** 4, **kwargs)
        for (x1, v1), (x2, v2) in zip(base.checkpoints, other.checkpoints):
            assert x1 == x2 and v1.lo == v2.lo and v1.hi == v2.hi


def test_fast_mode_contained_in_rigorous():
    X = 10 ** 5
    rig = m_scan(X, 10 ** 4)
    fast = m_scan(X, 10 ** 4, mode="fast")
    for (x1, r), (x2, f) in zip(rig.checkpoints, fast.checkpoints):
        assert x1 == x2
        assert f.contains_enclosure(r) or r.contains_enclosure(f) or (
            f.lo <= r.hi and r.lo <= f.hi)  # enclosures must overlap
        assert r.lo <= f.mid <= r.hi  # fast value lies inside the certificate


def test_checkpoint_resume_bitwise(tmp_path):
    X = 2 * 10 ** 5
    p1 = tmp_path / "full.ckpt"
    full = n_scan(X, 10 ** 4, checkpoint_path=p1)
    p2 = tmp_path / "resume.ckpt"
    n_scan(10 ** 5, 10 ** 4, checkpoint_path=p2)  # interrupted at 1e5
    resumed = n_scan(X, 10 ** 4, checkpoint_path=p2)
    for (x1, v1), (x2, v2) in zip(full.checkpoints, resumed.checkpoints):
        assert x1 == x2 and v1.lo == v2.lo and v1.hi == v2.hi


def test_checkpoint_header_mismatch_rejected(tmp_path):
    p = tmp_path / "x.ckpt"
    mertens_scan(10 ** 4, 10 ** 3, checkpoint_path=p)
    with pytest.raises(ValueError, match="header mismatch"):
        q_scan(10 ** 4, 10 ** 3, checkpoint_path=p)
    with pytest.raises(ValueError, match="header mismatch"):
        mertens_scan(10 ** 4, 500, checkpoint_path=p)


def test_verify_root_model_passes_and_fails():
    led = default_ledger()
    rep = verify_root_model(led.model("M_sqrt"), 33, 10 ** 5)
    assert rep.conclusive_pass
    assert rep.argmax_x == 199  # the historical tight spot
    from dataclasses import replace
    wide = replace(led.model("M_sqrt"), x_lo=1)
    rep = verify_root_model(wide, 1, 32)
    assert not rep.conclusive_pass
    assert 1 in rep.violations  # |M(1)| = 1 > 0.571


def test_verify_psi_model():
    led = default_ledger()
    rep = verify_root_model(led.model("psi_sqrt"), 11, 10 ** 5)
    assert rep.conclusive_pass


def test_lambda_envelopes_small():
    assert lambda_sqrt_envelope_check(11, 10 ** 5).conclusive_pass
    assert lambda_sqrt_envelope_check(300, 10 ** 5,
                                      kind="harmonic").conclusive_pass


def test_threshold_scan_vs_brute(mu_small):
    csum = np.cumsum(mu_small, dtype=np.int64)
    ns = np.arange(1, N_SMALL + 1, dtype=np.int64)
    for R in (1, 50, 5000):
        idx = np.flatnonzero(R * np.abs(csum) > ns)
        want = int(ns[idx[-1]]) if idx.size else None
        assert threshold_scan(R, N_SMALL) == want


def test_threshold_scan_resume_bitwise(tmp_path):
    p = tmp_path / "thr.ckpt"
    full = threshold_scan(5000, 10 ** 5, checkpoint_path=p)
    text = p.read_text().splitlines(keepends=True)
    p.write_text("".join(text[: 4 + 3]))  # keep header + 3 records
    resumed = threshold_scan(5000, 10 ** 5, checkpoint_path=p)
    assert resumed == full
    assert p.read_text().splitlines()[-1] == text[-1].strip()


def test_scan_ceiling_enforced(monkeypatch):
    monkeypatch.setenv("MERTENS_SCAN_CEILING", "1000")
    with pytest.raises(ResourceLimitError):
        mertens_scan(10 ** 6)
    with pytest.raises(ResourceLimitError):
        m1_at(10 ** 6)
