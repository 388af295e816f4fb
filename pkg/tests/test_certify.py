import json
from fractions import Fraction

import pytest

from mertens import certify as C
from mertens.enclosure import Enclosure
from mertens.hypotheses import default_ledger

# Precomputed rigorous enclosures of the two expensive 1e8-scale inputs
# (reproduced from scratch in the acceptance suite).
M1_1E8 = Enclosure(1.1941642e-06, 1.1941755e-06)
MU2_SQRT_1E8 = Enclosure(12158.5402, 12158.5404)


def test_printed_unit_and_comparison_helpers():
    assert C.printed_unit("5.60e-6") == Fraction("0.01e-6")
    assert C.printed_unit("12158.55") == Fraction("0.01")
    assert C.printed_unit("8.3867e9") == Fraction("1e5")
    assert C.within_one_unit(5.605e-6, "5.61e-6")
    assert not C.within_one_unit(5.59e-6, "5.61e-6")
    assert C.not_exceeding(1.0, "1.0") and not C.not_exceeding(1.1, "1.0")


def test_first_range_pipeline_reproduces_references():
    cn, cm = C.first_range_pipeline(M1_1E8, MU2_SQRT_1E8)
    assert C.not_exceeding(cn.bound, "6.234983e-6", Fraction("1e-11"))
    assert C.not_exceeding(cm.bound, "6.235045e-6", Fraction("1e-11"))
    assert cn.bound.hi > 6.23e-6  # not vacuously small
    assert cn.replay() and cm.replay()
    assert set(cn.hypotheses_used()) == {"psi_sqrt", "M_sqrt"}


def test_first_range_rejects_bad_inputs():
    with pytest.raises(C.PipelineError, match="m1"):
        C.first_range_pipeline(Enclosure(2e-6, 3e-6), MU2_SQRT_1E8)
    with pytest.raises(C.PipelineError, match="12158.55"):
        C.first_range_pipeline(M1_1E8, Enclosure(12158.0, 12159.0))


def test_trace_replay_is_bitwise_stable():
    cn, _ = C.first_range_pipeline(M1_1E8, MU2_SQRT_1E8)
    doc = json.loads(cn.to_json())
    acc = Enclosure.zero()
    for t in doc["trace"]:
        acc = acc + Enclosure(float.fromhex(t["lo"]), float.fromhex(t["hi"]))
    assert acc.lo == float.fromhex(doc["bound_lo"])
    assert acc.hi == float.fromhex(doc["bound_hi"])


def test_dyadic_pipeline_matches_table():
    certs = C.dyadic_pipeline()  # strict mode re-checks every printed value
    assert len(certs) == 9
    for (a, pn, pm), c in zip(C.PRINTED_DYADIC, certs):
        assert c.bound.strictly_below(Fraction(1, 160_383))  # "oui"
        assert C.within_one_unit(c.bound, pm + "e-6")
        assert c.replay()
    # windows plus the first range cover [1e16, 1e19] with overlap
    assert certs[0].x_lo == 2e16 and certs[-1].x_hi == 1e19


def test_n_to_m_gap_monotone_and_guarded():
    sup = Enclosure.from_fraction(Fraction(1, 160_383))
    g16 = C.n_to_m_gap(10 ** 16, sup)
    g18 = C.n_to_m_gap(10 ** 18, sup)
    assert g18.hi < g16.hi
    with pytest.raises(C.PipelineError, match="outside"):
        C.n_to_m_gap(10 ** 16, sup, T=10 ** 17)


def test_dyadic_step_domain():
    sup = Enclosure.from_fraction(Fraction(1, 160_383))
    with pytest.raises(C.PipelineError, match="outside"):
        C.dyadic_step(501, sup)


def test_large_x_iteration_levels_and_floors():
    rows = C.large_x_iteration()
    assert [L for L, _, _ in rows] == list(C.LARGE_X_L_SEQUENCE)
    for (L, n, m), pn, pm in zip(rows, C.PRINTED_LARGE_X_N,
                                 C.PRINTED_LARGE_X_M):
        # every computed bound is at least as strong as the printed one
        assert int(1 / Fraction(n.hi)) >= pn
        assert int(1 / Fraction(m.hi)) >= pm
    assert C.lstar_enclosure().width < 1e-6
    assert C.within_one_unit(C.lstar_enclosure(), "98483")


def test_large_x_level_above_cap_rejected():
    with pytest.raises(C.PipelineError, match="cap"):
        C.large_x_step(200_000)


def test_mu2_sum_bounds_forms():
    out = C.mu2_sum_bounds(10 ** 19, 10 ** 7, 2.35e17)
    assert set(out) == {"harmonic_log7", "sqrt_weighted", "dyadic_tail"}
    for e in out.values():
        assert e.is_positive()
    with pytest.raises(C.PipelineError):
        C.mu2_sum_bounds(10, 100, 50)


def test_theorem_assembly():
    asm = C.theorem_A_assembly(M1_1E8, MU2_SQRT_1E8)
    assert asm.main_constant == 160_383
    assert asm.large_x_constant == 180_194
    assert asm.threshold.hi <= 8.4e9
    assert C.within_one_unit(asm.threshold, "8.3867e9")
    assert asm.coverage_gaps() == []
    for c in asm.certificates:
        assert c.replay()


def test_ramare_crossover_bracket():
    lg = C.ramare_crossover()
    assert 9000 <= lg.lo and lg.hi <= 9100
    assert lg.width < 1e-3


def _all_bounds(led):
    cn, cm = C.first_range_pipeline(M1_1E8, MU2_SQRT_1E8, led, strict=False)
    dy = [c.bound.hi for c in C.dyadic_pipeline(led, strict=False)]
    lx = [m.hi for _, _, m in C.large_x_iteration(led, strict=False)]
    return [cn.bound.hi, cm.bound.hi] + dy + lx


def test_ledger_sweeps_are_monotone():
    base = _all_bounds(default_ledger())
    for name in C.SWEEPABLE:
        up = _all_bounds(default_ledger().perturbed(name, 1.01))
        down = _all_bounds(default_ledger().perturbed(name, 0.99))
        assert all(u >= b for u, b in zip(up, base)), name
        assert all(d <= b for d, b in zip(down, base)), name


def test_gap_constant_rederivation():
    assert C.gap_0227_check().strictly_below(Fraction("0.227"))
