import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densitylab.calibration import zero_table
from densitylab.errors import BranchFailure, HypothesisError, InputDomainError
from densitylab.evaluation import DirichletBlock, zeta_sum
from densitylab.zeta import zeta_line
from densitylab.intervals import IntervalSet
from densitylab.large_values import (ScanConfig, WitnessRecord, afe_reduction, box_bound_report,
                                     dichotomy_report, measure_R, measure_theorem_lhs,
                                     one_spaced_select, r_value_at, reduce_to_shifted_line,
                                     scan_R, scan_theorem_lhs, theorem_lhs_at, theorem_rhs)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.booleans(), min_size=1, max_size=200), st.floats(0.01, 1.0))
def test_from_marks_measure(marks, dt):
    t = np.arange(len(marks)) * dt
    iv = IntervalSet.from_marks(t, marks, dt)
    assert iv.measure == pytest.approx(dt * sum(marks))
    assert iv.contains(t).tolist() == list(marks)


def test_interval_ops(tmp_path):
    iv = IntervalSet(np.array([[0.0, 1.0], [2.0, 4.0]]))
    assert iv.measure == 3
    assert iv.without(0.5, 3).measure == pytest.approx(1.5)
    assert iv.contains([0.5, 1.5, 3.9]).tolist() == [True, False, True]
    with pytest.raises(InputDomainError):
        IntervalSet(np.array([[0.0, 2.0], [1.0, 3.0]]))
    p = tmp_path / "iv.csv"
    iv.write_csv(p, sidecar={"note": "x"}, extra={"h": "abc"})
    assert np.array_equal(IntervalSet.read_csv(p).intervals, iv.intervals)
    assert p.read_bytes().startswith(b"t_lo,t_hi,h\r\n")
    assert (tmp_path / "iv.csv.json").exists()


def _brute_R(sigma, t, T, dyadic):
    # a real A in [a, a+1) with B <= 2A reaches every integer b <= 2a + 1
    n = int(math.sqrt(T))
    best = 0.0
    As = [2 ** j for j in range(20) if 2 ** j < n] if dyadic else range(1, n)
    for A in As:
        for B in range(A + 1, min(2 * A + (not dyadic), n) + 1):
            best = max(best, abs(zeta_sum(DirichletBlock(A, B, sigma), t)))
    return best


@pytest.mark.parametrize("t", [3.3, -41.7, 512.25])
def test_r_value_brute_force(t):
    T = 900.0
    assert r_value_at(0.6, t, T) == pytest.approx(_brute_R(0.6, t, T, True), rel=1e-12)
    assert r_value_at(0.6, t, T, "all_integers") == pytest.approx(_brute_R(0.6, t, T, False),
                                                                  rel=1e-12)


def test_scan_R_pointwise():
    cfg = ScanConfig(T=400.0, dt=0.5)
    t, v = scan_R(0.7, cfg)
    for i in (0, 333, 1600):
        assert v[i] == pytest.approx(r_value_at(0.7, t[i], 400.0), rel=1e-12)


def test_measure_R_monotone_and_policy_nesting():
    cfg = ScanConfig(T=1000.0, dt=0.1)
    low = measure_R(0.6, 0.02, cfg)
    high = measure_R(0.6, 0.1, cfg)
    assert high.measure <= low.measure
    assert np.all(low.contains(high.intervals.mean(axis=1)))
    full = measure_R(0.6, 0.1, ScanConfig(T=1000.0, dt=0.1, M_policy="all_integers"))
    assert full.measure >= high.measure


def test_refined_close_to_grid():
    coarse = measure_R(0.6, 0.05, ScanConfig(T=1000.0, dt=0.1))
    fine = measure_R(0.6, 0.05, ScanConfig(T=1000.0, dt=0.1, refine=True))
    assert abs(fine.measure - coarse.measure) <= coarse.discretization_error


def test_theorem_scan_matches_pointwise():
    cfg = ScanConfig(T=1000.0, dt=0.25, nu=0.4, eps=0.25)
    t, marked = scan_theorem_lhs(cfg)
    idx = np.concatenate([np.flatnonzero(marked)[:5], np.flatnonzero(~marked)[:5]])
    for i in idx.tolist():
        assert theorem_lhs_at(t[i], 0.4, 0.25, 1000.0) == marked[i]
    assert measure_theorem_lhs(cfg).measure == pytest.approx(0.25 * marked.sum())


def test_theorem_rhs_zero_term_vanishes_above_half():
    tab = zero_table(1002.0)
    r = theorem_rhs(1000.0, 0.4, 0.25, tab)
    assert r["zero_term"] == 0 and r["rhs"] == pytest.approx(1000 ** 0.45)


def test_reduce_to_shifted_line():
    w = reduce_to_shifted_line(0.0, 0.4, 0.1, 10, 20)
    assert w.tag == "lemma21" and w.holds
    assert w.reverify() == pytest.approx(w.value, rel=1e-12)
    with pytest.raises(HypothesisError):
        reduce_to_shifted_line(1234.5, 0.0, 0.1, 100, 101)


def test_afe_reduction_small_beta():
    ts = np.arange(100.0, 1000.0, 0.7)
    big = ts[np.abs(zeta_line(0.5, ts)) >= 1000.0 ** 0.05]
    done = 0
    for t in big[:40].tolist():
        try:
            w = afe_reduction(t, 0.5, 0.05, 0.1, 1000.0)
        except (HypothesisError, BranchFailure):
            continue
        assert w.holds and w.reverify() == pytest.approx(w.value, rel=1e-12)
        done += 1
    assert done > 0
    with pytest.raises(InputDomainError):
        afe_reduction(3.0, 0.5, 0.05, 0.1, 1000.0)


def test_reports():
    assert dichotomy_report(0.95, 0.2, ScanConfig(T=1000.0))["branch"] == "A"
    rep = box_bound_report(zero_table(2002.0), 0.8, 0.05, 1000.0)
    assert rep["holds"] and rep["count_N"] > 0


def test_one_spaced_select():
    assert one_spaced_select([0, 0.5, 1.0, 1.7, 2.1, 5]).tolist() == [0, 2, 4, 5]
    with pytest.raises(InputDomainError):
        one_spaced_select([2, 1])


def test_witness_tags():
    with pytest.raises(InputDomainError):
        WitnessRecord(1.0, 1, 2, 1.0, 0.5, "bogus")


def test_scan_config_validation():
    with pytest.raises(InputDomainError):
        ScanConfig(T=1.0)
    with pytest.raises(InputDomainError):
        ScanConfig(T=100.0, nu=0.7)
