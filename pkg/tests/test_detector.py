import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densitylab.arith import divisor_k
from densitylab.calibration import zero_table
from densitylab.detector import (DetectorConfig, classify_zero, divisor_moment, dyadic_search,
                                 mean_value_check, mollified_coeff_array, mollified_coeffs,
                                 run_detector, witness_from_block)
from densitylab.errors import DetectionFailure, InputDomainError


def test_config_validation():
    with pytest.raises(InputDomainError):
        DetectorConfig(0.6, 0.1, 1e3, 100)
    with pytest.raises(InputDomainError):
        DetectorConfig(0.5, 0.1, 1e3, 600)
    c = DetectorConfig(0.5, 0.3, 1e4, 200)
    assert c.R_len == pytest.approx(1e4 ** 0.045)
    assert c.dyadic_threshold == pytest.approx(1 / (4 * math.log(1e4)))


def test_mollified_coefficients_examples():
    assert mollified_coeffs(10, 3, 6) == -1
    a = mollified_coeff_array(200, 10.5)
    assert a[0] == 1 and a.size == 2100
    assert np.all(a[1:10] == 0)
    # with R < 2 the mollifier is trivial: a_n = 1 for n <= U
    assert np.all(mollified_coeff_array(200, 1.5)[:200] == 1)


@settings(max_examples=40, deadline=None)
@given(U=st.floats(5, 200), R=st.floats(1, 12))
def test_mollified_array_matches_scalar(U, R):
    a = mollified_coeff_array(U, R)
    assert a.size == math.floor(U * R)
    # a_1 = 1 and a_n = 0 for 1 < n <= min(R, U)
    assert a[0] == 1
    assert np.all(a[1:int(min(R, U))] == 0)
    for n in np.linspace(1, a.size, 7).astype(int).tolist():
        assert a[n - 1] == mollified_coeffs(U, R, n)


def test_divisor_moment_exact_and_brute_force():
    assert divisor_moment(1, 2, 0.5) == pytest.approx(43 / 12)
    K, nu, k = 40, 0.3, 2
    d = divisor_k(2 * k, (2 * K) ** k)
    brute = sum(d[n] ** 2 / n ** (2 * (1 - nu)) for n in range(K ** k + 1, (2 * K) ** k + 1))
    assert divisor_moment(k, K, nu) == pytest.approx(brute, rel=1e-10)


def test_mean_value_check():
    assert mean_value_check(np.ones(50), [0.0]) == pytest.approx(50 / 51)
    with pytest.raises(InputDomainError):
        mean_value_check(np.ones(5), [0.0, 0.5])


def test_dyadic_search_at_zeros():
    cfg = DetectorConfig(0.5, 0.3, 1e4, 200)
    tab = zero_table(402.0)
    for g in tab.gammas[(tab.gammas >= 200) & (tab.gammas <= 400)][:10].tolist():
        K, v = dyadic_search(g, cfg)
        assert v >= cfg.dyadic_threshold and K >= cfg.R_len
    with pytest.raises(InputDomainError):
        dyadic_search(100.0, cfg)


def test_identity_residual_small_only_at_zeros():
    cfg = DetectorConfig(0.5, 0.3, 1e4, 200)
    tab = zero_table(402.0)
    at_zero = [classify_zero(g, cfg).details["identity_residual"]
               for g in tab.gammas[(tab.gammas >= 200)][:5].tolist()]
    off_zero = [classify_zero(t, cfg).details["identity_residual"] for t in (250.0, 300.3, 333.3)]
    assert max(at_zero) < 0.1 < 0.5 < min(off_zero)


def test_run_detector_needs_horizon():
    cfg = DetectorConfig(0.5, 0.3, 1e4, 200)
    with pytest.raises(InputDomainError):
        run_detector(cfg, zero_table(100.0))


@pytest.mark.parametrize("K, tag", [(4.0, "case1"), (8.0, "case1"), (30.0, "case2"),
                                    (100.0, "case2")])
def test_witness_branches_reverify(K, tag):
    cfg = DetectorConfig(0.5, 0.1, 1e3, 400)
    tab = zero_table(802.0)
    gam = tab.gammas[(tab.gammas >= 400) & (tab.gammas <= 800)][::6].tolist()
    got = 0
    for g in gam:
        try:
            w = witness_from_block(g, cfg, K)
        except DetectionFailure as e:
            assert e.stage in ("pigeonhole", "case1", "case2")
            continue
        assert w.tag == tag and w.holds
        assert w.reverify() == pytest.approx(w.value, rel=1e-12)
        assert w.value >= w.M ** (-cfg.nu - cfg.eps)
        got += 1
    assert got > 0


def test_witness_rejects_exceptional_K():
    cfg = DetectorConfig(0.5, 0.1, 1e3, 400)
    with pytest.raises(InputDomainError):
        witness_from_block(420.0, cfg, 1.0)


def test_summary_and_csv(tmp_path):
    cfg = DetectorConfig(0.5, 0.3, 1e4, 200)
    run = run_detector(cfg, zero_table(402.0))
    s = run.summary()
    assert s["zeros"] == s["U1"] + s["case1"] + s["case2"] + s["failures"]
    assert s["u1_budget_exponent"] == pytest.approx(2 * 0.5 + 1.5 * 0.3)
    p = tmp_path / "w.csv"
    run.write_csv(p, extra={"config_sha256": "x"})
    lines = p.read_text().splitlines()
    assert lines[0].endswith("config_sha256") and len(lines) == 1 + len(run.witnesses)
