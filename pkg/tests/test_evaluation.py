import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densitylab.arith import divisor_k, mangoldt, mobius, primes_upto
from densitylab.errors import CapacityError, InputDomainError
from densitylab.evaluation import (DirichletBlock, GridSpec, grid_eval, partial_summation_check,
                                   prefix_max_sum, prefix_sums, sieve_coefficients, zeta_sum)


def _factor(n):
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def test_sieves_match_trial_division():
    N = 600
    mu, lam, d3 = mobius(N), mangoldt(N), divisor_k(3, N)
    for n in range(1, N + 1):
        f = _factor(n)
        exp_mu = 0 if any(e > 1 for e in f.values()) else (-1) ** len(f)
        exp_lam = math.log(next(iter(f))) if len(f) == 1 else 0.0
        exp_d3 = math.prod(math.comb(e + 2, 2) for e in f.values())
        assert mu[n] == exp_mu
        assert lam[n] == pytest.approx(exp_lam, abs=1e-15)
        assert d3[n] == exp_d3
    assert primes_upto(30).tolist() == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_zeta_sum_matches_frozen_mpmath_values():
    # mpmath at 30 digits
    v = zeta_sum(DirichletBlock(1, 50, 0.5), 100.0)
    assert abs(v - complex(1.7326594941450666, -0.09440213236933839)) < 1e-12
    v = zeta_sum(DirichletBlock(0, 1000, 0.5), 1e6)
    assert abs(v - complex(1.083761529478085, 2.086519309253298)) < 1e-11


def test_moebius_block_brute_force():
    b = DirichletBlock(0, 300, 1.0, "moebius")
    n = np.arange(1, 301)
    mu = np.array([mobius(300)[k] for k in n], dtype=float)
    direct = np.sum(mu * np.exp(-(1.0 - 77.5j) * np.log(n)))
    assert abs(zeta_sum(b, -77.5) - direct) < 1e-12


def test_block_validation():
    with pytest.raises(InputDomainError):
        DirichletBlock(5, 5, 0.5)
    with pytest.raises(InputDomainError):
        DirichletBlock(-1, 5, 0.5)
    with pytest.raises(InputDomainError):
        DirichletBlock(0, 5, 0.5, "custom", coeffs=[1, 2])
    with pytest.raises(CapacityError):
        DirichletBlock(0, 2e6, 0.5)
    assert len(DirichletBlock(2.5, 3.5, 0)) == 1
    assert zeta_sum(DirichletBlock(2.2, 2.8, 0.5), 3.0) == 0


def test_prefix_sums_and_max():
    b = DirichletBlock(10, 40, 0.7)
    P = prefix_sums(b, 12.5)
    assert P.size == 30
    assert abs(P[-1] - zeta_sum(b, 12.5)) < 1e-13
    y, v = prefix_max_sum(b, 12.5)
    k = int(np.argmax(np.abs(P)))
    assert y == b.n_first + k and v == pytest.approx(abs(P[k]))


def test_sieve_coefficients_kinds():
    assert sieve_coefficients("moebius", 6).tolist() == [1, -1, -1, 0, -1, 1]
    assert sieve_coefficients("von_mangoldt", 4)[3] == pytest.approx(math.log(2))
    with pytest.raises(InputDomainError):
        sieve_coefficients("unit", 3)


@settings(max_examples=40, deadline=None)
@given(lo=st.floats(0, 400), length=st.floats(1, 2500), sigma=st.floats(-0.5, 1.5),
       t0=st.floats(-1e5, 1e5), dt=st.floats(1e-3, 1.0), count=st.integers(1, 300))
def test_grid_eval_equals_pointwise(lo, length, sigma, t0, dt, count):
    block = DirichletBlock(lo, lo + length, sigma)
    grid = GridSpec(t0, dt, count)
    fast = grid_eval(block, grid)
    pts = grid.points()
    for i in {0, count // 2, count - 1}:
        ref = zeta_sum(block, float(pts[i]))
        assert abs(fast[i] - ref) <= 1e-9 * max(1.0, abs(ref))


@settings(max_examples=200, deadline=None)
@given(sigma=st.floats(0.3, 1.2), t=st.floats(-1e4, 1e4), beta=st.floats(-0.5, 0.5),
       m1=st.floats(1, 5000), span=st.floats(1e-3, 3000))
def test_partial_summation_constant_four(sigma, t, beta, m1, span):
    assert partial_summation_check(sigma, t, beta, m1, m1 + span) <= 1.0


def test_conjugate_symmetry():
    b = DirichletBlock(0, 500, 0.6)
    assert abs(zeta_sum(b, -321.0) - zeta_sum(b, 321.0).conjugate()) < 1e-12


def test_grid_validation():
    with pytest.raises(InputDomainError):
        GridSpec(0, 0, 5)
    with pytest.raises(InputDomainError):
        GridSpec(0, 0.1, 0)
    g = GridSpec.spanning(-1, 1, 0.5)
    assert g.count == 5 and g.t_end == 1
