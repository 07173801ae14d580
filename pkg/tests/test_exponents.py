from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densitylab.errors import HypothesisError, InputDomainError, ProfileError, StepFailure
from densitylab.exponents import (DH, STRONG_DH, DensityExponentProfile, converse_budget,
                                  induction_verify, load_profile, profile_by_name, q,
                                  recursion_step, rhs_exponent, strong_dh_application)


def test_q_is_exact():
    assert q(0.1) == F(1, 10) and q("3/7") == F(3, 7) and q(2) == 2
    with pytest.raises(InputDomainError):
        q(float("nan"))


def test_profile_validation_and_text_roundtrip(tmp_path):
    with pytest.raises(ProfileError):
        DensityExponentProfile(((0, 1), (1, F(1, 10))))
    with pytest.raises(ProfileError):
        DensityExponentProfile(((0, 0), (F(1, 2), 1), (1, 0)))
    p = STRONG_DH(F(1, 5), F(1, 100))
    path = tmp_path / "p.txt"
    path.write_text(p.to_text())
    back = load_profile(path)
    assert back.breakpoints == p.breakpoints
    with pytest.raises(ProfileError):
        p(F(1, 2))
    with pytest.raises(ProfileError):
        load_profile("0 1 2\n1 0\n")
    assert profile_by_name("DH") == DH()


def test_dh_exponent_examples():
    r = rhs_exponent(F(3, 10), F(1, 1000), DH())
    assert abs(r.exponent - F(3, 5)) <= 2 * F(1, 1000)
    assert r.eps_budget == F(1, 1000) and r.total == r.exponent + r.eps_budget
    assert r.recompute() == r.exponent
    assert rhs_exponent(0, F(1, 100), DH()).exponent == F(3, 200)


@pytest.mark.parametrize("nu", [F(1, 10), F(1, 4), F(2, 5), F(1, 2)])
def test_dh_converges_to_two_nu(nu):
    for eps in (F(1, 100), F(1, 1000), F(1, 10000)):
        assert abs(rhs_exponent(nu, eps, DH()).exponent - 2 * nu) <= 2 * eps


def test_strong_dh_domain_gap_is_an_error():
    with pytest.raises(ProfileError):
        rhs_exponent(F(1, 2), F(1, 100), STRONG_DH(F(1, 5), F(1, 100)))


def test_zero_free_profile_gives_nu_half():
    flat = DensityExponentProfile(((0, 0), (1, 0)))
    r = rhs_exponent(F(2, 5), F(1, 100), flat)
    # alpha = 1 attains nu/2 exactly, so the two branches tie
    assert r.exponent == F(1, 5)


@st.composite
def lattice_profiles(draw):
    k = draw(st.integers(1, 5))
    sig = sorted(set(draw(st.lists(st.integers(1, 999), min_size=k, max_size=k))))
    vals = sorted(draw(st.lists(st.integers(0, 2000), min_size=len(sig) + 1,
                                max_size=len(sig) + 1)), reverse=True)
    pts = [(F(0), F(vals[0], 1000))] + [(F(s, 1000), F(v, 1000)) for s, v in zip(sig, vals[1:])]
    return DensityExponentProfile(tuple(pts) + ((F(1), F(0)),))


@settings(max_examples=60, deadline=None)
@given(lattice_profiles(), st.integers(0, 500), st.integers(0, 300))
def test_vertex_max_equals_dense_grid(profile, nu_k, eps_k):
    nu, eps = F(nu_k, 1000), F(eps_k, 1000)
    rep = rhs_exponent(nu, eps, profile)
    lo = float(1 - nu - eps)
    alpha = np.linspace(lo, 1.0, int(round((1 - lo) * 1e5)) + 1)
    xs = [float(s) for s, _ in profile.breakpoints]
    ys = [float(v) for _, v in profile.breakpoints]
    vals = (alpha - (1 - float(nu))) / 2 + np.interp(alpha, xs, ys)
    dense = max(float(vals.max()), float(nu) / 2)
    assert abs(float(rep.exponent) - dense) <= 1e-9


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 499), st.integers(1, 300), st.integers(1, 100))
def test_rhs_monotone_in_nu_and_eps(nu_k, eps_k, d):
    nu, eps = F(nu_k, 1000), F(eps_k, 1000)
    base = rhs_exponent(nu, eps, DH()).total
    assert rhs_exponent(nu + F(1, 1000), eps, DH()).total >= base
    assert rhs_exponent(nu, eps + F(d, 1000), DH()).total >= base


def test_recursion_step_rules():
    s = recursion_step(F(3, 5), F(1, 20), F(1, 10), F(1, 10))
    assert s.rule == "R2" and s.sigma_next == F(3, 5) + F(19, 100)
    assert s.eta_next == F(1, 400) and s.cost_exponent == F(1, 20)
    assert recursion_step(F(3, 5), F(1, 20), F(1, 30), F(1, 10)).rule == "R3"


def test_induction_passes_and_catches_perturbation():
    tr = induction_verify(F(1, 10), F(1, 20))
    assert tr.passed and tr.J == 500
    tr.raise_for_failure()

    def bad(sigma, eta, beta, eps):
        st_ = recursion_step(sigma, eta, beta, eps)
        if st_.rule == "R3":
            return st_
        return st_._replace(sigma_next=q(sigma) + (2 + q(eps)) * q(beta))

    tr = induction_verify(F(1, 10), F(1, 20), step=bad)
    assert not tr.passed and tr.failures[0]["check"] == "soundness"
    with pytest.raises(StepFailure):
        tr.raise_for_failure()


@pytest.mark.parametrize("eps, eta", [(F(3, 100), F(1, 10)), (F(1, 5), F(1, 50)),
                                      (F(7, 100), F(7, 100))])
def test_induction_grid_points(eps, eta):
    assert induction_verify(eps, eta).passed


def test_strong_dh_application_examples():
    app = strong_dh_application(F(1, 10), lambda x: F(1, 10), F(1, 2))
    assert app.eps0 == F(1, 400) and app.eps_prime == F(1, 24000) and app.delta1 == F(1, 8000)
    assert strong_dh_application(F(1, 10), lambda x: 0, F(1, 2)).delta1 == 0
    with pytest.raises(HypothesisError):
        strong_dh_application(F(1, 10), lambda x: F(-1, 10), F(1, 2))
    app = strong_dh_application(F(1, 100), lambda x: F(1, 10), F(1, 2))
    assert app.sigma_range is not None and len(app.checks) == 2


def test_converse_budget():
    b = converse_budget(F(1, 2), F(1, 5))
    assert b.as_tuple() == (F(13, 10), F(5, 4), F(7, 5))
    assert b.one_spaced <= b.u1 <= b.t1
    assert converse_budget(F(1, 2), F(1, 10 ** 9)).t1 - 1 < F(1, 10 ** 8)
    assert b.k_choice(10.0, 200.0, 1.5, 1e4, 0.3) == 2
    assert b.k_choice(190.0, 200.0, 1.5, 1e4, 0.3) == 1
