import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from densitylab.calibration import default_manifest
from densitylab.errors import CapacityError, InputDomainError, PoleError
from densitylab.zeta import (chi_factor, em_cutoff, gamma, log_chi, log_gamma,
                             majorant_integral, perron_check, smoothed_mangoldt_residual,
                             theta, zeta_afe, zeta_afe_long, zeta_and_derivative, zeta_grid,
                             zeta_line, zeta_reference)
from densitylab.evaluation import GridSpec

# mpmath.zeta at 30 digits
ZETA = [
    (complex(0.5, 100), complex(2.692619885681324, -0.020386029602598162)),
    (complex(0.3, -1000), complex(-0.9207244943042278, -2.211548152230102)),
    (complex(2, 5), complex(0.850962943624263, 0.09899694613483134)),
    (complex(-0.5, 30), complex(-3.718231902476898, -0.36369536251727547)),
    (complex(0.75, 12345.6), complex(0.7950901030570126, 0.4059967602130511)),
]
# mpmath.loggamma (principal branch)
LOGGAMMA = [
    (complex(0.5, 10), complex(-14.789024734744293, 13.03002003491109)),
    (complex(3, -40), complex(-52.689155060822635, -111.40513241545996)),
    (complex(-0.25, 1000), complex(-1575.058204759991, 5906.5769421537125)),
    (complex(1, 1e4), complex(-15702.439159229774, 82104.1891095919)),
]


@pytest.mark.parametrize("s, ref", ZETA)
def test_zeta_reference_frozen(s, ref):
    assert abs(zeta_reference(s) - ref) < 1e-10 * max(1, abs(ref))


@pytest.mark.parametrize("s, ref", LOGGAMMA)
def test_log_gamma_frozen(s, ref):
    assert abs(log_gamma(s) - ref) < 1e-10 * max(1.0, abs(ref) * 1e-4)


def test_theta_chi_frozen():
    assert theta(10.0) == pytest.approx(-3.0670743962898954, abs=1e-12)
    assert theta(1000.5) == pytest.approx(2035.8139600703494, abs=1e-10)
    assert abs(chi_factor(complex(0.2, 50)) - complex(-1.6480248312712642, -0.868992252699571)) < 1e-11
    assert abs(chi_factor(complex(0.9, -300)) - complex(-0.05053111466442309, -0.20694147342836633)) < 1e-11


def test_zero_of_zeta():
    assert abs(zeta_reference(complex(0.5, 14.134725141734693))) < 1e-12


def test_pole_and_capacity():
    with pytest.raises(PoleError):
        zeta_reference(1)
    with pytest.raises(CapacityError):
        em_cutoff(1e8)
    with pytest.raises(InputDomainError):
        zeta_reference(complex(math.nan, 1))


@settings(max_examples=60, deadline=None)
@given(sigma=st.floats(-0.5, 1.5), t=st.floats(1, 2000), sign=st.sampled_from([-1, 1]))
def test_functional_equation(sigma, t, sign):
    s = complex(sigma, sign * t)
    lhs = zeta_reference(s)
    rhs = chi_factor(s) * zeta_reference(1 - s)
    assert abs(lhs - rhs) <= 1e-8 * max(1.0, abs(lhs))


@settings(max_examples=40, deadline=None)
@given(sigma=st.floats(-0.5, 2), t=st.floats(1, 60))
def test_gamma_reflection(sigma, t):
    s = complex(sigma, t)
    lhs = gamma(s) * gamma(1 - s)
    assert abs(lhs - math.pi / np.sin(math.pi * s)) <= 1e-9 * abs(lhs)


@settings(max_examples=40, deadline=None)
@given(sigma=st.floats(0, 1), t=st.floats(7, 5000))
def test_chi_modulus_on_critical_line(sigma, t):
    # |chi(1/2 + it)| = 1 and |chi(s) chi(1-s)| = 1
    assert abs(chi_factor(complex(0.5, t))) == pytest.approx(1, abs=1e-12)
    s = complex(sigma, t)
    assert abs(chi_factor(s) * chi_factor(1 - s)) == pytest.approx(1, abs=1e-10)
    assert log_chi(s).real == pytest.approx(math.log(abs(chi_factor(s))), abs=1e-10)


def test_afe_within_calibrated_budget():
    m = default_manifest()
    for s in (complex(0.5, 100), complex(0.1, -777.7), complex(0.9, 4321.0)):
        r = zeta_afe(s)
        assert abs(r.value - zeta_reference(s)) <= m.bound("C_afe") * r.error_budget
    with pytest.raises(InputDomainError):
        zeta_afe(complex(0.5, 3))


def test_afe_long():
    m = default_manifest()
    T = 500.0
    s = complex(0.7, 777.0)
    assert abs(zeta_afe_long(s, T) - zeta_reference(s)) <= m.bound("C_afe_long") * T ** -0.7
    with pytest.raises(InputDomainError):
        zeta_afe_long(complex(0.7, 100.0), T)


def test_line_and_grid_agree_with_reference():
    g = GridSpec(990.0, 0.37, 30)
    line = zeta_line(0.6, g.points())
    grid = zeta_grid(0.6, g)
    ref = np.array([zeta_reference(complex(0.6, t)) for t in g.points()])
    assert np.max(np.abs(line - ref)) < 1e-10
    assert np.max(np.abs(grid - ref)) < 1e-10


def test_derivative_by_finite_difference():
    s = complex(0.7, 123.4)
    _, d = zeta_and_derivative(s)
    h = 1e-5
    fd = (zeta_reference(s + h) - zeta_reference(s - h)) / (2 * h)
    assert abs(d - fd) < 1e-6


def test_smoothed_mangoldt_decreases():
    r = [smoothed_mangoldt_residual(complex(1, 1000), Y, 1e4) for Y in (50, 200, 800)]
    assert r[0] > r[1] > r[2]
    with pytest.raises(InputDomainError):
        smoothed_mangoldt_residual(complex(1, 1000), 5, 1e4)


def test_perron_and_majorant_bounded():
    m = default_manifest()
    assert perron_check(0.6, 700.0, 2000.0, 10.0, 17.0) <= m.bound("C_perron")
    v = majorant_integral(0.6, 300.0, 1000.0)
    assert math.isfinite(v) and v > 0
    with pytest.raises(InputDomainError):
        perron_check(0.3, 700.0, 2000.0, 10.0, 17.0)
