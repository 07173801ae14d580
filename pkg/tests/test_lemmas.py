import pytest

from densitylab.calibration import default_manifest
from densitylab.lemmas import LEMMA_IDS, check_partial_summation, run_check


@pytest.mark.parametrize("lemma_id", LEMMA_IDS)
def test_every_suite_passes(lemma_id):
    r = run_check(lemma_id)
    assert r["passed"], r
    assert r["samples"] >= 1


def test_suites_are_seeded():
    assert run_check("4.1", samples=300) == run_check("4.1", samples=300)


def test_tight_manifest_fails_suites():
    m = default_manifest()
    tight = type(m)({k: v / 100 for k, v in m.constants.items()}, m.domains, m.seed)
    assert not run_check("3.3", manifest=tight)["passed"]
    assert not run_check("eq:zeta'", manifest=tight)["passed"]


def test_unknown_id():
    with pytest.raises(KeyError):
        run_check("9.9")


def test_partial_summation_reports_max_ratio():
    import numpy as np
    r = check_partial_summation(np.random.default_rng(0), 500)
    assert 0 < r["max_ratio"] <= 1
