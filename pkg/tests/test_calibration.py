import pytest

from densitylab.calibration import (HEADROOM, NAMES, ManifestError, _ceil_sig, calibrate,
                                    default_manifest, load_manifest, parse_manifest)


def test_ceil_sig():
    assert _ceil_sig(0.30651) == 0.3066
    assert _ceil_sig(49.86) == 49.86
    assert _ceil_sig(1234567) == 1235000
    assert _ceil_sig(0) == 0


def test_packaged_manifest_is_complete_and_hashed():
    m = default_manifest()
    assert set(m.constants) == set(NAMES)
    assert m.bound("C_box") == pytest.approx(HEADROOM * m["C_box"])
    assert parse_manifest(m.text()).sha256 == m.sha256


def test_tampered_manifest_rejected(tmp_path):
    text = default_manifest().text().replace("C_box=", "C_box=9")
    with pytest.raises(ManifestError):
        parse_manifest(text)
    p = tmp_path / "m.txt"
    p.write_text(default_manifest().text().replace("seed=", "bogus=1\nseed="))
    with pytest.raises(ManifestError):
        load_manifest(p)


def test_calibration_reproduces_packaged_values():
    # the cheap fitters; the full set is exercised by the CLI calibrate command
    names = ("C_gamma", "C_box", "C_mv", "C_afe_long")
    a = calibrate(names)
    assert a.constants == calibrate(names).constants
    for k in names:
        assert a[k] == default_manifest()[k]
