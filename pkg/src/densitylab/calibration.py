"""Fitted constants for the O(1) factors in the error bounds, and their manifest file.

Each constant is the largest observed ratio (deviation / bound shape) over a
seeded sample domain, rounded up to four significant digits.  Checks then
use the constant with 1.5x headroom.  The manifest is a flat ``key=value``
text file whose header carries a sha256 of the body.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ConditioningError, DensityLabError
from .zeta import (gamma, perron_check, smoothed_mangoldt_residual, zeta_afe,
                   zeta_afe_long, zeta_reference)

SEED = 20240917
HEADROOM = 1.5
NAMES = ("C_afe", "C_afe_long", "C_convexity", "C_gamma", "C_zeta_prime_frac", "C_box",
         "C_mellin", "C_perron", "C_mv")

DOMAINS = {
    "C_afe": "60 s: sigma U[0,1], |t| log-U[2pi+1, 2e4], random sign; |afe - ref| / budget",
    "C_afe_long": "40 s: T log-U[10, 3000], t U[T, 2T], sigma U[0.5, 1.5]; |sum - ref| / T^-sigma",
    "C_convexity": "1500 s: sigma U[0,1], |t| log-U[2pi, 1e5]; |zeta| / (|t|^((1-sigma)/2) log|t|)",
    "C_gamma": "1000 w: Re U[-0.5, 3], |Im| U[1, 50]; |Gamma(w)| |w| e^|Im w|",
    "C_zeta_prime_frac": "60 (sigma1, u): sigma1 U[-1, 2], |u| U[10, 1000]; residual / log(|u|+2)",
    "C_box": "2000 U U[0, 2000]; #{gamma in [U, U+1]} / log(U+2)",
    "C_mellin": "20 s = 1 + it, t U[200, 5000], Y = 50, T = 1e4; residual * Y^(1/3)",
    "C_perron": "6 draws at T = 2000: sigma, t, A, B uniform in the admissible ranges",
    "C_mv": "20 draws: N log-U[50, 3000], 10..200 one-spaced points in [0, 10N], +-1 coefficients; "
            "ratio / log(2N)",
}


def _ceil_sig(x, digits=4):
    if x <= 0:
        return 0.0
    e = math.floor(math.log10(x)) - digits + 1
    return float(f"{math.ceil(x / 10.0 ** e) * 10.0 ** e:.{digits}g}")


@lru_cache(maxsize=4)
def zero_table(T):
    from .zeros import find_zeros
    return find_zeros(T)


def _fit_afe(rng):
    out = 0.0
    for _ in range(60):
        sigma = rng.uniform(0, 1)
        t = math.exp(rng.uniform(math.log(2 * math.pi + 1), math.log(2e4))) * rng.choice([-1, 1])
        r = zeta_afe(complex(sigma, t))
        out = max(out, abs(r.value - zeta_reference(complex(sigma, t))) / r.error_budget)
    return out


def _fit_afe_long(rng):
    out = 0.0
    for _ in range(40):
        T = math.exp(rng.uniform(math.log(10), math.log(3000)))
        t = rng.uniform(T, 2 * T)
        sigma = rng.uniform(0.5, 1.5)
        s = complex(sigma, t)
        out = max(out, abs(zeta_afe_long(s, T) - zeta_reference(s)) * T ** sigma)
    return out


def _fit_convexity(rng):
    sig = rng.uniform(0, 1, 1500)
    t = np.exp(rng.uniform(math.log(2 * math.pi), math.log(1e5), 1500))
    out = 0.0
    for a, b in zip(sig.tolist(), t.tolist()):
        z = abs(zeta_reference(complex(a, b)))
        out = max(out, z / (b ** ((1 - a) / 2) * math.log(b)))
    return out


def _fit_gamma(rng):
    re = rng.uniform(-0.5, 3, 1000)
    im = rng.uniform(1, 50, 1000) * rng.choice([-1, 1], 1000)
    w = re + 1j * im
    return float(np.max(np.abs(gamma(w)) * np.abs(w) * np.exp(np.abs(im))))


def _fit_zeta_prime_frac(rng):
    from .zeros import partial_fraction_residual
    table = zero_table(1002.0)
    out, done = 0.0, 0
    while done < 60:
        s1 = rng.uniform(-1, 2)
        u = rng.uniform(10, 1000) * rng.choice([-1, 1])
        try:
            r = partial_fraction_residual(table, s1, u)
        except ConditioningError:
            continue
        out = max(out, r / math.log(abs(u) + 2))
        done += 1
    return out


def _fit_box(rng):
    from .zeros import box_count
    table = zero_table(2002.0)
    U = rng.uniform(0, 2000, 2000)
    return max(box_count(table, u) / math.log(u + 2) for u in U.tolist())


def _fit_mellin(rng):
    out = 0.0
    for _ in range(20):
        t = rng.uniform(200, 5000)
        out = max(out, smoothed_mangoldt_residual(complex(1, t), 50, 1e4) * 50 ** (1 / 3))
    return out


def _fit_perron(rng):
    T = 2000.0
    out = 0.0
    for _ in range(6):
        sigma = rng.uniform(0.5, 1 - 2 / math.log(T))
        t = rng.uniform(T ** ((1 - sigma) / 2), 1500) * rng.choice([-1, 1])
        A = rng.uniform(1, math.sqrt(T) - 1)
        B = rng.uniform(A + 0.5, min(2 * A, 2 * math.sqrt(T)))
        out = max(out, perron_check(sigma, t, T, A, B))
    return out


def _fit_mv(rng):
    from .detector import mean_value_check
    out = 0.0
    for _ in range(20):
        N = int(math.exp(rng.uniform(math.log(50), math.log(3000))))
        k = int(rng.integers(10, 201))
        pts = np.sort(rng.uniform(0, 10 * N, k))
        keep = [pts[0]]
        for p in pts[1:].tolist():
            if p - keep[-1] >= 1:
                keep.append(p)
        a = rng.choice([-1.0, 1.0], N)
        out = max(out, mean_value_check(a, keep) / math.log(2 * N))
    return out


_FITTERS = {
    "C_afe": _fit_afe, "C_afe_long": _fit_afe_long, "C_convexity": _fit_convexity,
    "C_gamma": _fit_gamma, "C_zeta_prime_frac": _fit_zeta_prime_frac, "C_box": _fit_box,
    "C_mellin": _fit_mellin, "C_perron": _fit_perron, "C_mv": _fit_mv,
}


@dataclass(frozen=True)
class Manifest:
    constants: dict
    domains: dict
    seed: int = SEED

    def __getitem__(self, name):
        return self.constants[name]

    def bound(self, name):
        """The constant with the standard headroom applied."""
        return HEADROOM * self.constants[name]

    def body(self) -> str:
        lines = [f"seed={self.seed}"]
        lines += [f"{k}={self.constants[k]!r}" for k in NAMES if k in self.constants]
        lines += [f"domain.{k}={self.domains[k]}" for k in NAMES if k in self.domains]
        return "\n".join(lines) + "\n"

    @property
    def sha256(self) -> str:
        return hashlib.sha256(self.body().encode("utf-8")).hexdigest()

    def text(self) -> str:
        return f"# densitylab calibration manifest\n# sha256={self.sha256}\n" + self.body()

    def write(self, path):
        Path(path).write_text(self.text(), encoding="utf-8")


def calibrate(names=NAMES, seed=SEED) -> Manifest:
    """Fit every requested constant; each one gets its own child seed."""
    consts = {}
    for k, name in enumerate(NAMES):
        if name in names:
            rng = np.random.default_rng([seed, k])
            consts[name] = _ceil_sig(_FITTERS[name](rng))
    return Manifest(consts, {k: DOMAINS[k] for k in consts}, seed)


class ManifestError(DensityLabError, ValueError):
    """A manifest file is malformed or its hash does not match its body."""


def parse_manifest(text: str) -> Manifest:
    lines = text.splitlines()
    digest = None
    body = []
    for ln in lines:
        if ln.startswith("# sha256="):
            digest = ln.split("=", 1)[1].strip()
        elif ln.startswith("#") or not ln.strip():
            continue
        else:
            body.append(ln)
    consts, domains, seed = {}, {}, SEED
    for ln in body:
        if "=" not in ln:
            raise ManifestError(f"malformed manifest line {ln!r}")
        k, v = ln.split("=", 1)
        if k == "seed":
            seed = int(v)
        elif k.startswith("domain."):
            domains[k[7:]] = v
        elif k in NAMES:
            consts[k] = float(v)
        else:
            raise ManifestError(f"unknown manifest key {k!r}")
    m = Manifest(consts, domains, seed)
    if digest is None or digest != m.sha256:
        raise ManifestError("manifest hash does not match its contents")
    return m


def load_manifest(path=None) -> Manifest:
    """Read a manifest file; without a path the packaged one is used."""
    if path is None:
        return default_manifest()
    return parse_manifest(Path(path).read_text(encoding="utf-8"))


@lru_cache(maxsize=1)
def default_manifest() -> Manifest:
    text = resources.files("densitylab").joinpath("data/calibration.txt").read_text("utf-8")
    return parse_manifest(text)
