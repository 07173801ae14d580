"""Executable check suites, one per stated inequality or reduction.

Every suite takes a seeded generator and a sample count, runs the relevant
library functions, and returns a JSON-ready dict with at least ``id``,
``passed`` and ``samples``.  Fitted constants come from a manifest and are
used with the standard 1.5x headroom.
"""

from __future__ import annotations

import math
import zlib

import numpy as np

from .calibration import default_manifest, zero_table
from .detector import DetectorConfig, run_detector
from .errors import BranchFailure, ConditioningError, HypothesisError
from .evaluation import partial_summation_check
from .exponents import converse_budget, strong_dh_application
from .large_values import (ScanConfig, afe_reduction, box_bound_report, dichotomy_report,
                           reduce_to_shifted_line)
from .zeros import box_count, nearby_zero, partial_fraction_residual
from .zeta import (chi_factor, log_deriv_zeta, smoothed_mangoldt_residual, zeta_afe,
                   zeta_afe_long, zeta_line, zeta_reference)

LEMMA_IDS = ("2.1", "2.2", "2.3i", "2.3ii", "2.4", "3.1i", "3.1ii", "3.2", "3.3", "4.1",
             "6.1", "eq:lambda", "eq:zeta'", "prop1.1", "prop8.1")


def _rng(lemma_id):
    return np.random.default_rng(zlib.crc32(lemma_id.encode()))


def check_partial_summation(rng, samples=10_000):
    """Ratio LHS / (4 M^beta max prefix) <= 1 with the exact constant 4."""
    worst = 0.0
    for _ in range(samples):
        sigma = rng.uniform(0.4, 1.1)
        beta = rng.uniform(-0.5, 0.5)
        t = rng.uniform(-1e4, 1e4)
        m1 = rng.uniform(1, 1e4 - 1)
        m2 = rng.uniform(m1 + 1e-3, min(1e4, m1 + 2000))
        worst = max(worst, partial_summation_check(sigma, t, beta, m1, m2))
    return {"id": "4.1", "samples": samples, "max_ratio": worst, "passed": worst <= 1.0}


def check_chi_bound(n=50):
    """|chi(sigma+it)| <= 100 (|t|+1)^(1/2-sigma) on an n x n grid of the strip."""
    sig = np.linspace(0, 1, n)
    ts = np.exp(np.linspace(math.log(2 * math.pi), math.log(1e5), n))
    worst = 0.0
    for s in sig.tolist():
        c = np.abs(chi_factor(s + 1j * ts))
        worst = max(worst, float(np.max(c / (100 * (ts + 1) ** (0.5 - s)))))
    return {"id": "eq:chibound", "samples": n * n, "max_ratio": worst, "passed": worst <= 1.0}


def check_afe(rng, samples=30, manifest=None):
    m = manifest or default_manifest()
    worst = 0.0
    for _ in range(samples):
        s = complex(rng.uniform(0, 1), rng.uniform(2 * math.pi, 5e3) * rng.choice([-1, 1]))
        r = zeta_afe(s)
        worst = max(worst, abs(r.value - zeta_reference(s)) / (r.error_budget * m.bound("C_afe")))
    chi = check_chi_bound()
    return {"id": "3.1i", "samples": samples, "max_ratio": worst, "chi_bound": chi,
            "passed": worst <= 1.0 and chi["passed"]}


def check_afe_long(rng, samples=30, manifest=None):
    m = manifest or default_manifest()
    worst = 0.0
    for _ in range(samples):
        T = math.exp(rng.uniform(math.log(5), math.log(3000)))
        s = complex(rng.uniform(0.5, 1.5), rng.uniform(T, 2 * T))
        dev = abs(zeta_afe_long(s, T) - zeta_reference(s))
        worst = max(worst, dev / (m.bound("C_afe_long") * T ** (-s.real)))
    return {"id": "3.1ii", "samples": samples, "max_ratio": worst, "passed": worst <= 1.0}


def check_convexity(n=50, manifest=None):
    m = manifest or default_manifest()
    sig = np.linspace(0, 1, n)
    ts = np.exp(np.linspace(math.log(2 * math.pi), math.log(1e5), n))
    worst = 0.0
    for s in sig.tolist():
        z = np.abs(zeta_line(s, ts))
        worst = max(worst, float(np.max(z / (ts ** ((1 - s) / 2) * np.log(ts)))))
    worst /= m.bound("C_convexity")
    return {"id": "3.2", "samples": n * n, "max_ratio": worst, "passed": worst <= 1.0}


def check_box(U_values=range(0, 1000, 10), manifest=None):
    m = manifest or default_manifest()
    table = zero_table(1002.0)
    worst = max(box_count(table, u) / (m.bound("C_box") * math.log(u + 2)) for u in U_values)
    return {"id": "3.3", "samples": len(U_values), "max_ratio": worst, "passed": worst <= 1.0}


def pinned_fraction_points(n=50):
    """Deterministic (sigma1, u) pairs kept 0.05 away from every zero."""
    table = zero_table(1002.0)
    rng = np.random.default_rng(61)
    pts = []
    while len(pts) < n:
        s1 = float(rng.uniform(-1, 2))
        u = float(rng.uniform(20, 990) * rng.choice([-1, 1]))
        d = np.min(np.abs(complex(s1, abs(u)) - (0.5 + 1j * table.gammas)))
        if d > 0.05:
            pts.append((round(s1, 6), round(u, 6)))
    return pts


def check_partial_fraction(points=None, manifest=None):
    m = manifest or default_manifest()
    table = zero_table(1002.0)
    pts = points or pinned_fraction_points()
    worst = 0.0
    for s1, u in pts:
        r = partial_fraction_residual(table, s1, u)
        worst = max(worst, r / (m.bound("C_zeta_prime_frac") * math.log(abs(u) + 2)))
    return {"id": "eq:zeta'", "samples": len(pts), "max_ratio": worst, "passed": worst <= 1.0}


def check_smoothed_mangoldt(s=complex(1, 1000), Ys=(50, 200, 800), T=1e4, manifest=None):
    m = manifest or default_manifest()
    res = [smoothed_mangoldt_residual(s, Y, T) for Y in Ys]
    ratios = [r / (m.bound("C_mellin") * Y ** (-1 / 3)) for r, Y in zip(res, Ys)]
    decreasing = all(b < a for a, b in zip(res, res[1:]))
    return {"id": "eq:lambda", "samples": len(Ys), "residuals": res, "max_ratio": max(ratios),
            "decreasing": decreasing, "passed": decreasing and max(ratios) <= 1.0}


def check_log_deriv_bound(rng, samples=40, T=1000.0, manifest=None):
    """Without zeros in the box, |zeta'/zeta| is at most the residual budget plus
    the nearby-zero terms, each at most 2 (log log T)^(1/2)."""
    m = manifest or default_manifest()
    table = zero_table(1002.0)
    llt = math.sqrt(math.log(math.log(T)))
    worst, done = 0.0, 0
    while done < samples:
        s1 = rng.uniform(-1, 2)
        u = rng.uniform(10, 990) * rng.choice([-1, 1])
        near = table.gammas[np.abs(table.gammas - abs(u)) <= 1]
        # the box Re >= s1 - 1/(2 sqrt(log log T)), |Im - u| <= 1 must be zero-free
        if near.size and 0.5 >= s1 - 1 / (2 * llt):
            continue
        try:
            ld = abs(log_deriv_zeta(complex(s1, u)))
        except ConditioningError:
            continue
        bound = m.bound("C_zeta_prime_frac") * math.log(abs(u) + 2) + near.size * 2 * llt
        worst = max(worst, ld / bound)
        done += 1
    return {"id": "6.1", "samples": samples, "max_ratio": worst, "passed": worst <= 1.0}


def check_shifted_line(rng, samples=200):
    """Every block above M^-nu on the line 1 yields a prefix above M^eta / 4."""
    nu, eta = 0.3, 0.1
    made, bad = 0, 0
    tried = 0
    while made < samples and tried < 50 * samples:
        tried += 1
        M = float(rng.uniform(10, 200))
        Mp = float(rng.uniform(M + 1, 2 * M))
        t = float(rng.uniform(-5, 5))
        try:
            w = reduce_to_shifted_line(t, nu, eta, M, Mp)
        except HypothesisError:
            continue
        made += 1
        bad += not (w.holds and abs(w.reverify() - w.value) < 1e-9)
    return {"id": "2.1", "samples": made, "attempts": tried, "failures": bad,
            "passed": made > 0 and bad == 0}


def check_dichotomy(sigma=0.6, eta=0.02, T=2000.0, dt=0.05):
    rep = dichotomy_report(sigma, eta, ScanConfig(T=T, dt=dt))
    passed = rep["branch"] == "A" or rep["holds"]
    out = {k: v for k, v in rep.items() if k != "levels"}
    return dict(out, id="2.2", samples=1, passed=bool(passed))


def check_nearby_zero(rng, samples=60, T=1000.0):
    """Points where |zeta| clears T^(1/(log log T)^100) have a zero in their rectangle."""
    height = math.log(T) ** 2 / 4
    table = zero_table(1002.0 + height)
    thr = T ** (1 / math.log(math.log(T)) ** 100)
    lo = math.log(T) ** 2 / 2
    hits = misses = 0
    for _ in range(samples):
        sigma = rng.uniform(0.5, 1)
        t = rng.uniform(lo, T) * rng.choice([-1, 1])
        if abs(zeta_reference(complex(sigma, t))) < thr:
            continue
        if nearby_zero(table, sigma, t, T) is None:
            misses += 1
        else:
            hits += 1
    return {"id": "2.3i", "samples": hits + misses, "threshold": thr, "missing": misses,
            "passed": misses == 0}


def check_box_bound(sigma=0.8, beta=0.05, T=1000.0):
    rep = box_bound_report(zero_table(2002.0), sigma, beta, T)
    return dict(rep, id="2.3ii", samples=1, passed=bool(rep["holds"]))


def check_afe_reduction(rng, samples=20, sigma=0.5, beta=0.05, eps=0.1, T=1000.0):
    """Witnesses from large |zeta| values; produced witnesses must re-verify."""
    t = np.arange(7.0, T, 0.05)
    z = np.abs(zeta_line(sigma, t))
    cand = t[z >= T ** beta]
    pick = rng.choice(cand, size=min(samples, cand.size), replace=False)
    made = fails = bad = 0
    tags = {}
    for x in np.sort(pick).tolist():
        try:
            w = afe_reduction(x, sigma, beta, eps, T)
        except BranchFailure:
            fails += 1
            continue
        made += 1
        tags[w.tag] = tags.get(w.tag, 0) + 1
        bad += not (w.holds and abs(w.reverify() - w.value) < 1e-9)
    return {"id": "2.4", "samples": int(pick.size), "witnesses": made, "branch_failures": fails,
            "tags": tags, "passed": made > 0 and bad == 0}


def check_detector(T=1e4, eps=0.3, nu=0.5, U=200.0):
    cfg = DetectorConfig(nu, eps, T, U)
    run = run_detector(cfg, zero_table(2 * U + 2))
    bad = sum(1 for w in run.witnesses
              if w.tag != "U1" and abs(w.reverify() - w.value) > 1e-9)
    budget = converse_budget(nu, eps)
    return dict(run.summary(), id="prop1.1", samples=len(run.witnesses) + len(run.failures),
                budgets=[str(b) for b in budget.as_tuple()],
                passed=not run.failures and bad == 0)


def check_strong_dh(eps=0.01, delta=0.1, beta_pointwise=0.5):
    app = strong_dh_application(eps, lambda e: delta, beta_pointwise)
    ok = app.delta1 == app.delta_at_eps0 * app.eps0 / 2
    return {"id": "prop8.1", "samples": len(app.checks), "eps0": str(app.eps0),
            "eps_prime": str(app.eps_prime), "delta1": str(app.delta1), "passed": ok}


def run_check(lemma_id: str, samples: int | None = None, manifest=None) -> dict:
    """Run the suite named by ``lemma_id`` (one of LEMMA_IDS)."""
    rng = _rng(lemma_id)
    kw = {} if samples is None else {"samples": samples}
    table = {
        "2.1": lambda: check_shifted_line(rng, **kw),
        "2.2": lambda: check_dichotomy(),
        "2.3i": lambda: check_nearby_zero(rng, **kw),
        "2.3ii": lambda: check_box_bound(),
        "2.4": lambda: check_afe_reduction(rng, **kw),
        "3.1i": lambda: check_afe(rng, manifest=manifest, **kw),
        "3.1ii": lambda: check_afe_long(rng, manifest=manifest, **kw),
        "3.2": lambda: check_convexity(manifest=manifest),
        "3.3": lambda: check_box(manifest=manifest),
        "4.1": lambda: check_partial_summation(rng, **kw),
        "6.1": lambda: check_log_deriv_bound(rng, manifest=manifest, **kw),
        "eq:lambda": lambda: check_smoothed_mangoldt(manifest=manifest),
        "eq:zeta'": lambda: check_partial_fraction(manifest=manifest),
        "prop1.1": lambda: check_detector(),
        "prop8.1": lambda: check_strong_dh(),
    }
    if lemma_id not in table:
        raise KeyError(lemma_id)
    return table[lemma_id]()
