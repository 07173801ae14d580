"""Zeros of zeta on the critical line: location, tables, counts and local checks.

Zeros are found as sign changes of the Hardy function on a fine grid and
refined by a bracketing root finder.  Throughout the desk range every zero is
taken to lie on the critical line and to be simple; tables record where
they came from.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (ConditioningError, HorizonError, IncompletenessError, InputDomainError,
                     ZeroTableFormatError)
from .evaluation import GridSpec
from .zeta import log_deriv_zeta, theta, zeta_grid, zeta_line

FIND_STEP = 0.05
FIND_T_MAX = 1e6
RVM_SLACK = 3
REFINE_TOL = 1e-9
RH_NOTE = ("RH-verified desk regime: every zero up to the table horizon is taken "
           "on the critical line and simple")


# ---------------------------------------------------------------------------
# Hardy function
# ---------------------------------------------------------------------------

def _rotate(t, z):
    w = np.exp(1j * np.asarray(theta(t))) * z
    resid = np.max(np.abs(np.imag(w)), initial=0.0)
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    if resid > 1e-8 * scale:
        raise ConditioningError(f"Hardy function imaginary residue {resid:.2e}", resid)
    return np.real(w)


def hardy_Z(t):
    """Z(t) = e^{i theta(t)} zeta(1/2 + it), real for t >= 2.  Scalar or array input."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 2) or not np.all(np.isfinite(ta)):
        raise InputDomainError("hardy_Z needs finite t >= 2")
    v = _rotate(ta, zeta_line(0.5, ta))
    return float(v) if v.ndim == 0 else v


def hardy_Z_grid(grid: GridSpec) -> np.ndarray:
    if grid.t0 < 2:
        raise InputDomainError("hardy_Z needs t >= 2")
    return _rotate(grid.points(), zeta_grid(0.5, grid))


# ---------------------------------------------------------------------------
# tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ZeroRecord:
    gamma: float
    source: str  # "computed" or "ingested"


@dataclass(frozen=True)
class ZeroTable:
    """Ascending positive ordinates, complete up to ``t_max``."""

    gammas: np.ndarray = field(repr=False)
    t_max: float
    source: str

    def __post_init__(self):
        g = np.array(self.gammas, dtype=float)
        g.setflags(write=False)
        object.__setattr__(self, "gammas", g)

    def __len__(self):
        return self.gammas.size

    @property
    def records(self):
        return [ZeroRecord(float(g), self.source) for g in self.gammas]

    def count_upto(self, t: float) -> int:
        return int(np.searchsorted(self.gammas, t, side="right"))

    def write(self, path):
        lines = [f"# zeta zero ordinates, source={self.source}, t_max={self.t_max!r}"]
        lines += [repr(float(g)) for g in self.gammas]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def rvm_main_term(t):
    """theta(t)/pi + 1, the smooth part of the zero counting function."""
    return np.asarray(theta(t)) / math.pi + 1


def check_completeness(gammas: np.ndarray, t_max: float, slack: float = RVM_SLACK):
    """Compare the counting function with theta/pi + 1 just below and at every zero and at t_max.

    Raises IncompletenessError on the first interval where they drift apart
    by more than ``slack``.
    """
    if gammas.size == 0 and t_max < 14:
        return
    probes = np.concatenate([gammas, [t_max]]) if t_max >= 2 else gammas
    main = rvm_main_term(np.maximum(probes, 2.0))
    k = np.arange(probes.size, dtype=float)
    below = k - main[: probes.size]  # count just below each zero (and at t_max)
    at = below + 1
    if probes.size > gammas.size:
        at[-1] = below[-1]  # the t_max probe is not itself a zero
    dev = np.maximum(np.abs(below), np.abs(at))
    bad = np.flatnonzero(dev > slack)
    if bad.size:
        j = int(bad[0])
        lo = float(probes[j - 1]) if j else 0.0
        hi = float(probes[j])
        deficit = float(-below[j] if abs(below[j]) >= abs(at[j]) else -at[j])
        raise IncompletenessError(
            f"zero count deviates from theta/pi + 1 by {abs(deficit):.2f} on [{lo:.6f}, {hi:.6f}]",
            (lo, hi), deficit)


def _refine(a, b, za, zb, tol=REFINE_TOL, max_iter=100):
    """Vectorized Illinois false position on brackets with za * zb < 0.

    Each iterate is paired with a probe a fraction of ``tol`` further on, so
    a converged iterate closes its bracket at once instead of creeping up on
    the root from one side.
    """
    a, b, za, zb = (np.array(x, dtype=float) for x in (a, b, za, zb))
    side = np.zeros(a.size, dtype=int)
    for _ in range(max_iter):
        idx = np.flatnonzero((b - a) > tol)
        if idx.size == 0:
            break
        ai, bi, zai, zbi = a[idx], b[idx], za[idx], zb[idx]
        c = (ai * zbi - bi * zai) / (zbi - zai)
        bad = ~((c > ai) & (c < bi))
        c[bad] = 0.5 * (ai[bad] + bi[bad])
        toward_b = (bi - c) > (c - ai)
        d = np.clip(c + np.where(toward_b, 0.4, -0.4) * tol, ai, bi)
        zc, zd = np.split(hardy_Z(np.concatenate([c, d])), 2)
        for x, zx in ((c, zc), (d, zd)):
            ai, bi, zai, zbi = a[idx], b[idx], za[idx], zb[idx]
            inside = (x > ai) & (x < bi)
            hit = inside & (zx == 0)
            left = inside & ~hit & (np.sign(zx) == np.sign(zai))
            right = inside & ~hit & ~left
            j = idx[left]
            a[j], za[j] = x[left], zx[left]
            zb[j] = np.where(side[j] == 1, zb[j] / 2, zb[j])
            side[j] = 1
            j = idx[right]
            b[j], zb[j] = x[right], zx[right]
            za[j] = np.where(side[j] == -1, za[j] / 2, za[j])
            side[j] = -1
            j = idx[hit]
            a[j] = b[j] = x[hit]
    return 0.5 * (a + b), b - a


def _sign_change_brackets(t, z):
    s = np.sign(z)
    k = np.flatnonzero(s[:-1] * s[1:] < 0)
    return k


def _lehmer_candidates(z):
    """Grid indices where |Z| dips without a sign change (possible close pair)."""
    if z.size < 3:
        return np.zeros(0, dtype=int)
    a, m, b = z[:-2], z[1:-1], z[2:]
    same = (np.sign(a) == np.sign(m)) & (np.sign(m) == np.sign(b))
    dip = (np.abs(m) < np.abs(a)) & (np.abs(m) < np.abs(b))
    return np.flatnonzero(same & dip) + 1


def find_zeros(T: float, t_start: float = 10.0, step: float = FIND_STEP) -> ZeroTable:
    """All zero ordinates in [t_start, T] (none lie below 14).

    Sign changes on a grid of ``step``, plus a 32-fold local resampling
    wherever |Z| has a local dip without a sign change, then bracketing to
    1e-9.  The result is checked against theta(t)/pi + 1.
    """
    if not 10 <= T <= FIND_T_MAX:
        raise InputDomainError(f"T must lie in [10, {FIND_T_MAX:g}]")
    grid = GridSpec.spanning(t_start, T, step)
    t = grid.points()
    z = hardy_Z_grid(grid)
    k = _sign_change_brackets(t, z)
    lo, hi, zlo, zhi = [t[k]], [t[k + 1]], [z[k]], [z[k + 1]]
    dips = _lehmer_candidates(z)
    if dips.size:
        tt = np.linspace(t[dips - 1], t[dips + 1], 65, axis=1)
        zz = hardy_Z(tt.ravel()).reshape(tt.shape)
        r, kk = np.nonzero(np.sign(zz[:, :-1]) * np.sign(zz[:, 1:]) < 0)
        lo.append(tt[r, kk]); hi.append(tt[r, kk + 1])
        zlo.append(zz[r, kk]); zhi.append(zz[r, kk + 1])
    lo, hi, zlo, zhi = (np.concatenate(x) for x in (lo, hi, zlo, zhi))
    order = np.argsort(lo)
    lo, hi, zlo, zhi = lo[order], hi[order], zlo[order], zhi[order]
    gam, _ = _refine(lo, hi, zlo, zhi)
    # a dip refinement can re-find a bracket already found on the coarse grid
    gam = np.unique(np.round(gam, 10))
    if t[-1] < T:
        zt = hardy_Z(np.array([t[-1], T]))
        if zt[0] * zt[1] < 0:
            extra, _ = _refine([t[-1]], [T], [zt[0]], [zt[1]])
            gam = np.append(gam, extra)
    gam = gam[gam <= T]
    check_completeness(gam, T)
    return ZeroTable(gam, float(T), "computed")


def ingest_zeros(path) -> ZeroTable:
    """Read a zero table: one ascending positive decimal per line, ``#`` comments.

    The horizon of an ingested table is its last ordinate.
    """
    vals = []
    prev = -math.inf
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            v = float(line)
        except ValueError:
            raise ZeroTableFormatError(f"not a decimal number: {line!r}", lineno)
        if not math.isfinite(v) or v <= 0:
            raise ZeroTableFormatError("ordinate must be positive", lineno)
        if v <= prev:
            raise ZeroTableFormatError("ordinates must strictly increase", lineno)
        vals.append(v)
        prev = v
    g = np.array(vals, dtype=float)
    t_max = float(g[-1]) if g.size else 0.0
    check_completeness(g, t_max)
    return ZeroTable(g, t_max, "ingested")


# ---------------------------------------------------------------------------
# counts and local checks
# ---------------------------------------------------------------------------

class ZeroCount(int):
    """An int that carries the regime assumption behind it."""

    note: str

    def __new__(cls, value, note=RH_NOTE):
        obj = super().__new__(cls, value)
        obj.note = note
        return obj


def _horizon(table, t):
    if t > table.t_max:
        raise HorizonError(f"{t:g} exceeds the zero table horizon {table.t_max:g}")


def count_N(table: ZeroTable, sigma: float, T: float) -> ZeroCount:
    """#{rho : Re rho >= sigma, |Im rho| <= T}: 2 #{gamma <= T} for sigma <= 1/2, else 0."""
    _horizon(table, T)
    if sigma > 0.5:
        return ZeroCount(0)
    return ZeroCount(2 * table.count_upto(T))


def box_count(table: ZeroTable, U: float) -> int:
    """#{gamma in [U, U+1]}."""
    _horizon(table, U + 1)
    g = table.gammas
    return int(np.searchsorted(g, U + 1, side="right") - np.searchsorted(g, U, side="left"))


def partial_fraction_residual(table: ZeroTable, sigma1: float, u: float) -> float:
    """|zeta'/zeta(s) - sum_{|Im rho - u| <= 1} 1/(s - rho)| at s = sigma1 + iu."""
    if not -1 <= sigma1 <= 2:
        raise InputDomainError("sigma1 must lie in [-1, 2]")
    if abs(u) < 2:
        raise InputDomainError("|u| must be at least 2")
    _horizon(table, abs(u) + 1)
    g = table.gammas
    # zeros are 1/2 +- i gamma; for u < 0 the relevant ones are the conjugates
    sel = g[(g >= abs(u) - 1) & (g <= abs(u) + 1)]
    ims = sel if u > 0 else -sel
    s = complex(sigma1, u)
    rho = 0.5 + 1j * ims
    if ims.size and np.min(np.abs(s - rho)) <= 1e-3:
        d = float(np.min(np.abs(s - rho)))
        raise ConditioningError(f"s lies within {d:.2e} of a zero", d)
    return abs(log_deriv_zeta(s) - complex(np.sum(1.0 / (s - rho))))


def nearby_zero(table: ZeroTable, sigma: float, t: float, T: float):
    """A zero in {Re rho >= sigma - (log log T)^(-1/2), |Im rho - t| <= (log T)^2/4}, or None.

    The nearest such zero is returned.  The rectangle must lie within the
    table horizon.
    """
    if not 0.5 <= sigma <= 1:
        raise InputDomainError("sigma must lie in [1/2, 1]")
    if T <= math.e or abs(t) > T:
        raise InputDomainError("need T > e and |t| <= T")
    height = math.log(T) ** 2 / 4
    _horizon(table, abs(t) + height)
    if 0.5 < sigma - 1 / math.sqrt(math.log(math.log(T))):
        return None
    g = table.gammas
    ims = np.concatenate([-g[::-1], g])
    near = ims[np.abs(ims - t) <= height]
    if near.size == 0:
        return None
    best = float(near[np.argmin(np.abs(near - t))])
    return ZeroRecord(abs(best), table.source)
