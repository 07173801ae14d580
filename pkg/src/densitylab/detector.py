"""Zero detection with a Moebius mollifier, down to explicit zeta-sum witnesses.

For a zero rho with |gamma| in [U, 2U], the product zeta(s) R(s) with
R(s) = sum_{r <= R} mu(r) r^{-s} has coefficients a_n that vanish for
1 < n <= R, so its tail is forced to be large at rho.  The pipeline finds a
dyadic block of that tail which is large, then either files the zero in the
exceptional class U1 or converts the block into a short zeta sum on the
line 1 that is large at gamma.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .arith import divisor_k, mobius
from .errors import CapacityError, DetectionFailure, InputDomainError
from .evaluation import DirichletBlock, prefix_max_sum, zeta_sum
from .large_values import WitnessRecord
from .zeros import ZeroTable
from .zeta import chi_factor

MOMENT_LIMIT = 10_000_000
MV_LIMIT = 100_000


@dataclass(frozen=True)
class DetectorConfig:
    nu: float
    eps: float
    T: float
    U: float
    beta: float = 0.5  # real part assumed for every zero in range

    def __post_init__(self):
        if not 0 < self.nu <= 0.5:
            raise InputDomainError("nu must lie in (0, 1/2]")
        if not self.eps > 0:
            raise InputDomainError("eps must be positive")
        if not self.T >= 3:
            raise InputDomainError("T must be at least 3")
        if not 1 <= self.U <= self.T / 2:
            raise InputDomainError("U must lie in [1, T/2]")
        if not 0 < self.beta <= 1:
            raise InputDomainError("beta must lie in (0, 1]")

    @property
    def R_len(self) -> float:
        return self.T ** (self.eps ** 2 / 2)

    @property
    def logT(self) -> float:
        return math.log(self.T)

    @property
    def dyadic_threshold(self) -> float:
        return 1 / (4 * self.logT)

    @property
    def u1_low(self) -> float:
        return self.R_len * self.T ** self.eps

    @property
    def u1_high(self) -> float:
        return self.U * self.T ** (-self.eps)


# ---------------------------------------------------------------------------
# mollified coefficients
# ---------------------------------------------------------------------------

def mollified_coeffs(U: float, R: float, n: int) -> int:
    """a_n = sum over r | n with r <= R and n/r <= U of mu(r)."""
    if not (isinstance(n, (int, np.integer)) and 1 <= n <= U * R):
        raise InputDomainError(f"n must be an integer in [1, U*R], got {n!r}")
    mu = mobius(max(1, int(math.floor(R))))
    total = 0
    for r in range(1, int(math.floor(R)) + 1):
        if n % r == 0 and n // r <= U:
            total += int(mu[r])
    return total


def mollified_coeff_array(U: float, R: float) -> np.ndarray:
    """a_1 .. a_{floor(U R)} (index 0 holds a_1)."""
    n_max = int(math.floor(U * R))
    r_max = int(math.floor(R))
    l_max = int(math.floor(U))
    a = np.zeros(n_max + 1, dtype=np.int64)
    mu = mobius(max(1, r_max))
    for r in range(1, r_max + 1):
        if mu[r] != 0:
            a[r:r * l_max + 1:r] += int(mu[r])
    return a[1:]


# ---------------------------------------------------------------------------
# the pipeline
# ---------------------------------------------------------------------------

@dataclass
class _ZeroState:
    gamma: float
    prefix: np.ndarray  # running sums of a_n n^{-beta - i gamma}, prefix[n] over m <= n
    details: dict = field(default_factory=dict)

    def block(self, lo, hi):
        n = self.prefix.size - 1
        a, b = min(n, int(math.floor(lo))), min(n, int(math.floor(hi)))
        return self.prefix[b] - self.prefix[a]


def _mollified_prefix(gamma, config, coeffs):
    lhi, llo = _kernels.logs(1, coeffs.size)
    w = coeffs * np.exp(-config.beta * lhi)
    terms = _kernels.cis(_kernels._phases(float(gamma), lhi, llo)) * w
    return np.concatenate([[0j], np.cumsum(terms)])


def _state(gamma, config, coeffs=None):
    if not config.U <= abs(gamma) <= 2 * config.U:
        raise InputDomainError(f"|gamma| = {abs(gamma):g} outside [U, 2U]")
    if coeffs is None:
        coeffs = mollified_coeff_array(config.U, config.R_len)
    return _ZeroState(float(gamma), _mollified_prefix(gamma, config, coeffs))


def dyadic_search(gamma: float, config: DetectorConfig, coeffs=None, state=None):
    """First K = 2^k R in [R, U R] whose block (K, 2K] of the mollified tail
    reaches 1/(4 log T).  Returns (K, |block|).

    The tail over (R, U R] must first be at least 1/2 in modulus; at a zero
    this is what makes some dyadic block large.
    """
    st = state or _state(gamma, config, coeffs)
    R, U = config.R_len, config.U
    total = st.block(R, U * R)
    st.details["tail"] = abs(total)
    st.details["identity_residual"] = abs(1 + total)  # |sum_{n <= UR} a_n n^-rho|
    if abs(total) < 0.5:
        raise DetectionFailure("identity", "mollified tail below 1/2 at this zero",
                               {"gamma": gamma, "tail": abs(total),
                                "identity_residual": abs(1 + total)})
    thr = config.dyadic_threshold
    K = R
    blocks = []
    while K < U * R:
        v = abs(st.block(K, 2 * K))
        blocks.append((K, v))
        if v >= thr:
            st.details["dyadic_blocks"] = blocks
            return K, v
        K *= 2
    raise DetectionFailure("dyadic", "no dyadic block reaches 1/(4 log T)",
                           {"gamma": gamma, "blocks": blocks, "threshold": thr})


def _ell_block(gamma, beta, lo, hi, U):
    hi = min(hi, U)
    if math.floor(hi) <= math.floor(lo):
        return 0.0
    return abs(zeta_sum(DirichletBlock(lo, hi, beta), gamma))


def _best_line1_block(gamma, y_values, exponent):
    """Over y in ``y_values``, the prefix (y, y'] maximizing value / y^-exponent."""
    best = None
    for y in y_values:
        yp, v = prefix_max_sum(DirichletBlock(y, 2 * y, 1.0), gamma)
        ratio = v / y ** (-exponent)
        if best is None or ratio > best[3]:
            best = (y, yp, v, ratio)
    return best


def classify_zero(gamma: float, config: DetectorConfig, table: ZeroTable | None = None,
                  coeffs=None) -> WitnessRecord:
    """Run the pipeline at one zero and return its witness (or a U1 record).

    ``table`` only serves as a horizon check.  Every failing stage raises
    DetectionFailure with the intermediate values.
    """
    if table is not None and abs(gamma) > table.t_max:
        raise InputDomainError("gamma beyond the zero table horizon")
    st = _state(gamma, config, coeffs)
    K, kval = dyadic_search(gamma, config, state=st)
    base = dict(st.details, K=K, dyadic_value=kval)
    if K <= config.u1_low or K >= config.u1_high:
        return WitnessRecord(gamma, math.nan, math.nan, kval, config.dyadic_threshold, "U1",
                             K=K, details=base)
    return witness_from_block(gamma, config, K, base)


def witness_from_block(gamma: float, config: DetectorConfig, K: float,
                       details: dict | None = None) -> WitnessRecord:
    """Turn a large dyadic block (K, 2K] at a zero into a line-1 witness.

    K must lie strictly between R T^eps and U T^-eps.  This is the part of
    ``classify_zero`` after the dyadic search.
    """
    if not config.u1_low < K < config.u1_high:
        raise InputDomainError("K is in the exceptional range")
    T, eps, nu, beta = config.T, config.eps, config.nu, config.beta
    R, U = config.R_len, config.U
    base = dict(details or {}, K=K)
    # pigeonhole over r: the largest weighted ell-block
    cands = []
    for r in range(1, int(math.floor(R)) + 1):
        v = _ell_block(gamma, beta, K / r, 2 * K / r, U)
        cands.append((r ** (-beta) * v, r, v))
    _, r, lval = max(cands)
    ell_thr = r ** (beta - 1) / (8 * config.logT ** 2)
    base.update(r=r, ell_value=lval, ell_threshold=ell_thr,
                ell_margin_1600=lval / (1600 * T ** (-eps ** 2 / 2)))
    if lval < ell_thr:
        raise DetectionFailure("pigeonhole", "no r gives an ell-block above r^(beta-1)/(8 log^2 T)",
                               dict(base, gamma=gamma))
    L = K / r
    exponent = nu + eps
    if L <= math.sqrt(T) / 2:
        # partial summation from the line beta up to the line 1
        yp, v = prefix_max_sum(DirichletBlock(L, 2 * L, 1.0), gamma)
        thr = L ** (-exponent)
        base["method"] = "partial_summation"
        if v < thr:
            ys = _dyadic_lattice(T ** eps, math.sqrt(T) / 2)
            y, yp, v, _ = _best_line1_block(gamma, ys, exponent) if ys else (L, yp, v, 0)
            L, thr = y, y ** (-exponent)
            base["method"] = "direct_search"
        if v < thr:
            raise DetectionFailure("case1", "no line-1 block reaches y^(-nu-eps)",
                                   dict(base, gamma=gamma, value=v, threshold=thr))
        return WitnessRecord(gamma, float(L), float(yp), v, thr, "case1", 1.0, K=K, r=r,
                             details=base)
    # Case 2: flip the ell-block through the functional equation
    lo_n, hi_n = abs(gamma) / (4 * math.pi * L), abs(gamma) / (2 * math.pi * L)
    dual = abs(zeta_sum(DirichletBlock(lo_n, hi_n, 1 - beta), -gamma)) if hi_n >= 1 else 0.0
    base.update(dual_value=dual, chi_abs=abs(chi_factor(complex(beta, gamma))),
                dual_range=(lo_n, hi_n))
    ys = _dyadic_lattice(T ** eps, U / (2 * math.sqrt(T)))
    if not ys:
        raise DetectionFailure("case2", "empty y-range [T^eps, U/(2 T^(1/2))]",
                               dict(base, gamma=gamma))
    y, yp, v, ratio = _best_line1_block(gamma, ys, exponent)
    thr = y ** (-exponent)
    base["method"] = "dyadic_lattice"
    if v < thr:
        raise DetectionFailure("case2", "no lattice block reaches y^(-nu-eps)",
                               dict(base, gamma=gamma, value=v, threshold=thr))
    return WitnessRecord(gamma, float(y), float(yp), v, thr, "case2", 1.0, K=K, r=r,
                         details=base)


def _dyadic_lattice(lo, hi):
    out = []
    y = lo
    while y <= hi:
        out.append(y)
        y *= 2
    return out


@dataclass
class DetectionRun:
    config: DetectorConfig
    witnesses: list
    failures: list

    @property
    def n_u1(self):
        return sum(1 for w in self.witnesses if w.tag == "U1")

    def summary(self) -> dict:
        c = self.config
        n = len(self.witnesses) + len(self.failures)
        budget = 2 * c.nu + 1.5 * c.eps
        return {
            "zeros": n,
            "U1": self.n_u1,
            "case1": sum(1 for w in self.witnesses if w.tag == "case1"),
            "case2": sum(1 for w in self.witnesses if w.tag == "case2"),
            "failures": len(self.failures),
            "u1_fraction": self.n_u1 / n if n else 0.0,
            "u1_budget_exponent": budget,
            "u1_budget_constant": self.n_u1 / c.U ** budget,
            "R": c.R_len,
        }

    def write_csv(self, path, extra: dict | None = None):
        extra = dict(extra or {})
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["gamma", "tag", "K", "r", "M", "M_prime", "value", "threshold", *extra])
            for x in self.witnesses:
                w.writerow([repr(x.t_or_gamma), x.tag, repr(x.K), "" if x.r is None else x.r,
                            "" if x.tag == "U1" else repr(x.M),
                            "" if x.tag == "U1" else repr(x.M_prime),
                            repr(x.value), repr(x.threshold), *extra.values()])


def run_detector(config: DetectorConfig, table: ZeroTable) -> DetectionRun:
    """classify_zero over every zero of ``table`` with gamma in [U, 2U]."""
    if 2 * config.U > table.t_max:
        raise InputDomainError("zero table does not reach 2U")
    coeffs = mollified_coeff_array(config.U, config.R_len)
    g = table.gammas
    sel = g[(g >= config.U) & (g <= 2 * config.U)]
    wits, fails = [], []
    for gamma in sel.tolist():
        try:
            wits.append(classify_zero(gamma, config, table, coeffs))
        except DetectionFailure as e:
            fails.append((gamma, e))
    return DetectionRun(config, wits, fails)


# ---------------------------------------------------------------------------
# moment and mean-value ingredients
# ---------------------------------------------------------------------------

def divisor_moment(k: int, K: float, nu: float) -> float:
    """sum_{K^k < n <= (2K)^k} d_{2k}(n)^2 / n^(2(1-nu))."""
    if k < 1 or K <= 0:
        raise InputDomainError("need k >= 1 and K > 0")
    hi = int(math.floor((2 * K) ** k))
    if hi > MOMENT_LIMIT:
        raise CapacityError("divisor moment range", MOMENT_LIMIT, hi)
    lo = int(math.floor(K ** k)) + 1
    if hi < lo:
        return 0.0
    d = divisor_k(2 * k, hi)[lo:].astype(float)
    n = np.arange(lo, hi + 1, dtype=float)
    return math.fsum((d * d * n ** (-2 * (1 - nu))).tolist())


def mean_value_check(coeffs, points, N: int | None = None) -> float:
    """sum_t |sum_{N<n<=2N} a_n n^{-it}|^2 / ((N + #points) sum |a_n|^2).

    ``coeffs`` holds a_{N+1}, ..., a_{2N}; ``points`` must be one-spaced.
    """
    a = np.asarray(coeffs, dtype=float)
    N = a.size if N is None else int(N)
    if a.size != N:
        raise InputDomainError("need exactly N coefficients for (N, 2N]")
    if N > MV_LIMIT:
        raise CapacityError("mean value length", MV_LIMIT, N)
    p = np.sort(np.asarray(points, dtype=float))
    if p.size == 0:
        return 0.0
    if np.any(np.diff(p) < 1):
        raise InputDomainError("points must be pairwise at least 1 apart")
    lhi, llo = _kernels.logs(N + 1, 2 * N)
    vals = _kernels.sum_points(a, lhi, llo, p)
    num = float(np.sum(np.abs(vals) ** 2))
    den = (N + p.size) * float(np.sum(a * a))
    return num / den if den else 0.0
