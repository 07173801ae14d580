"""Large values of zeta sums over t-grids, and the reductions that move a
large value from one kind of sum (or line) to another.

Scans return :class:`IntervalSet` objects built by the grid-measure rule:
each marked grid point t stands for [t - dt/2, t + dt/2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import BranchFailure, HypothesisError, InputDomainError
from .evaluation import DirichletBlock, GridSpec, prefix_max_sum, zeta_sum
from .intervals import IntervalSet
from .zeros import ZeroTable, count_N
from .zeta import afe_parts, zeta_grid, zeta_reference

M_POLICIES = ("dyadic_refined", "all_integers")
WITNESS_TAGS = ("lemma21", "lemma24_main", "lemma24_dual", "case1", "case2", "U1")
REFINE_TOL = 1e-4


@dataclass(frozen=True)
class ScanConfig:
    """Parameters of a scan over t in [-T, T].

    ``C_horizon`` is the constant C in the zero counts N(alpha, C*T) that
    accompany the theorem-side measurements.
    """

    T: float
    dt: float = 0.05
    eps: float | None = None
    nu: float | None = None
    M_policy: str = "dyadic_refined"
    C_horizon: float = 4.0
    refine: bool = False
    grid: GridSpec | None = None

    def __post_init__(self):
        if not (math.isfinite(self.T) and self.T > 1):
            raise InputDomainError("T must be a finite number > 1")
        if not self.dt > 0:
            raise InputDomainError("dt must be positive")
        if self.nu is not None and not 0 <= self.nu <= 0.5:
            raise InputDomainError("nu must lie in [0, 1/2]")
        if self.eps is not None and not self.eps > 0:
            raise InputDomainError("eps must be positive")
        if self.M_policy not in M_POLICIES:
            raise InputDomainError(f"unknown M policy {self.M_policy!r}")
        if self.grid is None:
            object.__setattr__(self, "grid", GridSpec.spanning(-self.T, self.T, self.dt))

    def needs(self, *names):
        for n in names:
            if getattr(self, n) is None:
                raise InputDomainError(f"this scan needs {n}")


@dataclass(frozen=True)
class WitnessRecord:
    """A certified large value: |sum_{M < m <= M'} m^{-(sigma + i t)}| = value >= threshold.

    ``t_or_gamma`` is the ordinate at which the sum is evaluated; for
    detector witnesses it is a zero ordinate.  ``U1`` records carry no sum.
    """

    t_or_gamma: float
    M: float
    M_prime: float
    value: float
    threshold: float
    tag: str
    sigma: float = 1.0
    K: float | None = None
    r: int | None = None
    details: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.tag not in WITNESS_TAGS:
            raise InputDomainError(f"unknown witness tag {self.tag!r}")

    @property
    def holds(self) -> bool:
        return self.tag == "U1" or self.value >= self.threshold

    def reverify(self) -> float:
        """Fresh evaluation of the witnessed sum."""
        if self.tag == "U1":
            return math.nan
        return abs(zeta_sum(DirichletBlock(self.M, self.M_prime, self.sigma), self.t_or_gamma))


# ---------------------------------------------------------------------------
# prefix sums on grids
# ---------------------------------------------------------------------------

def _prefix_chunks(sigma, n_max, t):
    """Yield (slice, P) with P[:, n] = sum_{m <= n} m^{-sigma - i t}, P[:, 0] = 0."""
    lhi, llo = _kernels.logs(1, n_max)
    w = np.exp(-sigma * lhi)
    for sl, terms in _kernels.terms_on_grid(w, lhi, llo, t):
        P = np.zeros((terms.shape[0], n_max + 1), dtype=complex)
        np.cumsum(terms, axis=1, out=P[:, 1:])
        yield sl, P


def _pairs(policy, n_max):
    """(a, b_hi) pairs: sums over (a, b] for a < b <= b_hi, integer a >= 1."""
    if policy == "dyadic_refined":
        out, a = [], 1
        while a < n_max:
            out.append((a, min(2 * a, n_max)))
            a *= 2
        return out
    return [(a, min(2 * a + 1, n_max)) for a in range(1, n_max)]


def _block_max(P, a, b_hi):
    return np.max(np.abs(P[:, a + 1:b_hi + 1] - P[:, a:a + 1]), axis=1)


def _r_value(P, pairs):
    best = np.zeros(P.shape[0])
    for a, b in pairs:
        np.maximum(best, _block_max(P, a, b), out=best)
    return best


def _refined_set(t, marked, dt, predicate, tol=REFINE_TOL):
    """Interval set whose run boundaries are bisected to ``tol`` using ``predicate``."""
    base = IntervalSet.from_marks(t, marked, dt)
    if len(base) == 0:
        return base
    m = marked.astype(np.int8)
    edges = np.diff(np.concatenate([[0], m, [0]]))
    first = np.flatnonzero(edges == 1)
    last = np.flatnonzero(edges == -1) - 1

    def cross(inside, outside):
        for _ in range(60):
            if abs(outside - inside) <= tol:
                break
            mid = 0.5 * (inside + outside)
            if predicate(mid):
                inside = mid
            else:
                outside = mid
        return 0.5 * (inside + outside)

    iv = []
    for f, l in zip(first.tolist(), last.tolist()):
        lo = cross(t[f], t[f - 1]) if f > 0 else t[f] - dt / 2
        hi = cross(t[l], t[l + 1]) if l + 1 < t.size else t[l] + dt / 2
        if iv and lo <= iv[-1][1]:
            iv[-1][1] = max(iv[-1][1], hi)
        else:
            iv.append([lo, hi])
    return IntervalSet(np.array(iv), discretization_error=2 * len(iv) * tol)


# ---------------------------------------------------------------------------
# R_{sigma, eta}(T)
# ---------------------------------------------------------------------------

def r_value_at(sigma: float, t: float, T: float, policy: str = "dyadic_refined") -> float:
    """max over admissible (A, B] of |sum_{A<n<=B} n^{-sigma-it}| at one ordinate."""
    n_max = int(math.floor(math.sqrt(T)))
    if n_max < 2:
        return 0.0
    P = next(_prefix_chunks(sigma, n_max, np.array([float(t)])))[1]
    return float(_r_value(P, _pairs(policy, n_max))[0])


def scan_R(sigma: float, config: ScanConfig) -> tuple[np.ndarray, np.ndarray]:
    """Grid ordinates and the R-value (largest admissible block) at each."""
    t = config.grid.points()
    n_max = int(math.floor(math.sqrt(config.T)))
    vals = np.zeros(t.size)
    if n_max >= 2:
        pairs = _pairs(config.M_policy, n_max)
        for sl, P in _prefix_chunks(sigma, n_max, t):
            vals[sl] = _r_value(P, pairs)
    return t, vals


def measure_R(sigma: float, eta: float, config: ScanConfig) -> IntervalSet:
    """{t : some block (A, B], 1 <= A < B <= min(2A, T^(1/2)), has |sum| >= T^eta}.

    ``dyadic_refined`` takes A = 2^j and every B; ``all_integers`` takes every
    integer pair, which is the full admissible family.
    """
    t, vals = scan_R(sigma, config)
    thr = config.T ** eta
    marked = vals >= thr
    if config.refine:
        return _refined_set(t, marked, config.grid.dt,
                            lambda x: r_value_at(sigma, x, config.T, config.M_policy) >= thr)
    return IntervalSet.from_marks(t, marked, config.grid.dt)


# ---------------------------------------------------------------------------
# the theorem-side set
# ---------------------------------------------------------------------------

def theorem_M_range(T: float, eps: float) -> tuple[int, int]:
    return math.ceil(T ** eps), int(math.floor(math.sqrt(T) / 2))


def _theorem_marks(P, nu, M_lo, M_hi):
    hit = np.zeros(P.shape[0], dtype=bool)
    for M in range(M_lo, M_hi + 1):
        hit |= _block_max(P, M, 2 * M) >= M ** (-nu)
    return hit


def theorem_lhs_at(t: float, nu: float, eps: float, T: float) -> bool:
    """Is there an integer M in [T^eps, T^(1/2)/2] and M' in (M, 2M] with
    |sum_{M<m<=M'} m^{-1-it}| >= M^{-nu}?"""
    M_lo, M_hi = theorem_M_range(T, eps)
    if M_lo > M_hi:
        return False
    P = next(_prefix_chunks(1.0, 2 * M_hi, np.array([float(t)])))[1]
    return bool(_theorem_marks(P, nu, M_lo, M_hi)[0])


def scan_theorem_lhs(config: ScanConfig) -> tuple[np.ndarray, np.ndarray]:
    """Grid ordinates and the boolean mark of the theorem-side condition."""
    config.needs("nu", "eps")
    t = config.grid.points()
    marked = np.zeros(t.size, dtype=bool)
    M_lo, M_hi = theorem_M_range(config.T, config.eps)
    if M_lo <= M_hi:
        for sl, P in _prefix_chunks(1.0, 2 * M_hi, t):
            marked[sl] = _theorem_marks(P, config.nu, M_lo, M_hi)
    return t, marked


def measure_theorem_lhs(config: ScanConfig) -> IntervalSet:
    t, marked = scan_theorem_lhs(config)
    if config.refine:
        return _refined_set(t, marked, config.grid.dt,
                            lambda x: theorem_lhs_at(x, config.nu, config.eps, config.T))
    return IntervalSet.from_marks(t, marked, config.grid.dt)


# ---------------------------------------------------------------------------
# reductions
# ---------------------------------------------------------------------------

def theorem_rhs(T: float, nu: float, eps: float, table: ZeroTable, C: float = 1.0) -> dict:
    """T^eps max_alpha T^((alpha-(1-nu))/2) N(alpha, C T) + T^(nu/2 + eps) with true zero counts.

    alpha runs over [1 - nu - eps, 1] intersected with (1/2, 1], the range on
    which N is a zero-density count; N is piecewise constant, so its value
    just above 1/2 and at the endpoints covers every case.
    """
    lo = max(1 - nu - eps, 0.5)
    alphas = sorted({np.nextafter(0.5, 1.0) if lo == 0.5 else lo, 1.0})
    best, arg = 0.0, None
    for a in alphas:
        n = int(count_N(table, a, C * T))
        v = T ** ((a - (1 - nu)) / 2) * n
        if arg is None or v > best:
            best, arg = v, a
    zero_term = T ** eps * best
    nu_term = T ** (nu / 2 + eps)
    return {"T": T, "nu": nu, "eps": eps, "C": C, "zero_term": zero_term, "argmax_alpha": arg,
            "nu_term": nu_term, "rhs": zero_term + nu_term}


def reduce_to_shifted_line(t: float, nu: float, eta: float, M: float, M_prime: float) -> WitnessRecord:
    """From |sum_{M<m<=M'} m^{-1-it}| > M^{-nu} to a prefix (M, y] on the line
    1 - nu - eta with |sum| > M^eta / 4."""
    if not (M >= 1 and M < M_prime):
        raise InputDomainError("need 1 <= M < M'")
    base = abs(zeta_sum(DirichletBlock(M, M_prime, 1.0), t))
    if not base > M ** (-nu):
        raise HypothesisError(f"|sum| = {base:.6g} does not exceed M^-nu = {M ** -nu:.6g}",
                              base, M ** (-nu))
    sigma = 1 - nu - eta
    y, val = prefix_max_sum(DirichletBlock(M, M_prime, sigma), t)
    return WitnessRecord(float(t), float(M), float(y), val, M ** eta / 4, "lemma21", sigma,
                         details={"hypothesis_value": base})


def _best_dyadic_prefix(sigma, t, y_max):
    """Largest prefix over the dyadic blocks (M, 2M], 1 <= M <= y_max."""
    best = None
    M = 1
    while M <= y_max:
        y, v = prefix_max_sum(DirichletBlock(M, 2 * M, sigma), t)
        if best is None or v > best[2]:
            best = (M, y, v)
        M *= 2
    return best


def afe_reduction(t: float, sigma: float, beta: float, eps: float, T: float) -> WitnessRecord:
    """From |zeta(sigma+it)| >= T^beta to a dyadic block on the line
    sigma + (2 - eps) beta with |sum| >= T^(eps beta / 3).

    The symmetric approximate functional equation splits zeta into a main and
    a dual sum; whichever clears its share (T^beta/3, resp.
    T^(beta+sigma-1/2)/300) is moved up by partial summation.  A dual
    witness is evaluated at -t, since conj of the dual sum is a sum at -t.
    """
    if not 2 * math.pi < abs(t) <= T:
        raise InputDomainError("need 2 pi < |t| <= T")
    z = abs(zeta_reference(complex(sigma, t)))
    if z < T ** beta:
        raise HypothesisError(f"|zeta| = {z:.6g} below T^beta = {T ** beta:.6g}", z, T ** beta)
    main, dual, chi, x, _ = afe_parts(complex(sigma, t))
    main_thr = T ** beta / 3
    dual_thr = T ** (beta + sigma - 0.5) / 300
    details = {"zeta_abs": z, "main": abs(main), "dual": abs(dual), "chi_abs": abs(chi),
               "main_threshold": main_thr, "dual_threshold": dual_thr, "x": x}
    if abs(main) >= main_thr:
        tag, t_w = "lemma24_main", t
    elif abs(dual) >= dual_thr:
        tag, t_w = "lemma24_dual", -t
    else:
        raise BranchFailure("neither AFE sum clears its threshold", details)
    line = sigma + (2 - eps) * beta
    M, y, val = _best_dyadic_prefix(line, t_w, math.sqrt(T) / 2)
    thr = T ** (eps * beta / 3)
    if val < thr:
        details.update(block_value=val, block_threshold=thr, M=M, y=y)
        raise BranchFailure("no dyadic block on the shifted line reaches T^(eps beta/3)", details)
    return WitnessRecord(float(t_w), float(M), float(y), val, thr, tag, line, details=details)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

def _abs_zeta_scan(sigma, lo, hi, dt):
    """|zeta(sigma + it)| on a grid over [lo, hi] with lo >= 0."""
    grid = GridSpec.spanning(lo, hi, dt)
    return grid.points(), np.abs(zeta_grid(sigma, grid))


def level_set_measures(sigma_line: float, T: float, dt: float, exclude: float = 10.0):
    """Measures of {t in [-2T, 2T], |t| > exclude : |zeta| in (2^j, 2^(j+1)]} by level j.

    Uses |zeta(s - it)| = |zeta(s + it)|: the positive half is scanned and doubled.
    """
    t, a = _abs_zeta_scan(sigma_line, exclude, 2 * T, dt)
    j = np.floor(np.log2(a) - 1e-15).astype(int)  # a in (2^j, 2^(j+1)]
    levels = {}
    for lv in np.unique(j).tolist():
        levels[lv] = 2 * dt * int(np.count_nonzero(j == lv))
    return levels


def dichotomy_report(sigma: float, eta: float, config: ScanConfig) -> dict:
    """Either R <= 4 T^((1-sigma)/2), or a dyadic level T^beta of |zeta| on the
    line sigma + 1/log T whose measure is large compared with R T^eta.

    ``ratio`` = (level-set measure) * 50 T^beta (log T)^2 / (R T^eta); the
    reduction predicts ratio >= 1 for some beta >= eta - 3 log log T / log T.
    """
    T = config.T
    R = measure_R(sigma, eta, config)
    rep = {"sigma": sigma, "eta": eta, "T": T, "R": R.measure,
           "R_discretization_error": R.discretization_error,
           "branch_A_bound": 4 * T ** ((1 - sigma) / 2)}
    if R.measure <= rep["branch_A_bound"]:
        rep["branch"] = "A"
        return rep
    logT = math.log(T)
    beta_min = eta - 3 * math.log(logT) / logT
    levels = level_set_measures(sigma + 1 / logT, T, config.grid.dt / 4)
    rows = []
    for j, meas in sorted(levels.items()):
        beta = j * math.log(2) / logT
        if beta < beta_min:
            continue
        ratio = meas * 50 * T ** beta * logT ** 2 / (R.measure * T ** eta)
        rows.append({"beta": beta, "level": j, "measure": meas, "ratio": ratio})
    best = max(rows, key=lambda r: r["ratio"]) if rows else None
    rep.update(branch="B", beta_min=beta_min, levels=rows, best=best,
               holds=bool(best and best["ratio"] >= 1))
    return rep


def box_bound_report(table: ZeroTable, sigma: float, beta: float, T: float,
                     dt: float = 0.05) -> dict:
    """|{t in [-T, T] : |zeta(sigma+it)| >= T^beta}| against 3 L (N(sigma0, 2T) + 1),
    L = (log T)^2 / 4, sigma0 = sigma - (log log T)^(-1/2)."""
    if T <= math.e:
        raise InputDomainError("T must exceed e")
    L = math.log(T) ** 2 / 4
    sigma0 = sigma - 1 / math.sqrt(math.log(math.log(T)))
    n = count_N(table, sigma0, 2 * T)
    t, a = _abs_zeta_scan(sigma, 0.0, T, dt)
    hit = a >= T ** beta
    # each positive grid cell stands for itself and its mirror image
    w = np.full(t.size, 2 * dt)
    w[0] = dt
    lhs = float(np.sum(w[hit]))
    bound = 3 * L * (int(n) + 1)
    return {"sigma": sigma, "beta": beta, "T": T, "lhs": lhs, "sigma0": sigma0,
            "count_N": int(n), "note": n.note, "L": L, "bound": bound,
            "holds": lhs <= bound}


def one_spaced_select(points, values=None) -> np.ndarray:
    """Greedy left-to-right subset with gaps >= 1; ``values`` are carried along unused."""
    p = np.asarray(points, dtype=float)
    if p.size and np.any(np.diff(p) < 0):
        raise InputDomainError("points must be ascending")
    keep = []
    last = -math.inf
    for i, x in enumerate(p.tolist()):
        if x - last >= 1:
            keep.append(i)
            last = x
    return np.array(keep, dtype=int)
