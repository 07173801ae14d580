"""Exact exponent bookkeeping for large-value and zero-density bounds.

A density profile f models N(sigma, T) ~ T^{f(sigma)} as a continuous
piecewise-linear function.  All arithmetic is over ``Fraction``; floats only
appear when converting results for display.  Factors T^eps are kept in a
separate ``eps_budget`` field rather than folded into exponents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, NamedTuple

from .errors import HypothesisError, InputDomainError, ProfileError, StepFailure

HALF = Fraction(1, 2)


def q(x) -> Fraction:
    """Exact rational from an int, Fraction, decimal string or float (via its repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not math.isfinite(x):
            raise InputDomainError(f"non-finite value {x}")
        return Fraction(repr(x))
    return Fraction(x)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DensityExponentProfile:
    """Piecewise-linear f on [breakpoints[0][0], 1] through the given (sigma, value) pairs."""

    breakpoints: tuple
    name: str = "custom"

    def __post_init__(self):
        pts = tuple((q(s), q(v)) for s, v in self.breakpoints)
        if len(pts) < 2:
            raise ProfileError("a profile needs at least two breakpoints")
        sig = [s for s, _ in pts]
        if any(b <= a for a, b in zip(sig, sig[1:])):
            raise ProfileError("breakpoint sigmas must be strictly ascending")
        if sig[-1] != 1:
            raise ProfileError("the last breakpoint must sit at sigma = 1")
        if sig[0] < 0:
            raise ProfileError("profiles live on sigma >= 0")
        vals = [v for _, v in pts]
        if vals[-1] != 0:
            raise ProfileError("f(1) must be 0")
        if any(v < 0 for v in vals):
            raise ProfileError("f must be nonnegative")
        if any(b > a for a, b in zip(vals, vals[1:])):
            raise ProfileError("f must be nonincreasing")
        object.__setattr__(self, "breakpoints", pts)

    @property
    def lo(self) -> Fraction:
        return self.breakpoints[0][0]

    def __call__(self, sigma) -> Fraction:
        s = q(sigma)
        if not self.lo <= s <= 1:
            raise ProfileError(f"sigma = {s} outside the profile domain [{self.lo}, 1]")
        pts = self.breakpoints
        for (a, fa), (b, fb) in zip(pts, pts[1:]):
            if a <= s <= b:
                return fa + (fb - fa) * (s - a) / (b - a)
        raise AssertionError("unreachable")

    def to_text(self) -> str:
        lines = [f"# profile {self.name}"]
        lines += [f"{s} {v}" for s, v in self.breakpoints]
        return "\n".join(lines) + "\n"


def DH() -> DensityExponentProfile:
    """f(sigma) = 2(1 - sigma) on [1/2, 1], continued by the full count exponent 1 below 1/2."""
    return DensityExponentProfile(((0, 1), (HALF, 1), (1, 0)), "DH")


def STRONG_DH(delta, eps=0) -> DensityExponentProfile:
    """f(sigma) = (2 - delta)(1 - sigma), only on sigma >= 1/2 + eps."""
    d, e = q(delta), q(eps)
    if not 0 <= d < 1:
        raise ProfileError("delta must lie in [0, 1)")
    if not 0 <= e < HALF:
        raise ProfileError("eps must lie in [0, 1/2)")
    lo = HALF + e
    return DensityExponentProfile(((lo, (2 - d) * (1 - lo)), (1, 0)), f"STRONG_DH({d})")


def load_profile(path_or_text, name=None) -> DensityExponentProfile:
    """Parse lines ``sigma value`` (``#`` starts a comment); numbers may be fractions."""
    p = Path(str(path_or_text))
    text = p.read_text(encoding="utf-8") if "\n" not in str(path_or_text) and p.exists() \
        else str(path_or_text)
    pts = []
    for k, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ProfileError(f"line {k}: expected 'sigma value'")
        try:
            pts.append((Fraction(parts[0]), Fraction(parts[1])))
        except ValueError as e:
            raise ProfileError(f"line {k}: {e}") from None
    return DensityExponentProfile(tuple(pts), name or (p.stem if p.exists() else "custom"))


PRESETS = {"DH": DH}


def profile_by_name(name: str, delta=None, eps=0) -> DensityExponentProfile:
    if name == "DH":
        return DH()
    if name in ("STRONG_DH", "strong_dh"):
        if delta is None:
            raise ProfileError("STRONG_DH needs delta")
        return STRONG_DH(delta, eps)
    return load_profile(name)


# ---------------------------------------------------------------------------
# the right-hand side exponent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExponentReport:
    """exponent = max(max_alpha [(alpha - (1 - nu))/2 + f(alpha)], nu/2); total adds eps_budget."""

    exponent: Fraction
    argmax_alpha: Fraction | None
    branch: str
    eps_budget: Fraction
    nu: Fraction
    trace: tuple = field(repr=False)

    @property
    def total(self) -> Fraction:
        return self.exponent + self.eps_budget

    def recompute(self) -> Fraction:
        """Re-evaluate the maximized expression from the traced candidates."""
        vals = [v["value"] for rule, v in self.trace if rule == "candidate"]
        return max(vals + [self.nu / 2])

    def as_dict(self) -> dict:
        return {
            "exponent": float(self.exponent), "exponent_exact": str(self.exponent),
            "eps_budget": float(self.eps_budget), "total": float(self.total),
            "argmax_alpha": None if self.argmax_alpha is None else float(self.argmax_alpha),
            "branch": self.branch,
            "trace": [[rule, {k: str(v) for k, v in vals.items()}] for rule, vals in self.trace],
        }


def rhs_exponent(nu, eps, profile: DensityExponentProfile) -> ExponentReport:
    """Exponent of the large-value bound for line-1 zeta sums of size M^{-nu}.

    The maximum over alpha in [1 - nu - eps, 1] is taken over breakpoints and
    endpoints, which is exact for a piecewise-linear f.
    """
    n, e = q(nu), q(eps)
    if not 0 <= n <= HALF:
        raise InputDomainError("nu must lie in [0, 1/2]")
    if e < 0:
        raise InputDomainError("eps must be nonnegative")
    a_lo, a_hi = 1 - n - e, Fraction(1)
    if a_lo < profile.lo:
        raise ProfileError(f"alpha range starts at {a_lo}, below the profile domain {profile.lo}")
    trace = [("range", {"alpha_lo": a_lo, "alpha_hi": a_hi})]
    cands = sorted({a_lo, a_hi} | {s for s, _ in profile.breakpoints if a_lo < s < a_hi})
    best, arg = None, None
    for a in cands:
        fa = profile(a)
        v = (a - (1 - n)) / 2 + fa
        trace.append(("candidate", {"alpha": a, "f": fa, "value": v}))
        if best is None or v > best:
            best, arg = v, a
    half = n / 2
    trace.append(("nu_half", {"value": half}))
    if best >= half:
        exp_, branch = best, "zero_term"
    else:
        exp_, branch, arg = half, "nu_half_term", arg
    trace.append(("select", {"branch": branch, "exponent": exp_}))
    return ExponentReport(exp_, arg, branch, e, n, tuple(trace))


# ---------------------------------------------------------------------------
# the recursion and its induction
# ---------------------------------------------------------------------------

class Step(NamedTuple):
    sigma_next: Fraction | None
    eta_next: Fraction | None
    cost_exponent: Fraction
    rule: str  # "R2" (recursive) or "R3" (terminal, uses zero counts)


def recursion_step(sigma, eta, beta, eps) -> Step:
    """Exponent-level transition for the large-value measure R_{sigma, eta}.

    For beta > eps/3 the measure is bounded by T^{beta - eta} times the
    measure on the line sigma + (2 - eps) beta at level eps beta / 4.  For
    beta <= eps/3 the terminal rule applies and only the cost is returned.
    """
    s, h, b, e = q(sigma), q(eta), q(beta), q(eps)
    if not HALF <= s <= 1:
        raise InputDomainError("sigma must lie in [1/2, 1]")
    if h < 0 or e <= 0 or b < 0:
        raise InputDomainError("need eta >= 0, eps > 0, beta >= 0")
    if b <= e / 3:
        return Step(None, None, b - h, "R3")
    return Step(s + (2 - e) * b, e * b / 4, b - h, "R2")


def _zeta_level_from_R(eta, beta):
    # many large block values give many t where zeta is about T^beta, beta >= eta
    return {"cost": beta - eta, "zeta_level": beta}


def _R_from_zeta_level(sigma, beta, eps):
    # large zeta values are large block values on a line further right
    return {"sigma": sigma + (2 - eps) * beta, "eta": eps * beta / 3}


def _composed_step(sigma, eta, beta, eps):
    a = _zeta_level_from_R(eta, beta)
    b = _R_from_zeta_level(sigma, a["zeta_level"], eps)
    return b["sigma"], b["eta"], a["cost"]


@dataclass
class InductionTrace:
    eps: Fraction
    eta: Fraction
    J: int
    passed: bool = True
    steps: list = field(default_factory=list, repr=False)
    failures: list = field(default_factory=list)
    final: dict = field(default_factory=dict)

    def fail(self, j, beta, check, detail):
        self.passed = False
        self.failures.append({"j": j, "beta": beta, "check": check, **detail})

    def raise_for_failure(self):
        if not self.passed:
            f = self.failures[0]
            raise StepFailure(f"step j={f['j']} beta={f['beta']} failed {f['check']}", self)


def _claim_sigma_term(sigma, eps):
    # claim exponent minus its max-over-alpha part
    return (1 - sigma) * (HALF + eps) + eps / 2


def induction_verify(eps, eta, step: Callable = recursion_step, beta_points: int = 4) -> InductionTrace:
    """Replay the induction over j = 0..J, J = ceil(50/eps), in exact arithmetic.

    Claim at level j: for sigma >= 1 - j/(2J) and eta' >= eta (eps/20)^{J-j},
    R_{sigma, eta'} has exponent at most
    (1 - sigma)(1/2 + eps) + eps/2 + max_{alpha >= sigma - eps/2} [(alpha - 1)(1/2 + eps) + n(alpha)]
    with n the zero-count exponent.  Each step is checked for soundness
    against the composition of the two underlying reductions, then for
    preservation of the claim.  Once eta_j drops below eps/3 its exact value
    is replaced by exact upper bounds, which keeps every check sound while
    avoiding huge denominators.
    """
    e, h = q(eps), q(eta)
    if not (0 < e < Fraction(1, 4) and 0 < h < Fraction(1, 4)):
        raise InputDomainError("eps and eta must lie in (0, 1/4)")
    J = math.ceil(Fraction(50) / e)
    qq = e / 20
    tr = InductionTrace(e, h, J)
    tr.steps.append({"j": 0, "rule": "base", "note": "sigma >= 1 gives R = 0"})

    # exact eta_j for the few top levels, bounds below
    exact_eta = {}
    k, cur = 0, h
    while cur >= e / 3:
        exact_eta[k] = cur
        k, cur = k + 1, cur * qq
    exact_eta[k] = cur  # first level with eta_j < eps/3
    exact_eta[k + 1] = cur * qq
    k_deep = k + 1

    def eta_info(kk):
        # (exact value or None, exact upper bound, lower bound used for cost)
        if kk in exact_eta:
            return exact_eta[kk], exact_eta[kk], exact_eta[kk]
        return None, exact_eta[k_deep], Fraction(0)

    for j in range(1, J + 1):
        sigma = 1 - Fraction(j, 2 * J)
        sigma_prev = 1 - Fraction(j - 1, 2 * J)
        kk = J - j
        eta_j, _, eta_cost = eta_info(kk)
        _, eta_prev_ub, _ = eta_info(kk + 1)
        lo = max(e / 3, eta_j) if eta_j is not None else e / 3
        betas = [lo + (1 - lo) * Fraction(m, beta_points) for m in range(1, beta_points + 1)]
        betas.insert(0, lo + (1 - lo) / 10 ** 6)
        min_margin = None
        for b in betas:
            st = step(sigma, eta_cost, b, e)
            ref_sigma, ref_eta, ref_cost = _composed_step(sigma, eta_cost, b, e)
            if st.rule != "R2":
                tr.fail(j, b, "rule", {"got": st.rule})
                continue
            if st.sigma_next != ref_sigma or st.eta_next > ref_eta or st.cost_exponent < ref_cost:
                tr.fail(j, b, "soundness", {"sigma_next": st.sigma_next, "expected": ref_sigma,
                                            "eta_next": st.eta_next, "eta_max": ref_eta})
                continue
            if st.sigma_next < sigma_prev:
                tr.fail(j, b, "sigma_advance", {"sigma_next": st.sigma_next, "need": sigma_prev})
            if st.eta_next < eta_prev_ub:
                tr.fail(j, b, "eta_level", {"eta_next": st.eta_next, "need": eta_prev_ub})
            if st.sigma_next < sigma:
                tr.fail(j, b, "alpha_range", {"sigma_next": st.sigma_next})
            lhs = st.cost_exponent + _claim_sigma_term(st.sigma_next, e)
            margin = _claim_sigma_term(sigma, e) - lhs
            if margin < 0:
                tr.fail(j, b, "claim_exponent", {"margin": margin})
            min_margin = margin if min_margin is None else min(min_margin, margin)
        # terminal rule at the boundary beta = eps/3
        tb = e / 3
        st = step(sigma, eta_cost, tb, e)
        if st.rule != "R3":
            tr.fail(j, tb, "terminal_rule", {"got": st.rule})
        # T^{beta} (N(sigma - o(1)) + 1) against the alpha = sigma term of the claim
        if tb > e / 2:
            tr.fail(j, tb, "terminal_exponent", {"cost": tb})
        # 4 T^{(1-sigma)/2} against the alpha = 1 term
        if (1 - sigma) / 2 > _claim_sigma_term(sigma, e):
            tr.fail(j, tb, "trivial_term", {})
        tr.steps.append({"j": j, "sigma": sigma, "eta_exact": eta_j is not None,
                         "betas": len(betas), "min_margin": min_margin})

    # the level-J claim implies the stated form: check at the vertices of
    # {1/2 <= sigma <= 1, sigma - eps/2 <= alpha <= 1}
    worst = None
    for s in (HALF, Fraction(1)):
        for a in (s - e / 2, Fraction(1)):
            lhs = (a - s) * (HALF + e) + e / 2
            rhs = (a - s) / 2 + 2 * e
            worst = rhs - lhs if worst is None else min(worst, rhs - lhs)
    if worst < 0:
        tr.fail(J, None, "conclusion", {"margin": worst})
    tr.final = {"J": J, "conclusion_margin": worst,
                "exponent": "(alpha - sigma)/2 + 2 eps over alpha in [sigma - eps, 1]",
                "trivial_term": "(1 - sigma)/2 + 2 eps"}
    return tr


# ---------------------------------------------------------------------------
# applications
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StrongDHApplication:
    eps0: Fraction
    eps_prime: Fraction
    delta1: Fraction
    delta_at_eps0: Fraction
    sigma_range: tuple | None
    checks: tuple = field(repr=False)


def strong_dh_application(eps, delta_fn: Callable, beta_pointwise) -> StrongDHApplication:
    """Exponent saving for sets where every block on the line 1 is bounded below.

    eps0 = beta eps^2 / 2, eps' = eps0 delta(eps0) / 6, delta1 = delta(eps0) eps0 / 2.
    For sigma1 in [eps0, 1/2 - 20 eps] the bound from ``rhs_exponent`` under
    the strong profile and both closed-form branch exponents are checked to
    stay at most 2 sigma1 - delta1 at the interval endpoints (all three are
    convex in sigma1 and the target is affine).
    """
    e, bp = q(eps), q(beta_pointwise)
    if e <= 0:
        raise InputDomainError("eps must be positive")
    if not 0 < bp < 1:
        raise InputDomainError("beta_pointwise must lie in (0, 1)")
    eps0 = bp * e * e / 2
    d = q(delta_fn(eps0))
    if d < 0:
        raise HypothesisError("delta(eps0) is negative", d, 0)
    if d >= 1:
        raise HypothesisError("delta(eps0) must be below 1", d, 1)
    eps_p = eps0 * d / 6
    delta1 = d * eps0 / 2
    lo, hi = eps0, HALF - 20 * e
    checks = []
    rng = (lo, hi) if lo <= hi else None
    if rng is not None:
        prof = STRONG_DH(d, eps0)
        for s1 in sorted({lo, hi}):
            target = 2 * s1 - delta1
            rep = rhs_exponent(s1, eps_p, prof)
            b1 = 2 * s1 + 3 * eps_p - d * eps0
            b2 = 2 * s1 - 3 * eps0 / 2 + eps_p
            row = {"sigma1": s1, "target": target, "rhs_total": rep.total,
                   "argmax_alpha": rep.argmax_alpha, "branch1": b1, "branch2": b2}
            checks.append(row)
            bad = [name for name, v in (("rhs", rep.total), ("branch1", b1), ("branch2", b2))
                   if v > target]
            if rep.total > max(b1, b2):
                bad.append("rhs_vs_branches")
            if bad:
                raise HypothesisError(f"branch inequality fails at sigma1={s1}: {bad}",
                                      max(rep.total, b1, b2), target)
    return StrongDHApplication(eps0, eps_p, delta1, d, rng, tuple(checks))


@dataclass(frozen=True)
class ConverseBudget:
    u1: Fraction
    one_spaced: Fraction
    t1: Fraction
    k_rule: str

    def as_tuple(self):
        return (self.u1, self.one_spaced, self.t1)

    @staticmethod
    def k_choice(K_prime, U, R, T, eps) -> int:
        """Power used in the mean-value step for an exceptional block at K'."""
        if R <= K_prime <= R * T ** eps:
            return max(1, math.floor(math.log(U) / math.log(K_prime)))
        if U * T ** (-eps) <= K_prime <= U * R:
            return 1
        raise InputDomainError("K' is not in an exceptional range")


def converse_budget(nu, eps) -> ConverseBudget:
    """Exponents for the exceptional zeros: U1 count, its one-spaced subset, final set."""
    n, e = q(nu), q(eps)
    if not 0 < n <= HALF:
        raise InputDomainError("nu must lie in (0, 1/2]")
    if e <= 0:
        raise InputDomainError("eps must be positive")
    return ConverseBudget(2 * n + 3 * e / 2, 2 * n + 5 * e / 4, 2 * n + 2 * e,
                          "k = floor(log U / log K') for K' in [R, R T^eps]; "
                          "k = 1 for K' in [U T^-eps, U R]")
