"""Dirichlet blocks: pointwise and grid evaluation, prefix maxima, partial summation.

A block is the finite sum ``sum_{lo < n <= hi} c_n n^{-(sigma + i t)}`` over the
integers in ``(lo, hi]``.  Endpoints may be real; only the integers they
enclose matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .arith import mangoldt, mobius
from .errors import CapacityError, InputDomainError

MAX_BLOCK_TERMS = 1_000_000
MAX_GRID_POINTS = 100_000_000

COEFF_KINDS = ("unit", "moebius", "von_mangoldt", "custom")


@dataclass(frozen=True)
class GridSpec:
    """Equispaced ordinates ``t0 + k*dt`` for ``0 <= k < count``."""

    t0: float
    dt: float
    count: int

    def __post_init__(self):
        if not (math.isfinite(self.t0) and math.isfinite(self.dt)):
            raise InputDomainError("grid parameters must be finite")
        if self.dt <= 0:
            raise InputDomainError(f"grid step must be positive, got {self.dt}")
        if int(self.count) != self.count or self.count < 1:
            raise InputDomainError(f"grid count must be a positive integer, got {self.count}")

    @classmethod
    def spanning(cls, lo: float, hi: float, dt: float) -> "GridSpec":
        """Grid with step ``dt`` whose points cover ``[lo, hi]``."""
        count = int(math.floor((hi - lo) / dt + 1e-9)) + 1
        return cls(lo, dt, count)

    def points(self) -> np.ndarray:
        return self.t0 + np.arange(self.count, dtype=float) * self.dt

    @property
    def t_end(self) -> float:
        return self.t0 + (self.count - 1) * self.dt


@dataclass(frozen=True)
class DirichletBlock:
    """``sum_{lo < n <= hi} c_n n^{-(sigma+it)}``.

    ``coeffs`` is only used for ``coeff_kind='custom'`` and holds c_1, c_2, ...
    (index 0 is c_1); it must reach at least ``floor(hi)``.
    """

    lo: float
    hi: float
    sigma: float
    coeff_kind: str = "unit"
    coeffs: Sequence[float] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for name in ("lo", "hi", "sigma"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InputDomainError(f"{name} must be finite, got {v}")
        if self.lo < 0:
            raise InputDomainError(f"lo must be nonnegative, got {self.lo}")
        if not self.lo < self.hi:
            raise InputDomainError(f"need lo < hi, got ({self.lo}, {self.hi}]")
        if self.coeff_kind not in COEFF_KINDS:
            raise InputDomainError(f"unknown coefficient kind {self.coeff_kind!r}")
        if self.coeff_kind == "custom":
            if self.coeffs is None or len(self.coeffs) < self.n_last:
                raise InputDomainError("custom coefficients must cover c_1..c_floor(hi)")
        if self.n_last - self.n_first + 1 > MAX_BLOCK_TERMS:
            raise CapacityError("block length", MAX_BLOCK_TERMS, self.n_last - self.n_first + 1)

    @property
    def n_first(self) -> int:
        return math.floor(self.lo) + 1

    @property
    def n_last(self) -> int:
        return math.floor(self.hi)

    def __len__(self) -> int:
        return max(0, self.n_last - self.n_first + 1)

    def integers(self) -> np.ndarray:
        return np.arange(self.n_first, self.n_last + 1)

    def coefficients(self) -> np.ndarray:
        """c_n for the integers of the block, as float64."""
        a, b = self.n_first, self.n_last
        if b < a:
            return np.zeros(0)
        if self.coeff_kind == "unit":
            return np.ones(b - a + 1)
        if self.coeff_kind == "moebius":
            return mobius(b)[a:].astype(float)
        if self.coeff_kind == "von_mangoldt":
            return mangoldt(b)[a:]
        return np.asarray(self.coeffs, dtype=float)[a - 1:b]

    def with_sigma(self, sigma: float) -> "DirichletBlock":
        return DirichletBlock(self.lo, self.hi, sigma, self.coeff_kind, self.coeffs)

    def _prepared(self):
        a, b = self.n_first, self.n_last
        if b < a:
            z = np.zeros(0)
            return z, z, z
        lhi, llo = _kernels.logs(a, b)
        w = self.coefficients() * np.exp(-self.sigma * lhi)
        return w, lhi, llo


def _check_t(t):
    if not math.isfinite(t):
        raise InputDomainError(f"t must be finite, got {t}")


def zeta_sum(block: DirichletBlock, t: float) -> complex:
    """Value of the block at ``sigma + i t``."""
    _check_t(t)
    w, lhi, llo = block._prepared()
    return _kernels.sum_at(w, lhi, llo, t)


def prefix_sums(block: DirichletBlock, t: float) -> np.ndarray:
    """Running sums S(y) = sum_{lo < n <= y} for y = n_first..n_last."""
    _check_t(t)
    w, lhi, llo = block._prepared()
    if w.size == 0:
        return np.zeros(0, dtype=complex)
    return np.cumsum(_kernels.cis(_kernels._phases(float(t), lhi, llo)) * w)


def prefix_max_sum(block: DirichletBlock, t: float) -> tuple[int, float]:
    """Integer y* in (lo, hi] maximizing |sum_{lo<n<=y}| and that maximum.

    The supremum over real y is attained at an integer, so only integer
    prefixes are scanned.  An empty block gives ``(floor(lo), 0.0)``.
    """
    s = prefix_sums(block, t)
    if s.size == 0:
        return math.floor(block.lo), 0.0
    mags = np.abs(s)
    j = int(np.argmax(mags))
    return block.n_first + j, float(mags[j])


def grid_eval(block: DirichletBlock, grid: GridSpec) -> np.ndarray:
    """The block at every grid ordinate; agrees with :func:`zeta_sum` to ~1e-12."""
    if grid.count > MAX_GRID_POINTS:
        raise CapacityError("grid points", MAX_GRID_POINTS, grid.count)
    w, lhi, llo = block._prepared()
    return _kernels.sum_on_grid(w, lhi, llo, grid.t0, grid.dt, int(grid.count))


def partial_summation_check(sigma: float, t: float, beta: float, M1: float, M2: float) -> float:
    """Ratio of the two sides of the partial-summation comparison (constant 4).

    LHS is |sum_{M1<m<=M2} m^{-sigma-it}|; RHS is ``4 * M^beta`` times the
    largest prefix on the line ``sigma + beta``, with M = M2 for beta >= 0 and
    M = M1 otherwise.  The inequality says the ratio never exceeds 1.
    """
    for v in (sigma, t, beta, M1, M2):
        _check_t(v)
    if M1 < 1 or not M1 < M2:
        raise InputDomainError(f"need 1 <= M1 < M2, got M1={M1}, M2={M2}")
    block = DirichletBlock(M1, M2, sigma)
    lhs = abs(zeta_sum(block, t))
    if lhs == 0.0:
        return 0.0
    _, pmax = prefix_max_sum(block.with_sigma(sigma + beta), t)
    m = M2 if beta >= 0 else M1
    return lhs / (4.0 * m ** beta * pmax)


def sieve_coefficients(kind: str, N: int) -> np.ndarray:
    """mu(1..N) or Lambda(1..N) (index 0 holds n = 1)."""
    if kind == "moebius":
        return mobius(N)[1:].astype(np.int64)
    if kind == "von_mangoldt":
        return mangoldt(N)[1:]
    raise InputDomainError(f"unknown sieve kind {kind!r}")
