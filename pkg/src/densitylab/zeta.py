"""zeta, chi, log Gamma and zeta'/zeta, plus executable forms of the classical
identities used around them (approximate functional equation, Perron's
formula, the smoothed von Mangoldt sum).

:func:`zeta_reference` (Euler-Maclaurin) is the oracle every other check is
measured against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .arith import mangoldt
from .errors import (CapacityError, ConditioningError, InputDomainError, NumericalError,
                     PoleError)
from .evaluation import DirichletBlock, zeta_sum

LOG_2PI = math.log(2 * math.pi)
LOG_PI = math.log(math.pi)
LOG_2 = math.log(2.0)

# B_2k / (2k (2k-1)), k = 1..10
_STIRLING = np.array([
    1 / 12, -1 / 360, 1 / 1260, -1 / 1680, 1 / 1188, -691 / 360360, 1 / 156,
    -3617 / 122400, 43867 / 244188, -174611 / 125400,
])
# B_2k / (2k)!, k = 1..7
_EM = np.array([
    1 / 12, -1 / 720, 1 / 30240, -1 / 1209600, 1 / 47900160,
    -691 / 1307674368000, 1 / 74724249600,
])

EM_CAP = 20_000_000
_STIRLING_RADIUS = 16.0


# ---------------------------------------------------------------------------
# Gamma and chi
# ---------------------------------------------------------------------------

def log_gamma(s):
    """Principal branch of log Gamma(s) (real on the positive axis, cut on (-inf, 0]).

    Stirling's series after raising the argument to |Re| or |Im| >= 16;
    the leading term is formed in extended precision.  Accepts scalars or
    arrays.
    """
    z = np.asarray(s, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    if not np.all(np.isfinite(z)):
        raise InputDomainError("log_gamma argument must be finite")
    poles = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if poles.any():
        raise PoleError(f"Gamma has a pole at {z[poles][0].real:g}")
    need = np.where(np.abs(z.imag) < _STIRLING_RADIUS, _STIRLING_RADIUS - z.real, 1.0 - z.real)
    m = np.maximum(0, np.ceil(need)).astype(int)
    shift = np.zeros_like(z)
    for k in range(int(m.max(initial=0))):
        live = k < m
        shift[live] += np.log(z[live] + k)
    w = z + m
    wl = w.astype(np.clongdouble)
    lead = ((wl - 0.5) * np.log(wl) - wl).astype(complex)
    inv = 1.0 / w
    inv2 = inv * inv
    series = np.zeros_like(w)
    for c in _STIRLING[::-1]:
        series = series * inv2 + c
    out = lead + 0.5 * LOG_2PI + series * inv - shift
    return complex(out[0]) if scalar else out


def gamma(s):
    return np.exp(log_gamma(s))


def _log_sin_half_pi(s):
    """log sin(pi s / 2) for |Im s| >= 1, branch irrelevant (only exp is used)."""
    z = 0.5 * math.pi * np.asarray(s, dtype=complex)
    up = z.imag > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        return _log_sin_branches(z, up)


def _log_sin_branches(z, up):
    # sin z = e^{-iz} (1 - e^{2iz}) / (-2i) for Im z > 0 and the mirror otherwise
    return np.where(
        up,
        -1j * z - np.log(-2j) + np.log1p(-np.exp(2j * np.where(up, z, 0))),
        1j * z - np.log(2j) + np.log1p(-np.exp(-2j * np.where(up, 0, z))),
    )


def log_chi(s):
    s = np.asarray(s, dtype=complex)
    return s * LOG_2 + (s - 1) * LOG_PI + _log_sin_half_pi(s) + log_gamma(1 - s)


def chi_factor(s):
    """chi(s) = 2^s pi^(s-1) sin(pi s/2) Gamma(1-s), so that zeta(s) = chi(s) zeta(1-s)."""
    sa = np.asarray(s, dtype=complex)
    if not np.all(np.isfinite(sa)):
        raise InputDomainError("chi argument must be finite")
    if np.any(np.abs(sa.imag) < 1):
        raise InputDomainError("chi_factor requires |Im s| >= 1")
    v = np.exp(log_chi(sa))
    return complex(v) if v.ndim == 0 else v


def theta(t):
    """Riemann-Siegel theta: Im log Gamma(1/4 + i t/2) - (t/2) log pi."""
    t = np.asarray(t, dtype=float)
    v = np.imag(log_gamma(0.25 + 0.5j * t)) - 0.5 * t * LOG_PI
    return float(v) if v.ndim == 0 else v


# ---------------------------------------------------------------------------
# Euler-Maclaurin reference
# ---------------------------------------------------------------------------

def em_cutoff(t_abs):
    n = max(30, math.ceil(1.3 * t_abs))
    if n > EM_CAP:
        raise CapacityError("Euler-Maclaurin cutoff", EM_CAP, n)
    return n


def _check_s(s):
    s = complex(s)
    if not (math.isfinite(s.real) and math.isfinite(s.imag)):
        raise InputDomainError(f"s must be finite, got {s}")
    if s == 1:
        raise PoleError("zeta has a pole at s = 1")
    return s


def _em_tail(sigma, t, N, derivative=False):
    """Euler-Maclaurin remainder at cutoff N (and its s-derivative) for arrays t."""
    t = np.asarray(t, dtype=float)
    s = sigma + 1j * t
    lhi, llo = _kernels.logs(N, N)
    logN = lhi[0] + llo[0]
    # N^{-s}, with the phase t log N reduced in doubled precision
    nms = math.exp(-sigma * logN) * _kernels.cis(_kernels.reduce_phase(t, lhi[0], llo[0]))
    with np.errstate(divide="ignore", invalid="ignore"):
        main = N * nms / (s - 1)
    tail = main + 0.5 * nms
    dtail = -logN * tail - N * nms / (s - 1) ** 2 if derivative else None
    rising = s.copy()  # (s)_{2k-1}
    drising = np.ones_like(s)
    npow = nms / N  # N^{-s-1}
    for k, c in enumerate(_EM):
        term = c * rising * npow
        tail = tail + term
        if derivative:
            dtail = dtail + c * npow * (drising - logN * rising)
        a, b = s + 2 * k + 1, s + 2 * k + 2
        if derivative:
            drising = drising * a * b + rising * (a + b)
        rising = rising * a * b
        npow = npow / (N * N)
    return tail, dtail


def _main_weights(sigma, N, derivative=False):
    lhi, llo = _kernels.logs(1, N - 1)
    w = np.exp(-sigma * lhi)
    return w, lhi, llo, (-(lhi + llo) * w if derivative else None)


def zeta_reference(s) -> complex:
    """zeta(s) by Euler-Maclaurin with cutoff max(30, ceil(1.3|Im s|)) and B_2..B_14.

    Absolute error below 1e-10 on Re s >= -1, |Im s| <= 1e7.
    """
    s = _check_s(s)
    N = em_cutoff(abs(s.imag))
    w, lhi, llo, _ = _main_weights(s.real, N)
    tail, _ = _em_tail(s.real, np.array([s.imag]), N)
    return _kernels.sum_at(w, lhi, llo, s.imag) + complex(tail[0])


def zeta_and_derivative(s) -> tuple[complex, complex]:
    s = _check_s(s)
    N = em_cutoff(abs(s.imag))
    w, lhi, llo, dw = _main_weights(s.real, N, derivative=True)
    tail, dtail = _em_tail(s.real, np.array([s.imag]), N, derivative=True)
    e = _kernels.cis(_kernels._phases(s.imag, lhi, llo))
    return complex(e @ w + tail[0]), complex(e @ dw + dtail[0])


def _line_chunks(t_abs_sorted, rows_for):
    """Split indices of an ascending |t| array into chunks sharing one cutoff."""
    i, n = 0, t_abs_sorted.size
    while i < n:
        N = em_cutoff(t_abs_sorted[min(n - 1, i)])
        j = i + 1
        rows = rows_for(N)
        # grow while the cutoff stays within 10% of the chunk's first one
        while j < n and j - i < rows and 1.3 * t_abs_sorted[j] <= 1.1 * N + 30:
            j += 1
        yield i, j, em_cutoff(t_abs_sorted[j - 1])
        i = j


def zeta_line(sigma: float, t) -> np.ndarray:
    """zeta(sigma + i t) for an array of ordinates (same contract as zeta_reference)."""
    t = np.asarray(t, dtype=float)
    out = np.empty(t.shape, dtype=complex)
    flat = t.ravel()
    res = out.ravel()
    ta = np.abs(flat)
    order = np.argsort(ta, kind="stable")
    tas = ta[order]
    for a, b, N in _line_chunks(tas, lambda N: max(1, _kernels._CHUNK_ELEMS // N)):
        idx = order[a:b]
        w, lhi, llo, _ = _main_weights(sigma, N)
        tail, _ = _em_tail(sigma, flat[idx], N)
        res[idx] = _kernels.sum_points(w, lhi, llo, flat[idx]) + tail
    if sigma == 1.0:
        res[flat == 0] = complex("inf")
    return out


def zeta_on_panels(sigma: float, starts, offsets) -> np.ndarray:
    """zeta(sigma + i(start + offset)) for every start/offset pair, shape (P, Q).

    ``starts`` ascending; offsets small.  The main sum is a matrix product.
    """
    starts = np.asarray(starts, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    out = np.empty((starts.size, offsets.size), dtype=complex)
    reach = float(np.max(np.abs(offsets))) if offsets.size else 0.0
    ta = np.abs(starts) + reach
    order = np.argsort(ta, kind="stable")
    tas = ta[order]
    for a, b, N in _line_chunks(tas, lambda N: max(1, (_kernels._CHUNK_ELEMS // N) // 4)):
        idx = order[a:b]
        w, lhi, llo, _ = _main_weights(sigma, N)
        pts = starts[idx][:, None] + offsets[None, :]
        tail, _ = _em_tail(sigma, pts.ravel(), N)
        out[idx] = _kernels.sum_on_panels(w, lhi, llo, starts[idx], offsets) + tail.reshape(pts.shape)
    return out


def zeta_grid(sigma: float, grid) -> np.ndarray:
    """zeta(sigma + i t) at the points of a GridSpec, via the factorized grid kernel."""
    t = grid.points()
    out = np.empty(t.size, dtype=complex)
    block = 4096
    for a in range(0, t.size, block):
        b = min(t.size, a + block)
        N = em_cutoff(float(np.max(np.abs(t[a:b]))))
        w, lhi, llo, _ = _main_weights(sigma, N)
        tail, _ = _em_tail(sigma, t[a:b], N)
        out[a:b] = _kernels.sum_on_grid(w, lhi, llo, t[a], grid.dt, b - a) + tail
    if sigma == 1.0:
        out[t == 0] = complex("inf")
    return out


# ---------------------------------------------------------------------------
# approximate functional equations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AfeResult:
    value: complex
    x_cut: float
    y_cut: float
    error_budget: float
    main: complex = 0j
    dual: complex = 0j
    chi: complex = 0j


def afe_parts(s, x=None):
    """Main sum over n <= x, dual sum over n <= y = |t|/(2 pi x) and chi(s)."""
    s = complex(s)
    ta = abs(s.imag)
    if x is None:
        x = math.sqrt(ta / (2 * math.pi))
    y = ta / (2 * math.pi * x)
    main = zeta_sum(DirichletBlock(0, x, s.real), s.imag) if x >= 1 else 0j
    dual = zeta_sum(DirichletBlock(0, y, 1 - s.real), -s.imag) if y >= 1 else 0j
    return main, dual, chi_factor(s), x, y


def zeta_afe(s) -> AfeResult:
    """Symmetric approximate functional equation x = y = sqrt(|t|/2pi)."""
    s = _check_s(s)
    sigma, t = s.real, s.imag
    if not (0.0 <= sigma <= 1.0) or abs(t) < 2 * math.pi:
        raise InputDomainError("zeta_afe needs sigma in [0, 1] and |t| >= 2 pi")
    main, dual, chi, x, y = afe_parts(s)
    budget = math.log(abs(t)) / x ** sigma + x ** (1 - sigma) / math.sqrt(abs(t))
    return AfeResult(main + chi * dual, x, y, budget, main, dual, chi)


def zeta_afe_long(s, T: float) -> complex:
    """sum_{n <= T} n^{-s}, an approximation to zeta(s) for t in [T, 2T]."""
    s = _check_s(s)
    if T < 3 or s.real < 0.5 or not (T <= s.imag <= 2 * T):
        raise InputDomainError("zeta_afe_long needs T >= 3, sigma >= 1/2, t in [T, 2T]")
    return zeta_sum(DirichletBlock(0, T, s.real), s.imag)


# ---------------------------------------------------------------------------
# logarithmic derivative and the smoothed von Mangoldt identity
# ---------------------------------------------------------------------------

def log_deriv_zeta(s, floor: float = 1e-10) -> complex:
    """zeta'(s)/zeta(s) from the Euler-Maclaurin pair (zeta, zeta')."""
    z, dz = zeta_and_derivative(s)
    if abs(z) < floor:
        raise ConditioningError(f"|zeta(s)| = {abs(z):.3e} too small at s = {s}", abs(z))
    return dz / z


def smoothed_mangoldt_sum(s, Y: float) -> complex:
    """sum_n Lambda(n) e^{-n/Y} n^{-s}, truncated where e^{-n/Y} < 1e-18."""
    s = complex(s)
    n_max = int(math.ceil(Y * 18 * math.log(10)))
    lam = mangoldt(n_max)
    w = lam[2:] * np.exp(-np.arange(2, n_max + 1) / Y)
    lhi, llo = _kernels.logs(2, n_max)
    w = w * np.exp(-s.real * lhi)
    return _kernels.sum_at(w, lhi, llo, s.imag)


def smoothed_mangoldt_residual(s, Y: float, T: float) -> float:
    """|sum Lambda(n) e^{-n/Y} n^{-s} + zeta'/zeta(s)|."""
    s = _check_s(s)
    if not 0.5 <= s.real <= 2:
        raise InputDomainError("sigma must lie in [1/2, 2]")
    lo = math.log(T) ** 2 / 2
    if not lo <= abs(s.imag) <= T:
        raise InputDomainError(f"|Im s| must lie in [{lo:.3g}, {T:g}]")
    if Y < 10:
        raise InputDomainError("Y must be at least 10")
    return abs(smoothed_mangoldt_sum(s, Y) + log_deriv_zeta(s))


# ---------------------------------------------------------------------------
# Perron's formula and the majorant integral
# ---------------------------------------------------------------------------

_GL_CACHE = {}


def _gauss_legendre(m):
    if m not in _GL_CACHE:
        _GL_CACHE[m] = np.polynomial.legendre.leggauss(m)
    return _GL_CACHE[m]


def _panel_rule(lo, hi, width, focus, m):
    """Composite Gauss-Legendre on [lo, hi]: uniform panels of ``width``, split
    geometrically around every point of ``focus`` down to ~1e-3.

    Returns (uniform_starts, offsets, uniform_weights, extra_nodes, extra_weights);
    uniform panels share offsets and are evaluated as one factorized block.
    """
    x, wq = _gauss_legendre(m)
    n_uni = max(1, int(round((hi - lo) / width)))
    width = (hi - lo) / n_uni
    edges = [lo + width * np.arange(n_uni + 1)]
    for f in focus:
        if lo < f < hi:
            d = width * 0.5 ** np.arange(0, 1 + int(math.log2(width / 1e-3)))
            edges.append(np.array([f]))
            edges.append(f - d)
            edges.append(f + d)
    e = np.unique(np.clip(np.concatenate(edges), lo, hi))
    a, b = e[:-1], e[1:]
    keep = b - a > 1e-14
    a, b = a[keep], b[keep]
    uni = np.abs((b - a) - width) <= 1e-9 * width
    starts = a[uni]
    offsets = 0.5 * width * (x + 1)
    uw = 0.5 * width * wq
    h = (b - a)[~uni]
    extra_nodes = (a[~uni][:, None] + 0.5 * h[:, None] * (x + 1)[None, :]).ravel()
    extra_w = (0.5 * h[:, None] * wq[None, :]).ravel()
    return starts, offsets, uw, extra_nodes, extra_w


def _integrate_line(sigma_line, t, lo, hi, kernel, focus, resolution, magnitude=False,
                    window=None, m=10):
    """int_{lo}^{hi} F(zeta(sigma_line + i(t+u))) * kernel(u) du, F = id or |.|.

    ``window=(a, b)`` removes u in (a, b) from the domain.
    """
    width = 0.5 / resolution
    pieces = [(lo, hi)]
    if window is not None:
        a, b = window
        pieces = [(p, q) for p, q in [(lo, min(hi, a)), (max(lo, b), hi)] if q - p > 1e-12]
    total = 0j
    for p, q in pieces:
        w = min(width, q - p)
        starts, offs, uw, xn, xw = _panel_rule(p, q, w, focus, m)
        if starts.size:
            z = zeta_on_panels(sigma_line, t + starts, offs)
            u = starts[:, None] + offs[None, :]
            f = np.abs(z) if magnitude else z
            total += np.sum(f * kernel(u) * uw[None, :])
        if xn.size:
            z = zeta_line(sigma_line, t + xn)
            f = np.abs(z) if magnitude else z
            total += np.sum(f * kernel(xn) * xw)
    return total


def _perron_domain(sigma, t, T, A=None, B=None):
    if T <= math.e ** 2:
        raise InputDomainError("T must exceed e^2")
    if not 0.5 <= sigma <= 1 - 2 / math.log(T):
        raise InputDomainError("sigma must lie in [1/2, 1 - 2/log T]")
    if abs(t) < T ** ((1 - sigma) / 2):
        raise InputDomainError("need |t| >= T^((1-sigma)/2)")
    if A is not None and not (1 <= A < B <= 2 * A <= 2 * math.sqrt(T)):
        raise InputDomainError("need 1 <= A < B <= 2A <= 2 T^(1/2)")


def perron_integral(sigma, t, T, A, B, resolution=1):
    """(1/2 pi i) int_{c-iT}^{c+iT} zeta(s+sigma+it) (B^s - A^s)/s ds, c = 1/log T."""
    c = 1 / math.log(T)
    la, lb = math.log(A), math.log(B)

    def kernel(v):
        s = c + 1j * v
        return (np.exp(s * lb) - np.exp(s * la)) / s

    # |zeta| peaks where s + sigma + it is nearest 1, i.e. v = -t; 1/s peaks at v = 0
    val = _integrate_line(sigma + c, t, -T, T, kernel, (0.0, -t), resolution)
    return val / (2 * math.pi)


def perron_check(sigma: float, t: float, T: float, A: float, B: float, resolution=1) -> float:
    """|block sum - (Perron line integral + pole term)|; an O(1) quantity.

    An integer endpoint sits on a jump of the Perron kernel, where the
    integral converges to the midpoint, so its term enters with weight 1/2.
    """
    _perron_domain(sigma, t, T, A, B)
    direct = zeta_sum(DirichletBlock(A, B, sigma), t)
    s = complex(sigma, t)
    if float(B).is_integer():
        direct -= 0.5 * B ** (-s)
    if float(A).is_integer():
        direct += 0.5 * A ** (-s)
    s0 = complex(1 - sigma, -t)
    pole = (np.exp(s0 * math.log(B)) - np.exp(s0 * math.log(A))) / s0
    integral = perron_integral(sigma, t, T, A, B, resolution)
    dev = abs(direct - (integral + pole))
    if not math.isfinite(dev):
        raise NumericalError("Perron quadrature produced a non-finite value")
    return dev


def majorant_integral(sigma: float, t: float, T: float, window: float = 10.0,
                      resolution=1) -> float:
    """int_{-T}^{T} 1_{|t+u| > window} |zeta(sigma + 1/log T + i(t+u))| du / (|u| + 1/log T)."""
    _perron_domain(sigma, t, T)
    c = 1 / math.log(T)
    val = _integrate_line(sigma + c, t, -T, T, lambda u: 1.0 / (np.abs(u) + c), (0.0,),
                          resolution, magnitude=True, window=(-t - window, -t + window))
    v = float(val.real)
    if not math.isfinite(v):
        raise NumericalError("majorant quadrature produced a non-finite value")
    return v
