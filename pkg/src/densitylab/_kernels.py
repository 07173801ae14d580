"""Low-level numerics: double-double phases, the log table and Dirichlet-sum kernels.

Everything that touches ``t * log n`` goes through here.  Phases are reduced
modulo 2*pi in doubled precision so that |t| up to 1e8 keeps each term's phase
accurate to ~1e-15.
"""

import math
import threading

import gmpy2
import numpy as np

TWO_PI_HI = 6.283185307179586
TWO_PI_LO = 2.4492935982947064e-16
_SPLIT = 134217729.0  # 2**27 + 1

MAX_TERMS = 20_000_000
# Cap on elements of a complex work matrix (~32 MB).
_CHUNK_ELEMS = 1 << 21
# Below this bound on |t|*log(n) a plain double product is accurate to ~1.5e-11.
_PLAIN_PHASE_LIMIT = float(1 << 17)


def two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    c = _SPLIT * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def reduce_phase(t, hi, lo):
    """Return ``t*(hi+lo)`` reduced to roughly (-pi, pi], in double precision.

    ``t`` and the log pair broadcast against each other.
    """
    t = np.asarray(t, dtype=float)
    p, perr = two_prod(t, hi)
    perr = perr + t * lo
    k = np.rint(p / TWO_PI_HI)
    kh, kl = two_prod(k, TWO_PI_HI)
    return (p - kh) + ((perr - kl) - k * TWO_PI_LO)


# ---------------------------------------------------------------------------
# log table
# ---------------------------------------------------------------------------

def smallest_prime_factor(n_max):
    """spf[n] for 0 <= n <= n_max (spf[0] = spf[1] = 0)."""
    spf = np.zeros(n_max + 1, dtype=np.int32 if n_max < 2**31 - 1 else np.int64)
    if n_max < 2:
        return spf
    spf[2::2] = 2
    for p in range(3, math.isqrt(n_max) + 1, 2):
        if spf[p] == 0:
            seg = spf[p * p::2 * p]
            seg[seg == 0] = p
            spf[p * p::2 * p] = seg
    rest = np.flatnonzero(spf == 0)
    rest = rest[rest >= 2]
    spf[rest] = rest
    return spf


class _LogTable:
    """log n for 1 <= n <= size as an unevaluated (hi, lo) double pair."""

    def __init__(self):
        self._lock = threading.Lock()
        self.size = 0
        self.hi = np.zeros(1)
        self.lo = np.zeros(1)

    def ensure(self, n_max):
        if n_max <= self.size:
            return
        if n_max > MAX_TERMS:
            from .errors import CapacityError
            raise CapacityError("log table size", MAX_TERMS, n_max)
        with self._lock:
            if n_max <= self.size:
                return
            self._build(min(MAX_TERMS, max(n_max, 2 * self.size, 1 << 14)))

    def _build(self, size):
        spf = smallest_prime_factor(size)
        hi = np.zeros(size + 1)
        lo = np.zeros(size + 1)
        primes = np.flatnonzero(spf[2:] == np.arange(2, size + 1)) + 2
        with gmpy2.context(gmpy2.get_context(), precision=128):
            for p in primes.tolist():
                v = gmpy2.log(p)
                h = float(v)
                hi[p] = h
                lo[p] = float(v - h)
        # log n = log p + log(n/p); n/p < n, so fill by doubling blocks.
        start = 4
        while start <= size:
            stop = min(2 * start, size + 1)
            n = np.arange(start, stop)
            p = spf[n]
            comp = p != n
            n, p = n[comp], p[comp]
            m = n // p
            s, e = two_sum(hi[p], hi[m])
            e = e + (lo[p] + lo[m])
            h = s + e
            hi[n] = h
            lo[n] = e - (h - s)
            start = stop
        self.hi, self.lo, self.size = hi, lo, size


LOG_TABLE = _LogTable()


def logs(n_lo, n_hi):
    """(hi, lo) arrays of log n for integers n_lo <= n <= n_hi."""
    LOG_TABLE.ensure(n_hi)
    return LOG_TABLE.hi[n_lo:n_hi + 1], LOG_TABLE.lo[n_lo:n_hi + 1]


# ---------------------------------------------------------------------------
# Dirichlet-sum kernels.  ``w`` holds c_n * n^{-sigma} for n = n_lo..n_hi.
# ---------------------------------------------------------------------------

def _phases(t, lhi, llo):
    t = np.asarray(t, dtype=float)
    if t.size and lhi.size and float(np.max(np.abs(t))) * float(lhi[-1]) < _PLAIN_PHASE_LIMIT:
        return np.multiply.outer(t, lhi) if t.ndim else t * lhi
    if t.ndim:
        return reduce_phase(t[:, None], lhi[None, :], llo[None, :])
    return reduce_phase(t, lhi, llo)


def cis(x):
    """exp(-i x) for real x."""
    out = np.empty(np.shape(x), dtype=complex)
    np.cos(x, out=out.real)
    np.sin(x, out=out.imag)
    np.negative(out.imag, out=out.imag)
    return out


def sum_at(w, lhi, llo, t):
    """sum_n w_n e^{-i t log n} at one ordinate."""
    if w.size == 0:
        return 0j
    return complex(np.dot(cis(_phases(float(t), lhi, llo)), w))


def terms_on_grid(w, lhi, llo, t):
    """Yield (slice, term matrix) over chunks of an ascending equispaced grid ``t``.

    Each chunk is anchored at its first point; the anchor phase is reduced
    in doubled precision and the small offset phases are added in double.
    """
    n_terms = max(w.size, 1)
    rows = max(1, min(4096, _CHUNK_ELEMS // n_terms))
    # keep offset*log(n) below ~2e3 so the plain offset phase stays ~1e-13
    if lhi.size and t.size > 1:
        span = 2048.0 / max(float(lhi[-1]), 1.0)
        step = abs(float(t[1] - t[0])) or 1.0
        rows = max(1, min(rows, int(span / step) + 1))
    for a in range(0, t.size, rows):
        b = min(t.size, a + rows)
        anchor = t[a]
        base = reduce_phase(anchor, lhi, llo)
        off = t[a:b] - anchor
        ph = base[None, :] + np.multiply.outer(off, lhi)
        yield slice(a, b), cis(ph) * w[None, :]


def sum_points(w, lhi, llo, t):
    """sum_n w_n e^{-i t_k log n} for an arbitrary array of ordinates."""
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape, dtype=complex)
    if w.size == 0 or t.size == 0:
        return out
    flat = t.ravel()
    res = out.ravel()
    rows = max(1, _CHUNK_ELEMS // w.size)
    for a in range(0, flat.size, rows):
        b = min(flat.size, a + rows)
        res[a:b] = cis(_phases(flat[a:b], lhi, llo)) @ w
    return out


def sum_on_panels(w, lhi, llo, starts, offsets):
    """Sums at every point ``starts[p] + offsets[q]``, returned as a (P, Q) array.

    The phase factorizes, so the whole block is one matrix product
    ``(P * w) @ Q.T`` with P from the starts and Q from the offsets.  Offsets
    must be small (|offset * log n| << 1e4) since they are applied in double.
    """
    starts = np.asarray(starts, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    if w.size == 0:
        return np.zeros((starts.size, offsets.size), dtype=complex)
    q = cis(np.multiply.outer(offsets, lhi))
    rows = max(1, _CHUNK_ELEMS // w.size)
    out = np.empty((starts.size, offsets.size), dtype=complex)
    for a in range(0, starts.size, rows):
        b = min(starts.size, a + rows)
        p = cis(_phases(starts[a:b], lhi, llo)) * w[None, :]
        out[a:b] = p @ q.T
    return out


def _needs_correction(err, w, lhi):
    """Is the first-order grid-mismatch term above ~1e-12?"""
    return float(np.max(np.abs(err), initial=0.0)) * float(np.sum(np.abs(w) * lhi)) > 1e-12


def _sum_on_grid_panels(w, lhi, llo, t, dt):
    count = t.size
    fine = 64
    nblk = -(-count // fine)
    offsets = np.arange(fine, dtype=float) * dt
    starts = t[::fine]
    nominal = np.repeat(starts, fine)[:count]
    err = (t - nominal) - np.tile(offsets, nblk)[:count]
    g = sum_on_panels(w, lhi, llo, starts, offsets).ravel()[:count]
    if _needs_correction(err, w, lhi):
        g1 = sum_on_panels(w * lhi, lhi, llo, starts, offsets).ravel()[:count]
        g = g - 1j * err * g1
    return g


# Taylor windows: |tau * u| <= _RHO on every (window, n-block) pair and the
# series is cut where _RHO^D / D! < 1e-16.
_RHO = 1.0
_TAYLOR_D = 19
_FACT = np.array([math.factorial(d) for d in range(_TAYLOR_D)], dtype=float)


def _log_blocks(lhi, width):
    """Start indices of consecutive runs of ``lhi`` spanning at most ``width``."""
    starts = [0]
    i = 0
    n = lhi.size
    while True:
        i = int(np.searchsorted(lhi, lhi[i] + width, side="right"))
        if i >= n:
            break
        starts.append(i)
    return np.array(starts)


def _taylor_plan(lhi, count, dt):
    """Best (P, block starts, estimated cost) for windowed Taylor evaluation, or None."""
    n = lhi.size
    best = None
    for P in (32, 64, 128, 256, 512, 1024, 2048):
        if P > count:
            break
        H = P * dt
        bs = _log_blocks(lhi, 4 * _RHO / H)
        cost = count * (n * _TAYLOR_D / P + _TAYLOR_D * bs.size + 2 * bs.size)
        if best is None or cost < best[2]:
            best = (P, bs, cost)
    return best


def _powers(x, D):
    out = np.empty(x.shape + (D,), dtype=x.dtype)
    out[..., 0] = 1
    for d in range(1, D):
        out[..., d] = out[..., d - 1] * x
    return out


def _sum_on_grid_taylor(w, lhi, llo, t, t0, dt, P, bstarts):
    count = t.size
    D = _TAYLOR_D
    bends = np.append(bstarts[1:], lhi.size)
    logc = 0.5 * (lhi[bstarts] + lhi[bends - 1])
    u = (lhi - np.repeat(logc, bends - bstarts)) + llo
    U = _powers(u, D)
    W = -(-count // P)
    centers = t0 + (np.arange(W) * P + 0.5 * (P - 1)) * dt
    tpad = np.concatenate([t, t0 + np.arange(count, W * P) * dt])
    # exact offsets from each window center (nearby doubles subtract exactly)
    tau = tpad.reshape(W, P) - centers[:, None]
    tau_nom = (np.arange(P) - 0.5 * (P - 1)) * dt
    phi = np.exp(-1j * np.multiply.outer(tau_nom, logc))  # P x B
    out = np.empty((W, P), dtype=complex)
    B = bstarts.size
    rows = max(1, _CHUNK_ELEMS // max(lhi.size, B * P))
    for a in range(0, W, rows):
        b = min(W, a + rows)
        E = cis(_phases(centers[a:b], lhi, llo)) * w[None, :]
        m = np.empty((b - a, B, D), dtype=complex)
        for j in range(B):
            m[:, j, :] = E[:, bstarts[j]:bends[j]] @ U[bstarts[j]:bends[j]]
        V = _powers(-1j * tau[a:b], D) / _FACT  # (w, p, d)
        G = np.matmul(m, V.transpose(0, 2, 1))  # (w, b, p)
        # phi is taken at the nominal offsets; the tiny remainder to the
        # exact offsets enters to first order
        err = tau[a:b] - tau_nom[None, :]
        out[a:b] = (np.einsum("wbp,pb->wp", G, phi)
                    - 1j * err * np.einsum("wbp,pb->wp", G, phi * logc[None, :]))
    return out.ravel()[:count]


def sum_on_grid(w, lhi, llo, t0, dt, count):
    """Sums at the grid points ``t0 + k*dt`` (as doubles), 0 <= k < count.

    Short blocks: 64 x 64 tiles of points factorized into coarse starts times
    fine offsets, one matrix product per tile row.  Long blocks: windows of
    P points around a center, with the n-range cut into runs short enough in
    log n that e^{-i tau log(n/c)} is a 19-term Taylor series; each window
    then costs N*19 + P*19*(#runs) instead of N*P.  Either way, the rounding
    gap between the double grid points and the factorized ordinates is
    removed to first order.
    """
    t = t0 + np.arange(count, dtype=float) * dt
    if w.size == 0:
        return np.zeros(count, dtype=complex)
    plan = _taylor_plan(lhi, count, dt) if w.size >= 256 else None
    if plan is None or plan[2] > 0.5 * count * w.size:
        return _sum_on_grid_panels(w, lhi, llo, t, dt)
    P, bstarts, _ = plan
    return _sum_on_grid_taylor(w, lhi, llo, t, t0, dt, P, bstarts)
