"""Finite unions of disjoint intervals, built from marked grid points."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InputDomainError


@dataclass(frozen=True)
class IntervalSet:
    """Disjoint ascending intervals ``[lo, hi]`` stored as a (k, 2) array."""

    intervals: np.ndarray = field(repr=False)
    discretization_error: float = 0.0

    def __post_init__(self):
        iv = np.asarray(self.intervals, dtype=float).reshape(-1, 2)
        if iv.size:
            if np.any(iv[:, 0] >= iv[:, 1]):
                raise InputDomainError("every interval needs lo < hi")
            if np.any(iv[1:, 0] <= iv[:-1, 1]):
                raise InputDomainError("intervals must be disjoint and ascending")
        iv = iv.copy()
        iv.setflags(write=False)
        object.__setattr__(self, "intervals", iv)

    @classmethod
    def empty(cls):
        return cls(np.zeros((0, 2)))

    @classmethod
    def from_marks(cls, t, marked, dt):
        """Each marked grid point t contributes [t - dt/2, t + dt/2]; touching cells merge."""
        t = np.asarray(t, dtype=float)
        marked = np.asarray(marked, dtype=bool)
        if not marked.any():
            return cls.empty()
        m = marked.astype(np.int8)
        edges = np.diff(np.concatenate([[0], m, [0]]))
        first = np.flatnonzero(edges == 1)
        last = np.flatnonzero(edges == -1) - 1
        iv = np.column_stack([t[first] - dt / 2, t[last] + dt / 2])
        boundaries = 2 * first.size
        return cls(iv, discretization_error=boundaries * dt / 2)

    @property
    def measure(self) -> float:
        if self.intervals.size == 0:
            return 0.0
        return math.fsum((self.intervals[:, 1] - self.intervals[:, 0]).tolist())

    def __len__(self):
        return self.intervals.shape[0]

    def contains(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.intervals.size == 0:
            return np.zeros(x.shape, dtype=bool)
        k = np.searchsorted(self.intervals[:, 0], x, side="right") - 1
        ok = k >= 0
        kk = np.clip(k, 0, None)
        return ok & (x <= self.intervals[kk, 1])

    def without(self, lo, hi) -> "IntervalSet":
        """The set minus the open interval (lo, hi)."""
        out = []
        for a, b in self.intervals.tolist():
            if b <= lo or a >= hi:
                out.append((a, b))
                continue
            if a < lo:
                out.append((a, lo))
            if b > hi:
                out.append((hi, b))
        return IntervalSet(np.array(out).reshape(-1, 2), self.discretization_error)

    def write_csv(self, path, sidecar: dict | None = None, extra: dict | None = None):
        """RFC-4180 CSV of ``t_lo,t_hi`` rows plus an optional JSON sidecar ``<path>.json``.

        ``extra`` adds constant columns (e.g. provenance hashes) to every row.
        """
        path = Path(path)
        extra = dict(extra or {})
        with path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\r\n")
            w.writerow(["t_lo", "t_hi", *extra])
            for a, b in self.intervals.tolist():
                w.writerow([repr(a), repr(b), *extra.values()])
        if sidecar is not None:
            meta = dict(sidecar)
            meta.setdefault("measure", self.measure)
            meta.setdefault("discretization_error", self.discretization_error)
            meta.setdefault("intervals", len(self))
            path.with_suffix(path.suffix + ".json").write_text(
                json.dumps(meta, sort_keys=True, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def read_csv(cls, path):
        with Path(path).open(newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        vals = [(float(r[0]), float(r[1])) for r in rows[1:]]
        return cls(np.array(vals).reshape(-1, 2))
