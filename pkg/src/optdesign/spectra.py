"""Eigenvalues of small symmetric matrices and exact integer certificates.

The eigensolver is a cyclic Jacobi scheme applied to a whole stack of
matrices at once, so a batch of 10^5 Laplacians costs the same number of
rotation steps as a single one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

DEFAULT_CLUSTER_TOL = 1e-6
NULL_EIGEN_TOL = 1e-8


class SpectrumError(ValueError):
    pass


def sym_eig_batch(mats, tol: float = 1e-12, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues (nonincreasing) of each matrix in an ``(N, n, n)`` stack."""
    a = np.array(mats, dtype=float)
    if a.ndim != 3 or a.shape[1] != a.shape[2]:
        raise ValueError("expected a stack of square matrices")
    count, n, _ = a.shape
    if count == 0:
        return np.zeros((0, n))
    scale = np.maximum(1.0, np.abs(a).max(axis=(1, 2)))
    if np.any(np.abs(a - a.transpose(0, 2, 1)).max(axis=(1, 2)) > 1e-12 * scale):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.transpose(0, 2, 1))
    fro = np.sqrt((a * a).sum(axis=(1, 2)))
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        off = np.sqrt((a[:, offmask] ** 2).sum(axis=1))
        if np.all(off <= tol * fro):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[:, p, q]
                active = apq != 0.0
                if not active.any():
                    continue
                safe = np.where(active, apq, 1.0)
                # a negligible apq overflows theta to inf, giving t = 0 (no rotation)
                with np.errstate(over="ignore"):
                    theta = (a[:, q, q] - a[:, p, p]) / (2.0 * safe)
                    t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = (t * c)[:, None]
                c = c[:, None]
                col_p = a[:, :, p].copy()
                col_q = a[:, :, q]
                a[:, :, p] = c * col_p - s * col_q
                a[:, :, q] = s * col_p + c * col_q
                row_p = a[:, p, :].copy()
                row_q = a[:, q, :]
                a[:, p, :] = c * row_p - s * row_q
                a[:, q, :] = s * row_p + c * row_q
                a[:, p, q] = np.where(active, 0.0, a[:, p, q])
                a[:, q, p] = a[:, p, q]
    eig = np.diagonal(a, axis1=1, axis2=2)
    return -np.sort(-eig, axis=1)


def sym_eig(m) -> np.ndarray:
    """Eigenvalues of one symmetric matrix, sorted nonincreasing."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    return sym_eig_batch(m[None])[0]


def cluster_multiplicities(values: Sequence[float], tol: float = DEFAULT_CLUSTER_TOL) -> list[tuple[float, int]]:
    """Group a nonincreasing sequence into (value, multiplicity) runs.

    Neighbours join a run when their gap is at most ``tol`` times the larger
    magnitude; the reported value is the run mean.
    """
    clusters: list[list[float]] = []
    prev = None
    for x in values:
        if prev is not None and prev - x <= tol * max(abs(prev), abs(x), 1e-300):
            clusters[-1].append(x)
        else:
            clusters.append([x])
        prev = x
    return [(math.fsum(c) / len(c), len(c)) for c in clusters]


@dataclass(frozen=True)
class Spectrum:
    """Nonzero eigenvalues, nonincreasing, with multiplicity clusters."""

    values: tuple[float, ...]
    clusters: tuple[tuple[float, int], ...]

    @classmethod
    def from_values(cls, values, tol: float = DEFAULT_CLUSTER_TOL) -> "Spectrum":
        vals = tuple(sorted((float(x) for x in values), reverse=True))
        if not vals:
            raise SpectrumError("empty spectrum")
        if vals[-1] <= 0:
            raise SpectrumError("spectrum values must be positive")
        return cls(vals, tuple(cluster_multiplicities(vals, tol)))

    @property
    def distinct_count(self) -> int:
        return len(self.clusters)

    def __len__(self):
        return len(self.values)

    def notation(self) -> str:
        return "{" + ", ".join(f"{v:.6g}^{t}" for v, t in self.clusters) + "}"


def _drop_null(eigs: np.ndarray, trace: float, tol: float = DEFAULT_CLUSTER_TOL) -> Spectrum:
    thresh = NULL_EIGEN_TOL * max(abs(trace), 1.0)
    small = np.abs(eigs) <= thresh
    if small.sum() != 1:
        raise SpectrumError(f"expected exactly one null eigenvalue, found {int(small.sum())} "
                            "(design not connected?)")
    return Spectrum.from_values(eigs[~small], tol)


def nonzero_spectrum(c, tol: float = DEFAULT_CLUSTER_TOL) -> Spectrum:
    """Spectrum of an information matrix with its single null eigenvalue removed."""
    arr = c.to_array() if hasattr(c, "to_array") else np.asarray(c, dtype=float)
    eigs = sym_eig(arr)
    return _drop_null(eigs, float(np.trace(arr)), tol)


def nonzero_spectra_batch(mats: np.ndarray, tol: float = DEFAULT_CLUSTER_TOL) -> list[Spectrum]:
    eigs = sym_eig_batch(mats)
    traces = np.trace(mats, axis1=1, axis2=2)
    return [_drop_null(e, float(t), tol) for e, t in zip(eigs, traces)]


def bareiss_det(mat) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    a = [[int(x) for x in row] for row in mat]
    n = len(a)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def spanning_tree_count(g) -> int:
    """Number of spanning trees (matrix-tree theorem, exact)."""
    if g.n <= 1:
        return 1
    lap = g.laplacian()
    return bareiss_det([row[:-1] for row in lap[:-1]])


def integer_eigenvalue_certificate(g, s: int) -> bool:
    """True iff the integer ``s`` is a Laplacian eigenvalue of ``g`` (exact)."""
    lap = g.laplacian()
    for i in range(g.n):
        lap[i][i] -= s
    return bareiss_det(lap) == 0
