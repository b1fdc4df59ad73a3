"""Symmetric eigendecomposition, eigenvalue grouping, and alignment tools.

The eigensolver is a cyclic Jacobi iteration: deterministic for identical
input bits, independent of any BLAS threading, and accurate to near machine
precision at the matrix sizes this package targets.  ``numpy.linalg.eigh``
serves as an independent oracle in the test suite, never in library code
paths that feed the augmentations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import CapabilityError, ValidationError
from .graphs import Permutation

_MATCH_CAP = 8
_MAX_SWEEPS = 100


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues ascending (repeats included) with orthonormal columns."""

    eigenvalues: np.ndarray
    vectors: np.ndarray

    @property
    def n(self):
        return self.eigenvalues.shape[0]


@dataclass(frozen=True, eq=False)
class GroupedSpectrum:
    """Eigenspaces merged by the gap rule of :func:`group_eigenspaces`.

    ``values[j]`` is the group mean, ``multiplicities[j]`` its size, and
    ``blocks[j]`` the n x multiplicities[j] slice of the eigenvector matrix.
    Groups are ascending; multiplicities sum to n.
    """

    values: np.ndarray
    multiplicities: tuple
    blocks: tuple
    tau: float

    @property
    def n(self):
        return sum(self.multiplicities)

    @property
    def k(self):
        return len(self.multiplicities)


def eig_sym(m, sym_tol=1e-10):
    """Eigendecomposition of a symmetric matrix via cyclic Jacobi sweeps.

    Parameters
    ----------
    m : (n, n) array_like
        Symmetric matrix.  Asymmetry beyond ``sym_tol`` (relative to the
        largest entry) is a validation error.
    sym_tol : float
        Symmetry tolerance.

    Returns
    -------
    Spectrum
        Eigenvalues ascending, eigenvectors as orthonormal columns, with
        ``vectors @ diag(eigenvalues) @ vectors.T`` reconstructing ``m``.

    Notes
    -----
    Sweeps run until the off-diagonal Frobenius mass drops below
    1e-12 * ||m||_F.  The rotation that zeroes entry (p, q) uses the
    stable half-angle form t = sign(tau) / (|tau| + sqrt(1 + tau^2)).
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n < 1:
        raise ValidationError("matrix must be at least 1 x 1")
    if not np.isfinite(a).all():
        raise ValidationError("matrix contains non-finite entries")
    scale = max(1.0, float(np.abs(a).max()))
    if np.abs(a - a.T).max() > sym_tol * scale:
        raise ValidationError(f"matrix is not symmetric within tolerance {sym_tol}")

    a = (a + a.T) / 2.0
    if n == 1:
        return Spectrum(a[0].copy(), np.eye(1))

    v = np.eye(n)
    target = 1e-12 * np.linalg.norm(a, "fro")
    for _ in range(_MAX_SWEEPS):
        # direct off-diagonal mass: the subtraction form cancels to NaN
        # once the matrix is numerically diagonal
        b = a.copy()
        np.fill_diagonal(b, 0.0)
        if np.linalg.norm(b, "fro") <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(tau) > 1e150:
                    t = 1.0 / (2.0 * tau)
                else:
                    t = np.sign(tau) if tau != 0.0 else 1.0
                    t = t / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        raise RuntimeError(f"Jacobi iteration failed to converge in {_MAX_SWEEPS} sweeps")

    order = np.argsort(np.diag(a), kind="stable")
    return Spectrum(np.diag(a)[order].copy(), v[:, order].copy())


def default_group_tau(spectrum):
    """Gap threshold 1e-6 * max(1, largest eigenvalue)."""
    return 1e-6 * max(1.0, float(spectrum.eigenvalues[-1]))


def group_eigenspaces(spectrum, tau):
    """Merge consecutive eigenvalues into groups wherever the gap <= tau.

    Greedy left-to-right: a new group starts exactly when the gap to the
    previous eigenvalue exceeds ``tau``.  Requires ``tau > 0``.
    """
    if not (isinstance(tau, (int, float)) and tau > 0):
        raise ValidationError(f"tau must be > 0, got {tau!r}")
    vals = spectrum.eigenvalues
    bounds = [0]
    for i in range(1, len(vals)):
        if vals[i] - vals[i - 1] > tau:
            bounds.append(i)
    bounds.append(len(vals))
    reps, mults, blocks = [], [], []
    for lo, hi in zip(bounds[:-1], bounds[1:]):
        reps.append(float(vals[lo:hi].mean()))
        mults.append(hi - lo)
        blocks.append(spectrum.vectors[:, lo:hi].copy())
    return GroupedSpectrum(np.array(reps), tuple(mults), tuple(blocks), float(tau))


@dataclass(frozen=True, eq=False)
class AlignResult:
    q: np.ndarray
    dist: float


def procrustes_align(x, y):
    """Best orthogonal right-alignment of ``y`` onto ``x``.

    Solves min_{q in O(p)} ||x - y q||_F for (n, p) arrays ``x`` and ``y``
    via the SVD of y^T x; reflections are allowed.  Returns the optimal
    ``q`` and the residual distance.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.ndim != 2 or x.shape != y.shape:
        raise ValidationError(f"shape mismatch: {x.shape} vs {y.shape}")
    u, _, vt = np.linalg.svd(y.T @ x)
    q = u @ vt
    dist = float(np.linalg.norm(x - y @ q, "fro"))
    return AlignResult(q, dist)


@dataclass(frozen=True, eq=False)
class MatchResult:
    perm: Permutation
    dist: float


def match_permutation(l, l2):
    """Brute-force node matching between two symmetric matrices.

    Minimizes ||l - P l2 P^T||_F over all permutation matrices; ties break
    toward the lexicographically smallest mapping.  Capped at n = 8
    (factorial search), larger inputs raise :class:`CapabilityError`.
    """
    l = np.asarray(l, dtype=np.float64)
    l2 = np.asarray(l2, dtype=np.float64)
    if l.ndim != 2 or l.shape != l2.shape or l.shape[0] != l.shape[1]:
        raise ValidationError(f"expected equal square shapes, got {l.shape} vs {l2.shape}")
    n = l.shape[0]
    if n > _MATCH_CAP:
        raise CapabilityError(f"brute-force matching capped at n = {_MATCH_CAP}, got n = {n}")
    best_d2 = np.inf
    best = None
    inv = [0] * n
    for mapping in itertools.permutations(range(n)):
        for old, new in enumerate(mapping):
            inv[new] = old
        d2 = float(((l - l2[inv][:, inv]) ** 2).sum())
        if d2 < best_d2:
            best_d2 = d2
            best = mapping
    return MatchResult(Permutation(best), float(np.sqrt(best_d2)))


def spectral_norm(a):
    """||a||_2 (largest singular value); plumbing, not part of the ledger."""
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64), 2))


def fro_norm(a):
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64), "fro"))
