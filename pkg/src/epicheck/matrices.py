"""Symmetric positive-definite matrices and determinant-ratio gaps.

Exact linear-algebra layer used as the oracle for every Gaussian closed
form in the package: Cholesky log-determinants, principal minors, Schur
complements, and the superadditivity gaps of determinant ratios under
matrix addition (Bergstrom-type, one deleted row/column, and Ky Fan-type,
a leading principal block with a k-th root).  Also provides generators for
random well-conditioned instances and for the equal-minor family where the
determinant itself becomes superadditive along the segment between two
matrices.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DimensionError, NotPositiveDefiniteError, PreconditionError

SYMMETRY_RTOL = 1e-12
DET_MATCH_RTOL = 1e-9


class SpdMatrix:
    """Symmetric positive-definite matrix with a cached Cholesky factor.

    Symmetry is enforced entrywise to 1e-12 relative tolerance; positive
    definiteness is certified by the factorization itself.  The stored
    entries and factor are read-only.
    """

    __slots__ = ("entries", "chol", "_log_det")

    def __init__(self, entries) -> None:
        a = np.array(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise DimensionError("matrix dimension must be at least 1")
        tol = SYMMETRY_RTOL * np.maximum(1.0, np.abs(a))
        if np.any(np.abs(a - a.T) > tol):
            raise ValueError("matrix is not symmetric to 1e-12 relative tolerance")
        a = 0.5 * (a + a.T)
        try:
            chol = np.linalg.cholesky(a)
        except np.linalg.LinAlgError as exc:
            raise NotPositiveDefiniteError(
                "Cholesky factorization failed: matrix is not positive definite"
            ) from exc
        a.setflags(write=False)
        chol.setflags(write=False)
        self.entries = a
        self.chol = chol
        self._log_det = 2.0 * float(np.sum(np.log(np.diagonal(chol))))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def log_det(self) -> float:
        """log det, summed from the Cholesky pivots (no overflow for any dim)."""
        return self._log_det

    def __repr__(self) -> str:
        return f"SpdMatrix(dim={self.dim})"


def _logdet_raw(a: np.ndarray) -> float:
    try:
        chol = np.linalg.cholesky(a)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefiniteError(
            "Cholesky factorization failed: matrix is not positive definite"
        ) from exc
    return 2.0 * float(np.sum(np.log(np.diagonal(chol))))


def _as_spd(m) -> SpdMatrix:
    return m if isinstance(m, SpdMatrix) else SpdMatrix(m)


def log_det(m) -> float:
    """log det M via the cached Cholesky factor."""
    return _as_spd(m).log_det


def delete_row_col(m, i: int) -> SpdMatrix:
    """Principal minor that removes row and column ``i`` (0-based)."""
    m = _as_spd(m)
    n = m.dim
    if n < 2:
        raise DimensionError("cannot delete a row/column from a 1 x 1 matrix")
    if not 0 <= i < n:
        raise IndexError(f"index {i} out of range for dimension {n}")
    sub = np.delete(np.delete(m.entries, i, axis=0), i, axis=1)
    return SpdMatrix(sub)


def leading_principal(m, size: int) -> SpdMatrix:
    """Leading principal ``size`` x ``size`` block (first rows and columns)."""
    m = _as_spd(m)
    if not 1 <= size <= m.dim:
        raise DimensionError(f"size {size} out of range for dimension {m.dim}")
    return SpdMatrix(m.entries[:size, :size])


def schur_complement_last(m) -> float:
    """Schur complement of the leading (n-1) block: m_nn - v' P^-1 v.

    Equals det(M) / det(M with last row/column deleted).
    """
    m = _as_spd(m)
    n = m.dim
    if n < 2:
        raise DimensionError("Schur complement needs dimension at least 2")
    p = m.entries[:-1, :-1]
    v = m.entries[:-1, -1]
    lp = np.linalg.cholesky(p)
    t = np.linalg.solve(lp, v)
    return float(m.entries[-1, -1] - t @ t)


def _pair_dims(a: SpdMatrix, b: SpdMatrix) -> int:
    if a.dim != b.dim:
        raise DimensionError(f"dimension mismatch: {a.dim} vs {b.dim}")
    return a.dim


def _minor_logdet(a: np.ndarray, i: int) -> float:
    return _logdet_raw(np.delete(np.delete(a, i, axis=0), i, axis=1))


def bergstrom_gap(a: SpdMatrix, b: SpdMatrix, i: int) -> float:
    """Superadditivity slack of det ratios with row/column ``i`` deleted.

    Returns det(A+B)/det((A+B)_i) - det(A)/det(A_i) - det(B)/det(B_i),
    which is nonnegative for SPD inputs.
    """
    n = _pair_dims(a, b)
    if n < 2:
        raise DimensionError("gap needs dimension at least 2")
    if not 0 <= i < n:
        raise IndexError(f"index {i} out of range for dimension {n}")
    s = a.entries + b.entries
    term_s = np.exp(_logdet_raw(s) - _minor_logdet(s, i))
    term_a = np.exp(a.log_det - _minor_logdet(a.entries, i))
    term_b = np.exp(b.log_det - _minor_logdet(b.entries, i))
    return float(term_s - term_a - term_b)


def bergstrom_gap_all(a: SpdMatrix, b: SpdMatrix) -> np.ndarray:
    """Vector of row/column-deletion gaps for every index at once.

    Shares the three full-determinant factorizations across indices, so it
    is the cheap way to sweep all minors of an instance pair.
    """
    n = _pair_dims(a, b)
    if n < 2:
        raise DimensionError("gap needs dimension at least 2")
    s = a.entries + b.entries
    ld_s, ld_a, ld_b = _logdet_raw(s), a.log_det, b.log_det
    out = np.empty(n)
    for i in range(n):
        out[i] = (
            np.exp(ld_s - _minor_logdet(s, i))
            - np.exp(ld_a - _minor_logdet(a.entries, i))
            - np.exp(ld_b - _minor_logdet(b.entries, i))
        )
    return out


def kyfan_gap(a: SpdMatrix, b: SpdMatrix, k: int) -> float:
    """Slack of the k-th-root determinant-ratio inequality.

    Ratios are det(M) / det(leading (n-k) block), raised to 1/k; the sum
    ratio dominates the sum of the individual ratios.  k = 1 coincides with
    the row/column-deletion gap at the last index.
    """
    n = _pair_dims(a, b)
    if not 1 <= k <= n - 1:
        raise DimensionError(f"k must satisfy 1 <= k <= n-1, got k={k}, n={n}")
    size = n - k
    s = a.entries + b.entries
    term_s = np.exp((_logdet_raw(s) - _logdet_raw(s[:size, :size])) / k)
    term_a = np.exp((a.log_det - _logdet_raw(a.entries[:size, :size])) / k)
    term_b = np.exp((b.log_det - _logdet_raw(b.entries[:size, :size])) / k)
    return float(term_s - term_a - term_b)


def kyfan_gap_all(a: SpdMatrix, b: SpdMatrix) -> np.ndarray:
    """Vector of k-th-root gaps for every k in 1..n-1."""
    n = _pair_dims(a, b)
    if n < 2:
        raise DimensionError("gap needs dimension at least 2")
    s = a.entries + b.entries
    ld_s, ld_a, ld_b = _logdet_raw(s), a.log_det, b.log_det
    out = np.empty(n - 1)
    for k in range(1, n):
        size = n - k
        out[k - 1] = (
            np.exp((ld_s - _logdet_raw(s[:size, :size])) / k)
            - np.exp((ld_a - _logdet_raw(a.entries[:size, :size])) / k)
            - np.exp((ld_b - _logdet_raw(b.entries[:size, :size])) / k)
        )
    return out


def bonnesen_linear_gap(a: SpdMatrix, b: SpdMatrix, lam: float, i: int) -> float:
    """Superadditivity of the determinant itself along a segment.

    Requires det(A_i) = det(B_i) (relative tolerance 1e-9); under that
    hypothesis det(lam A + (1-lam) B) - lam det A - (1-lam) det B is
    nonnegative, and zero at the endpoints.
    """
    n = _pair_dims(a, b)
    if n < 2:
        raise DimensionError("gap needs dimension at least 2")
    if not 0 <= i < n:
        raise IndexError(f"index {i} out of range for dimension {n}")
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    det_ai = np.exp(_minor_logdet(a.entries, i))
    det_bi = np.exp(_minor_logdet(b.entries, i))
    if abs(det_ai - det_bi) > DET_MATCH_RTOL * max(abs(det_ai), abs(det_bi)):
        raise PreconditionError(
            f"minor determinants differ: det(A_{i}) = {det_ai!r}, det(B_{i}) = {det_bi!r}"
        )
    mixed = lam * a.entries + (1.0 - lam) * b.entries
    det_mixed = np.exp(_logdet_raw(mixed))
    return float(det_mixed - lam * np.exp(a.log_det) - (1.0 - lam) * np.exp(b.log_det))


def random_spd(n: int, rng: np.random.Generator, condition_cap: float = 1e3) -> SpdMatrix:
    """Random SPD matrix M'M + eps I with condition number at most the cap.

    eps is the smallest nonnegative shift achieving the cap, so
    well-conditioned draws are returned unshifted.
    """
    if n < 1:
        raise DimensionError("dimension must be at least 1")
    m = rng.standard_normal((n, n))
    w = m.T @ m
    w = 0.5 * (w + w.T)
    eig = np.linalg.eigvalsh(w)
    lo, hi = float(eig[0]), float(eig[-1])
    if lo <= 0.0 or hi / lo > condition_cap:
        if condition_cap <= 1.0:
            raise ValueError("condition_cap must exceed 1 for a generic draw")
        eps = (hi - condition_cap * lo) / (condition_cap - 1.0)
        w = w + eps * np.eye(n)
    return SpdMatrix(w)


def make_bonnesen_equality_pair(
    n: int, rng: np.random.Generator
) -> tuple[SpdMatrix, SpdMatrix]:
    """Random SPD pair differing only in the last diagonal entry.

    The determinant is affine in that entry once everything else is fixed,
    so the segment gap of :func:`bonnesen_linear_gap` vanishes identically
    for the pair (at i = n-1), which is exactly its equality family.
    """
    if n < 2:
        raise DimensionError("equality pair needs dimension at least 2")
    first = random_spd(n, rng)
    schur = schur_complement_last(first)
    factor = float(rng.uniform(1.5, 3.0))
    entries = np.array(first.entries)
    entries[n - 1, n - 1] += (factor - 1.0) * schur
    return first, SpdMatrix(entries)
