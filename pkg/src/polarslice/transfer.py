"""Nearest points and ED critical points on orbit-type matrix varieties.

Two varieties are handled, both stable under an orthogonal group with a
linear slice of diagonal matrices:

* symmetric n x n matrices with prescribed spectrum, under conjugation by O(n);
* n x m matrices (n < m) with prescribed singular values, under O(n) x O(m).

Each solver moves the data into the slice with an eigen/singular value
decomposition, works with diagonal matrices there, and moves the answers back.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

DEFAULT_TOL = 1e-8
EQUIVARIANCE_TOL = 1e-7
_TANGENT_RCOND = 1e-9


class TransferError(ValueError):
    pass


class NonGenericDataError(TransferError):
    pass


class OffVarietyError(TransferError):
    pass


class UnsupportedProblemError(TransferError):
    pass


class NumericError(ArithmeticError):
    """An eigen- or singular value decomposition failed to converge."""


@dataclass(frozen=True)
class SpectrumProblem:
    """Symmetric data matrix and a non-decreasing target spectrum."""

    data: np.ndarray
    spectrum: np.ndarray

    def __post_init__(self):
        A = np.array(self.data, dtype=float)
        lam = np.array(self.spectrum, dtype=float).ravel()
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise TransferError(f"data must be a square matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)) or not np.all(np.isfinite(lam)):
            raise TransferError("data and spectrum must be finite")
        if np.linalg.norm(A - A.T) > 1e-12 * np.linalg.norm(A):
            raise TransferError("data matrix is not symmetric")
        if lam.size != A.shape[0]:
            raise TransferError(f"spectrum has {lam.size} values for a {A.shape[0]}x{A.shape[0]} matrix")
        if np.any(np.diff(lam) < 0):
            raise TransferError("spectrum must be sorted non-decreasing")
        object.__setattr__(self, "data", A)
        object.__setattr__(self, "spectrum", lam)

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return tuple(len(list(g)) for _, g in itertools.groupby(self.spectrum.tolist()))


@dataclass(frozen=True)
class SingularValueProblem:
    """n x m data matrix (n <= m) and non-increasing target singular values."""

    data: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        M = np.array(self.data, dtype=float)
        s = np.array(self.sigma, dtype=float).ravel()
        if M.ndim != 2:
            raise TransferError(f"data must be a matrix, got shape {M.shape}")
        n, m = M.shape
        if n > m:
            raise TransferError(f"need n <= m, got a {n}x{m} matrix")
        if not np.all(np.isfinite(M)) or not np.all(np.isfinite(s)):
            raise TransferError("data and sigma must be finite")
        if s.size != n:
            raise TransferError(f"sigma has {s.size} values for a {n}x{m} matrix")
        if np.any(s < 0):
            raise TransferError("singular values must be non-negative")
        if np.any(np.diff(s) > 0):
            raise TransferError("sigma must be sorted non-increasing")
        object.__setattr__(self, "data", M)
        object.__setattr__(self, "sigma", s)

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


@dataclass
class CriticalPointSet:
    points: list
    distances: np.ndarray
    residuals: np.ndarray
    ed_degree_expected: int
    assignments: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def nearest(self) -> np.ndarray:
        return self.points[int(np.argmin(self.distances))]


# -- decompositions -----------------------------------------------------------------


def _eigh(A):
    try:
        return np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from None


def _svd(M):
    try:
        U, s, Vt = np.linalg.svd(M, full_matrices=True)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"singular value decomposition failed: {exc}") from None
    # fix the sign of each singular pair so the output is deterministic
    for i in range(U.shape[1]):
        col = U[:, i]
        k = int(np.argmax(np.abs(col) > 1e-12)) if abs(col[0]) <= 1e-12 else 0
        if col[k] < 0:
            U[:, i] *= -1
            Vt[i, :] *= -1
    return U, s, Vt


def _scale(values) -> float:
    return max(1.0, float(np.max(np.abs(values), initial=0.0)))


def _require_distinct(values: np.ndarray, tol: float, what: str, nonzero: bool = False) -> None:
    order = np.sort(values)
    scale = _scale(values)
    for i in range(len(order) - 1):
        if order[i + 1] - order[i] <= tol * scale:
            raise NonGenericDataError(
                f"non-generic data: {what} {order[i]:.17g} and {order[i + 1]:.17g} coincide"
            )
    if nonzero and np.any(np.abs(values) <= tol * scale):
        raise NonGenericDataError(f"non-generic data: a {what} vanishes")


# -- prescribed spectrum ----------------------------------------------------------


def nearest_with_spectrum(problem: SpectrumProblem, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Closest symmetric matrix (Frobenius norm) with the prescribed spectrum.

    The target eigenvalues are matched to the data eigenvalues in the same
    order; repeated data eigenvalues are allowed and any consistent ordering
    gives a minimiser.
    """
    mu, Q = _eigh(problem.data)
    B = Q @ np.diag(problem.spectrum) @ Q.T
    B = (B + B.T) / 2
    got = np.linalg.eigvalsh(B)
    if np.max(np.abs(got - problem.spectrum)) > tol * _scale(problem.spectrum):
        raise NumericError("reconstructed matrix does not have the prescribed spectrum")
    return B


def _multiset_permutations(counts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Distinct arrangements of a multiset, in lexicographic order."""
    counts = list(counts)
    n = sum(counts)
    prefix: list[int] = []

    def rec():
        if len(prefix) == n:
            yield tuple(prefix)
            return
        for k, c in enumerate(counts):
            if c:
                counts[k] -= 1
                prefix.append(k)
                yield from rec()
                prefix.pop()
                counts[k] += 1

    yield from rec()


def ed_degree_spectrum(spectrum: Sequence[float]) -> int:
    """n! / (n_1! ... n_k!) for the multiplicities of the prescribed eigenvalues."""
    lam = list(spectrum)
    if any(b < a for a, b in zip(lam, lam[1:])):
        raise TransferError("spectrum must be sorted non-decreasing")
    mults = [len(list(g)) for _, g in itertools.groupby(lam)]
    out = math.factorial(len(lam))
    for k in mults:
        out //= math.factorial(k)
    return out


def ed_degree_adjoint_orbit(n: int) -> int:
    """Order of the Weyl group S_n of type A_{n-1}."""
    if n < 2:
        raise TransferError("need n >= 2")
    return math.factorial(n)


def critical_points_spectrum(problem: SpectrumProblem, tol: float = DEFAULT_TOL) -> CriticalPointSet:
    """All ED critical points, one per distinct rearrangement of the spectrum."""
    mu, Q = _eigh(problem.data)
    _require_distinct(mu, tol, "data eigenvalues")
    lam = problem.spectrum.tolist()
    values = [k for k, _ in itertools.groupby(lam)]
    counts = problem.multiplicities
    points, dists, res, assigns = [], [], [], []
    for a in _multiset_permutations(counts):
        diag = np.array([values[k] for k in a])
        B = Q @ np.diag(diag) @ Q.T
        B = (B + B.T) / 2
        points.append(B)
        dists.append(float(np.sum((problem.data - B) ** 2)))
        res.append(verify_criticality(problem, B, tol))
        assigns.append(tuple(diag.tolist()))
    return CriticalPointSet(points, np.array(dists), np.array(res), ed_degree_spectrum(lam), assigns)


# -- prescribed singular values ---------------------------------------------------


def _diag_nm(values, n, m):
    D = np.zeros((n, m))
    D[np.arange(len(values)), np.arange(len(values))] = values
    return D


def nearest_with_singular_values(problem: SingularValueProblem, tol: float = DEFAULT_TOL) -> np.ndarray:
    """Closest n x m matrix with the prescribed singular values."""
    n, m = problem.shape
    U, s, Vt = _svd(problem.data)
    _require_distinct(s, tol, "data singular values", nonzero=True)
    B = U @ _diag_nm(problem.sigma, n, m) @ Vt
    got = np.linalg.svd(B, compute_uv=False)
    if np.max(np.abs(got - problem.sigma)) > tol * _scale(problem.sigma):
        raise NumericError("reconstructed matrix does not have the prescribed singular values")
    return B


def critical_points_singular_values(problem: SingularValueProblem, tol: float = DEFAULT_TOL) -> CriticalPointSet:
    """All 2^n n! ED critical points: signed rearrangements of sigma on the diagonal."""
    n, m = problem.shape
    if n == m:
        raise UnsupportedProblemError("unsupported: square case parity")
    U, s, Vt = _svd(problem.data)
    _require_distinct(s, tol, "data singular values", nonzero=True)
    _require_distinct(problem.sigma, tol, "prescribed singular values", nonzero=True)
    sigma = problem.sigma
    points, dists, res, assigns = [], [], [], []
    for perm in itertools.permutations(range(n)):
        for signs in itertools.product((1.0, -1.0), repeat=n):
            diag = np.array(signs) * sigma[list(perm)]
            B = U @ _diag_nm(diag, n, m) @ Vt
            points.append(B)
            dists.append(float(np.sum((problem.data - B) ** 2)))
            res.append(verify_criticality(problem, B, tol))
            assigns.append(tuple(diag.tolist()))
    expected = 2**n * math.factorial(n)
    return CriticalPointSet(points, np.array(dists), np.array(res), expected, assigns)


# -- checks -----------------------------------------------------------------------


def _skew_basis(n):
    for i in range(n):
        for j in range(i + 1, n):
            S = np.zeros((n, n))
            S[i, j], S[j, i] = 1.0, -1.0
            yield S


def tangent_vectors(problem, point: np.ndarray) -> np.ndarray:
    """Rows span the tangent space of the orbit through ``point``."""
    P = np.asarray(point, dtype=float)
    if isinstance(problem, SpectrumProblem):
        rows = [(S @ P - P @ S).ravel() for S in _skew_basis(P.shape[0])]
    else:
        n, m = P.shape
        rows = [(S @ P).ravel() for S in _skew_basis(n)]
        rows += [(-P @ T).ravel() for T in _skew_basis(m)]
    return np.array(rows).reshape(len(rows), P.size)


def verify_criticality(problem, point: np.ndarray, tol: float = DEFAULT_TOL) -> float:
    """Largest normalised inner product of (data - point) with a unit tangent vector.

    Zero means ``point`` is an ED critical point for the problem's data.
    Raises :class:`OffVarietyError` if ``point`` is not on the variety.
    """
    P = np.asarray(point, dtype=float)
    if isinstance(problem, SpectrumProblem):
        if P.shape != problem.data.shape or np.linalg.norm(P - P.T) > tol * _scale(P):
            raise OffVarietyError("point is not a symmetric matrix of the right size")
        got, want = np.linalg.eigvalsh(P), problem.spectrum
    elif isinstance(problem, SingularValueProblem):
        if P.shape != problem.data.shape:
            raise OffVarietyError("point has the wrong shape")
        got, want = np.linalg.svd(P, compute_uv=False), problem.sigma
    else:
        raise TypeError(f"unsupported problem type {type(problem).__name__}")
    if np.max(np.abs(got - want)) > tol * _scale(want):
        raise OffVarietyError(
            f"point is off the variety: deviation {np.max(np.abs(got - want)):.3g}"
        )
    r = (problem.data - P).ravel()
    rnorm = np.linalg.norm(r)
    if rnorm == 0.0:
        return 0.0
    T = tangent_vectors(problem, P)
    if T.size == 0:
        return 0.0
    _, sv, Vt = np.linalg.svd(T, full_matrices=False)
    # anchored to |P| so a tangent space made of roundoff (e.g. a single point) stays empty
    cutoff = _TANGENT_RCOND * max(sv[0], np.linalg.norm(P))
    keep = sv > cutoff
    if not np.any(keep):
        return 0.0
    return float(np.max(np.abs(Vt[keep] @ r)) / rnorm)


def _critical_points(problem, tol):
    if isinstance(problem, SpectrumProblem):
        return critical_points_spectrum(problem, tol)
    return critical_points_singular_values(problem, tol)


def _same_point_sets(a: Sequence[np.ndarray], b: Sequence[np.ndarray], tol: float) -> bool:
    if len(a) != len(b):
        return False
    if not a:
        return True
    cost = np.array([[np.linalg.norm(x - y) for y in b] for x in a])
    rows, cols = linear_sum_assignment(cost)
    scale = max(1.0, max(np.linalg.norm(x) for x in a))
    return bool(np.max(cost[rows, cols]) <= tol * scale)


def equivariance_check(problem, g, tol: float = EQUIVARIANCE_TOL) -> bool:
    """Do the critical points for g.data equal g applied to those for data?

    ``g`` is an orthogonal matrix for spectrum problems and a pair
    ``(U, V)`` of orthogonal matrices for singular value problems.
    """
    if isinstance(problem, SpectrumProblem):
        G = np.asarray(g, dtype=float)
        _require_orthogonal(G, tol)
        act = lambda X: G @ X @ G.T
        moved = SpectrumProblem(act(problem.data), problem.spectrum)
    else:
        U, V = (np.asarray(x, dtype=float) for x in g)
        _require_orthogonal(U, tol)
        _require_orthogonal(V, tol)
        act = lambda X: U @ X @ V.T
        moved = SingularValueProblem(act(problem.data), problem.sigma)
    here = _critical_points(problem, DEFAULT_TOL)
    there = _critical_points(moved, DEFAULT_TOL)
    return _same_point_sets([act(P) for P in here.points], there.points, tol)


def _require_orthogonal(G, tol):
    if G.ndim != 2 or G.shape[0] != G.shape[1] or np.linalg.norm(G.T @ G - np.eye(G.shape[0])) > tol:
        raise TransferError("group element is not orthogonal")


def slice_containment_check(problem, tol: float = DEFAULT_TOL) -> bool:
    """For diagonal data, are all critical points diagonal?"""
    D = problem.data
    off = D - _diag_nm(np.diagonal(D), *D.shape)
    if np.max(np.abs(off), initial=0.0) > tol * _scale(D):
        raise TransferError("data does not lie in the diagonal slice")
    crit = _critical_points(problem, tol)
    for P in crit.points:
        off = P - _diag_nm(np.diagonal(P), *P.shape)
        if np.max(np.abs(off), initial=0.0) > tol * np.linalg.norm(P):
            return False
    return True
