"""Exact dense linear algebra over the rationals.

Everything here works on :class:`fractions.Fraction` entries and never
rounds. Elimination is Gauss-Jordan with pivot normalisation, which keeps
entries reduced as it goes. A prime-field variant (``*_mod_p``) is provided
as a fast prefilter; callers must confirm its answers over the rationals.
"""

from __future__ import annotations

import numbers
import re
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Vector = tuple  # tuple[Fraction, ...]

DEFAULT_PRIME = 2_147_483_647  # 2**31 - 1, products of residues fit in int64

_RATIONAL_RE = re.compile(r"^[+-]?\d+(/\d+)?$")
_ZERO = Fraction(0)


def to_fraction(x) -> Fraction:
    """Convert ``x`` to an exact rational, refusing anything inexact."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rational entries")
    if isinstance(x, numbers.Integral):
        return Fraction(int(x))
    if isinstance(x, numbers.Rational):
        return Fraction(x.numerator, x.denominator)
    if isinstance(x, str):
        s = x.strip()
        if not _RATIONAL_RE.match(s):
            raise ValueError(f"not a rational string: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational entry")


def format_fraction(x: Fraction) -> str:
    """Serialise as ``"p/q"``, or ``"p"`` for integers."""
    return str(to_fraction(x))


def vector(values: Iterable) -> Vector:
    return tuple(to_fraction(v) for v in values)


class ExactMatrix:
    """Immutable dense matrix of Fractions.

    Construct from any iterable of rows (nested lists, tuples, 2-D numpy
    object arrays). ``cols`` is only needed to describe a matrix with no rows.
    """

    __slots__ = ("_rows", "_shape")

    def __init__(self, rows: Iterable[Iterable] = (), cols: int | None = None):
        data = tuple(tuple(to_fraction(x) for x in row) for row in rows)
        if cols is None:
            if not data:
                raise ValueError("cols must be given for a matrix with no rows")
            cols = len(data[0])
        for i, row in enumerate(data):
            if len(row) != cols:
                raise ValueError(
                    f"row {i} has {len(row)} entries, expected {cols}"
                )
        self._rows = data
        self._shape = (len(data), cols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "ExactMatrix":
        return cls([[0] * ncols for _ in range(nrows)], cols=ncols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], nrows: int | None = None) -> "ExactMatrix":
        columns = [vector(c) for c in columns]
        if not columns:
            if nrows is None:
                raise ValueError("nrows must be given when there are no columns")
            return cls([()] * nrows, cols=0)
        return cls(zip(*columns), cols=len(columns))

    @property
    def shape(self) -> tuple[int, int]:
        return self._shape

    @property
    def nrows(self) -> int:
        return self._shape[0]

    @property
    def ncols(self) -> int:
        return self._shape[1]

    @property
    def rows(self) -> tuple[Vector, ...]:
        return self._rows

    def column(self, j: int) -> Vector:
        return tuple(row[j] for row in self._rows)

    def columns(self) -> list[Vector]:
        return [self.column(j) for j in range(self.ncols)]

    def __getitem__(self, key):
        i, j = key
        return self._rows[i][j]

    @property
    def T(self) -> "ExactMatrix":
        if self.nrows == 0:
            return ExactMatrix([()] * self.ncols, cols=0)
        return ExactMatrix(zip(*self._rows), cols=self.nrows)

    def __matmul__(self, other):
        if isinstance(other, ExactMatrix):
            if self.ncols != other.nrows:
                raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
            cols = other.columns()
            return ExactMatrix(
                ([_dot(r, c) for c in cols] for r in self._rows), cols=other.ncols
            )
        v = vector(other)
        if len(v) != self.ncols:
            raise ValueError(f"shape mismatch {self.shape} @ vector of length {len(v)}")
        return tuple(_dot(r, v) for r in self._rows)

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix(
            ([a + b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)),
            cols=self.ncols,
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        self._check_same_shape(other)
        return ExactMatrix(
            ([a - b for a, b in zip(r, s)] for r, s in zip(self._rows, other._rows)),
            cols=self.ncols,
        )

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(([-a for a in r] for r in self._rows), cols=self.ncols)

    def scale(self, c) -> "ExactMatrix":
        c = to_fraction(c)
        return ExactMatrix(([c * a for a in r] for r in self._rows), cols=self.ncols)

    def _check_same_shape(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def is_square(self) -> bool:
        return self.nrows == self.ncols

    def is_zero(self) -> bool:
        return all(a == 0 for r in self._rows for a in r)

    def is_symmetric(self) -> bool:
        return self.is_square() and all(
            self._rows[i][j] == self._rows[j][i]
            for i in range(self.nrows)
            for j in range(i + 1, self.ncols)
        )

    def to_strings(self) -> list[list[str]]:
        return [[format_fraction(a) for a in r] for r in self._rows]

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self._shape == other._shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._shape, self._rows))

    def __repr__(self) -> str:
        return f"ExactMatrix({self.to_strings()!r})"


def _dot(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    s = _ZERO
    for x, y in zip(a, b):
        if x and y:
            s += x * y
    return s


def as_matrix(M) -> ExactMatrix:
    return M if isinstance(M, ExactMatrix) else ExactMatrix(M)


def rref(M) -> tuple[ExactMatrix, tuple[int, ...]]:
    """Reduced row echelon form and pivot columns."""
    M = as_matrix(M)
    rows, pivots = _rref_rows([list(r) for r in M.rows], M.ncols)
    return ExactMatrix(rows, cols=M.ncols), tuple(pivots)


def _rref_rows(a: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    # In place on ``a``; returns only the nonzero rows.
    nrows = len(a)
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        k = next((i for i in range(r, nrows) if a[i][c] != 0), None)
        if k is None:
            continue
        a[r], a[k] = a[k], a[r]
        piv = a[r][c]
        if piv != 1:
            a[r] = [x / piv for x in a[r]]
        prow = a[r]
        nz = [(j, x) for j, x in enumerate(prow) if x != 0]
        for i in range(nrows):
            if i != r:
                f = a[i][c]
                if f != 0:
                    row = a[i]
                    for j, x in nz:
                        row[j] -= f * x
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank(M) -> int:
    return len(rref(M)[1])


def nullspace_basis(M) -> ExactMatrix:
    """Columns form a basis of ``{x : M x = 0}``."""
    M = as_matrix(M)
    R, pivots = rref(M)
    n = M.ncols
    free = [c for c in range(n) if c not in set(pivots)]
    basis = []
    for f in free:
        x = [_ZERO] * n
        x[f] = Fraction(1)
        for i, p in enumerate(pivots):
            x[p] = -R[i, f]
        basis.append(x)
    return ExactMatrix.from_columns(basis, nrows=n)


def in_span(target: Sequence, spanners: Sequence[Sequence]) -> tuple[bool, Vector | None]:
    """Decide whether ``target`` is a linear combination of ``spanners``.

    Returns ``(True, coeffs)`` with ``sum(c * s) == target`` exactly, or
    ``(False, None)``.
    """
    t = vector(target)
    spanners = [vector(s) for s in spanners]
    for i, s in enumerate(spanners):
        if len(s) != len(t):
            raise ValueError(f"spanner {i} has length {len(s)}, target has {len(t)}")
    k = len(spanners)
    aug = [[s[row] for s in spanners] + [t[row]] for row in range(len(t))]
    R, pivots = _rref_rows(aug, k + 1)
    if pivots and pivots[-1] == k:
        return False, None
    coeffs = [_ZERO] * k
    for i, p in enumerate(pivots):
        coeffs[p] = R[i][k]
    return True, tuple(coeffs)


def rowspace_contains(targets: Sequence[Sequence], spanners: Sequence[Sequence]) -> list[bool]:
    """Membership flags for several targets against one span (no coefficients)."""
    spanners = [list(vector(s)) for s in spanners]
    targets = [vector(t) for t in targets]
    if not targets:
        return []
    n = len(targets[0])
    R, pivots = _rref_rows(spanners, n)
    out = []
    for t in targets:
        res = list(t)
        for row, p in zip(R, pivots):
            f = res[p]
            if f != 0:
                for j, x in enumerate(row):
                    if x != 0:
                        res[j] -= f * x
        out.append(all(x == 0 for x in res))
    return out


def solve(M, b: Sequence) -> Vector | None:
    """One exact solution of ``M x = b`` (free variables set to zero), or None."""
    M = as_matrix(M)
    ok, coeffs = in_span(b, M.columns())
    return coeffs if ok else None


def inverse(M) -> ExactMatrix:
    M = as_matrix(M)
    if not M.is_square():
        raise ValueError(f"cannot invert a {M.shape} matrix")
    n = M.nrows
    aug = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.rows)]
    R, pivots = _rref_rows(aug, 2 * n)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("matrix is singular")
    return ExactMatrix((row[n:] for row in R), cols=n)


def restricted_form_nondegenerate(gram, subspace: Sequence[Sequence]) -> bool:
    """Is the bilinear form ``gram`` non-degenerate on ``span(subspace)``?"""
    gram = as_matrix(gram)
    if not gram.is_symmetric():
        raise ValueError("gram matrix must be symmetric")
    vecs = [vector(v) for v in subspace]
    for v in vecs:
        if len(v) != gram.nrows:
            raise ValueError(f"vector of length {len(v)} in a {gram.nrows}-dim space")
    if not vecs:
        return True
    _, pivots = rref(ExactMatrix.from_columns(vecs))
    S = ExactMatrix.from_columns([vecs[p] for p in pivots], nrows=gram.nrows)
    restricted = S.T @ gram @ S
    return rank(restricted) == len(pivots)


# -- prime-field prefilter --------------------------------------------------


def fraction_mod_p(x, p: int = DEFAULT_PRIME) -> int:
    x = to_fraction(x)
    if x.denominator % p == 0:
        raise ValueError(f"denominator of {x} vanishes modulo {p}")
    return x.numerator * pow(x.denominator, -1, p) % p


def rref_mod_p(a: np.ndarray, p: int = DEFAULT_PRIME) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of an integer array over GF(p)."""
    if p >= 2**31:
        raise ValueError("prime must be below 2**31 to keep products in int64")
    a = np.array(a, dtype=np.int64) % p
    nrows, ncols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        k = r + int(nz[0])
        if k != r:
            a[[r, k]] = a[[k, r]]
        inv = pow(int(a[r, c]), -1, p)
        a[r] = a[r] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit] = (a[hit] - np.outer(col[hit], a[r]) % p) % p
        pivots.append(c)
        r += 1
    return a[:r], pivots


def rank_mod_p(a, p: int = DEFAULT_PRIME) -> int:
    if isinstance(a, ExactMatrix):
        a = [[fraction_mod_p(x, p) for x in row] for row in a.rows]
    a = np.asarray(a, dtype=np.int64).reshape(len(a), -1)
    return len(rref_mod_p(a, p)[1])


def rowspace_contains_mod_p(targets: np.ndarray, spanners: np.ndarray, p: int = DEFAULT_PRIME) -> np.ndarray:
    """Membership flags over GF(p); rows of ``targets`` against rows of ``spanners``."""
    targets = np.atleast_2d(np.asarray(targets, dtype=np.int64)) % p
    R, pivots = rref_mod_p(spanners, p)
    if not pivots:
        return ~targets.any(axis=1)
    coeff = targets[:, pivots]
    # accumulate one pivot row at a time so every product stays below 2**62
    res = targets.copy()
    for i in range(len(pivots)):
        res = (res - np.outer(coeff[:, i], R[i]) % p) % p
    return ~res.any(axis=1)
