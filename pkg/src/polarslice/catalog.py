"""Constructors for concrete orthogonal representations with known slices.

Every family is written down with integer structure constants in a fixed
basis, so the resulting :class:`OrthogonalRep` is exact.

Basis conventions
-----------------
* matrix spaces: matrix units ``E_ij`` in row-major order;
* ``sl_n``: upper ``E_ij`` (i<j, row-major), then ``H_k = E_kk - E_k+1,k+1``,
  then lower ``E_ij`` (i>j, row-major); for n=2 this is (e, h, f);
* ``so_n`` and skew matrices: ``E_ij - E_ji`` for i<j, lexicographic;
* symmetric matrices: positions i<=j row-major, ``E_ii`` or ``E_ij + E_ji``;
  traceless symmetric: the diagonal slot (k,k), k<n, holds ``E_kk - E_k+1,k+1``;
* ``sp_n`` inside gl_2n: ``E_ij - E_n+j,n+i`` (row-major), then the symmetric
  upper-right block (i<=j), then the symmetric lower-left block (i<=j);
* wedge squares: ``e_i ^ e_j``, i<j, lexicographic;
* pairs ``(A, B)``: coordinates of A followed by those of B;
* binary quartics: x^4, x^3y, x^2y^2, xy^3, y^4.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .exact_linalg import ExactMatrix, inverse, rref
from .rep import OrthogonalRep, SliceBasis, validate


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class FamilySpec:
    family_id: str
    params: dict = field(default_factory=dict)

    def label(self) -> str:
        if not self.params:
            return self.family_id
        inner = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.family_id}({inner})"


@dataclass(frozen=True)
class FamilyTemplate:
    family_id: str
    params: dict  # name -> minimum value
    description: str
    reference: str
    smallest: dict
    polar: bool = True
    n_le_m: bool = False


# -- small matrix helpers -------------------------------------------------------


def _zeros(r, c):
    return np.zeros((r, c), dtype=object)


def _unit(r, c, i, j):
    M = _zeros(r, c)
    M[i, j] = 1
    return M


def _J(n):
    """Standard symplectic matrix [[0, I], [-I, 0]] of size 2n."""
    J = _zeros(2 * n, 2 * n)
    for i in range(n):
        J[i, n + i] = 1
        J[n + i, i] = -1
    return J


def _tr(M):
    return sum(M[i, i] for i in range(M.shape[0]))


def gl_basis(n):
    return [_unit(n, n, i, j) for i in range(n) for j in range(n)]


def sl_basis(n):
    upper = [_unit(n, n, i, j) for i in range(n) for j in range(i + 1, n)]
    cartan = [_unit(n, n, k, k) - _unit(n, n, k + 1, k + 1) for k in range(n - 1)]
    lower = [_unit(n, n, i, j) for i in range(n) for j in range(i)]
    return upper + cartan + lower


def skew_basis(n):
    return [_unit(n, n, i, j) - _unit(n, n, j, i) for i in range(n) for j in range(i + 1, n)]


def sym_basis(n):
    out = []
    for i in range(n):
        for j in range(i, n):
            out.append(_unit(n, n, i, i) if i == j else _unit(n, n, i, j) + _unit(n, n, j, i))
    return out


def sym_traceless_basis(n):
    out = []
    for i in range(n):
        for j in range(i, n):
            if i == j:
                if i < n - 1:
                    out.append(_unit(n, n, i, i) - _unit(n, n, i + 1, i + 1))
            else:
                out.append(_unit(n, n, i, j) + _unit(n, n, j, i))
    return out


def sp_basis(n):
    N = 2 * n
    out = [_unit(N, N, i, j) - _unit(N, N, n + j, n + i) for i in range(n) for j in range(n)]
    for i in range(n):
        for j in range(i, n):
            M = _unit(N, N, i, n + j)
            if i != j:
                M = M + _unit(N, N, j, n + i)
            out.append(M)
    for i in range(n):
        for j in range(i, n):
            M = _unit(N, N, n + i, j)
            if i != j:
                M = M + _unit(N, N, n + j, i)
            out.append(M)
    return out


def matrix_units(r, c):
    return [_unit(r, c, i, j) for i in range(r) for j in range(c)]


# -- generic assembly -----------------------------------------------------------


def _flatten(x) -> list:
    parts = x if isinstance(x, tuple) else (x,)
    return [e for part in parts for e in np.asarray(part, dtype=object).ravel()]


class _Coordinates:
    """Exact coordinates with respect to a basis of model elements."""

    def __init__(self, basis):
        B = ExactMatrix.from_columns([_flatten(b) for b in basis])
        _, rows = rref(B.T)
        if len(rows) != len(basis):
            raise CatalogError("basis elements are linearly dependent")
        self._B = B
        self._rows = rows
        self._inv = inverse(ExactMatrix([B.rows[r] for r in rows]))

    def __call__(self, x):
        flat = _flatten(x)
        c = self._inv @ [flat[r] for r in self._rows]
        if self._B @ c != tuple(Fraction(v) for v in flat):
            raise CatalogError("element lies outside the span of the basis")
        return c


def _assemble(
    name: str,
    basis: Sequence,
    form: Callable,
    actions: Sequence[Callable],
    slice_elements: Sequence | None,
    metadata: dict,
) -> OrthogonalRep:
    coords = _Coordinates(basis)
    gram = ExactMatrix([[form(x, y) for y in basis] for x in basis])
    gens = []
    for act in actions:
        gens.append(ExactMatrix.from_columns([coords(act(b)) for b in basis], nrows=len(basis)))
    slice_basis = None
    if slice_elements is not None:
        slice_basis = SliceBasis(tuple(coords(s) for s in slice_elements))
    return OrthogonalRep(name, gram, tuple(gens), metadata, slice_basis)


# -- families -------------------------------------------------------------------


def _adjoint_sln(n):
    basis = sl_basis(n)
    form = lambda x, y: 2 * n * _tr(x.dot(y))  # Killing form of sl_n
    actions = [(lambda y, x=x: x.dot(y) - y.dot(x)) for x in basis]
    cartan = [_unit(n, n, k, k) - _unit(n, n, k + 1, k + 1) for k in range(n - 1)]
    return basis, form, actions, cartan


def _so_standard(n):
    basis = [_unit(n, 1, i, 0) for i in range(n)]
    form = lambda x, y: x.T.dot(y)[0, 0]
    actions = [(lambda v, K=K: K.dot(v)) for K in skew_basis(n)]
    return basis, form, actions, [basis[0]]


def _so_sym_traceless(n):
    basis = sym_traceless_basis(n)
    form = lambda a, b: _tr(a.T.dot(b))
    actions = [(lambda a, K=K: K.dot(a) - a.dot(K)) for K in skew_basis(n)]
    diag = [_unit(n, n, k, k) - _unit(n, n, k + 1, k + 1) for k in range(n - 1)]
    return basis, form, actions, diag


def _onom_matrix(n, m):
    basis = matrix_units(n, m)
    form = lambda a, b: _tr(a.T.dot(b))
    left = [(lambda a, K=K: K.dot(a)) for K in skew_basis(n)]
    right = [(lambda a, L=L: -a.dot(L)) for L in skew_basis(m)]
    return basis, form, left + right, [_unit(n, m, i, i) for i in range(n)]


def _sp_lambda2(n):
    N = 2 * n
    J = _J(n)
    basis = skew_basis(N)  # E_ij - E_ji <-> e_i ^ e_j
    # the induced form on wedge squares, written on skew matrices
    form = lambda a, b: Fraction(_tr(a.T.dot(J).dot(b).dot(J.T)), 2)
    actions = [(lambda w, X=X: X.dot(w) + w.dot(X.T)) for X in sp_basis(n)]
    sl = [_unit(N, N, i, n + i) - _unit(N, N, n + i, i) for i in range(n)]
    return basis, form, actions, sl


def _spn_spm_tensor(n, m):
    Jn, Jm = _J(n), _J(m)
    basis = matrix_units(2 * n, 2 * m)
    form = lambda a, b: _tr(Jn.dot(a).dot(Jm).dot(b.T))
    left = [(lambda a, X=X: X.dot(a)) for X in sp_basis(n)]
    right = [(lambda a, Y=Y: a.dot(Y.T)) for Y in sp_basis(m)]
    sl = [_unit(2 * n, 2 * m, i, i) + _unit(2 * n, 2 * m, n + i, m + i) for i in range(n)]
    return basis, form, left + right, sl


def _sln_std_dual(n):
    e = [_unit(n, 1, i, 0) for i in range(n)]
    z = _zeros(n, 1)
    basis = [(v, z) for v in e] + [(z, w) for w in e]
    form = lambda p, q: p[0].T.dot(q[1])[0, 0] + q[0].T.dot(p[1])[0, 0]
    actions = [(lambda p, X=X: (X.dot(p[0]), -X.T.dot(p[1]))) for X in sl_basis(n)]
    return basis, form, actions, [(e[0], e[0])]


def _pairs(n, elements):
    z = _zeros(n, n)
    return [(a, z) for a in elements] + [(z, b) for b in elements]


_pair_form = lambda p, q: _tr(p[0].dot(q[1]) + p[1].dot(q[0]))


def _gln_sym_pairs(n):
    basis = _pairs(n, sym_basis(n))
    actions = [
        (lambda p, X=X: (X.dot(p[0]) + p[0].dot(X.T), -X.T.dot(p[1]) - p[1].dot(X)))
        for X in gl_basis(n)
    ]
    sl = [(_unit(n, n, i, i), _unit(n, n, i, i)) for i in range(n)]
    return basis, _pair_form, actions, sl


def _gln_skew_pairs(n):
    basis = _pairs(n, skew_basis(n))
    actions = [
        (lambda p, X=X: (X.dot(p[0]) + p[0].dot(X.T), -X.T.dot(p[1]) - p[1].dot(X)))
        for X in gl_basis(n)
    ]
    h = n // 2
    offset = h if n % 2 == 0 else h + 1  # odd n leaves the middle row/column empty
    sl = []
    for k in range(h):
        W = _unit(n, n, k, offset + k) - _unit(n, n, offset + k, k)
        sl.append((W, W))
    return basis, _pair_form, actions, sl


def _spn_std_dual(n):
    N = 2 * n
    J = _J(n)
    e = [_unit(N, 1, i, 0) for i in range(N)]
    z = _zeros(N, 1)
    basis = [(v, z) for v in e] + [(z, w) for w in e]
    form = lambda p, q: p[0].T.dot(J).dot(q[1])[0, 0] + q[0].T.dot(J).dot(p[1])[0, 0]
    actions = [(lambda p, X=X: (X.dot(p[0]), X.dot(p[1]))) for X in sp_basis(n)]
    v = np.array([[1] for _ in range(N)], dtype=object)
    w = np.array([[i + 1] for i in range(N)], dtype=object)
    return basis, form, actions, [(v, w)]


def _gln_glm_tensor_pairs(n, m):
    units = matrix_units(n, m)
    z = _zeros(n, m)
    basis = [(a, z) for a in units] + [(z, b) for b in units]
    form = lambda p, q: _tr(p[0].T.dot(q[1]) + q[0].T.dot(p[1]))
    left = [(lambda p, X=X: (X.dot(p[0]), -X.T.dot(p[1]))) for X in gl_basis(n)]
    right = [(lambda p, Y=Y: (p[0].dot(Y.T), -p[1].dot(Y))) for Y in gl_basis(m)]
    sl = [(_unit(n, m, i, i), _unit(n, m, i, i)) for i in range(n)]
    return basis, form, left + right, sl


def _sl2_quartics():
    # x^(4-k) y^k for k = 0..4; h = x d/dx - y d/dy, e = x d/dy, f = y d/dx
    gram = _zeros(5, 5)
    for k, g in enumerate([12, -3, 2, -3, 12]):
        gram[k, 4 - k] = g
    h, e, f = _zeros(5, 5), _zeros(5, 5), _zeros(5, 5)
    for k in range(5):
        h[k, k] = 4 - 2 * k
        if k > 0:
            e[k - 1, k] = k
        if k < 4:
            f[k + 1, k] = 4 - k
    slice_vectors = ((1, 0, 0, 0, 1), (0, 0, 1, 0, 0))
    return gram, (h, e, f), slice_vectors


def _so2_double_standard():
    gram = np.identity(4, dtype=int).astype(object)
    A = _zeros(4, 4)
    A[1, 0], A[0, 1] = 1, -1
    A[3, 2], A[2, 3] = 1, -1
    return gram, (A,)


_BUILDERS = {
    "adjoint-sln": _adjoint_sln,
    "so-standard": _so_standard,
    "so-sym-traceless": _so_sym_traceless,
    "onom-matrix": _onom_matrix,
    "sp-lambda2": _sp_lambda2,
    "spn-spm-tensor": _spn_spm_tensor,
    "sln-std-dual": _sln_std_dual,
    "gln-sym-pairs": _gln_sym_pairs,
    "gln-skew-pairs": _gln_skew_pairs,
    "spn-std-dual": _spn_std_dual,
    "gln-glm-tensor-pairs": _gln_glm_tensor_pairs,
}

_TEMPLATES = [
    FamilyTemplate("adjoint-sln", {"n": 2}, "SL(n) acting on sl_n by conjugation, Killing form",
                   "adjoint representations", {"n": 2}),
    FamilyTemplate("so-standard", {"n": 2}, "O(n) on C^n, standard form",
                   "standard representations of types B and D", {"n": 2}),
    FamilyTemplate("so-sym-traceless", {"n": 2}, "SO(n) on traceless symmetric matrices by conjugation, trace form",
                   "types B and D, highest weight 2*lambda_1", {"n": 2}),
    FamilyTemplate("onom-matrix", {"n": 1, "m": 1}, "O(n) x O(m) on n x m matrices, trace form",
                   "tensor product of two standard representations of types B and D", {"n": 2, "m": 3},
                   n_le_m=True),
    FamilyTemplate("sp-lambda2", {"n": 1}, "Sp(n) on the second exterior power of C^2n",
                   "second exterior power of the standard representation of type C", {"n": 1}),
    FamilyTemplate("spn-spm-tensor", {"n": 1, "m": 1}, "Sp(n) x Sp(m) on 2n x 2m matrices",
                   "tensor product of two standard representations of type C", {"n": 1, "m": 2},
                   n_le_m=True),
    FamilyTemplate("sln-std-dual", {"n": 2}, "SL(n) on C^n + (C^n)*",
                   "standard representation of type A plus its dual", {"n": 2}),
    FamilyTemplate("gln-sym-pairs", {"n": 1}, "GL(n) on pairs of symmetric matrices (A, B) -> (gAg^T, g^-T B g^-1)",
                   "type A, highest weight 2*lambda_1, plus its dual", {"n": 1}),
    FamilyTemplate("gln-skew-pairs", {"n": 2}, "GL(n) on pairs of skew matrices (A, B) -> (gAg^T, g^-T B g^-1)",
                   "type A, highest weight lambda_2, plus its dual", {"n": 2}),
    FamilyTemplate("spn-std-dual", {"n": 1}, "Sp(n) on C^2n + C^2n",
                   "standard representation of type C plus its dual", {"n": 1}),
    FamilyTemplate("gln-glm-tensor-pairs", {"n": 1, "m": 1}, "GL(n) x GL(m) on pairs of n x m matrices",
                   "tensor product of standard representations of type A plus its dual", {"n": 2, "m": 3},
                   n_le_m=True),
    FamilyTemplate("sl2-quartics", {}, "SL(2) on binary quartics, invariant form with <x^4|y^4> = 12",
                   "worked example: binary quartics", {}),
    FamilyTemplate("so2-double-standard", {}, "SO(2) on C^2 + C^2, identity form (not polar)",
                   "negative control", {}, polar=False),
]

_TEMPLATE_BY_ID = {t.family_id: t for t in _TEMPLATES}


def catalog_list() -> list[FamilyTemplate]:
    return list(_TEMPLATES)


def _check_params(template: FamilyTemplate, params: dict) -> dict:
    unknown = set(params) - set(template.params)
    if unknown:
        raise CatalogError(f"{template.family_id}: unknown parameters {sorted(unknown)}")
    out = {}
    for name, lo in template.params.items():
        if name not in params:
            raise CatalogError(f"{template.family_id}: missing parameter {name!r}")
        value = params[name]
        if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
            raise CatalogError(f"{template.family_id}: parameter {name} must be an integer")
        if value < lo:
            raise CatalogError(f"{template.family_id}: {name}={value} is below the minimum {lo}")
        out[name] = int(value)
    if template.n_le_m and out["n"] > out["m"]:
        raise CatalogError(f"{template.family_id}: requires n <= m, got n={out['n']}, m={out['m']}")
    return out


def catalog_build(spec: FamilySpec | str, **params) -> tuple[OrthogonalRep, SliceBasis | None]:
    """Build a family member; returns the representation and its claimed slice.

    ``catalog_build("onom-matrix", n=2, m=3)`` and
    ``catalog_build(FamilySpec("onom-matrix", {"n": 2, "m": 3}))`` are equivalent.
    """
    if isinstance(spec, str):
        spec = FamilySpec(spec, params)
    elif params:
        raise TypeError("pass parameters either in the FamilySpec or as keywords, not both")
    template = _TEMPLATE_BY_ID.get(spec.family_id)
    if template is None:
        raise CatalogError(f"unknown family {spec.family_id!r}")
    p = _check_params(template, dict(spec.params))
    spec = FamilySpec(spec.family_id, p)
    metadata = {
        "family_id": spec.family_id,
        "params": p,
        "description": template.description,
        "reference": template.reference,
    }
    if spec.family_id == "sl2-quartics":
        gram, gens, sl = _sl2_quartics()
        rep = OrthogonalRep(spec.label(), ExactMatrix(gram), tuple(ExactMatrix(g) for g in gens),
                            metadata, SliceBasis(sl))
    elif spec.family_id == "so2-double-standard":
        gram, gens = _so2_double_standard()
        rep = OrthogonalRep(spec.label(), ExactMatrix(gram), tuple(ExactMatrix(g) for g in gens), metadata)
    else:
        basis, form, actions, slice_elements = _BUILDERS[spec.family_id](**p)
        rep = _assemble(spec.label(), basis, form, actions, slice_elements, metadata)
    report = validate(rep)
    if not report.passed:
        raise CatalogError(f"{spec.label()} failed validation: {report.message}")
    return rep, rep.slice


def acceptance_instances() -> list[FamilySpec]:
    """The smallest-parameter instances used by the polarity regression."""
    grid = {
        "adjoint-sln": [{"n": 2}, {"n": 3}],
        "so-standard": [{"n": 2}, {"n": 3}, {"n": 4}],
        "so-sym-traceless": [{"n": 2}, {"n": 3}, {"n": 4}],
        "onom-matrix": [{"n": 2, "m": 3}],
        "sp-lambda2": [{"n": 1}, {"n": 2}],
        "spn-spm-tensor": [{"n": 1, "m": 2}],
        "sln-std-dual": [{"n": 2}, {"n": 3}],
        "gln-sym-pairs": [{"n": 1}, {"n": 2}],
        "gln-skew-pairs": [{"n": 2}, {"n": 3}],
        "spn-std-dual": [{"n": 1}, {"n": 2}],
        "gln-glm-tensor-pairs": [{"n": 2, "m": 3}],
        "sl2-quartics": [{}],
        "so2-double-standard": [{}],
    }
    return [FamilySpec(fid, p) for fid, plist in grid.items() for p in plist]
