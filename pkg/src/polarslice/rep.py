"""Orthogonal representations given by a Gram matrix and Lie algebra generators.

A representation is stored as the triple (dimension, bilinear form, action):
``gram`` is the matrix of the invariant symmetric form in a fixed basis and
``generators`` are the images of a spanning set of the Lie algebra as
``dim x dim`` matrices. Only the Lie algebra is ever needed; group elements
never appear as data.

The JSON file format::

    {"name": str, "dim": int,
     "gram": [[rational-string]],
     "generators": [[[rational-string]]],
     "slice": [[rational-string]]  (optional, one row per basis vector),
     "metadata": {...}}
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from os import PathLike
from typing import Any, Mapping, Sequence

from .exact_linalg import ExactMatrix, format_fraction, rank, rref, to_fraction, vector


class RepError(ValueError):
    pass


class RepFormatError(RepError):
    """The file could not be parsed into a representation."""

    def __init__(self, message: str, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)


class RepValidationError(RepError):
    def __init__(self, report: "ValidationReport"):
        self.report = report
        super().__init__(report.message)


class SliceStatus(str, enum.Enum):
    CLAIMED = "CLAIMED"
    CERTIFIED = "CERTIFIED"


@dataclass(frozen=True)
class SliceBasis:
    """Basis of a candidate slice, one exact vector per entry."""

    vectors: tuple
    status: SliceStatus = SliceStatus.CLAIMED

    def __post_init__(self):
        vecs = tuple(vector(v) for v in self.vectors)
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "status", SliceStatus(self.status))
        if vecs:
            n = len(vecs[0])
            if any(len(v) != n for v in vecs):
                raise ValueError("slice vectors have different lengths")
            if rank(ExactMatrix(vecs)) != len(vecs):
                raise ValueError("slice vectors are linearly dependent")

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def rref(self) -> ExactMatrix:
        """Canonical basis of the span (reduced row echelon form)."""
        if not self.vectors:
            raise ValueError("empty slice has no canonical basis")
        return rref(ExactMatrix(self.vectors))[0]

    def same_span(self, other: "SliceBasis | Sequence") -> bool:
        other = other if isinstance(other, SliceBasis) else SliceBasis(tuple(other))
        if self.dim != other.dim:
            return False
        return self.dim == 0 or self.rref() == other.rref()

    def certified(self) -> "SliceBasis":
        return SliceBasis(self.vectors, SliceStatus.CERTIFIED)


@dataclass(frozen=True)
class OrthogonalRep:
    name: str
    gram: ExactMatrix
    generators: tuple
    metadata: Mapping[str, Any] = field(default_factory=dict)
    slice: SliceBasis | None = None

    def __post_init__(self):
        gram = self.gram if isinstance(self.gram, ExactMatrix) else ExactMatrix(self.gram)
        if not gram.is_square():
            raise RepFormatError(f"gram matrix is {gram.nrows}x{gram.ncols}, not square", field="gram")
        gens = []
        for i, A in enumerate(self.generators):
            A = A if isinstance(A, ExactMatrix) else ExactMatrix(A)
            if A.shape != gram.shape:
                raise RepFormatError(
                    f"generator has shape {A.shape}, expected {gram.shape}",
                    field=f"generators[{i}]",
                )
            gens.append(A)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "generators", tuple(gens))
        object.__setattr__(self, "metadata", dict(self.metadata))
        if self.slice is not None:
            sl = self.slice if isinstance(self.slice, SliceBasis) else SliceBasis(tuple(self.slice))
            if sl.vectors and len(sl.vectors[0]) != gram.nrows:
                raise RepFormatError("slice vectors do not match dim", field="slice")
            object.__setattr__(self, "slice", sl)

    @property
    def dim(self) -> int:
        return self.gram.nrows

    def form(self, v, w):
        """Evaluate the bilinear form on two coordinate vectors."""
        return sum(
            (a * b for a, b in zip(vector(v), self.gram @ vector(w))), to_fraction(0)
        )

    def with_slice(self, slice_basis: SliceBasis | None) -> "OrthogonalRep":
        return OrthogonalRep(self.name, self.gram, self.generators, self.metadata, slice_basis)


@dataclass(frozen=True)
class ValidationReport:
    passed: bool
    violation: str | None = None
    generator_index: int | None = None

    @property
    def message(self) -> str:
        if self.passed:
            return "ok"
        if self.generator_index is not None:
            return f"{self.violation} (generator {self.generator_index})"
        return self.violation

    def raise_if_failed(self) -> None:
        if not self.passed:
            raise RepValidationError(self)


def validate(rep: OrthogonalRep) -> ValidationReport:
    """Check that the form is symmetric and invertible and every generator
    is skew-adjoint for it (``A^T G + G A == 0`` exactly)."""
    G = rep.gram
    if not G.is_symmetric():
        return ValidationReport(False, "gram not symmetric")
    if rank(G) != G.nrows:
        return ValidationReport(False, "gram singular")
    for i, A in enumerate(rep.generators):
        if not (A.T @ G + G @ A).is_zero():
            return ValidationReport(False, "generator not skew-adjoint", i)
    return ValidationReport(True)


# -- serialisation ------------------------------------------------------------


def to_dict(rep: OrthogonalRep) -> dict:
    out = {
        "name": rep.name,
        "dim": rep.dim,
        "gram": rep.gram.to_strings(),
        "generators": [A.to_strings() for A in rep.generators],
    }
    if rep.slice is not None:
        out["slice"] = [[format_fraction(x) for x in v] for v in rep.slice.vectors]
    out["metadata"] = dict(rep.metadata)
    return out


def _parse_matrix(raw, field_name: str, ncols: int | None = None) -> ExactMatrix:
    if not isinstance(raw, list) or not all(isinstance(r, list) for r in raw):
        raise RepFormatError("expected a list of rows", field=field_name)
    rows = []
    for i, row in enumerate(raw):
        entries = []
        for j, x in enumerate(row):
            if isinstance(x, float) or isinstance(x, bool):
                raise RepFormatError(f"inexact entry {x!r}", field=f"{field_name}[{i}][{j}]")
            try:
                entries.append(to_fraction(x))
            except (TypeError, ValueError, ZeroDivisionError) as exc:
                raise RepFormatError(str(exc), field=f"{field_name}[{i}][{j}]") from None
        rows.append(entries)
    if not rows:
        if ncols is None:
            raise RepFormatError("empty matrix", field=field_name)
        return ExactMatrix([], cols=ncols)
    try:
        return ExactMatrix(rows)
    except ValueError as exc:
        raise RepFormatError(str(exc), field=field_name) from None


def from_dict(data: Mapping) -> OrthogonalRep:
    if not isinstance(data, Mapping):
        raise RepFormatError("top level must be an object")
    for key in ("name", "dim", "gram", "generators"):
        if key not in data:
            raise RepFormatError("missing required key", field=key)
    dim = data["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
        raise RepFormatError("dim must be a non-negative integer", field="dim")
    gram = _parse_matrix(data["gram"], "gram", ncols=dim)
    if gram.shape != (dim, dim):
        raise RepFormatError(f"gram has shape {gram.shape}, expected ({dim}, {dim})", field="gram")
    if not isinstance(data["generators"], list):
        raise RepFormatError("expected a list of matrices", field="generators")
    gens = []
    for i, raw in enumerate(data["generators"]):
        A = _parse_matrix(raw, f"generators[{i}]", ncols=dim)
        if A.shape != (dim, dim):
            raise RepFormatError(f"shape {A.shape}, expected ({dim}, {dim})", field=f"generators[{i}]")
        gens.append(A)
    slice_basis = None
    if data.get("slice") is not None:
        S = _parse_matrix(data["slice"], "slice", ncols=dim)
        if S.nrows and S.ncols != dim:
            raise RepFormatError(f"slice vectors have length {S.ncols}, expected {dim}", field="slice")
        try:
            slice_basis = SliceBasis(S.rows)
        except ValueError as exc:
            raise RepFormatError(str(exc), field="slice") from None
    metadata = data.get("metadata", {})
    if not isinstance(metadata, Mapping):
        raise RepFormatError("metadata must be an object", field="metadata")
    return OrthogonalRep(str(data["name"]), gram, tuple(gens), metadata, slice_basis)


def dumps(rep: OrthogonalRep) -> str:
    return json.dumps(to_dict(rep), indent=1, sort_keys=False)


def loads(text: str) -> OrthogonalRep:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RepFormatError(exc.msg, line=exc.lineno) from None
    rep = from_dict(data)
    validate(rep).raise_if_failed()
    return rep


def save(rep: OrthogonalRep, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(rep))
        fh.write("\n")


def load(path: str | PathLike) -> OrthogonalRep:
    """Read and validate a representation file."""
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
