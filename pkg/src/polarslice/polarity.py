"""Randomised exact test for the existence of a slice, and slice extraction.

For a sufficiently general vector v, a slice exists iff for all u, w in
the orthogonal complement N of the orbit tangent space g.v we have
<u | A_j w> = 0 for every generator A_j. Equivalently, each quadratic
``q_j(u, w) = <u | A_j w>`` lies in the degree-2 part of the ideal generated
by the linear forms ``<u | A_i v>`` and ``<w | A_i v>``. Genericity is
realised by sampling v with random integer coordinates; each sampled v is
then handled exactly.

Two routes decide the degree-2 membership:

* ``"exact"`` builds the spanning set (coordinate forms times the linear
  forms) in the coefficient space of quadratics and decides membership with
  rational elimination.
* ``"auto"`` (default) runs the same construction over GF(p) as a prefilter
  and confirms each answer over the rationals by restricting q_j to N x N.
  A disagreement falls back to the exact route.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import exact_linalg as xl
from .exact_linalg import ExactMatrix, Vector
from .rep import OrthogonalRep, SliceBasis, SliceStatus

log = logging.getLogger(__name__)

DEFAULT_SEED = 1729
DEFAULT_TRIALS = 3
MAX_TRIALS = 12
ENTRY_BOUND = 10**6


class PolarityError(RuntimeError):
    pass


class DegenerateSampleError(PolarityError):
    """No usable generic sample: g.v is not maximal or the form is degenerate on it."""


class InconclusiveError(PolarityError):
    """Samples kept disagreeing up to the trial cap."""


class Verdict(str, enum.Enum):
    POLAR = "POLAR"
    NOT_POLAR = "NOT_POLAR"


@dataclass(frozen=True)
class Sample:
    seed: int
    vector: Vector
    tangent_rank: int
    nondegenerate: bool
    membership: tuple | None = None  # one flag per generator, None if not evaluated


@dataclass(frozen=True)
class Witness:
    vector: Vector
    generator_index: int
    pair: tuple | None = None  # (u, w) in the normal space with <u | A_j w> != 0


@dataclass
class PolarityReport:
    verdict: Verdict
    orbit_dim: int
    cohomogeneity: int
    samples: list
    witness: Witness | None = None
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    method: str = "auto"

    def used_samples(self) -> list:
        return [s for s in self.samples if s.membership is not None]

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "orbit_dim": self.orbit_dim,
            "cohomogeneity": self.cohomogeneity,
            "seed": self.seed,
            "trials": self.trials,
            "method": self.method,
            "samples": [
                {
                    "seed": s.seed,
                    "tangent_rank": s.tangent_rank,
                    "nondegenerate": s.nondegenerate,
                    "membership": None if s.membership is None else list(s.membership),
                }
                for s in self.samples
            ],
            "witness": None,
        }
        if self.witness is not None:
            w = self.witness
            out["witness"] = {
                "vector": [str(x) for x in w.vector],
                "generator_index": w.generator_index,
                "pair": None if w.pair is None else [[str(x) for x in p] for p in w.pair],
            }
        return out


# -- sampling -------------------------------------------------------------------


def _dim(rep_or_dim) -> int:
    return rep_or_dim if isinstance(rep_or_dim, int) else rep_or_dim.dim


def generic_vector(rep_or_dim, seed: int) -> Vector:
    """Random integer vector, entries uniform in [-10**6, 10**6]."""
    rng = np.random.default_rng(seed)
    ints = rng.integers(-ENTRY_BOUND, ENTRY_BOUND, size=_dim(rep_or_dim), endpoint=True)
    return tuple(Fraction(int(x)) for x in ints)


def orbit_tangent(rep: OrthogonalRep, v: Sequence) -> list[Vector]:
    """The vectors A_i v, which span the tangent space g.v."""
    v = xl.vector(v)
    if len(v) != rep.dim:
        raise ValueError(f"vector of length {len(v)} for a {rep.dim}-dim representation")
    return [A @ v for A in rep.generators]


def _tangent_rank(tangent: list[Vector], dim: int) -> int:
    if not tangent:
        return 0
    return xl.rank(ExactMatrix(tangent, cols=dim))


def _examine(rep: OrthogonalRep, seed: int) -> Sample:
    v = generic_vector(rep, seed)
    tangent = orbit_tangent(rep, v)
    r = _tangent_rank(tangent, rep.dim)
    nondeg = xl.restricted_form_nondegenerate(rep.gram, tangent)
    return Sample(seed, v, r, nondeg)


def survey_orbits(rep: OrthogonalRep, seed: int = DEFAULT_SEED, trials: int = DEFAULT_TRIALS) -> list[Sample]:
    """Tangent rank and form non-degeneracy at ``trials`` random vectors.

    Sample ``t`` uses seed ``seed + t``, so a larger ``trials`` extends the
    same sequence.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    return [_examine(rep, seed + t) for t in range(trials)]


def generic_orbit_dimension(rep: OrthogonalRep, seed: int = DEFAULT_SEED, trials: int = DEFAULT_TRIALS) -> int:
    return max(s.tangent_rank for s in survey_orbits(rep, seed, trials))


# -- the degree-2 membership criterion ----------------------------------------------


def _linear_forms(rep: OrthogonalRep, v: Vector) -> list[Vector]:
    """Coefficient vectors of u -> <u | A_i v>."""
    return [rep.gram @ t for t in orbit_tangent(rep, v)]


def _monomial_index(nvars: int) -> np.ndarray:
    """index[a, b] of the monomial z_a z_b among degree-2 monomials (a <= b, lex)."""
    idx = np.empty((nvars, nvars), dtype=np.int64)
    for a in range(nvars):
        for b in range(a, nvars):
            k = a * nvars - a * (a - 1) // 2 + (b - a)
            idx[a, b] = idx[b, a] = k
    return idx


def criterion_system(rep: OrthogonalRep, v: Sequence):
    """Spanning set and targets in the coefficient space of quadratics in (u, w).

    Returns ``(spanners, targets, size)`` where each spanner/target is a dict
    mapping monomial index to an exact coefficient. Variables are
    u_1..u_d, w_1..w_d.
    """
    d = rep.dim
    nvars = 2 * d
    idx = _monomial_index(nvars)
    forms = []
    for a in _linear_forms(rep, xl.vector(v)):
        forms.append({b: c for b, c in enumerate(a) if c})          # in u
        forms.append({d + b: c for b, c in enumerate(a) if c})      # in w
    spanners = []
    for ell in forms:
        for k in range(nvars):
            spanners.append({int(idx[k, b]): c for b, c in ell.items()})
    targets = []
    for A in rep.generators:
        M = rep.gram @ A  # <u | A w> = u^T (G A) w
        targets.append(
            {int(idx[a, d + b]): M[a, b] for a in range(d) for b in range(d) if M[a, b]}
        )
    return spanners, targets, nvars * (nvars + 1) // 2


def _dense(sparse: dict, size: int) -> list:
    out = [Fraction(0)] * size
    for k, c in sparse.items():
        out[k] = c
    return out


def membership_exact(rep: OrthogonalRep, v: Sequence) -> tuple[bool, ...]:
    """Degree-2 membership for every generator, by rational elimination."""
    spanners, targets, size = criterion_system(rep, v)
    if not targets:
        return ()
    return tuple(
        xl.rowspace_contains([_dense(t, size) for t in targets], [_dense(s, size) for s in spanners])
    )


def membership_mod_p(rep: OrthogonalRep, v: Sequence, p: int = xl.DEFAULT_PRIME) -> tuple[bool, ...]:
    """The same membership question over GF(p); a prefilter only."""
    spanners, targets, size = criterion_system(rep, v)
    if not targets:
        return ()

    def dense(rows):
        a = np.zeros((len(rows), size), dtype=np.int64)
        for i, row in enumerate(rows):
            for k, c in row.items():
                a[i, k] = xl.fraction_mod_p(c, p)
        return a

    S = dense(spanners) if spanners else np.zeros((0, size), dtype=np.int64)
    return tuple(bool(x) for x in xl.rowspace_contains_mod_p(dense(targets), S, p))


def normal_space(rep: OrthogonalRep, v: Sequence) -> list[Vector]:
    """Basis of {x : <x | g.v> = 0}."""
    forms = _linear_forms(rep, xl.vector(v))
    if not forms:
        return [tuple(Fraction(int(i == j)) for j in range(rep.dim)) for i in range(rep.dim)]
    return xl.nullspace_basis(ExactMatrix(forms, cols=rep.dim)).columns()


def membership_restricted(rep: OrthogonalRep, v: Sequence) -> tuple[tuple[bool, ...], dict]:
    """Exact membership via the restriction of each q_j to N x N.

    Returns the flags and, for failing generators, a pair (u, w) of normal
    vectors with <u | A_j w> != 0.
    """
    N = normal_space(rep, v)
    flags, pairs = [], {}
    if not N:
        return tuple(True for _ in rep.generators), pairs
    Nm = ExactMatrix.from_columns(N)
    for j, A in enumerate(rep.generators):
        R = Nm.T @ rep.gram @ A @ Nm
        bad = next(((a, b) for a in range(R.nrows) for b in range(R.ncols) if R[a, b]), None)
        flags.append(bad is None)
        if bad is not None:
            pairs[j] = (N[bad[0]], N[bad[1]])
    return tuple(flags), pairs


def criterion_memberships(rep: OrthogonalRep, v: Sequence, method: str = "auto") -> tuple[tuple[bool, ...], dict]:
    if method == "exact":
        flags = membership_exact(rep, v)
        pairs = membership_restricted(rep, v)[1] if not all(flags) else {}
        return flags, pairs
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    try:
        fast = membership_mod_p(rep, v)
    except ValueError:  # a denominator vanished mod p
        fast = None
    flags, pairs = membership_restricted(rep, v)
    if fast is not None and fast != flags:
        log.warning("prime-field prefilter disagreed with the exact check; using rational elimination")
        flags = membership_exact(rep, v)
    return flags, pairs


# -- the test -------------------------------------------------------------------


def polarity_test(
    rep: OrthogonalRep,
    seed: int = DEFAULT_SEED,
    trials: int = DEFAULT_TRIALS,
    *,
    max_trials: int = MAX_TRIALS,
    method: str = "auto",
) -> PolarityReport:
    """Decide whether ``rep`` admits a slice.

    Every usable sample (maximal tangent rank, form non-degenerate on g.v)
    must agree. Disagreement doubles the number of samples up to
    ``max_trials``; past that an :class:`InconclusiveError` is raised.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    samples: list[Sample] = []
    pairs_by_seed: dict[int, dict] = {}
    target = trials
    while True:
        samples.extend(_examine(rep, seed + t) for t in range(len(samples), target))
        best = max(s.tangent_rank for s in samples)
        for i, s in enumerate(samples):
            if s.tangent_rank == best and s.nondegenerate and s.membership is None:
                flags, pairs = criterion_memberships(rep, s.vector, method)
                samples[i] = Sample(s.seed, s.vector, s.tangent_rank, s.nondegenerate, flags)
                pairs_by_seed[s.seed] = pairs
        usable = [s for s in samples if s.tangent_rank == best and s.nondegenerate]
        if not usable:
            raise DegenerateSampleError(
                f"{rep.name}: the form is degenerate on g.v at all {len(samples)} samples "
                f"(seeds {seed}..{seed + len(samples) - 1}); rerun with another seed"
            )
        outcomes = {all(s.membership) for s in usable}
        if len(outcomes) == 1:
            break
        if target >= max_trials:
            raise InconclusiveError(
                f"{rep.name}: samples disagree after {len(samples)} trials"
            )
        target = min(2 * target, max_trials)

    # drop stale memberships of samples that turned out not to be maximal
    samples = [
        s if (s.tangent_rank == best and s.nondegenerate) else
        Sample(s.seed, s.vector, s.tangent_rank, s.nondegenerate, None)
        for s in samples
    ]
    polar = outcomes.pop()
    witness = None
    if not polar:
        s = usable[0]
        j = s.membership.index(False)
        witness = Witness(s.vector, j, pairs_by_seed[s.seed].get(j))
    return PolarityReport(
        verdict=Verdict.POLAR if polar else Verdict.NOT_POLAR,
        orbit_dim=best,
        cohomogeneity=rep.dim - best,
        samples=samples,
        witness=witness,
        seed=seed,
        trials=len(samples),
        method=method,
    )


def extract_slice(rep: OrthogonalRep, v: Sequence, *, orbit_dim: int | None = None,
                  seed: int = DEFAULT_SEED) -> SliceBasis:
    """Orthogonal complement of g.v as a claimed slice.

    ``v`` must have a maximal-dimensional orbit on which the form is
    non-degenerate; ``orbit_dim`` defaults to a fresh survey with ``seed``.
    """
    v = xl.vector(v)
    tangent = orbit_tangent(rep, v)
    if orbit_dim is None:
        orbit_dim = generic_orbit_dimension(rep, seed)
    r = _tangent_rank(tangent, rep.dim)
    if r < orbit_dim:
        raise DegenerateSampleError(
            f"g.v has dimension {r} < generic {orbit_dim}; resample v"
        )
    if not xl.restricted_form_nondegenerate(rep.gram, tangent):
        raise DegenerateSampleError("the form is degenerate on g.v; resample v")
    return SliceBasis(tuple(normal_space(rep, v)), SliceStatus.CLAIMED)


@dataclass(frozen=True)
class SliceCheck:
    status: str  # "CERTIFIED" or "REJECTED"
    reason: str | None = None  # "a": orbit dimension, "b": not orthogonal, "c": form degenerate
    witness: Vector | None = None
    detail: str = ""

    @property
    def certified(self) -> bool:
        return self.status == "CERTIFIED"


def verify_slice(rep: OrthogonalRep, slice_basis: SliceBasis | Sequence, seed: int = DEFAULT_SEED,
                 trials: int = DEFAULT_TRIALS) -> SliceCheck:
    """Check V = slice (+) g.v0 orthogonally at random v0 in the slice.

    (a) rank g.v0 == dim V - dim slice, (b) <slice | g.v0> == 0,
    (c) the form is non-degenerate on the slice. Certified iff (c) holds,
    (b) holds at every sample and (a) at some sample.
    """
    if not isinstance(slice_basis, SliceBasis):
        slice_basis = SliceBasis(tuple(slice_basis))
    vecs = slice_basis.vectors
    if any(len(x) != rep.dim for x in vecs):
        raise ValueError("slice vectors do not live in the representation space")
    if not xl.restricted_form_nondegenerate(rep.gram, vecs):
        return SliceCheck("REJECTED", "c", None, "form is degenerate on the slice")
    expected = rep.dim - len(vecs)
    records = []
    for t in range(trials):
        rng = np.random.default_rng(seed + t)
        coeffs = rng.integers(-ENTRY_BOUND, ENTRY_BOUND, size=len(vecs), endpoint=True)
        v0 = tuple(
            sum((int(c) * x[i] for c, x in zip(coeffs, vecs)), Fraction(0)) for i in range(rep.dim)
        )
        tangent = orbit_tangent(rep, v0)
        rank_ok = _tangent_rank(tangent, rep.dim) == expected
        clash = next(
            (j for j, tv in enumerate(tangent) if any(rep.form(x, tv) != 0 for x in vecs)), None
        )
        records.append((v0, rank_ok, clash))
    if not any(ok for _, ok, _ in records):
        return SliceCheck("REJECTED", "a", records[0][0],
                          f"g.v0 never has dimension {expected} = dim V - dim slice")
    for v0, _, clash in records:
        if clash is not None:
            return SliceCheck("REJECTED", "b", v0, f"slice not orthogonal to generator {clash} applied to v0")
    return SliceCheck("CERTIFIED")


def certify_slice(rep: OrthogonalRep, slice_basis: SliceBasis, seed: int = DEFAULT_SEED,
                  trials: int = DEFAULT_TRIALS) -> SliceBasis:
    check = verify_slice(rep, slice_basis, seed, trials)
    if not check.certified:
        raise PolarityError(f"slice rejected ({check.reason}): {check.detail}")
    return slice_basis.certified()
