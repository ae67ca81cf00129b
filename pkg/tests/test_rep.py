import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from polarslice import catalog
from polarslice.exact_linalg import ExactMatrix
from polarslice.rep import (
    OrthogonalRep,
    RepFormatError,
    RepValidationError,
    SliceBasis,
    SliceStatus,
    dumps,
    load,
    loads,
    save,
    to_dict,
    validate,
)


@pytest.fixture(scope="module")
def quartics():
    return catalog.catalog_build("sl2-quartics")[0]


def test_identity_generator_is_not_skew():
    rep = OrthogonalRep("bad", ExactMatrix.identity(2), (ExactMatrix.identity(2),))
    report = validate(rep)
    assert not report.passed
    assert report.violation == "generator not skew-adjoint"
    assert report.generator_index == 0


def test_flipped_sign_breaks_quartics(quartics):
    gens = list(quartics.generators)
    A = [list(r) for r in gens[1].rows]
    i, j = next((i, j) for i in range(5) for j in range(5) if A[i][j] != 0)
    A[i][j] = -A[i][j]
    gens[1] = ExactMatrix(A)
    report = validate(OrthogonalRep("q", quartics.gram, tuple(gens)))
    assert not report.passed and report.generator_index == 1
    # the same failure by direct multiplication
    assert not (gens[1].T @ quartics.gram + quartics.gram @ gens[1]).is_zero()


def test_validate_order():
    asym = OrthogonalRep("a", ExactMatrix([[1, 2], [0, 1]]), ())
    assert validate(asym).violation == "gram not symmetric"
    sing = OrthogonalRep("s", ExactMatrix([[1, 1], [1, 1]]), ())
    assert validate(sing).violation == "gram singular"


def test_round_trip(tmp_path, quartics):
    sl = catalog.catalog_build("sl2-quartics")[1]
    rep = quartics.with_slice(sl)
    path = tmp_path / "q.json"
    save(rep, path)
    back = load(path)
    assert back == rep
    assert dumps(back) == dumps(rep)
    assert back.slice.same_span([(1, 0, 0, 0, 1), (0, 0, 1, 0, 0)])


def test_rationals_serialise_as_strings():
    rep = OrthogonalRep("half", ExactMatrix([[Fraction(1, 2)]]), (ExactMatrix([[0]]),))
    d = to_dict(rep)
    assert d["gram"] == [["1/2"]]
    assert loads(json.dumps(d)) == rep


def _doc(**over):
    d = {"name": "x", "dim": 2, "gram": [["1", "0"], ["0", "1"]], "generators": [[["0", "1"], ["-1", "0"]]]}
    d.update(over)
    return json.dumps(d)


def test_non_square_gram_rejected():
    with pytest.raises(RepFormatError) as exc:
        loads(_doc(gram=[["1", "0", "0"], ["0", "1", "0"]]))
    assert exc.value.field == "gram"


def test_singular_gram_rejected():
    with pytest.raises(RepValidationError, match="gram singular"):
        loads(_doc(gram=[["1", "1"], ["1", "1"]], generators=[]))


def test_float_entries_rejected():
    with pytest.raises(RepFormatError) as exc:
        loads(_doc(generators=[[[0.0, "1"], ["-1", "0"]]]))
    assert exc.value.field == "generators[0][0][0]"


def test_json_error_has_line():
    with pytest.raises(RepFormatError) as exc:
        loads('{\n "name": "x",\n "dim": }')
    assert exc.value.line == 3


def test_slice_basis_rejects_dependent():
    with pytest.raises(ValueError):
        SliceBasis(((1, 2), (2, 4)))
    sl = SliceBasis(((2, 0), (0, 3)))
    assert sl.same_span(((1, 1), (1, -1)))
    assert sl.certified().status is SliceStatus.CERTIFIED


vecs5 = st.lists(st.integers(-20, 20), min_size=5, max_size=5)


@given(vecs5, vecs5)
@settings(max_examples=50, deadline=None)
def test_generators_are_skew_on_random_vectors(v, w):
    rep = catalog.catalog_build("sl2-quartics")[0]
    for A in rep.generators:
        assert rep.form(A @ v, w) + rep.form(v, A @ w) == 0
