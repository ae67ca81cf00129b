import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from polarslice import transfer as T
from polarslice.transfer import SingularValueProblem as SVP, SpectrumProblem as SP

import oracles
from helpers import orthogonal, rect_with_gaps, spectrum_with_pattern, symmetric_with_gaps


def diag_nm(values, n, m):
    D = np.zeros((n, m))
    D[range(len(values)), range(len(values))] = values
    return D


# -- prescribed spectrum --------------------------------------------------------------


def test_nearest_spectrum_examples():
    assert np.allclose(T.nearest_with_spectrum(SP(np.diag([1.0, 2.0]), [5, 6])), np.diag([5, 6]))
    assert np.allclose(T.nearest_with_spectrum(SP(np.diag([3.0, 1.0]), [2, 5])), np.diag([5, 2]))
    # brute force over both diagonal candidates
    _, best = oracles.brute_nearest_diagonal([3, 1], [2, 5])
    assert best == 5.0


def test_nearest_spectrum_fixed_point():
    rng = np.random.default_rng(0)
    A = symmetric_with_gaps(4, rng)
    B = T.nearest_with_spectrum(SP(A, np.linalg.eigvalsh(A)))
    assert np.linalg.norm(A - B) < 1e-10


def test_nearest_spectrum_tied_data_allowed():
    B = T.nearest_with_spectrum(SP(np.eye(2), [1, 2]))
    assert np.allclose(np.linalg.eigvalsh(B), [1, 2])


def test_critical_spectrum_two_by_two():
    crit = T.critical_points_spectrum(SP(np.diag([0.0, 1.0]), [3, 4]))
    assert len(crit) == 2 == crit.ed_degree_expected
    got = sorted(tuple(np.round(np.diag(P), 12)) for P in crit.points)
    assert got == [(3.0, 4.0), (4.0, 3.0)]
    # Lagrange condition <A - B | S B - B S> = 0 with the only skew direction
    A = np.diag([0.0, 1.0])
    S = np.array([[0.0, 1.0], [-1.0, 0.0]])
    for B in crit.points:
        assert abs(np.sum((A - B) * (S @ B - B @ S))) < 1e-12


def test_critical_spectrum_multiplicity():
    rng = np.random.default_rng(1)
    crit = T.critical_points_spectrum(SP(symmetric_with_gaps(3, rng), [7, 7, 9]))
    assert len(crit) == 3
    assert crit.assignments == [(7.0, 7.0, 9.0), (7.0, 9.0, 7.0), (9.0, 7.0, 7.0)]


def test_ed_degree_examples():
    assert T.ed_degree_spectrum([1, 2, 3]) == 6
    assert T.ed_degree_spectrum([5, 5, 5]) == 1
    assert T.ed_degree_spectrum([7, 7, 9]) == 3
    assert [T.ed_degree_adjoint_orbit(n) for n in (2, 3, 4)] == [2, 6, 24]
    with pytest.raises(T.TransferError):
        T.ed_degree_adjoint_orbit(1)


def compositions(n):
    for k in range(1, n + 1):
        for cut in itertools.combinations(range(1, n), k - 1):
            edges = (0,) + cut + (n,)
            yield tuple(b - a for a, b in zip(edges, edges[1:]))


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_count_matches_multinomial_for_all_patterns(n):
    rng = np.random.default_rng(100 + n)
    for mults in compositions(n):
        lam = spectrum_with_pattern(mults, rng)
        crit = T.critical_points_spectrum(SP(symmetric_with_gaps(n, rng), lam))
        assert len(crit) == crit.ed_degree_expected == T.ed_degree_spectrum(lam.tolist())
        assert len({tuple(np.round(P, 9).ravel()) for P in crit.points}) == len(crit)
        assert np.all(crit.residuals <= 1e-8)
        assert np.all(crit.distances >= 0)


@pytest.mark.parametrize("seed", range(10))
def test_min_critical_point_is_nearest(seed):
    rng = np.random.default_rng(seed)
    n = 2 + seed % 4
    problem = SP(symmetric_with_gaps(n, rng), spectrum_with_pattern([1] * n, rng))
    B = T.nearest_with_spectrum(problem)
    crit = T.critical_points_spectrum(problem)
    assert np.linalg.norm(crit.nearest() - B) < 1e-9
    lam = problem.spectrum
    assert np.max(np.abs(np.linalg.eigvalsh(B) - lam)) <= 1e-9 * np.max(np.abs(lam))
    assert T.verify_criticality(problem, B) <= 1e-8


def test_nearest_beats_random_isospectral_points():
    rng = np.random.default_rng(7)
    problem = SP(symmetric_with_gaps(3, rng), [0.0, 1.0, 3.0])
    best = np.sum((problem.data - T.nearest_with_spectrum(problem)) ** 2)
    for _ in range(200):
        Q = orthogonal(3, rng)
        C = Q @ np.diag(rng.permutation(problem.spectrum)) @ Q.T
        assert best <= np.sum((problem.data - C) ** 2) + 1e-12


def test_non_generic_data_rejected():
    with pytest.raises(T.NonGenericDataError, match="non-generic data"):
        T.critical_points_spectrum(SP(np.diag([1.0, 1.0, 4.0]), [0, 3, 5]))


def test_problem_validation():
    with pytest.raises(T.TransferError):
        SP(np.array([[1.0, 2.0], [0.0, 1.0]]), [1, 2])
    with pytest.raises(T.TransferError):
        SP(np.eye(2), [2, 1])
    with pytest.raises(T.TransferError):
        SVP(np.ones((3, 2)), [1, 2])
    with pytest.raises(T.TransferError):
        SVP(np.ones((2, 3)), [1, 2])


# -- criticality residual -----------------------------------------------------------


def test_residual_examples():
    rng = np.random.default_rng(3)
    problem = SP(symmetric_with_gaps(3, rng), [1.0, 2.0, 4.0])
    _, Q = np.linalg.eigh(problem.data)
    for pi in itertools.permutations(range(3)):
        B = Q @ np.diag(problem.spectrum[list(pi)]) @ Q.T
        assert T.verify_criticality(problem, B) <= 1e-8
    # a point on the variety that is not critical
    G = orthogonal(3, rng)
    B = G @ np.diag(problem.spectrum) @ G.T
    assert T.verify_criticality(problem, B) > 1e-3
    with pytest.raises(T.OffVarietyError):
        T.verify_criticality(problem, B + 0.1 * np.eye(3))


def test_residual_single_point_variety():
    problem = SP(np.array([[1.0, 2.0], [2.0, 3.0]]), [1.0, 1.0])
    assert T.verify_criticality(problem, np.eye(2)) == 0.0


# -- prescribed singular values ------------------------------------------------------


def test_nearest_singular_examples():
    M = diag_nm([3.0, 1.0], 2, 3)
    B = T.nearest_with_singular_values(SVP(M, [5, 2]))
    assert np.allclose(B, diag_nm([5, 2], 2, 3))
    cands = oracles.brute_signed_diagonal([3, 1], [5, 2], (2, 3))
    best = min(cands, key=lambda c: c[1])[0]
    assert np.allclose(best, diag_nm([5, 2], 2, 3))
    d_neg = np.sum((M - diag_nm([-5, 2], 2, 3)) ** 2)
    assert d_neg > np.sum((M - B) ** 2)


def test_nearest_singular_fixed_point():
    rng = np.random.default_rng(4)
    M = rect_with_gaps(2, 4, rng)
    s = np.linalg.svd(M, compute_uv=False)
    assert np.linalg.norm(T.nearest_with_singular_values(SVP(M, s)) - M) < 1e-10


def test_critical_singular_counts():
    rng = np.random.default_rng(5)
    one = T.critical_points_singular_values(SVP(rect_with_gaps(1, 2, rng), [2.0]))
    assert len(one) == 2 == one.ed_degree_expected
    crit = T.critical_points_singular_values(SVP(diag_nm([3.0, 1.0], 2, 3), [2.0, 1.0]))
    assert len(crit) == 8
    assert np.all(crit.residuals <= 1e-8)
    assert np.allclose(crit.nearest(), diag_nm([2, 1], 2, 3))


def test_square_case_unsupported():
    with pytest.raises(T.UnsupportedProblemError, match="square case parity"):
        T.critical_points_singular_values(SVP(np.diag([2.0, 1.0]), [2, 1]))


def test_singular_non_generic():
    with pytest.raises(T.NonGenericDataError):
        T.critical_points_singular_values(SVP(diag_nm([1.0, 1.0], 2, 3), [2, 1]))
    with pytest.raises(T.NonGenericDataError):
        T.critical_points_singular_values(SVP(diag_nm([1.0, 0.0], 2, 3), [2, 1]))
    with pytest.raises(T.NonGenericDataError):
        T.critical_points_singular_values(SVP(diag_nm([3.0, 1.0], 2, 3), [1, 1]))


def test_singular_matches_lagrange_oracle_small():
    rng = np.random.default_rng(6)
    M = rect_with_gaps(1, 2, rng)
    ours = T.critical_points_singular_values(SVP(M, [1.5])).points
    ref = oracles.lagrange_critical_points(M, [1.5])
    assert len(ref) == len(ours) == 2
    for P in ref:
        assert min(np.linalg.norm(P - Q) for Q in ours) < 1e-6


# -- group checks ------------------------------------------------------------------


def test_equivariance_examples():
    rng = np.random.default_rng(8)
    problem = SP(symmetric_with_gaps(3, rng), [0.0, 1.0, 2.5])
    assert T.equivariance_check(problem, np.eye(3))
    assert T.equivariance_check(problem, orthogonal(3, rng))
    sv = SVP(rect_with_gaps(2, 3, rng), [2.0, 1.0])
    assert T.equivariance_check(sv, (orthogonal(2, rng), orthogonal(3, rng)))
    with pytest.raises(T.TransferError):
        T.equivariance_check(problem, 2 * np.eye(3))


def test_equivariance_detects_wrong_action():
    # transposed action on the singular family is not the group action for a generic U
    rng = np.random.default_rng(9)
    sv = SVP(rect_with_gaps(2, 3, rng), [2.0, 1.0])
    U, V = orthogonal(2, rng), orthogonal(3, rng)
    here = T.critical_points_singular_values(sv)
    moved = T.critical_points_singular_values(SVP(U @ sv.data @ V.T, sv.sigma))
    wrong = [U.T @ P @ V for P in here.points]
    assert not T._same_point_sets(wrong, moved.points, 1e-7)


def test_containment_examples():
    assert T.slice_containment_check(SP(np.diag([1.0, 2.0, 4.0]), [0, 3, 5]))
    assert T.slice_containment_check(SVP(diag_nm([3.0, 1.0], 2, 3), [2, 1]))
    with pytest.raises(T.NonGenericDataError):
        T.slice_containment_check(SP(np.diag([1.0, 1.0, 4.0]), [0, 3, 5]))
    with pytest.raises(T.TransferError):
        T.slice_containment_check(SP(np.array([[1.0, 0.5], [0.5, 2.0]]), [0, 3]))


@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_nearest_spectrum_properties(n, seed):
    rng = np.random.default_rng(seed)
    problem = SP(symmetric_with_gaps(n, rng), np.sort(rng.normal(size=n) * 3))
    B = T.nearest_with_spectrum(problem)
    lam = problem.spectrum
    assert np.allclose(B, B.T, atol=0)
    assert np.max(np.abs(np.linalg.eigvalsh(B) - lam)) <= 1e-9 * max(1.0, np.max(np.abs(lam)))
    # no distinct rearrangement does better
    crit = T.critical_points_spectrum(problem)
    assert np.min(crit.distances) >= np.sum((problem.data - B) ** 2) - 1e-9
