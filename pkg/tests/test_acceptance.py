"""Acceptance gate: one test per criterion, summarised as PASS/FAIL lines."""

import itertools
import time

import numpy as np
from scipy.optimize import linear_sum_assignment

from polarslice import catalog, transfer as T
from polarslice.exact_linalg import ExactMatrix
from polarslice.polarity import Verdict, extract_slice, generic_orbit_dimension, generic_vector, polarity_test
from polarslice.rep import SliceBasis, validate
from polarslice.transfer import SingularValueProblem as SVP, SpectrumProblem as SP

import oracles
from helpers import orthogonal, rect_with_gaps, spectrum_with_pattern, symmetric_with_gaps


def test_1_polarity_regression(criterion):
    with criterion(1, "polarity regression over the catalog at smallest parameters") as c:
        start = time.perf_counter()
        specs = catalog.acceptance_instances()
        assert len(specs) == 23
        for spec in specs:
            rep, _ = catalog.catalog_build(spec)
            report = polarity_test(rep, trials=3)
            want = Verdict.NOT_POLAR if spec.family_id == "so2-double-standard" else Verdict.POLAR
            assert report.verdict is want, spec.label()
            used = report.used_samples()
            assert len(used) >= 3 and len({all(s.membership) for s in used}) == 1, spec.label()
        elapsed = time.perf_counter() - start
        assert elapsed < 60, f"{elapsed:.1f}s"
        c.detail = f"{len(specs)} instances in {elapsed:.1f}s"


def test_2_quartics_golden(criterion):
    with criterion(2, "quartics orbit dimension 3 and exact slice span(x^4+y^4, x^2y^2)") as c:
        rep, _ = catalog.catalog_build("sl2-quartics")
        assert generic_orbit_dimension(rep) == 3
        want = SliceBasis(((1, 0, 0, 0, 1), (0, 0, 1, 0, 0))).rref()
        assert extract_slice(rep, (1, 0, 1, 0, 1)).rref() == want
        # and the same row-reduced basis at a random point of that slice
        a, b = (int(x) for x in generic_vector(2, 11))
        assert extract_slice(rep, (a, 0, b, 0, a)).rref() == want


def _traceless_distinct(rng):
    lam = np.sort(rng.normal(size=3))
    while np.min(np.diff(lam)) < 0.1:
        lam = np.sort(rng.normal(size=3))
    return lam - lam.mean()


def test_3_ed_degree_counts(criterion):
    with criterion(3, "ED degree counts 6/3/6 and 20 random instances each") as c:
        assert T.ed_degree_spectrum([1, 2, 3]) == 6
        assert T.ed_degree_spectrum([7, 7, 9]) == 3
        assert T.ed_degree_adjoint_orbit(3) == 6
        rng = np.random.default_rng(2024)
        worst = 0.0
        cases = [
            (lambda: np.array([1.0, 2.0, 3.0]), 6),
            (lambda: np.array([7.0, 7.0, 9.0]), 3),
            (lambda: _traceless_distinct(rng), T.ed_degree_adjoint_orbit(3)),  # adjoint orbit in sl_3
        ]
        for make, count in cases:
            for _ in range(20):
                crit = T.critical_points_spectrum(SP(symmetric_with_gaps(3, rng), make()))
                assert len(crit) == count
                worst = max(worst, float(np.max(crit.residuals)))
        assert worst <= 1e-8
        c.detail = f"max residual {worst:.1e}"


def test_4_rearrangement(criterion):
    with criterion(4, "rearrangement optimality for n <= 6, 50 pairs each") as c:
        rng = np.random.default_rng(4)
        smallest = np.inf
        for n in range(1, 7):
            for _ in range(50):
                mu = np.sort(rng.normal(size=n))
                lam = np.sort(rng.normal(size=n))
                costs = oracles.rearrangement_costs(mu, lam)
                ident = tuple(range(n))
                others = [v for k, v in costs.items() if k != ident]
                if others:
                    margin = min(others) - costs[ident]
                    smallest = min(smallest, margin)
                    assert margin >= 1e-10
                # the solver picks the same assignment on diagonal data
                B = T.nearest_with_spectrum(SP(np.diag(mu), lam))
                assert np.allclose(B, np.diag(lam), atol=1e-12)
        c.detail = f"smallest margin {smallest:.1e}"


def test_5_equivariance(criterion):
    with criterion(5, "equivariance on 100 instances per family at 1e-7") as c:
        rng = np.random.default_rng(5)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            problem = SP(symmetric_with_gaps(n, rng), spectrum_with_pattern([1] * n, rng))
            assert T.equivariance_check(problem, orthogonal(n, rng), 1e-7)
        for _ in range(100):
            n, m = ((1, 2), (2, 3), (2, 4))[int(rng.integers(0, 3))]
            sigma = np.sort(rng.uniform(0.5, 3.0, size=n))[::-1] + np.arange(n)[::-1] * 0.2
            problem = SVP(rect_with_gaps(n, m, rng), sigma)
            assert T.equivariance_check(problem, (orthogonal(n, rng), orthogonal(m, rng)), 1e-7)
        c.detail = "200 instances"


def test_6_slice_containment(criterion):
    with criterion(6, "slice containment on 100 diagonal data points per family at 1e-8") as c:
        rng = np.random.default_rng(6)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            d = rng.permutation(spectrum_with_pattern([1] * n, rng))
            lam = np.sort(rng.normal(size=n))
            assert T.slice_containment_check(SP(np.diag(d), lam), 1e-8)
        for _ in range(100):
            n, m = ((1, 2), (2, 3), (2, 4))[int(rng.integers(0, 3))]
            d = rng.permutation(np.arange(1, n + 1) * 0.5 + rng.uniform(0, 0.4, size=n))
            D = np.zeros((n, m))
            D[range(n), range(n)] = d * rng.choice([-1, 1], size=n)
            sigma = np.sort(rng.uniform(0.5, 3.0, size=n))[::-1] + np.arange(n)[::-1] * 0.2
            assert T.slice_containment_check(SVP(D, sigma), 1e-8)
        c.detail = "200 instances"


def test_7_exactness(criterion):
    with criterion(7, "exact validation of every catalog entry and Killing form brute force") as c:
        count = 0
        for spec in catalog.acceptance_instances():
            rep, _ = catalog.catalog_build(spec)
            assert validate(rep).passed, spec.label()
            for A in rep.generators:
                assert (A.T @ rep.gram + rep.gram @ A).is_zero(), spec.label()
            count += 1
        for n in (2, 3, 4):
            rep, _ = catalog.catalog_build("adjoint-sln", n=n)
            assert rep.gram == ExactMatrix(oracles.killing_gram(oracles.sl_basis_matrices(n)))
        c.detail = f"{count} entries"


def test_8_singular_oracle(criterion):
    with criterion(8, "singular-value critical sets match the Lagrange oracle to 1e-6") as c:
        rng = np.random.default_rng(8)
        worst = 0.0
        for (n, m), sigma in (((1, 2), [1.7]), ((2, 3), [2.0, 0.8])):
            for _ in range(3):
                M = rect_with_gaps(n, m, rng)
                ours = T.critical_points_singular_values(SVP(M, sigma)).points
                ref = oracles.lagrange_critical_points(M, sigma)
                assert len(ref) == len(ours) == 2**n * len(list(itertools.permutations(range(n))))
                cost = np.array([[np.linalg.norm(P - Q) for Q in ours] for P in ref])
                rows, cols = linear_sum_assignment(cost)
                worst = max(worst, float(cost[rows, cols].max()))
        assert worst <= 1e-6
        c.detail = f"max point distance {worst:.1e}"
