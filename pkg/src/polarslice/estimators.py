"""scikit-learn style wrappers around the polarity test and the nearest-point solvers."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted

from .polarity import (
    DEFAULT_SEED,
    DEFAULT_TRIALS,
    MAX_TRIALS,
    Verdict,
    extract_slice,
    polarity_test,
    verify_slice,
)
from .rep import OrthogonalRep
from .transfer import (
    DEFAULT_TOL,
    SingularValueProblem,
    SpectrumProblem,
    critical_points_singular_values,
    critical_points_spectrum,
    nearest_with_singular_values,
    nearest_with_spectrum,
)


class PolarityTester(BaseEstimator):
    """Fit on an :class:`OrthogonalRep` to decide polarity and extract a slice.

    After ``fit``: ``report_``, ``verdict_``, ``orbit_dim_``,
    ``cohomogeneity_``, and for polar representations ``slice_`` (certified
    when the extracted slice passes verification) and ``slice_check_``.
    """

    def __init__(self, seed=DEFAULT_SEED, trials=DEFAULT_TRIALS, max_trials=MAX_TRIALS, method="auto"):
        self.seed = seed
        self.trials = trials
        self.max_trials = max_trials
        self.method = method

    def fit(self, rep: OrthogonalRep, y=None):
        if not isinstance(rep, OrthogonalRep):
            raise TypeError(f"expected an OrthogonalRep, got {type(rep).__name__}")
        report = polarity_test(rep, self.seed, self.trials, max_trials=self.max_trials, method=self.method)
        self.report_ = report
        self.verdict_ = report.verdict
        self.orbit_dim_ = report.orbit_dim
        self.cohomogeneity_ = report.cohomogeneity
        self.slice_ = None
        self.slice_check_ = None
        if report.verdict is Verdict.POLAR:
            v = report.used_samples()[0].vector
            sl = extract_slice(rep, v, orbit_dim=report.orbit_dim)
            check = verify_slice(rep, sl, self.seed, self.trials)
            self.slice_check_ = check
            self.slice_ = sl.certified() if check.certified else sl
        return self

    @property
    def is_polar_(self) -> bool:
        check_is_fitted(self, "report_")
        return self.verdict_ is Verdict.POLAR


def _as_matrix_batch(X, shape=None):
    X = np.asarray(X, dtype=float)
    if X.ndim == 3:
        return check_array(X, allow_nd=True), X.shape[1:], False
    X = check_array(X)
    if shape is None:
        side = int(round(np.sqrt(X.shape[1])))
        if side * side != X.shape[1]:
            raise ValueError(f"cannot read rows of length {X.shape[1]} as square matrices")
        shape = (side, side)
    if shape[0] * shape[1] != X.shape[1]:
        raise ValueError(f"rows of length {X.shape[1]} do not fit shape {shape}")
    return X.reshape(len(X), *shape), tuple(shape), True


class SpectrumProjector(TransformerMixin, BaseEstimator):
    """Map symmetric matrices to the closest matrices with spectrum ``spectrum``.

    ``X`` is either ``(n_samples, n, n)`` or flattened ``(n_samples, n*n)``;
    ``transform`` returns the same layout.
    """

    def __init__(self, spectrum=None, tol=DEFAULT_TOL):
        self.spectrum = spectrum
        self.tol = tol

    def fit(self, X, y=None):
        mats, shape, _ = _as_matrix_batch(X)
        lam = np.asarray(self.spectrum, dtype=float)
        if lam.shape != (shape[0],):
            raise ValueError(f"spectrum of length {lam.size} for {shape[0]}x{shape[0]} matrices")
        if np.any(np.diff(lam) < 0):
            raise ValueError("spectrum must be sorted non-decreasing")
        self.n_ = shape[0]
        self.spectrum_ = lam
        return self

    def transform(self, X):
        check_is_fitted(self, "spectrum_")
        mats, shape, flat = _as_matrix_batch(X)
        if shape != (self.n_, self.n_):
            raise ValueError(f"fitted for {self.n_}x{self.n_} matrices, got {shape}")
        out = np.stack([nearest_with_spectrum(SpectrumProblem(A, self.spectrum_), self.tol) for A in mats])
        return out.reshape(len(out), -1) if flat else out

    def critical_points(self, A):
        check_is_fitted(self, "spectrum_")
        return critical_points_spectrum(SpectrumProblem(A, self.spectrum_), self.tol)


class SingularValueProjector(TransformerMixin, BaseEstimator):
    """Map n x m matrices to the closest matrices with singular values ``sigma``.

    Flattened input needs ``shape=(n, m)``.
    """

    def __init__(self, sigma=None, shape=None, tol=DEFAULT_TOL):
        self.sigma = sigma
        self.shape = shape
        self.tol = tol

    def fit(self, X, y=None):
        mats, shape, _ = _as_matrix_batch(X, self.shape)
        s = np.asarray(self.sigma, dtype=float)
        if s.shape != (shape[0],):
            raise ValueError(f"sigma of length {s.size} for {shape[0]}x{shape[1]} matrices")
        self.shape_ = shape
        self.sigma_ = s
        return self

    def transform(self, X):
        check_is_fitted(self, "sigma_")
        mats, shape, flat = _as_matrix_batch(X, self.shape_)
        if shape != self.shape_:
            raise ValueError(f"fitted for shape {self.shape_}, got {shape}")
        out = np.stack(
            [nearest_with_singular_values(SingularValueProblem(M, self.sigma_), self.tol) for M in mats]
        )
        return out.reshape(len(out), -1) if flat else out

    def critical_points(self, M):
        check_is_fitted(self, "sigma_")
        return critical_points_singular_values(SingularValueProblem(M, self.sigma_), self.tol)
