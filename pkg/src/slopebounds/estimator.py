"""scikit-learn style front end to the slope search."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted, validate_data

from .data import Dataset
from .exceptions import ColumnNotFound, InvalidInput
from .linalg import simple_slope
from .search import BRUTE_FORCE_CAP, branch_and_bound, brute_force

METHODS = ("bb", "bf", "both")


def results_agree(a, b, rtol: float = 1e-9) -> bool:
    scale = max(1.0, abs(a.lower), abs(a.upper))
    return abs(a.lower - b.lower) <= rtol * scale and abs(a.upper - b.upper) <= rtol * scale


class SlopeBounds(BaseEstimator):
    """Range of the coefficient of one column of ``X`` over all covariate subsets.

    ``fit(X, y)`` treats column ``explanatory`` of ``X`` (an index, or a name
    when ``X`` is a DataFrame) as the variable of interest and every other
    column as an optional covariate. Columns are centered internally, so the
    models are least-squares fits with an intercept.

    Parameters
    ----------
    explanatory : int or str, default=0
        Column of ``X`` whose coefficient is bounded.
    method : {"bb", "bf", "both"}, default="bb"
        Branch and bound, brute force enumeration, or both with a cross-check.
    queue : {"fifo", "lifo"}, default="fifo"
        Queue discipline of the branch-and-bound frontier.
    node_budget : int or None, default=None
        Maximum number of queue pops before giving up.
    brute_force_cap : int, default=25
        Largest covariate count brute force will enumerate.

    Attributes
    ----------
    lower_, upper_ : float
        Smallest and largest coefficient found.
    beta_simple_ : float
        Coefficient with no covariates.
    argmin_, argmax_ : list of str
        Covariate names of the models attaining ``lower_`` and ``upper_``.
    result_ : SearchResult
        Full search record (node counts, timing) of the primary method.
    agreement_ : bool or None
        For ``method="both"``, whether branch and bound matched brute force.
    """

    def __init__(self, explanatory=0, method="bb", queue="fifo", node_budget=None,
                 brute_force_cap=BRUTE_FORCE_CAP):
        self.explanatory = explanatory
        self.method = method
        self.queue = queue
        self.node_budget = node_budget
        self.brute_force_cap = brute_force_cap

    def _explanatory_index(self, n_features):
        names = getattr(self, "feature_names_in_", None)
        if isinstance(self.explanatory, str):
            if names is None or self.explanatory not in list(names):
                raise ColumnNotFound(self.explanatory)
            return list(names).index(self.explanatory)
        j = int(self.explanatory)
        if not 0 <= j < n_features:
            raise InvalidInput(f"explanatory index {j} out of range for {n_features} columns")
        return j

    def fit(self, X, y):
        if self.method not in METHODS:
            raise InvalidInput(f"method must be one of {METHODS}, got {self.method!r}")
        X, y = validate_data(self, X, y, dtype=np.float64, y_numeric=True)
        j = self._explanatory_index(X.shape[1])
        names = getattr(self, "feature_names_in_", None)
        names = [str(c) for c in names] if names is not None else [f"x{i}" for i in range(X.shape[1])]
        others = [i for i in range(X.shape[1]) if i != j]
        self.dataset_ = Dataset.from_arrays(y, X[:, j], X[:, others], [names[i] for i in others],
                                            y_label="y", x_label=names[j])

        self.agreement_ = None
        if self.method == "bf":
            self.result_ = brute_force(self.dataset_, cap=self.brute_force_cap)
        else:
            self.result_ = branch_and_bound(self.dataset_, queue=self.queue, node_budget=self.node_budget)
        if self.method == "both":
            self.bf_result_ = brute_force(self.dataset_, cap=self.brute_force_cap)
            self.agreement_ = results_agree(self.result_, self.bf_result_)

        ext = self.result_.extrema
        self.lower_, self.upper_ = ext.lower, ext.upper
        self.argmin_ = self.dataset_.label_subset(ext.argmin_subset)
        self.argmax_ = self.dataset_.label_subset(ext.argmax_subset)
        self.beta_simple_ = simple_slope(self.dataset_.x, self.dataset_.y)
        return self

    @property
    def interval_(self):
        check_is_fitted(self, "result_")
        return self.lower_, self.upper_
