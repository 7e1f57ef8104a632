"""Exact bounds on a regression slope over all subsets of candidate covariates."""

from .bounds import BoundInputs, Envelope, bound_inputs, envelope, envelope_grid_oracle
from .data import Dataset, InteractionSpec, build_interactions, load_csv, write_csv
from .estimator import SlopeBounds
from .exceptions import (
    ColumnNotFound,
    DataFileError,
    DegenerateExplanatory,
    DegenerateInput,
    InvalidInput,
    NodeBudgetExceeded,
    RankDeficient,
    SlopeBoundsError,
    TooFewRows,
)
from .linalg import (
    center_columns,
    correlation,
    make_context,
    multi_slope,
    r_squared,
    residualize,
    simple_slope,
)
from .search import (
    Extrema,
    Node,
    SearchResult,
    branch_and_bound,
    brute_force,
    has_potential,
    select_branch_var,
    update_extrema,
)

__version__ = "0.1.0"
