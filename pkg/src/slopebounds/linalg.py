"""Centering, orthogonal projection and the scalar statistics built on it.

Vectors are 1-d float arrays of length ``n``; matrices are ``(n, k)`` arrays
whose columns are the variables. All inputs are assumed mean-zero once they
reach the projection routines, so no intercept column is ever carried.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .exceptions import DegenerateExplanatory, DegenerateInput, InvalidInput, RankDeficient

EPS_CENTER = 1e-10
EPS_ORTH = 1e-8
EPS_RANK = 1e-10


def as_matrix(m, n: Optional[int] = None) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2:
        raise InvalidInput(f"expected a 2-d matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise InvalidInput(f"row count mismatch: expected {n}, got {m.shape[0]}")
    return m


def center_columns(m) -> np.ndarray:
    """Subtract each column's mean.

    A column whose mean is already within ``EPS_CENTER * max|entry|`` of zero
    is returned untouched, which makes centering idempotent bit-for-bit.
    """
    m = np.array(m, dtype=float, copy=True)
    squeeze = m.ndim == 1
    m = as_matrix(m)
    if m.shape[0] == 0:
        raise InvalidInput("cannot center an empty matrix")
    means = m.mean(axis=0)
    scale = np.abs(m).max(axis=0)
    shift = np.abs(means) > EPS_CENTER * scale
    m[:, shift] -= means[shift]
    return m[:, 0] if squeeze else m


def variance(v) -> float:
    """Population variance (1/n) of a mean-zero vector."""
    v = np.asarray(v, dtype=float)
    return float(v @ v) / v.shape[0]


@dataclass(frozen=True)
class ProjectionContext:
    """Orthogonal projector onto the column span of ``basis``.

    ``q`` holds an orthonormal basis for the same span (possibly fewer columns
    when dependent columns were dropped on request).
    """

    basis: np.ndarray
    q: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.q.shape[1]

    def fitted(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.rank == 0:
            return np.zeros_like(v)
        return self.q @ (self.q.T @ v)

    def residual(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if self.rank == 0:
            return v.copy()
        # two passes: classical Gram-Schmidt loses orthogonality in one
        r = v - self.q @ (self.q.T @ v)
        return r - self.q @ (self.q.T @ r)


def _orthonormalize(cols: np.ndarray, labels: Optional[Sequence], drop_dependent: bool) -> np.ndarray:
    n, k = cols.shape
    q = np.empty((n, k))
    rank = 0
    for j in range(k):
        v = cols[:, j].copy()
        own = np.linalg.norm(v)
        for _ in range(2):
            if rank:
                qa = q[:, :rank]
                v -= qa @ (qa.T @ v)
        nv = np.linalg.norm(v)
        if own == 0.0 or not np.isfinite(nv) or nv <= EPS_RANK * own:
            if drop_dependent:
                continue
            raise RankDeficient(labels[j] if labels is not None else j)
        q[:, rank] = v / nv
        rank += 1
    return q[:, :rank]


def make_context(w, labels: Optional[Sequence] = None, drop_dependent: bool = False,
                 n: Optional[int] = None) -> ProjectionContext:
    """Build the projector onto span(w).

    ``w`` may have zero columns (pass ``n`` or an ``(n, 0)`` array), giving the
    zero projector. With ``drop_dependent`` numerically dependent columns are
    skipped instead of raising :class:`RankDeficient`; the span is unchanged.
    """
    if w is None:
        if n is None:
            raise InvalidInput("row count required for an empty basis")
        w = np.empty((n, 0))
    w = as_matrix(w, n)
    return ProjectionContext(basis=w, q=_orthonormalize(w, labels, drop_dependent))


def residualize(ctx: ProjectionContext, targets) -> np.ndarray:
    """Columns of ``targets`` minus their projections onto the context span."""
    squeeze = np.ndim(targets) == 1
    t = as_matrix(targets)
    if t.shape[0] != ctx.n:
        raise InvalidInput(f"targets have {t.shape[0]} rows, context has {ctx.n}")
    res = ctx.residual(t)
    return res[:, 0] if squeeze else res


def simple_slope(x_res, y_res) -> float:
    """Least-squares slope through the origin of ``y_res`` on ``x_res``."""
    # contiguous copies so the same model always rounds the same way
    x_res = np.ascontiguousarray(x_res, dtype=float)
    y_res = np.ascontiguousarray(y_res, dtype=float)
    xx = float(x_res @ x_res)
    if not xx > 0.0 or not np.isfinite(xx):
        raise DegenerateExplanatory("explanatory vector is numerically zero")
    return float(x_res @ y_res) / xx


def correlation(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateInput("correlation of a zero vector is undefined")
    return float(np.clip((a @ b) / (na * nb), -1.0, 1.0))


def r_squared(basis, v) -> float:
    """Share of ``v``'s squared norm captured by projection onto span(basis).

    ``basis`` is a matrix or an already built :class:`ProjectionContext`.
    """
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    if not vv > 0.0:
        raise DegenerateInput("R^2 of a zero vector is undefined")
    ctx = basis if isinstance(basis, ProjectionContext) else make_context(basis, n=v.shape[0])
    if ctx.rank == 0:
        return 0.0
    coef = ctx.q.T @ v
    return float(np.clip((coef @ coef) / vv, 0.0, 1.0))


def _check_triangular(r: np.ndarray, design: np.ndarray, labels) -> None:
    diag = np.abs(np.diagonal(r, axis1=-2, axis2=-1))
    norms = np.linalg.norm(design, axis=-2)
    bad = ~(diag > EPS_RANK * norms) | (norms == 0.0)
    if np.any(bad):
        j = int(np.argmax(bad.reshape(-1, bad.shape[-1]).any(axis=0)))
        raise RankDeficient(labels[j] if labels is not None else j)


def multi_slope(x, y, covs=None, labels: Optional[Sequence] = None) -> float:
    """Coefficient of ``x`` when ``y`` is regressed on ``x`` and every column of ``covs``.

    Solved through a Householder QR of ``[covs | x]``: with ``x`` placed last,
    its coefficient is ``q_last . y / r_last``, no back-substitution needed.
    ``labels`` names the columns of ``covs`` for error messages.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.shape[0]
    covs = np.empty((n, 0)) if covs is None else as_matrix(covs, n)
    if y.shape[0] != n:
        raise InvalidInput("x and y lengths differ")
    design = np.column_stack([covs, x])
    q, r = np.linalg.qr(design)
    names = (list(labels) if labels is not None else list(range(covs.shape[1]))) + ["x"]
    _check_triangular(r, design, names)
    return float(q[:, -1] @ y) / float(r[-1, -1])


def batched_multi_slope(x, y, covs_stack) -> np.ndarray:
    """Vectorized :func:`multi_slope` over a stack of ``(m, n, k)`` covariate blocks."""
    covs_stack = np.asarray(covs_stack, dtype=float)
    m, n, _ = covs_stack.shape
    xs = np.broadcast_to(np.asarray(x, dtype=float)[None, :, None], (m, n, 1))
    design = np.concatenate([covs_stack, xs], axis=2)
    q, r = np.linalg.qr(design)
    _check_triangular(r, design, None)
    return (q[:, :, -1] @ np.asarray(y, dtype=float)) / r[:, -1, -1]
