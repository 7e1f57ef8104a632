"""Branch-and-bound search for the extreme adjusted slopes, plus a brute-force oracle."""

from __future__ import annotations

import itertools
import logging
import time
from collections import deque
from dataclasses import dataclass, replace
from typing import Callable, NamedTuple, Optional, Tuple

import numpy as np

from .bounds import Envelope, bound_inputs, envelope
from .exceptions import InvalidInput, NodeBudgetExceeded
from .linalg import batched_multi_slope, make_context, simple_slope

log = logging.getLogger(__name__)

BRUTE_FORCE_CAP = 25


class Node(NamedTuple):
    included: Tuple[int, ...]
    candidates: Tuple[int, ...]


@dataclass(frozen=True)
class Extrema:
    lower: float
    upper: float
    argmin_subset: Tuple[int, ...] = ()
    argmax_subset: Tuple[int, ...] = ()


@dataclass(frozen=True)
class SearchResult:
    extrema: Extrema
    nodes_popped: int
    nodes_pruned: int
    nodes_pushed: int
    elapsed: float
    method: str = "bb"
    partial: bool = False

    @property
    def lower(self) -> float:
        return self.extrema.lower

    @property
    def upper(self) -> float:
        return self.extrema.upper


def update_extrema(ext: Extrema, beta: float, subset) -> Extrema:
    subset = tuple(subset)
    if beta < ext.lower:
        ext = replace(ext, lower=beta, argmin_subset=subset)
    if beta > ext.upper:
        ext = replace(ext, upper=beta, argmax_subset=subset)
    return ext


def has_potential(env: Envelope, ext: Extrema) -> bool:
    return env.lower < ext.lower or env.upper > ext.upper


def select_branch_var(x_res, y_res, z_res, candidates) -> int:
    """Candidate whose residual is most jointly correlated with residual x and y.

    Scores are ``|corr(z_i, x) * corr(z_i, y)|``; a zero residual column scores
    0 and ties go to the smallest covariate index.
    """
    candidates = list(candidates)
    if not candidates:
        raise InvalidInput("no candidates to branch on")
    z_res = np.asarray(z_res, dtype=float).reshape(len(x_res), -1)
    zn = np.linalg.norm(z_res, axis=0)
    denom = zn * np.linalg.norm(x_res) * np.linalg.norm(y_res)
    num = np.abs((z_res.T @ x_res) * (z_res.T @ y_res))
    score = np.divide(num, zn * denom, out=np.zeros_like(num), where=denom > 0)
    order = np.argsort(candidates, kind="stable")
    best = order[int(np.argmax(score[order]))]
    return candidates[best]


def _design(data):
    x = np.asarray(data.x, dtype=float)
    y = np.asarray(data.y, dtype=float)
    s = np.asarray(data.s, dtype=float).reshape(x.shape[0], -1)
    labels = list(getattr(data, "labels", range(s.shape[1])))
    return x, y, s, labels


def branch_and_bound(
    data,
    *,
    queue: str = "fifo",
    node_budget: Optional[int] = None,
    prune: bool = True,
    on_prune: Optional[Callable[[Node, Extrema, Envelope], None]] = None,
) -> SearchResult:
    """Exact minimum and maximum of the slope of ``x`` over all covariate subsets.

    ``data`` needs centered ``x``, ``y`` vectors and an ``(n, p)`` covariate
    matrix ``s``. Items pass through a FIFO queue by default (``queue="lifo"``
    for depth-first). ``prune=False`` expands every node, which is only
    useful for checking the tree shape. ``on_prune`` is called with the
    node, the extrema at that moment and the node's envelope.

    When ``node_budget`` pops have happened and work remains,
    :class:`NodeBudgetExceeded` is raised carrying the partial result.
    """
    if queue not in ("fifo", "lifo"):
        raise InvalidInput(f"unknown queue discipline {queue!r}")
    x, y, s, labels = _design(data)
    n, p = s.shape
    start = time.perf_counter()

    beta0 = simple_slope(x, y)
    ext = Extrema(beta0, beta0)
    frontier = deque([Node((), tuple(range(p)))])
    take = frontier.popleft if queue == "fifo" else frontier.pop
    pushed, popped, pruned = 1, 0, 0

    def result(partial=False):
        return SearchResult(ext, popped, pruned, pushed, time.perf_counter() - start, "bb", partial)

    while frontier:
        if node_budget is not None and popped >= node_budget:
            raise NodeBudgetExceeded(f"node budget {node_budget} exhausted", result(partial=True))
        node = take()
        popped += 1
        inc, cand = node
        ctx = make_context(s[:, list(inc)], labels=[labels[i] for i in inc], n=n)
        res = ctx.residual(np.column_stack([x, y, s[:, list(cand)]]))
        x_res, y_res, z_res = res[:, 0], res[:, 1], res[:, 2:]
        ext = update_extrema(ext, simple_slope(x_res, y_res), inc)
        if not cand:
            continue
        env = envelope(bound_inputs(x_res, y_res, z_res))
        if prune and not has_potential(env, ext):
            pruned += 1
            if on_prune is not None:
                on_prune(node, ext, env)
            continue
        star = select_branch_var(x_res, y_res, z_res, cand)
        rest = tuple(i for i in cand if i != star)
        frontier.append(Node(inc, rest))
        frontier.append(Node(tuple(sorted(inc + (star,))), rest))
        pushed += 2

    out = result()
    log.debug("bb: p=%d popped=%d pruned=%d", p, popped, pruned)
    return out


def _chunks(iterable, size):
    it = iter(iterable)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def brute_force(data, *, cap: int = BRUTE_FORCE_CAP, max_floats: int = 4_000_000) -> SearchResult:
    """Fit all ``2**p`` models and report the extreme slopes of ``x``.

    Each model is solved by its own QR factorization (batched), independent
    of the residualization path used by :func:`branch_and_bound`.
    """
    x, y, s, _ = _design(data)
    n, p = s.shape
    if p > cap:
        raise NodeBudgetExceeded(f"brute force over p={p} covariates exceeds cap {cap}")
    start = time.perf_counter()
    ext = None
    fitted = 0
    st = np.ascontiguousarray(s.T)
    for k in range(p + 1):
        size = max(1, max_floats // (n * (k + 1)))
        for block in _chunks(itertools.combinations(range(p), k), size):
            idx = np.array(block, dtype=np.intp).reshape(len(block), k)
            covs = st[idx].transpose(0, 2, 1)
            betas = batched_multi_slope(x, y, covs)
            fitted += len(block)
            lo, hi = int(np.argmin(betas)), int(np.argmax(betas))
            if ext is None:
                ext = Extrema(float(betas[lo]), float(betas[hi]), block[lo], block[hi])
            else:
                ext = update_extrema(ext, float(betas[lo]), block[lo])
                ext = update_extrema(ext, float(betas[hi]), block[hi])
    return SearchResult(ext, fitted, 0, fitted, time.perf_counter() - start, "bf")
