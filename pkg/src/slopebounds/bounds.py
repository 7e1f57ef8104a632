"""Envelope of the adjusted slope over every extension of a search node.

After residualizing on the included covariates ``w``, the slope of any model
``w + z~`` (``z~`` drawn from the candidates ``z``) is

    sigma_ratio * (rho - R_zx * R_zy * rho_hat) / (1 - R_zx**2)

where ``R_zx**2`` and ``R_zy**2`` can only grow as columns are added, so they
are capped by their values on the full candidate span, and ``rho_hat`` is a
free correlation in [-1, 1]. :func:`envelope` maximizes and minimizes that
expression over the box exactly, in constant time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .linalg import correlation, make_context, r_squared, simple_slope

EPS_DIV = 1e-12


@dataclass(frozen=True)
class BoundInputs:
    sigma_ratio: float
    rho: float
    rx2_max: float
    ry2_max: float
    # the node's own slope as computed by the caller; equals sigma_ratio * rho
    # up to rounding, and pins the envelope to it when the caps are ~0
    base_slope: Optional[float] = None

    @property
    def empty_slope(self) -> float:
        return self.sigma_ratio * self.rho if self.base_slope is None else self.base_slope

    def __post_init__(self):
        if not (math.isfinite(self.sigma_ratio) and self.sigma_ratio > 0):
            raise ValueError(f"sigma_ratio must be finite and positive, got {self.sigma_ratio}")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must lie in [-1, 1], got {self.rho}")
        if not 0.0 <= self.rx2_max <= 1.0 - EPS_DIV:
            raise ValueError(f"rx2_max must lie in [0, 1 - {EPS_DIV}], got {self.rx2_max}")
        if not 0.0 <= self.ry2_max <= 1.0:
            raise ValueError(f"ry2_max must lie in [0, 1], got {self.ry2_max}")


@dataclass(frozen=True)
class Envelope:
    lower: float
    upper: float

    def contains(self, value: float, rtol: float = 0.0) -> bool:
        slack = rtol * max(1.0, abs(self.lower), abs(self.upper))
        return self.lower - slack <= value <= self.upper + slack

    def __contains__(self, value) -> bool:
        return self.contains(value)


def adjusted_slope(sigma_ratio, rho, rx2, ry2, rho_hat):
    """Slope of a residualized model from its summary statistics (works on arrays)."""
    return sigma_ratio * (rho - np.sqrt(rx2) * np.sqrt(ry2) * rho_hat) / (1.0 - rx2)


def bound_inputs(x_res, y_res, z_res) -> BoundInputs:
    """Summary statistics of a node: residual x, residual y, residual candidates."""
    x_res = np.asarray(x_res, dtype=float)
    y_res = np.asarray(y_res, dtype=float)
    rho = correlation(x_res, y_res)
    sigma_ratio = float(np.linalg.norm(y_res) / np.linalg.norm(x_res))
    ctx = make_context(z_res, drop_dependent=True, n=x_res.shape[0])
    rx2 = min(r_squared(ctx, x_res), 1.0 - EPS_DIV)
    ry2 = r_squared(ctx, y_res)
    return BoundInputs(sigma_ratio, rho, rx2, ry2, simple_slope(x_res, y_res))


def _stationary_points(c: float, rho: float):
    # roots of c*a^2 + 2*rho*a + c; their product is 1
    if c == 0.0:
        return ()
    disc = rho * rho - c * c
    if disc < 0.0:
        return ()
    q = -(rho + math.copysign(math.sqrt(disc), rho))
    if q == 0.0:
        return ()
    return (q / c, c / q)


def _extreme(b: BoundInputs, c: float, a_max: float, sign: int) -> float:
    """max (sign=+1) or min (sign=-1) of (beta + sign*sigma*c*a) / (1 - a^2) over a in [0, a_max]."""
    candidates = [0.0, a_max]
    for a in _stationary_points(c, sign * b.rho):
        if 0.0 < a < a_max:
            candidates.append(a)
    beta, sc = b.empty_slope, b.sigma_ratio * c
    values = [(beta + sign * sc * a) / (1.0 - a * a) for a in candidates]
    return max(values) if sign > 0 else min(values)


def envelope(b: BoundInputs) -> Envelope:
    """Exact extrema of :func:`adjusted_slope` over the box of feasible statistics.

    The objective is linear in ``rho_hat`` (optimum at +-1) and, for fixed
    ``R_zx``, linear in ``R_zy`` with the extreme at its cap. What remains is
    one variable ``a = R_zx`` with ``(rho +- c*a) / (1 - a^2)``, checked at
    both ends and at interior stationary points.
    """
    a_max = math.sqrt(b.rx2_max)
    c = math.sqrt(b.ry2_max)
    return Envelope(_extreme(b, c, a_max, -1), _extreme(b, c, a_max, +1))


def envelope_grid_oracle(b: BoundInputs, grid_n: int) -> Envelope:
    """Brute-force :func:`envelope` on a ``grid_n x grid_n x 2`` lattice; test oracle."""
    if grid_n < 2:
        raise ValueError("grid_n must be at least 2")
    rx2 = np.linspace(0.0, b.rx2_max, grid_n)[:, None]
    ry2 = np.linspace(0.0, b.ry2_max, grid_n)[None, :]
    lo, hi = math.inf, -math.inf
    for rho_hat in (-1.0, 1.0):
        vals = adjusted_slope(b.sigma_ratio, b.rho, rx2, ry2, rho_hat)
        lo = min(lo, float(vals.min()))
        hi = max(hi, float(vals.max()))
    return Envelope(lo, hi)
