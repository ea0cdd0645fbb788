"""Univariate kernel marginals and probability integral transforms.

A :class:`MarginalModel` is a Gaussian-kernel density estimate with
Silverman's bandwidth.  Its distribution function is the exact kernel
mixture, so ``pit`` is monotone without interpolation artifacts and
``pit_inverse`` can be computed to high accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .exceptions import DomainError, FitError

GRID_SIZE = 512
GRID_PAD = 5.0  # grid extends this many bandwidths beyond the data
PIT_CLAMP = 1e-10
_CHUNK = 2_000_000  # max kernel evaluations held in memory per block


@dataclass(frozen=True, eq=False)
class MarginalModel:
    """Fitted Gaussian kernel marginal.

    Attributes
    ----------
    data : ndarray
        Kernel centres (the possibly de-duplicated sample).
    bandwidth : float
        Kernel standard deviation.
    grid, cdf_values, density_values : ndarray
        Tabulation of the estimate on ``GRID_SIZE`` points.
    """

    data: np.ndarray
    bandwidth: float
    grid: np.ndarray = field(repr=False)
    cdf_values: np.ndarray = field(repr=False)
    density_values: np.ndarray = field(repr=False)

    @property
    def sample_size(self) -> int:
        return int(self.data.size)

    @property
    def span(self) -> tuple:
        return float(self.grid[0]), float(self.grid[-1])

    def cdf(self, x):
        return _mixture_cdf(self.data, self.bandwidth, x)

    def pdf(self, x):
        return _mixture_pdf(self.data, self.bandwidth, x)

    def pit(self, x):
        return pit(self, x)

    def pit_inverse(self, v):
        return pit_inverse(self, v)

    def to_dict(self) -> dict:
        return {
            "kind": "gaussian_kde",
            "bandwidth": float(self.bandwidth),
            "data": self.data.tolist(),
            "grid": self.grid.tolist(),
            "cdf": self.cdf_values.tolist(),
            "density": self.density_values.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MarginalModel":
        try:
            data = np.asarray(d["data"], dtype=float)
            bw = float(d["bandwidth"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed marginal: {exc}") from None
        if data.ndim != 1 or data.size < 1 or not np.all(np.isfinite(data)) or not bw > 0:
            raise DomainError("malformed marginal: bad data or bandwidth")
        grid = np.asarray(d.get("grid", []), dtype=float)
        if grid.size < 2:
            return _tabulate(data, bw)
        cdf = np.asarray(d["cdf"], dtype=float)
        dens = np.asarray(d["density"], dtype=float)
        return cls(data, bw, grid, cdf, dens)


def _blocks(n_data: int, n_x: int):
    step = max(1, _CHUNK // max(n_data, 1))
    for start in range(0, n_x, step):
        yield slice(start, min(start + step, n_x))


def _mixture_cdf(data, h, x):
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.size)
    for sl in _blocks(data.size, flat.size):
        out[sl] = special.ndtr((flat[sl, None] - data[None, :]) / h).mean(axis=1)
    return out.reshape(x.shape)


def _mixture_pdf(data, h, x):
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.size)
    c = 1.0 / (h * np.sqrt(2.0 * np.pi))
    for sl in _blocks(data.size, flat.size):
        z = (flat[sl, None] - data[None, :]) / h
        out[sl] = c * np.exp(-0.5 * z * z).mean(axis=1)
    return out.reshape(x.shape)


def _tabulate(data, h) -> MarginalModel:
    grid = np.linspace(data.min() - GRID_PAD * h, data.max() + GRID_PAD * h, GRID_SIZE)
    return MarginalModel(data, float(h), grid, _mixture_cdf(data, h, grid), _mixture_pdf(data, h, grid))


def silverman_bandwidth(x) -> float:
    x = np.asarray(x, dtype=float)
    return 1.06 * float(np.std(x, ddof=1)) * x.size ** (-0.2)


def _break_ties(x: np.ndarray) -> np.ndarray:
    """Spread repeated values by multiples of 1e-9 of the data span."""
    order = np.argsort(x, kind="stable")
    xs = x[order]
    if np.all(np.diff(xs) > 0):
        return x
    span = xs[-1] - xs[0]
    new_run = np.concatenate([[True], np.diff(xs) > 0])
    run_id = np.cumsum(new_run) - 1
    run_start = np.flatnonzero(new_run)
    rank_in_run = np.arange(xs.size) - run_start[run_id]
    out = np.empty_like(x)
    out[order] = xs + rank_in_run * 1e-9 * span
    return out


def fit_marginal(x) -> MarginalModel:
    """Fit a Gaussian kernel marginal with Silverman's rule bandwidth.

    Parameters
    ----------
    x : array_like
        At least 10 finite observations with at least 3 distinct values.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 10:
        raise FitError(f"fit_marginal needs at least 10 observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise FitError("fit_marginal data contains non-finite values")
    if np.unique(x).size < 3:
        raise FitError("fit_marginal needs at least 3 distinct values")
    x = _break_ties(x)
    return _tabulate(x, silverman_bandwidth(x))


def pit(m: MarginalModel, x):
    """Probability integral transform, clamped to (1e-10, 1 - 1e-10)."""
    if isinstance(m, UniformMarginal):
        return m.pit(x)
    out = np.clip(m.cdf(x), PIT_CLAMP, 1.0 - PIT_CLAMP)
    return out[()] if out.ndim == 0 else out


def pit_inverse(m: MarginalModel, v, tol: float = 1e-12, max_iter: int = 60):
    """Quantile function of the kernel marginal, clamped to the grid span.

    The grid tabulation brackets each root; Newton steps on the exact
    mixture CDF refine it, falling back to bisection whenever a step leaves
    the bracket.
    """
    if isinstance(m, UniformMarginal):
        return m.pit_inverse(v)
    v = np.asarray(v, dtype=float)
    if np.any(~np.isfinite(v)) or np.any((v < 0) | (v > 1)):
        raise DomainError("pit_inverse arguments must lie in [0, 1]")
    flat = v.ravel()
    g, cg = m.grid, m.cdf_values
    j = np.clip(np.searchsorted(cg, flat, side="left"), 1, g.size - 1)
    lo, hi = g[j - 1].copy(), g[j].copy()
    below = flat <= cg[0]
    above = flat >= cg[-1]
    x = np.where(cg[j] > cg[j - 1],
                 lo + (flat - cg[j - 1]) / np.maximum(cg[j] - cg[j - 1], 1e-300) * (hi - lo),
                 0.5 * (lo + hi))
    active = ~(below | above)
    xtol = tol * (g[-1] - g[0])
    for _ in range(max_iter):
        if not np.any(active):
            break
        idx = np.flatnonzero(active)
        xi = x[idx]
        f = m.cdf(xi) - flat[idx]
        lo[idx] = np.where(f < 0, xi, lo[idx])
        hi[idx] = np.where(f < 0, hi[idx], xi)
        d = m.pdf(xi)
        with np.errstate(divide="ignore", invalid="ignore"):
            step = np.where(d > 0, f / d, np.inf)
        xn = xi - step
        bad = ~np.isfinite(xn) | (xn <= lo[idx]) | (xn >= hi[idx])
        xn = np.where(bad, 0.5 * (lo[idx] + hi[idx]), xn)
        x[idx] = xn
        done = (np.abs(xn - xi) <= xtol) | (hi[idx] - lo[idx] <= xtol)
        active[idx[done]] = False
    x = np.where(below, g[0], np.where(above, g[-1], x))
    x = np.clip(x, g[0], g[-1])
    out = x.reshape(v.shape)
    return out[()] if out.ndim == 0 else out


class UniformMarginal:
    """Identity transform for data already on the unit interval."""

    bandwidth = None

    def pit(self, x):
        out = np.clip(np.asarray(x, dtype=float), PIT_CLAMP, 1.0 - PIT_CLAMP)
        return out[()] if out.ndim == 0 else out

    def pit_inverse(self, v):
        out = np.asarray(v, dtype=float)
        return out[()] if out.ndim == 0 else out

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= 0) & (x <= 1), 1.0, 0.0)

    def to_dict(self) -> dict:
        return {"kind": "uniform"}


def marginal_from_dict(d: dict):
    if d.get("kind") == "uniform":
        return UniformMarginal()
    return MarginalModel.from_dict(d)
