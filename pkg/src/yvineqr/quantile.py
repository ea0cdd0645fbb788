"""Bivariate quantile curves, closed forms and confidence regions.

A curve at level ``alpha`` is the level set ``C(v1, v2) = alpha`` of a
bivariate distribution function on the unit square.  It is traced by
bisection along rays from the origin to the points ``(w, 1)`` and ``(1, w)``,
using that a distribution function increases along every such ray.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from . import paircop as pc
from .exceptions import DomainError, NoSolutionOnLine
from .quadrature import integrate_batch

# eval(v1, v2) -> C(v1, v2), vectorized over equally shaped arrays
Evaluator = Callable[[np.ndarray, np.ndarray], np.ndarray]

DEFAULT_M = 1000
DEFAULT_ERR = 1e-6


@dataclass(frozen=True, eq=False)
class QuantileCurve:
    """Ordered point set of a bivariate quantile curve.

    Attributes
    ----------
    alpha : float
    points : ndarray, shape (k, 2)
        Sorted by the first coordinate.
    scale : {"u", "x"}
    m : int
        Granularity (rays per side).
    err : float
        Absolute tolerance on ``|C(point) - alpha|``.
    skipped_rays : int
        Rays that do not cross the level set.
    ray_ids : ndarray of int
        Ray index of every point (rays ``0..m-1`` end at ``(w_i, 1)``, rays
        ``m..2m-2`` at ``(1, w_i)`` with the shared corner counted once).
    ray_t : ndarray
        Ray parameter of every point.
    iterations : ndarray of int
        Bisection steps used per point.
    """

    alpha: float
    points: np.ndarray
    scale: str = "u"
    m: int = DEFAULT_M
    err: float = DEFAULT_ERR
    skipped_rays: int = 0
    ray_ids: np.ndarray = field(default=None, repr=False)
    ray_t: np.ndarray = field(default=None, repr=False)
    iterations: np.ndarray = field(default=None, repr=False)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def v1(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def v2(self) -> np.ndarray:
        return self.points[:, 1]

    def metadata(self) -> dict:
        return {"alpha": self.alpha, "m": self.m, "err": self.err, "scale": self.scale,
                "skipped_rays": self.skipped_rays}


@dataclass(frozen=True, eq=False)
class ConfidenceRegion:
    """Points between the ``alpha/2`` and ``1 - alpha/2`` quantile curves."""

    alpha: float
    lower_curve: QuantileCurve
    upper_curve: QuantileCurve

    def __post_init__(self):
        if self.lower_curve.scale != self.upper_curve.scale:
            raise DomainError("region curves must share a scale")
        if not len(self.lower_curve) or not len(self.upper_curve):
            raise DomainError("region curves must be non-empty")

    def contains(self, point) -> bool:
        return region_contains(self, point)


def ray_endpoints(m: int) -> np.ndarray:
    """Endpoints ``(w_i, 1)`` then ``(1, w_i)`` for ``w_i = i/m``, i = 1..m.

    The corner ``(1, 1)`` appears once, so there are ``2m - 1`` rays.
    """
    if m < 2:
        raise DomainError("granularity m must be >= 2")
    w = np.arange(1, m + 1) / m
    top = np.column_stack([w, np.ones(m)])
    right = np.column_stack([np.ones(m - 1), w[:-1]])
    return np.vstack([top, right])


def iteration_bound(err: float) -> int:
    return int(math.ceil(math.log2(1.0 / err))) + 2


def _search_rays(evaluate: Evaluator, ends: np.ndarray, alpha: float, err: float,
                 max_iter: int):
    """Bisection on t in [0, 1] along every ray at once."""
    k = ends.shape[0]
    top_val = np.asarray(evaluate(ends[:, 0].copy(), ends[:, 1].copy()), dtype=float)
    ok = top_val >= alpha - err
    lo = np.zeros(k)
    hi = np.ones(k)
    t = np.full(k, np.nan)
    iters = np.zeros(k, dtype=int)
    active = ok.copy()
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        mid = 0.5 * (lo[idx] + hi[idx])
        val = np.asarray(evaluate(mid * ends[idx, 0], mid * ends[idx, 1]), dtype=float)
        iters[idx] += 1
        diff = val - alpha
        hit = np.abs(diff) <= err
        t[idx[hit]] = mid[hit]
        active[idx[hit]] = False
        up = ~hit & (diff < 0)
        lo[idx[up]] = mid[up]
        down = ~hit & (diff > 0)
        hi[idx[down]] = mid[down]
    # rays still active after max_iter: report their last midpoint as failed
    failed = active
    return ok, t, iters, failed


def binary_line_search(evaluate: Evaluator, endpoint, alpha: float, err: float = DEFAULT_ERR,
                       max_iter: int = 200):
    """Solve ``C(t * endpoint) = alpha`` by bisection on ``t``.

    Returns
    -------
    point : ndarray, shape (2,)
    t : float
    iterations : int

    Raises
    ------
    NoSolutionOnLine
        If ``C(endpoint) < alpha - err``.
    """
    if not err > 0:
        raise DomainError("err must be positive")
    ends = np.asarray(endpoint, dtype=float).reshape(1, 2)
    ok, t, iters, failed = _search_rays(evaluate, ends, float(alpha), float(err), max_iter)
    if not ok[0]:
        raise NoSolutionOnLine(f"level {alpha} is not reached on the ray to {tuple(ends[0])}")
    if failed[0]:
        raise ArithmeticError("line search did not converge; evaluator may be non-monotone")
    return ends[0] * t[0], float(t[0]), int(iters[0])


def quantile_curve(evaluate: Evaluator, alpha: float, m: int = DEFAULT_M, err: float = DEFAULT_ERR,
                   max_iter: int = 200) -> QuantileCurve:
    """Trace the ``alpha`` level set of ``evaluate`` on ``2m - 1`` rays.

    Raises
    ------
    NoSolutionOnLine
        If no ray crosses the level set.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    if not err > 0:
        raise DomainError("err must be positive")
    ends = ray_endpoints(int(m))
    ok, t, iters, failed = _search_rays(evaluate, ends, float(alpha), float(err), max_iter)
    if np.any(failed):
        raise ArithmeticError(f"{int(failed.sum())} ray search(es) did not converge")
    if not np.any(ok):
        raise NoSolutionOnLine(f"no ray reaches level {alpha} within err={err}")
    ids = np.flatnonzero(ok)
    pts = ends[ids] * t[ids, None]
    order = np.lexsort((-pts[:, 1], pts[:, 0]))
    return QuantileCurve(float(alpha), pts[order], "u", int(m), float(err),
                         int(ends.shape[0] - ids.size), ids[order], t[ids][order], iters[ids][order])


# ---------------------------------------------------------------------------
# Unconditional curves


def closed_form_v2(family, theta: float, alpha: float, v1):
    """Closed-form level set ``v2(v1)`` of Clayton, Gumbel or independence.

    Returns NaN where ``v1 < alpha`` (no solution).
    """
    fam = pc._as_family(family)
    v1 = np.asarray(v1, dtype=float)
    out = np.full(v1.shape, np.nan)
    good = (v1 >= alpha) & (v1 <= 1.0)
    x = v1[good]
    if fam is pc.Family.CLAYTON:
        out[good] = (alpha ** -theta - x ** -theta + 1.0) ** (-1.0 / theta)
    elif fam is pc.Family.GUMBEL:
        base = (-math.log(alpha)) ** theta - (-np.log(x)) ** theta
        out[good] = np.exp(-np.maximum(base, 0.0) ** (1.0 / theta))
    elif fam is pc.Family.INDEPENDENCE:
        out[good] = alpha / x
    else:
        raise DomainError(f"no closed-form quantile curve for {fam.value}")
    return np.minimum(out, 1.0)


def closed_form_curve(family, theta: float | None, alpha: float, v1_grid) -> QuantileCurve:
    """Closed-form quantile curve on a ``v1`` grid; points with ``v1 < alpha`` are omitted."""
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    fam = pc._as_family(family)
    if fam is not pc.Family.INDEPENDENCE:
        pc.PairCopulaSpec(fam, 0, (theta,))  # validates theta
    v1 = np.sort(np.asarray(v1_grid, dtype=float).ravel())
    v2 = closed_form_v2(fam, theta, alpha, v1)
    keep = np.isfinite(v2)
    pts = np.column_stack([v1[keep], v2[keep]])
    return QuantileCurve(float(alpha), pts, "u", int(v1.size), 0.0, 0)


def h_integral_cdf(spec: pc.PairCopulaSpec, tol: float = 1e-10) -> Evaluator:
    """Evaluator ``C(u, v) = integral_0^u h_{2|1}(v | t) dt`` by adaptive quadrature."""

    def evaluate(u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        u, v = np.broadcast_arrays(u, v)
        shape = u.shape
        vf = v.ravel()

        def f(z, idx):
            return pc.hfunc(spec, "2|1", vf[idx], z)

        res = integrate_batch(f, np.zeros(vf.size), u.ravel(), tol=tol, max_depth=40,
                              raise_on_failure=False)
        return np.clip(res.value, 0.0, 1.0).reshape(shape)

    return evaluate


def copula_evaluator(spec: pc.PairCopulaSpec) -> Evaluator:
    """Distribution-function evaluator of a pair copula.

    Families with a closed-form or series CDF use :func:`paircop.cdf`; the
    Student-t copula integrates its h-function.
    """
    if spec.family is pc.Family.STUDENT:
        return h_integral_cdf(spec)
    return lambda u, v: pc.cdf(spec, u, v)


def unconditional_curve_numeric(spec: pc.PairCopulaSpec, alpha: float, m: int = DEFAULT_M,
                                err: float = DEFAULT_ERR) -> QuantileCurve:
    """Numeric quantile curve of a pair copula."""
    return quantile_curve(copula_evaluator(spec), alpha, m, err)


# ---------------------------------------------------------------------------
# Regions and scale maps


def confidence_region(lower: QuantileCurve, upper: QuantileCurve, alpha: float | None = None) -> ConfidenceRegion:
    if alpha is None:
        alpha = 2.0 * lower.alpha
    return ConfidenceRegion(float(alpha), lower, upper)


def region_contains(region: ConfidenceRegion, point) -> bool:
    """Whether ``point`` dominates some lower-curve point and is dominated by
    some upper-curve point (coordinatewise)."""
    q = np.asarray(point, dtype=float).ravel()
    lo = region.lower_curve.points
    up = region.upper_curve.points
    above = np.any(np.all(lo <= q, axis=1))
    below = np.any(np.all(up >= q, axis=1))
    return bool(above and below)


def to_x_scale(curve: QuantileCurve, marginals) -> QuantileCurve:
    """Map a u-scale curve through the responses' quantile functions."""
    if curve.scale != "u":
        raise DomainError("curve is already on the x-scale")
    if len(marginals) != 2:
        raise DomainError("need two response marginals")
    pts = curve.points
    if len(pts):
        y = np.column_stack([np.asarray(marginals[0].pit_inverse(pts[:, 0]), dtype=float),
                             np.asarray(marginals[1].pit_inverse(pts[:, 1]), dtype=float)])
    else:
        y = pts.copy()
    return replace(curve, points=y, scale="x")


# ---------------------------------------------------------------------------
# Output


def write_curve_csv(curve: QuantileCurve, path) -> None:
    header = "v1,v2" if curve.scale == "u" else "y1,y2"
    with open(path, "w", newline="") as fh:
        fh.write(header + "\n")
        for a, b in curve.points:
            fh.write(f"{float(a)!r},{float(b)!r}\n")


def write_curve_meta(curve: QuantileCurve, path, **extra) -> None:
    meta = curve.metadata()
    meta.update(extra)
    with open(path, "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_curve_csv(path) -> np.ndarray:
    return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
