"""Batched adaptive Simpson quadrature.

Many one-dimensional integrals that share an integrand family (but differ in
their limits or in a per-query parameter) are refined simultaneously: every
pass evaluates the integrand on all still-active subintervals in a single
vectorized call.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .exceptions import QuadratureError

# f(z, idx) -> values; idx maps each abscissa to the query it belongs to.
BatchIntegrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

DEFAULT_TOL = 1e-6
DEFAULT_MAX_DEPTH = 20
DEFAULT_MIN_DEPTH = 0


@dataclass(frozen=True)
class QuadratureResult:
    value: np.ndarray
    error: np.ndarray
    evaluations: int
    hit_max_depth: np.ndarray


def integrate_batch(
    f: BatchIntegrand,
    a,
    b,
    tol: float = DEFAULT_TOL,
    max_depth: int = DEFAULT_MAX_DEPTH,
    raise_on_failure: bool = True,
    min_depth: int = DEFAULT_MIN_DEPTH,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a[i], b[i]]`` for every query ``i``.

    Parameters
    ----------
    f : callable
        ``f(z, idx)`` returns the integrand of query ``idx[k]`` at ``z[k]``.
    a, b : array_like
        Integration limits, broadcast to a common 1-d shape.
    tol : float
        Absolute error tolerance per query.  Each bisection halves the
        tolerance passed to the children.
    max_depth : int
        Maximum bisection depth.  Intervals reaching it are accepted with
        their Richardson-corrected value.
    raise_on_failure : bool
        Raise :class:`QuadratureError` when a query's accumulated error
        estimate exceeds ``tol`` after intervals hit ``max_depth``.
    min_depth : int
        Intervals are always bisected until this depth, so that narrow peaks
        between the first few abscissas are not missed.

    Returns
    -------
    QuadratureResult
    """
    a, b = np.broadcast_arrays(np.atleast_1d(np.asarray(a, dtype=float)),
                               np.atleast_1d(np.asarray(b, dtype=float)))
    a = a.ravel().copy()
    b = b.ravel().copy()
    n = a.size
    value = np.zeros(n)
    error = np.zeros(n)
    maxed = np.zeros(n, dtype=bool)
    if n == 0:
        return QuadratureResult(value, error, 0, maxed)

    q = np.flatnonzero(b != a)
    lo, hi = a[q], b[q]
    mid = 0.5 * (lo + hi)
    fv = f(np.concatenate([lo, mid, hi]), np.concatenate([q, q, q]))
    k = q.size
    flo, fmid, fhi = fv[:k], fv[k:2 * k], fv[2 * k:]
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi)
    tols = np.full(k, float(tol))
    depth = np.zeros(k, dtype=int)
    evaluations = 3 * k

    while q.size:
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        fv = f(np.concatenate([lm, rm]), np.concatenate([q, q]))
        k = q.size
        evaluations += 2 * k
        flm, frm = fv[:k], fv[k:]
        left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi)
        delta = left + right - whole
        converged = (np.abs(delta) <= 15.0 * tols) & (depth >= min_depth)
        at_limit = depth >= max_depth
        done = converged | at_limit
        if np.any(done):
            np.add.at(value, q[done], (left + right + delta / 15.0)[done])
            np.add.at(error, q[done], np.abs(delta[done]) / 15.0)
            stuck = at_limit & ~converged
            if np.any(stuck):
                maxed[q[stuck]] = True
        keep = ~done
        if not np.any(keep):
            break
        q = np.concatenate([q[keep], q[keep]])
        new_lo = np.concatenate([lo[keep], mid[keep]])
        new_hi = np.concatenate([mid[keep], hi[keep]])
        new_flo = np.concatenate([flo[keep], fmid[keep]])
        new_fhi = np.concatenate([fmid[keep], fhi[keep]])
        new_fmid = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        tols = np.concatenate([tols[keep], tols[keep]]) * 0.5
        depth = np.concatenate([depth[keep], depth[keep]]) + 1
        lo, hi = new_lo, new_hi
        flo, fhi, fmid = new_flo, new_fhi, new_fmid
        mid = 0.5 * (lo + hi)

    if raise_on_failure:
        bad = np.flatnonzero(maxed & (error > tol))
        if bad.size:
            raise QuadratureError(
                f"adaptive Simpson did not reach tol={tol:g} within depth "
                f"{max_depth} for {bad.size} integral(s); worst error estimate "
                f"{error[bad].max():.3g}",
                indices=bad,
                error_estimates=error[bad],
            )
    return QuadratureResult(value, error, evaluations, maxed)


def integrate(f: Callable[[np.ndarray], np.ndarray], a: float, b: float,
              tol: float = DEFAULT_TOL, max_depth: int = DEFAULT_MAX_DEPTH,
              min_depth: int = DEFAULT_MIN_DEPTH) -> float:
    """Scalar convenience wrapper around :func:`integrate_batch`.

    ``f`` must accept an array of abscissas.
    """
    res = integrate_batch(lambda z, idx: f(z), [a], [b], tol=tol, max_depth=max_depth,
                         min_depth=min_depth)
    return float(res.value[0])
