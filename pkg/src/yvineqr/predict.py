"""Conditional distributions, quantile curves and simulation for Y-vines.

For a new predictor observation the D-vine pseudo-observations are stored
in two triangular matrices: ``W[k, c] = u_{c+k | c..c+k-1}`` and
``W_prime[k, c] = u_{c | c+1..c+k}`` (row 0 is the PIT of the observation).
The conditional distribution function of the responses is

    C(v1, v2 | u) = integral_0^v2 IN(z) dz,

    IN(z) = prod_i c_{V2, U_i; U_{0..i-1}}(a2_i(z), u_{i|0..i-1})
            * h_{V1 | V2}(a1_p(v1) | a2_p(z)),

where ``a_j`` is the response chain ``u_{v_j | 0..i-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import paircop as pc
from . import quantile as qt
from .exceptions import DomainError, QuadratureError
from .quadrature import DEFAULT_MAX_DEPTH, DEFAULT_TOL, integrate_batch
from .yvine import DVineChains, YVineModel, dvine_chains

QUAD_TOL = DEFAULT_TOL
# forced bisections per integral; sharply peaked pair densities need them
MIN_DEPTH = 5


@dataclass(frozen=True, eq=False)
class PredictionContext:
    """Pseudo-observations of one new predictor observation."""

    model: YVineModel
    u_new: np.ndarray
    W: np.ndarray
    W_prime: np.ndarray

    @property
    def p(self) -> int:
        return self.model.p

    def ucond(self, i: int) -> float:
        """u_{i | 0..i-1}."""
        return float(self.W[i, 0])


def build_context(model: YVineModel, x_new, scale: str = "x") -> PredictionContext:
    """PIT a new predictor vector (model order) and fill W and W'."""
    x = np.asarray(x_new, dtype=float).ravel()
    if x.size != model.p:
        raise DomainError(f"expected {model.p} predictor values, got {x.size}")
    if scale == "x":
        u = np.asarray(model.to_u(x=x[None, :]))[0]
    elif scale == "u":
        if np.any((x < 0) | (x > 1)):
            raise DomainError("u-scale predictors must lie in [0, 1]")
        u = np.clip(x, pc.CLAMP, 1.0 - pc.CLAMP)
    else:
        raise DomainError("scale must be 'x' or 'u'")
    ch = dvine_chains(model.dvine, u[None, :])
    p = model.p
    W = np.full((p, p), np.nan)
    Wp = np.full((p, p), np.nan)
    for k in range(p):
        for c in range(p - k):
            W[k, c] = ch.fwd[k][0, c + k]
            Wp[k, c] = ch.bwd[k][0, c + k]
    W.setflags(write=False)
    Wp.setflags(write=False)
    return PredictionContext(model, u, W, Wp)


# ---------------------------------------------------------------------------
# Response chains


def w2_column(ctx: PredictionContext, w, j: int, companion: bool = False):
    """Chain ``u_{v_j | 0..i-1}`` for i = 0..p starting from ``w``.

    Returns an array of shape ``w.shape + (p + 1,)``; with ``companion=True``
    also ``u_{i | v_j, 0..i-1}`` for i = 0..p-1, shape ``w.shape + (p,)``.
    """
    if j not in (0, 1):
        raise DomainError("response index must be 0 or 1")
    w = np.asarray(w, dtype=float)
    resp = ctx.model.resp[j]
    p = ctx.p
    a = np.empty(w.shape + (p + 1,))
    a[..., 0] = w
    b = np.empty(w.shape + (p,)) if companion else None
    for i in range(p):
        ui = ctx.W[i, 0]
        a[..., i + 1] = pc.hfunc(resp[i], "1|2", a[..., i], ui)
        if companion:
            b[..., i] = pc.hfunc(resp[i], "2|1", ui, a[..., i])
    return (a, b) if companion else a


def marginal_cdf(ctx: PredictionContext, j: int, v):
    """C_{V_j | U}(v | u_new) from the chain's last element."""
    v = np.asarray(v, dtype=float)
    out = w2_column(ctx, v, j)[..., -1]
    out = np.where(v <= 0, 0.0, np.where(v >= 1, 1.0, out))
    return out[()] if out.ndim == 0 else out


def _chain_and_density(ctx: PredictionContext, z, j: int):
    """Final chain value and product of response-pair densities along it."""
    z = np.asarray(z, dtype=float)
    resp = ctx.model.resp[j]
    a = z
    dens = np.ones(z.shape)
    for i in range(ctx.p):
        ui = ctx.W[i, 0]
        spec = resp[i]
        if spec.family is not pc.Family.INDEPENDENCE:
            dens = dens * pc.pdf(spec, a, ui)
        a = pc.hfunc(spec, "1|2", a, ui)
    return a, dens


def integrand(ctx: PredictionContext, v1_inp, z, over: str = "v2"):
    """Integrand whose integral over ``z`` in (0, v2) is C(v1, v2 | u).

    ``over="v1"`` swaps the roles of the responses (then ``v1_inp`` is the
    fixed V2 argument and ``z`` runs over V1).
    """
    fixed, free = (0, 1) if over == "v2" else (1, 0)
    top = ctx.model.top
    which = "1|2" if over == "v2" else "2|1"
    a_fixed = w2_column(ctx, np.asarray(v1_inp, dtype=float), fixed)[..., -1]
    a_free, dens = _chain_and_density(ctx, z, free)
    return dens * pc.hfunc(top, which, a_fixed, a_free)


def conditional_cdf(ctx: PredictionContext, v1, v2, quad_tol: float = QUAD_TOL,
                    max_depth: int = DEFAULT_MAX_DEPTH, method: str = "quadrature",
                    over: str = "v2", return_error: bool = False):
    """C_{V1, V2 | U}(v1, v2 | u_new).

    Parameters
    ----------
    method : {"quadrature", "composition"}
        ``"quadrature"`` integrates the product integrand by adaptive
        Simpson.  ``"composition"`` evaluates the top pair's CDF at the two
        marginal conditional CDFs, which is exact under the simplifying
        assumption and serves as an independent check.
    over : {"v2", "v1"}
        Integration variable for the quadrature method.

    Raises
    ------
    QuadratureError
        If the adaptive rule fails to reach ``quad_tol`` within ``max_depth``.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if np.any((v1 < 0) | (v1 > 1) | (v2 < 0) | (v2 > 1)):
        raise DomainError("conditional_cdf arguments must lie in [0, 1]")
    v1, v2 = np.broadcast_arrays(v1, v2)
    shape = v1.shape
    f1, f2 = v1.ravel(), v2.ravel()
    out = np.zeros(f1.size)
    err = np.zeros(f1.size)
    live = (f1 > 0) & (f2 > 0)
    if method == "composition":
        if np.any(live):
            a1 = marginal_cdf(ctx, 0, f1[live])
            a2 = marginal_cdf(ctx, 1, f2[live])
            out[live] = np.asarray(qt.copula_evaluator(ctx.model.top)(a1, a2))
    elif method == "quadrature":
        if over not in ("v1", "v2"):
            raise DomainError("over must be 'v1' or 'v2'")
        idx = np.flatnonzero(live)
        if idx.size:
            fixed = f1[idx] if over == "v2" else f2[idx]
            upper = f2[idx] if over == "v2" else f1[idx]
            a_fixed = w2_column(ctx, fixed, 0 if over == "v2" else 1)[..., -1]
            free = 1 if over == "v2" else 0
            which = "1|2" if over == "v2" else "2|1"
            top = ctx.model.top

            def f(z, q):
                a_free, dens = _chain_and_density(ctx, z, free)
                return dens * pc.hfunc(top, which, a_fixed[q], a_free)

            res = integrate_batch(f, np.zeros(idx.size), upper, tol=quad_tol, max_depth=max_depth,
                                  min_depth=MIN_DEPTH)
            out[idx] = res.value
            err[idx] = res.error
    else:
        raise DomainError("method must be 'quadrature' or 'composition'")
    out = out.reshape(shape)
    err = err.reshape(shape)
    if return_error:
        return (out[()] if out.ndim == 0 else out), (err[()] if err.ndim == 0 else err)
    return out[()] if out.ndim == 0 else out


def solver_err(err: float, quad_tol: float) -> float:
    """Line-search tolerance that never chases quadrature noise."""
    return max(float(err), 5.0 * float(quad_tol))


def conditional_evaluator(ctx: PredictionContext, quad_tol: float = QUAD_TOL,
                          method: str = "quadrature", over: str = "v2"):
    return lambda a, b: conditional_cdf(ctx, a, b, quad_tol=quad_tol, method=method, over=over)


def conditional_quantile_curve(model: YVineModel, x_new, alpha: float, m: int = qt.DEFAULT_M,
                               err: float = qt.DEFAULT_ERR, scale: str = "u",
                               quad_tol: float = QUAD_TOL, input_scale: str = "x",
                               method: str = "quadrature", over: str = "v2") -> qt.QuantileCurve:
    """Quantile curve of (V1, V2) given a new predictor observation.

    ``scale="x"`` maps the curve through the response marginals.
    """
    ctx = x_new if isinstance(x_new, PredictionContext) else build_context(model, x_new, input_scale)
    ev = conditional_evaluator(ctx, quad_tol, method, over)
    curve = qt.quantile_curve(ev, alpha, m, solver_err(err, quad_tol))
    if scale == "x":
        return qt.to_x_scale(curve, model.response_marginals)
    return curve


def univariate_conditional_quantile(model: YVineModel, j: int, alpha, x_new, scale: str = "x",
                                    input_scale: str = "x"):
    """Quantile of response ``j`` given the predictors, by inverting its h-chain."""
    ctx = x_new if isinstance(x_new, PredictionContext) else build_context(model, x_new, input_scale)
    if j not in (0, 1):
        raise DomainError("response index must be 0 or 1")
    a = np.asarray(alpha, dtype=float)
    if np.any((a <= 0) | (a >= 1)):
        raise DomainError("alpha must lie in (0, 1)")
    resp = model.resp[j]
    for i in range(ctx.p - 1, -1, -1):
        a = pc.hinv(resp[i], "1|2", a, ctx.W[i, 0])
    if scale == "x":
        a = model.response_marginals[j].pit_inverse(a)
    a = np.asarray(a, dtype=float)
    return a[()] if a.ndim == 0 else a


def cond_indep_evaluator(ctx: PredictionContext):
    """C_{V1|U}(v1) * C_{V2|U}(v2): the conditional CDF with an independent top pair."""
    return lambda a, b: marginal_cdf(ctx, 0, a) * marginal_cdf(ctx, 1, b)


def cond_indep_curve(model: YVineModel, x_new, alpha: float, grid_size: int = 1000,
                     scale: str = "u", input_scale: str = "x") -> qt.QuantileCurve:
    """Quantile curve assuming conditional independence of the responses.

    Points ``(Q1(a1), Q2(alpha / a1))`` for ``a1 = alpha ** s`` on an
    equidistant grid of ``s`` in (0, 1); the swapped branch coincides with
    ``s -> 1 - s``, so the union is covered.  With ``grid_size`` odd the
    symmetric point ``a1 = sqrt(alpha)`` is included.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    ctx = x_new if isinstance(x_new, PredictionContext) else build_context(model, x_new, input_scale)
    s = np.arange(1, grid_size + 1) / (grid_size + 1)
    a1 = alpha ** s
    a2 = alpha / a1
    v1 = univariate_conditional_quantile(model, 0, a1, ctx, scale="u")
    v2 = univariate_conditional_quantile(model, 1, a2, ctx, scale="u")
    pts = np.column_stack([v1, v2])
    order = np.lexsort((-pts[:, 1], pts[:, 0]))
    curve = qt.QuantileCurve(float(alpha), pts[order], "u", int(grid_size), 1e-8, 0)
    if scale == "x":
        return qt.to_x_scale(curve, model.response_marginals)
    return curve


# ---------------------------------------------------------------------------
# Simulation


def simulate(model: YVineModel, n: int, seed=None, scale: str = "u") -> np.ndarray:
    """Draw ``n`` rows ``(v1, v2, u_1, ..., u_p)`` by inverse Rosenblatt transform.

    ``scale="x"`` maps every column through its marginal.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    rng = np.random.default_rng(seed)
    p = model.p
    w = rng.random((n, p + 2))
    fwd = [np.full((n, p), np.nan) for _ in range(p)]
    bwd = [np.full((n, p), np.nan) for _ in range(p)]
    for i in range(p):
        x = w[:, i]
        fwd[i][:, i] = x
        for k in range(i, 0, -1):
            x = pc.hinv(model.dvine[(k, i)], "2|1", x, bwd[k - 1][:, i - 1])
            fwd[k - 1][:, i] = x
        bwd[0][:, i] = fwd[0][:, i]
        for k in range(1, i + 1):
            bwd[k][:, i] = pc.hfunc(model.dvine[(k, i)], "1|2", bwd[k - 1][:, i - 1], fwd[k - 1][:, i])
    ch = DVineChains(fwd, bwd, np.zeros(n))
    a1p = w[:, p]
    a2p = pc.hinv(model.top, "2|1", w[:, p + 1], a1p)
    vs = []
    for j, top_val in enumerate((a1p, a2p)):
        a = top_val
        for i in range(p - 1, -1, -1):
            a = pc.hinv(model.resp[j][i], "1|2", a, ch.cond(i))
        vs.append(a)
    out = np.column_stack(vs + [fwd[0][:, i] for i in range(p)])
    if scale == "x":
        margs = list(model.response_marginals) + list(model.predictor_marginals)
        out = np.column_stack([margs[c].pit_inverse(out[:, c]) for c in range(p + 2)])
    elif scale != "u":
        raise DomainError("scale must be 'u' or 'x'")
    return out


__all__ = [
    "PredictionContext", "build_context", "w2_column", "marginal_cdf", "integrand",
    "conditional_cdf", "conditional_quantile_curve", "univariate_conditional_quantile",
    "cond_indep_curve", "cond_indep_evaluator", "simulate", "solver_err", "QuadratureError",
]
