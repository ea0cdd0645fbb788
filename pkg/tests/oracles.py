"""Independent reference computations shared by several test modules."""

import numpy as np
from scipy import optimize

from yvineqr import yvine as yv


def _ray_level(family, theta, alpha):
    """g(v1, v2) < 0 below the alpha level set, written from the closed-form generators."""
    if family == "clayton":
        return lambda a, b: alpha ** -theta - (a ** -theta + b ** -theta - 1.0)
    if family == "gumbel":
        return lambda a, b: (-np.log(alpha)) ** theta - ((-np.log(a)) ** theta + (-np.log(b)) ** theta)
    if family == "independence":
        return lambda a, b: a * b - alpha
    raise ValueError(family)


def closed_form_ray_point(family, theta, alpha, endpoint):
    """Exact crossing of the ray from (0, 0) to ``endpoint`` with the closed-form curve."""
    e = np.asarray(endpoint, dtype=float)
    g = _ray_level(family, theta, alpha)
    f = lambda t: g(t * e[0], t * e[1])
    if f(1.0) < 0:
        return None
    t = optimize.brentq(f, 1e-12, 1.0, xtol=1e-15, rtol=1e-15)
    return t * e


def ray_sup_error(curve, family, theta):
    """Largest distance between every curve point and the exact point on its ray.

    A curve point on a ray that the exact curve does not cross is compared
    with the ray's endpoint.
    """
    from yvineqr.quantile import ray_endpoints

    ends = ray_endpoints(curve.m)
    worst = 0.0
    for pt, rid in zip(curve.points, curve.ray_ids):
        ref = closed_form_ray_point(family, theta, curve.alpha, ends[rid])
        ref = ends[rid] if ref is None else ref
        worst = max(worst, float(np.max(np.abs(pt - ref))))
    return worst


# hand-written densities and h-functions, independent of the paircop module
def clayton_pdf(u, v, t):
    return (1 + t) * (u * v) ** (-1 - t) * (u**-t + v**-t - 1) ** (-1 / t - 2)


def clayton_h(u, v, t):  # P(U <= u | V = v)
    return v ** (-t - 1) * (u**-t + v**-t - 1) ** (-1 / t - 1)


def gumbel_pdf(u, v, t):
    x, y = -np.log(u), -np.log(v)
    s = x**t + y**t
    c = np.exp(-s ** (1 / t))
    return c * (x * y) ** (t - 1) * s ** (2 / t - 2) * (1 + (t - 1) * s ** (-1 / t)) / (u * v)


def gumbel_h(u, v, t):
    x, y = -np.log(u), -np.log(v)
    s = x**t + y**t
    return np.exp(-s ** (1 / t)) * s ** (1 / t - 1) * y ** (t - 1) / v


def d3_joint(v1, v2, u):
    a1, a2 = clayton_h(v1, u, 3.0), gumbel_h(v2, u, 5.0)
    return clayton_pdf(v1, u, 3.0) * gumbel_pdf(v2, u, 5.0) * clayton_pdf(a1, a2, 1.33)


def split_data(model, data, kw):
    """Responses and predictors (in model order) of a data set passed to ``fit``."""
    resp = kw.get("responses", (0, 1))
    preds = list(kw.get("predictors") or [c for c in range(data.shape[1]) if c not in resp])
    x = data[:, [preds[o] for o in model.order]]
    return data[:, list(resp)], x


def acll_identity_residual(model, data, kw):
    """Largest violation of acll_k - acll_{k-1} = new response-pair logliks, and of the stored trace."""
    y, x = split_data(model, data, kw)
    scale = kw.get("scale", "x")
    worst, prev = 0.0, 0.0
    for k in range(1, model.p + 1):
        sub = model.truncate(k)
        val = yv.acll(sub, y, x[:, :k], scale=scale)
        v, u = (y, x[:, :k]) if scale == "u" else sub.to_u(y, x[:, :k])
        ll = yv.response_logliks(sub, v, u)[:, -1]
        worst = max(worst, abs(val - prev - ll.sum()), abs(val - model.acll_trace[k - 1]))
        prev = val
    return worst


def density_identity_residual(model, data, kw, rng, n=100):
    """Largest violation of the joint/conditional density split and of both response splits."""
    y, x = split_data(model, data, kw)
    if kw.get("scale", "x") == "u":
        yy, xx = rng.random((n, 2)), rng.random((n, model.p))
    else:
        idx = rng.choice(data.shape[0], n, replace=False)
        # move the responses off the sample so the check is not at data points only
        yy, xx = y[idx] + 0.1 * rng.standard_normal((n, 2)), x[idx]
    joint = yv.log_density_joint(model, yy[:, 0], yy[:, 1], xx)
    cond = yv.log_density_conditional(model, yy[:, 0], yy[:, 1], xx)
    fx = yv.log_density_predictors(model, xx)
    worst = np.max(np.abs(joint - fx - cond))
    for j, k in ((0, 1), (1, 0)):
        split = (yv.log_density_marginal_conditional(model, j, yy[:, j], xx)
                 + yv.log_density_cross_conditional(model, k, yy[:, k], xx, yy[:, j]))
        worst = max(worst, np.max(np.abs(cond - split)))
    return float(worst)
