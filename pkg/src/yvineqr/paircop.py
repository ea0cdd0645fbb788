"""Parametric bivariate copula families.

Every function takes a :class:`PairCopulaSpec` and numpy-broadcastable
arguments on the unit square.  The h-function convention used throughout is

* ``hfunc(spec, "1|2", a, b) = P(U1 <= a | U2 = b) = dC(a, b)/db``
* ``hfunc(spec, "2|1", a, b) = P(U2 <= a | U1 = b) = dC(b, a)/db``

so the first argument is always the conditioned value and the second the
conditioning value, and ``hinv`` inverts in the first argument.

Rotations follow ``C90(u, v) = v - C(1-u, v)``, ``C180(u, v) = u + v - 1 +
C(1-u, 1-v)`` and ``C270(u, v) = u - C(u, 1-v)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np
from scipy import integrate, optimize, special, stats

from . import _bvn
from .exceptions import DomainError, FitError
from .quadrature import integrate_batch

CLAMP = 1e-10
ROTATIONS = (0, 90, 180, 270)

# Practical parameter bounds used by estimation (the admissible range is wider).
_RHO_MAX = 0.9999
_DF_BOUNDS = (2.05, 30.0)
_FIT_BOUNDS = {
    "clayton": (1e-4, 28.0),
    "gumbel": (1.0, 50.0),
    "frank": (1e-4, 50.0),
    "joe": (1.0, 30.0),
}


class Family(str, enum.Enum):
    INDEPENDENCE = "indep"
    GAUSSIAN = "gaussian"
    STUDENT = "student"
    CLAYTON = "clayton"
    GUMBEL = "gumbel"
    FRANK = "frank"
    JOE = "joe"

    @property
    def n_params(self) -> int:
        return {"indep": 0, "student": 2}.get(self.value, 1)


ALL_FAMILIES = tuple(Family)
_ARCHIMEDEAN_ROTATABLE = (Family.CLAYTON, Family.GUMBEL, Family.JOE)


def _as_family(family) -> Family:
    if isinstance(family, Family):
        return family
    try:
        return Family(str(family).lower())
    except ValueError:
        aliases = {"independence": Family.INDEPENDENCE, "t": Family.STUDENT,
                   "studentt": Family.STUDENT, "normal": Family.GAUSSIAN}
        key = str(family).lower()
        if key in aliases:
            return aliases[key]
        raise DomainError(f"unknown copula family {family!r}") from None


@dataclass(frozen=True)
class PairCopulaSpec:
    """A bivariate copula family with rotation and parameters.

    ``params`` is empty for independence, ``(rho, df)`` for the Student-t
    copula and a single dependence parameter otherwise.
    """

    family: Family
    rotation: int = 0
    params: tuple = ()

    def __post_init__(self):
        fam = _as_family(self.family)
        object.__setattr__(self, "family", fam)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        object.__setattr__(self, "rotation", int(self.rotation))
        if self.rotation not in ROTATIONS:
            raise DomainError(f"rotation must be one of {ROTATIONS}, got {self.rotation}")
        if len(self.params) != fam.n_params:
            raise DomainError(
                f"{fam.value} copula takes {fam.n_params} parameter(s), got {len(self.params)}")
        _check_params(fam, self.params)

    @classmethod
    def independence(cls) -> "PairCopulaSpec":
        return cls(Family.INDEPENDENCE)

    @property
    def n_params(self) -> int:
        return self.family.n_params

    def to_dict(self) -> dict:
        return {"family": self.family.value, "rotation": self.rotation,
                "params": list(self.params)}

    @classmethod
    def from_dict(cls, d: dict) -> "PairCopulaSpec":
        return cls(d["family"], int(d.get("rotation", 0)), tuple(d.get("params", ())))

    def __str__(self) -> str:
        par = ", ".join(f"{p:.4g}" for p in self.params)
        rot = f", rot={self.rotation}" if self.rotation else ""
        return f"{self.family.value}({par}{rot})"

    # thin method wrappers
    def cdf(self, u, v):
        return cdf(self, u, v)

    def pdf(self, u, v):
        return pdf(self, u, v)

    def hfunc(self, which, a, b):
        return hfunc(self, which, a, b)

    def hinv(self, which, w, b):
        return hinv(self, which, w, b)

    @property
    def tau(self) -> float:
        return kendall_tau(self)


def _check_params(fam: Family, params: Sequence[float]) -> None:
    if any(not math.isfinite(p) for p in params):
        raise DomainError(f"{fam.value}: non-finite parameter {params}")
    if fam in (Family.GAUSSIAN, Family.STUDENT):
        if not -1.0 < params[0] < 1.0:
            raise DomainError(f"{fam.value}: correlation must lie in (-1, 1), got {params[0]}")
        if fam is Family.STUDENT and not params[1] > 2.0:
            raise DomainError(f"student: degrees of freedom must exceed 2, got {params[1]}")
    elif fam is Family.CLAYTON and not params[0] > 0.0:
        raise DomainError(f"clayton: theta must be > 0, got {params[0]}")
    elif fam in (Family.GUMBEL, Family.JOE) and not params[0] >= 1.0:
        raise DomainError(f"{fam.value}: theta must be >= 1, got {params[0]}")
    elif fam is Family.FRANK and params[0] == 0.0:
        raise DomainError("frank: theta must be nonzero")


def swap(spec: PairCopulaSpec) -> PairCopulaSpec:
    """Copula of (U2, U1) when ``spec`` is the copula of (U1, U2)."""
    rot = {90: 270, 270: 90}.get(spec.rotation, spec.rotation)
    return PairCopulaSpec(spec.family, rot, spec.params)


def _clamp(x):
    return np.clip(np.asarray(x, dtype=float), CLAMP, 1.0 - CLAMP)


# ---------------------------------------------------------------------------
# Unrotated families.  All base families are exchangeable, so one
# h-function H(a | b) serves both conditioning directions.



def _frank_log_den(th, u, v):
    """log((1 - e^-th) - (1 - e^-th u)(1 - e^-th v)) for th > 0, as a sum of positive terms."""
    return np.logaddexp(-th * u + np.log(-np.expm1(-th * v)),
                        -th * v + np.log(-np.expm1(-th * (1.0 - v))))

def _base_logpdf(fam: Family, par, u, v):
    if fam is Family.INDEPENDENCE:
        return np.zeros(np.broadcast(u, v).shape)
    if fam is Family.GAUSSIAN:
        r = par[0]
        x, y = special.ndtri(u), special.ndtri(v)
        s = 1.0 - r * r
        return -0.5 * np.log(s) - (r * r * (x * x + y * y) - 2.0 * r * x * y) / (2.0 * s)
    if fam is Family.STUDENT:
        r, nu = par
        x, y = stats.t.ppf(u, nu), stats.t.ppf(v, nu)
        s = 1.0 - r * r
        const = (special.gammaln((nu + 2.0) / 2.0) + special.gammaln(nu / 2.0)
                 - 2.0 * special.gammaln((nu + 1.0) / 2.0) - 0.5 * np.log(s))
        quad = (x * x + y * y - 2.0 * r * x * y) / (nu * s)
        return (const - 0.5 * (nu + 2.0) * np.log1p(quad)
                + 0.5 * (nu + 1.0) * (np.log1p(x * x / nu) + np.log1p(y * y / nu)))
    if fam is Family.CLAYTON:
        th = par[0]
        lu, lv = np.log(u), np.log(v)
        t = np.expm1(-th * lu) + np.expm1(-th * lv) + 1.0
        return np.log1p(th) - (1.0 + th) * (lu + lv) - (2.0 + 1.0 / th) * np.log(t)
    if fam is Family.GUMBEL:
        th = par[0]
        x, y = -np.log(u), -np.log(v)
        lx, ly = np.log(x), np.log(y)
        ls = np.logaddexp(th * lx, th * ly)
        a = np.exp(ls / th)
        return (-a + x + y + (th - 1.0) * (lx + ly) + (1.0 / th - 2.0) * ls
                + np.log(a + th - 1.0))
    if fam is Family.FRANK:
        th = par[0]
        if th < 0:
            return _base_logpdf(fam, (-th,), u, 1.0 - v)
        return np.log(-th * np.expm1(-th)) - th * (u + v) - 2.0 * _frank_log_den(th, u, v)
    if fam is Family.JOE:
        th = par[0]
        lub, lvb = np.log1p(-u), np.log1p(-v)
        ub, vb = np.exp(th * lub), np.exp(th * lvb)
        s = ub + vb - ub * vb
        return ((1.0 / th - 2.0) * np.log(s) + (th - 1.0) * (lub + lvb)
                + np.log(th - 1.0 + s))
    raise AssertionError(fam)


def _base_cdf(fam: Family, par, u, v):
    if fam is Family.INDEPENDENCE:
        return u * v
    if fam is Family.GAUSSIAN:
        return _bvn.bvn_cdf(special.ndtri(u), special.ndtri(v), par[0])
    if fam is Family.STUDENT:
        return _student_cdf(par, u, v)
    if fam is Family.CLAYTON:
        th = par[0]
        t = np.expm1(-th * np.log(u)) + np.expm1(-th * np.log(v)) + 1.0
        return np.exp(-np.log(t) / th)
    if fam is Family.GUMBEL:
        th = par[0]
        x, y = -np.log(u), -np.log(v)
        return np.exp(-np.exp(np.logaddexp(th * np.log(x), th * np.log(y)) / th))
    if fam is Family.FRANK:
        th = par[0]
        if th < 0:
            return u - _base_cdf(fam, (-th,), u, 1.0 - v)
        return -(_frank_log_den(th, u, v) - np.log(-np.expm1(-th))) / th
    if fam is Family.JOE:
        th = par[0]
        ub, vb = (1.0 - u) ** th, (1.0 - v) ** th
        return 1.0 - (ub + vb - ub * vb) ** (1.0 / th)
    raise AssertionError(fam)


_STUDENT_CDF_TOL = 1e-13


def _student_cdf(par, u, v):
    """C(u, v) = integral over t in (0, v) of h(u | t), by adaptive quadrature."""
    u, v = np.broadcast_arrays(u, v)
    shape = u.shape
    uf, vf = u.ravel(), v.ravel()
    r, nu = par
    xu = stats.t.ppf(uf, nu)
    s = 1.0 - r * r

    def integrand(z, idx):
        y = stats.t.ppf(_clamp(z), nu)
        return stats.t.cdf((xu[idx] - r * y) / np.sqrt((nu + y * y) * s / (nu + 1.0)), nu + 1.0)

    res = integrate_batch(integrand, np.zeros_like(vf), vf, tol=_STUDENT_CDF_TOL,
                          max_depth=40, raise_on_failure=False)
    return res.value.reshape(shape)


def _base_h(fam: Family, par, a, b):
    """H(a | b) = P(U1 <= a | U2 = b) for the unrotated family."""
    if fam is Family.INDEPENDENCE:
        return np.broadcast_to(a, np.broadcast(a, b).shape).astype(float)
    if fam is Family.GAUSSIAN:
        r = par[0]
        return special.ndtr((special.ndtri(a) - r * special.ndtri(b)) / math.sqrt(1.0 - r * r))
    if fam is Family.STUDENT:
        r, nu = par
        x, y = stats.t.ppf(a, nu), stats.t.ppf(b, nu)
        return stats.t.cdf((x - r * y) / np.sqrt((nu + y * y) * (1.0 - r * r) / (nu + 1.0)), nu + 1.0)
    if fam is Family.CLAYTON:
        th = par[0]
        la, lb = np.log(a), np.log(b)
        t = np.expm1(-th * la) + np.expm1(-th * lb) + 1.0
        return np.exp(-(th + 1.0) * lb - (1.0 + 1.0 / th) * np.log(t))
    if fam is Family.GUMBEL:
        th = par[0]
        x, y = -np.log(a), -np.log(b)
        ls = np.logaddexp(th * np.log(x), th * np.log(y))
        aa = np.exp(ls / th)
        return np.exp(-aa + y + (th - 1.0) * np.log(y) + (1.0 / th - 1.0) * ls)
    if fam is Family.FRANK:
        th = par[0]
        if th < 0:
            return _base_h(fam, (-th,), a, 1.0 - b)
        return np.exp(-th * b + np.log(-np.expm1(-th * a)) - _frank_log_den(th, a, b))
    if fam is Family.JOE:
        th = par[0]
        ab, bb = (1.0 - a) ** th, (1.0 - b) ** th
        s = ab + bb - ab * bb
        return (1.0 - b) ** (th - 1.0) * (1.0 - ab) * s ** (1.0 / th - 1.0)
    raise AssertionError(fam)


def _base_hinv(fam: Family, par, w, b):
    """Inverse of :func:`_base_h` in its first argument."""
    if fam is Family.INDEPENDENCE:
        return np.broadcast_to(w, np.broadcast(w, b).shape).astype(float)
    if fam is Family.GAUSSIAN:
        r = par[0]
        return special.ndtr(special.ndtri(w) * math.sqrt(1.0 - r * r) + r * special.ndtri(b))
    if fam is Family.STUDENT:
        r, nu = par
        y = stats.t.ppf(b, nu)
        z = stats.t.ppf(w, nu + 1.0)
        return stats.t.cdf(z * np.sqrt((nu + y * y) * (1.0 - r * r) / (nu + 1.0)) + r * y, nu)
    if fam is Family.CLAYTON:
        th = par[0]
        lw, lb = np.log(w), np.log(b)
        # a^-th = (w b^(th+1))^(-th/(th+1)) + 1 - b^-th
        t = np.exp(-th / (th + 1.0) * (lw + (th + 1.0) * lb)) - np.expm1(-th * lb)
        return np.exp(-np.log(t) / th)
    if fam is Family.FRANK:
        th = par[0]
        if th < 0:
            return _base_hinv(fam, (-th,), w, 1.0 - b)
        # x = 1 - exp(-th a) for small a, log(1 - x) otherwise
        x = w * -np.expm1(-th) / (np.exp(-th * b) - w * np.expm1(-th * b))
        lw, l1w = np.log(w), np.log1p(-w)
        log_rest = (np.logaddexp(-th * b + l1w, lw - th) - np.logaddexp(-th * b + l1w, lw))
        with np.errstate(invalid="ignore"):
            return np.where(x < 0.5, -np.log1p(-np.minimum(x, 0.5)) / th, -log_rest / th)
    return _bisect_hinv(fam, par, w, b)


def _bisect_hinv(fam, par, w, b, iterations: int = 64):
    w, b = np.broadcast_arrays(np.asarray(w, dtype=float), np.asarray(b, dtype=float))
    lo = np.zeros(w.shape)
    hi = np.ones(w.shape)
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        below = _base_h(fam, par, _clamp(mid), b) < w
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Public evaluation API


def _validate_which(which: str) -> str:
    if which not in ("1|2", "2|1"):
        raise DomainError(f"which must be '1|2' or '2|1', got {which!r}")
    return which


def cdf(spec: PairCopulaSpec, u, v):
    """Copula distribution function C(u, v) on the closed unit square."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any((u < 0) | (u > 1) | (v < 0) | (v > 1)):
        raise DomainError("cdf arguments must lie in [0, 1]")
    u, v = np.broadcast_arrays(u, v)
    fam, par, rot = spec.family, spec.params, spec.rotation
    out = np.empty(u.shape)
    edge = (u == 0) | (v == 0) | (u == 1) | (v == 1)
    out[edge] = np.where((u[edge] == 0) | (v[edge] == 0), 0.0,
                         np.where(u[edge] == 1, v[edge], u[edge]))
    inner = ~edge
    if np.any(inner):
        ui, vi = u[inner], v[inner]
        if rot == 0:
            val = _base_cdf(fam, par, ui, vi)
        elif rot == 90:
            val = vi - _base_cdf(fam, par, 1.0 - ui, vi)
        elif rot == 180:
            val = ui + vi - 1.0 + _base_cdf(fam, par, 1.0 - ui, 1.0 - vi)
        else:
            val = ui - _base_cdf(fam, par, ui, 1.0 - vi)
        out[inner] = np.clip(val, np.maximum(ui + vi - 1.0, 0.0), np.minimum(ui, vi))
    return out[()] if out.ndim == 0 else out


def _rotate_args(rot, u, v):
    if rot == 90:
        return 1.0 - u, v
    if rot == 180:
        return 1.0 - u, 1.0 - v
    if rot == 270:
        return u, 1.0 - v
    return u, v


def logpdf(spec: PairCopulaSpec, u, v):
    """Log copula density; arguments are clamped to [1e-10, 1 - 1e-10]."""
    u, v = _clamp(u), _clamp(v)
    ru, rv = _rotate_args(spec.rotation, u, v)
    out = _base_logpdf(spec.family, spec.params, _clamp(ru), _clamp(rv))
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out


def pdf(spec: PairCopulaSpec, u, v):
    """Copula density c(u, v) (finite everywhere thanks to argument clamping)."""
    return np.exp(logpdf(spec, u, v))


def hfunc(spec: PairCopulaSpec, which: str, a, b):
    """Conditional distribution of the conditioned value ``a`` given ``b``.

    ``which="1|2"`` gives P(U1 <= a | U2 = b); ``which="2|1"`` gives
    P(U2 <= a | U1 = b).
    """
    _validate_which(which)
    a, b = _clamp(a), _clamp(b)
    fam, par, rot = spec.family, spec.params, spec.rotation
    H = lambda x, y: _base_h(fam, par, _clamp(x), _clamp(y))  # noqa: E731
    if rot == 0:
        out = H(a, b)
    elif rot == 180:
        out = 1.0 - H(1.0 - a, 1.0 - b)
    elif (rot == 90) == (which == "1|2"):
        # rot90 "1|2" and rot270 "2|1"
        out = 1.0 - H(1.0 - a, b)
    else:
        # rot90 "2|1" and rot270 "1|2"
        out = H(a, 1.0 - b)
    out = _clamp(out)
    return out[()] if out.ndim == 0 else out


def hinv(spec: PairCopulaSpec, which: str, w, b):
    """Inverse of :func:`hfunc` in its first argument."""
    _validate_which(which)
    w, b = _clamp(w), _clamp(b)
    fam, par, rot = spec.family, spec.params, spec.rotation
    Hi = lambda x, y: _base_hinv(fam, par, _clamp(x), _clamp(y))  # noqa: E731
    if rot == 0:
        out = Hi(w, b)
    elif rot == 180:
        out = 1.0 - Hi(1.0 - w, 1.0 - b)
    elif (rot == 90) == (which == "1|2"):
        out = 1.0 - Hi(1.0 - w, b)
    else:
        out = Hi(w, 1.0 - b)
    out = _clamp(out)
    return out[()] if out.ndim == 0 else out


def loglik(spec: PairCopulaSpec, u, v) -> float:
    """Log-likelihood of paired observations."""
    if spec.family is Family.INDEPENDENCE:
        return 0.0
    return float(np.sum(logpdf(spec, u, v)))


# ---------------------------------------------------------------------------
# Kendall's tau


def _debye1(x: float) -> float:
    if x == 0.0:
        return 1.0
    val, _ = integrate.quad(lambda t: t / math.expm1(t) if t != 0.0 else 1.0, 0.0, x,
                            epsabs=0.0, epsrel=1e-12, limit=200)
    return val / x


def _frank_tau(th: float) -> float:
    return 1.0 - 4.0 / th + 4.0 * _debye1(th) / th


def _joe_tau(th: float) -> float:
    if th == 1.0:
        return 0.0
    if abs(th - 2.0) < 1e-3:
        def ratio(t):
            s = (1.0 - t) ** th
            if s >= 1.0:
                return 0.0
            return math.log1p(-s) * (1.0 - s) / (th * (1.0 - t) ** (th - 1.0))
        val, _ = integrate.quad(ratio, 0.0, 1.0, epsabs=0.0, epsrel=1e-12, limit=200)
        return 1.0 + 4.0 * val
    return 1.0 + 2.0 / (2.0 - th) * (special.digamma(2.0) - special.digamma(2.0 / th + 1.0))


def _base_tau(fam: Family, par) -> float:
    if fam is Family.INDEPENDENCE:
        return 0.0
    if fam in (Family.GAUSSIAN, Family.STUDENT):
        return 2.0 / math.pi * math.asin(par[0])
    if fam is Family.CLAYTON:
        return par[0] / (par[0] + 2.0)
    if fam is Family.GUMBEL:
        return 1.0 - 1.0 / par[0]
    if fam is Family.FRANK:
        return _frank_tau(par[0])
    if fam is Family.JOE:
        return _joe_tau(par[0])
    raise AssertionError(fam)


def kendall_tau(spec: PairCopulaSpec) -> float:
    """Kendall's tau of the (rotated) copula."""
    t = _base_tau(spec.family, spec.params)
    return -t if spec.rotation in (90, 270) else t


def tau_to_param(family, tau: float, rotation: int | None = None, df: float = 5.0) -> PairCopulaSpec:
    """Copula of ``family`` with Kendall's tau equal to ``tau``.

    For Clayton, Gumbel and Joe a negative ``tau`` selects the 90 degree
    rotation unless ``rotation`` is given explicitly.  For the Student-t copula
    only the correlation is determined; ``df`` is passed through.
    """
    fam = _as_family(family)
    tau = float(tau)
    if fam is Family.INDEPENDENCE:
        if tau != 0.0:
            raise DomainError("independence copula has tau = 0")
        return PairCopulaSpec(fam)
    if not -1.0 < tau < 1.0:
        raise DomainError(f"tau must lie in (-1, 1), got {tau}")
    if fam in (Family.GAUSSIAN, Family.STUDENT):
        rho = math.sin(math.pi * tau / 2.0)
        params = (rho,) if fam is Family.GAUSSIAN else (rho, df)
        return PairCopulaSpec(fam, 0 if rotation is None else rotation, params)
    if fam is Family.FRANK:
        if tau == 0.0:
            raise DomainError("frank copula cannot represent tau = 0")
        th = _frank_tau_inverse(tau)
        return PairCopulaSpec(fam, 0 if rotation is None else rotation, (th,))
    if rotation is None:
        rotation = 0 if tau >= 0 else 90
    base = -tau if rotation in (90, 270) else tau
    if base <= 0.0:
        raise DomainError(f"{fam.value}: rotation {rotation} cannot represent tau = {tau}")
    if fam is Family.CLAYTON:
        th = 2.0 * base / (1.0 - base)
    elif fam is Family.GUMBEL:
        th = 1.0 / (1.0 - base)
    else:
        th = _joe_tau_inverse(base)
    return PairCopulaSpec(fam, rotation, (th,))


@lru_cache(maxsize=4096)
def _frank_tau_inverse(tau: float) -> float:
    sign = 1.0 if tau > 0 else -1.0
    t = abs(tau)
    hi = 1.0
    while _frank_tau(hi) < t:
        hi *= 2.0
        if hi > 1e6:
            raise DomainError(f"frank: tau {tau} too extreme")
    th = optimize.brentq(lambda x: _frank_tau(x) - t, 1e-12, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    return sign * th


@lru_cache(maxsize=4096)
def _joe_tau_inverse(tau: float) -> float:
    hi = 2.0
    while _joe_tau(hi) < tau:
        hi *= 2.0
        if hi > 1e6:
            raise DomainError(f"joe: tau {tau} too extreme")
    return optimize.brentq(lambda x: _joe_tau(x) - tau, 1.0, hi, xtol=1e-15, rtol=1e-15, maxiter=500)


# ---------------------------------------------------------------------------
# Simulation


def sample(spec: PairCopulaSpec, n: int, seed=None) -> np.ndarray:
    """Draw ``n`` pairs by conditional inversion.

    ``seed`` may be an int, ``None`` or a :class:`numpy.random.Generator`.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    rng = np.random.default_rng(seed)
    w = rng.random((n, 2))
    u = w[:, 0]
    v = hinv(spec, "2|1", w[:, 1], u)
    return np.column_stack([u, v])


# ---------------------------------------------------------------------------
# Estimation


@dataclass(frozen=True)
class PairFit:
    spec: PairCopulaSpec
    loglik: float
    aic: float
    tau_hat: float
    n: int


def independence_threshold(n: int) -> float:
    """Two-sided 5% critical value for |Kendall tau| under independence."""
    return 1.96 * math.sqrt(2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0)))


def _negll(fam, rot, params, u, v):
    try:
        spec = PairCopulaSpec(fam, rot, params)
    except DomainError:
        return np.inf
    val = -loglik(spec, u, v)
    return val if np.isfinite(val) else np.inf


def _tau_to_base_param(fam: Family, tau_base: float) -> float:
    lo, hi = _fit_bounds(fam, tau_base)
    if fam in (Family.GAUSSIAN, Family.STUDENT):
        th = math.sin(math.pi * tau_base / 2.0)
    elif fam is Family.CLAYTON:
        th = 2.0 * tau_base / (1.0 - tau_base)
    elif fam is Family.GUMBEL:
        th = 1.0 / (1.0 - tau_base)
    elif fam is Family.FRANK:
        th = _frank_tau_inverse(tau_base)
    else:
        th = _joe_tau_inverse(tau_base)
    return min(max(th, lo), hi)


def _fit_bounds(fam: Family, tau_base: float):
    if fam in (Family.GAUSSIAN, Family.STUDENT):
        return -_RHO_MAX, _RHO_MAX
    lo, hi = _FIT_BOUNDS[fam.value]
    if fam is Family.FRANK and tau_base < 0:
        return -hi, -lo
    return lo, hi


def _bounded_mle_1d(objective, start, lo, hi, xatol=1e-8):
    """Brent bounded search on a window around ``start``, widened if the
    optimum sits on an interior window edge."""
    width = max(0.25 * (hi - lo), 1e-3)
    if np.isfinite(start):
        wlo, whi = max(lo, start - width), min(hi, start + width)
    else:
        wlo, whi = lo, hi
    while True:
        res = optimize.minimize_scalar(objective, bounds=(wlo, whi), method="bounded",
                                       options={"xatol": xatol, "maxiter": 500})
        x = float(res.x)
        at_lo = x - wlo < 1e-6 and wlo > lo
        at_hi = whi - x < 1e-6 and whi < hi
        if not (at_lo or at_hi) or (wlo == lo and whi == hi):
            return x, float(res.fun)
        wlo, whi = lo, hi


def _fit_family(fam: Family, rot: int, u, v, tau_hat: float):
    tau_base = -tau_hat if rot in (90, 270) else tau_hat
    if fam in _ARCHIMEDEAN_ROTATABLE:
        tau_base = min(max(tau_base, 1e-4), 0.99)
    else:
        tau_base = min(max(tau_base, -0.99), 0.99)
        if fam is Family.FRANK and abs(tau_base) < 1e-4:
            tau_base = math.copysign(1e-4, tau_base if tau_base != 0 else 1.0)
    lo, hi = _fit_bounds(fam, tau_base)
    start = _tau_to_base_param(fam, tau_base)
    if fam is Family.STUDENT:
        rho = start
        df = 5.0
        nll = np.inf
        for _ in range(2):
            df, nll = _bounded_mle_1d(lambda d: _negll(fam, rot, (rho, d), u, v),
                                      np.nan, *_DF_BOUNDS)
            rho, nll = _bounded_mle_1d(lambda r: _negll(fam, rot, (r, df), u, v),
                                       rho, lo, hi)
        params = (rho, df)
    else:
        th, nll = _bounded_mle_1d(lambda t: _negll(fam, rot, (t,), u, v), start, lo, hi)
        if fam is Family.FRANK and th == 0.0:
            th = 1e-4
        params = (th,)
    spec = PairCopulaSpec(fam, rot, params)
    ll = loglik(spec, u, v)
    return spec, ll


def candidate_rotations(fam: Family, tau_hat: float) -> tuple:
    if fam in _ARCHIMEDEAN_ROTATABLE:
        return (0, 180) if tau_hat >= 0 else (90, 270)
    return (0,)


def fit_pair(data, families: Iterable = ALL_FAMILIES, screen_independence: bool = True) -> PairFit:
    """Select a pair-copula family by AIC among maximum-likelihood fits.

    Parameters
    ----------
    data : array_like, shape (n, 2)
        Observations strictly inside the unit square.
    families : iterable of Family or str
        Candidate families.  Independence (AIC = 0) is always a candidate.
    screen_independence : bool
        Select independence outright when the empirical Kendall tau is not
        significant at the 5% level.

    Returns
    -------
    PairFit
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise FitError("fit_pair expects an (n, 2) array")
    n = data.shape[0]
    if n < 10:
        raise FitError(f"fit_pair needs at least 10 observations, got {n}")
    if not np.all(np.isfinite(data)) or np.any((data <= 0) | (data >= 1)):
        raise FitError("fit_pair data must lie strictly inside (0, 1)^2")
    u, v = data[:, 0], data[:, 1]
    if np.ptp(u) == 0 or np.ptp(v) == 0:
        raise FitError("fit_pair data has a constant column")
    tau_hat = float(stats.kendalltau(u, v).statistic)
    if not np.isfinite(tau_hat):
        raise FitError("Kendall's tau is undefined for these data")
    indep = PairFit(PairCopulaSpec.independence(), 0.0, 0.0, tau_hat, n)
    fams = [_as_family(f) for f in families]
    if screen_independence and abs(tau_hat) < independence_threshold(n):
        return indep
    best = indep
    for fam in fams:
        if fam is Family.INDEPENDENCE:
            continue
        for rot in candidate_rotations(fam, tau_hat):
            spec, ll = _fit_family(fam, rot, u, v, tau_hat)
            aic = -2.0 * ll + 2.0 * spec.n_params
            if aic < best.aic:
                best = PairFit(spec, ll, aic, tau_hat, n)
    return best
