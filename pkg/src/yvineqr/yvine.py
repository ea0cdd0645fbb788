"""Y-vine copula regression models: densities, acll and forward selection.

Predictor positions are 0-based in order of entry.  With ``p`` predictors a
model stores

* ``dvine[(k, i)]``: copula of (U_{i-k}, U_i) given U_{i-k+1..i-1}, for
  ``1 <= k <= i < p``;
* ``resp[j][i]``: copula of (V_j, U_i) given U_{0..i-1};
* ``top``: copula of (V_1, V_2) given all predictors.

The first argument of every pair copula is the variable listed first.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import paircop as pc
from .exceptions import DomainError, FitError
from .margins import UniformMarginal, fit_marginal
from .paircop import PairCopulaSpec
from .structure import YVineStructure, build_structure

_INDEP = PairCopulaSpec.independence()


@dataclass(frozen=True, eq=False)
class StepRecord:
    """One accepted forward-selection step."""

    predictor: int
    gain: float
    acll: float
    resp_loglik: tuple
    top: PairCopulaSpec


@dataclass(frozen=True, eq=False)
class YVineModel:
    """Fitted Y-vine regression model.

    Attributes
    ----------
    order : tuple of int
        Candidate-predictor indices in order of entry.
    dvine : dict
        Predictor D-vine pairs keyed by ``(k, i)``.
    resp : tuple of two tuples
        Response pairs ``resp[j][i]``.
    top : PairCopulaSpec
        Response-response pair given all predictors.
    response_marginals, predictor_marginals : tuple
        Marginal models; :class:`UniformMarginal` for u-scale data.
    acll_trace : tuple of float
        acll after each accepted step.
    top_history : tuple of PairCopulaSpec
        Top pair fitted after each step, used by :meth:`truncate`.
    """

    order: tuple
    dvine: dict
    resp: tuple
    top: PairCopulaSpec
    response_marginals: tuple = field(default=(UniformMarginal(), UniformMarginal()))
    predictor_marginals: tuple = None
    acll_trace: tuple = ()
    top_history: tuple = ()
    response_names: tuple = ("y1", "y2")
    predictor_names: tuple = None
    steps: tuple = ()

    def __post_init__(self):
        p = len(self.order)
        if p < 1:
            raise DomainError("a Y-vine model needs at least one predictor")
        if len(self.resp) != 2 or any(len(r) != p for r in self.resp):
            raise DomainError("resp must hold two chains of p pair copulas")
        need = {(k, i) for i in range(1, p) for k in range(1, i + 1)}
        if set(self.dvine) != need:
            raise DomainError("dvine pairs do not match the number of predictors")
        object.__setattr__(self, "resp", tuple(tuple(r) for r in self.resp))
        object.__setattr__(self, "order", tuple(int(o) for o in self.order))
        if self.predictor_marginals is None:
            object.__setattr__(self, "predictor_marginals", tuple(UniformMarginal() for _ in range(p)))
        if len(self.predictor_marginals) != p:
            raise DomainError("need one marginal per selected predictor")
        if self.predictor_names is None:
            object.__setattr__(self, "predictor_names", tuple(f"x{o + 1}" for o in self.order))
        if not self.top_history:
            object.__setattr__(self, "top_history", (None,) * (p - 1) + (self.top,))

    @property
    def p(self) -> int:
        return len(self.order)

    @property
    def structure(self) -> YVineStructure:
        return build_structure(self.p, self.order)

    def pair(self, key) -> PairCopulaSpec:
        if key[0] == "dvine":
            return self.dvine[(key[1], key[2])]
        if key[0] == "resp":
            return self.resp[key[1]][key[2]]
        if key == ("top",):
            return self.top
        raise KeyError(key)

    def pairs(self) -> list:
        """All pair copulas with their structure edges, tree by tree."""
        return [(e, self.pair(e.key)) for e in self.structure.edges]

    @property
    def n_pairs(self) -> int:
        return len(self.dvine) + 2 * self.p + 1

    def truncate(self, k: int) -> "YVineModel":
        """Sub-model with the first ``k`` predictors of the order."""
        if not 1 <= k <= self.p:
            raise DomainError(f"truncate needs 1 <= k <= {self.p}, got {k}")
        top = self.top_history[k - 1]
        if top is None:
            raise DomainError(f"no top pair stored for {k} predictors")
        return replace(
            self,
            order=self.order[:k],
            dvine={key: s for key, s in self.dvine.items() if key[1] < k},
            resp=tuple(r[:k] for r in self.resp),
            top=top,
            predictor_marginals=self.predictor_marginals[:k],
            acll_trace=self.acll_trace[:k],
            top_history=self.top_history[:k],
            predictor_names=self.predictor_names[:k],
            steps=self.steps[:k],
        )

    def swap_responses(self) -> "YVineModel":
        """Same model with the two responses exchanged."""
        return replace(
            self,
            resp=(self.resp[1], self.resp[0]),
            top=pc.swap(self.top),
            response_marginals=self.response_marginals[::-1],
            response_names=self.response_names[::-1],
            top_history=tuple(None if t is None else pc.swap(t) for t in self.top_history),
        )

    def to_u(self, y=None, x=None):
        """PIT responses ``y`` (..., 2) and predictors ``x`` (..., p)."""
        out = []
        if y is not None:
            y = np.asarray(y, dtype=float)
            out.append(np.stack([self.response_marginals[j].pit(y[..., j]) for j in range(2)], axis=-1))
        if x is not None:
            x = np.asarray(x, dtype=float)
            if x.shape[-1] != self.p:
                raise DomainError(f"expected {self.p} predictor values, got {x.shape[-1]}")
            out.append(np.stack([self.predictor_marginals[i].pit(x[..., i]) for i in range(self.p)], axis=-1))
        return out[0] if len(out) == 1 else tuple(out)


# ---------------------------------------------------------------------------
# h-function recursions


@dataclass
class DVineChains:
    """Forward/backward pseudo-observations of the predictor D-vine.

    ``fwd[k][:, i] = u_{i | i-k..i-1}`` and ``bwd[k][:, i] = u_{i-k | i-k+1..i}``
    for ``i >= k``; entries with ``i < k`` are NaN.
    """

    fwd: list
    bwd: list
    logc: np.ndarray

    def cond(self, i):
        """u_{i | 0..i-1} for predictor position i."""
        return self.fwd[i][:, i]


def dvine_chains(dvine: dict, U: np.ndarray, levels: int | None = None) -> DVineChains:
    """Run the D-vine h-recursion on u-scale predictor rows ``U`` (n, p)."""
    U = np.atleast_2d(np.asarray(U, dtype=float))
    n, p = U.shape
    levels = p - 1 if levels is None else levels
    fwd = [U.copy()]
    bwd = [U.copy()]
    logc = np.zeros(n)
    for k in range(1, levels + 1):
        f = np.full((n, p), np.nan)
        b = np.full((n, p), np.nan)
        for i in range(k, p):
            spec = dvine[(k, i)]
            lo, hi = bwd[k - 1][:, i - 1], fwd[k - 1][:, i]
            f[:, i] = pc.hfunc(spec, "2|1", hi, lo)
            b[:, i] = pc.hfunc(spec, "1|2", lo, hi)
            if spec.family is not pc.Family.INDEPENDENCE:
                logc += pc.logpdf(spec, lo, hi)
        fwd.append(f)
        bwd.append(b)
    return DVineChains(fwd, bwd, logc)


def response_chain(resp_j: Sequence[PairCopulaSpec], v, ch: DVineChains):
    """Chain ``a[:, i] = u_{v_j | 0..i-1}`` for i = 0..p and its log density.

    Returns ``(a, logc)`` with ``a`` of shape (n, p + 1) and ``logc`` the
    per-row sum of log response-pair densities.
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    n = v.size
    p = len(resp_j)
    a = np.empty((n, p + 1))
    a[:, 0] = v
    logc = np.zeros(n)
    for i, spec in enumerate(resp_j):
        ui = ch.cond(i)
        if spec.family is not pc.Family.INDEPENDENCE:
            logc += pc.logpdf(spec, a[:, i], ui)
        a[:, i + 1] = pc.hfunc(spec, "1|2", a[:, i], ui)
    return a, logc


def pseudo_obs(model: YVineModel, u, v=None, level: int | None = None) -> dict:
    """Conditional PIT values of the Y-vine for u-scale rows.

    Parameters
    ----------
    u : array_like, shape (n, p) or (p,)
        Predictor PITs in model order.
    v : array_like, shape (n, 2) or (2,), optional
        Response PITs.
    level : int, optional
        Highest D-vine tree level to evaluate (default all, ``p - 1``).

    Returns
    -------
    dict
        ``"fwd"``/``"bwd"``: lists of (n, p) arrays as in :class:`DVineChains`;
        ``"resp"``: two (n, p + 1) arrays ``u_{v_j | 0..i-1}`` when ``v`` given.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    if u.shape[1] != model.p:
        raise DomainError(f"expected {model.p} predictor columns, got {u.shape[1]}")
    if level is not None and not 0 <= level <= model.p - 1:
        raise DomainError(f"level must be in [0, {model.p - 1}] for this model, got {level}")
    ch = dvine_chains(model.dvine, u, level)
    out = {"fwd": ch.fwd, "bwd": ch.bwd}
    if v is not None:
        if level is not None and level < model.p - 1:
            raise DomainError("response chains need the full D-vine")
        v = np.atleast_2d(np.asarray(v, dtype=float))
        out["resp"] = [response_chain(model.resp[j], v[:, j], ch)[0] for j in range(2)]
    return out


# ---------------------------------------------------------------------------
# Densities


@dataclass
class _DensityParts:
    log_fx_copula: np.ndarray
    log_fx_margins: np.ndarray
    log_resp: list
    log_top: np.ndarray
    log_fy: list


def _log_marginal_pdf(m, x):
    with np.errstate(divide="ignore"):
        return np.log(m.pdf(x))


def _density_parts(model: YVineModel, y1, y2, x) -> tuple:
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1 and np.ndim(y1) == 0 and np.ndim(y2) == 0
    x = np.atleast_2d(x)
    y1 = np.broadcast_to(np.asarray(y1, dtype=float), (x.shape[0],)) if np.ndim(y1) == 0 else np.asarray(y1, float)
    y2 = np.broadcast_to(np.asarray(y2, dtype=float), (x.shape[0],)) if np.ndim(y2) == 0 else np.asarray(y2, float)
    n = max(x.shape[0], y1.size, y2.size)
    x = np.broadcast_to(x, (n, x.shape[1]))
    y = np.column_stack([np.broadcast_to(y1, (n,)), np.broadcast_to(y2, (n,))])
    v, u = model.to_u(y, x)
    ch = dvine_chains(model.dvine, u)
    log_fx_m = sum(_log_marginal_pdf(model.predictor_marginals[i], x[:, i]) for i in range(model.p))
    chains = [response_chain(model.resp[j], v[:, j], ch) for j in range(2)]
    a1, a2 = chains[0][0][:, -1], chains[1][0][:, -1]
    top = pc.logpdf(model.top, a1, a2) if model.top.family is not pc.Family.INDEPENDENCE else np.zeros(n)
    fy = [_log_marginal_pdf(model.response_marginals[j], y[:, j]) for j in range(2)]
    parts = _DensityParts(ch.logc, np.asarray(log_fx_m, dtype=float) * np.ones(n),
                          [c[1] for c in chains], top, fy)
    return parts, scalar


def _out(val, scalar):
    val = np.asarray(val, dtype=float)
    return float(val[0]) if scalar else val


def log_density_predictors(model: YVineModel, x):
    """log f_X from the predictor D-vine and predictor marginals."""
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1
    x = np.atleast_2d(x)
    u = model.to_u(x=x)
    ch = dvine_chains(model.dvine, u)
    log_m = sum(_log_marginal_pdf(model.predictor_marginals[i], x[:, i]) for i in range(model.p))
    return _out(ch.logc + log_m, scalar)


def log_density_joint(model: YVineModel, y1, y2, x):
    """log f(y1, y2, x) of the full Y-vine."""
    d, s = _density_parts(model, y1, y2, x)
    return _out(d.log_fx_copula + d.log_fx_margins + d.log_resp[0] + d.log_resp[1]
                + d.log_top + d.log_fy[0] + d.log_fy[1], s)


def log_density_conditional(model: YVineModel, y1, y2, x):
    """log f(y1, y2 | x)."""
    d, s = _density_parts(model, y1, y2, x)
    return _out(d.log_resp[0] + d.log_resp[1] + d.log_top + d.log_fy[0] + d.log_fy[1], s)


def log_density_marginal_conditional(model: YVineModel, j: int, yj, x):
    """log f(y_j | x) for response ``j`` in {0, 1}."""
    if j not in (0, 1):
        raise DomainError("response index must be 0 or 1")
    x = np.asarray(x, dtype=float)
    scalar = x.ndim == 1 and np.ndim(yj) == 0
    x = np.atleast_2d(x)
    n = max(x.shape[0], np.size(yj))
    x = np.broadcast_to(x, (n, x.shape[1]))
    yj = np.broadcast_to(np.asarray(yj, dtype=float), (n,))
    u = model.to_u(x=x)
    vj = model.response_marginals[j].pit(yj)
    ch = dvine_chains(model.dvine, u)
    _, logc = response_chain(model.resp[j], vj, ch)
    return _out(logc + _log_marginal_pdf(model.response_marginals[j], yj), scalar)


def log_density_cross_conditional(model: YVineModel, k: int, yk, x, yj):
    """log f(y_k | x, y_j) where ``j`` is the other response."""
    if k not in (0, 1):
        raise DomainError("response index must be 0 or 1")
    y1, y2 = (yj, yk) if k == 1 else (yk, yj)
    d, s = _density_parts(model, y1, y2, x)
    return _out(d.log_resp[k] + d.log_top + d.log_fy[k], s)


# ---------------------------------------------------------------------------
# acll


def _pair_loglik(spec, a, b) -> float:
    return pc.loglik(spec, a, b)


def response_logliks(model: YVineModel, v, u) -> np.ndarray:
    """ell(c_{V_j, U_i; U_{0..i-1}}) on u-scale data, shape (2, p)."""
    ch = dvine_chains(model.dvine, u)
    out = np.zeros((2, model.p))
    for j in range(2):
        a, _ = response_chain(model.resp[j], v[:, j], ch)
        for i in range(model.p):
            out[j, i] = _pair_loglik(model.resp[j][i], a[:, i], ch.cond(i))
    return out


def acll(model: YVineModel, y=None, x=None, scale: str = "x") -> float:
    """Adjusted conditional log-likelihood.

    Sums the log-likelihoods of all response-predictor pairs; the top
    response-response pair is excluded.  Without data the value recorded
    during fitting is returned; with data (for example a held-out set), it
    is recomputed on those rows.
    """
    if y is None:
        if not model.acll_trace:
            raise DomainError("model carries no fitted acll; pass data explicitly")
        return float(model.acll_trace[-1])
    v, u = _data_to_u(model, y, x, scale)
    return float(np.sum(response_logliks(model, v, u)))


def _data_to_u(model, y, x, scale):
    y = np.atleast_2d(np.asarray(y, dtype=float))
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if scale == "u":
        return y, x
    if scale != "x":
        raise DomainError("scale must be 'u' or 'x'")
    return model.to_u(y, x)


def top_loglik(model: YVineModel, y, x, scale: str = "x") -> float:
    v, u = _data_to_u(model, y, x, scale)
    ch = dvine_chains(model.dvine, u)
    a = [response_chain(model.resp[j], v[:, j], ch)[0][:, -1] for j in range(2)]
    return _pair_loglik(model.top, a[0], a[1])


@dataclass(frozen=True)
class CandidateFit:
    column: int
    gain: float
    dvine_column: tuple
    resp_pairs: tuple
    resp_loglik: tuple


def _fit_candidate(column, uc, state, families):
    """Fit the D-vine column and response pairs for appending ``uc``.

    Returns the :class:`CandidateFit` and the new column's forward and
    backward pseudo-observations per tree level.
    """
    k = state.p
    new_pairs = []
    fwd_new = [uc]
    bwd_new = [uc]
    for lev in range(1, k + 1):
        lo = state.bwd[lev - 1][:, k - 1]
        hi = fwd_new[lev - 1]
        spec = pc.fit_pair(np.column_stack([lo, hi]), families).spec
        new_pairs.append(spec)
        fwd_new.append(pc.hfunc(spec, "2|1", hi, lo))
        bwd_new.append(pc.hfunc(spec, "1|2", lo, hi))
    ucond = fwd_new[k]
    specs, lls = [], []
    for j in range(2):
        fit = pc.fit_pair(np.column_stack([state.a[j][:, k], ucond]), families)
        specs.append(fit.spec)
        lls.append(fit.loglik)
    cand = CandidateFit(column, lls[0] + lls[1], tuple(new_pairs), tuple(specs), tuple(lls))
    return cand, fwd_new, bwd_new


class _SelectionState:
    """Chains of the model under construction on the training data."""

    def __init__(self, v):
        self.v = v
        self.n = v.shape[0]
        self.p = 0
        self.order = []
        self.dvine = {}
        self.resp = ([], [])
        self.fwd = []  # fwd[k] (n, p) arrays, grown column by column
        self.bwd = []
        self.a = [v[:, [0]].copy(), v[:, [1]].copy()]

    def accept(self, cand: CandidateFit, fwd_new, bwd_new):
        k = self.p
        for lev in range(k + 1):
            if lev >= len(self.fwd):
                self.fwd.append(np.full((self.n, k), np.nan))
                self.bwd.append(np.full((self.n, k), np.nan))
        for lev in range(len(self.fwd)):
            fcol = fwd_new[lev] if lev <= k else np.full(self.n, np.nan)
            bcol = bwd_new[lev] if lev <= k else np.full(self.n, np.nan)
            self.fwd[lev] = np.column_stack([self.fwd[lev], fcol])
            self.bwd[lev] = np.column_stack([self.bwd[lev], bcol])
        for lev, spec in enumerate(cand.dvine_column, start=1):
            self.dvine[(lev, k)] = spec
        ucond = fwd_new[k]
        for j in range(2):
            spec = cand.resp_pairs[j]
            self.resp[j].append(spec)
            nxt = pc.hfunc(spec, "1|2", self.a[j][:, k], ucond)
            self.a[j] = np.column_stack([self.a[j], nxt])
        self.order.append(cand.column)
        self.p += 1


def acll_gain(model: YVineModel | None, y, x_selected, x_candidate, scale: str = "u",
              families=pc.ALL_FAMILIES) -> float:
    """acll increase from appending a candidate predictor to ``model``.

    Fits the candidate's D-vine column and its two response pairs on the
    given data and returns ``ell(c_{V1, U_new; .}) + ell(c_{V2, U_new; .})``.
    ``model=None`` evaluates a first-step candidate.
    """
    y = np.atleast_2d(np.asarray(y, dtype=float))
    xc = np.asarray(x_candidate, dtype=float).ravel()
    if scale == "x":
        if model is None:
            raise DomainError("x-scale gains need a model with marginals")
        v, u = model.to_u(y, x_selected)
        uc = fit_marginal(xc).pit(xc)
    else:
        v = y
        u = None if model is None else np.atleast_2d(np.asarray(x_selected, dtype=float))
        uc = xc
    state = _SelectionState(v)
    if model is not None:
        ch = dvine_chains(model.dvine, u)
        state.p = model.p
        state.fwd, state.bwd = ch.fwd, ch.bwd
        state.a = [response_chain(model.resp[j], v[:, j], ch)[0] for j in range(2)]
    cand, _, _ = _fit_candidate(-1, uc, state, families)
    return cand.gain


def _fit_top(state: _SelectionState, families):
    k = state.p
    return pc.fit_pair(np.column_stack([state.a[0][:, k], state.a[1][:, k]]), families)


def fit(data, responses=(0, 1), predictors=None, *, families=pc.ALL_FAMILIES, order=None,
        scale: str = "x", max_predictors: int | None = None, threads: int = 1,
        response_names=None, predictor_names=None) -> YVineModel:
    """Fit a Y-vine regression model by forward selection.

    Parameters
    ----------
    data : array_like, shape (n, m)
        Observations on the x-scale (or u-scale with ``scale="u"``).
    responses : pair of int
        Columns of the two responses.
    predictors : sequence of int, optional
        Candidate predictor columns; default all non-response columns.
    families : iterable
        Pair-copula families considered for every pair.
    order : sequence of int, optional
        Fix the structure: positions into ``predictors`` in order of entry.
        All listed predictors are kept regardless of their gain.
    scale : {"x", "u"}
        ``"x"`` fits kernel marginals first; ``"u"`` treats the data as PITs.
    max_predictors : int, optional
        Stop after this many predictors.
    threads : int
        Worker threads used to evaluate candidates within a step.

    Returns
    -------
    YVineModel

    Raises
    ------
    FitError
        If fewer than 30 rows are given, or no predictor improves the acll
        at the first step (unconditional quantiles should be used then).
    """
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise FitError("fit expects a 2-d data matrix")
    n, m = data.shape
    responses = tuple(int(r) for r in responses)
    if len(responses) != 2 or responses[0] == responses[1]:
        raise FitError("exactly two distinct response columns are required")
    if predictors is None:
        predictors = [c for c in range(m) if c not in responses]
    predictors = [int(c) for c in predictors]
    if set(predictors) & set(responses):
        raise FitError("a column cannot be both response and predictor")
    if any(not 0 <= c < m for c in list(predictors) + list(responses)):
        raise FitError("column index out of range")
    if not predictors:
        raise FitError("at least one candidate predictor is required")
    if n < 30:
        raise FitError(f"fit needs at least 30 observations, got {n}")
    if not np.all(np.isfinite(data[:, list(responses) + predictors])):
        raise FitError("data contains non-finite values")

    if scale == "x":
        rmarg = tuple(fit_marginal(data[:, r]) for r in responses)
        pmarg = [fit_marginal(data[:, c]) for c in predictors]
    elif scale == "u":
        sub = data[:, list(responses) + predictors]
        if np.any((sub <= 0) | (sub >= 1)):
            raise FitError("u-scale data must lie strictly inside (0, 1)")
        rmarg = (UniformMarginal(), UniformMarginal())
        pmarg = [UniformMarginal() for _ in predictors]
    else:
        raise FitError("scale must be 'x' or 'u'")
    V = np.column_stack([rmarg[j].pit(data[:, responses[j]]) for j in range(2)])
    Uc = np.column_stack([pmarg[i].pit(data[:, c]) for i, c in enumerate(predictors)])

    P = len(predictors)
    limit = P if max_predictors is None else min(P, int(max_predictors))
    forced = None
    if order is not None:
        forced = [int(o) for o in order]
        if len(set(forced)) != len(forced) or any(not 0 <= o < P for o in forced):
            raise FitError("order must list distinct positions into the predictor list")
        limit = len(forced)

    state = _SelectionState(V)
    steps = []
    trace = []
    tops = []
    total = 0.0
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None
    try:
        while state.p < limit:
            if forced is not None:
                cands = [forced[state.p]]
            else:
                cands = [c for c in range(P) if c not in state.order]
            jobs = [(c, Uc[:, c]) for c in cands]
            if pool is not None:
                results = list(pool.map(lambda cu: _fit_candidate(cu[0], cu[1], state, families), jobs))
            else:
                results = [_fit_candidate(c, u, state, families) for c, u in jobs]
            # ties go to the lowest candidate index
            best = max(results, key=lambda r: (r[0].gain, -r[0].column))
            cand = best[0]
            if forced is None and not cand.gain > 0.0:
                if state.p == 0:
                    raise FitError("no candidate predictor increases the conditional "
                                   "log-likelihood; use unconditional bivariate quantiles")
                break
            state.accept(*best)
            total = total + cand.gain
            top = _fit_top(state, families).spec
            tops.append(top)
            trace.append(total)
            steps.append(StepRecord(cand.column, cand.gain, total, cand.resp_loglik, top))
    finally:
        if pool is not None:
            pool.shutdown()

    if response_names is None:
        response_names = tuple(f"y{r + 1}" for r in responses)
    if predictor_names is None:
        predictor_names = tuple(f"x{c + 1}" for c in predictors)
    sel_names = tuple(predictor_names[o] for o in state.order)
    return YVineModel(
        order=tuple(state.order),
        dvine=dict(state.dvine),
        resp=(tuple(state.resp[0]), tuple(state.resp[1])),
        top=tops[-1],
        response_marginals=rmarg,
        predictor_marginals=tuple(pmarg[o] for o in state.order),
        acll_trace=tuple(trace),
        top_history=tuple(tops),
        response_names=tuple(response_names),
        predictor_names=sel_names,
        steps=tuple(steps),
    )


def independence_model(p: int, **kwargs) -> YVineModel:
    """Y-vine whose pair copulas are all independence (u-scale marginals)."""
    dvine = {(k, i): _INDEP for i in range(1, p) for k in range(1, i + 1)}
    resp = (tuple([_INDEP] * p), tuple([_INDEP] * p))
    return YVineModel(order=tuple(range(p)), dvine=dvine, resp=resp, top=_INDEP,
                      acll_trace=tuple([0.0] * p), **kwargs)


def model_from_pairs(dvine: dict, resp, top: PairCopulaSpec, **kwargs) -> YVineModel:
    """Assemble a model from explicit pair copulas (u-scale marginals by default)."""
    p = len(resp[0])
    kwargs.setdefault("order", tuple(range(p)))
    return YVineModel(dvine=dict(dvine), resp=resp, top=top, **kwargs)

