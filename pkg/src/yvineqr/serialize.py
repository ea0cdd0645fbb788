"""JSON model files.

Floats are written by :mod:`json` with their shortest round-trip
representation, so a saved and reloaded model reproduces every parameter
bit for bit.
"""

from __future__ import annotations

import json
from typing import Any

from .exceptions import DomainError, ModelFormatError
from .margins import marginal_from_dict
from .paircop import PairCopulaSpec
from .structure import build_structure, check_structure
from .yvine import StepRecord, YVineModel

FORMAT_VERSION = 1


def model_to_dict(model: YVineModel) -> dict:
    s = model.structure
    trees = []
    for tree in s.trees:
        trees.append([
            {"edge": e.label, "key": list(e.key), **model.pair(e.key).to_dict()}
            for e in tree
        ])
    return {
        "format_version": FORMAT_VERSION,
        "structure": {
            "p": s.p,
            "trees": [[{"id": e.id, "nodes": list(e.nodes), "conditioned": list(e.conditioned),
                        "conditioning": sorted(e.conditioning)} for e in t] for t in s.trees],
        },
        "order": list(model.order),
        "response_names": list(model.response_names),
        "predictor_names": list(model.predictor_names),
        "marginals": {
            "responses": [m.to_dict() for m in model.response_marginals],
            "predictors": [m.to_dict() for m in model.predictor_marginals],
        },
        "pair_copulas": trees,
        "top_history": [None if t is None else t.to_dict() for t in model.top_history],
        "acll_trace": list(model.acll_trace),
        "steps": [{"predictor": st.predictor, "gain": st.gain, "acll": st.acll,
                   "resp_loglik": list(st.resp_loglik), "top": st.top.to_dict()}
                  for st in model.steps],
    }


def _spec(d: dict, where: str) -> PairCopulaSpec:
    try:
        return PairCopulaSpec.from_dict(d)
    except (DomainError, KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"invalid pair copula at edge {where}: {exc}") from None


def model_from_dict(d: dict) -> YVineModel:
    if not isinstance(d, dict):
        raise ModelFormatError("model file must hold a JSON object")
    version = d.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported model format_version {version!r}; "
                               f"expected {FORMAT_VERSION}")
    try:
        order = [int(o) for o in d["order"]]
        trees = d["pair_copulas"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFormatError(f"model file is missing field {exc}") from None
    p = len(order)
    try:
        structure = build_structure(p, order)
    except DomainError as exc:
        raise ModelFormatError(str(exc)) from None
    if len(trees) != len(structure.trees):
        raise ModelFormatError(f"expected {len(structure.trees)} trees of pair copulas, found {len(trees)}")
    dvine: dict[tuple, Any] = {}
    resp = [[None] * p, [None] * p]
    top = None
    for k, (tree, ref) in enumerate(zip(trees, structure.trees), start=1):
        if len(tree) != len(ref):
            raise ModelFormatError(f"tree {k}: expected {len(ref)} edges, found {len(tree)}")
        for entry, edge in zip(tree, ref):
            label = entry.get("edge", edge.label) if isinstance(entry, dict) else edge.label
            key = tuple(entry.get("key", edge.key)) if isinstance(entry, dict) else None
            if key != edge.key:
                raise ModelFormatError(f"tree {k}: edge {label} does not match the Y-vine layout")
            spec = _spec(entry, label)
            if key[0] == "dvine":
                dvine[(key[1], key[2])] = spec
            elif key[0] == "resp":
                resp[key[1]][key[2]] = spec
            else:
                top = spec
    margs = d.get("marginals", {})
    try:
        rm = tuple(marginal_from_dict(m) for m in margs.get("responses", [{"kind": "uniform"}] * 2))
        pm = tuple(marginal_from_dict(m) for m in margs.get("predictors", [{"kind": "uniform"}] * p))
    except (DomainError, TypeError, AttributeError) as exc:
        raise ModelFormatError(f"invalid marginal: {exc}") from None
    hist = tuple(None if t is None else _spec(t, f"top pair history[{i}]")
                 for i, t in enumerate(d.get("top_history", [])))
    steps = tuple(StepRecord(int(s["predictor"]), float(s["gain"]), float(s["acll"]),
                             tuple(s["resp_loglik"]), _spec(s["top"], f"step {i} top pair"))
                  for i, s in enumerate(d.get("steps", [])))
    try:
        model = YVineModel(
            order=tuple(order), dvine=dvine, resp=(tuple(resp[0]), tuple(resp[1])), top=top,
            response_marginals=rm, predictor_marginals=pm,
            acll_trace=tuple(float(a) for a in d.get("acll_trace", [])),
            top_history=hist,
            response_names=tuple(d.get("response_names", ("y1", "y2"))),
            predictor_names=tuple(d["predictor_names"]) if "predictor_names" in d else None,
            steps=steps,
        )
    except DomainError as exc:
        raise ModelFormatError(str(exc)) from None
    return model


def dumps(model: YVineModel) -> str:
    return json.dumps(model_to_dict(model), indent=1)


def loads(text: str) -> YVineModel:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(d)


def save_model(model: YVineModel, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(model))
        fh.write("\n")


def load_model(path) -> YVineModel:
    with open(path) as fh:
        return loads(fh.read())


def validate_model(model: YVineModel) -> list:
    """Structure check plus spot checks on the stored pair copulas."""
    problems = list(check_structure(model.structure).problems)
    if model.n_pairs != len(model.structure.edges):
        problems.append("pair-copula count does not match the structure")
    trace = model.acll_trace
    if any(b < a for a, b in zip(trace, trace[1:])):
        problems.append("acll trace is not nondecreasing")
    for e, spec in model.pairs():
        tau = spec.tau
        if not -1.0 < tau < 1.0:
            problems.append(f"edge {e.label}: Kendall tau {tau} outside (-1, 1)")
    return problems
