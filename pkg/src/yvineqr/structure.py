"""Y-vine tree sequences and a generic regular-vine validity checker.

Variables are labelled ``"V1"``, ``"V2"`` (responses) and ``"U1" .. "Up"``
(predictors, in order of entry).  Tree 1 attaches both responses to ``U1``
and chains the predictors as a path; each later tree k joins the two
response edges to the leading predictor edge and continues the D-vine on the
predictors, and the final tree joins the two response edges.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from .exceptions import DomainError


@dataclass(frozen=True)
class VineEdge:
    """Edge of a vine tree.

    ``nodes`` are the two joined nodes: variable labels in tree 1 and edge
    ids of the previous tree afterwards.  ``key`` identifies the pair copula
    in a :class:`~yvineqr.yvine.YVineModel`.
    """

    id: str
    tree: int
    nodes: tuple
    conditioned: tuple
    conditioning: frozenset
    key: tuple

    @property
    def label(self) -> str:
        a, b = self.conditioned
        if not self.conditioning:
            return f"{a},{b}"
        return f"{a},{b};" + ",".join(sorted(self.conditioning, key=_var_sort_key))


def _var_sort_key(v: str):
    return (v[0] != "V", int(v[1:]))


@dataclass(frozen=True)
class YVineStructure:
    """Y-vine over two responses and ``p`` ordered predictors.

    Attributes
    ----------
    p : int
        Number of predictors in the model.
    order : tuple of int
        Original column indices of the predictors in order of entry.
    trees : tuple of tuple of VineEdge
        ``trees[k - 1]`` holds the edges of tree k.
    """

    p: int
    order: tuple
    trees: tuple

    @property
    def variables(self) -> tuple:
        return ("V1", "V2") + tuple(f"U{i}" for i in range(1, self.p + 1))

    @property
    def edges(self) -> list:
        return [e for t in self.trees for e in t]

    @property
    def n_edges(self) -> int:
        return sum(len(t) for t in self.trees)


def expected_edge_count(p: int) -> int:
    return p * (p - 1) // 2 + 2 * p + 1


def _join(eid, tree, a: VineEdge | str, b: VineEdge | str, key) -> VineEdge:
    sa = _constraint(a)
    sb = _constraint(b)
    conditioned = tuple(sorted(sa ^ sb, key=_var_sort_key))
    nodes = tuple(x if isinstance(x, str) else x.id for x in (a, b))
    return VineEdge(eid, tree, nodes, conditioned, frozenset(sa & sb), key)


def _constraint(x) -> frozenset:
    if isinstance(x, str):
        return frozenset([x])
    return frozenset(x.conditioned) | x.conditioning


def build_structure(p: int, order=None) -> YVineStructure:
    """Tree sequence of the Y-vine with ``p`` predictors.

    Pair-copula keys (0-based predictor positions):

    * ``("dvine", k, i)``: U_{i-k}, U_i given U_{i-k+1..i-1}, ``1 <= k <= i < p``
    * ``("resp", j, i)``: V_j, U_i given U_{0..i-1}, ``j in {0, 1}``
    * ``("top",)``: V1, V2 given all predictors
    """
    if not isinstance(p, int) or p < 1:
        raise DomainError(f"a Y-vine needs p >= 1 predictors, got {p!r}")
    order = tuple(range(p)) if order is None else tuple(int(o) for o in order)
    if len(order) != p or len(set(order)) != p:
        raise DomainError("order must list p distinct predictor indices")
    U = [f"U{i + 1}" for i in range(p)]
    # tree 1
    resp = [_join(f"T1:V{j + 1}", 1, f"V{j + 1}", U[0], ("resp", j, 0)) for j in range(2)]
    dv = [_join(f"T1:D{i}", 1, U[i - 1], U[i], ("dvine", 1, i)) for i in range(1, p)]
    trees = [tuple(resp + dv)]
    # dv[m] holds the D-vine edge ending at predictor position m + k in tree k
    for k in range(2, p + 1):
        new_resp = [_join(f"T{k}:V{j + 1}", k, resp[j], dv[0], ("resp", j, k - 1)) for j in range(2)]
        new_dv = [_join(f"T{k}:D{i}", k, dv[i - k], dv[i - k + 1], ("dvine", k, i))
                  for i in range(k, p)]
        resp, dv = new_resp, new_dv
        trees.append(tuple(resp + dv))
    trees.append((_join(f"T{p + 1}:top", p + 1, resp[0], resp[1], ("top",)),))
    return YVineStructure(p, order, tuple(trees))


@dataclass(frozen=True)
class VineCheck:
    ok: bool
    problems: tuple

    def __bool__(self) -> bool:
        return self.ok


def _is_tree(nodes: set, edges) -> bool:
    if len(edges) != len(nodes) - 1:
        return False
    parent: dict[Hashable, Hashable] = {n: n for n in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in edges:
        if a not in parent or b not in parent:
            return False
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
    return True


def check_regular_vine(trees, variables) -> VineCheck:
    """Check that ``trees`` form a regular vine on ``variables``.

    Verifies that tree 1 spans the variables, that every tree is a spanning
    tree on the edges of the previous one, the proximity condition, and that
    every edge has a two-element conditioned set with a conditioning set of
    size ``tree - 1``.
    """
    problems = []
    variables = set(variables)
    d = len(variables)
    if len(trees) != d - 1:
        problems.append(f"expected {d - 1} trees, found {len(trees)}")
    prev_edges: dict = {}
    for k, tree in enumerate(trees, start=1):
        pairs = [tuple(e.nodes) for e in tree]
        if k == 1:
            nodes = set(variables)
        else:
            nodes = set(prev_edges)
        used = {n for pr in pairs for n in pr}
        if not used <= nodes:
            problems.append(f"tree {k}: edges reference unknown nodes {sorted(map(str, used - nodes))}")
        elif not _is_tree(nodes, pairs):
            problems.append(f"tree {k} is not a spanning tree on {len(nodes)} nodes")
        for e in tree:
            if k >= 2 and set(e.nodes) <= set(prev_edges):
                a, b = (prev_edges[n] for n in e.nodes)
                if not set(a.nodes) & set(b.nodes):
                    problems.append(f"tree {k} edge {e.label}: proximity condition violated")
                sa, sb = _constraint(a), _constraint(b)
                if tuple(sorted(sa ^ sb, key=_var_sort_key)) != e.conditioned or sa & sb != e.conditioning:
                    problems.append(f"tree {k} edge {e.label}: sets inconsistent with joined nodes")
            if len(set(e.conditioned)) != 2:
                problems.append(f"tree {k} edge {e.label}: conditioned set must have 2 elements")
            if len(e.conditioning) != k - 1:
                problems.append(f"tree {k} edge {e.label}: conditioning set has size "
                                f"{len(e.conditioning)}, expected {k - 1}")
        prev_edges = {e.id: e for e in tree}
    return VineCheck(not problems, tuple(problems))


def check_structure(s: YVineStructure) -> VineCheck:
    res = check_regular_vine(s.trees, s.variables)
    problems = list(res.problems)
    if s.n_edges != expected_edge_count(s.p):
        problems.append(f"edge count {s.n_edges} != {expected_edge_count(s.p)}")
    last = s.trees[-1]
    if len(last) != 1 or set(last[0].conditioned) != {"V1", "V2"}:
        problems.append("last tree must consist of the single response-response edge")
    return VineCheck(not problems, tuple(problems))
