"""Annotated s-graphs (as-graphs) and the graph-level apply/modify operations.

An as-graph is a rooted, node- and edge-labeled directed graph in which some
nodes are marked as sources.  Each source carries an annotation type (the
empty type when unannotated).  Values are treated as immutable: every
operation returns a new graph with freshly numbered nodes.
"""

from __future__ import annotations

from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

import networkx as nx

from .amtypes import (
    EMPTY,
    AmType,
    check_source_name,
    occurs_in,
    parse_type,
    render_type,
    requested_elsewhere,
)
from .penman import PenmanSyntaxError, parse_penman, write_penman

Edge = Tuple[int, int, str]


class AsGraphError(ValueError):
    """Invalid graph or undefined graph operation."""


class GraphInvariantError(AsGraphError):
    pass


class OperationUndefined(AsGraphError):
    """The operation is undefined for the operand types."""


class LabelConflict(AsGraphError):
    """Source unification would fuse two labeled nodes."""


class AsGraph:
    __slots__ = ("labels", "edges", "root", "sources", "annotations", "_type")

    def __init__(
        self,
        labels: Mapping[int, Optional[str]],
        edges: Iterable[Edge],
        root: int,
        sources: Optional[Mapping[str, int]] = None,
        annotations: Optional[Mapping[str, AmType]] = None,
    ):
        self.labels: Dict[int, Optional[str]] = dict(labels)
        self.edges: FrozenSet[Edge] = frozenset(edges)
        self.root = root
        self.sources: Dict[str, int] = dict(sources or {})
        self.annotations: Dict[str, AmType] = {
            k: v for k, v in (annotations or {}).items() if v is not EMPTY
        }
        self._type = None
        self._validate()

    def _validate(self) -> None:
        if self.root not in self.labels:
            raise GraphInvariantError("root is not a node of the graph")
        for s, t, lab in self.edges:
            if s not in self.labels or t not in self.labels:
                raise GraphInvariantError(f"edge {lab!r} references an unknown node")
            if not lab:
                raise GraphInvariantError("empty edge label")
        seen = {}
        for name, node in self.sources.items():
            check_source_name(name)
            if node not in self.labels:
                raise GraphInvariantError(f"source {name!r} is not a node of the graph")
            if node in seen:
                raise GraphInvariantError(
                    f"node carries two source names {seen[node]!r} and {name!r}"
                )
            seen[node] = name
        for name, ann in self.annotations.items():
            if name not in self.sources:
                raise GraphInvariantError(f"annotation on missing source {name!r}")
            if occurs_in(ann, name):
                raise GraphInvariantError(f"source {name!r} occurs inside its own annotation")
        if not _connected(self.labels, self.edges):
            raise GraphInvariantError("graph is disconnected")

    # --- accessors ---

    @property
    def nodes(self):
        return self.labels.keys()

    def annotation(self, name: str) -> AmType:
        return self.annotations.get(name, EMPTY)

    def source_of(self, node: int) -> Optional[str]:
        for name, n in self.sources.items():
            if n == node:
                return name
        return None

    def relabel(self, node: int, label: Optional[str]) -> "AsGraph":
        labels = dict(self.labels)
        labels[node] = label
        return AsGraph(labels, self.edges, self.root, self.sources, self.annotations)

    def with_annotations(self, annotations: Mapping[str, AmType]) -> "AsGraph":
        return AsGraph(self.labels, self.edges, self.root, self.sources, annotations)

    def __repr__(self) -> str:
        return f"AsGraph({render_asgraph(self)})"

    def __len__(self) -> int:
        return len(self.labels)


def _connected(labels, edges) -> bool:
    if not labels:
        return False
    adj = {n: set() for n in labels}
    for s, t, _ in edges:
        adj[s].add(t)
        adj[t].add(s)
    start = next(iter(labels))
    seen = {start}
    stack = [start]
    while stack:
        for m in adj[stack.pop()]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return len(seen) == len(labels)


def type_of(g: AsGraph) -> AmType:
    if g._type is None:
        g._type = AmType({name: g.annotation(name) for name in g.sources})
    return g._type


# --- serialization ------------------------------------------------------------


def parse_asgraph(text: str) -> AsGraph:
    raw = parse_penman(text, decorations=True)
    annotations = {}
    sources = {}
    for name, (node, tytext) in raw.sources.items():
        sources[name] = node
        if tytext:
            try:
                annotations[name] = parse_type(tytext)
            except ValueError as exc:
                raise PenmanSyntaxError(f"bad annotation for {name!r}: {exc}", 0) from None
    root = raw.root if raw.root is not None else raw.top
    return AsGraph(raw.labels, raw.edges, root, sources, annotations)


def _decorator(g: AsGraph):
    by_node = {node: name for name, node in g.sources.items()}

    def decorate(node: int) -> str:
        items = []
        if node == g.root:
            items.append("root")
        name = by_node.get(node)
        if name is not None:
            ann = g.annotation(name)
            items.append(name + (render_type(ann) if len(ann) else ""))
        return "<" + ", ".join(items) + ">" if items else ""

    return decorate


def render_asgraph(g: AsGraph) -> str:
    return write_penman(g.labels, g.edges, g.root, _decorator(g))


def render_plain(g: AsGraph) -> str:
    """PENMAN without root/source decorations (for evaluated AMRs)."""
    return write_penman(g.labels, g.edges, g.root)


# --- operations -----------------------------------------------------------------


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _fuse(g1: AsGraph, g2: AsGraph, pairs, root, sources, annotations) -> AsGraph:
    """Disjoint union of g1 and g2 with the node pairs in `pairs` fused."""
    uf = _UnionFind()
    for n in g1.labels:
        uf.find((1, n))
    for n in g2.labels:
        uf.find((2, n))
    for a, b in pairs:
        uf.union(a, b)
    ids: Dict[tuple, int] = {}
    labels: Dict[int, Optional[str]] = {}
    for side, g in ((1, g1), (2, g2)):
        for n in sorted(g.labels):
            rep = uf.find((side, n))
            nid = ids.setdefault(rep, len(ids))
            lab = g.labels[n]
            if lab is not None:
                if labels.get(nid) is not None:
                    raise LabelConflict(
                        f"unification fuses labeled nodes {labels[nid]!r} and {lab!r}"
                    )
                labels[nid] = lab
            else:
                labels.setdefault(nid, None)
    edges = set()
    for side, g in ((1, g1), (2, g2)):
        for s, t, lab in g.edges:
            edges.add((ids[uf.find((side, s))], ids[uf.find((side, t))], lab))
    new_sources = {name: ids[uf.find(node)] for name, node in sources.items()}
    if len(set(new_sources.values())) != len(new_sources):
        raise GraphInvariantError("unification puts two source names on one node")
    return AsGraph(labels, edges, ids[uf.find(root)], new_sources, annotations)


def apply(gp: AsGraph, a: str, ga: AsGraph) -> AsGraph:
    """APP_a: plug the root of `ga` into the a-source of `gp`."""
    if a not in gp.sources:
        raise OperationUndefined(f"head has no {a!r}-source")
    tp, ta = type_of(gp), type_of(ga)
    expected = gp.annotation(a)
    if expected is not ta:
        raise OperationUndefined(
            f"annotation mismatch at {a!r}: expected {render_type(expected)}, got {render_type(ta)}"
        )
    if requested_elsewhere(tp, a):
        raise OperationUndefined(f"source {a!r} is still requested by another annotation")
    pairs = [((1, gp.sources[a]), (2, ga.root))]
    sources = {}
    annotations = {}
    for name, node in gp.sources.items():
        if name != a:
            sources[name] = (1, node)
            annotations[name] = gp.annotation(name)
    for name, node in ga.sources.items():
        if name in sources:
            if annotations[name] is not ga.annotation(name):
                raise OperationUndefined(f"conflicting annotations for shared source {name!r}")
            pairs.append((sources[name], (2, node)))
        else:
            sources[name] = (2, node)
            annotations[name] = ga.annotation(name)
    return _fuse(gp, ga, pairs, (1, gp.root), sources, annotations)


def modify(gh: AsGraph, a: str, gm: AsGraph) -> AsGraph:
    """MOD_a: plug the root of `gh` into the a-source of `gm`; the head keeps its type."""
    if a not in gm.sources:
        raise OperationUndefined(f"modifier has no {a!r}-source")
    if gm.annotation(a) is not EMPTY:
        raise OperationUndefined(f"modifier source {a!r} must have the empty annotation")
    pairs = [((1, gh.root), (2, gm.sources[a]))]
    for name, node in gm.sources.items():
        if name == a:
            continue
        if name not in gh.sources:
            raise OperationUndefined(f"modifier source {name!r} is not present in the head")
        if gh.annotation(name) is not gm.annotation(name):
            raise OperationUndefined(f"conflicting annotations for shared source {name!r}")
        pairs.append(((1, gh.sources[name]), (2, node)))
    sources = {name: (1, node) for name, node in gh.sources.items()}
    return _fuse(gh, gm, pairs, (1, gh.root), sources, dict(gh.annotations))


# --- comparison -----------------------------------------------------------------


def to_networkx(g: AsGraph) -> nx.DiGraph:
    by_node = {node: name for name, node in g.sources.items()}
    out = nx.DiGraph()
    for n, lab in g.labels.items():
        name = by_node.get(n)
        ann = render_type(g.annotation(name)) if name else None
        out.add_node(n, key=(lab, name, ann, n == g.root))
    multi: Dict[Tuple[int, int], list] = {}
    for s, t, lab in g.edges:
        multi.setdefault((s, t), []).append(lab)
    for (s, t), labs in multi.items():
        out.add_edge(s, t, labels=tuple(sorted(labs)))
    return out


def is_isomorphic(g1: AsGraph, g2: AsGraph) -> bool:
    if len(g1.labels) != len(g2.labels) or len(g1.edges) != len(g2.edges):
        return False
    if type_of(g1) is not type_of(g2):
        return False
    return nx.is_isomorphic(
        to_networkx(g1),
        to_networkx(g2),
        node_match=lambda x, y: x["key"] == y["key"],
        edge_match=lambda x, y: x["labels"] == y["labels"],
    )
