"""Splitting an aligned AMR into elementary as-graphs and an AM dependency tree.

Each aligned token owns a fragment of AMR nodes.  Its blob adds the edges
the policy assigns to it, with the far endpoints of cross-fragment edges
turned into placeholder sources.  A blob that requests another fragment's
root becomes its head via APP; a blob that owns a modifier edge attaches
via MOD.  Reentrant nodes requested by several blobs attach at the lowest
common ancestor of their requesters and are shared through source names.
Annotations are then read off the finished tree, and the result is checked
by evaluating it and comparing with the input graph.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Set, Tuple

from ..amdep import AmDepTree, Token, check_well_typed, combine, evaluate
from ..amtypes import APP, EMPTY, IGNORE, MOD, AmType, EdgeOp
from ..asgraph import AsGraph, AsGraphError, is_isomorphic, type_of
from .align import Alignment, attachment_points
from .policy import BlobPolicy, edge_names

REJECT_CODES = (
    "unaligned-node",
    "multi-root",
    "unnamable-edge",
    "annotation-conflict",
    "cycle",
    "roundtrip",
)


class DecompositionError(ValueError):
    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code


@dataclass
class _Placeholder:
    name: str
    modifies: bool  # used as the source of a MOD edge, hence unannotated
    edges: List[Tuple[int, int, str]] = field(default_factory=list)


@dataclass
class Decomposition:
    tree: AmDepTree
    lexical: Dict[int, int]  # token -> node id of its lexical node in the supertag
    gold: AsGraph  # the input graph minus removed reentrancies
    removed: List[Tuple[int, int, str]] = field(default_factory=list)


def _name_rank(name: str) -> Tuple[int, str]:
    order = {"s": 0, "o": 1}
    if name in order:
        return order[name], name
    if name.startswith("o") and name[1:].isdigit():
        return int(name[1:]), name
    return 99, name


def decompose(
    amr: AsGraph,
    alignment: Alignment,
    tokens: Sequence[str],
    pos: Optional[Sequence[str]] = None,
    policy: Optional[BlobPolicy] = None,
) -> Decomposition:
    policy = policy or BlobPolicy()
    n = len(tokens)
    pos = list(pos) if pos is not None else ["_"] * n
    if alignment.unaligned:
        raise DecompositionError("unaligned-node", f"nodes {alignment.unaligned} have no token")
    tok_of = alignment.node_token
    frags = alignment.fragments()

    root_of: Dict[int, int] = {}
    for t, nodes in frags.items():
        points = attachment_points(amr, nodes, policy)
        if len(points) > 1:
            raise DecompositionError("multi-root", f"token {t} fragment has roots {sorted(points)}")
        root_of[t] = min(points) if points else alignment.lexical.get(t, min(nodes))
    top = tok_of[amr.root]

    out_labels: Dict[int, List[str]] = {v: [] for v in amr.labels}
    for s, _, lab in amr.edges:
        if not policy.owned_by_target(lab):
            out_labels[s].append(lab)
    names_at = {v: edge_names(policy, labs) for v, labs in out_labels.items()}

    # placeholders[blob token][external node]
    placeholders: Dict[int, Dict[int, _Placeholder]] = {t: {} for t in frags}
    for s, d, lab in sorted(amr.edges):
        ts, td = tok_of[s], tok_of[d]
        if ts == td:
            continue
        if policy.owned_by_target(lab):
            owner, ext, name, mod = td, s, policy.modify_name, True
        else:
            owner, ext, name, mod = ts, d, names_at[s][lab], False
        if ext != root_of[tok_of[ext]]:
            raise DecompositionError("multi-root", f"edge {lab} reaches a non-root node of token {tok_of[ext]}")
        ph = placeholders[owner].setdefault(ext, _Placeholder(name, mod))
        if ph.name != name or ph.modifies != mod:
            raise DecompositionError("unnamable-edge", f"token {owner} reaches node {ext} under two names")
        ph.edges.append((s, d, lab))
    for t, phs in placeholders.items():
        names = [ph.name for ph in phs.values()]
        if len(set(names)) != len(names):
            raise DecompositionError("unnamable-edge", f"token {t} uses a source name twice")

    parent: Dict[int, Tuple[int, EdgeOp]] = {}
    requesters: Dict[int, Dict[int, int]] = {t: {} for t in frags}  # Q -> {P: ext node}
    for p, phs in placeholders.items():
        mods = [(ext, ph) for ext, ph in phs.items() if ph.modifies]
        if len(mods) > 1:
            raise DecompositionError("unnamable-edge", f"token {p} modifies more than one fragment")
        for ext, ph in phs.items():
            if ph.modifies:
                parent[p] = (tok_of[ext], MOD(ph.name))
            else:
                requesters[tok_of[ext]][p] = ext

    # a fragment nobody requests modifies one of its own request targets
    for q in sorted(frags):
        if q == top or q in parent or requesters[q]:
            continue
        targets = [(tok_of[ext], ph) for ext, ph in placeholders[q].items() if not ph.modifies]
        if not targets:
            raise DecompositionError("cycle", f"token {q} is not connected to the rest")
        targets.sort(key=lambda x: (len(requesters[x[0]]) <= 1, _name_rank(x[1].name)))
        target, ph = targets[0]
        ph.modifies = True
        parent[q] = (target, MOD(ph.name))
        del requesters[target][q]

    removed: List[Tuple[int, int, str]] = []

    def rename_or_drop(p: int, ext: int, name: str, modifies: bool) -> None:
        ph = placeholders[p][ext]
        if ph.name != name and any(o.name == name for o in placeholders[p].values()):
            removed.extend(ph.edges)
            del placeholders[p][ext]
            return
        ph.name = name
        ph.modifies = ph.modifies or modifies

    pending = set(frags) - {top} - set(parent)
    while pending:
        progress = False
        for q in sorted(pending):
            chains = {}
            for p in requesters[q]:
                chain, cur = [p], p
                while cur not in (top, q) and cur in parent:
                    cur = parent[cur][0]
                    chain.append(cur)
                if chain[-1] not in (top, q):
                    break
                chains[p] = chain
            else:
                outside = [p for p, c in sorted(chains.items()) if c[-1] != q]
                if not outside:
                    raise DecompositionError("cycle", f"token {q} is only requested from inside its subtree")
                rest = [set(chains[p]) for p in outside[1:]]
                lca = next(a for a in chains[outside[0]] if all(a in r for r in rest))
                if lca in requesters[q]:
                    name = placeholders[lca][requesters[q][lca]].name
                else:
                    counts = Counter(placeholders[p][requesters[q][p]].name for p in outside)
                    name = min(counts, key=lambda nm: (-counts[nm], _name_rank(nm)))
                    if any(ph.name == name for ph in placeholders[lca].values()):
                        raise DecompositionError("unnamable-edge", f"source {name} is taken at token {lca}")
                parent[q] = (lca, APP(name))
                for p in outside:
                    if p != lca:
                        rename_or_drop(p, requesters[q][p], name, False)
                for p, c in sorted(chains.items()):
                    if c[-1] != q:
                        continue
                    below, op = c[-2], parent[c[-2]][1]
                    if p != below and op.kind == "MOD":
                        rename_or_drop(p, requesters[q][p], op.source, True)
                    else:
                        removed.extend(placeholders[p].pop(requesters[q][p]).edges)
                pending.discard(q)
                progress = True
        if not progress:
            raise DecompositionError("cycle", f"cannot attach tokens {sorted(pending)}")

    children: Dict[int, List[Tuple[int, EdgeOp]]] = {t: [] for t in frags}
    for c, (h, op) in parent.items():
        children[h].append((c, op))

    subtree: Dict[int, AmType] = {}
    graphs: Dict[int, AsGraph] = {}
    active: Set[int] = set()

    def build(t: int) -> AmType:
        if t in subtree:
            return subtree[t]
        if t in active:
            raise DecompositionError("annotation-conflict", f"annotation of token {t} depends on itself")
        active.add(t)
        labels = {v: amr.labels[v] for v in frags[t]}
        edges = {e for e in amr.edges if tok_of[e[0]] == t and tok_of[e[1]] == t}
        sources, annotations = {}, {}
        for ext, ph in placeholders[t].items():
            labels[ext] = None
            edges.update(ph.edges)
            sources[ph.name] = ext
            if not ph.modifies:
                annotations[ph.name] = build(tok_of[ext])
        try:
            g = AsGraph(labels, edges, root_of[t], sources, annotations)
        except AsGraphError as exc:
            raise DecompositionError("annotation-conflict", f"token {t}: {exc}") from None
        kids = [(op, build(c), c) for c, op in children[t]]
        res, _ = combine(type_of(g), kids)
        if res is None:
            raise DecompositionError("annotation-conflict", f"operations at token {t} are not well-typed")
        graphs[t] = g
        subtree[t] = res
        active.discard(t)
        return res

    for t in sorted(frags):
        build(t)

    heads, ops, supertags = [], [], []
    for i in range(1, n + 1):
        supertags.append(graphs.get(i))
        if i == top:
            heads.append(0)
            ops.append(None)
        elif i in parent:
            heads.append(parent[i][0])
            ops.append(parent[i][1])
        else:
            heads.append(top)
            ops.append(IGNORE)
    tree = AmDepTree([Token(w, p) for w, p in zip(tokens, pos)], supertags, heads, ops)
    gold = AsGraph(amr.labels, set(amr.edges) - set(removed), amr.root)
    deco = check_well_typed(tree)
    if deco is None or deco[tree.root] is not EMPTY:
        raise DecompositionError("annotation-conflict", "the tree does not evaluate to a complete graph")
    try:
        result = evaluate(tree)
    except (AsGraphError, ValueError) as exc:
        raise DecompositionError("roundtrip", str(exc)) from None
    if not is_isomorphic(result, gold):
        raise DecompositionError("roundtrip", "evaluation differs from the input graph")
    lexical = {t: alignment.lexical.get(t, root_of[t]) for t in frags}
    return Decomposition(tree, lexical, gold, sorted(removed))
