"""Type-unaware baseline: independent argmax choices on a maximum arborescence."""

from __future__ import annotations

from typing import Dict, List, Optional

from ..amdep import AmDepTree, combine
from ..amtypes import APP, IGNORE, MOD, EdgeOp, TypeLike
from .cle import cle_arborescence
from .common import SUBTREE_FALLBACK, build_tree, finish
from .scoretable import Candidate, NEG_INF, ScoreTable


def _op_universe(table: ScoreTable) -> List[EdgeOp]:
    ops = {op for op in table.listed_ops if op.kind != "IGNORE"}
    for row in table.supertags:
        for c in row:
            if c.is_bottom:
                continue
            for name, ann in c.type.items():
                ops.add(APP(name))
                ops.add(MOD(name))
                for inner, _ in ann.items():
                    ops.add(APP(inner))
    return sorted(ops)


def type_unaware_decode(table: ScoreTable, k: Optional[int] = None):
    """Argmax supertag per token and argmax label per skeleton edge, with no type
    checks; if the result is not well-typed, keep its largest well-typed subtree
    and turn every other token into _|_."""
    n = table.n
    skeleton = cle_arborescence(table.edges)
    chosen: Dict[int, Candidate] = {}
    for i in range(1, n + 1):
        cands = table.kbest(i, k)
        chosen[i] = max(cands, key=lambda c: c.score)  # first maximum wins
    universe = _op_universe(table)
    heads = dict(skeleton)
    labels: Dict[int, Optional[EdgeOp]] = {}
    for d, h in skeleton.items():
        if h == 0:
            labels[d] = None
        elif chosen[d].is_bottom:
            labels[d] = IGNORE
        else:
            labels[d] = max(universe, key=lambda op: table.label_score(op, h, d))
    tree = build_tree(table, chosen, heads, labels)

    types = _subtree_types(tree)
    if types[tree.root] is not None:
        return finish(table, tree)

    best = None
    for v in range(1, n + 1):
        if types[v] is None or tree.supertag(v) is None:
            continue
        members = _members(tree, v)
        score = sum(chosen[i].score for i in members)
        score += sum(table.arc_score(labels[i], heads[i], i) for i in members if i != v)
        key = (len(members), score)
        if best is None or key > best[0]:
            best = (key, v, members)
    if best is None:
        # nothing survives: everything becomes _|_ under the skeleton root
        v, members = tree.root, {tree.root}
    else:
        _, v, members = best
    for i in range(1, n + 1):
        if i not in members:
            chosen[i] = _bottom_of(table, i)
            heads[i] = v
            labels[i] = IGNORE
    if best is None:
        chosen[v] = _bottom_of(table, v)
    heads[v] = 0
    labels[v] = None
    out = build_tree(table, chosen, heads, labels)
    return finish(table, out, status=SUBTREE_FALLBACK)


def _bottom_of(table: ScoreTable, i: int) -> Candidate:
    for c in table.supertags[i - 1]:
        if c.is_bottom:
            return c
    return Candidate(None, NEG_INF)


def _subtree_types(tree: AmDepTree) -> Dict[int, Optional[TypeLike]]:
    """Type of each token's subtree, or None where some operation inside fails."""
    kids: Dict[int, List[int]] = {i: [] for i in range(len(tree) + 1)}
    for d, h in enumerate(tree.heads, start=1):
        kids[h].append(d)
    out: Dict[int, Optional[TypeLike]] = {}

    def visit(v):
        for c in kids[v]:
            visit(c)
        if any(out[c] is None for c in kids[v]):
            out[v] = None
            return
        children = [(tree.labels[c - 1], out[c], c) for c in kids[v]]
        res, _ = combine(tree.type_at(v), children)
        out[v] = res

    visit(tree.root)
    return out


def _members(tree: AmDepTree, v: int) -> set:
    found = {v}
    changed = True
    while changed:
        changed = False
        for d, h in enumerate(tree.heads, start=1):
            if h in found and d not in found:
                found.add(d)
                changed = True
    return found
