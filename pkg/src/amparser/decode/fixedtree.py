"""Fixed-tree decoder: label a maximum-arborescence skeleton with supertags and
operations so that the result is well-typed.

Items are (node, processed children C, type).  Children are added one at a
time in any order, each through an operation whose type-level result is
defined, so the cost per node is exponential only in its out-degree.
"""

from __future__ import annotations

from typing import Dict, List, Optional

from ..amtypes import BOTTOM, IGNORE, TypeLike, candidate_ops, op_result
from .cle import cle_arborescence
from .common import DecodeError, build_tree, finish, rank
from .scoretable import NEG_INF, ScoreTable


def fixed_tree_decode(
    table: ScoreTable,
    k: int,
    skeleton: Optional[Dict[int, int]] = None,
):
    if k < 1:
        raise ValueError("k must be at least 1")
    n = table.n
    if skeleton is None:
        skeleton = cle_arborescence(table.edges)
    kids: Dict[int, List[int]] = {i: [] for i in range(n + 1)}
    for d, h in sorted(skeleton.items()):
        kids[h].append(d)
    (root,) = kids[0]
    order: List[int] = []
    stack = [root]
    while stack:
        v = stack.pop()
        order.append(v)
        stack.extend(kids[v])

    cands = {i: table.kbest(i, k) for i in range(1, n + 1)}
    # complete[v] : type -> (score, (candidate index, final C-state key))
    complete: Dict[int, Dict[TypeLike, tuple]] = {}
    # chart[v] : (candidate index, C mask, type) -> (score, backpointer)
    chart: Dict[int, Dict[tuple, tuple]] = {}
    items = 0
    for v in reversed(order):
        ch = kids[v]
        d = len(ch)
        full = (1 << d) - 1
        layer: Dict[tuple, tuple] = {}
        for ci, c in enumerate(cands[v]):
            layer[(ci, 0, c.type)] = (c.score, None)
        by_size: List[List[tuple]] = [[] for _ in range(d + 1)]
        by_size[0] = list(layer)
        for size in range(d):
            for key in by_size[size]:
                ci, C, tau = key
                score = layer[key][0]
                for j, c in enumerate(ch):
                    if C & (1 << j):
                        continue
                    for td, (cs, _) in complete[c].items():
                        ops = [IGNORE] if td is BOTTOM else list(candidate_ops(tau, td))
                        for op in ops:
                            res = op_result(op, tau, td)
                            if res is None:
                                continue
                            w = table.arc_score(op, v, c)
                            if w == NEG_INF:
                                continue
                            nkey = (ci, C | (1 << j), res)
                            new = score + cs + w
                            old = layer.get(nkey)
                            if old is None:
                                by_size[size + 1].append(nkey)
                            if old is None or new > old[0]:
                                layer[nkey] = (new, (key, c, td, op))
        items += len(layer)
        chart[v] = layer
        done: Dict[TypeLike, tuple] = {}
        for key in by_size[d]:
            score = layer[key][0]
            tau = key[2]
            if tau not in done or score > done[tau][0]:
                done[tau] = (score, key)
        complete[v] = done

    if not complete[root]:
        raise DecodeError("no well-typed labeling of the skeleton exists")
    tau, (score, key) = max(complete[root].items(), key=lambda kv: rank(kv[0], kv[1][0]))
    chosen, heads, labels = {}, {root: 0}, {root: None}
    stack = [(root, key)]
    while stack:
        v, key = stack.pop()
        while True:
            bp = chart[v][key][1]
            if bp is None:
                chosen[v] = cands[v][key[0]]
                break
            prev, c, td, op = bp
            heads[c] = v
            labels[c] = op
            stack.append((c, complete[c][td][1]))
            key = prev
    tree = build_tree(table, chosen, heads, labels)
    return finish(table, tree, items=items)
