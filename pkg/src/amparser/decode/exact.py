"""Exponential exact decoder (an oracle for testing the approximate decoders).

Dynamic programming over (root token, token subset).  A partial state at a
head records its chosen supertag and the multiset of (operation, child type)
pairs attached so far; the head's type is only resolved once the subtree is
complete, so no operation order is ever fixed prematurely.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from ..amdep import resolve
from ..amtypes import BOTTOM, IGNORE, EdgeOp, TypeLike, occurs_in
from .common import GuardError, build_tree, finish, rank
from .scoretable import NEG_INF, ScoreTable

DEFAULT_GUARD = 10


class _Ops:
    """Cached finite-scored operations for (head, dependent, dependent type)."""

    def __init__(self, table: ScoreTable, k: Optional[int]):
        self.table = table
        self.entries = table.entries(k)
        self.cache: Dict[tuple, List[Tuple[EdgeOp, float]]] = {}

    def __call__(self, h: int, d: int, td: TypeLike) -> List[Tuple[EdgeOp, float]]:
        key = (h, d, td)
        found = self.cache.get(key)
        if found is None:
            ops = [IGNORE] if td is BOTTOM else self.table.plausible_ops(td, self.entries)
            found = []
            for op in ops:
                w = self.table.arc_score(op, h, d)
                if w > NEG_INF:
                    found.append((op, w))
            self.cache[key] = found
        return found


class _Sigs:
    """Interns (op, child type) signatures as small integers; a multiset of
    signatures is a sorted tuple of ids."""

    def __init__(self):
        self.ids: Dict[tuple, int] = {}
        self.sigs: List[tuple] = []
        self.ok: Dict[tuple, bool] = {}

    def id(self, sig) -> int:
        found = self.ids.get(sig)
        if found is None:
            found = self.ids[sig] = len(self.sigs)
            self.sigs.append(sig)
        return found

    def decode(self, ids: tuple) -> tuple:
        return tuple(self.sigs[i] for i in ids)

    def usable(self, t0: TypeLike, sid: int) -> bool:
        """Whether a head whose supertag has type t0 could ever discharge `sid`."""
        key = (t0, sid)
        found = self.ok.get(key)
        if found is None:
            op, td = self.sigs[sid]
            if op.kind == "IGNORE":
                found = True
            elif t0 is BOTTOM:
                found = False
            elif op.kind == "APP":
                found = op.source in t0 and t0[op.source] is td or (
                    op.source not in t0 and occurs_in(t0, op.source)
                )
            else:
                found = all(
                    name == op.source or name in t0 or occurs_in(t0, name) for name, _ in td.items()
                )
            self.ok[key] = found
        return found

    def add(self, ids: tuple, sid: int) -> Optional[tuple]:
        """Multiset union, or None when an APP source would be filled twice
        (impossible: a filled source is never reintroduced)."""
        op = self.sigs[sid][0]
        if op.kind == "APP":
            for other in ids:
                o = self.sigs[other][0]
                if o.kind == "APP" and o.source == op.source:
                    return None
        return tuple(sorted(ids + (sid,)))


def exact_decode(
    table: ScoreTable,
    k: Optional[int] = None,
    skeleton: Optional[Dict[int, int]] = None,
    guard_n: int = DEFAULT_GUARD,
):
    """Best-scoring well-typed tree over all trees and all k-best supertag
    choices (all candidates when k is None).

    With `skeleton` (dependent -> head, head 0 for the root token) the
    unlabeled tree is fixed and only supertags and labels are searched.
    """
    n = table.n
    if n > guard_n:
        raise GuardError(f"exact decoding is limited to n <= {guard_n} (got n={n})")
    cands = {i: table.kbest(i, k) for i in range(1, n + 1)}
    ops = _Ops(table, k)
    sigs = _Sigs()
    if skeleton is not None:
        return _decode_skeleton(table, cands, ops, sigs, skeleton)

    full = (1 << n) - 1
    # complete[(c, mask)] : type -> (score, backpointer)
    complete: Dict[Tuple[int, int], Dict[TypeLike, tuple]] = {}
    # partial[(r, mask)] : (cand index, sigs) -> (score, backpointer)
    partial: Dict[Tuple[int, int], Dict[tuple, tuple]] = {}
    masks = sorted(range(1, full + 1), key=lambda m: (bin(m).count("1"), m))
    items = 0
    for mask in masks:
        for r in range(1, n + 1):
            rbit = 1 << (r - 1)
            if not mask & rbit:
                continue
            states: Dict[tuple, tuple] = {}
            rest = mask & ~rbit
            if rest == 0:
                for ci, c in enumerate(cands[r]):
                    states[(ci, ())] = (c.score, None)
            else:
                low = rest & -rest
                sub = rest
                while sub:
                    if sub & low:
                        _extend(states, partial.get((r, mask & ~sub)), sub, r, n, complete, ops, sigs, cands[r])
                    sub = (sub - 1) & rest
            if not states:
                continue
            partial[(r, mask)] = states
            done: Dict[TypeLike, tuple] = {}
            for key, (score, _) in states.items():
                ci, ids = key
                res, _ = resolve(cands[r][ci].type, sigs.decode(ids))
                if res is None:
                    continue
                prev = done.get(res)
                if prev is None or score > prev[0]:
                    done[res] = (score, key)
            if done:
                complete[(r, mask)] = done
            items += len(states)

    best = None
    for r in range(1, n + 1):
        for t, (score, key) in complete.get((r, full), {}).items():
            if best is None or rank(t, score) > rank(best[1], best[2]):
                best = (r, t, score, key)
    if best is None:
        raise GuardError("no tree with finite score exists")
    r, _, _, key = best
    chosen, heads, labels = {}, {r: 0}, {r: None}
    _unpack(r, full, key, partial, complete, cands, chosen, heads, labels)
    tree = build_tree(table, chosen, heads, labels)
    return finish(table, tree, items=items)


def _extend(states, prev_states, sub, r, n, complete, ops, sigs, head_cands):
    if not prev_states:
        return
    for c in range(1, n + 1):
        if not sub & (1 << (c - 1)):
            continue
        child = complete.get((c, sub))
        if not child:
            continue
        for td, (cs, _) in child.items():
            for op, w in ops(r, c, td):
                sid = sigs.id((op, td))
                gain = cs + w
                for key, (ps, _) in prev_states.items():
                    ci, ids = key
                    if not sigs.usable(head_cands[ci].type, sid):
                        continue
                    merged = sigs.add(ids, sid)
                    if merged is None:
                        continue
                    nkey = (ci, merged)
                    score = ps + gain
                    old = states.get(nkey)
                    if old is None or score > old[0]:
                        states[nkey] = (score, (key, c, sub, td, op))


def _unpack(r, mask, key, partial, complete, cands, chosen, heads, labels):
    """Follow backpointers from partial[(r, mask)][key]."""
    while True:
        _, bp = partial[(r, mask)][key]
        if bp is None:
            chosen[r] = cands[r][key[0]]
            return
        prev_key, c, sub, td, op = bp
        heads[c] = r
        labels[c] = op
        ckey = complete[(c, sub)][td][1]
        _unpack(c, sub, ckey, partial, complete, cands, chosen, heads, labels)
        key, mask = prev_key, mask & ~sub


def _decode_skeleton(table, cands, ops, sigs, skeleton):
    n = table.n
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
    complete: Dict[int, Dict[TypeLike, tuple]] = {}
    items = 0
    for v in reversed(order):
        states = {(ci, ()): (c.score, ()) for ci, c in enumerate(cands[v])}
        for c in kids[v]:
            nxt: Dict[tuple, tuple] = {}
            for td, (cs, _) in complete[c].items():
                for op, w in ops(v, c, td):
                    sid = sigs.id((op, td))
                    for key, (ps, trail) in states.items():
                        if not sigs.usable(cands[v][key[0]].type, sid):
                            continue
                        merged = sigs.add(key[1], sid)
                        if merged is None:
                            continue
                        nkey = (key[0], merged)
                        score = ps + cs + w
                        old = nxt.get(nkey)
                        if old is None or score > old[0]:
                            nxt[nkey] = (score, trail + ((c, td, op),))
            states = nxt
            items += len(states)
        done: Dict[TypeLike, tuple] = {}
        for key, (score, trail) in states.items():
            res, _ = resolve(cands[v][key[0]].type, sigs.decode(key[1]))
            if res is None:
                continue
            prev = done.get(res)
            if prev is None or score > prev[0]:
                done[res] = (score, (key[0], trail))
        complete[v] = done
    if not complete[root]:
        raise GuardError("no well-typed labeling of the skeleton exists")
    t, (score, bp) = max(complete[root].items(), key=lambda kv: rank(kv[0], kv[1][0]))
    chosen, heads, labels = {}, {root: 0}, {root: None}
    stack = [(root, t)]
    while stack:
        v, tv = stack.pop()
        ci, trail = complete[v][tv][1]
        chosen[v] = cands[v][ci]
        for c, td, op in trail:
            heads[c] = v
            labels[c] = op
            stack.append((c, td))
    tree = build_tree(table, chosen, heads, labels)
    return finish(table, tree, items=items)
