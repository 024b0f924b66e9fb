"""Projective chart decoder over well-typed AM dependency trees.

A chart cell covers a span [i, k) and maps each head state to a vector of
scores indexed by the head token.  A head state is (type, pending): the type
reached so far and the operations of attached children that could not be
applied yet (for instance an APP_s child waiting until an o-argument that
requests s has been attached).  Modifiers are applied as soon as they can be;
applications branch, since applying one early can block a later modifier.
An item can serve as a dependent or as the goal only when nothing is pending.

Bottom (_|_) tokens are ordinary items of type _|_ and attach through IGNORE
to whichever head is adjacent, so every projective tree is reachable.

The forward pass stores scores only.  The best derivation is recovered
afterwards by re-deriving each item's score, which reproduces the forward
sums bit for bit.
"""

from __future__ import annotations

import time
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..amtypes import BOTTOM, IGNORE, AmType, EdgeOp, TypeLike, apply_type, modify_type, render_type
from .common import DecodeError, build_tree, finish, rank
from .scoretable import NEG_INF, ScoreTable

State = Tuple[TypeLike, tuple]  # (type, sorted pending (op, child type) pairs)

_RENDERED: Dict[TypeLike, str] = {}


def _sig_sort_key(sig):
    op, t = sig
    text = _RENDERED.get(t)
    if text is None:
        text = _RENDERED[t] = render_type(t)
    return (op.kind, op.source or "", text)


@lru_cache(maxsize=None)
def _occurrences(tau: AmType) -> frozenset:
    """(source, annotation) entries of `tau` at any depth.  Annotations of nested
    sources survive unchanged once an application lifts them to the top."""
    out = set()
    for name, ann in tau.items():
        out.add((name, ann))
        out |= _occurrences(ann)
    return frozenset(out)


def _viable(tau: AmType, pending) -> bool:
    """Every pending operation can still be discharged at some later point."""
    occ = _occurrences(tau)
    filled = set()
    for op, td in pending:
        if op.kind == "APP":
            # a source is filled at most once
            if op.source in filled or (op.source, td) not in occ:
                return False
            filled.add(op.source)
        else:
            for name, ann in td.items():
                if name != op.source and (name, ann) not in occ:
                    return False
    return True


def _closure(tau, pending, out, seen):
    # modifiers first: they never change the type, so applying early is safe
    # identical pending modifiers are discharged together, so a set suffices
    rest = []
    for sig in pending:
        op, td = sig
        if op.kind == "MOD" and (modify_type(tau, op.source, td) is not None or sig in rest):
            continue
        rest.append(sig)
    pending = tuple(rest)
    state = (tau, pending)
    if state in seen:
        return
    seen.add(state)
    if not _viable(tau, pending):
        return
    out[state] = None
    tried = set()
    for idx, (op, td) in enumerate(pending):
        if op.kind != "APP" or (op, td) in tried:
            continue
        tried.add((op, td))
        res = apply_type(tau, op.source, td)
        if res is not None:
            _closure(res, pending[:idx] + pending[idx + 1 :], out, seen)


class _Space:
    """Integer ids for states, types and operations, with memoized transitions."""

    def __init__(self, table: ScoreTable, k: int):
        self.table = table
        self.entries = table.entries(k)
        self.states: List[State] = []
        self.state_ids: Dict[State, int] = {}
        self.complete: List[bool] = []
        self.tau: List[TypeLike] = []
        self.ops: List[EdgeOp] = []
        self.op_ids: Dict[EdgeOp, int] = {}
        self.weights: List[np.ndarray] = []
        self.ops_cache: Dict[TypeLike, List[int]] = {}
        self.trans: Dict[Tuple[int, int, TypeLike], Tuple[int, ...]] = {}
        self.shapes: Dict[tuple, int] = {}
        self.plans: Dict[tuple, Optional[tuple]] = {}
        self.tables: Dict[Tuple[int, TypeLike], Dict[int, Tuple[int, ...]]] = {}

    def sid(self, state: State) -> int:
        found = self.state_ids.get(state)
        if found is None:
            found = self.state_ids[state] = len(self.states)
            self.states.append(state)
            self.complete.append(not state[1])
            self.tau.append(state[0])
        return found

    def op_id(self, op: EdgeOp) -> int:
        found = self.op_ids.get(op)
        if found is None:
            found = self.op_ids[op] = len(self.ops)
            self.ops.append(op)
            self.weights.append(self.table.edges + self.table.label_matrix(op))
        return found

    def ops_for(self, td: TypeLike) -> List[int]:
        found = self.ops_cache.get(td)
        if found is None:
            ops = [IGNORE] if td is BOTTOM else self.table.plausible_ops(td, self.entries)
            found = self.ops_cache[td] = [self.op_id(op) for op in ops]
        return found

    def advance(self, sid: int, oid: int, td: TypeLike) -> Tuple[int, ...]:
        key = (sid, oid, td)
        found = self.trans.get(key)
        if found is None:
            found = self.trans[key] = tuple(self.sid(s) for s in self._advance(sid, oid, td))
        return found

    def transitions(self, oid: int, td: TypeLike) -> Dict[int, Tuple[int, ...]]:
        found = self.tables.get((oid, td))
        if found is None:
            found = self.tables[(oid, td)] = {}
        return found

    def _advance(self, sid, oid, td):
        state = self.states[sid]
        op = self.ops[oid]
        tau, pending = state
        if op.kind == "IGNORE":
            return (state,) if td is BOTTOM else ()
        if tau is BOTTOM or td is BOTTOM:
            return ()
        out: Dict[State, None] = {}
        merged = tuple(sorted(pending + ((op, td),), key=_sig_sort_key))
        _closure(tau, merged, out, set())
        return tuple(out)


class _Cell:
    """Span [i, k): a score matrix with one row per head state and one column
    per head token i..k-1.

    While the cell is being filled its rows are indexed by global state id;
    `finish` keeps only the reachable rows.
    """

    __slots__ = ("i", "k", "index", "sids", "mat", "shape")

    def __init__(self, i: int, k: int, capacity: int):
        self.i = i
        self.k = k
        self.index: Dict[int, int] = {}
        self.sids: List[int] = []
        self.mat = np.full((max(capacity, 16), k - i), NEG_INF)
        self.shape = -1

    def reserve(self, top: int) -> None:
        size = len(self.mat)
        if top >= size:
            grown = np.full((max(2 * size, top + 1), self.k - self.i), NEG_INF)
            grown[:size] = self.mat
            self.mat = grown

    def finish(self, space: "_Space") -> None:
        keep = np.flatnonzero(self.mat.max(axis=1) > NEG_INF)
        self.mat = self.mat[keep]
        self.sids = keep.tolist()
        self.index = {sid: r for r, sid in enumerate(self.sids)}
        self.shape = space.shapes.setdefault(tuple(self.sids), len(space.shapes))

    def items(self):
        for r, sid in enumerate(self.sids):
            yield sid, self.mat[r]

    def row(self, sid: int) -> np.ndarray:
        return self.mat[self.index[sid]]

    def plan(self, space: "_Space", oid: int, td: TypeLike) -> Optional[tuple]:
        """How the head states here absorb an `oid` dependent of type `td`:
        parallel arrays of source rows and successor states."""
        key = (self.shape, oid, td)
        found = space.plans.get(key, False)
        if found is False:
            trans = space.transitions(oid, td)
            src, dst = [], []
            for r, sid in enumerate(self.sids):
                nexts = trans.get(sid)
                if nexts is None:
                    nexts = trans[sid] = space.advance(sid, oid, td)
                for ns in nexts:
                    src.append(r)
                    dst.append(ns)
            found = (np.array(src, dtype=np.intp), np.array(dst, dtype=np.intp)) if src else None
            space.plans[key] = found
        return found


def projective_decode(table: ScoreTable, k: int, deadline: Optional[float] = None):
    """Best projective well-typed tree using the k best supertags per token (plus _|_).

    `deadline` (a time.monotonic() value) aborts with TimeoutError, so callers
    can retry with a smaller k.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    n = table.n
    cands = {i: table.kbest(i, k) for i in range(1, n + 1)}
    space = _Space(table, k)

    cells: Dict[Tuple[int, int], _Cell] = {}
    for i in range(1, n + 1):
        sids = [space.sid((c.type, ())) for c in cands[i]]
        cell = cells[(i, i + 1)] = _Cell(i, i + 1, max(sids) + 1)
        for sid, c in zip(sids, cands[i]):
            cell.mat[sid, 0] = max(cell.mat[sid, 0], c.score)
        cell.finish(space)

    for width in range(2, n + 1):
        if deadline is not None and time.monotonic() > deadline:
            raise TimeoutError("projective decoding exceeded its deadline")
        for i in range(1, n - width + 2):
            k_ = i + width
            cell = cells[(i, k_)] = _Cell(i, k_, len(space.states))
            for j in range(i + 1, k_):
                _combine(cell, cells[(i, j)], cells[(j, k_)], j, space)
            cell.finish(space)

    top = cells[(1, n + 1)]
    best = None
    for sid, scores in top.items():
        if not space.complete[sid]:
            continue
        h = int(np.argmax(scores))
        tau = space.tau[sid]
        if best is None or rank(tau, scores[h]) > rank(best[1], best[2]):
            best = (sid, tau, float(scores[h]), h + 1)
    if best is None:
        raise DecodeError("no projective tree with finite score exists")

    chosen, heads, labels = {}, {}, {}
    root = best[3]
    heads[root], labels[root] = 0, None
    _unpack(cells, space, cands, best[0], root, chosen, heads, labels, n)
    tree = build_tree(table, chosen, heads, labels)
    items = sum(int(np.isfinite(c.mat).sum()) for c in cells.values())
    used = {sid for c in cells.values() for sid in c.sids}
    types = {space.tau[sid] for sid in used}
    return finish(table, tree, items=items, types=len(types), states=len(used))


def _combine(cell: _Cell, left: _Cell, right: _Cell, j: int, space: _Space) -> None:
    i, k = cell.i, cell.k
    complete, tau, weights = space.complete, space.tau, space.weights
    # head in the left span, dependent in the right span
    blocks, targets = [], []
    for r_sid, s_r in right.items():
        if complete[r_sid]:
            td = tau[r_sid]
            for oid in space.ops_for(td):
                plan = left.plan(space, oid, td)
                if plan is not None:
                    vec = (weights[oid][i:j, j:k] + s_r).max(axis=1)
                    blocks.append(left.mat[plan[0]] + vec)
                    targets.append(plan[1])
    if blocks:
        _scatter(cell, blocks, targets, 0, j - i)
    # head in the right span, dependent in the left span
    blocks, targets = [], []
    for l_sid, s_l in left.items():
        if complete[l_sid]:
            td = tau[l_sid]
            for oid in space.ops_for(td):
                plan = right.plan(space, oid, td)
                if plan is not None:
                    vec = (weights[oid][j:k, i:j] + s_l).max(axis=1)
                    blocks.append(right.mat[plan[0]] + vec)
                    targets.append(plan[1])
    if blocks:
        _scatter(cell, blocks, targets, j - i, k - i)


def _scatter(cell: _Cell, blocks, targets, lo: int, hi: int) -> None:
    """Max the candidate rows into the cell, grouped by successor state."""
    cand = np.concatenate(blocks)
    dst = np.concatenate(targets)
    order = np.argsort(dst, kind="stable")
    dst = dst[order]
    starts = np.flatnonzero(np.r_[True, dst[1:] != dst[:-1]])
    best = np.maximum.reduceat(cand[order], starts, axis=0)
    rows = dst[starts]
    cell.reserve(int(rows[-1]))
    cell.mat[rows, lo:hi] = np.maximum(cell.mat[rows, lo:hi], best)


def _unpack(cells, space: _Space, cands, sid, root, chosen, heads, labels, n) -> None:
    stack = [(1, n + 1, sid, root)]
    while stack:
        i, k, sid, h = stack.pop()
        target = cells[(i, k)].row(sid)[h - i]
        if k == i + 1:
            tau = space.tau[sid]
            chosen[h] = next(c for c in cands[h] if c.type is tau and c.score == target)
            continue
        found = _find_split(cells, space, i, k, sid, h, target)
        if found is None:
            raise DecodeError("chart backtrace failed")
        (li, lk, lsid, lh), (ri, rk, rsid, rh), head, dep, oid = found
        heads[dep] = head
        labels[dep] = space.ops[oid]
        stack.append((li, lk, lsid, lh))
        stack.append((ri, rk, rsid, rh))


def _find_split(cells, space: _Space, i, k, sid, h, target):
    """Recompute the forward sums for item (i, k, sid, h) and return the first
    combination that reproduces `target` exactly."""
    weights = space.weights
    for j in range(i + 1, k):
        left, right = cells[(i, j)], cells[(j, k)]
        if h < j:
            # h heads the left part; the dependent's subtree is the right part
            for r_sid, s_r in right.items():
                if not space.complete[r_sid]:
                    continue
                td = space.tau[r_sid]
                for oid in space.ops_for(td):
                    w = weights[oid][h, j:k] + s_r
                    best = w.max()
                    if best == NEG_INF:
                        continue
                    for l_sid, s_l in left.items():
                        if sid in space.advance(l_sid, oid, td) and s_l[h - i] + best == target:
                            dep = j + int(np.argmax(w))
                            return (i, j, l_sid, h), (j, k, r_sid, dep), h, dep, oid
        else:
            for l_sid, s_l in left.items():
                if not space.complete[l_sid]:
                    continue
                td = space.tau[l_sid]
                for oid in space.ops_for(td):
                    w = weights[oid][h, i:j] + s_l
                    best = w.max()
                    if best == NEG_INF:
                        continue
                    for r_sid, s_r in right.items():
                        if sid in space.advance(r_sid, oid, td) and s_r[h - j] + best == target:
                            dep = i + int(np.argmax(w))
                            return (i, j, l_sid, dep), (j, k, r_sid, h), h, dep, oid
    return None
