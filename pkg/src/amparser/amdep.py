"""AM dependency trees, indexed AM terms, and their evaluation."""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .amtypes import (
    BOTTOM,
    EdgeOp,
    TypeLike,
    apply_type,
    modify_type,
)
from .asgraph import AsGraph, apply, modify, parse_asgraph, render_asgraph, type_of


class TreeStructureError(ValueError):
    pass


class NotWellTyped(ValueError):
    pass


class TreebankFormatError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class Token:
    form: str
    pos: str = "_"


@dataclass
class AmDepTree:
    """Tokens 1..n, a supertag per token (None is the bottom constant), and
    for each token its head (0 for the ROOT token) and incoming edge label."""

    tokens: List[Token]
    supertags: List[Optional[AsGraph]]
    heads: List[int]
    labels: List[Optional[EdgeOp]]
    lexlabels: List[Optional[str]] = field(default_factory=list)
    meta: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.lexlabels:
            self.lexlabels = [None] * len(self.tokens)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def root(self) -> int:
        roots = [i + 1 for i, h in enumerate(self.heads) if h == 0]
        if len(roots) != 1:
            raise TreeStructureError(f"expected exactly one ROOT token, found {len(roots)}")
        return roots[0]

    def supertag(self, i: int) -> Optional[AsGraph]:
        return self.supertags[i - 1]

    def children(self, i: int) -> List[Tuple[int, EdgeOp]]:
        return [(k + 1, self.labels[k]) for k, h in enumerate(self.heads) if h == i]

    def edges(self) -> List[Tuple[int, int, EdgeOp]]:
        return [(h, k + 1, self.labels[k]) for k, h in enumerate(self.heads) if h != 0]

    def type_at(self, i: int) -> TypeLike:
        g = self.supertags[i - 1]
        return BOTTOM if g is None else type_of(g)


def validate_structure(t: AmDepTree) -> None:
    n = len(t.tokens)
    for name in ("supertags", "heads", "labels", "lexlabels"):
        if len(getattr(t, name)) != n:
            raise TreeStructureError(f"{name} has length {len(getattr(t, name))}, expected {n}")
    if n == 0:
        raise TreeStructureError("empty tree")
    root = t.root
    for k in range(1, n + 1):
        h = t.heads[k - 1]
        lab = t.labels[k - 1]
        if h < 0 or h > n or h == k:
            raise TreeStructureError(f"token {k} has invalid head {h}")
        if h == 0:
            if lab is not None:
                raise TreeStructureError(f"ROOT token {k} carries edge label {lab}")
            continue
        if lab is None:
            raise TreeStructureError(f"token {k} has a head but no edge label")
        is_bottom = t.supertags[k - 1] is None
        if lab.kind == "IGNORE" and not is_bottom:
            raise TreeStructureError(f"IGNORE edge into non-bottom token {k}")
        if lab.kind != "IGNORE" and is_bottom:
            raise TreeStructureError(f"{lab} edge into bottom token {k}")
    for k in range(1, n + 1):
        seen = set()
        cur = k
        while cur != root:
            if cur in seen:
                raise TreeStructureError(f"cycle through token {k}")
            seen.add(cur)
            cur = t.heads[cur - 1]
            if cur == 0:
                raise TreeStructureError(f"token {k} does not reach the root")


Child = Tuple[EdgeOp, TypeLike, int]
Signature = Tuple[Tuple[EdgeOp, TypeLike], ...]


def _step(state, op: EdgeOp, ctype):
    if op.kind == "MOD":
        return modify_type(state, op.source, ctype)
    return apply_type(state, op.source, ctype)


def _search(t0, sigs: Signature, rng: Optional[random.Random]):
    """Depth-first search for a valid order of the APP/MOD operations in `sigs`.

    Applicable modifiers are always taken immediately: MOD leaves the head
    type unchanged, so taking it early never blocks a later step.  With
    `rng` every operation is a branching choice, tried in random order.
    """
    failed = set()

    def dfs(state, remaining: Tuple[int, ...]):
        if not remaining:
            return state, ()
        key = (state, remaining)
        if key in failed:
            return None
        for pos, idx in enumerate(remaining):
            op, ctype = sigs[idx]
            if op.kind == "MOD" and rng is None:
                res = _step(state, op, ctype)
                if res is not None:
                    found = dfs(res, remaining[:pos] + remaining[pos + 1 :])
                    if found is None:
                        break
                    return found[0], (idx,) + found[1]
        else:
            if rng is None:
                choices = [p for p, idx in enumerate(remaining) if sigs[idx][0].kind == "APP"]
            else:
                choices = list(range(len(remaining)))
                rng.shuffle(choices)
            for pos in choices:
                idx = remaining[pos]
                op, ctype = sigs[idx]
                res = _step(state, op, ctype)
                if res is None:
                    continue
                found = dfs(res, remaining[:pos] + remaining[pos + 1 :])
                if found is not None:
                    return found[0], (idx,) + found[1]
        failed.add(key)
        return None

    return dfs(t0, tuple(range(len(sigs))))


@lru_cache(maxsize=200_000)
def resolve(t0: TypeLike, sigs: Signature):
    """Result type and operation order for a head of type `t0` whose children
    have the (op, child type) signatures `sigs`, listed in token order.

    Returns (type, order) with `order` a tuple of indices into the APP/MOD
    entries of `sigs`, or (None, None) if no valid order exists.  The search
    prefers modifiers first and then applications by token position, so the
    returned order is the canonical one.
    """
    ops = []
    for op, ctype in sigs:
        if op.kind == "IGNORE":
            if ctype is not BOTTOM:
                return None, None
        elif t0 is BOTTOM or ctype is BOTTOM:
            return None, None
        else:
            ops.append((op, ctype))
    if t0 is BOTTOM:
        return BOTTOM, ()
    found = _search(t0, tuple(ops), None)
    if found is None:
        return None, None
    return found


def combine(t0: TypeLike, children: Sequence[Child], rng: Optional[random.Random] = None):
    """Type of a head with type `t0` after attaching `children`.

    Returns (type, order) where `order` lists the APP/MOD children in a valid
    evaluation order, or (None, None) if no order is valid.  With `rng` the
    search visits applications in random order, which samples alternative
    valid orders.
    """
    children = sorted(children, key=lambda c: c[2])
    sigs = tuple((op, ctype) for op, ctype, _ in children)
    active = [c for c in children if c[0].kind != "IGNORE"]
    if rng is None:
        res, order = resolve(t0, sigs)
    else:
        res, order = resolve(t0, sigs)
        if res is not None and res is not BOTTOM:
            found = _search(t0, tuple((op, ct) for op, ct, _ in active), rng)
            res, order = found if found is not None else (None, None)
    if res is None:
        return None, None
    return res, [active[i] for i in order]


def _postorder(t: AmDepTree) -> List[int]:
    kids: Dict[int, List[int]] = {i: [] for i in range(len(t) + 1)}
    for k, h in enumerate(t.heads):
        kids[h].append(k + 1)
    out = []
    stack = [(t.root, False)]
    while stack:
        node, done = stack.pop()
        if done:
            out.append(node)
            continue
        stack.append((node, True))
        for c in reversed(kids[node]):
            stack.append((c, False))
    return out


def check_well_typed(t: AmDepTree) -> Optional[Dict[int, TypeLike]]:
    """Per-token subtree types if the tree represents a well-typed term, else None.

    Structural violations raise TreeStructureError.
    """
    validate_structure(t)
    deco: Dict[int, TypeLike] = {}
    for node in _postorder(t):
        children = [(op, deco[c], c) for c, op in t.children(node)]
        res, _ = combine(t.type_at(node), children)
        if res is None:
            return None
        deco[node] = res
    return deco


# --- terms ----------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    graph: AsGraph
    index: int

    @property
    def head(self) -> int:
        return self.index


@dataclass(frozen=True)
class OpTerm:
    op: EdgeOp
    left: "Term"
    right: "Term"

    @property
    def head(self) -> int:
        return self.left.head

    @property
    def dep(self) -> int:
        return self.right.head

    def __str__(self) -> str:
        return f"{self.op}[{self.head},{self.dep}]"


Term = Union[Const, OpTerm]


def term_from_deptree(t: AmDepTree, rng: Optional[random.Random] = None) -> Term:
    """The canonical indexed AM term of a well-typed tree (IGNORE edges skipped).

    With `rng`, a randomly chosen valid operation order is used instead.
    """
    validate_structure(t)
    if t.supertag(t.root) is None:
        raise NotWellTyped("the ROOT token carries the bottom constant")
    types: Dict[int, TypeLike] = {}
    terms: Dict[int, Term] = {}
    for node in _postorder(t):
        children = [(op, types[c], c) for c, op in t.children(node)]
        res, order = combine(t.type_at(node), children, rng)
        if res is None:
            raise NotWellTyped(f"operations at token {node} are not well-typed")
        types[node] = res
        if res is BOTTOM:
            continue
        term: Term = Const(t.supertag(node), node)
        for op, _, c in order:
            term = OpTerm(op, term, terms[c])
        terms[node] = term
    return terms[t.root]


def eval_term(term: Term) -> AsGraph:
    if isinstance(term, Const):
        return term.graph
    left = eval_term(term.left)
    right = eval_term(term.right)
    if term.op.kind == "APP":
        return apply(left, term.op.source, right)
    if term.op.kind == "MOD":
        return modify(left, term.op.source, right)
    raise NotWellTyped("IGNORE cannot appear inside a term")


def evaluate(t: AmDepTree) -> AsGraph:
    return eval_term(term_from_deptree(t))


def term_order(term: Term) -> List[str]:
    """Operations of a term in bottom-up evaluation order, e.g. ['MOD_m[5,6]', ...]."""
    if isinstance(term, Const):
        return []
    return term_order(term.left) + term_order(term.right) + [str(term)]


# --- treebank format ------------------------------------------------------------


def write_treebank(trees: Sequence[AmDepTree]) -> str:
    blocks = []
    for t in trees:
        lines = [f"# ::{k} {v}" for k, v in t.meta.items()]
        for i in range(1, len(t) + 1):
            g = t.supertag(i)
            lab = t.labels[i - 1]
            lex = t.lexlabels[i - 1]
            row = [
                str(i),
                t.tokens[i - 1].form,
                t.tokens[i - 1].pos,
                "_|_" if g is None else render_asgraph(g),
                "_" if lex is None else lex,
                str(t.heads[i - 1]),
                "ROOT" if lab is None else str(lab),
            ]
            lines.append("\t".join(row))
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def read_treebank(text: str) -> List[AmDepTree]:
    trees = []
    rows: List[Tuple[int, List[str]]] = []
    meta: Dict[str, str] = {}

    def flush():
        if rows:
            trees.append(_build_tree(rows, meta))
        rows.clear()

    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            flush()
            meta = {}
            continue
        if line.startswith("#"):
            if rows:
                raise TreebankFormatError("comment inside a sentence block", lineno)
            body = line[1:].strip()
            if body.startswith("::"):
                key, _, value = body[2:].partition(" ")
                meta[key] = value
            continue
        cols = line.split("\t")
        if len(cols) != 7:
            raise TreebankFormatError(f"expected 7 columns, found {len(cols)}", lineno)
        rows.append((lineno, cols))
    flush()
    return trees


def _build_tree(rows, meta) -> AmDepTree:
    n = len(rows)
    tokens, supertags, heads, labels, lexlabels = [], [], [], [], []
    for expected, (lineno, cols) in enumerate(rows, start=1):
        tid, form, pos, st, lex, head, lab = cols
        if tid != str(expected):
            raise TreebankFormatError(f"expected token id {expected}, found {tid!r}", lineno)
        tokens.append(Token(form, pos))
        try:
            supertags.append(None if st == "_|_" else parse_asgraph(st))
        except ValueError as exc:
            raise TreebankFormatError(f"bad supertag: {exc}", lineno) from None
        lexlabels.append(None if lex == "_" else lex)
        try:
            h = int(head)
        except ValueError:
            raise TreebankFormatError(f"non-integer head {head!r}", lineno) from None
        if h < 0 or h > n:
            raise TreebankFormatError(f"head {h} outside sentence of length {n}", lineno)
        heads.append(h)
        if lab == "ROOT":
            if h != 0:
                raise TreebankFormatError("ROOT label on a token with a head", lineno)
            labels.append(None)
        else:
            try:
                labels.append(EdgeOp.parse(lab))
            except ValueError as exc:
                raise TreebankFormatError(str(exc), lineno) from None
    tree = AmDepTree(tokens, supertags, heads, labels, lexlabels, dict(meta))
    try:
        validate_structure(tree)
    except TreeStructureError as exc:
        raise TreebankFormatError(str(exc), rows[0][0]) from None
    return tree
