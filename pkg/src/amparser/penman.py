"""PENMAN reading and canonical writing, with optional as-graph decorations.

Node decorations follow the variable: ``(u<root> / want :ARG0 (v<s>))``.
A decoration is a comma-separated list of ``root`` and source entries
``name`` or ``name(TYPE)``.  Bare tokens that are not variables are
constants and become labeled leaf nodes.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

# relations whose name ends in -of but which are not inverses
NON_INVERSE = {"consist-of", "prep-out-of", "prep-on-behalf-of"}

_CONSTANT_RE = re.compile(r'^(".*"|[+-]|-?\d+(\.\d+)?|\d+/\d+)$')


class PenmanSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


def is_constant_label(label: Optional[str]) -> bool:
    return label is not None and bool(_CONSTANT_RE.match(label))


def invert_role(role: str) -> Tuple[str, bool]:
    """Map a written role to (normalized label, inverted?)."""
    if role.endswith("-of") and role not in NON_INVERSE:
        return role[:-3], True
    return role, False


@dataclass
class RawGraph:
    """Parser output before as-graph validation; node ids are ints."""

    labels: Dict[int, Optional[str]] = field(default_factory=dict)
    edges: List[Tuple[int, int, str]] = field(default_factory=list)
    top: int = 0
    root: Optional[int] = None
    sources: Dict[str, Tuple[int, Optional[str]]] = field(default_factory=dict)
    variables: Dict[int, str] = field(default_factory=dict)


_TOKEN_RE = re.compile(
    r'\s*(?:(?P<lp>\()|(?P<rp>\))|(?P<slash>/)|(?P<role>:[^\s()"<>]*)|(?P<str>"(?:[^"\\]|\\.)*")'
    r"|(?P<decor><[^<>]*>)|(?P<sym>[^\s()/:\"<>]+))"
)


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise PenmanSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return out


def _split_decoration(body: str) -> List[str]:
    parts, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    parts.append("".join(cur).strip())
    return [p for p in parts if p]


def parse_penman(text: str, decorations: bool = True) -> RawGraph:
    tokens = _tokenize(text)
    if not tokens:
        raise PenmanSyntaxError("empty input", 0)
    defined = {}
    for idx, (kind, value, pos) in enumerate(tokens):
        if kind == "lp":
            if idx + 1 >= len(tokens) or tokens[idx + 1][0] != "sym":
                raise PenmanSyntaxError("expected variable after '('", pos)
            var = tokens[idx + 1][1]
            if var in defined:
                raise PenmanSyntaxError(f"variable {var!r} defined twice", tokens[idx + 1][2])
            defined[var] = len(defined)

    g = RawGraph()
    state = {"i": 0, "next": len(defined)}

    def peek():
        return tokens[state["i"]] if state["i"] < len(tokens) else (None, None, len(text))

    def take(expected=None):
        tok = peek()
        if tok[0] is None:
            raise PenmanSyntaxError("unexpected end of input", len(text))
        if expected and tok[0] != expected:
            raise PenmanSyntaxError(f"expected {expected}, got {tok[1]!r}", tok[2])
        state["i"] += 1
        return tok

    def parse_node() -> int:
        take("lp")
        _, var, vpos = take("sym")
        nid = defined[var]
        g.variables[nid] = var
        g.labels[nid] = None
        if peek()[0] == "decor":
            _, decor, dpos = take()
            if not decorations:
                raise PenmanSyntaxError("decorations are not allowed here", dpos)
            _apply_decoration(g, nid, decor[1:-1], dpos)
        if peek()[0] == "slash":
            take()
            kind, label, lpos = take()
            if kind not in ("sym", "str"):
                raise PenmanSyntaxError("expected concept label", lpos)
            g.labels[nid] = label
        while peek()[0] == "role":
            _, role, rpos = take()
            role = role[1:]
            if not role:
                raise PenmanSyntaxError("empty role", rpos)
            kind, value, pos = peek()
            if kind == "lp":
                target = parse_node()
            elif kind == "sym" and value in defined:
                take()
                target = defined[value]
            elif kind in ("sym", "str"):
                take()
                target = state["next"]
                state["next"] += 1
                g.labels[target] = value
            else:
                raise PenmanSyntaxError(f"expected target after :{role}", pos)
            label, inverted = invert_role(role)
            g.edges.append((target, nid, label) if inverted else (nid, target, label))
        take("rp")
        return nid

    g.top = parse_node()
    if peek()[0] is not None:
        raise PenmanSyntaxError("trailing input after graph", peek()[2])
    for var, nid in defined.items():
        if nid not in g.labels:
            raise PenmanSyntaxError(f"variable {var!r} is referenced but never defined", 0)
    return g


def _apply_decoration(g: RawGraph, nid: int, body: str, pos: int) -> None:
    for item in _split_decoration(body):
        if item == "root":
            if g.root is not None:
                raise PenmanSyntaxError("multiple <root> decorations", pos)
            g.root = nid
            continue
        m = re.match(r"^([A-Za-z0-9]+)\s*(\(.*\))?$", item)
        if not m:
            raise PenmanSyntaxError(f"bad decoration entry {item!r}", pos)
        name = m.group(1)
        if name in g.sources:
            raise PenmanSyntaxError(f"duplicate source name {name!r}", pos)
        g.sources[name] = (nid, m.group(2))


# --- writing ----------------------------------------------------------------


def _var_prefix(label: Optional[str]) -> str:
    if label is None:
        return "s"
    for ch in label:
        if ch.isalpha() and ch.isascii():
            return ch.lower()
    return "x"


class _Writer:
    def __init__(self, labels, edges, decorate):
        self.labels = labels
        self.decorate = decorate  # node -> decoration string or ""
        self.out_edges: Dict[int, List[Tuple[str, int, int]]] = {n: [] for n in labels}
        self.in_edges: Dict[int, List[Tuple[str, int, int]]] = {n: [] for n in labels}
        for idx, (s, t, lab) in enumerate(sorted(edges, key=lambda e: (e[2], e[0], e[1]))):
            self.out_edges[s].append((lab, t, idx))
            self.in_edges[t].append((lab + "-of", s, idx))
        self.degree = {n: len(self.out_edges[n]) + len(self.in_edges[n]) for n in labels}

    def bare_constant(self, node: int) -> bool:
        return (
            is_constant_label(self.labels[node])
            and not self.decorate(node)
            and not self.out_edges[node]
            and self.degree[node] == 1
        )

    def write(self, root: int) -> str:
        state = ({}, {}, set())
        return self._node(root, state, top=True)

    def _node(self, node, state, top=False) -> str:
        varmap, counters, done = state
        if node in varmap:
            return varmap[node]
        if not top and self.bare_constant(node):
            varmap[node] = self.labels[node]
            return self.labels[node]
        prefix = _var_prefix(self.labels[node])
        counters[prefix] = counters.get(prefix, 0) + 1
        var = f"{prefix}{counters[prefix]}"
        varmap[node] = var
        parts = [var + self.decorate(node)]
        if self.labels[node] is not None:
            parts.append(" / " + self.labels[node])
        pending = []
        for c in self.out_edges[node] + self.in_edges[node]:
            if c[2] not in done:
                done.add(c[2])
                pending.append(c)
        while pending:
            if len(pending) == 1:
                best = pending[0]
            else:
                best = min(pending, key=lambda c: (c[0], self._trial(c[1], state)))
            pending.remove(best)
            parts.append(f" :{best[0]} " + self._node(best[1], state))
        return "(" + "".join(parts) + ")"

    def _trial(self, node, state) -> str:
        varmap, counters, done = state
        return self._node(node, (dict(varmap), dict(counters), set(done)))


def write_penman(labels, edges, root, decorate=None) -> str:
    decorate = decorate or (lambda n: "")
    return _Writer(labels, edges, decorate).write(root)
