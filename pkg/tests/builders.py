"""Shared fixtures and random generators for the test suite.

The random builders take a `Chooser`, so the same code backs both the
seeded loops of the acceptance tests and the hypothesis strategies.
"""

from __future__ import annotations

import random
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from hypothesis import strategies as st

import amparser
from amparser.amdep import AmDepTree, Token
from amparser.amtypes import APP, IGNORE, MOD, EMPTY, AmType, parse_type
from amparser.asgraph import AsGraph, parse_asgraph

DATA = Path(amparser.__file__).parent / "data"

CONSTANTS = {
    "writer": "(p<root> / person :ARG0-of (w / write))",
    "want": "(u<root> / want :ARG0 (v<s>) :ARG1 (w<o(s)>))",
    "sleep": "(x<root> / sleep :ARG0 (y<s>))",
    "sound": "(s1<root> / sound :manner-of (s2<m>))",
}

WORKED_AMR = "(w / want :ARG0 (p / person :ARG0-of (wr / write)) :ARG1 (sl / sleep :ARG0 p :manner (so / sound)))"

SENTENCE = "the writer wants to sleep soundly".split()


def constants() -> Dict[str, AsGraph]:
    return {k: parse_asgraph(v) for k, v in CONSTANTS.items()}


def worked_tree() -> AmDepTree:
    g = constants()
    return AmDepTree(
        [Token(w) for w in SENTENCE],
        [None, g["writer"], g["want"], None, g["sleep"], g["sound"]],
        [2, 3, 0, 3, 3, 5],
        [IGNORE, APP("s"), None, IGNORE, APP("o"), MOD("m")],
    )


# --- choosers -------------------------------------------------------------------


class Chooser:
    """Minimal interface over a source of random decisions."""

    def integer(self, lo: int, hi: int) -> int:
        raise NotImplementedError

    def choice(self, seq: Sequence):
        return seq[self.integer(0, len(seq) - 1)]

    def coin(self, p: float = 0.5) -> bool:
        return self.integer(0, 999) < int(p * 1000)


class RandomChooser(Chooser):
    def __init__(self, rng: random.Random):
        self.rng = rng

    def integer(self, lo: int, hi: int) -> int:
        return self.rng.randint(lo, hi)


class DrawChooser(Chooser):
    def __init__(self, draw):
        self.draw = draw

    def integer(self, lo: int, hi: int) -> int:
        return self.draw(st.integers(lo, hi))


# --- random as-graphs -----------------------------------------------------------

NAMES = ["s", "o", "m", "o2"]
LABELS = ["a", "b", "c"]
ROLES = ["ARG0", "ARG1", "mod"]
ANNOTATIONS = ["()", "()", "()", "(s)", "(o)", "(s, o)", "(o(s), s)"]


def random_asgraph(ch: Chooser, want: Optional[AmType] = None, forbid_labeled_sources: bool = False) -> AsGraph:
    """A small connected as-graph.  With `want`, its sources and annotations
    are exactly the entries of that type."""
    size = ch.integer(1, 3)
    labels: Dict[int, Optional[str]] = {i: ch.choice(LABELS) for i in range(size)}
    edges = set()
    for j in range(1, size):
        other = ch.integer(0, j - 1)
        pair = (other, j) if ch.coin() else (j, other)
        edges.add(pair + (ch.choice(ROLES),))
    if want is None:
        count = ch.integer(0, 3)
        names = []
        for _ in range(count):
            name = ch.choice(NAMES)
            if name not in names:
                names.append(name)
        entries = {}
        for name in names:
            ann = parse_type(ch.choice(ANNOTATIONS))
            entries[name] = EMPTY if name in ann or any(name in a for _, a in ann.items()) else ann
    else:
        entries = dict(want.items())
    sources: Dict[str, int] = {}
    taken = {0}  # the root never carries a source
    for name in entries:
        free = [v for v in range(size) if v not in taken]
        if free and not forbid_labeled_sources and ch.coin(0.2):
            node = ch.choice(free)
        else:
            node = len(labels)
            labels[node] = None
            anchor = ch.integer(0, size - 1)
            pair = (anchor, node) if ch.coin(0.8) else (node, anchor)
            edges.add(pair + (ch.choice(ROLES),))
        taken.add(node)
        sources[name] = node
    annotations = {k: v for k, v in entries.items() if v is not EMPTY}
    return AsGraph(labels, edges, 0, sources, annotations)


@st.composite
def asgraphs(draw, want: Optional[AmType] = None, forbid_labeled_sources: bool = False) -> AsGraph:
    return random_asgraph(DrawChooser(draw), want, forbid_labeled_sources)


def plain_graph(g: AsGraph) -> AsGraph:
    """The graph without sources, every node labeled."""
    labels = {n: ("thing" if lab is None else lab) for n, lab in g.labels.items()}
    return AsGraph(labels, g.edges, g.root)


def random_operands(ch: Chooser):
    """A (graph, op, graph) triple biased towards type-compatible operands."""
    left = random_asgraph(ch)
    kind = ch.choice(["APP", "MOD"])
    tl = dict(left.annotations)
    names = sorted(left.sources) or ["s"]
    a = ch.choice(names + ["o"])
    if kind == "APP":
        if a in left.sources and ch.coin(0.7):
            want = left.annotation(a)
            # sometimes add a source shared with the head, to exercise unification
            extra = [n for n in left.sources if n != a and n not in want]
            if extra and ch.coin(0.4):
                n = ch.choice(extra)
                want = AmType(dict(want.items(), **{n: left.annotation(n)}))
            right = random_asgraph(ch, want)
        else:
            right = random_asgraph(ch)
        return left, APP(a), right
    a = ch.choice(["m", "s", "o"])
    if ch.coin(0.7):
        entries = {a: EMPTY}
        for n in left.sources:
            if n != a and ch.coin(0.3):
                entries[n] = tl.get(n, EMPTY)
        right = random_asgraph(ch, AmType(entries))
    else:
        right = random_asgraph(ch)
    return left, MOD(a), right


# --- random well-typed trees ----------------------------------------------------

# (name, annotation) entries a head may carry beyond what its parent demands;
# each one is filled by an APP child whose subtree type is the annotation
EXTRAS = [("s", "()"), ("o", "()"), ("o2", "()"), ("o", "(s)"), ("o2", "(s)")]


def _leaf_graph(t: AmType, label: str) -> AsGraph:
    labels: Dict[int, Optional[str]] = {0: label}
    edges = []
    sources = {}
    for j, name in enumerate(t):
        labels[j + 1] = None
        role = "mod-of" if name == "m" else f"ARG{j}"
        edges.append((0, j + 1, role))
        sources[name] = j + 1
    return AsGraph(labels, edges, 0, sources, {n: a for n, a in t.items()})


def random_well_typed_tree(ch: Chooser, max_tokens: int = 7) -> AmDepTree:
    """Grow a well-typed tree top-down.  Each token's supertag carries the
    type its parent demands plus extra sources that its own APP children
    fill; modifiers and bottom tokens are sprinkled in."""
    nodes: List[tuple] = []  # (graph, parent position in `nodes` or -1, op)
    budget = [max_tokens]

    def grow(required: AmType, parent: int, op) -> None:
        budget[0] -= 1
        entries = dict(required.items())
        for _ in range(ch.integer(0, 2)):
            name, ann = ch.choice(EXTRAS)
            ann = parse_type(ann)
            if name in entries or budget[0] <= 0:
                continue
            if any(n not in entries or entries[n] is not a for n, a in ann.items()):
                continue
            entries[name] = ann
            budget[0] -= 1
        t = AmType(entries)
        idx = len(nodes)
        nodes.append((_leaf_graph(t, f"n{idx}"), parent, op))
        for name, ann in t.items():
            if name not in required:
                budget[0] += 1  # reserved above
                grow(ann, idx, APP(name))
        if budget[0] > 0 and ch.coin(0.4):
            mod = {"m": EMPTY}
            if "s" in t and t["s"] is EMPTY and ch.coin(0.3):
                mod["s"] = EMPTY
            grow(AmType(mod), idx, MOD("m"))
        if budget[0] > 0 and ch.coin(0.3):
            budget[0] -= 1
            nodes.append((None, idx, IGNORE))

    grow(EMPTY, -1, None)
    order = list(range(len(nodes)))
    for i in range(len(order) - 1, 0, -1):
        j = ch.integer(0, i)
        order[i], order[j] = order[j], order[i]
    pos = {node: p + 1 for p, node in enumerate(order)}
    n = len(nodes)
    supertags, heads, labels = [None] * n, [0] * n, [None] * n
    for node, (g, parent, op) in enumerate(nodes):
        p = pos[node] - 1
        supertags[p] = g
        heads[p] = 0 if parent < 0 else pos[parent]
        labels[p] = op
    return AmDepTree([Token(f"t{i}") for i in range(1, n + 1)], supertags, heads, labels)


@st.composite
def well_typed_trees(draw, max_tokens: int = 7) -> AmDepTree:
    return random_well_typed_tree(DrawChooser(draw), max_tokens)
