"""Collapsing names, dates and numbers into placeholder tokens, and undoing it.

At training time the AMR tells us where names and dates are: a name node
with its :opN strings is removed and its token span becomes one NAME token,
aligned to the entity node that carried the :name edge.  At parse time the
same collapsing is driven by regular expressions (and an optional name
gazetteer); postprocessing re-attaches the recorded material to whatever
node the NAME/DATE token ended up anchoring.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ..asgraph import AsGraph

NAME, NUMBER, DATE = "NAME", "NUMBER", "DATE"
PLACEHOLDER_POS = {NAME: "NNP", NUMBER: "CD", DATE: "CD"}

NUMBER_RE = re.compile(r"^-?\d+(\.\d+)?$")
DATE_RE = re.compile(r"^(\d{4})-(\d{2})-(\d{2})$")
CAPITALIZED_RE = re.compile(r"^[A-Z][a-z]+(-[A-Z][a-z]+)*$")
# capitalized words that do not start a name at parse time
NOT_NAMES = frozenset("The A An This That These Those It He She They We I You His Her Its Their".split())


@dataclass
class Record:
    kind: str
    index: int  # position of the placeholder token in the preprocessed sentence
    surface: Tuple[str, ...]
    value: Tuple = ()  # NAME: name strings; NUMBER: (number,); DATE: ((role, value), ...)
    node: Optional[int] = None  # anchoring AMR node, when the AMR is known


@dataclass
class Preprocessed:
    tokens: List[str]
    pos: List[str]
    amr: Optional[AsGraph]
    records: List[Record] = field(default_factory=list)
    wiki_removed: int = 0

    def record_at(self, index: int) -> Optional[Record]:
        for r in self.records:
            if r.index == index:
                return r
        return None


def _unquote(label: Optional[str]) -> str:
    if label and len(label) >= 2 and label[0] == '"' and label[-1] == '"':
        return label[1:-1]
    return label or ""


def _op_index(label: str) -> int:
    return int(label[2:]) if label[2:].isdigit() else 0


def _date_value(token: str) -> Tuple[Tuple[str, str], ...]:
    m = DATE_RE.match(token)
    year, month, day = m.groups()
    return (("year", str(int(year))), ("month", str(int(month))), ("day", str(int(day))))


def _drop_nodes(g: AsGraph, drop) -> AsGraph:
    labels = {n: lab for n, lab in g.labels.items() if n not in drop}
    edges = [e for e in g.edges if e[0] not in drop and e[1] not in drop]
    return AsGraph(labels, edges, g.root)


def _find_span(tokens: Sequence[str], words: Sequence[str], used: set) -> Optional[int]:
    m = len(words)
    for start in range(len(tokens) - m + 1):
        if any(i in used for i in range(start, start + m)):
            continue
        if list(tokens[start : start + m]) == list(words):
            return start
    return None


def preprocess(
    tokens: Sequence[str],
    amr: Optional[AsGraph] = None,
    pos: Optional[Sequence[str]] = None,
    gazetteer: FrozenSet[Tuple[str, ...]] = frozenset(),
) -> Preprocessed:
    """Collapse names, dates and numbers.  With an AMR the spans come from the
    graph; without one they come from token patterns."""
    tokens = list(tokens)
    pos = list(pos) if pos is not None else ["_"] * len(tokens)
    spans: List[Tuple[int, int, str, Tuple, Optional[int]]] = []  # (start, end, kind, value, node)
    used: set = set()
    wiki_removed = 0

    if amr is not None:
        wiki = [(s, t) for s, t, lab in amr.edges if lab == "wiki"]
        wiki_removed = len(wiki)
        drop = {t for _, t in wiki}
        amr = _drop_nodes(amr, drop) if drop else amr
        amr, name_spans = _collapse_names(amr, tokens, used)
        spans += name_spans
        amr, date_spans = _collapse_dates(amr, tokens, used)
        spans += date_spans
    else:
        spans += _detect_names(tokens, used, gazetteer)
        for i, tok in enumerate(tokens):
            if i not in used and DATE_RE.match(tok):
                spans.append((i, i + 1, DATE, _date_value(tok), None))
                used.add(i)

    number_nodes = []
    if amr is not None:
        number_nodes = sorted(n for n, lab in amr.labels.items() if lab is not None and NUMBER_RE.match(lab))
    taken = set()
    for i, tok in enumerate(tokens):
        if i in used or not NUMBER_RE.match(tok):
            continue
        node = next((n for n in number_nodes if n not in taken and amr.labels[n] == tok), None)
        if node is not None:
            taken.add(node)
        spans.append((i, i + 1, NUMBER, (tok,), node))
        used.add(i)

    spans.sort()
    out_tokens, out_pos, records = [], [], []
    cursor = 0
    for start, end, kind, value, node in spans:
        out_tokens += tokens[cursor:start]
        out_pos += pos[cursor:start]
        records.append(Record(kind, len(out_tokens), tuple(tokens[start:end]), value, node))
        out_tokens.append(kind)
        out_pos.append(PLACEHOLDER_POS[kind])
        cursor = end
    out_tokens += tokens[cursor:]
    out_pos += pos[cursor:]
    return Preprocessed(out_tokens, out_pos, amr, records, wiki_removed)


def _collapse_names(amr: AsGraph, tokens, used):
    spans = []
    drop = set()
    for entity, name_node, lab in sorted(amr.edges):
        if lab != "name" or amr.labels.get(name_node) != "name":
            continue
        outs = [(l, t) for s, t, l in amr.edges if s == name_node]
        if not outs or any(not l.startswith("op") for l, _ in outs):
            continue
        ins = [s for s, t, _ in amr.edges if t == name_node]
        if len(ins) != 1:
            continue
        words = [_unquote(amr.labels[t]) for l, t in sorted(outs, key=lambda x: _op_index(x[0]))]
        start = _find_span(tokens, words, used)
        if start is None:
            continue
        used.update(range(start, start + len(words)))
        drop.add(name_node)
        drop.update(t for _, t in outs)
        spans.append((start, start + len(words), NAME, tuple(words), entity))
    return (_drop_nodes(amr, drop) if drop else amr), spans


def _collapse_dates(amr: AsGraph, tokens, used):
    spans = []
    drop = set()
    for node, lab in sorted(amr.labels.items()):
        if lab != "date-entity":
            continue
        outs = sorted((l, t) for s, t, l in amr.edges if s == node)
        if not outs or any(l not in ("year", "month", "day") for l, _ in outs):
            continue
        values = {l: amr.labels[t] for l, t in outs}
        for i, tok in enumerate(tokens):
            if i in used or not DATE_RE.match(tok):
                continue
            parsed = dict(_date_value(tok))
            if all(parsed.get(r) == v for r, v in values.items()):
                used.add(i)
                drop.update(t for _, t in outs)
                value = tuple((r, parsed[r]) for r in ("year", "month", "day") if r in values)
                spans.append((i, i + 1, DATE, value, node))
                break
    return (_drop_nodes(amr, drop) if drop else amr), spans


def _detect_names(tokens, used, gazetteer):
    spans = []
    for entry in sorted(gazetteer, key=len, reverse=True):
        start = _find_span(tokens, entry, used)
        while start is not None:
            used.update(range(start, start + len(entry)))
            spans.append((start, start + len(entry), NAME, tuple(entry), None))
            start = _find_span(tokens, entry, used)
    i = 0
    while i < len(tokens):
        if i in used or tokens[i] in NOT_NAMES or not CAPITALIZED_RE.match(tokens[i]):
            i += 1
            continue
        j = i
        while j < len(tokens) and j not in used and CAPITALIZED_RE.match(tokens[j]) and tokens[j] not in NOT_NAMES:
            j += 1
        used.update(range(i, j))
        spans.append((i, j, NAME, tuple(tokens[i:j]), None))
        i = j
    return spans


def postprocess(g: AsGraph, anchors: Dict[int, int], records: Sequence[Record]) -> AsGraph:
    """Re-attach name strings and date parts to the nodes anchored by the
    placeholder tokens.  `anchors` maps token positions to graph nodes."""
    labels = dict(g.labels)
    edges = list(g.edges)
    fresh = max(labels) + 1
    for r in records:
        node = anchors.get(r.index)
        if node is None:
            continue
        if r.kind == NAME:
            name_node = fresh
            labels[name_node] = "name"
            edges.append((node, name_node, "name"))
            fresh += 1
            for k, word in enumerate(r.value, start=1):
                labels[fresh] = f'"{word}"'
                edges.append((name_node, fresh, f"op{k}"))
                fresh += 1
        elif r.kind == DATE:
            for role, value in r.value:
                labels[fresh] = value
                edges.append((node, fresh, role))
                fresh += 1
    return AsGraph(labels, edges, g.root)
