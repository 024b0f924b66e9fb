"""Plain AMR graphs in PENMAN notation, and AMR corpus files.

An AMR is an AsGraph without sources.  Corpus files hold blocks of
``# ::key value`` comment lines followed by one PENMAN graph, separated by
blank lines; ``# ::snt`` holds the whitespace-tokenized sentence and
``# ::pos`` optional POS tags.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from ..asgraph import AsGraph, render_plain
from ..penman import PenmanSyntaxError, is_constant_label, parse_penman

# bare symbols that AMR uses as constants rather than variables
SYMBOL_CONSTANTS = {"imperative", "expressive", "interrogative", "amr-unknown", "amr-empty"}

_VARIABLE_RE = re.compile(r"^[a-z][a-z0-9]*$")


class AmrSyntaxError(ValueError):
    pass


def parse_amr(text: str) -> AsGraph:
    """Parse a PENMAN AMR.  Reentrancy is expressed by reusing a variable; a
    bare symbol that looks like a variable but is never defined is an error."""
    try:
        raw = parse_penman(text, decorations=False)
    except PenmanSyntaxError as exc:
        raise AmrSyntaxError(str(exc)) from None
    defined = set(raw.variables)
    for nid, label in raw.labels.items():
        if nid in defined or label is None:
            continue
        if _VARIABLE_RE.match(label) and label not in SYMBOL_CONSTANTS and not is_constant_label(label):
            raise AmrSyntaxError(f"undefined variable {label!r}")
    try:
        return AsGraph(raw.labels, raw.edges, raw.top)
    except ValueError as exc:
        raise AmrSyntaxError(str(exc)) from None


def render_amr(g: AsGraph) -> str:
    return render_plain(g)


@dataclass
class AmrEntry:
    tokens: List[str]
    graph: Optional[AsGraph]
    pos: Optional[List[str]] = None
    meta: Dict[str, str] = field(default_factory=dict)
    error: Optional[str] = None  # set when the PENMAN block could not be read

    @property
    def id(self) -> str:
        return self.meta.get("id", "")


def read_corpus(text: str) -> List[AmrEntry]:
    """Read an AMR corpus.  Malformed graphs do not abort reading; the entry
    carries the error message instead of a graph."""
    entries = []
    for block in re.split(r"\n\s*\n", text):
        lines = [ln for ln in block.splitlines() if ln.strip()]
        if not lines:
            continue
        meta: Dict[str, str] = {}
        body = []
        for ln in lines:
            stripped = ln.strip()
            if stripped.startswith("# ::"):
                key, _, value = stripped[4:].partition(" ")
                meta[key] = value.strip()
            elif stripped.startswith("#"):
                continue
            else:
                body.append(ln)
        if not body and "snt" not in meta:
            continue
        tokens = meta.get("snt", "").split()
        pos = meta["pos"].split() if "pos" in meta else None
        entry = AmrEntry(tokens, None, pos, {k: v for k, v in meta.items() if k not in ("snt", "pos")})
        if pos is not None and len(pos) != len(tokens):
            entry.error = f"{len(tokens)} tokens but {len(pos)} POS tags"
        elif not body:
            entry.error = "missing graph"
        else:
            try:
                entry.graph = parse_amr("\n".join(body))
            except AmrSyntaxError as exc:
                entry.error = str(exc)
        entries.append(entry)
    return entries


def write_corpus(entries: List[AmrEntry]) -> str:
    blocks = []
    for e in entries:
        lines = []
        if e.id:
            lines.append(f"# ::id {e.id}")
        lines.append("# ::snt " + " ".join(e.tokens))
        if e.pos is not None:
            lines.append("# ::pos " + " ".join(e.pos))
        for k, v in e.meta.items():
            if k != "id":
                lines.append(f"# ::{k} {v}")
        lines.append(render_amr(e.graph) if e.graph is not None else "(a / amr-empty)")
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
