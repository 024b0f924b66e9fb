"""Delexicalized supertags and the way back to a full AMR.

Training supertags have their lexical node relabeled LEX, which keeps the
supertag inventory small; the original label travels separately as the
token's lexlabel.  After decoding, LEX nodes are filled again and the
placeholder material recorded during preprocessing is put back.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from typing import Dict, Optional, Sequence, Tuple

from ..amdep import AmDepTree, evaluate
from ..asgraph import AsGraph
from .preprocess import NUMBER, Record, postprocess

LEX = "LEX"


class LexError(ValueError):
    pass


def delexicalize(g: AsGraph, node: int) -> Tuple[AsGraph, str]:
    """Replace the label of the lexical `node` by LEX; return the new graph
    and the original label."""
    label = g.labels.get(node)
    if label is None:
        raise LexError(f"node {node} is not a labeled node of the supertag")
    return g.relabel(node, LEX), label


def lex_node(g: AsGraph) -> Optional[int]:
    found = [n for n, lab in g.labels.items() if lab == LEX]
    return found[0] if found else None


class Lexicon:
    """Counts of node labels seen with each word form."""

    def __init__(self):
        self.counts: Dict[str, Counter] = defaultdict(Counter)

    def add(self, form: str, label: str) -> None:
        self.counts[form.lower()][label] += 1

    def most_frequent(self, form: str) -> Optional[str]:
        c = self.counts.get(form.lower())
        if not c:
            return None
        return min(c, key=lambda lab: (-c[lab], lab))


def resolve_label(
    token: str,
    lexlabel: Optional[str] = None,
    lexicon: Optional[Lexicon] = None,
    record: Optional[Record] = None,
) -> str:
    """The label for a LEX node: a recorded number, else the supplied label,
    else the most frequent label for the word, else the word itself."""
    if record is not None and record.kind == NUMBER:
        return record.value[0]
    if lexlabel is not None:
        return lexlabel
    if lexicon is not None:
        found = lexicon.most_frequent(token)
        if found is not None:
            return found
    return token


def relexicalize(
    g: AsGraph,
    token: str,
    lexlabel: Optional[str] = None,
    lexicon: Optional[Lexicon] = None,
    record: Optional[Record] = None,
) -> AsGraph:
    node = lex_node(g)
    if node is None:
        return g
    return g.relabel(node, resolve_label(token, lexlabel, lexicon, record))


def tree_to_amr(
    tree: AmDepTree,
    records: Sequence[Record] = (),
    lexicon: Optional[Lexicon] = None,
) -> AsGraph:
    """Evaluate a (possibly delexicalized) tree into a plain AMR.

    Lexical nodes are tagged with per-token markers before evaluation so
    that each token's node can be found again in the result; that is where
    names and dates from `records` are re-attached.
    """
    by_index = {r.index: r for r in records}
    marked = list(tree.supertags)
    final: Dict[str, str] = {}
    for i, g in enumerate(tree.supertags, start=1):
        if g is None:
            continue
        node = lex_node(g)
        if node is None:
            node = g.root if g.labels[g.root] is not None else None
            if node is None:
                continue
            label = g.labels[node]
        else:
            label = resolve_label(tree.tokens[i - 1].form, tree.lexlabels[i - 1], lexicon, by_index.get(i - 1))
        marker = f"\x00{i}"
        final[marker] = label
        marked[i - 1] = g.relabel(node, marker)
    work = AmDepTree(tree.tokens, marked, tree.heads, tree.labels, tree.lexlabels, tree.meta)
    g = evaluate(work)
    labels = dict(g.labels)
    anchors = {}
    for node, lab in g.labels.items():
        if lab in final:
            labels[node] = final[lab]
            anchors[int(lab[1:]) - 1] = node
    plain = AsGraph(labels, g.edges, g.root)
    return postprocess(plain, anchors, records)
