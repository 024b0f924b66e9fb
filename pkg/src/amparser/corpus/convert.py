"""Corpus conversion: AMR corpus in, delexicalized AM treebank and stats out."""

from __future__ import annotations

import json
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from ..amdep import AmDepTree
from ..asgraph import AsGraph, render_asgraph
from ..decode.common import is_projective
from .align import AlignerWeights, align
from .amr import AmrEntry
from .decompose import DecompositionError, decompose
from .lex import delexicalize
from .policy import BlobPolicy
from .preprocess import Record, preprocess


@dataclass
class ConvertConfig:
    policy: BlobPolicy = field(default_factory=BlobPolicy)
    weights: AlignerWeights = field(default_factory=AlignerWeights)
    jobs: int = 1


@dataclass
class Converted:
    """Outcome for one sentence: a tree, or the reason it was rejected."""

    index: int
    tree: Optional[AmDepTree] = None
    reason: Optional[str] = None
    message: str = ""
    removed: int = 0
    wiki_removed: int = 0
    unaligned: int = 0
    lexicalized: List[str] = field(default_factory=list)


def encode_records(records: Sequence[Record]) -> str:
    return json.dumps([[r.kind, r.index, list(r.surface), list(r.value), r.node] for r in records])


def decode_records(text: Optional[str]) -> List[Record]:
    if not text:
        return []
    out = []
    for kind, index, surface, value, node in json.loads(text):
        value = tuple(tuple(v) if isinstance(v, list) else v for v in value)
        out.append(Record(kind, index, tuple(surface), value, node))
    return out


def strip_wiki(g: AsGraph) -> AsGraph:
    drop = {t for _, t, lab in g.edges if lab == "wiki"}
    if not drop:
        return g
    labels = {n: lab for n, lab in g.labels.items() if n not in drop}
    return AsGraph(labels, [e for e in g.edges if e[1] not in drop], g.root)


def convert_entry(index: int, entry: AmrEntry, config: ConvertConfig) -> Converted:
    out = Converted(index)
    if entry.error is not None or entry.graph is None:
        out.reason, out.message = "syntax", entry.error or "missing graph"
        return out
    pre = preprocess(entry.tokens, entry.graph, entry.pos)
    out.wiki_removed = pre.wiki_removed
    fixed = {r.index + 1: r.node for r in pre.records if r.node is not None}
    alignment = align(pre.amr, pre.tokens, fixed, config.weights, config.policy)
    out.unaligned = len(alignment.unaligned)
    try:
        d = decompose(pre.amr, alignment, pre.tokens, pre.pos, config.policy)
    except DecompositionError as exc:
        out.reason, out.message = exc.code, str(exc)
        return out
    tree = d.tree
    for i, g in enumerate(tree.supertags, start=1):
        if g is None:
            continue
        out.lexicalized.append(render_asgraph(g))
        tree.supertags[i - 1], tree.lexlabels[i - 1] = delexicalize(g, d.lexical[i])
    tree.meta = {"id": entry.id or str(index + 1), "snt": " ".join(entry.tokens)}
    if pre.records:
        tree.meta["records"] = encode_records(pre.records)
    out.tree = tree
    out.removed = len(d.removed)
    return out


def _convert_star(args):
    return convert_entry(*args)


@dataclass
class ConvertResult:
    trees: List[AmDepTree]
    outcomes: List[Converted]
    stats: Dict[str, object]


def convert_corpus(entries: Sequence[AmrEntry], config: Optional[ConvertConfig] = None) -> ConvertResult:
    """Convert every entry; rejected sentences are counted by reason and left
    out of the treebank.  Output order follows input order."""
    config = config or ConvertConfig()
    jobs = [(i, e, config) for i, e in enumerate(entries)]
    if config.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            outcomes = list(pool.map(_convert_star, jobs))
    else:
        outcomes = [_convert_star(j) for j in jobs]
    trees = [o.tree for o in outcomes if o.tree is not None]
    return ConvertResult(trees, outcomes, conversion_stats(outcomes, trees))


def _pct(a: int, b: int) -> float:
    return round(100.0 * a / b, 2) if b else 0.0


def conversion_stats(outcomes: Sequence[Converted], trees: Sequence[AmDepTree]) -> Dict[str, object]:
    total = len(outcomes)
    rejected = [o for o in outcomes if o.tree is None]
    nonproj = sum(1 for t in trees if not is_projective(t.heads))
    lexicalized = {s for o in outcomes for s in o.lexicalized}
    delexicalized = {render_asgraph(g) for t in trees for g in t.supertags if g is not None}
    stats: Dict[str, object] = {
        "sentences": total,
        "accepted": len(trees),
        "rejected": len(rejected),
        "rejected_pct": _pct(len(rejected), total),
        "nonprojective": nonproj,
        "nonprojective_pct": _pct(nonproj, len(trees)),
        "reentrancies_removed": sum(o.removed for o in outcomes),
        "wiki_edges_removed": sum(o.wiki_removed for o in outcomes),
        "unaligned_nodes": sum(o.unaligned for o in outcomes),
        "supertags_lexicalized": len(lexicalized),
        "supertags_delexicalized": len(delexicalized),
    }
    for code, count in sorted(Counter(o.reason for o in rejected).items()):
        stats[f"reject.{code}"] = count
    return stats


def format_stats(stats: Dict[str, object]) -> str:
    return "".join(f"{k}={v}\n" for k, v in stats.items())
