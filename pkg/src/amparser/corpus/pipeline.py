"""Parsing raw sentences with a trained count scorer."""

from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Optional, Sequence, Tuple

from ..amdep import AmDepTree, NotWellTyped, TreeStructureError
from ..asgraph import AsGraph, AsGraphError
from ..decode import DecodeConfig, DecodeError, DecodeResult, decode
from .lex import tree_to_amr
from .preprocess import preprocess
from .scorer import CountScorer, score_sentence

DUMMY_LABEL = "amr-empty"


def dummy_graph() -> AsGraph:
    return AsGraph({0: DUMMY_LABEL}, [], 0)


@dataclass
class ParseOutcome:
    graph: AsGraph
    status: str  # decoder status, or "error" when the dummy graph was used
    result: Optional[DecodeResult] = None
    message: str = ""

    @property
    def tree(self) -> Optional[AmDepTree]:
        return None if self.result is None else self.result.tree


def parse_sentence(
    scorer: CountScorer,
    tokens: Sequence[str],
    pos: Optional[Sequence[str]] = None,
    config: Optional[DecodeConfig] = None,
    gazetteer: FrozenSet[Tuple[str, ...]] = frozenset(),
) -> ParseOutcome:
    """Preprocess, score, decode and evaluate one sentence.  Failures of any
    stage are reported with the dummy graph in place of a parse."""
    config = config or DecodeConfig()
    pre = preprocess(tokens, None, pos, gazetteer)
    if not pre.tokens:
        return ParseOutcome(dummy_graph(), "error", message="empty sentence")
    table = score_sentence(scorer, pre.tokens, pre.pos, config.k)
    try:
        result = decode(table, config)
    except (DecodeError, TimeoutError) as exc:
        return ParseOutcome(dummy_graph(), "error", message=f"{type(exc).__name__}: {exc}")
    try:
        graph = tree_to_amr(result.tree, pre.records)
    except (NotWellTyped, TreeStructureError, AsGraphError) as exc:
        return ParseOutcome(dummy_graph(), "error", result, f"evaluation failed: {exc}")
    return ParseOutcome(graph, result.status_label, result)
