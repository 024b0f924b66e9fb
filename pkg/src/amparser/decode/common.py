"""Shared result type and helpers for the decoders."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

from ..amdep import AmDepTree, check_well_typed
from ..amtypes import BOTTOM, EMPTY, EdgeOp, TypeLike, open_source_count
from .scoretable import Candidate, ScoreTable

EXACT_GOAL = "exact-goal"
OPEN_SOURCE_FALLBACK = "open-source-fallback"
SUBTREE_FALLBACK = "subtree-fallback"


class DecodeError(RuntimeError):
    pass


class GuardError(DecodeError):
    """The instance is too large for the requested decoder."""


@dataclass
class DecodeResult:
    tree: AmDepTree
    score: float
    status: str
    open_sources: int = 0
    root_type: TypeLike = EMPTY
    stats: Dict[str, float] = field(default_factory=dict)

    @property
    def status_label(self) -> str:
        if self.status == OPEN_SOURCE_FALLBACK:
            return f"{self.status}({self.open_sources})"
        return self.status


def open_count(t: TypeLike) -> float:
    return math.inf if t is BOTTOM else open_source_count(t)


def rank(t: TypeLike, score: float):
    """Sort key for complete derivations: goal items first, then fewer open
    sources, then higher score."""
    return (t is EMPTY, -open_count(t), score)


def build_tree(
    table: ScoreTable,
    chosen: Dict[int, Candidate],
    heads: Dict[int, int],
    labels: Dict[int, Optional[EdgeOp]],
) -> AmDepTree:
    n = table.n
    return AmDepTree(
        tokens=list(table.tokens),
        supertags=[chosen[i].graph for i in range(1, n + 1)],
        heads=[heads[i] for i in range(1, n + 1)],
        labels=[labels.get(i) for i in range(1, n + 1)],
        lexlabels=[chosen[i].lexlabel for i in range(1, n + 1)],
    )


def finish(table: ScoreTable, tree: AmDepTree, status: Optional[str] = None, **stats) -> DecodeResult:
    """Check the tree, recompute its score, and derive the status."""
    deco = check_well_typed(tree)
    if deco is None:
        raise DecodeError("decoder produced a tree that is not well-typed")
    root_type = deco[tree.root]
    if status is None:
        status = EXACT_GOAL if root_type is EMPTY else OPEN_SOURCE_FALLBACK
    opens = 0 if root_type is BOTTOM else open_source_count(root_type)
    return DecodeResult(tree, table.tree_score(tree), status, opens, root_type, dict(stats))


def is_projective(heads) -> bool:
    """No two arcs cross (the root token's arc from position 0 included).

    `heads` is a list with heads[i-1] the head of token i.
    """
    arcs = [(min(h, d), max(h, d)) for d, h in enumerate(heads, start=1)]
    for a, b in arcs:
        for c, d in arcs:
            if a < c < b < d:
                return False
    return True
