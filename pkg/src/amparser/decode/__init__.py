"""Decoders from score tables to well-typed AM dependency trees."""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

from .baseline import type_unaware_decode
from .cle import cle_arborescence, max_arborescence
from .common import (
    EXACT_GOAL,
    OPEN_SOURCE_FALLBACK,
    SUBTREE_FALLBACK,
    DecodeError,
    DecodeResult,
    GuardError,
    is_projective,
)
from .exact import DEFAULT_GUARD, exact_decode
from .fixedtree import fixed_tree_decode
from .hamilton import build_hamiltonian_instance, has_hamiltonian_path
from .projective import projective_decode
from .scoretable import Candidate, ScoreTable, ScoreTableError

DECODERS = ("projective", "fixed-tree", "exact", "type-unaware")


@dataclass
class DecodeConfig:
    decoder: str = "projective"
    k: int = 4
    retry_decrement: bool = False
    time_limit: Optional[float] = None  # seconds per attempt (projective only)
    guard_n: int = DEFAULT_GUARD

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise ValueError(f"unknown decoder {self.decoder!r}; choose from {', '.join(DECODERS)}")
        if self.k < 1:
            raise ValueError("k must be at least 1")


def decode(table: ScoreTable, config: DecodeConfig) -> DecodeResult:
    """Run the configured decoder.  With `retry_decrement`, a projective run that
    exceeds its time limit is retried with k-1 supertags, down to k=1."""
    if config.decoder == "exact":
        return exact_decode(table, config.k, guard_n=config.guard_n)
    if config.decoder == "fixed-tree":
        return fixed_tree_decode(table, config.k)
    if config.decoder == "type-unaware":
        return type_unaware_decode(table, config.k)
    k = config.k
    while True:
        deadline = None if config.time_limit is None else time.monotonic() + config.time_limit
        try:
            result = projective_decode(table, k, deadline=deadline)
            result.stats["k"] = k
            return result
        except TimeoutError:
            if not config.retry_decrement or k == 1:
                raise
            k -= 1


__all__ = [
    "DECODERS",
    "Candidate",
    "DecodeConfig",
    "DecodeError",
    "DecodeResult",
    "EXACT_GOAL",
    "GuardError",
    "OPEN_SOURCE_FALLBACK",
    "SUBTREE_FALLBACK",
    "ScoreTable",
    "ScoreTableError",
    "build_hamiltonian_instance",
    "cle_arborescence",
    "decode",
    "exact_decode",
    "fixed_tree_decode",
    "has_hamiltonian_path",
    "is_projective",
    "max_arborescence",
    "projective_decode",
    "type_unaware_decode",
]
