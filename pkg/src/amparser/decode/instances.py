"""Random score tables for oracle comparisons and benchmarks.

Scores are multiples of 0.25 so that sums are exact in floating point and
score equality between decoders can be tested without tolerance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..amdep import Token
from ..amtypes import APP, IGNORE, MOD, parse_type, render_type
from ..asgraph import parse_asgraph
from .scoretable import Candidate, ScoreTable

# types used for random supertags; nested annotations are included on purpose
TYPE_POOL = [
    "()",
    "()",
    "(s)",
    "(o)",
    "(o, s)",
    "(o(s), s)",
    "(m)",
    "(m, s)",
    "(o(s))",
    "(m, o)",
]

# a wider pool for the scaling benchmark: about thirty types are reachable
SCALE_POOL = TYPE_POOL + [
    "(o2, o, s)",
    "(op1, op2)",
    "(poss)",
    "(o, poss)",
    "(s, o2)",
    "(op1)",
    "(op1, op2, op3)",
    "(o2(s), s)",
    "(poss, s)",
    "(m, poss)",
    "(op1, op2, op3, op4)",
]


@dataclass
class InstanceConfig:
    max_n: int = 6
    k: int = 3
    type_pool: Optional[List[str]] = None
    label_density: float = 0.6


def supertag_for(type_text: str, label: str):
    """An elementary graph with one labeled root and one leaf per source."""
    t = parse_type(type_text)
    parts = []
    for idx, (name, ann) in enumerate(t.items()):
        deco = name if not len(ann) else name + render_type(ann)
        role = "mod-of" if name == "m" else f"ARG{idx}"
        parts.append(f" :{role} (v{idx}<{deco}>)")
    return parse_asgraph(f"(r<root> / {label}" + "".join(parts) + ")")


def _q(rng: random.Random, lo: float, hi: float) -> float:
    steps = int((hi - lo) / 0.25)
    return lo + 0.25 * rng.randint(0, steps)


def random_table(rng: random.Random, config: InstanceConfig = InstanceConfig(), n: Optional[int] = None) -> ScoreTable:
    pool = config.type_pool or TYPE_POOL
    if n is None:
        n = rng.randint(1, config.max_n)
    tokens = [Token(f"w{i}", "X") for i in range(1, n + 1)]
    supertags = []
    for i in range(1, n + 1):
        count = rng.randint(1, config.k)
        texts = rng.sample(pool, min(count, len(pool)))
        row = [Candidate(supertag_for(t, f"c{i}-{j}"), _q(rng, -2, 0)) for j, t in enumerate(texts)]
        row.append(Candidate(None, _q(rng, -3, 0)))
        supertags.append(row)
    edges = np.array([[_q(rng, -2, 2) for _ in range(n + 1)] for _ in range(n + 1)])
    ops = [APP("s"), APP("o"), MOD("m"), MOD("s"), MOD("o"), IGNORE]
    labels = {}
    for h in range(0, n + 1):
        for d in range(1, n + 1):
            if h == d:
                continue
            table = {op: _q(rng, -2, 1) for op in ops if rng.random() < config.label_density}
            if table:
                labels[(h, d)] = table
    return ScoreTable(tokens, supertags, edges, labels, label_default=-1.0)


def scale_table(seed: int = 3, n: int = 40, k: int = 4) -> ScoreTable:
    """The benchmark instance for the projective decoder."""
    return random_table(random.Random(seed), InstanceConfig(k=k, type_pool=SCALE_POOL), n=n)
