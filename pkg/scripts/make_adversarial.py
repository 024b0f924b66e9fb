"""Write the score table on which the type-unaware baseline falls back.

The table is the worked example sentence.  Edge scores favour the gold
skeleton and supertag scores favour the gold constants, but the label scores
prefer APP_s on the wants->sleep edge.  A type-aware decoder still picks
APP_o there; the baseline takes the label argmax and must fall back.
"""

import sys

import numpy as np

from amparser.amtypes import APP, IGNORE, MOD
from amparser.asgraph import parse_asgraph
from amparser.decode.scoretable import from_scores

WRITER = parse_asgraph("(p<root> / person :ARG0-of (w / write))")
WANT = parse_asgraph("(u<root> / want :ARG0 (v<s>) :ARG1 (w<o(s)>))")
SLEEP = parse_asgraph("(x<root> / sleep :ARG0 (y<s>))")
SOUND = parse_asgraph("(s1<root> / sound :manner-of (s2<m>))")


def build():
    forms = "the writer wants to sleep soundly".split()
    supertags = [
        [(None, 0.0)],
        [(WRITER, 0.0), (None, -2.0)],
        [(WANT, 0.0), (None, -2.0)],
        [(None, 0.0)],
        [(SLEEP, 0.0), (None, -2.0)],
        [(SOUND, 0.0), (None, -2.0)],
    ]
    edges = np.full((7, 7), -4.0)
    for h, d in [(3, 1), (3, 2), (0, 3), (3, 4), (3, 5), (5, 6)]:
        edges[h, d] = 0.0
    labels = {
        (3, 1): {IGNORE: 0.0},
        (3, 2): {APP("s"): 0.0, APP("o"): -1.0},
        (3, 4): {IGNORE: 0.0},
        (3, 5): {APP("s"): 0.0, APP("o"): -0.5},
        (5, 6): {MOD("m"): 0.0},
    }
    return from_scores(forms, supertags, edges, labels, label_default=-8.0)


if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "src/amparser/data/adversarial_type_unaware.json"
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(build().dumps() + "\n")
