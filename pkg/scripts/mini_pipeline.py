"""Convert the shipped mini-corpus, train the count scorer on it and parse it
back with each decoder, reporting corpus Smatch per decoder."""

import argparse
import time
from pathlib import Path

import amparser
from amparser.corpus import (
    convert_corpus,
    corpus_smatch,
    format_stats,
    parse_sentence,
    read_corpus,
    strip_wiki,
    train_count_scorer,
)
from amparser.decode import DECODERS, DecodeConfig


def main():
    default = Path(amparser.__file__).parent / "data" / "mini_corpus.amr"
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("corpus", nargs="?", default=str(default))
    ap.add_argument("--k", type=int, default=4)
    args = ap.parse_args()

    entries = read_corpus(Path(args.corpus).read_text(encoding="utf-8"))
    converted = convert_corpus(entries)
    print(format_stats(converted.stats), end="")
    scorer = train_count_scorer(converted.trees)
    for decoder in DECODERS:
        if decoder == "exact" and max(len(e.tokens) for e in entries) > 10:
            continue
        start = time.perf_counter()
        outcomes = [
            parse_sentence(scorer, e.tokens, e.pos, DecodeConfig(decoder=decoder, k=args.k)) for e in entries
        ]
        total, _ = corpus_smatch([(o.graph, strip_wiki(e.graph)) for o, e in zip(outcomes, entries)])
        fallbacks = sum(1 for o in outcomes if o.status != "exact-goal")
        elapsed = time.perf_counter() - start
        print(f"{decoder}\tF={total.f:.4f}\tnon-goal={fallbacks}\t{elapsed:.1f}s")


if __name__ == "__main__":
    main()
