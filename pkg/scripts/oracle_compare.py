"""Compare every decoder with the exact decoder on random small instances.

Writes one CSV row per instance and prints a summary of how often each
approximate decoder reaches the exact optimum.
"""

import argparse
import csv
import random
import sys
import time

from amparser.decode import (
    exact_decode,
    fixed_tree_decode,
    is_projective,
    projective_decode,
    type_unaware_decode,
)
from amparser.decode.common import rank
from amparser.decode.instances import InstanceConfig, random_table

DECODERS = {
    "projective": projective_decode,
    "fixed_tree": fixed_tree_decode,
    "type_unaware": type_unaware_decode,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--count", type=int, default=500)
    ap.add_argument("--max-n", type=int, default=6)
    ap.add_argument("--k", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="-")
    args = ap.parse_args()

    rng = random.Random(args.seed)
    cfg = InstanceConfig(max_n=args.max_n, k=args.k)
    out = sys.stdout if args.out == "-" else open(args.out, "w", newline="", encoding="utf-8")
    writer = csv.writer(out)
    writer.writerow(["id", "n", "exact", "exact_projective"] + [f"{d}_equal" for d in DECODERS])
    equal = dict.fromkeys(DECODERS, 0)
    projective_cases = projective_equal = 0
    start = time.perf_counter()
    for i in range(args.count):
        table = random_table(rng, cfg)
        ex = exact_decode(table, args.k)
        best = rank(ex.root_type, ex.score)
        row = []
        for name, fn in DECODERS.items():
            res = fn(table, args.k)
            same = rank(res.root_type, res.score) == best
            equal[name] += same
            row.append(int(same))
        proj = is_projective(ex.tree.heads)
        if proj:
            projective_cases += 1
            projective_equal += row[0]
        writer.writerow([i + 1, table.n, ex.score, int(proj)] + row)
    if out is not sys.stdout:
        out.close()
    elapsed = time.perf_counter() - start
    for name, hits in equal.items():
        print(f"{name}: reaches the exact optimum on {hits}/{args.count}", file=sys.stderr)
    print(
        f"projective on projective optima: {projective_equal}/{projective_cases}; {elapsed:.1f}s",
        file=sys.stderr,
    )


if __name__ == "__main__":
    main()
