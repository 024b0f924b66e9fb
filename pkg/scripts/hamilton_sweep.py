"""Check the Hamiltonian-path reduction exhaustively for small n and on
random digraphs for larger n."""

import argparse
import random
import time

from amparser.decode import exact_decode
from amparser.decode.hamilton import build_hamiltonian_instance, decide, has_hamiltonian_path, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=5, help="exhaustive up to this many nodes")
    ap.add_argument("--random", type=int, default=200, help="random digraphs at each larger n")
    ap.add_argument("--random-n", type=int, nargs="*", default=[6, 7])
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    for n in range(2, args.max_n + 1):
        start = time.perf_counter()
        checked, agree = sweep(n, exact_decode)
        print(f"n={n}\tall\t{agree}/{checked}\t{time.perf_counter() - start:.1f}s")
    rng = random.Random(args.seed)
    for n in args.random_n:
        start = time.perf_counter()
        pairs = [(a, b) for a in range(1, n + 1) for b in range(1, n + 1) if a != b]
        agree = yes = 0
        for _ in range(args.random):
            density = rng.choice([0.2, 0.3, 0.45])
            edges = [p for p in pairs if rng.random() < density]
            table = build_hamiltonian_instance(n, edges)
            truth = has_hamiltonian_path(n, edges)
            agree += decide(table, exact_decode(table, guard_n=max(10, n))) == truth
            yes += truth
        print(f"n={n}\trandom\t{agree}/{args.random} ({yes} YES)\t{time.perf_counter() - start:.1f}s")


if __name__ == "__main__":
    main()
