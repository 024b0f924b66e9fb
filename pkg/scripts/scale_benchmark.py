"""Time the projective decoder on synthetic sentences of growing length."""

import argparse
import time

from amparser.decode import projective_decode
from amparser.decode.instances import scale_table


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lengths", type=int, nargs="+", default=[10, 20, 30, 40])
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--seed", type=int, default=3)
    args = ap.parse_args()
    print("n\tk\ttypes\titems\tbound\tseconds\tstatus")
    for n in args.lengths:
        table = scale_table(args.seed, n, args.k)
        start = time.perf_counter()
        res = projective_decode(table, args.k)
        elapsed = time.perf_counter() - start
        types, items = res.stats["types"], res.stats["items"]
        print(f"{n}\t{args.k}\t{types}\t{items}\t{n ** 3 * types}\t{elapsed:.2f}\t{res.status_label}")


if __name__ == "__main__":
    main()
