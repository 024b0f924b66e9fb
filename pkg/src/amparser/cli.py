"""Command-line interface.

Subcommands: convert, parse, eval, npc, oracle-compare.  Exit codes are 0 on
success (per-sentence fallbacks included), 1 for usage or configuration
errors, 2 for I/O and input-format errors and 3 when an internal invariant
breaks.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .amdep import NotWellTyped, TreebankFormatError, read_treebank, write_treebank
from .asgraph import AsGraphError, render_asgraph
from .corpus.align import AlignerWeights
from .corpus.amr import AmrEntry, read_corpus, render_amr
from .corpus.convert import ConvertConfig, convert_corpus, format_stats, strip_wiki
from .corpus.lex import tree_to_amr
from .corpus.pipeline import ParseOutcome, dummy_graph, parse_sentence
from .corpus.policy import BlobPolicy
from .corpus.scorer import CountScorer, train_count_scorer
from .corpus.smatch import corpus_smatch
from .decode import DECODERS, DecodeConfig, DecodeError, GuardError, decode, is_projective
from .decode.common import rank
from .decode.exact import DEFAULT_GUARD, exact_decode
from .decode.hamilton import build_hamiltonian_instance, decide, has_hamiltonian_path, parse_digraph, sweep
from .decode.instances import InstanceConfig, random_table
from .decode.scoretable import ScoreTable, ScoreTableError

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class RunConfig:
    decoder: str = "projective"
    k: int = 4
    retry_decrement: bool = False
    seed: int = 0
    restarts: int = 4
    jobs: int = 1
    guard_n: int = DEFAULT_GUARD
    time_limit: Optional[float] = None

    def __post_init__(self):
        if self.decoder not in DECODERS:
            raise UsageError(f"unknown decoder {self.decoder!r}")
        if self.k < 1:
            raise UsageError("--k must be at least 1")
        if self.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        if self.restarts < 0:
            raise UsageError("--restarts must be non-negative")

    def decode_config(self) -> DecodeConfig:
        return DecodeConfig(self.decoder, self.k, self.retry_decrement, self.time_limit, self.guard_n)


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _load_json(path: str) -> dict:
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None


# --- convert --------------------------------------------------------------------


def cmd_convert(args) -> int:
    try:
        policy = BlobPolicy.from_json(_load_json(args.policy)) if args.policy else BlobPolicy()
        weights = AlignerWeights.from_json(_load_json(args.weights)) if args.weights else AlignerWeights()
    except (TypeError, KeyError, ValueError) as exc:
        raise UsageError(f"bad configuration file: {exc}") from None
    entries = read_corpus(_read(args.corpus))
    result = convert_corpus(entries, ConvertConfig(policy, weights, args.jobs))
    for o in result.outcomes:
        if o.reason is not None:
            _log(f"sentence {o.index + 1}: rejected ({o.message})")
    _write(args.out, write_treebank(result.trees))
    stats = format_stats(result.stats)
    if args.stats:
        _write(args.stats, stats)
    if args.out is not None and args.out != "-":
        sys.stdout.write(stats)
    return EXIT_OK


# --- parse ----------------------------------------------------------------------


def _load_model(path: str) -> CountScorer:
    text = _read(path)
    if text.lstrip().startswith("{"):
        try:
            return CountScorer.loads(text)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"{path}: not a scorer model ({exc})") from None
    try:
        return train_count_scorer(read_treebank(text))
    except TreebankFormatError as exc:
        raise InputError(f"{path}: {exc}") from None


def _read_sentences(text: str) -> List[AmrEntry]:
    """Sentences from an AMR corpus (gold graphs optional) or plain text with
    one whitespace-tokenized sentence per line."""
    if any(line.startswith("# ::snt") for line in text.splitlines()):
        return read_corpus(text)
    return [AmrEntry(line.split(), None) for line in text.splitlines() if line.strip()]


def _load_tables(path: str) -> List[ScoreTable]:
    """Score tables from a JSON object, a JSON array, or one object per line."""
    text = _read(path)
    try:
        try:
            doc = json.loads(text)
        except json.JSONDecodeError:
            docs = [json.loads(line) for line in text.splitlines() if line.strip()]
        else:
            docs = doc if isinstance(doc, list) else [doc]
        return [ScoreTable.from_json(d) for d in docs]
    except (ScoreTableError, ValueError, KeyError, TypeError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _parse_one(job):
    scorer, entry, config = job
    return parse_sentence(scorer, entry.tokens, entry.pos, config)


def _decode_one(job):
    table, config = job
    try:
        return decode(table, config), None
    except (GuardError, DecodeError, TimeoutError) as exc:
        return None, f"{type(exc).__name__}: {exc}"


def _map(fn, jobs, workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def _supertag_accuracy(entries: Sequence[AmrEntry], outcomes: Sequence[ParseOutcome]) -> Optional[float]:
    gold = [e for e in entries if e.graph is not None]
    if not gold:
        return None
    converted = convert_corpus(entries).outcomes
    right = total = 0
    for conv, out in zip(converted, outcomes):
        if conv.tree is None or out.tree is None or len(conv.tree) != len(out.tree):
            continue
        for g, p in zip(conv.tree.supertags, out.tree.supertags):
            total += 1
            right += (g is None and p is None) or (
                g is not None and p is not None and render_asgraph(g) == render_asgraph(p)
            )
    return right / total if total else None


def cmd_parse(args, config: RunConfig) -> int:
    if (args.model is None) == (args.tables is None):
        raise UsageError("give exactly one of --model (with INPUT) or --tables")
    statuses: List[str] = []
    trees = []
    blocks = []
    if args.tables is not None:
        tables = _load_tables(args.tables)
        results = _map(_decode_one, [(t, config.decode_config()) for t in tables], config.jobs)
        for i, (res, err) in enumerate(results, start=1):
            if res is None:
                _log(f"table {i}: {err}; dummy graph used")
                statuses.append("error")
                blocks.append(f"# ::id {i}\n# ::status error\n{render_amr(dummy_graph())}\n")
                continue
            statuses.append(res.status_label)
            res.tree.meta = {"id": str(i), "status": res.status_label, "score": repr(res.score)}
            trees.append(res.tree)
            try:
                graph = tree_to_amr(res.tree)
            except (NotWellTyped, AsGraphError) as exc:
                _log(f"table {i}: evaluation failed ({exc}); dummy graph used")
                graph = dummy_graph()
            blocks.append(
                f"# ::id {i}\n# ::status {res.status_label}\n# ::score {res.score!r}\n{render_amr(graph)}\n"
            )
        accuracy = None
    else:
        if args.input is None:
            raise UsageError("parse --model needs an INPUT file")
        scorer = _load_model(args.model)
        entries = _read_sentences(_read(args.input))
        outcomes = _map(_parse_one, [(scorer, e, config.decode_config()) for e in entries], config.jobs)
        for i, (e, out) in enumerate(zip(entries, outcomes), start=1):
            ident = e.id or str(i)
            if out.status == "error":
                _log(f"sentence {i}: {out.message}; dummy graph used")
            statuses.append(out.status)
            if out.tree is not None:
                out.tree.meta = {"id": ident, "status": out.status}
                trees.append(out.tree)
            blocks.append(
                f"# ::id {ident}\n# ::snt {' '.join(e.tokens)}\n# ::status {out.status}\n{render_amr(out.graph)}\n"
            )
        accuracy = _supertag_accuracy(entries, outcomes)
    _write(args.out, "\n".join(blocks))
    if args.derivations:
        _write(args.derivations, write_treebank(trees))
    counts = {}
    for s in statuses:
        key = s.split("(")[0]
        counts[key] = counts.get(key, 0) + 1
    stats = {"sentences": len(statuses)}
    for key in sorted(counts):
        stats[f"status.{key}"] = counts[key]
    nonproj = sum(1 for t in trees if not is_projective(t.heads))
    stats["nonprojective_pct"] = round(100.0 * nonproj / len(trees), 2) if trees else 0.0
    stats["supertag_accuracy"] = "n/a" if accuracy is None else round(accuracy, 4)
    text = format_stats(stats)
    if args.stats:
        _write(args.stats, text)
    elif args.out is not None and args.out != "-":
        sys.stdout.write(text)
    return EXIT_OK


# --- eval -----------------------------------------------------------------------


def cmd_eval(args, config: RunConfig) -> int:
    pred = read_corpus(_read(args.pred))
    gold = read_corpus(_read(args.gold))
    if len(pred) != len(gold):
        raise InputError(f"{len(pred)} predicted graphs but {len(gold)} gold graphs")
    pairs = []
    for i, (p, g) in enumerate(zip(pred, gold), start=1):
        if g.graph is None:
            raise InputError(f"gold entry {i}: {g.error}")
        pg = p.graph if p.graph is not None else dummy_graph()
        if not args.keep_wiki:
            pg, gg = strip_wiki(pg), strip_wiki(g.graph)
        else:
            gg = g.graph
        pairs.append((pg, gg))
    total, per = corpus_smatch(pairs, config.restarts, config.seed)
    lines = []
    for i, (g, c) in enumerate(zip(gold, per), start=1):
        lines.append(f"{g.id or i}\tP={c.precision:.4f}\tR={c.recall:.4f}\tF={c.f:.4f}")
    lines.append(f"precision={total.precision:.4f}")
    lines.append(f"recall={total.recall:.4f}")
    lines.append(f"f={total.f:.4f}")
    _write(None, "\n".join(lines) + "\n")
    return EXIT_OK


# --- npc ------------------------------------------------------------------------


def cmd_npc(args, config: RunConfig) -> int:
    if args.sweep is not None:
        if args.sweep < 2:
            raise UsageError("--sweep needs n >= 2")
        lines = []
        for n in range(2, args.sweep + 1):
            checked, agree = sweep(n, lambda t: exact_decode(t, guard_n=max(config.guard_n, n)))
            lines.append(f"n={n}\tdigraphs={checked}\tagree={agree}\tagreement={100.0 * agree / checked:.1f}%")
        _write(None, "\n".join(lines) + "\n")
        return EXIT_OK
    if args.digraph is None:
        raise UsageError("npc needs a DIGRAPH file or --sweep")
    try:
        n, edges = parse_digraph(_read(args.digraph))
    except ValueError as exc:
        raise InputError(f"{args.digraph}: {exc}") from None
    if n < 2:
        raise UsageError("the digraph needs at least two nodes")
    try:
        table = build_hamiltonian_instance(n, edges)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    result = exact_decode(table, guard_n=max(config.guard_n, n))
    verdict = decide(table, result)
    if verdict != has_hamiltonian_path(n, edges):
        raise DecodeError("decoder verdict disagrees with brute force")
    lines = [f"nodes={n}", f"edges={' '.join(f'{i}-{k}' for i, k in sorted(edges))}"]
    for i in range(1, n + 1):
        g = table.supertags[i - 1][0].graph
        lines.append(f"supertag.{i}={render_asgraph(g)}")
    lines.append(f"score={result.score:g}")
    lines.append(f"target={n - 1}")
    lines.append(f"hamiltonian={'YES' if verdict else 'NO'}")
    _write(None, "\n".join(lines) + "\n")
    return EXIT_OK


# --- oracle-compare -------------------------------------------------------------


def cmd_oracle_compare(args, config: RunConfig) -> int:
    if args.tables:
        tables = _load_tables(args.tables)
    else:
        rng = random.Random(config.seed)
        icfg = InstanceConfig(max_n=args.max_n, k=config.k)
        tables = [random_table(rng, icfg) for _ in range(args.count)]
    rows = [
        "id,n,exact,projective,fixed_tree,type_unaware,"
        "exact_is_projective,projective_eq,fixed_tree_eq,type_unaware_eq,items_projective,items_fixed_tree"
    ]
    worse = 0
    proj_opt = proj_eq = 0
    items_p = items_f = 0.0
    for i, t in enumerate(tables, start=1):
        if t.n > config.guard_n:
            raise UsageError(f"instance {i} has n={t.n} above the guard {config.guard_n}")
        ex = exact_decode(t, config.k, guard_n=config.guard_n)
        approx = [decode(t, DecodeConfig(name, config.k)) for name in ("projective", "fixed-tree", "type-unaware")]
        kex = rank(ex.root_type, ex.score)
        keys = [rank(r.root_type, r.score) for r in approx]
        worse += sum(key > kex for key in keys)
        equal = [int(key == kex) for key in keys]
        projective = is_projective(ex.tree.heads)
        if projective:
            proj_opt += 1
            proj_eq += equal[0]
        pr, ft, tu = approx
        items_p += pr.stats.get("items", 0)
        items_f += ft.stats.get("items", 0)
        rows.append(
            f"{i},{t.n},{ex.score:g},{pr.score:g},{ft.score:g},{tu.score:g},{int(projective)},"
            f"{equal[0]},{equal[1]},{equal[2]},{pr.stats.get('items', 0)},{ft.stats.get('items', 0)}"
        )
    _write(args.out, "\n".join(rows) + "\n")
    summary = {
        "instances": len(tables),
        "approx_above_exact": worse,
        "projective_optimum": proj_opt,
        "projective_equal_on_projective_optimum_pct": round(100.0 * proj_eq / proj_opt, 2) if proj_opt else 100.0,
        "mean_items_projective": round(items_p / len(tables), 2) if tables else 0.0,
        "mean_items_fixed_tree": round(items_f / len(tables), 2) if tables else 0.0,
    }
    text = format_stats(summary)
    if args.out is None or args.out == "-":
        sys.stderr.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# --- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--decoder", default="projective", choices=DECODERS)
    common.add_argument("--k", type=int, default=4, help="supertags per token")
    common.add_argument("--retry-decrement", action="store_true", help="retry timed-out projective runs with k-1")
    common.add_argument("--time-limit", type=float, default=None, help="seconds per projective attempt")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--restarts", type=int, default=4, help="Smatch random restarts")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--guard-n", type=int, default=DEFAULT_GUARD, help="largest n for the exact decoder")

    parser = _Parser(prog="amparser", description="AM dependency parsing toolkit")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("convert", parents=[common], help="AMR corpus to AM treebank")
    p.add_argument("corpus")
    p.add_argument("--out", "-o", default=None, help="treebank output (default stdout)")
    p.add_argument("--stats", default=None, help="write key=value stats here")
    p.add_argument("--policy", default=None, help="BlobPolicy JSON file")
    p.add_argument("--weights", default=None, help="aligner weights JSON file")

    p = sub.add_parser("parse", parents=[common], help="parse sentences or score tables")
    p.add_argument("input", nargs="?", default=None, help="AMR corpus or one sentence per line")
    p.add_argument("--model", default=None, help="treebank to train on, or a saved scorer JSON")
    p.add_argument("--tables", default=None, help="score tables, one JSON object per line")
    p.add_argument("--out", "-o", default=None)
    p.add_argument("--derivations", default=None, help="write the decoded trees as a treebank")
    p.add_argument("--stats", default=None)

    p = sub.add_parser("eval", parents=[common], help="Smatch of predicted against gold AMRs")
    p.add_argument("pred")
    p.add_argument("gold")
    p.add_argument("--keep-wiki", action="store_true", help="do not strip :wiki edges before scoring")

    p = sub.add_parser("npc", parents=[common], help="decide Hamiltonian paths via the decoder")
    p.add_argument("digraph", nargs="?", default=None, help='file with lines "i k"')
    p.add_argument("--sweep", type=int, default=None, metavar="N", help="check all digraphs with 2..N nodes")

    p = sub.add_parser("oracle-compare", parents=[common], help="compare decoders with the exact oracle")
    p.add_argument("--tables", default=None)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-n", type=int, default=6)
    p.add_argument("--out", "-o", default=None)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a subcommand is required")
        config = RunConfig(
            args.decoder, args.k, args.retry_decrement, args.seed, args.restarts, args.jobs, args.guard_n, args.time_limit
        )
        if args.command == "convert":
            return cmd_convert(args)
        if args.command == "parse":
            return cmd_parse(args, config)
        if args.command == "eval":
            return cmd_eval(args, config)
        if args.command == "npc":
            return cmd_npc(args, config)
        return cmd_oracle_compare(args, config)
    except UsageError as exc:
        _log(f"amparser: error: {exc}")
        return EXIT_USAGE
    except InputError as exc:
        _log(f"amparser: {exc}")
        return EXIT_IO
    except (DecodeError, AssertionError) as exc:
        _log(f"amparser: internal error: {exc}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
