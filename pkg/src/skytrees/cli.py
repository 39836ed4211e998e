"""``skytrees`` command-line interface.

Exit codes: 0 success, 1 semantic rejection (self-containment, invalid query,
oracle mismatch), 2 unreadable or unparsable input, 3 oracle bound exceeded.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Sequence

from . import generate as gen
from .document import DocumentIndex, TextMode, build_index, check_no_self_containment
from .engine import evaluate
from .errors import OracleBoundExceeded, SkyTreesError
from .oracle import DEFAULT_BOUND, all_embeddings, skytrees_oracle
from .query import QueryTree, has_errors, parse_query, validate_query
from .skyline import Answer, Dominance, answer_to_json, answer_to_text, generate_solution

EXIT_OK, EXIT_REJECTED, EXIT_INPUT, EXIT_BOUND = 0, 1, 2, 3

_EPILOG = """\
answer bits: one character per preference node, in post-order of the query
tree (children before parents, left to right).  For a/b[/c]/d?[/e?]/f the
order is e, d, so "10" means e is bound and d is not.  The JSON "dimension"
field lists the bound preference nodes in the same order.

exit codes: 0 success, 1 rejected (self-containing document, invalid query,
oracle mismatch), 2 input or parse error, 3 oracle enumeration bound exceeded.
"""


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}", EXIT_INPUT) from exc


def _load_index(args) -> DocumentIndex:
    try:
        return build_index(_read(args.file), TextMode(args.text_mode.replace("-", "_")))
    except SkyTreesError as exc:
        raise CliError(f"{args.file}: {exc}", EXIT_INPUT) from exc


def _gate_nsc(index: DocumentIndex, force: bool) -> None:
    violations = check_no_self_containment(index)
    if violations and not force:
        a, d = violations[0]
        raise CliError(
            f"document nests <{a.tag}> inside itself ({len(violations)} pair(s), first "
            f"{a!r} contains {d!r}); use --force to evaluate anyway", EXIT_REJECTED)


def _queries(args) -> list[QueryTree]:
    if (args.query is None) == (args.query_file is None):
        raise CliError("give exactly one of a query argument or --query-file", EXIT_INPUT)
    if args.query is not None:
        texts = [args.query]
    else:
        raw = _read(args.query_file).decode("utf-8")
        texts = [line.strip() for line in raw.splitlines() if line.strip()]
        if not texts:
            raise CliError(f"{args.query_file}: no queries", EXIT_INPUT)
    out = []
    for text in texts:
        try:
            query = parse_query(text)
        except SkyTreesError as exc:
            raise CliError(f"query {text!r}: {exc}", EXIT_INPUT) from exc
        issues = validate_query(query)
        for issue in issues:
            print(f"query {text!r}: {issue}", file=sys.stderr)
        if has_errors(issues):
            raise CliError(f"query {text!r} is invalid", EXIT_REJECTED)
        out.append(query)
    return out


def _mode(args) -> Dominance:
    return Dominance(args.dominance.replace("-", "_"))


def _render(query: QueryTree, answers: list[Answer], fmt: str):
    if fmt == "json":
        return [answer_to_json(query, a) for a in answers]
    if not answers:
        return f"{query}: no answers"
    return "\n".join(answer_to_text(query, a, i) for i, a in enumerate(answers, 1))


def cmd_index(args) -> int:
    sys.stdout.write(_load_index(args).dump())
    return EXIT_OK


def cmd_check(args) -> int:
    index = _load_index(args)
    violations = check_no_self_containment(index)
    if not violations:
        print(f"ok: {len(index)} nodes, no tag nested inside itself")
        return EXIT_OK
    for a, d in violations:
        print(f"{a!r} contains {d!r}")
    print(f"{len(violations)} violating pair(s)", file=sys.stderr)
    return EXIT_REJECTED


def cmd_query(args) -> int:
    queries = _queries(args)
    index = _load_index(args)
    _gate_nsc(index, args.force)
    trace = (lambda line: print(line, file=sys.stderr)) if args.trace else None
    results = []
    for query in queries:
        stacks = evaluate(query, index, trace=trace)
        answers = generate_solution(query, stacks, _mode(args), skyline=not args.all)
        results.append((query, answers))

    if args.format == "json":
        if len(results) == 1:
            payload = _render(*results[0], "json")
        else:
            payload = [{"query": str(q), "answers": _render(q, a, "json")} for q, a in results]
        print(json.dumps(payload, indent=2))
    else:
        print("\n\n".join(_render(q, a, "text") for q, a in results))
    return EXIT_OK


def _diff(query: QueryTree, index: DocumentIndex, mode: Dominance, every: bool,
          bound: int) -> tuple[list[dict], list[dict]]:
    """(engine-only, oracle-only) answers as JSON objects."""
    engine = generate_solution(query, evaluate(query, index), mode, skyline=not every)
    oracle = all_embeddings(query, index, bound) if every else skytrees_oracle(query, index, mode, bound)
    mine, theirs = set(engine), set(oracle)
    only_engine = sorted(mine - theirs, key=Answer.sort_key)
    only_oracle = sorted(theirs - mine, key=Answer.sort_key)
    return ([answer_to_json(query, a) for a in only_engine],
            [answer_to_json(query, a) for a in only_oracle])


def _report(label: str, only_engine: list[dict], only_oracle: list[dict]) -> bool:
    if not only_engine and not only_oracle:
        print(f"PASS {label}")
        return True
    print(f"FAIL {label}")
    for tag, items in (("engine only", only_engine), ("oracle only", only_oracle)):
        for item in items:
            print(f"  {tag}: {json.dumps(item['bindings'], sort_keys=True)} bits={item['bits']}")
    return False


def cmd_oracle_diff(args) -> int:
    mode = _mode(args)
    ok = True
    if args.file is not None:
        index = _load_index(args)
        _gate_nsc(index, args.force)
        for query in _queries(args):
            ok &= _report(str(query), *_diff(query, index, mode, args.all, args.bound))
        return EXIT_OK if ok else EXIT_REJECTED

    if args.query is not None or args.query_file is not None:
        raise CliError("a query needs an input document", EXIT_INPUT)
    for seed in range(args.seed, args.seed + args.runs):
        rng = random.Random(seed)
        xml = gen.random_document(rng, max_nodes=args.nodes, alphabet=gen.default_alphabet(args.tags),
                                  max_fanout=args.fanout, max_depth=args.depth)
        index = build_index(xml)
        query = parse_query(gen.random_query(rng, index, n_pref=rng.randint(0, args.max_pref),
                                             alphabet=gen.default_alphabet(args.tags)))
        ok &= _report(f"seed={seed} {query}", *_diff(query, index, mode, args.all, args.bound))
    return EXIT_OK if ok else EXIT_REJECTED


def cmd_generate(args) -> int:
    rng = random.Random(args.seed)
    print(gen.random_document(rng, max_nodes=args.nodes, alphabet=gen.default_alphabet(args.tags),
                              max_fanout=args.fanout, max_depth=args.depth))
    return EXIT_OK


def _shape_options(p: argparse.ArgumentParser, nodes: int) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (default: %(default)s)")
    p.add_argument("--nodes", type=int, default=nodes, help="maximum document size (default: %(default)s)")
    p.add_argument("--tags", type=int, default=6, help="alphabet size, at most 26 (default: %(default)s)")
    p.add_argument("--fanout", type=int, default=4, help="maximum children per node (default: %(default)s)")
    p.add_argument("--depth", type=int, default=6, help="maximum depth (default: %(default)s)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skytrees", description="Twig queries with structural preferences over XML.",
        epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    doc = argparse.ArgumentParser(add_help=False)
    doc.add_argument("--text-mode", choices=["ignore", "as-leaf"], default="as-leaf",
                     help="drop text or turn each text run into a leaf node (default: %(default)s)")

    evaluation = argparse.ArgumentParser(add_help=False)
    evaluation.add_argument("query", nargs="?", help="query string, e.g. 'a/b[/c]/d?[/e?]/f'")
    evaluation.add_argument("--query-file", help="file with one query per line")
    evaluation.add_argument("--dominance", choices=["global", "per-binding"], default="global",
                            help="compare all answers, or only answers sharing their required "
                                 "bindings (default: %(default)s)")
    evaluation.add_argument("--all", action="store_true", help="every match, without skyline filtering")
    evaluation.add_argument("--force", action="store_true",
                            help="evaluate even if a tag is nested inside itself")

    p = sub.add_parser("index", parents=[doc], help="print the region-coded index")
    p.add_argument("file", help="XML file, or - for standard input")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("check", parents=[doc], help="report tags nested inside themselves")
    p.add_argument("file", help="XML file, or - for standard input")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("query", parents=[doc, evaluation], help="evaluate a query",
                       epilog=_EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--file", "-f", required=True, help="XML file, or - for standard input")
    p.add_argument("--format", choices=["json", "text"], default="json")
    p.add_argument("--trace", action="store_true", help="log pushes, pops and phases to stderr")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("oracle-diff", parents=[doc, evaluation],
                       help="compare the engine with brute-force enumeration",
                       description="With --file, check the given queries on that document; "
                                   "otherwise check --runs random instances starting at --seed.")
    p.add_argument("--file", "-f", help="XML file, or - for standard input")
    p.add_argument("--runs", type=int, default=1, help="random instances to check (default: %(default)s)")
    p.add_argument("--max-pref", type=int, default=3,
                   help="maximum preference nodes per random query (default: %(default)s)")
    p.add_argument("--bound", type=int, default=DEFAULT_BOUND,
                   help="give up when the candidate product exceeds this (default: %(default)s)")
    _shape_options(p, nodes=40)
    p.set_defaults(func=cmd_oracle_diff)

    p = sub.add_parser("generate", help="print a random document without self-nested tags")
    _shape_options(p, nodes=40)
    p.set_defaults(func=cmd_generate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"skytrees: {exc}", file=sys.stderr)
        return exc.code
    except OracleBoundExceeded as exc:
        print(f"skytrees: {exc}; use a smaller input or raise --bound", file=sys.stderr)
        return EXIT_BOUND


if __name__ == "__main__":
    sys.exit(main())
