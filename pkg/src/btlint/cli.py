"""Command line entry points.

Exit codes: 0 when the run is clean (no automatic or confirmed defects),
1 when such defects are present, 2 on usage, parse or configuration
errors. A run without a decision file reports undecided defects as
pending, which does not fail the run; automatic incompleteness does.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .bts import BtsSyntaxError, emit_bts, parse_bts
from .defects import AUTOMATIC, CONFIRMED
from .model import ModelError, ModelSet
from .relations import KINDS, relation_graph
from .session import (
    SchemaError,
    Session,
    decisions_from_json,
    open_session,
)
from .similarity import Strategy, StrategyInvalid, default_strategy, load_strategy
from .util import canonical_json

STRATEGY_ENV = "BTLINT_STRATEGY"

EXIT_CLEAN = 0
EXIT_DEFECTS = 1
EXIT_ERROR = 2


class _InputError(Exception):
    pass


def _fail(message: str) -> "_InputError":
    return _InputError(message)


def _load_models(paths) -> ModelSet:
    models = []
    for path in paths:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise _fail(f"cannot read {path}: {exc.strerror or exc}") from exc
        try:
            models.extend(parse_bts(text, filename=os.fspath(path)))
        except (BtsSyntaxError, ModelError) as exc:
            raise _fail(str(exc)) from exc
    try:
        return ModelSet(models)
    except ModelError as exc:
        raise _fail(str(exc)) from exc


def _load_strategy(path_option) -> Strategy:
    path = path_option or os.environ.get(STRATEGY_ENV)
    try:
        return load_strategy(path) if path else default_strategy()
    except OSError as exc:
        raise _fail(f"cannot read strategy {path}: {exc.strerror or exc}") from exc
    except StrategyInvalid as exc:
        raise _fail(f"invalid strategy: {exc}") from exc


def cmd_check(args) -> int:
    model_set = _load_models(args.paths)
    strategy = _load_strategy(args.strategy)
    session = Session(model_set, strategy)
    if args.decisions:
        try:
            with open(args.decisions, "r", encoding="utf-8") as fh:
                session.replay(decisions_from_json(fh.read()))
        except OSError as exc:
            raise _fail(f"cannot read {args.decisions}: {exc.strerror or exc}") from exc
        except SchemaError as exc:
            raise _fail(f"{args.decisions}: {exc}") from exc
    report = session.report()
    for warning in session.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if args.format == "json":
        sys.stdout.write(report.to_json())
    else:
        sys.stdout.write(report.render_text())
    return EXIT_DEFECTS if report.actionable() else EXIT_CLEAN


def cmd_relations(args) -> int:
    model_set = _load_models(args.paths)
    strategy = _load_strategy(args.strategy)
    graph = relation_graph(model_set, strategy)
    candidates = list(graph)
    if args.kind:
        if args.kind not in KINDS:
            raise _fail(f"unknown relation kind {args.kind!r}; one of {', '.join(KINDS)}")
        candidates = [c for c in candidates if c.kind == args.kind]
    if args.format == "json":
        data = {"schema_version": 1, "relations": [c.to_dict() for c in candidates]}
        sys.stdout.write(canonical_json(data))
    else:
        if not candidates:
            print("no relations detected")
        for c in candidates:
            pairs = ", ".join(f"{p}~{ch}" for p, ch in c.pairs)
            print(f"{c.kind:<19} {c.parent_model} -> {c.child_model}  "
                  f"pairs: {pairs}  similarity: {c.similarity:g}")
    return EXIT_CLEAN


def cmd_fmt(args) -> int:
    # Parse everything before touching any file, so a bad input leaves
    # the whole batch unmodified.
    formatted: list[tuple[str, str, str]] = []
    for path in args.paths:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
            model_set = parse_bts(text, filename=os.fspath(path))
        except OSError as exc:
            raise _fail(f"cannot read {path}: {exc.strerror or exc}") from exc
        except (BtsSyntaxError, ModelError) as exc:
            raise _fail(str(exc)) from exc
        formatted.append((path, text, emit_bts(model_set)))
    for path, before, after in formatted:
        if before != after:
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(after)
            print(f"formatted {path}")
    return EXIT_CLEAN


def cmd_serve(args) -> int:
    from .server import create_server

    try:
        session = open_session(args.path, args.strategy or os.environ.get(STRATEGY_ENV))
    except OSError as exc:
        raise _fail(f"cannot read {args.path}: {exc.strerror or exc}") from exc
    except (BtsSyntaxError, ModelError, StrategyInvalid, SchemaError) as exc:
        raise _fail(str(exc)) from exc
    for warning in session.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    autosave = None
    if not args.no_save_decisions:
        from .session import sidecar_path

        autosave = sidecar_path(args.path)
    server = create_server(
        session, host=args.host, port=args.port,
        static_dir=args.static, autosave=autosave,
    )
    print(f"btlint review session on {server.url} (Ctrl-C to stop)")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="btlint",
        description="Lint behavior-tree requirement models for integration defects.",
    )
    parser.add_argument("--version", action="version", version=f"btlint {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_strategy(p):
        p.add_argument(
            "--strategy",
            help=f"strategy JSON file (default: ${STRATEGY_ENV} or the built-in default)",
        )

    p_check = sub.add_parser("check", help="detect defects and set the exit code")
    p_check.add_argument("paths", nargs="+", help=".bts input files")
    add_strategy(p_check)
    p_check.add_argument("--decisions", help="JSON decision log to apply")
    p_check.add_argument("--format", choices=("text", "json"), default="text")
    p_check.set_defaults(func=cmd_check)

    p_rel = sub.add_parser("relations", help="print the integration relation graph")
    p_rel.add_argument("paths", nargs="+", help=".bts input files")
    add_strategy(p_rel)
    p_rel.add_argument("--kind", help="only show one relation kind")
    p_rel.add_argument("--format", choices=("text", "json"), default="text")
    p_rel.set_defaults(func=cmd_relations)

    p_fmt = sub.add_parser("fmt", help="rewrite files to canonical form")
    p_fmt.add_argument("paths", nargs="+", help=".bts files to rewrite in place")
    p_fmt.set_defaults(func=cmd_fmt)

    p_serve = sub.add_parser("serve", help="run the review session HTTP service")
    p_serve.add_argument("path", help=".bts input file")
    add_strategy(p_serve)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)
    p_serve.add_argument("--static", help="directory with the built review UI")
    p_serve.add_argument(
        "--no-save-decisions", action="store_true",
        help="do not persist decisions to the input's sidecar file",
    )
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"btlint: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
