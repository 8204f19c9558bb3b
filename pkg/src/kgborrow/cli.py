"""Command-line entry points.

Three subcommands cover the operational surface: ``run`` executes a full
config-driven experiment, ``export`` converts embedding dumps between the
text and binary formats, and ``borrow`` runs just the borrowing stages
and writes the borrowed triples as a textual-triple TSV. Failures exit
nonzero after printing one ``[stage] message`` line to stderr.
"""

import argparse
import dataclasses
import sys

from .kg import load_knowledge_graph, load_textual_triples, save_textual_triples
from .pipeline import (
    MODES,
    RunConfig,
    StageError,
    compute_borrowed,
    export_embeddings,
    load_embeddings,
    run,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgborrow")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a config-driven experiment")
    p_run.add_argument("--config", required=True, help="RunConfig JSON file")
    p_run.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_run.add_argument("--out", default=None, help="override the output directory")

    p_export = sub.add_parser("export", help="convert an embedding dump")
    p_export.add_argument("--embeddings", required=True, help="existing entity dump")
    p_export.add_argument("--format", required=True, choices=("text", "binary"))
    p_export.add_argument("--out", default=None, help="output path (default: derived)")
    p_export.add_argument("--in-format", choices=("text", "binary"), default=None,
                          help="input format (default: from extension)")

    p_borrow = sub.add_parser("borrow", help="standalone borrowing stage")
    p_borrow.add_argument("--mode", required=True, choices=[m for m in MODES if m not in ("none", "extracted-only")])
    p_borrow.add_argument("--k", type=int, default=None)
    p_borrow.add_argument("--train", required=True)
    p_borrow.add_argument("--valid", default=None)
    p_borrow.add_argument("--test", default=None)
    p_borrow.add_argument("--textual", required=True)
    p_borrow.add_argument("--entity-vectors", default=None)
    p_borrow.add_argument("--ldp-vectors", default=None)
    p_borrow.add_argument("--min-pairs", type=int, default=1)
    p_borrow.add_argument("--targets", nargs="+", default=["test"], choices=("train", "valid", "test"))
    p_borrow.add_argument("--seed", type=int, default=0)
    p_borrow.add_argument("--out", required=True, help="borrowed-triples TSV to write")
    return parser


def _guess_format(path: str) -> str:
    return "text" if path.endswith((".tsv", ".txt", ".csv")) else "binary"


def _cmd_run(args) -> int:
    config = RunConfig.from_json_file(args.config)
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    if args.out is not None:
        config = dataclasses.replace(config, out_dir=args.out)
    outcome = run(config)
    sys.stdout.write(outcome.report.to_markdown())
    return 0


def _cmd_export(args) -> int:
    in_fmt = args.in_format or _guess_format(args.embeddings)
    table = load_embeddings(args.embeddings, in_fmt)
    out = args.out
    if out is None:
        stem = args.embeddings.rsplit(".", 1)[0]
        out = f"{stem}.{'tsv' if args.format == 'text' else 'bin'}"
    export_embeddings(table, out, args.format)
    print(out)
    return 0


def _cmd_borrow(args) -> int:
    config = RunConfig(
        train_path=args.train,
        valid_path=args.valid,
        test_path=args.test or args.train,
        textual_path=args.textual,
        entity_vectors_path=args.entity_vectors,
        ldp_vectors_path=args.ldp_vectors,
        mode=args.mode,
        k=args.k,
        min_pairs=args.min_pairs,
        borrow_targets=tuple(args.targets),
        seed=args.seed,
    )
    config.validate()
    stage = "load"
    try:
        kg = load_knowledge_graph(config.train_path, config.valid_path,
                                  args.test if args.test else None)
        stage = "textual"
        corpus = load_textual_triples(config.textual_path, kg.entities, config.min_pairs).corpus
        stage = "borrow"
        borrowed = compute_borrowed(config, kg, corpus)
        if borrowed is None:
            raise ValueError(f"mode {config.mode!r} produced no borrowed triples")
        save_textual_triples(args.out, borrowed, kg.entities)
    except StageError:
        raise
    except Exception as err:
        raise StageError(stage, err) from err
    print(f"{args.out}: {len(borrowed)} borrowed triples")
    return 0


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "export": _cmd_export, "borrow": _cmd_borrow}
    try:
        return handlers[args.command](args)
    except StageError as err:
        print(str(err), file=sys.stderr)
        return 1
    except Exception as err:  # config/IO errors outside named stages
        print(f"[{args.command}] {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
