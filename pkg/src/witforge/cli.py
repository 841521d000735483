"""Command-line interface.

witforge joke: one-shot joke from a sentence.
witforge eval: the evaluation workflow as four subcommands.
witforge serve: the REST session service.
"""
from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path
from typing import Optional

from .backend import BackendError, ScriptedMockBackend, live_backend_from_env
from .evaluation import (
    EmptySource,
    FormatError,
    InsufficientEligible,
    UnknownPair,
    aggregate,
    emit_report,
    gpt_lol_respond,
    ingest_dataset,
    load_pair_map,
    load_ratings,
    randomize_presentation,
    sample_inputs,
)
from .pipeline import PipelineConfig, PipelineError, run_pipeline


def _build_backend(mock_path: Optional[str]):
    if mock_path:
        return ScriptedMockBackend.from_file(mock_path)
    return live_backend_from_env()


def _load_config(path: Optional[str]) -> PipelineConfig:
    return PipelineConfig.from_file(path) if path else PipelineConfig()


def _print_trace(state) -> None:
    print("topic:", state.topic.text)
    if state.handles:
        print("handles:")
        for h in state.handles:
            print(f"  - {h.surface} ({h.kind.value})")
    if state.associations:
        for idx, lst in enumerate(state.associations):
            print(f"associations[{state.handles[idx].surface}]:")
            for a in lst:
                print(f"  - {a.text}")
    if state.candidates:
        print("candidates:")
        for c in state.candidates:
            src = ", ".join(a.text for a in c.sources)
            print(f"  - [{c.mechanism.value}] {c.text}" + (f"  (from: {src})" if src else ""))
    if state.jokes:
        print("jokes:")
        for i, j in enumerate(state.jokes):
            marker = "*" if state.selected_index == i else "-"
            print(f"  {marker} {j.full_text}")


def _cmd_joke(args: argparse.Namespace) -> int:
    backend = _build_backend(args.mock)
    config = _load_config(args.config)
    joke, state = run_pipeline(args.sentence, backend, config)
    if args.trace:
        _print_trace(state)
        print()
    print(joke.full_text)
    return 0


def _cmd_eval_sample(args: argparse.Namespace) -> int:
    comments = ingest_dataset(args.dataset)
    sentences = sample_inputs(comments, args.n, args.seed)
    text = "\n".join(sentences) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_eval_generate(args: argparse.Namespace) -> int:
    sentences = [
        line.strip() for line in Path(args.inputs).read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
    if args.source == "human":
        print("human responses come from people, not this tool", file=sys.stderr)
        return 1
    backend = _build_backend(args.mock)
    config = _load_config(args.config)
    rows = []
    for i, sentence in enumerate(sentences):
        if args.source == "gpt_lol":
            response = gpt_lol_respond(sentence, backend)
        else:
            joke, _ = run_pipeline(sentence, backend, config)
            response = joke.full_text
        rows.append((f"{args.source}-{i + 1:02d}", args.source, sentence, response))
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_id", "source", "input", "response"])
        writer.writerows(rows)
    return 0


def _cmd_eval_shuffle(args: argparse.Namespace) -> int:
    mapping = load_pair_map(args.pairs)
    order = randomize_presentation(list(mapping), args.seed)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["pair_id", "source"])
        for pair_id in order:
            writer.writerow([pair_id, mapping[pair_id]])
    return 0


def _cmd_eval_aggregate(args: argparse.Namespace) -> int:
    records = load_ratings(args.ratings)
    mapping = load_pair_map(args.pairs)
    result = aggregate(records, mapping)
    emit_report(result, mapping, args.out)
    for summary in result.summaries:
        print(f"{summary.source}: mean {summary.mean_rating:.4f}, "
              f"jokes {summary.pct_jokes:.2f}%")
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    backend = _build_backend(args.mock)
    config = _load_config(args.config)
    app = create_app(backend, args.state_dir, config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="witforge")
    sub = parser.add_subparsers(dest="command", required=True)

    joke = sub.add_parser("joke", help="improvise one joke from a sentence")
    joke.add_argument("sentence")
    joke.add_argument("--trace", action="store_true", help="print the full stage trace")
    joke.add_argument("--config", help="pipeline configuration JSON file")
    joke.add_argument("--mock", help="scripted mock backend JSON file")
    joke.set_defaults(fn=_cmd_joke)

    ev = sub.add_parser("eval", help="evaluation workflow")
    evsub = ev.add_subparsers(dest="subcommand", required=True)

    sample = evsub.add_parser("sample", help="sample eligible input sentences")
    sample.add_argument("--dataset", required=True)
    sample.add_argument("--n", type=int, default=13)
    sample.add_argument("--seed", type=int, default=0)
    sample.add_argument("--out")
    sample.set_defaults(fn=_cmd_eval_sample)

    generate = evsub.add_parser("generate", help="generate one response per input")
    generate.add_argument("--inputs", required=True, help="one sentence per line")
    generate.add_argument("--source", required=True, choices=["gpt_lol", "witscript3", "human"])
    generate.add_argument("--out", required=True)
    generate.add_argument("--config")
    generate.add_argument("--mock")
    generate.set_defaults(fn=_cmd_eval_generate)

    shuffle = evsub.add_parser("shuffle", help="randomize presentation order")
    shuffle.add_argument("--pairs", required=True)
    shuffle.add_argument("--seed", type=int, default=0)
    shuffle.add_argument("--out", required=True)
    shuffle.set_defaults(fn=_cmd_eval_shuffle)

    agg = evsub.add_parser("aggregate", help="aggregate ratings into a report")
    agg.add_argument("--ratings", required=True)
    agg.add_argument("--pairs", required=True)
    agg.add_argument("--out", required=True)
    agg.set_defaults(fn=_cmd_eval_aggregate)

    serve = sub.add_parser("serve", help="run the session REST service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8700)
    serve.add_argument("--state-dir", default="witforge-sessions")
    serve.add_argument("--config")
    serve.add_argument("--mock")
    serve.set_defaults(fn=_cmd_serve)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except PipelineError as exc:
        stage = exc.stage or "pipeline"
        print(f"error at {stage}: {exc}", file=sys.stderr)
        return 1
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return 1
    except (FormatError, InsufficientEligible, UnknownPair, EmptySource) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
