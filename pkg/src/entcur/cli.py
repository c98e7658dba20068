"""Command line front end.

Thin client over the experiment handlers: by default each subcommand
runs in-process; with ``--server URL`` it sends the same request to a
running service instead and relays the response.  Progress goes to
standard error; the machine-readable outcome summary is the only thing
printed to standard output.  Data and tables live in files.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from typing import Any

from . import experiment
from .config import RunConfig, load_config
from .data.io import DatasetFormatError


def _progress(message: str) -> None:
    print(message, file=sys.stderr)


def _effective_config(args: argparse.Namespace) -> RunConfig:
    config = load_config(args.config)
    overrides: dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "jobs", None) is not None:
        overrides["jobs"] = args.jobs
    if overrides:
        config = RunConfig.model_validate({**config.model_dump(), **overrides})
    return config


def _emit(summary: dict) -> None:
    print(json.dumps(summary, indent=2))


def _post(server: str, path: str, body: dict) -> dict:
    import httpx

    response = httpx.post(server.rstrip("/") + path, json=body, timeout=None)
    if response.status_code >= 400:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise RuntimeError(f"server returned {response.status_code}: {detail}")
    return response.json()


def _get(server: str, path: str) -> dict:
    import httpx

    response = httpx.get(server.rstrip("/") + path, timeout=30)
    response.raise_for_status()
    return response.json()


def _body(config: RunConfig, **extra) -> dict:
    return {"config": config.model_dump(mode="json"), **extra}


def cmd_gen_data(args: argparse.Namespace) -> dict:
    config = _effective_config(args)
    if args.server:
        return _post(args.server, "/generate", _body(config, out_dir=args.out, force=args.force))
    _progress(f"generating benchmark data under {args.out}")
    summary = experiment.cmd_gen_data(config, args.out, args.force)
    _progress("train samples per device: " + json.dumps(summary["train_device_counts"]))
    return summary


def cmd_score(args: argparse.Namespace) -> dict:
    config = _effective_config(args)
    if args.server:
        return _post(
            args.server,
            "/score",
            _body(config, dataset_path=args.data, out_path=args.out, force=args.force),
        )
    _progress(f"scoring {args.data}")
    summary = experiment.cmd_score(config, args.data, args.out, args.force)
    e = summary["entropy"]
    _progress(
        f"entropy min={e['min']:.4f} median={e['median']:.4f} max={e['max']:.4f}; "
        f"invariant={summary['n_invariant']} specific={summary['n_specific']}"
    )
    return summary


def cmd_train(args: argparse.Namespace) -> dict:
    config = _effective_config(args)
    if args.mode == "curriculum" and not args.partition:
        raise ValueError("curriculum mode requires --partition")
    if args.server:
        return _post(
            args.server,
            "/train",
            _body(
                config,
                dataset_path=args.data,
                partition_path=args.partition,
                mode=args.mode,
                out_prefix=args.out,
                force=args.force,
                run_index=args.run_index,
                target_steps=args.target_steps,
            ),
        )
    _progress(f"training ({args.mode}) on {args.data}")
    summary = experiment.cmd_train(
        config,
        args.data,
        args.partition or "",
        args.mode,
        args.out,
        force=args.force,
        run_index=args.run_index,
        target_steps=args.target_steps,
    )
    _progress(f"finished after {summary['steps']} steps ({summary['epochs']} epochs)")
    return summary


def cmd_evaluate(args: argparse.Namespace) -> dict:
    config = _effective_config(args)
    if args.server:
        return _post(
            args.server,
            "/evaluate",
            _body(
                config,
                dataset_path=args.data,
                model_path=args.model,
                out_path=args.out,
                force=args.force,
            ),
        )
    summary = experiment.cmd_evaluate(config, args.data, args.model, args.out, args.force)
    _progress(
        f"class-wise accuracy {summary['overall_classwise_acc']:.4f} "
        f"(seen {summary['seen_acc']}, unseen {summary['unseen_acc']})"
    )
    return summary


def cmd_compare(args: argparse.Namespace) -> dict:
    config = _effective_config(args)
    if args.server:
        job = _post(args.server, "/compare", _body(config, out_dir=args.out, force=args.force))
        shown = 0
        while job["status"] in ("queued", "running"):
            time.sleep(args.poll_interval)
            job = _get(args.server, f"/compare/{job['job_id']}")
            for line in job["progress"][shown:]:
                _progress(line)
            shown = len(job["progress"])
        if job["status"] == "failed":
            raise RuntimeError(job["error"] or "comparison failed")
        return job["result"]
    return experiment.cmd_compare(config, args.out, force=args.force, progress=_progress)


def cmd_serve(args: argparse.Namespace) -> dict:
    import uvicorn

    uvicorn.run("entcur.service.app:app", host=args.host, port=args.port, log_level="info")
    return {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entcur",
        description="Entropy-guided curriculum training on a synthetic device-shift benchmark.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, jobs: bool = False) -> None:
        p.add_argument("--config", required=True, help="run configuration (JSON)")
        p.add_argument("--force", action="store_true", help="overwrite existing outputs")
        p.add_argument("--seed", type=int, default=None, help="override config seed")
        p.add_argument("--server", default=None, help="send the request to a running service")
        if jobs:
            p.add_argument("--jobs", type=int, default=None, help="override worker count")

    p = sub.add_parser("gen-data", help="generate the benchmark train/test files")
    common(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(handler=cmd_gen_data)

    p = sub.add_parser("score", help="score a training set and write the partition file")
    common(p)
    p.add_argument("--data", required=True, help="training dataset file")
    p.add_argument("--out", required=True, help="partition file path")
    p.set_defaults(handler=cmd_score)

    p = sub.add_parser("train", help="train one run in curriculum or baseline mode")
    common(p)
    p.add_argument("--data", required=True, help="training dataset file")
    p.add_argument("--partition", default=None, help="partition file (curriculum mode)")
    p.add_argument("--mode", required=True, choices=("curriculum", "baseline"))
    p.add_argument("--out", required=True, help="output prefix for metrics/model files")
    p.add_argument("--run-index", type=int, default=0, help="seed-stream run index")
    p.add_argument(
        "--target-steps",
        type=int,
        default=None,
        help="baseline step budget (defaults to the curriculum epoch cap)",
    )
    p.set_defaults(handler=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a saved model on a dataset file")
    common(p)
    p.add_argument("--data", required=True, help="evaluation dataset file")
    p.add_argument("--model", required=True, help="model checkpoint file")
    p.add_argument("--out", default=None, help="optional report file path")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("compare", help="run the paired grid and emit tables")
    common(p, jobs=True)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--poll-interval", type=float, default=2.0, help=argparse.SUPPRESS)
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(handler=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        summary = args.handler(args)
    except (ValueError, FileExistsError, FileNotFoundError, DatasetFormatError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if summary:
        _emit(summary)
    return 0


if __name__ == "__main__":
    sys.exit(main())
