"""Command line interface: one subcommand per pipeline stage.

    corrobe fixture --out demo            build the synthetic demo session
    corrobe corrupt --manifest m --out d  generate corrupted images
    corrobe evaluate --key snow_4         caption metrics for one key
    corrobe analyze-tasks --key snow_4    task behavior metrics
    corrobe discover --key snow_4 --task relation
    corrobe probe-requests                emit required probe sentences
    corrobe serve --port 8000             host the API and dashboard

Stages that read or write a session directory take --data-dir (or the
CORROBE_DATA_DIR environment variable).
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .corruption.batch import corrupt_dataset
from .corruption.specs import CorruptionSpec, enumerate_corruptions, load_params
from .errors import CorrobeError
from .pipeline import (
    Session,
    probe_requests,
    run_corrupt,
    run_discovery,
    run_evaluate,
    run_tasks,
)
from .sg import TaskCategory
from .store.manifest import load_manifest

_data_dir_option = click.option(
    "--data-dir",
    envvar="CORROBE_DATA_DIR",
    type=click.Path(path_type=Path),
    required=True,
    help="Session directory (env: CORROBE_DATA_DIR).",
)


@click.group()
def main() -> None:
    """Corruption-robustness workbench for image captioning models."""


def _fail(e: Exception) -> None:
    click.echo(f"error: {e}", err=True)
    sys.exit(1)


@main.command()
@click.option("--out", type=click.Path(path_type=Path), required=True)
def fixture(out: Path) -> None:
    """Generate the synthetic demo dataset and session directory."""
    from .fixtures import build_fixture

    info = build_fixture(out)
    click.echo(json.dumps(info, indent=2))


@main.command()
@click.option("--manifest", "manifest_path", type=click.Path(path_type=Path, exists=True), required=True)
@click.option("--out", "out_dir", type=click.Path(path_type=Path), required=True)
@click.option("--specs", "specs_arg", default="all", show_default=True,
              help='"all" or a comma-separated list of corruption keys.')
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--workers", default=4, show_default=True, type=int)
@click.option("--params", "params_path", type=click.Path(path_type=Path, exists=True), default=None,
              help="Alternative corruption parameter file.")
def corrupt(manifest_path: Path, out_dir: Path, specs_arg: str, seed: int, workers: int, params_path: Path | None) -> None:
    """Apply corruption specs to every image in the manifest."""
    try:
        params = load_params(str(params_path) if params_path else None)
        manifest = load_manifest(manifest_path)
        if specs_arg.strip() == "all":
            specs = enumerate_corruptions(params)
        else:
            specs = [CorruptionSpec.from_key(k.strip(), params) for k in specs_arg.split(",") if k.strip()]
        report = corrupt_dataset(manifest, specs, seed, out_dir, params=params, workers=workers)
    except CorrobeError as e:
        _fail(e)
    click.echo(json.dumps(report.to_dict(), indent=2))
    if report.failures:
        sys.exit(2)


@main.command("corrupt-session")
@_data_dir_option
@click.option("--specs", "specs_arg", default="all", show_default=True)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--workers", default=4, show_default=True, type=int)
def corrupt_session(data_dir: Path, specs_arg: str, seed: int, workers: int) -> None:
    """Corrupt a session's images into {data-dir}/corrupted/."""
    try:
        session = Session.load(data_dir)
        params = session.corruption_params()
        specs = None if specs_arg.strip() == "all" else [
            CorruptionSpec.from_key(k.strip(), params) for k in specs_arg.split(",") if k.strip()
        ]
        report = run_corrupt(session, specs=specs, seed=seed, workers=workers)
    except CorrobeError as e:
        _fail(e)
    click.echo(json.dumps(report.to_dict(), indent=2))


@main.command()
@_data_dir_option
@click.option("--key", required=True, help="Corruption key, e.g. snow_4 or clean.")
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None,
              help="Also write the report records to this JSONL file.")
def evaluate(data_dir: Path, key: str, out_path: Path | None) -> None:
    """Compute corpus and per-instance caption metrics for one key."""
    try:
        session = Session.load(data_dir)
        corpus, instances = run_evaluate(session, key)
    except CorrobeError as e:
        _fail(e)
    if out_path is not None:
        with Path(out_path).open("w") as f:
            f.write(json.dumps({"scope": "corpus", **corpus.values()}, sort_keys=True) + "\n")
            for r in instances:
                f.write(json.dumps({"scope": "instance", "instance_id": r.instance_id, **r.values()}, sort_keys=True) + "\n")
    click.echo(json.dumps({"key": key, "corpus": corpus.values(), "instances": len(instances)}, indent=2))


@main.command("analyze-tasks")
@_data_dir_option
@click.option("--key", required=True)
def analyze_tasks(data_dir: Path, key: str) -> None:
    """Compute task behavior metrics (attempt/error/shift/sensitivity)."""
    try:
        session = Session.load(data_dir)
        _, summaries = run_tasks(session, key)
    except CorrobeError as e:
        _fail(e)
    click.echo(
        json.dumps(
            {
                "key": key,
                "tasks": [
                    {
                        "task": s.task.value,
                        "attempt_count": s.attempt_count,
                        "error_rate": s.error_rate,
                        "shift_rate": s.shift_rate,
                        "sensitivity": s.sensitivity,
                    }
                    for s in summaries
                ],
            },
            indent=2,
        )
    )


@main.command()
@_data_dir_option
@click.option("--key", required=True)
@click.option("--task", "task_value", required=True,
              type=click.Choice([t.value for t in TaskCategory]))
def discover(data_dir: Path, key: str, task_value: str) -> None:
    """Cluster attempting instances of one task under one corruption key."""
    try:
        session = Session.load(data_dir)
        model = run_discovery(session, key, TaskCategory(task_value))
    except CorrobeError as e:
        _fail(e)
    click.echo(
        json.dumps(
            {
                "key": key,
                "task": task_value,
                "instances": model.n,
                "clusters": model.cluster_ids(),
                "outliers": int((model.labels == -1).sum()),
                "centroid_labels": model.centroid_labels,
            },
            indent=2,
        )
    )


@main.command("probe-requests")
@_data_dir_option
@click.option("--out", "out_path", type=click.Path(path_type=Path), default=None)
def probe_requests_cmd(data_dir: Path, out_path: Path | None) -> None:
    """Emit the probe sentences an external encoder must produce."""
    try:
        session = Session.load(data_dir)
        sentences = probe_requests(session)
    except CorrobeError as e:
        _fail(e)
    text = "".join(s + "\n" for s in sentences)
    if out_path is not None:
        Path(out_path).write_text(text)
        click.echo(f"{len(sentences)} probe sentences -> {out_path}")
    else:
        click.echo(text, nl=False)


@main.command()
@_data_dir_option
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--dashboard", "dashboard_dist", type=click.Path(path_type=Path), default=None,
              help="Directory of built dashboard assets to host at /.")
def serve(data_dir: Path, port: int, host: str, dashboard_dist: Path | None) -> None:
    """Host the analysis API (and the dashboard, when built)."""
    import uvicorn

    from .service import create_app

    try:
        app = create_app(data_dir, dashboard_dist=dashboard_dist)
    except CorrobeError as e:
        _fail(e)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
