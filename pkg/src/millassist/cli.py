"""Command line entry points.

Exit codes: 0 on success, 1 on an operational failure (missing data, bad
file), 2 on usage errors. All commands that read a stream accept either a
scenario YAML (--config) or the builtin reference mill shaped by --seed,
--duration-s and --reel-duration-s.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .alarms import mine_sequences, read_patterns, write_patterns
from .errors import MillAssistError
from .forecast import Hyperparams
from .gateway import Platform, create_app, render_report
from .records import AlarmEvent, read_log
from .sim import (ScenarioConfig, build_scenario, default_config, load_config,
                  write_plan_log)


def _canon(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _echo_doc(doc: dict, jsonl: bool) -> None:
    if jsonl:
        click.echo(_canon(doc))
    else:
        for key in sorted(doc):
            click.echo(f"{key}: {doc[key]}")


def _scenario_config(config_path: str | None, seed: int, duration_s: float,
                     reel_duration_s: float) -> ScenarioConfig:
    if config_path:
        return load_config(config_path)
    return default_config(seed=seed, duration_s=duration_s,
                          reel_duration_s=reel_duration_s)


def _fail(message: str) -> "sys.NoReturn":
    raise click.ClickException(message)


_common = [
    click.option("--config", "config_path", type=click.Path(exists=True),
                 default=None, help="scenario YAML (overrides the seed trio)"),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--duration-s", type=float, default=3600.0, show_default=True),
    click.option("--reel-duration-s", type=float, default=1800.0,
                 show_default=True),
]


def scenario_options(fn):
    for option in reversed(_common):
        fn = option(fn)
    return fn


@click.group()
def main() -> None:
    """Operator assistance toolkit for a recycled-paper mill."""


@main.command()
@scenario_options
@click.option("--out", "out_path", type=click.Path(), required=True,
              help="where to write the line-delimited stream")
def sim(config_path, seed, duration_s, reel_duration_s, out_path) -> None:
    """Generate a deterministic scenario stream."""
    config = _scenario_config(config_path, seed, duration_s, reel_duration_s)
    try:
        plan = build_scenario(config)
    except MillAssistError as exc:
        _fail(str(exc))
    n = write_plan_log(plan, out_path)
    click.echo(f"wrote {n} records to {out_path}")


@main.command()
@scenario_options
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--jsonl", is_flag=True, help="machine-readable output")
def replay(config_path, seed, duration_s, reel_duration_s, log_path,
           jsonl) -> None:
    """Re-run the alarm pipeline over a recorded stream and print metrics."""
    config = _scenario_config(config_path, seed, duration_s, reel_duration_s)
    try:
        platform = Platform.from_log(config, log_path)
    except MillAssistError as exc:
        _fail(str(exc))
    metrics = platform.flood_metrics()
    metrics["reels"] = len(platform.store.reel_ids)
    _echo_doc(metrics, jsonl)


@main.command()
@scenario_options
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--parameter", default="tensile_strength", show_default=True)
@click.option("--n-trees", type=int, default=100, show_default=True)
@click.option("--model-out", type=click.Path(), default=None,
              help="also save the fitted model as JSON")
@click.option("--jsonl", is_flag=True)
def train(config_path, seed, duration_s, reel_duration_s, log_path, parameter,
          n_trees, model_out, jsonl) -> None:
    """Fit the quality model for one lab parameter."""
    config = _scenario_config(config_path, seed, duration_s, reel_duration_s)
    try:
        platform = Platform.from_log(config, log_path)
        hp = Hyperparams(n_trees=n_trees, seed=config.seed)
        trained = platform.train_quality(parameter, hyperparams=hp)
    except MillAssistError as exc:
        _fail(str(exc))
    if model_out:
        trained.model.save(model_out)
    doc = {"model_version": trained.model.model_version,
           "parameter": parameter,
           "training_reels": len(trained.training_ids),
           "holdout_reels": len(trained.holdout_ids),
           "oob_mape": round(trained.model.report.oob_mape, 6),
           "holdout_within_rate": round(trained.evaluation.within_rate, 6)}
    _echo_doc(doc, jsonl)


@main.command()
@scenario_options
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--parameter", default="tensile_strength", show_default=True)
@click.option("--n-trees", type=int, default=100, show_default=True)
@click.option("--out-dir", type=click.Path(), required=True,
              help="report.jsonl and figures land here")
@click.option("--jsonl", is_flag=True)
def evaluate(config_path, seed, duration_s, reel_duration_s, log_path,
             parameter, n_trees, out_dir, jsonl) -> None:
    """Train, score the holdout, and render report figures."""
    import numpy as np

    config = _scenario_config(config_path, seed, duration_s, reel_duration_s)
    try:
        platform = Platform.from_log(config, log_path)
        hp = Hyperparams(n_trees=n_trees, seed=config.seed)
        trained = platform.train_quality(parameter, hyperparams=hp)
    except MillAssistError as exc:
        _fail(str(exc))
    labels = platform.labeled_reels(parameter)
    y_true = np.array([labels[r] for r in trained.holdout_ids])
    X = np.vstack([platform.features_for(r) for r in trained.holdout_ids])
    y_pred = trained.model.predict(X)
    spec_low, spec_high = platform.spec_limits(parameter)
    paths = render_report(trained.evaluation, y_true, y_pred, out_dir,
                          spec_low=spec_low, spec_high=spec_high)
    doc = dict(trained.evaluation.to_dict())
    doc.update(paths)
    _echo_doc(doc, jsonl)
    click.echo(f"within-band rate: {trained.evaluation.within_rate:.4f}")


@main.command(name="mine-patterns")
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--min-support", type=int, default=3, show_default=True)
@click.option("--max-gap-s", type=float, default=60.0, show_default=True)
@click.option("--max-len", type=int, default=4, show_default=True)
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="write patterns as line-delimited JSON")
def mine_patterns(log_path, min_support, max_gap_s, max_len, out_path) -> None:
    """Mine frequent alarm sequences from a recorded stream."""
    with open(log_path, "r", encoding="utf-8") as fp:
        alarms = [r for r in read_log(fp) if isinstance(r, AlarmEvent)]
    try:
        patterns = mine_sequences(alarms, min_support=min_support,
                                  max_gap_s=max_gap_s, max_len=max_len)
    except MillAssistError as exc:
        _fail(str(exc))
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fp:
            write_patterns(patterns, fp)
    for p in patterns:
        click.echo(_canon({"sequence": list(p.sequence), "support": p.support}))
    click.echo(f"{len(patterns)} patterns "
               f"(support >= {min_support}, gap <= {max_gap_s}s)")


@main.command()
@scenario_options
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--t0", type=int, required=True)
@click.option("--t1", type=int, required=True)
@click.option("--out", "out_path", type=click.Path(), required=True)
def export(config_path, seed, duration_s, reel_duration_s, log_path, t0, t1,
           out_path) -> None:
    """Export every stored record inside [t0, t1) in canonical order."""
    config = _scenario_config(config_path, seed, duration_s, reel_duration_s)
    try:
        platform = Platform.from_log(config, log_path)
        with open(out_path, "w", encoding="utf-8") as fp:
            n = platform.store.export_window(t0, t1, fp)
    except MillAssistError as exc:
        _fail(str(exc))
    click.echo(f"wrote {n} records to {out_path}")


@main.command()
@scenario_options
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--patterns", "patterns_path", type=click.Path(exists=True),
              default=None, help="mined alarm patterns to load")
@click.option("--train-parameter", multiple=True,
              help="fit these quality models before serving")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(config_path, seed, duration_s, reel_duration_s, log_path,
          patterns_path, train_parameter, host, port) -> None:
    """Serve the JSON gateway over a recorded stream."""
    import uvicorn

    config = _scenario_config(config_path, seed, duration_s, reel_duration_s)
    patterns = None
    if patterns_path:
        with open(patterns_path, "r", encoding="utf-8") as fp:
            patterns = read_patterns(fp)
    try:
        platform = Platform.from_log(config, log_path, patterns=patterns)
        for parameter in train_parameter:
            platform.train_quality(parameter)
    except MillAssistError as exc:
        _fail(str(exc))
    uvicorn.run(create_app(platform), host=host, port=port)


if __name__ == "__main__":
    main()
