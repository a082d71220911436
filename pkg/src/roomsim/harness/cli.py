"""Command-line interface: generate, validate, solve, evaluate, replay,
stats, serve."""

from __future__ import annotations

import json
import os
import sys

import click

from .. import planner, runtime
from ..errors import GenerationFailure, RoomsimError
from ..studio.generate import (CATEGORIES, SceneKnobs, SemanticSeed,
                               assign_categories, generate_bundle)
from ..studio.stats import corpus_stats
from ..studio.validate import validate_bundle
from .corpus import load_corpus, write_corpus
from .metrics import aggregate, render_table, result_row


@click.group()
@click.option("--seed", type=int, default=0, show_default=True,
              help="Base RNG seed for seed-derived commands.")
@click.option("--world-graph", is_flag=True,
              help="Give agents full scene visibility instead of partial observation.")
@click.option("--step-cap", type=int, default=runtime.DEFAULT_STEP_CAP,
              show_default=True, help="Maximum steps per episode.")
@click.pass_context
def main(ctx, seed, world_graph, step_cap):
    """Text-based embodied-environment engine and benchmark harness."""
    ctx.ensure_object(dict)
    ctx.obj.update(seed=seed, world_graph=world_graph, step_cap=step_cap)


@main.command()
@click.option("--count", type=int, default=20, show_default=True,
              help="Number of tasks to generate.")
@click.option("--seed-text", default="household chores", show_default=True,
              help="Semantic seed text; the task index is appended.")
@click.option("--rooms", type=int, default=3, show_default=True)
@click.option("--objects", type=int, default=12, show_default=True)
@click.option("--mix", default=None,
              help="JSON object mapping category to weight (default mix otherwise).")
@click.option("--category", type=click.Choice(CATEGORIES), default=None,
              help="Generate only this category (overrides --mix).")
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Corpus output directory.")
@click.pass_context
def generate(ctx, count, seed_text, rooms, objects, mix, category, out_dir):
    """Generate a validated task corpus."""
    base = ctx.obj["seed"]
    if category:
        categories = [category] * count
    else:
        categories = assign_categories(count, json.loads(mix) if mix else None)
    bundles = []
    failures = []
    for index, cat in enumerate(categories):
        seed = SemanticSeed(f"{seed_text} {index + 1}", base + index + 1)
        knobs = SceneKnobs(rooms, objects, 2 if cat in CATEGORIES[4:] else 1)
        try:
            bundles.append(generate_bundle(seed, cat, knobs,
                                           bound=ctx.obj["step_cap"]))
        except GenerationFailure as exc:
            failures.append(f"task {index + 1} ({cat}): {exc}")
    write_corpus(bundles, out_dir)
    click.echo(f"wrote {len(bundles)} bundles to {out_dir}")
    for line in failures:
        click.echo(f"FAILED {line}", err=True)
    if failures:
        sys.exit(1)


@main.command()
@click.argument("corpus", type=click.Path(exists=True))
@click.pass_context
def validate(ctx, corpus):
    """Run every validator tier over a corpus."""
    bad = 0
    for bundle in load_corpus(corpus):
        verdicts = validate_bundle(bundle.scene, bundle.task,
                                   bound=ctx.obj["step_cap"])
        ok = all(v[1] for v in verdicts)
        bad += 0 if ok else 1
        status = "ok" if ok else "; ".join(m for _, good, m in verdicts if not good)
        click.echo(f"{bundle.task.task_id} [{bundle.task.category}]: {status}")
    if bad:
        click.echo(f"{bad} invalid bundle(s)", err=True)
        sys.exit(1)


@main.command()
@click.argument("corpus", type=click.Path(exists=True))
@click.option("--task", "task_id", default=None, help="Solve only this task id.")
@click.option("--bound", type=int, default=planner.DEFAULT_BOUND, show_default=True)
def solve(corpus, task_id, bound):
    """Certify solvability and print shortest expert plans."""
    for bundle in load_corpus(corpus):
        if task_id and bundle.task.task_id != task_id:
            continue
        result = planner.expert_plan(bundle.scene, bundle.task.goal,
                                     bundle.task.agents, bound)
        if isinstance(result, planner.Unsolvable):
            click.echo(f"{bundle.task.task_id}: unsolvable within {bound} steps")
            sys.exit(1)
        click.echo(f"{bundle.task.task_id} ({bundle.task.category}), "
                   f"{result.length} steps:")
        for index, step in enumerate(result.steps):
            for agent in sorted(step):
                click.echo(f"  {index}: {agent}: {step[agent].raw}")


def _build_adapter(kind: str, bundle, seed: int):
    if kind == "oracle":
        return runtime.OracleAdapter(bundle.task)
    if kind == "random":
        return runtime.RandomAdapter(seed=seed)
    if kind.startswith("remote:"):
        endpoint = kind.split(":", 1)[1] or os.environ.get("BASE_URL", "")
        return runtime.RemoteLLMAdapter(
            endpoint=endpoint,
            model=os.environ.get("MODEL", ""),
            api_key=os.environ.get("API_KEY", ""),
            temperature=float(os.environ.get("TEMPERATURE", "0.3")),
            max_tokens=int(os.environ.get("MAX_TOKENS", "4096")))
    raise click.BadParameter(f"unknown adapter {kind!r}")


@main.command()
@click.argument("corpus", type=click.Path(exists=True))
@click.option("--adapter", default="oracle", show_default=True,
              help="oracle | random | remote:<endpoint-url>")
@click.option("--runs", type=int, default=1, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.pass_context
def evaluate(ctx, corpus, adapter, runs, out_dir):
    """Run episodes over a corpus and write records plus a metrics report."""
    os.makedirs(os.path.join(out_dir, "records"), exist_ok=True)
    rows = []
    for bundle in load_corpus(corpus):
        for run in range(runs):
            agent = _build_adapter(adapter, bundle, ctx.obj["seed"] + run)
            result = runtime.run_episode(bundle.scene, bundle.task, agent,
                                         step_cap=ctx.obj["step_cap"],
                                         world_graph=ctx.obj["world_graph"])
            runtime.write_record(
                os.path.join(out_dir, "records",
                             f"{bundle.task.task_id}_run{run + 1}.jsonl"),
                result)
            rows.append(result_row(bundle.task.category, result))
    report = aggregate(rows)
    with open(os.path.join(out_dir, "report.json"), "w") as fh:
        json.dump({"rows": rows, "report": report.to_json()}, fh,
                  sort_keys=True, indent=2)
        fh.write("\n")
    click.echo(render_table(report))


@main.command()
@click.argument("record", type=click.Path(exists=True))
@click.option("--corpus", required=True, type=click.Path(exists=True))
def replay(record, corpus):
    """Re-execute a recorded episode and verify every scene hash."""
    entries = runtime.read_record(record)
    scene_id = entries[0]["scene_id"]
    scene = None
    for bundle in load_corpus(corpus):
        if bundle.scene.scene_id == scene_id:
            scene = bundle.scene
            break
    if scene is None:
        raise click.ClickException(f"scene {scene_id} not found in corpus")
    try:
        final = runtime.replay_record(scene, entries)
    except RoomsimError as exc:
        raise click.ClickException(str(exc))
    click.echo(f"replay ok; final scene hash {final.canonical_hash()}")


@main.command()
@click.argument("corpus", type=click.Path(exists=True))
def stats(corpus):
    """Print corpus statistics as JSON."""
    click.echo(json.dumps(corpus_stats(load_corpus(corpus)),
                          sort_keys=True, indent=2))


@main.command()
@click.argument("corpus", type=click.Path(exists=True))
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--state-dir", default=None, type=click.Path(),
              help="Directory for episode persistence (sessions survive restarts).")
def serve(corpus, port, host, state_dir):
    """Run the episode HTTP/WebSocket service."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(corpus, state_dir), host=host, port=port)


if __name__ == "__main__":
    main()
