"""Corpus directory layout: scenes/, tasks/, manifest.json, stats.json.

All files are canonical JSON (sorted keys, 2-space indent, trailing newline)
so regenerating from the same seeds is byte-identical.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from ..errors import ValidationError
from ..studio.generate import SemanticSeed
from ..studio.stats import corpus_stats
from ..studio.tasks import TaskSpec
from ..world import SceneGraph, load_scene, scene_to_document


def _dump(path: str, data) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, sort_keys=True, indent=2)
        fh.write("\n")


@dataclass
class LoadedBundle:
    seed: SemanticSeed
    scene: SceneGraph
    task: TaskSpec


def write_corpus(bundles, out_dir: str) -> None:
    os.makedirs(os.path.join(out_dir, "scenes"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "tasks"), exist_ok=True)
    manifest = {"format": "corpus-v1", "tasks": []}
    for bundle in bundles:
        _dump(os.path.join(out_dir, "scenes", f"{bundle.scene.scene_id}.json"),
              scene_to_document(bundle.scene))
        _dump(os.path.join(out_dir, "tasks", f"{bundle.task.task_id}.json"),
              bundle.task.to_json())
        manifest["tasks"].append({
            "task_id": bundle.task.task_id,
            "scene_id": bundle.scene.scene_id,
            "category": bundle.task.category,
            "seed_text": bundle.seed.seed_text,
            "rng_seed": bundle.seed.rng_seed,
            "domain": bundle.seed.resolved_domain(),
        })
    _dump(os.path.join(out_dir, "manifest.json"), manifest)
    _dump(os.path.join(out_dir, "stats.json"), corpus_stats(bundles))


def load_corpus(path: str) -> list[LoadedBundle]:
    manifest_path = os.path.join(path, "manifest.json")
    if not os.path.exists(manifest_path):
        raise ValidationError(f"{path}: no manifest.json; not a corpus directory")
    with open(manifest_path) as fh:
        manifest = json.load(fh)
    scenes: dict[str, SceneGraph] = {}
    out = []
    for entry in manifest["tasks"]:
        scene_id = entry["scene_id"]
        if scene_id not in scenes:
            with open(os.path.join(path, "scenes", f"{scene_id}.json"), "rb") as fh:
                scenes[scene_id] = load_scene(fh.read())
        with open(os.path.join(path, "tasks", f"{entry['task_id']}.json")) as fh:
            task = TaskSpec.from_json(json.load(fh))
        seed = SemanticSeed(entry["seed_text"], entry["rng_seed"], entry["domain"])
        out.append(LoadedBundle(seed, scenes[scene_id], task))
    return out
