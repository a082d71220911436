"""Multi-tier bundle validation.

Each tier returns (tier, ok, message) so callers can report exactly which
gate a generated bundle failed. Tiers run in order and later tiers are
skipped once one fails, since they assume the earlier guarantees.
"""

from __future__ import annotations

import math

from .. import goals, planner
from ..actions import ActionEngine
from ..errors import RoomsimError
from ..world import SceneGraph, load_scene, scene_to_document

Verdict = tuple[str, bool, str]


def _structural(scene: SceneGraph, task) -> Verdict:
    try:
        round_trip = load_scene(scene_to_document(scene))
    except RoomsimError as exc:
        return ("structural", False, f"scene does not round-trip: {exc}")
    if round_trip.canonical_hash() != scene.canonical_hash():
        return ("structural", False, "scene round-trip changed canonical hash")
    if task.scene_id != scene.scene_id:
        return ("structural", False, "task references a different scene")
    missing = [a for a in task.agents if a not in scene.agents]
    if missing:
        return ("structural", False, f"unknown task agents: {missing}")
    try:
        goals.validate(task.goal, scene)
    except RoomsimError as exc:
        return ("structural", False, f"goal invalid: {exc}")
    return ("structural", True, "ok")


def _physical(scene: SceneGraph, task) -> Verdict:
    for oid, obj in sorted(scene.objects.items()):
        w = obj.weight
        if not (math.isfinite(w) and w > 0):
            return ("physical", False, f"{oid} has non-positive weight {w}")
    caps = sorted(a.max_weight for a in scene.agents.values())
    for leaf in goals.leaves(task.goal):
        if isinstance(leaf, goals.Location):
            w = scene.objects[leaf.object].weight
            if w > sum(caps):
                return ("physical", False,
                        f"{leaf.object} ({w}kg) exceeds combined capacity {sum(caps)}kg")
            if w > caps[-1] and len(task.agents) < 2:
                return ("physical", False,
                        f"{leaf.object} needs two agents but task assigns one")
    for aid in sorted(scene.agents):
        carried = scene.solo_carried_weight(aid)
        if carried > scene.agents[aid].max_weight:
            return ("physical", False, f"{aid} starts over capacity ({carried}kg)")
    return ("physical", True, "ok")


def _logical(scene: SceneGraph, task) -> Verdict:
    result = goals.evaluate(scene, task.goal)
    if result.satisfied:
        return ("logical", False, "goal already satisfied in the initial state")
    if not task.instruction.strip():
        return ("logical", False, "empty instruction")
    if task.category == "tool_use":
        # the instruction must not leak the tool's identity
        providers = [oid for oid, obj in sorted(scene.objects.items())
                     if obj.provides_abilities]
        named = [oid for oid in providers if oid in task.instruction]
        if named:
            return ("logical", False, f"instruction names the tool {named[0]}")
    return ("logical", True, "ok")


def _solvable(scene: SceneGraph, task, bound: int) -> Verdict:
    steps = task.expert_steps()
    if not steps:
        return ("solvability", False, "no expert trajectory attached")
    if len(steps) > bound + 1:
        return ("solvability", False,
                f"expert trajectory length {len(steps)} exceeds bound {bound}")
    engine = ActionEngine()
    try:
        plan = planner.Plan([{agent: engine.parse_action(raw, issuer=agent)
                              for agent, raw in step.items()} for step in steps])
        work, _ = planner.replay(scene, plan, engine)
    except RoomsimError as exc:
        return ("solvability", False, f"expert trajectory failed to replay: {exc}")
    if not goals.evaluate(work, task.goal).satisfied:
        return ("solvability", False, "expert trajectory does not achieve the goal")
    if not all(work.agents[a].done for a in task.agents):
        return ("solvability", False, "expert trajectory does not end with DONE")
    return ("solvability", True, "ok")


def validate_bundle(scene: SceneGraph, task, bound: int = planner.DEFAULT_BOUND,
                    ) -> list[Verdict]:
    """Run all tiers; stop at the first failure."""
    verdicts: list[Verdict] = []
    for check in (_structural, _physical, _logical):
        verdict = check(scene, task)
        verdicts.append(verdict)
        if not verdict[1]:
            return verdicts
    verdicts.append(_solvable(scene, task, bound))
    return verdicts
