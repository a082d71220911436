"""Goal predicate trees and their evaluation against a scene."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnknownEntity, UnresolvableIntent, ValidationError
from .world import SceneGraph, argmax_attribute

MAX_DEPTH = 4


@dataclass(frozen=True)
class Location:
    object: str
    expect: str  # "in:<id>" | "on:<id>"


@dataclass(frozen=True)
class StatePred:
    object: str
    key: str
    expect: bool


@dataclass(frozen=True)
class AttributePred:
    object: str
    key: str
    cmp: str  # "eq" | "ge" | "le"
    value: float


@dataclass(frozen=True)
class And:
    children: tuple


@dataclass(frozen=True)
class Or:
    children: tuple


GoalPredicate = Location | StatePred | AttributePred | And | Or


def to_json(goal: GoalPredicate) -> dict:
    if isinstance(goal, Location):
        return {"type": "location", "object": goal.object, "expect": goal.expect}
    if isinstance(goal, StatePred):
        return {"type": "state", "object": goal.object, "key": goal.key, "expect": goal.expect}
    if isinstance(goal, AttributePred):
        return {"type": "attribute", "object": goal.object, "key": goal.key,
                "cmp": goal.cmp, "value": goal.value}
    if isinstance(goal, And):
        return {"type": "and", "children": [to_json(c) for c in goal.children]}
    if isinstance(goal, Or):
        return {"type": "or", "children": [to_json(c) for c in goal.children]}
    raise TypeError(type(goal))


def from_json(data: dict) -> GoalPredicate:
    kind = data.get("type")
    if kind == "location":
        return Location(data["object"], data["expect"])
    if kind == "state":
        return StatePred(data["object"], data["key"], bool(data["expect"]))
    if kind == "attribute":
        return AttributePred(data["object"], data["key"], data["cmp"], float(data["value"]))
    if kind == "and":
        return And(tuple(from_json(c) for c in data["children"]))
    if kind == "or":
        return Or(tuple(from_json(c) for c in data["children"]))
    raise ValidationError(f"unknown goal predicate type {kind!r}")


def describe(goal: GoalPredicate) -> str:
    if isinstance(goal, Location):
        return f"{goal.object} {goal.expect.replace(':', ' ')}"
    if isinstance(goal, StatePred):
        return f"{goal.object}.{goal.key} is {'true' if goal.expect else 'false'}"
    if isinstance(goal, AttributePred):
        return f"{goal.object}.{goal.key} {goal.cmp} {goal.value}"
    if isinstance(goal, And):
        return "all of [" + "; ".join(describe(c) for c in goal.children) + "]"
    if isinstance(goal, Or):
        return "any of [" + "; ".join(describe(c) for c in goal.children) + "]"
    raise TypeError(type(goal))


def leaves(goal: GoalPredicate) -> list[GoalPredicate]:
    if isinstance(goal, (And, Or)):
        out = []
        for child in goal.children:
            out.extend(leaves(child))
        return out
    return [goal]


def validate(goal: GoalPredicate, scene: SceneGraph, depth: int = 1) -> None:
    if depth > MAX_DEPTH:
        raise ValidationError("goal tree deeper than 4")
    if isinstance(goal, (And, Or)):
        if not goal.children:
            raise ValidationError("empty And/Or node")
        for child in goal.children:
            validate(child, scene, depth + 1)
        return
    if isinstance(goal, Location):
        if goal.object not in scene.objects:
            raise UnknownEntity(goal.object)
        target = goal.expect.split(":", 1)[1]
        if target not in scene.rooms and target not in scene.objects:
            raise UnknownEntity(target)
    elif isinstance(goal, (StatePred, AttributePred)):
        if goal.object not in scene.objects:
            raise UnknownEntity(goal.object)
    else:
        raise ValidationError(f"unknown predicate {goal!r}")


@dataclass
class EvalResult:
    satisfied: bool
    leaf_report: list[tuple[GoalPredicate, bool]]


def _check_leaf(scene: SceneGraph, leaf: GoalPredicate) -> bool:
    if isinstance(leaf, Location):
        if leaf.object not in scene.objects:
            raise UnknownEntity(leaf.object)
        # held / jointly held objects match no in:/on: pattern
        return scene.containment.get(leaf.object) == leaf.expect
    if isinstance(leaf, StatePred):
        if leaf.object not in scene.objects:
            raise UnknownEntity(leaf.object)
        return scene.objects[leaf.object].states.get(leaf.key) == leaf.expect
    if isinstance(leaf, AttributePred):
        if leaf.object not in scene.objects:
            raise UnknownEntity(leaf.object)
        value = scene.objects[leaf.object].attributes.get(leaf.key)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            return False
        if leaf.cmp == "eq":
            return float(value) == leaf.value
        if leaf.cmp == "ge":
            return float(value) >= leaf.value
        if leaf.cmp == "le":
            return float(value) <= leaf.value
        raise ValidationError(f"unknown comparator {leaf.cmp!r}")
    raise TypeError(type(leaf))


def _eval_node(scene: SceneGraph, goal: GoalPredicate,
               report: list[tuple[GoalPredicate, bool]]) -> bool:
    if isinstance(goal, And):
        results = [_eval_node(scene, c, report) for c in goal.children]
        return all(results)
    if isinstance(goal, Or):
        results = [_eval_node(scene, c, report) for c in goal.children]
        return any(results)
    ok = _check_leaf(scene, goal)
    report.append((goal, ok))
    return ok


def evaluate(scene: SceneGraph, goal: GoalPredicate) -> EvalResult:
    """Pure check of the goal tree; reports every leaf for diagnostics."""
    report: list[tuple[GoalPredicate, bool]] = []
    satisfied = _eval_node(scene, goal, report)
    return EvalResult(satisfied, report)


def extract_goal(intent: dict, scene: SceneGraph) -> GoalPredicate:
    """Ground a structured task intent into the smallest predicate tree.

    Argmax intents are resolved to a concrete object id now, at generation
    time; the evaluator never re-runs argmax at check time.
    """
    kind = intent.get("kind")
    if kind == "move":
        obj = intent["object"]
        if obj not in scene.objects:
            raise UnresolvableIntent(f"no such object {obj}")
        goal: GoalPredicate = Location(obj, f"{intent['rel']}:{intent['target']}")
    elif kind == "move_argmax":
        obj = argmax_attribute(scene, intent["group"], intent.get("key", "weight"))
        goal = Location(obj, f"{intent['rel']}:{intent['target']}")
    elif kind == "set_state":
        obj = intent["object"]
        if obj not in scene.objects:
            raise UnresolvableIntent(f"no such object {obj}")
        goal = StatePred(obj, intent["key"], bool(intent["value"]))
    elif kind == "set_state_argmax":
        obj = argmax_attribute(scene, intent["group"], intent.get("attr_key", "weight"))
        goal = StatePred(obj, intent["key"], bool(intent["value"]))
    elif kind == "all":
        goal = And(tuple(extract_goal(sub, scene) for sub in intent["intents"]))
    else:
        raise UnresolvableIntent(f"unknown intent kind {kind!r}")
    validate(goal, scene)
    return goal
