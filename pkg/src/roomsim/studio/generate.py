"""Four-stage scenario pipeline: scene generation, feasibility analysis,
task generation, and expert-trajectory certification.

Everything is deterministic per (semantic seed, knobs, template-pack
version): randomness flows only from seeded ``random.Random`` streams, and
every sampled collection is sorted before sampling.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, field, replace

from .. import goals, planner
from ..errors import GenerationFailure, InfeasibleCategory
from ..world import ARGMAX_EPSILON, SceneGraph, load_scene
from .tasks import TaskSpec, plan_to_trajectory
from .templates import domain_for_seed, load_pack
from .validate import validate_bundle

CATEGORIES = (
    "direct_command",
    "attribute_reasoning",
    "tool_use",
    "compound_reasoning",
    "explicit_collaboration",
    "implicit_collaboration",
    "compound_collaboration",
)
SINGLE_CATEGORIES = CATEGORIES[:4]
MULTI_CATEGORIES = CATEGORIES[4:]

# Published per-category shares renormalized to a 65/35 single/multi split.
DEFAULT_MIX = {
    "direct_command": 0.17908,
    "attribute_reasoning": 0.17798,
    "tool_use": 0.14592,
    "compound_reasoning": 0.14702,
    "explicit_collaboration": 0.11044,
    "implicit_collaboration": 0.13252,
    "compound_collaboration": 0.10704,
}

RETRY_BUDGET = 16
AGENT_CAPACITY = 25.0


@dataclass(frozen=True)
class SemanticSeed:
    seed_text: str
    rng_seed: int
    domain: str = ""

    def resolved_domain(self) -> str:
        return self.domain or domain_for_seed(self.seed_text)


@dataclass(frozen=True)
class SceneKnobs:
    n_rooms: int = 3
    n_objects: int = 12
    n_agents: int = 1

    def validate(self) -> None:
        if not (1 <= self.n_rooms <= 8):
            raise ValueError("n_rooms must be in 1..8")
        if not (1 <= self.n_objects <= 80):
            raise ValueError("n_objects must be in 1..80")
        if self.n_agents not in (1, 2):
            raise ValueError("n_agents must be 1 or 2")


def _stream(seed: SemanticSeed, purpose: str, pack_version) -> random.Random:
    digest = hashlib.sha256(
        f"{seed.seed_text}|{seed.rng_seed}|{seed.resolved_domain()}|{pack_version}|{purpose}"
        .encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


def _distinct_weights(rng: random.Random, lo: float, hi: float, count: int,
                      gap: float = 0.05) -> list[float]:
    """Sample weights with a pairwise margin comfortably above the argmax
    tie tolerance."""
    assert gap > ARGMAX_EPSILON
    for _ in range(200):
        values = sorted(round(rng.uniform(lo, hi), 2) for _ in range(count))
        if all(b - a >= gap for a, b in zip(values, values[1:])):
            rng.shuffle(values)
            return values
    # fallback: evenly spaced
    step = (hi - lo) / max(count, 1)
    return [round(lo + step * i + step / 2, 2) for i in range(count)]


class _SceneBuilder:
    def __init__(self, seed: SemanticSeed, knobs: SceneKnobs):
        self.pack = load_pack(seed.resolved_domain())
        self.rng = _stream(seed, "scene", self.pack["version"])
        self.knobs = knobs
        self.seed_key = f"{seed.seed_text}|{seed.rng_seed}|{seed.resolved_domain()}"
        self.counters: dict[str, int] = {}
        self.rooms: list[dict] = []
        self.objects: list[dict] = []
        self.agents: list[dict] = []

    def new_id(self, name: str) -> str:
        self.counters[name] = self.counters.get(name, 0) + 1
        return f"{name}_{self.counters[name]}"

    def add_object(self, template: dict, location: str, weight: float | None = None,
                   extra_states: dict | None = None) -> str:
        oid = self.new_id(template["name"])
        lo, hi = template.get("weight", (1.0, 5.0))
        attributes = {"weight": weight if weight is not None else round(self.rng.uniform(lo, hi), 2)}
        if template.get("materials"):
            attributes["material"] = self.rng.choice(list(template["materials"]))
        if template.get("colors"):
            attributes["color"] = self.rng.choice(list(template["colors"]))
        states = dict(template.get("states", {}))
        if extra_states:
            states.update(extra_states)
        entry = {
            "id": oid,
            "category": template["category"],
            "location": location,
            "attributes": attributes,
            "states": states,
            "provides_abilities": list(template.get("provides", [])),
        }
        self.objects.append(entry)
        return oid

    def room_ids(self) -> list[str]:
        return [r["id"] for r in self.rooms]

    def build(self) -> dict:
        rng, knobs, pack = self.rng, self.knobs, self.pack
        names = list(pack["rooms"])
        chosen = rng.sample(names, min(knobs.n_rooms, len(names)))
        while len(chosen) < knobs.n_rooms:
            chosen.append(rng.choice(names))
        for name in chosen:
            self.rooms.append({"id": self.new_id(name), "name": name.replace("_", " ").title(),
                               "connects_to": []})
        rooms = self.room_ids()
        for a, b in zip(rooms, rooms[1:]):
            self.rooms[rooms.index(a)]["connects_to"].append(b)
        for i in range(len(rooms)):
            for j in range(i + 2, len(rooms)):
                if rng.random() < 0.25:
                    self.rooms[i]["connects_to"].append(rooms[j])

        for k in range(knobs.n_agents):
            self.agents.append({
                "id": f"agent_{k + 1}",
                "location": rng.choice(rooms),
                "grasp_limit": 1 if knobs.n_agents == 1 else 2,
                "max_weight": AGENT_CAPACITY,
                "base_abilities": [],
            })

        budget = knobs.n_objects
        surfaces: list[str] = []

        def remaining() -> int:
            return budget - len(self.objects)

        # dirty surface group (tool / compound-reasoning material)
        if remaining() >= 3:
            template = rng.choice(list(pack["cleanables"]))
            lo, hi = template["weight"]
            for weight in _distinct_weights(rng, lo, hi, 3):
                room = rng.choice(rooms)
                surfaces.append(self.add_object(template, f"in:{room}", weight,
                                                {"is_dirty": True}))
        # light graspable group (attribute-reasoning material)
        if remaining() >= 3:
            template = rng.choice(list(pack["groupables"]))
            lo, hi = template["weight"]
            for weight in _distinct_weights(rng, lo, hi, 3):
                if surfaces and rng.random() < 0.6:
                    location = f"on:{rng.choice(surfaces)}"
                else:
                    location = f"in:{rng.choice(rooms)}"
                self.add_object(template, location, weight)
        # a cleaning tool, never in the same spot as every dirty surface
        if remaining() >= 1:
            cleaners = [t for t in pack["tools"] if "clean" in t.get("provides", [])]
            self.add_object(rng.choice(cleaners), f"in:{rng.choice(rooms)}")
        # one closed container with a hidden item
        if remaining() >= 2:
            boxes = sorted(pack["containers"], key=lambda t: t["weight"][0])
            box_id = self.add_object(boxes[0], f"in:{rng.choice(rooms)}",
                                     extra_states={"is_open": False})
            hidden = rng.choice(list(pack["fillers"]))
            self.add_object(hidden, f"in:{box_id}")
        # heavy group for collaboration scenes
        if knobs.n_agents >= 2 and remaining() >= 3 and len(rooms) >= 2:
            template = rng.choice(list(pack["heavies"]))
            total = AGENT_CAPACITY * knobs.n_agents
            weights = _distinct_weights(rng, AGENT_CAPACITY + 5.0, total - 5.0, 3, gap=0.5)
            heavy_room = rooms[0]
            for weight in weights:
                self.add_object({**template, "weight": (weight, weight)},
                                f"in:{heavy_room}", weight)
        # fillers
        fillers = list(pack["fillers"]) + [t for t in pack["tools"]
                                           if "clean" not in t.get("provides", [])]
        while remaining() > 0:
            template = rng.choice(fillers)
            if surfaces and rng.random() < 0.3:
                location = f"on:{rng.choice(surfaces)}"
            else:
                location = f"in:{rng.choice(rooms)}"
            self.add_object(template, location)

        return {
            "scene_id": f"scene_{(abs(hash_int(self.seed_key)) % 10 ** 9) + 1}",
            "rooms": self.rooms,
            "objects": self.objects,
            "agents": self.agents,
        }


def hash_int(text: str) -> int:
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def generate_scene(seed: SemanticSeed, knobs: SceneKnobs = SceneKnobs()) -> SceneGraph:
    """Deterministic procedural scene for the given seed and knobs."""
    knobs.validate()
    document = _SceneBuilder(seed, knobs).build()
    return load_scene(document)


# -- feasibility ---------------------------------------------------------


@dataclass
class FeasibilityReport:
    feasible: dict[str, bool]
    groups: dict[str, list[str]] = field(default_factory=dict)
    dirty_groups: dict[str, list[str]] = field(default_factory=dict)
    heavy_groups: dict[str, list[str]] = field(default_factory=dict)
    tool_abilities: dict[str, list[str]] = field(default_factory=dict)
    capacity_margins: dict[str, float] = field(default_factory=dict)


def _strict_max(scene: SceneGraph, ids: list[str]) -> str | None:
    try:
        return goals.argmax_attribute(scene, ids, "weight")
    except Exception:
        return None


def analyze_environment(scene: SceneGraph) -> FeasibilityReport:
    """Which task categories can this scene host, and with what material."""
    caps = sorted(a.max_weight for a in scene.agents.values())
    max_cap, sum_cap = caps[-1], sum(caps)
    by_name: dict[str, list[str]] = {}
    for oid in sorted(scene.objects):
        name = oid.rsplit("_", 1)[0]
        by_name.setdefault(name, []).append(oid)

    groups, dirty_groups, heavy_groups = {}, {}, {}
    for name, ids in sorted(by_name.items()):
        if len(ids) < 3:
            continue
        best = _strict_max(scene, ids)
        if best is None:
            continue
        weights = [scene.objects[i].weight for i in ids]
        if all(w <= max_cap for w in weights):
            groups[name] = ids
        if all(scene.objects[i].states.get("is_dirty") is True for i in ids):
            dirty_groups[name] = ids
        if all(max_cap < w <= sum_cap for w in weights):
            heavy_groups[name] = ids

    tool_abilities: dict[str, list[str]] = {}
    for oid in sorted(scene.objects):
        for ability in sorted(scene.objects[oid].provides_abilities):
            tool_abilities.setdefault(ability, []).append(oid)
    base = set()
    for agent in scene.agents.values():
        base |= agent.base_abilities

    heavy_movables = [oid for oid in sorted(scene.objects)
                      if max_cap < scene.objects[oid].weight <= sum_cap]
    dirty_targets = [oid for oid in sorted(scene.objects)
                     if scene.objects[oid].states.get("is_dirty") is True]
    light_movables = [oid for oid in sorted(scene.objects)
                      if scene.objects[oid].weight <= max_cap
                      and not scene.objects[oid].provides_abilities]

    multi = len(scene.agents) >= 2 and len(scene.rooms) >= 2
    feasible = {
        "direct_command": bool(light_movables) and len(scene.rooms) >= 1,
        "attribute_reasoning": bool(groups),
        "tool_use": bool(dirty_targets) and "clean" in tool_abilities and "clean" not in base,
        "compound_reasoning": bool(dirty_groups) and "clean" in tool_abilities
                              and "clean" not in base,
        "explicit_collaboration": multi and bool(heavy_movables),
        "implicit_collaboration": multi and bool(heavy_movables),
        "compound_collaboration": multi and bool(heavy_groups),
    }
    return FeasibilityReport(
        feasible=feasible,
        groups=groups,
        dirty_groups=dirty_groups,
        heavy_groups=heavy_groups,
        tool_abilities=tool_abilities,
        capacity_margins={aid: scene.agents[aid].max_weight for aid in sorted(scene.agents)},
    )


# -- task generation -----------------------------------------------------


def _movable_targets(scene: SceneGraph, obj: str) -> list[str]:
    """Placement targets (surfaces and rooms) that differ from obj's parent."""
    current = scene.containment[obj]
    targets = []
    for oid in sorted(scene.objects):
        if oid != obj and scene.objects[oid].category == "Furniture" \
                and f"on:{oid}" != current and oid not in scene.subtree(obj):
            targets.append(f"on:{oid}")
    for rid in sorted(scene.rooms):
        if f"in:{rid}" != current:
            targets.append(f"in:{rid}")
    return targets


def _phrase(ref: str) -> str:
    rel, target = ref.split(":", 1)
    return f"{rel} {target}"


def generate_task(scene: SceneGraph, report: FeasibilityReport, category: str,
                  rng: random.Random) -> TaskSpec:
    """Instruction + grounded goal for one category (no trajectory yet)."""
    if not report.feasible.get(category, False):
        raise InfeasibleCategory(category)
    agents = sorted(scene.agents)
    task_agents = agents[:1] if category in SINGLE_CATEGORIES else agents[:2]

    if category == "direct_command":
        caps = max(a.max_weight for a in scene.agents.values())
        movables = [oid for oid in sorted(scene.objects)
                    if scene.objects[oid].weight <= caps
                    and not scene.objects[oid].provides_abilities
                    and not scene.objects[oid].states]
        obj = rng.choice(movables)
        target = rng.choice(_movable_targets(scene, obj))
        instruction = f"Place {obj} {_phrase(target)}."
        rel, dest = target.split(":", 1)
        goal = goals.extract_goal({"kind": "move", "object": obj,
                                   "rel": rel, "target": dest}, scene)
    elif category == "attribute_reasoning":
        name = rng.choice(sorted(report.groups))
        ids = report.groups[name]
        best = goals.argmax_attribute(scene, ids, "weight")
        targets = [t for t in _movable_targets(scene, best)
                   if t != scene.containment[best]]
        target = rng.choice(targets)
        rel, dest = target.split(":", 1)
        preposition = "into" if rel == "in" else "onto"
        instruction = f"Move the heaviest {name} {preposition} {dest}."
        goal = goals.extract_goal({"kind": "move_argmax", "group": ids,
                                   "key": "weight", "rel": rel, "target": dest}, scene)
    elif category == "tool_use":
        dirty = [oid for oid in sorted(scene.objects)
                 if scene.objects[oid].states.get("is_dirty") is True]
        obj = rng.choice(dirty)
        instruction = f"Clean {obj}."  # the required tool is never named
        goal = goals.extract_goal({"kind": "set_state", "object": obj,
                                   "key": "is_dirty", "value": False}, scene)
    elif category == "compound_reasoning":
        name = rng.choice(sorted(report.dirty_groups))
        ids = report.dirty_groups[name]
        instruction = f"Clean the heaviest {name.replace('_', ' ')}."
        goal = goals.extract_goal({"kind": "set_state_argmax", "group": ids,
                                   "attr_key": "weight", "key": "is_dirty",
                                   "value": False}, scene)
    elif category in ("explicit_collaboration", "implicit_collaboration"):
        caps = sorted(a.max_weight for a in scene.agents.values())
        heavy = [oid for oid in sorted(scene.objects)
                 if caps[-1] < scene.objects[oid].weight <= sum(caps)]
        obj = rng.choice(heavy)
        rooms = [r for r in sorted(scene.rooms)
                 if scene.containment[obj] != f"in:{r}"]
        dest = rng.choice(rooms)
        if category == "explicit_collaboration":
            a1, a2 = task_agents
            instruction = f"{a1} and {a2}: work together to carry {obj} to {dest}."
        else:
            # never mentions cooperation; the capacity shortfall must be inferred
            instruction = f"Move {obj} to {dest}."
        goal = goals.extract_goal({"kind": "move", "object": obj,
                                   "rel": "in", "target": dest}, scene)
    elif category == "compound_collaboration":
        name = rng.choice(sorted(report.heavy_groups))
        ids = report.heavy_groups[name]
        best = goals.argmax_attribute(scene, ids, "weight")
        rooms = [r for r in sorted(scene.rooms)
                 if scene.containment[best] != f"in:{r}"]
        dest = rng.choice(rooms)
        instruction = f"Move the heaviest {name.replace('_', ' ')} to {dest}."
        goal = goals.extract_goal({"kind": "move_argmax", "group": ids,
                                   "key": "weight", "rel": "in", "target": dest}, scene)
    else:
        raise InfeasibleCategory(category)

    return TaskSpec(
        task_id=f"task_{hash_int(scene.scene_id + category) % 10 ** 9 + 1}",
        scene_id=scene.scene_id,
        category=category,
        instruction=instruction,
        agents=task_agents,
        goal=goal,
    )


# -- bundles -------------------------------------------------------------


@dataclass
class Bundle:
    seed: SemanticSeed
    knobs: SceneKnobs
    scene: SceneGraph
    task: TaskSpec
    pack_version: object = 1


def generate_bundle(seed: SemanticSeed, category: str,
                    knobs: SceneKnobs | None = None,
                    bound: int = planner.DEFAULT_BOUND) -> Bundle:
    """Scene + task + certified expert trajectory, retried with perturbed
    sub-seeds until every validator tier passes."""
    if knobs is None:
        knobs = SceneKnobs(n_agents=2 if category in MULTI_CATEGORIES else 1)
    knobs.validate()
    last_reason = "no attempt"
    for attempt in range(RETRY_BUDGET):
        sub_seed = seed if attempt == 0 else replace(
            seed, rng_seed=hash_int(f"{seed.rng_seed}|retry|{attempt}") % 2 ** 62)
        try:
            scene = generate_scene(sub_seed, knobs)
            report = analyze_environment(scene)
            if not report.feasible.get(category, False):
                last_reason = f"category {category} infeasible"
                continue
            rng = _stream(sub_seed, f"task|{category}", 1)
            task = generate_task(scene, report, category, rng)
            if goals.evaluate(scene, task.goal).satisfied:
                last_reason = "goal already satisfied at start"
                continue
            result = planner.expert_plan(scene, task.goal, task.agents, bound)
            if isinstance(result, planner.Unsolvable):
                last_reason = f"unsolvable within bound {bound}"
                continue
            task.expert_trajectory = plan_to_trajectory(result.steps)
            task.expert_length = result.length
            bundle = Bundle(sub_seed, knobs, scene, task,
                            load_pack(sub_seed.resolved_domain())["version"])
            verdicts = validate_bundle(scene, task, bound=bound)
            if all(ok for _, ok, _ in verdicts):
                return bundle
            last_reason = "; ".join(m for _, ok, m in verdicts if not ok)
        except (InfeasibleCategory, GenerationFailure) as exc:
            last_reason = str(exc)
    raise GenerationFailure(
        f"no valid bundle for {category} after {RETRY_BUDGET} attempts: {last_reason}")


def assign_categories(count: int, mix: dict[str, float] | None = None) -> list[str]:
    """Largest-remainder apportionment of categories over a corpus."""
    mix = mix or DEFAULT_MIX
    total = sum(mix.values())
    exact = {c: count * mix[c] / total for c in mix}
    counts = {c: int(exact[c]) for c in mix}
    leftovers = sorted(mix, key=lambda c: (-(exact[c] - counts[c]), c))
    i = 0
    while sum(counts.values()) < count:
        counts[leftovers[i % len(leftovers)]] += 1
        i += 1
    out = []
    for category in CATEGORIES:
        out.extend([category] * counts.get(category, 0))
    return out


def generate_corpus(seeds: list[SemanticSeed], knobs: SceneKnobs | None = None,
                    mix: dict[str, float] | None = None,
                    categories: list[str] | None = None) -> list[Bundle]:
    """One bundle per seed; categories assigned by mix unless given."""
    if categories is None:
        categories = assign_categories(len(seeds), mix)
    if len(categories) != len(seeds):
        raise ValueError("need one category per seed")
    bundles = []
    for seed, category in zip(seeds, categories):
        task_knobs = knobs
        if task_knobs is not None:
            task_knobs = replace(task_knobs,
                                 n_agents=2 if category in MULTI_CATEGORIES else 1)
        bundles.append(generate_bundle(seed, category, task_knobs))
    return bundles
