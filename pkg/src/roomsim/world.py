"""Typed scene graph: rooms, objects, agents, containment, proximity.

The scene is a value. All mutation goes through :class:`StateDelta` objects
applied with :meth:`SceneGraph.apply_delta`; a delta and its inverse round-trip
to a byte-identical canonical serialization.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field

from .errors import (
    AmbiguousMax,
    InvariantViolation,
    MissingAttribute,
    ParseError,
    StaleDelta,
    UnknownEntity,
    ValidationError,
)

ID_PATTERN = re.compile(r"^[a-z][a-z0-9_]*_[1-9][0-9]*$")

OBJECT_CATEGORIES = ("Container", "Tool", "Appliance", "Furniture", "Consumable", "Other")

#: Tie tolerance for attribute argmax, in the attribute's own unit.
ARGMAX_EPSILON = 1e-6


def valid_id(token: str) -> bool:
    return bool(ID_PATTERN.match(token))


def parent_kind(parent: str) -> str:
    """Return the relation tag of a parent ref string (``in``/``on``/...)."""
    return parent.split(":", 1)[0]


def parent_target(parent: str) -> str:
    return parent.split(":", 1)[1]


def joint_holders(parent: str) -> tuple[str, ...]:
    """Agent ids of a ``joint_held_by:`` ref, sorted."""
    return tuple(parent_target(parent).split("+"))


def make_joint_ref(agents) -> str:
    return "joint_held_by:" + "+".join(sorted(agents))


def fmt_num(x: float) -> str:
    """Render a number without a trailing ``.0`` (40.0 -> "40")."""
    if isinstance(x, float) and x.is_integer():
        return str(int(x))
    return repr(x) if isinstance(x, float) else str(x)


@dataclass
class Room:
    name: str
    connects_to: set[str] = field(default_factory=set)


@dataclass
class ObjectNode:
    category: str
    attributes: dict = field(default_factory=dict)
    states: dict = field(default_factory=dict)
    provides_abilities: set[str] = field(default_factory=set)

    @property
    def weight(self) -> float:
        return float(self.attributes["weight"])


@dataclass
class AgentNode:
    location: str
    grasp_limit: int = 1
    max_weight: float = 25.0
    base_abilities: set[str] = field(default_factory=set)
    holding: list[str] = field(default_factory=list)  # sorted by id
    effective_abilities: set[str] = field(default_factory=set)
    done: bool = False


@dataclass
class StateDelta:
    """Ordered list of atomic changes.

    Change kinds (tuples):
      ("moved", entity, old_parent, new_parent)
      ("state_set", object, key, old, new)
      ("proximity_set", agent, old_tuple, new_tuple)
      ("abilities_set", agent, old_tuple, new_tuple)
      ("done_set", agent, old, new)
    """

    changes: list[tuple] = field(default_factory=list)

    def inverse(self) -> "StateDelta":
        inv = []
        for change in reversed(self.changes):
            kind, subject, *rest = change
            if kind == "moved":
                old, new = rest
                inv.append((kind, subject, new, old))
            else:
                key_part = rest[:-2]
                old, new = rest[-2:]
                inv.append((kind, subject, *key_part, new, old))
        return StateDelta(inv)

    def __bool__(self) -> bool:
        return bool(self.changes)


class SceneGraph:
    """The world graph plus derived caches (holding lists, ability sets)."""

    def __init__(self, scene_id: str = "scene_1"):
        self.scene_id = scene_id
        self.rooms: dict[str, Room] = {}
        self.objects: dict[str, ObjectNode] = {}
        self.agents: dict[str, AgentNode] = {}
        self.containment: dict[str, str] = {}
        self.proximity: dict[str, set[str]] = {}

    # -- queries ---------------------------------------------------------

    def kind_of(self, entity: str) -> str:
        if entity in self.rooms:
            return "Room"
        if entity in self.objects:
            return "Object"
        if entity in self.agents:
            return "Agent"
        raise UnknownEntity(entity)

    def resolve_room(self, entity: str) -> str:
        """Walk the containment/holder chain up to the owning room."""
        seen = set()
        current = entity
        while True:
            if current in self.rooms:
                return current
            if current in self.agents:
                return self.agents[current].location
            if current not in self.objects:
                raise UnknownEntity(current)
            if current in seen:
                raise InvariantViolation(f"containment cycle at {current}")
            seen.add(current)
            parent = self.containment.get(current)
            if parent is None:
                raise InvariantViolation(f"{current} has no parent")
            kind = parent_kind(parent)
            if kind == "joint_held_by":
                current = joint_holders(parent)[0]
            else:
                current = parent_target(parent)

    def holder_of(self, obj: str) -> tuple[str, ...]:
        """Agents currently holding obj (solo or jointly); empty if unheld."""
        parent = self.containment.get(obj)
        if parent is None:
            return ()
        kind = parent_kind(parent)
        if kind == "held_by":
            return (parent_target(parent),)
        if kind == "joint_held_by":
            return joint_holders(parent)
        return ()

    def children_of(self, entity: str) -> list[str]:
        """Objects directly in/on the given room or object, sorted by id."""
        out = []
        for obj, parent in self.containment.items():
            if parent_kind(parent) in ("in", "on") and parent_target(parent) == entity:
                out.append(obj)
        return sorted(out)

    def solo_carried_weight(self, agent: str) -> float:
        total = 0.0
        for obj in self.agents[agent].holding:
            if parent_kind(self.containment[obj]) == "held_by":
                total += self.objects[obj].weight
        return total

    def recompute_abilities(self, agent: str) -> set[str]:
        """Base abilities plus provides_abilities of every held object."""
        node = self.agents[agent]
        abilities = set(node.base_abilities)
        for obj in node.holding:
            abilities |= self.objects[obj].provides_abilities
        return abilities

    def joint_held(self, agent: str) -> list[str]:
        """Objects this agent holds jointly with a partner."""
        return [o for o in self.agents[agent].holding
                if parent_kind(self.containment[o]) == "joint_held_by"]

    def subtree(self, root: str) -> set[str]:
        """Objects whose containment chain passes through root (incl. root)."""
        out = {root}
        frontier = [root]
        while frontier:
            node = frontier.pop()
            for child in self.children_of(node):
                if child not in out:
                    out.add(child)
                    frontier.append(child)
        return out

    def rooms_reachable(self, start: str) -> set[str]:
        seen = {start}
        frontier = [start]
        while frontier:
            room = frontier.pop()
            for nxt in self.rooms[room].connects_to:
                if nxt not in seen:
                    seen.add(nxt)
                    frontier.append(nxt)
        return seen

    # -- mutation --------------------------------------------------------

    def apply_delta(self, delta: StateDelta) -> "SceneGraph":
        """Apply atomic changes in order, checking each old value first."""
        touched_objects: set[str] = set()
        touched_agents: set[str] = set()
        for change in delta.changes:
            kind = change[0]
            if kind == "moved":
                _, entity, old, new = change
                self._apply_moved(entity, old, new)
                if entity in self.objects:
                    touched_objects.add(entity)
                else:
                    touched_agents.add(entity)
            elif kind == "state_set":
                _, obj, key, old, new = change
                node = self._object(obj)
                if node.states.get(key) != old:
                    raise StaleDelta(f"{obj}.{key} is {node.states.get(key)!r}, expected {old!r}")
                node.states[key] = new
                touched_objects.add(obj)
            elif kind == "proximity_set":
                _, agent, old, new = change
                current = tuple(sorted(self.proximity.get(agent, set())))
                if current != tuple(sorted(old)):
                    raise StaleDelta(f"proximity({agent}) is {current}, expected {tuple(sorted(old))}")
                self.proximity[agent] = set(new)
                touched_agents.add(agent)
            elif kind == "abilities_set":
                _, agent, old, new = change
                node = self._agent(agent)
                if tuple(sorted(node.effective_abilities)) != tuple(sorted(old)):
                    raise StaleDelta(f"abilities({agent}) changed underfoot")
                node.effective_abilities = set(new)
                touched_agents.add(agent)
            elif kind == "done_set":
                _, agent, old, new = change
                node = self._agent(agent)
                if node.done != old:
                    raise StaleDelta(f"done({agent}) is {node.done}, expected {old}")
                node.done = new
            else:
                raise InvariantViolation(f"unknown change kind {kind!r}")
        self._validate_touched(touched_objects, touched_agents)
        return self

    def _apply_moved(self, entity: str, old: str, new: str) -> None:
        if entity in self.agents:
            node = self.agents[entity]
            current = "in:" + node.location
            if current != old:
                raise StaleDelta(f"{entity} is at {current}, expected {old}")
            if parent_kind(new) != "in" or parent_target(new) not in self.rooms:
                raise InvariantViolation(f"agent {entity} must move to a room, got {new}")
            node.location = parent_target(new)
            return
        if entity not in self.objects:
            raise UnknownEntity(entity)
        current = self.containment.get(entity)
        if current != old:
            raise StaleDelta(f"{entity} is {current}, expected {old}")
        self._check_parent_ref(entity, new)
        for holder in self.holder_of(entity):
            self.agents[holder].holding.remove(entity)
        self.containment[entity] = new
        kind = parent_kind(new)
        if kind == "held_by":
            self._insert_holding(parent_target(new), entity)
        elif kind == "joint_held_by":
            for holder in joint_holders(new):
                self._insert_holding(holder, entity)

    def _insert_holding(self, agent: str, obj: str) -> None:
        node = self._agent(agent)
        if obj in node.holding:
            raise InvariantViolation(f"{agent} already holds {obj}")
        node.holding.append(obj)
        node.holding.sort()

    def _check_parent_ref(self, entity: str, parent: str) -> None:
        kind = parent_kind(parent)
        if kind in ("in", "on"):
            target = parent_target(parent)
            if kind == "in" and target in self.rooms:
                return
            if target not in self.objects:
                raise UnknownEntity(target)
            if target == entity or target in self.subtree(entity):
                raise InvariantViolation(f"placing {entity} under its own subtree")
        elif kind == "held_by":
            self._agent(parent_target(parent))
        elif kind == "joint_held_by":
            for holder in joint_holders(parent):
                self._agent(holder)
        else:
            raise InvariantViolation(f"bad parent ref {parent!r}")

    def _validate_touched(self, objects: set[str], agents: set[str]) -> None:
        for obj in objects:
            # cycle check by walking to a room
            self.resolve_room(obj)
        for agent in agents:
            node = self.agents[agent]
            if len(node.holding) > node.grasp_limit:
                raise InvariantViolation(f"{agent} exceeds grasp limit")
            room = node.location
            for entity in self.proximity.get(agent, set()):
                if self.resolve_room(entity) != room:
                    raise InvariantViolation(f"{entity} in proximity({agent}) but not co-located")

    # -- helpers ---------------------------------------------------------

    def _object(self, obj: str) -> ObjectNode:
        if obj not in self.objects:
            raise UnknownEntity(obj)
        return self.objects[obj]

    def _agent(self, agent: str) -> AgentNode:
        if agent not in self.agents:
            raise UnknownEntity(agent)
        return self.agents[agent]

    # -- serialization ---------------------------------------------------

    def to_state_dict(self) -> dict:
        """Full runtime state, canonically ordered."""
        return {
            "scene_id": self.scene_id,
            "rooms": {
                rid: {"name": r.name, "connects_to": sorted(r.connects_to)}
                for rid, r in sorted(self.rooms.items())
            },
            "objects": {
                oid: {
                    "category": o.category,
                    "attributes": {k: o.attributes[k] for k in sorted(o.attributes)},
                    "states": {k: o.states[k] for k in sorted(o.states)},
                    "provides_abilities": sorted(o.provides_abilities),
                }
                for oid, o in sorted(self.objects.items())
            },
            "agents": {
                aid: {
                    "location": a.location,
                    "grasp_limit": a.grasp_limit,
                    "max_weight": a.max_weight,
                    "base_abilities": sorted(a.base_abilities),
                    "holding": list(a.holding),
                    "effective_abilities": sorted(a.effective_abilities),
                    "done": a.done,
                }
                for aid, a in sorted(self.agents.items())
            },
            "containment": {k: self.containment[k] for k in sorted(self.containment)},
            "proximity": {a: sorted(s) for a, s in sorted(self.proximity.items())},
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_state_dict(), sort_keys=True, separators=(",", ":"))

    def canonical_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def clone(self) -> "SceneGraph":
        other = SceneGraph(self.scene_id)
        other.rooms = {rid: Room(r.name, set(r.connects_to)) for rid, r in self.rooms.items()}
        other.objects = {
            oid: ObjectNode(o.category, dict(o.attributes), dict(o.states), set(o.provides_abilities))
            for oid, o in self.objects.items()
        }
        other.agents = {
            aid: AgentNode(a.location, a.grasp_limit, a.max_weight, set(a.base_abilities),
                           list(a.holding), set(a.effective_abilities), a.done)
            for aid, a in self.agents.items()
        }
        other.containment = dict(self.containment)
        other.proximity = {a: set(s) for a, s in self.proximity.items()}
        return other


# -- scene file I/O ------------------------------------------------------


def load_scene(document) -> SceneGraph:
    """Parse and validate a scene file (bytes, str, or decoded dict)."""
    if isinstance(document, (bytes, bytearray)):
        document = document.decode("utf-8")
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}") from exc
    if not isinstance(document, dict):
        raise ParseError("scene document must be a JSON object")

    scene = SceneGraph(document.get("scene_id", "scene_1"))
    seen_ids: set[str] = set()

    def claim(token: str, what: str) -> None:
        if not isinstance(token, str) or not valid_id(token):
            raise ValidationError(f"bad {what} id {token!r}")
        if token in seen_ids:
            raise ValidationError(f"duplicate id {token!r}")
        seen_ids.add(token)

    for room in document.get("rooms", []):
        claim(room["id"], "room")
        scene.rooms[room["id"]] = Room(room.get("name", room["id"]), set(room.get("connects_to", [])))
    if not scene.rooms:
        raise ValidationError("scene has no rooms")
    for rid, room in scene.rooms.items():
        for other in room.connects_to:
            if other not in scene.rooms:
                raise ValidationError(f"{rid} connects to unknown room {other!r}")
            scene.rooms[other].connects_to.add(rid)  # connectivity is symmetric
    start = next(iter(scene.rooms))
    if scene.rooms_reachable(start) != set(scene.rooms):
        raise ValidationError("room connectivity graph is disconnected")

    attr_types: dict[str, type] = {}
    for obj in document.get("objects", []):
        claim(obj["id"], "object")
        category = obj.get("category", "Other")
        if category not in OBJECT_CATEGORIES:
            raise ValidationError(f"{obj['id']}: unknown category {category!r}")
        attributes = dict(obj.get("attributes", {}))
        states = dict(obj.get("states", {}))
        provides = set(obj.get("provides_abilities", []))
        if "weight" not in attributes:
            raise ValidationError(f"{obj['id']}: missing weight attribute")
        for key, value in attributes.items():
            if isinstance(value, bool):
                vtype: type = bool
            elif isinstance(value, (int, float)):
                vtype = float
                if not math.isfinite(float(value)):
                    raise ValidationError(f"{obj['id']}.{key}: non-finite number")
            elif isinstance(value, str):
                vtype = str
            else:
                raise ValidationError(f"{obj['id']}.{key}: unsupported value type")
            if attr_types.setdefault(key, vtype) is not vtype:
                raise ValidationError(f"attribute {key!r} has mixed value types in scene")
        if float(attributes["weight"]) < 0:
            raise ValidationError(f"{obj['id']}: negative weight")
        if "is_open" in states and category != "Container":
            raise ValidationError(f"{obj['id']}: is_open on non-Container")
        if provides and category not in ("Tool", "Appliance"):
            raise ValidationError(f"{obj['id']}: provides_abilities on {category}")
        scene.objects[obj["id"]] = ObjectNode(category, attributes, states, provides)
        location = obj.get("location")
        if not isinstance(location, str) or parent_kind(location) not in ("in", "on"):
            raise ValidationError(f"{obj['id']}: bad location {location!r}")
        scene.containment[obj["id"]] = location

    for obj, parent in scene.containment.items():
        target = parent_target(parent)
        if target not in scene.rooms and target not in scene.objects:
            raise ValidationError(f"{obj}: dangling parent {parent!r}")
        if parent_kind(parent) == "in" and target in scene.objects:
            if scene.objects[target].category != "Container":
                raise ValidationError(f"{obj}: 'in' parent {target} is not a Container")

    for agent in document.get("agents", []):
        claim(agent["id"], "agent")
        location = agent.get("location")
        if location not in scene.rooms:
            raise ValidationError(f"{agent['id']}: unknown location {location!r}")
        grasp_limit = int(agent.get("grasp_limit", 1))
        if grasp_limit < 1:
            raise ValidationError(f"{agent['id']}: grasp_limit must be >= 1")
        node = AgentNode(
            location,
            grasp_limit,
            float(agent.get("max_weight", 25.0)),
            set(agent.get("base_abilities", [])),
        )
        node.effective_abilities = set(node.base_abilities)
        scene.agents[agent["id"]] = node
        scene.proximity[agent["id"]] = set()
    if not scene.agents:
        raise ValidationError("scene has no agents")

    # containment must reach a room for every object (cycle/forest check)
    for obj in scene.objects:
        scene.resolve_room(obj)
    return scene


def scene_to_document(scene: SceneGraph) -> dict:
    """Scene file form (initial-state schema; drops runtime-only fields)."""
    return {
        "scene_id": scene.scene_id,
        "rooms": [
            {"id": rid, "name": r.name, "connects_to": sorted(r.connects_to)}
            for rid, r in sorted(scene.rooms.items())
        ],
        "objects": [
            {
                "id": oid,
                "category": o.category,
                "location": scene.containment[oid],
                "attributes": {k: o.attributes[k] for k in sorted(o.attributes)},
                "states": {k: o.states[k] for k in sorted(o.states)},
                "provides_abilities": sorted(o.provides_abilities),
            }
            for oid, o in sorted(scene.objects.items())
        ],
        "agents": [
            {
                "id": aid,
                "location": a.location,
                "grasp_limit": a.grasp_limit,
                "max_weight": a.max_weight,
                "base_abilities": sorted(a.base_abilities),
            }
            for aid, a in sorted(scene.agents.items())
        ],
    }


def resolve_room(scene: SceneGraph, entity: str) -> str:
    return scene.resolve_room(entity)


def argmax_attribute(scene: SceneGraph, candidates, key: str) -> str:
    """Unique maximizer of a numeric attribute over candidates.

    An exact tie (within ARGMAX_EPSILON) is an error, not a silent choice.
    """
    candidates = sorted(candidates)
    if not candidates:
        raise MissingAttribute("empty candidate set")
    values = []
    for obj in candidates:
        if obj not in scene.objects:
            raise UnknownEntity(obj)
        value = scene.objects[obj].attributes.get(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise MissingAttribute(f"{obj} has no numeric attribute {key!r}")
        values.append(float(value))
    best = max(range(len(candidates)), key=lambda i: values[i])
    for i, value in enumerate(values):
        if i != best and abs(values[best] - value) <= ARGMAX_EPSILON:
            raise AmbiguousMax(f"{candidates[best]} and {candidates[i]} tie on {key!r}")
    return candidates[best]
