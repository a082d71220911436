"""Per-agent knowledge under partial observability, and text rendering.

The rendered observation format is versioned (``obs-v1``) and golden-tested:
prompt-sensitive agents need byte stability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .world import SceneGraph, fmt_num, parent_kind, parent_target

OBS_VERSION = "obs-v1"

#: Attribute keys revealed by exploration, alongside boolean states.
VISIBLE_ATTRIBUTES = ("weight", "material", "color", "temperature", "size")


@dataclass
class ObjectSnapshot:
    category: str
    attributes: dict
    states: dict
    parent: str


@dataclass
class KnowledgeState:
    discovered_rooms: set[str] = field(default_factory=set)
    discovered_objects: dict[str, ObjectSnapshot] = field(default_factory=dict)
    explored_rooms: set[str] = field(default_factory=set)
    seen_agents: set[str] = field(default_factory=set)

    def entity_ids(self) -> set[str]:
        return set(self.discovered_rooms) | set(self.discovered_objects) | set(self.seen_agents)

    def clone(self) -> "KnowledgeState":
        return KnowledgeState(
            set(self.discovered_rooms),
            {k: ObjectSnapshot(v.category, dict(v.attributes), dict(v.states), v.parent)
             for k, v in self.discovered_objects.items()},
            set(self.explored_rooms),
            set(self.seen_agents),
        )


def _snapshot(scene: SceneGraph, obj: str) -> ObjectSnapshot:
    node = scene.objects[obj]
    attrs = {k: node.attributes[k] for k in VISIBLE_ATTRIBUTES if k in node.attributes}
    return ObjectSnapshot(node.category, attrs, dict(node.states), scene.containment[obj])


def _visible_in_room(scene: SceneGraph, room: str) -> list[str]:
    """Objects in a room that are not hidden inside a closed container."""
    out = []
    for obj in sorted(scene.objects):
        if scene.resolve_room(obj) != room:
            continue
        hidden = False
        current = obj
        while True:
            parent = scene.containment[current]
            kind = parent_kind(parent)
            if kind in ("held_by", "joint_held_by"):
                break
            target = parent_target(parent)
            if target in scene.rooms:
                break
            if kind == "in" and scene.objects[target].category == "Container" \
                    and not scene.objects[target].states.get("is_open", False):
                hidden = True
                break
            current = target
        if not hidden:
            out.append(obj)
    return out


def refresh_surroundings(scene: SceneGraph, knowledge: KnowledgeState, agent: str) -> None:
    """Record what the agent can see without effort: its room, the exits,
    co-located agents, held items, and current proximity entities."""
    room = scene.agents[agent].location
    knowledge.discovered_rooms.add(room)
    knowledge.discovered_rooms |= scene.rooms[room].connects_to
    for other, node in scene.agents.items():
        if node.location == room:
            knowledge.seen_agents.add(other)
    for obj in scene.agents[agent].holding:
        knowledge.discovered_objects[obj] = _snapshot(scene, obj)
    for entity in scene.proximity.get(agent, set()):
        if entity in scene.objects:
            knowledge.discovered_objects[entity] = _snapshot(scene, entity)


def explore(scene: SceneGraph, knowledge: KnowledgeState, agent: str) -> str:
    """Discover everything visible in the agent's current room.

    Contents of closed containers stay hidden. Returns a summary of new
    discoveries ("nothing new discovered" when re-exploring an unchanged room).
    """
    room = scene.agents[agent].location
    refresh_surroundings(scene, knowledge, agent)
    knowledge.explored_rooms.add(room)
    new = []
    for obj in _visible_in_room(scene, room):
        if obj not in knowledge.discovered_objects:
            new.append(obj)
        knowledge.discovered_objects[obj] = _snapshot(scene, obj)
    if not new:
        return "You explore the room: nothing new discovered."
    listed = ", ".join(f"{obj} ({_parent_phrase(knowledge.discovered_objects[obj].parent)})"
                       for obj in new)
    return f"You explore the room and discover: {listed}."


def diff_knowledge(before: KnowledgeState, after: KnowledgeState) -> str:
    """Deterministic one-line-per-addition summary (additions only)."""
    lines = []
    for room in sorted(after.discovered_rooms - before.discovered_rooms):
        lines.append(f"new room: {room}")
    for obj in sorted(set(after.discovered_objects) - set(before.discovered_objects)):
        lines.append(f"new object: {obj}")
    for agent in sorted(after.seen_agents - before.seen_agents):
        lines.append(f"new agent: {agent}")
    return "\n".join(lines)


def _parent_phrase(parent: str) -> str:
    kind = parent_kind(parent)
    target = parent_target(parent)
    if kind == "held_by":
        return f"held by {target}"
    if kind == "joint_held_by":
        return "jointly held by " + " and ".join(target.split("+"))
    return f"{kind} {target}"


def _object_line(obj: str, category: str, attributes: dict, states: dict, parent: str) -> str:
    details = [category]
    for key in sorted(attributes):
        value = attributes[key]
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            suffix = {"weight": "kg", "temperature": "C", "size": "cm"}.get(key, "")
            details.append(f"{key}: {fmt_num(value)}{suffix}")
        else:
            details.append(f"{key}: {value}")
    for key in sorted(states):
        details.append(f"{key}={'true' if states[key] else 'false'}")
    return f"- {obj} ({', '.join(details)}) {_parent_phrase(parent)}"


@dataclass
class Observation:
    text: str
    mode: str  # "Partial" | "WorldGraph"


def render_observation(scene: SceneGraph, knowledge: KnowledgeState,
                       agent: str, mode: str = "Partial") -> Observation:
    node = scene.agents[agent]
    room = node.location
    lines = [
        f"== Observation ({OBS_VERSION}, {mode}) ==",
        f"You are {agent} in {room} ({scene.rooms[room].name}).",
        "Exits: " + (", ".join(sorted(scene.rooms[room].connects_to)) or "none"),
        "Holding: " + (", ".join(node.holding) or "nothing"),
        "Abilities: " + (", ".join(sorted(node.effective_abilities)) or "none"),
    ]
    others = sorted(a for a in scene.agents
                    if a != agent and scene.agents[a].location == room)
    if others:
        lines.append("Agents here: " + ", ".join(others))
    if mode == "WorldGraph":
        lines.append("World graph:")
        for rid in sorted(scene.rooms):
            exits = ", ".join(sorted(scene.rooms[rid].connects_to)) or "none"
            lines.append(f"Room {rid} ({scene.rooms[rid].name}); exits: {exits}")
        for obj in sorted(scene.objects):
            o = scene.objects[obj]
            attrs = {k: o.attributes[k] for k in VISIBLE_ATTRIBUTES if k in o.attributes}
            lines.append(_object_line(obj, o.category, attrs, o.states, scene.containment[obj]))
        for aid in sorted(scene.agents):
            lines.append(f"Agent {aid} in {scene.agents[aid].location}")
    else:
        lines.append("Known objects:")
        if knowledge.discovered_objects:
            for obj in sorted(knowledge.discovered_objects):
                snap = knowledge.discovered_objects[obj]
                lines.append(_object_line(obj, snap.category, snap.attributes,
                                          snap.states, snap.parent))
        else:
            lines.append("(none discovered yet; try EXPLORE)")
        unexplored = sorted(knowledge.discovered_rooms - knowledge.explored_rooms)
        if unexplored:
            lines.append("Unexplored rooms: " + ", ".join(unexplored))
    return Observation("\n".join(lines), mode)
