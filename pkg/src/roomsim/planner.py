"""Omniscient breadth-first solver over the action engine.

Certifies task solvability, emits shortest expert trajectories, and provides
the expert step count used for efficiency scoring. The search replays the
real engine, so every returned plan is executable by construction.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .actions import ActionCommand, ActionEngine
from .errors import ReplayDivergence
from .goals import GoalPredicate, Location, StatePred, evaluate, leaves
from .world import SceneGraph, parent_kind, parent_target

DEFAULT_BOUND = 30


@dataclass
class Relevance:
    """Entities a shortest plan can possibly need to touch.

    Nothing in the action algebra lets an irrelevant object matter: there is
    no obstruction, no surface capacity, and abilities come only from held
    providers. So manipulation candidates can be restricted to goal objects,
    their container ancestors, placement targets named by the goal, providers
    of any ability the goal's state changes require, and whatever the agents
    already hold.
    """
    touch: set[str]       # objects worth GOTO / toggling / acting on
    grab: set[str]        # objects worth picking up
    place_refs: set[str]  # "rel:target" refs worth placing onto (besides rooms)


def _relevance(engine: ActionEngine, scene: SceneGraph, goal: GoalPredicate,
               agents: list[str]) -> Relevance:
    touch: set[str] = set()
    grab: set[str] = set()
    place_refs: set[str] = set()
    for leaf in leaves(goal):
        if isinstance(leaf, Location):
            grab.add(leaf.object)
            target = parent_target(leaf.expect)
            if target in scene.objects:
                touch.add(target)
            place_refs.add(leaf.expect)
        elif isinstance(leaf, StatePred):
            touch.add(leaf.object)
            for effect in engine.abilities:
                if effect.sets_state == leaf.key and effect.sets_value == leaf.expect:
                    for oid, obj in scene.objects.items():
                        if effect.ability in obj.provides_abilities:
                            grab.add(oid)
    for agent in agents:
        grab.update(scene.agents[agent].holding)
    # container ancestors may need opening before their contents are reachable
    for oid in list(grab | touch):
        parent = scene.containment.get(oid)
        while parent is not None and parent_kind(parent) in ("in", "on"):
            target = parent_target(parent)
            if target not in scene.objects:
                break
            touch.add(target)
            parent = scene.containment.get(target)
    touch |= grab
    return Relevance(touch, grab, place_refs)


@dataclass
class Plan:
    steps: list[dict[str, ActionCommand]]

    @property
    def length(self) -> int:
        return len(self.steps)


@dataclass
class Unsolvable:
    bound: int


def _solo_candidates(engine: ActionEngine, scene: SceneGraph, agent: str,
                     include_idle: bool, rel: Relevance) -> list[ActionCommand]:
    """Commands worth trying for one agent, sorted by raw string.

    Pruning (loss-free for this action algebra): skip GOTO that would not
    change the proximity set, skip DONE (appended after the goal is reached),
    restrict manipulation to goal-relevant entities, and rely on state
    deduplication for everything else.
    """
    node = scene.agents[agent]
    room = node.location
    out: list[ActionCommand] = []
    jointly_holding = bool(scene.joint_held(agent))

    if not jointly_holding:
        for rid in sorted(scene.rooms):
            if rid != room:
                out.append(ActionCommand("GOTO", (rid,), agent))
    prox = scene.proximity.get(agent, set())
    for obj in sorted(rel.touch):
        if obj not in scene.objects or scene.resolve_room(obj) != room:
            continue
        proposed = {obj} | engine._visible_children(scene, obj)
        if proposed != prox:
            out.append(ActionCommand("GOTO", (obj,), agent))
    for obj in sorted(prox & rel.touch):
        if obj not in scene.objects:
            continue
        o = scene.objects[obj]
        if obj in rel.grab and not scene.holder_of(obj) and not jointly_holding \
                and len(node.holding) < node.grasp_limit \
                and o.weight <= node.max_weight - scene.solo_carried_weight(agent):
            out.append(ActionCommand("GRAB", (obj,), agent))
        if "is_open" in o.states:
            verb = "CLOSE" if o.states["is_open"] else "OPEN"
            out.append(ActionCommand(verb, (obj,), agent))
        if "is_on" in o.states:
            verb = "TURN_OFF" if o.states["is_on"] else "TURN_ON"
            out.append(ActionCommand(verb, (obj,), agent))
        for ability in sorted(node.effective_abilities):
            effect = engine.by_ability.get(ability)
            if effect is not None and o.states.get(effect.requires_state) == effect.requires_value:
                out.append(ActionCommand(effect.verb, (obj,), agent))
    for held in node.holding:
        if parent_kind(scene.containment[held]) != "held_by":
            continue
        out.append(ActionCommand("PLACE", (held, "in", room), agent))
        for dest in sorted(prox):
            if dest == held or dest not in scene.objects:
                continue
            d = scene.objects[dest]
            if f"on:{dest}" in rel.place_refs:
                out.append(ActionCommand("PLACE", (held, "on", dest), agent))
            if f"in:{dest}" in rel.place_refs and d.category == "Container" \
                    and d.states.get("is_open", False):
                out.append(ActionCommand("PLACE", (held, "in", dest), agent))
    if include_idle:
        out.append(ActionCommand("EXPLORE", (), agent))
    out.sort(key=lambda c: c.raw)
    return out


def _corp_candidates(scene: SceneGraph, pair: list[str],
                     rel: Relevance) -> list[ActionCommand]:
    """Joint commands available to a matched agent pair (issuer left blank)."""
    a, b = pair
    out: list[ActionCommand] = []
    held = None
    for obj in scene.joint_held(a):
        held = obj
    if held is None:
        shared = scene.proximity.get(a, set()) & scene.proximity.get(b, set())
        for obj in sorted(shared & rel.grab):
            if obj in scene.objects and not scene.holder_of(obj):
                out.append(ActionCommand("CORP_GRAB", (obj,)))
    else:
        room = scene.agents[a].location
        for rid in sorted(scene.rooms):
            if rid != room:
                out.append(ActionCommand("CORP_GOTO", (rid,)))
        out.append(ActionCommand("CORP_PLACE", (held, "in", room)))
        shared = scene.proximity.get(a, set()) & scene.proximity.get(b, set())
        for dest in sorted(shared):
            if dest != held and dest in scene.objects:
                d = scene.objects[dest]
                if f"on:{dest}" in rel.place_refs:
                    out.append(ActionCommand("CORP_PLACE", (held, "on", dest)))
                if f"in:{dest}" in rel.place_refs and d.category == "Container" \
                        and d.states.get("is_open", False):
                    out.append(ActionCommand("CORP_PLACE", (held, "in", dest)))
    out.sort(key=lambda c: c.raw)
    return out


def _joint_steps(engine: ActionEngine, scene: SceneGraph, agents: list[str],
                 rel: Relevance) -> list[dict[str, ActionCommand]]:
    """Per-step command maps to try: solo cross product plus matched CORP
    pairs (at most one CORP initiation per step)."""
    if len(agents) == 1:
        agent = agents[0]
        return [{agent: cmd}
                for cmd in _solo_candidates(engine, scene, agent, False, rel)]
    a, b = agents
    solo_a = _solo_candidates(engine, scene, a, True, rel)
    solo_b = _solo_candidates(engine, scene, b, True, rel)
    steps = []
    for ca in solo_a:
        for cb in solo_b:
            if ca.verb == "EXPLORE" and cb.verb == "EXPLORE":
                continue
            steps.append({a: ca, b: cb})
    for corp in _corp_candidates(scene, [a, b], rel):
        steps.append({a: corp.for_agent(a), b: corp.for_agent(b)})
    return steps


def _apply_step(engine: ActionEngine, scene: SceneGraph,
                step: dict[str, ActionCommand]):
    """Execute a step in place; returns applied deltas in application order."""
    if len(step) == 1:
        (agent, cmd), = step.items()
        outcome = engine.execute(scene, cmd)
        return [outcome.delta] if outcome.ok else [], [outcome]
    outcomes = engine.execute_joint(scene, step)
    deltas = [outcomes[a].delta for a in sorted(outcomes) if outcomes[a].ok and outcomes[a].delta]
    return deltas, [outcomes[a] for a in sorted(outcomes)]


def _undo(scene: SceneGraph, deltas) -> None:
    for delta in reversed(deltas):
        scene.apply_delta(delta.inverse())


def solve(scene: SceneGraph, goal: GoalPredicate, agents: list[str],
          bound: int = DEFAULT_BOUND,
          engine: ActionEngine | None = None) -> Plan | Unsolvable:
    """Shortest plan reaching the goal, or Unsolvable carrying the bound.

    Breadth-first over engine states with canonical-hash deduplication;
    ties are broken by the lexicographic order of candidate action strings.
    """
    engine = engine or ActionEngine()
    agents = sorted(agents)
    root = scene.clone()
    if evaluate(root, goal).satisfied:
        return Plan([])
    rel = _relevance(engine, root, goal, agents)
    seen = {root.canonical_hash()}
    frontier: deque[list[dict[str, ActionCommand]]] = deque([[]])
    while frontier:
        path = frontier.popleft()
        if len(path) >= bound:
            continue
        current = root.clone()
        for step in path:
            _apply_step(engine, current, step)
        for step in _joint_steps(engine, current, agents, rel):
            deltas, outcomes = _apply_step(engine, current, step)
            if not any(o.ok and o.delta for o in outcomes):
                continue  # failed or pure no-op step
            key = current.canonical_hash()
            if key not in seen:
                seen.add(key)
                new_path = path + [step]
                if evaluate(current, goal).satisfied:
                    _undo(current, deltas)
                    return Plan(new_path)
                frontier.append(new_path)
            _undo(current, deltas)
    return Unsolvable(bound)


def finishing_step(agents: list[str]) -> dict[str, ActionCommand]:
    """The terminal step where every agent declares DONE."""
    return {agent: ActionCommand("DONE", (), agent) for agent in sorted(agents)}


def expert_plan(scene: SceneGraph, goal: GoalPredicate, agents: list[str],
                bound: int = DEFAULT_BOUND,
                engine: ActionEngine | None = None) -> Plan | Unsolvable:
    """Shortest goal-reaching plan plus the terminal all-DONE step.

    The stored expert length counts that final step, matching how episode
    step accounting counts an agent's closing DONE query.
    """
    result = solve(scene, goal, agents, bound, engine)
    if isinstance(result, Unsolvable):
        return result
    return Plan(result.steps + [finishing_step(agents)])


def certify(scene: SceneGraph, goal: GoalPredicate, agents: list[str],
            bound: int = DEFAULT_BOUND) -> dict:
    result = expert_plan(scene, goal, agents, bound)
    if isinstance(result, Unsolvable):
        return {"solvable": False, "bound": bound, "expert_length": None}
    return {"solvable": True, "bound": bound, "expert_length": result.length,
            "plan": result}


def replay(scene: SceneGraph, plan: Plan,
           engine: ActionEngine | None = None) -> tuple[SceneGraph, list]:
    """Execute a plan step by step, asserting every outcome is Ok."""
    engine = engine or ActionEngine()
    current = scene.clone()
    all_outcomes = []
    for index, step in enumerate(plan.steps):
        if len(step) == 1:
            (agent, cmd), = step.items()
            outcomes = {agent: engine.execute(current, cmd)}
        else:
            outcomes = engine.execute_joint(current, step)
        for agent in sorted(outcomes):
            if not outcomes[agent].ok:
                raise ReplayDivergence(
                    f"step {index}: {step[agent].raw} by {agent} failed: "
                    f"{outcomes[agent].message}")
        all_outcomes.append(outcomes)
    return current, all_outcomes
