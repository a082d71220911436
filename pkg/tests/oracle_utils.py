"""Independent brute-force solver used as the optimality oracle.

Deliberately naive about search: it enumerates the command grammar over
every entity (including commands that will fail) and breadth-first searches
raw engine states. It shares no pruning or hashing logic with the
production planner, so agreement between the two is meaningful evidence.

The only static trimming is grammar-level: verbs whose precondition state
key exists nowhere in the scene can never succeed and are skipped.
"""

from __future__ import annotations

from collections import deque

from roomsim.actions import ActionCommand, ActionEngine
from roomsim.goals import evaluate


def _state_keys_present(scene) -> set[str]:
    keys = set()
    for obj in scene.objects.values():
        keys.update(obj.states)
    return keys


def command_universe(engine, scene, agent: str) -> list[ActionCommand]:
    rooms = sorted(scene.rooms)
    objs = sorted(scene.objects)
    present = _state_keys_present(scene)
    verbs = ["GOTO", "GRAB"]
    if "is_open" in present:
        verbs += ["OPEN", "CLOSE"]
    if "is_on" in present:
        verbs += ["TURN_ON", "TURN_OFF"]
    for effect in engine.abilities:
        if effect.requires_state in present:
            verbs.append(effect.verb)
    cmds = [ActionCommand("EXPLORE", (), agent)]
    for room in rooms:
        cmds.append(ActionCommand("GOTO", (room,), agent))
    for obj in objs:
        for verb in verbs:
            cmds.append(ActionCommand(verb, (obj,), agent))
        for rel in ("in", "on"):
            for target in rooms + objs:
                if target != obj:
                    cmds.append(ActionCommand("PLACE", (obj, rel, target), agent))
    return cmds


def corp_universe(scene) -> list[tuple[str, tuple]]:
    rooms = sorted(scene.rooms)
    objs = sorted(scene.objects)
    cmds = []
    for obj in objs:
        cmds.append(("CORP_GRAB", (obj,)))
        for rel in ("in", "on"):
            for target in rooms + objs:
                if target != obj:
                    cmds.append(("CORP_PLACE", (obj, rel, target)))
    for room in rooms:
        cmds.append(("CORP_GOTO", (room,)))
    return cmds


def state_key(scene) -> tuple:
    """Cheap hashable fingerprint, independent of the planner's hashing."""
    return (
        tuple(sorted(scene.containment.items())),
        tuple((oid, tuple(sorted(obj.states.items())))
              for oid, obj in sorted(scene.objects.items())),
        tuple((aid, a.location, tuple(sorted(scene.proximity.get(aid, set()))),
               tuple(a.holding), tuple(sorted(a.effective_abilities)), a.done)
              for aid, a in sorted(scene.agents.items())),
    )


def brute_force_length(scene, goal, agents, bound: int) -> int | None:
    """Shortest goal-reaching step count by exhaustive grammar enumeration."""
    engine = ActionEngine()
    root = scene.clone()
    if evaluate(root, goal).satisfied:
        return 0
    agents = sorted(agents)
    solo = {a: command_universe(engine, root, a) for a in agents}
    corp = corp_universe(root) if len(agents) == 2 else []

    def joint_steps():
        if len(agents) == 1:
            for cmd in solo[agents[0]]:
                yield {agents[0]: cmd}
            return
        a, b = agents
        for ca in solo[a]:
            for cb in solo[b]:
                yield {a: ca, b: cb}
        for verb, args in corp:
            yield {a: ActionCommand(verb, args, a),
                   b: ActionCommand(verb, args, b)}

    seen = {state_key(root)}
    frontier = deque([(root, 0)])
    while frontier:
        state, depth = frontier.popleft()
        if depth >= bound:
            continue
        for step in joint_steps():
            deltas = []
            if len(step) == 1:
                (agent, cmd), = step.items()
                outcome = engine.execute(state, cmd)
                if outcome.ok and outcome.delta:
                    deltas.append(outcome.delta)
            else:
                outcomes = engine.execute_joint(state, step)
                deltas = [outcomes[a].delta for a in sorted(outcomes)
                          if outcomes[a].ok and outcomes[a].delta]
            if not deltas:
                continue
            key = state_key(state)
            if key not in seen:
                seen.add(key)
                if evaluate(state, goal).satisfied:
                    return depth + 1
                frontier.append((state.clone(), depth + 1))
            for delta in reversed(deltas):
                state.apply_delta(delta.inverse())
    return None
