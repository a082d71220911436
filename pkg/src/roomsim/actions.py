"""Action vocabulary, grammar, precondition checks, and effects.

Feedback message strings are part of the stable interface: agents condition
on them, so they are golden-tested and should not be reworded casually.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

from .errors import ArityError, UnknownEntity, UnknownVerb
from .world import (
    SceneGraph,
    StateDelta,
    fmt_num,
    joint_holders,
    make_joint_ref,
    parent_kind,
    parent_target,
)

BASIC_VERBS = ("GOTO", "EXPLORE", "GRAB", "PLACE", "OPEN", "CLOSE", "TURN_ON", "TURN_OFF", "DONE")
CORP_VERBS = ("CORP_GRAB", "CORP_GOTO", "CORP_PLACE")

ARITY = {
    "GOTO": 1, "EXPLORE": 0, "GRAB": 1, "PLACE": 3,
    "OPEN": 1, "CLOSE": 1, "TURN_ON": 1, "TURN_OFF": 1, "DONE": 0,
    "CORP_GRAB": 1, "CORP_GOTO": 1, "CORP_PLACE": 3,
}


@dataclass(frozen=True)
class ActionCommand:
    verb: str
    args: tuple[str, ...] = ()
    issuer: str = ""

    @property
    def raw(self) -> str:
        return " ".join((self.verb,) + self.args)

    def for_agent(self, agent: str) -> "ActionCommand":
        return ActionCommand(self.verb, self.args, agent)


@dataclass
class ActionOutcome:
    status: str  # "Ok" | "Failed"
    delta: StateDelta = field(default_factory=StateDelta)
    message: str = ""
    error: str | None = None  # error code on failure (NotNear, TooHeavy, ...)

    @property
    def ok(self) -> bool:
        return self.status == "Ok"


@dataclass(frozen=True)
class AbilityEffect:
    ability: str
    verb: str
    requires_state: str
    requires_value: bool
    sets_state: str
    sets_value: bool


def load_ability_config(path=None) -> list[AbilityEffect]:
    """Load the tool-verb effect table (packaged default or a JSON file)."""
    if path is None:
        text = resources.files("roomsim.data").joinpath("abilities.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    out = []
    for entry in json.loads(text):
        out.append(AbilityEffect(
            ability=entry["ability"],
            verb=entry["verb"].upper(),
            requires_state=entry["requires"]["state"],
            requires_value=bool(entry["requires"]["value"]),
            sets_state=entry["sets"]["state"],
            sets_value=bool(entry["sets"]["value"]),
        ))
    return out


def _fail(error: str, message: str) -> ActionOutcome:
    return ActionOutcome("Failed", StateDelta(), message, error)


class ActionEngine:
    """Validates and executes commands against a scene."""

    def __init__(self, abilities: list[AbilityEffect] | None = None):
        self.abilities = abilities if abilities is not None else load_ability_config()
        self.by_verb = {a.verb: a for a in self.abilities}
        self.by_ability = {a.ability: a for a in self.abilities}

    # -- grammar ---------------------------------------------------------

    def parse_action(self, raw: str, issuer: str = "") -> ActionCommand:
        tokens = raw.strip().split()
        if not tokens:
            raise UnknownVerb("")
        verb = tokens[0].upper()
        args = tokens[1:]
        if verb not in ARITY and verb not in self.by_verb:
            raise UnknownVerb(tokens[0])
        expected = ARITY.get(verb, 1)
        if len(args) != expected:
            raise ArityError(verb, str(expected), len(args))
        if verb in ("PLACE", "CORP_PLACE"):
            rel = args[1].lower()
            if rel not in ("in", "on"):
                raise ArityError(verb, "<obj> <in|on> <target>", len(args))
            args = [args[0], rel, args[2]]
        return ActionCommand(verb, tuple(args), issuer)

    # -- advertised action list -----------------------------------------

    def available_actions(self, scene: SceneGraph, agent: str) -> list[tuple[str, str]]:
        if agent not in scene.agents:
            raise UnknownEntity(agent)
        actions = [
            ("GOTO <room|object>", "Move to a connected room, or approach an object in your current room."),
            ("EXPLORE", "Survey your current room to discover objects."),
            ("GRAB <object>", "Pick up a nearby object within your carrying capacity."),
            ("PLACE <object> <in|on> <target>", "Put a held object in/on a nearby target or your current room."),
            ("OPEN <container>", "Open a nearby closed container."),
            ("CLOSE <container>", "Close a nearby open container."),
            ("TURN_ON <appliance>", "Switch on a nearby device."),
            ("TURN_OFF <appliance>", "Switch off a nearby device."),
            ("DONE", "Declare that you have finished your part of the task."),
        ]
        node = scene.agents[agent]
        for ability in sorted(node.effective_abilities):
            effect = self.by_ability.get(ability)
            if effect is not None:
                actions.append((f"{effect.verb} <object>",
                                f"Use your '{effect.ability}' ability on a nearby object."))
        if len(scene.agents) >= 2:
            actions.extend([
                ("CORP_GRAB <object>", "Jointly grab a heavy object (both agents must issue this)."),
                ("CORP_GOTO <room>", "Carry a jointly held object to a connected room."),
                ("CORP_PLACE <object> <in|on> <target>", "Jointly place the carried object; ends the joint hold."),
            ])
        return actions

    # -- execution -------------------------------------------------------

    def execute(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        agent = cmd.issuer
        if agent not in scene.agents:
            raise UnknownEntity(agent)
        node = scene.agents[agent]
        if node.done and cmd.verb != "DONE":
            return _fail("AgentDone", f"{agent} has already declared DONE and can take no further actions.")
        if cmd.verb.startswith("CORP_"):
            return _fail("PartnerNotReady",
                         f"{cmd.verb} needs both agents to issue the same command this step.")
        handler = getattr(self, "_do_" + cmd.verb.lower(), None)
        if handler is not None:
            return handler(scene, cmd)
        effect = self.by_verb.get(cmd.verb)
        if effect is not None:
            return self._do_tool_verb(scene, cmd, effect)
        raise UnknownVerb(cmd.verb)

    # individual verbs ---------------------------------------------------

    def _do_goto(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        agent = cmd.issuer
        target = cmd.args[0]
        node = scene.agents[agent]
        if target in scene.rooms:
            if scene.joint_held(agent):
                held = scene.joint_held(agent)[0]
                return _fail("JointHoldActive",
                             f"you are jointly holding {held}; use CORP_GOTO to move together.")
            if target not in scene.rooms_reachable(node.location):
                return _fail("Unreachable", f"{target} is not reachable from {node.location}.")
            changes = self._movement_changes(scene, [agent], target)
            scene.apply_delta(StateDelta(changes))
            return ActionOutcome("Ok", StateDelta(changes), f"You moved to {target}.")
        if target in scene.objects:
            if scene.resolve_room(target) != node.location:
                return _fail("NotNear", f"{target} is not in your current room; "
                                        f"you must GOTO its room first.")
            blocker = self._closed_ancestor(scene, target)
            if blocker is not None:
                return _fail("ContainerClosed",
                             f"{target} is inside {blocker}, which is closed.")
            visible = self._visible_children(scene, target)
            new_prox = tuple(sorted({target} | visible))
            old_prox = tuple(sorted(scene.proximity.get(agent, set())))
            changes = [("proximity_set", agent, old_prox, new_prox)]
            scene.apply_delta(StateDelta(changes))
            return ActionOutcome("Ok", StateDelta(changes), f"You approach {target}.")
        return _fail("UnknownEntity", f"there is no room or object named {target}.")

    def _closed_ancestor(self, scene: SceneGraph, target: str) -> str | None:
        """The closed container (if any) standing between target and its room."""
        parent = scene.containment.get(target)
        while parent is not None and parent_kind(parent) in ("in", "on"):
            holder = parent_target(parent)
            if holder not in scene.objects:
                return None
            if parent_kind(parent) == "in" \
                    and scene.objects[holder].category == "Container" \
                    and not scene.objects[holder].states.get("is_open", False):
                return holder
            parent = scene.containment.get(holder)
        return None

    def _movement_changes(self, scene: SceneGraph, movers: list[str], room: str) -> list[tuple]:
        """Relocate agents (and implicitly their cargo), fixing proximity sets."""
        changes: list[tuple] = []
        moving_entities = set(movers)
        for mover in movers:
            for obj in scene.agents[mover].holding:
                moving_entities |= scene.subtree(obj)
        for mover in movers:
            old_room = scene.agents[mover].location
            if old_room != room:
                changes.append(("moved", mover, "in:" + old_room, "in:" + room))
            old_prox = tuple(sorted(scene.proximity.get(mover, set())))
            if old_prox:
                changes.append(("proximity_set", mover, old_prox, ()))
        for other, prox in sorted(scene.proximity.items()):
            if other in movers:
                continue
            stale = prox & moving_entities
            if stale:
                old = tuple(sorted(prox))
                new = tuple(sorted(prox - stale))
                changes.append(("proximity_set", other, old, new))
        return changes

    def _visible_children(self, scene: SceneGraph, target: str) -> set[str]:
        """Direct children visible on approach: surface items always, container
        contents only when the container is open."""
        obj = scene.objects[target]
        visible = set()
        for child in scene.children_of(target):
            rel = parent_kind(scene.containment[child])
            if rel == "on":
                visible.add(child)
            elif rel == "in":
                if obj.category != "Container" or obj.states.get("is_open", False):
                    visible.add(child)
        return visible

    def _do_grab(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        agent = cmd.issuer
        target = cmd.args[0]
        node = scene.agents[agent]
        if target not in scene.objects:
            return _fail("UnknownEntity", f"there is no object named {target}.")
        if target not in scene.proximity.get(agent, set()):
            return _fail("NotNear", f"you must GOTO {target} first.")
        if scene.holder_of(target):
            return _fail("AlreadyHeld", f"{target} is already being held.")
        if scene.joint_held(agent):
            held = scene.joint_held(agent)[0]
            return _fail("JointHoldActive",
                         f"you are jointly holding {held}; finish the CORP_ sequence first.")
        if len(node.holding) >= node.grasp_limit:
            return _fail("HandsFull", f"your hands are full (limit {node.grasp_limit}).")
        weight = scene.objects[target].weight
        carried = scene.solo_carried_weight(agent)
        remaining = node.max_weight - carried
        if weight > remaining:
            if carried > 0:
                return _fail("TooHeavy", f"{target} weighs {fmt_num(weight)}kg; "
                                         f"your remaining capacity is {fmt_num(remaining)}kg.")
            return _fail("TooHeavy", f"{target} weighs {fmt_num(weight)}kg; "
                                     f"your limit is {fmt_num(node.max_weight)}kg.")
        changes: list[tuple] = [("moved", target, scene.containment[target], "held_by:" + agent)]
        changes += self._ability_changes(scene, {agent: {"add": {target}}})
        scene.apply_delta(StateDelta(changes))
        return ActionOutcome("Ok", StateDelta(changes), f"You grab {target}.")

    def _ability_changes(self, scene: SceneGraph, holding_edits: dict) -> list[tuple]:
        """abilities_set changes for agents whose holdings are about to change.

        holding_edits: agent -> {"add": set, "remove": set} applied hypothetically.
        """
        changes = []
        for agent in sorted(holding_edits):
            edit = holding_edits[agent]
            future = set(scene.agents[agent].holding)
            future |= edit.get("add", set())
            future -= edit.get("remove", set())
            abilities = set(scene.agents[agent].base_abilities)
            for obj in future:
                abilities |= scene.objects[obj].provides_abilities
            old = tuple(sorted(scene.agents[agent].effective_abilities))
            new = tuple(sorted(abilities))
            if old != new:
                changes.append(("abilities_set", agent, old, new))
        return changes

    def _do_place(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        agent = cmd.issuer
        target, rel, dest = cmd.args[0], cmd.args[1], cmd.args[2]
        node = scene.agents[agent]
        if target not in scene.objects:
            return _fail("UnknownEntity", f"there is no object named {target}.")
        if scene.containment.get(target) != "held_by:" + agent:
            return _fail("NotHolding", f"you are not holding {target}.")
        if dest in scene.rooms:
            if rel != "in":
                return _fail("InvalidTarget", f"use 'in' to place something in a room.")
            if dest != node.location:
                return _fail("NotNear", f"you are not in {dest}.")
        elif dest in scene.objects:
            if dest not in scene.proximity.get(agent, set()):
                return _fail("NotNear", f"you must GOTO {dest} first.")
            if dest in scene.subtree(target):
                return _fail("InvalidTarget", f"cannot place {target} inside itself.")
            if rel == "in":
                dest_obj = scene.objects[dest]
                if dest_obj.category != "Container":
                    return _fail("NotAContainer", f"{dest} is not a container.")
                if not dest_obj.states.get("is_open", False):
                    return _fail("ContainerClosed", f"{dest} is closed; OPEN it first.")
        else:
            return _fail("UnknownEntity", f"there is no room or object named {dest}.")
        changes: list[tuple] = [("moved", target, "held_by:" + agent, f"{rel}:{dest}")]
        changes += self._ability_changes(scene, {agent: {"remove": {target}}})
        scene.apply_delta(StateDelta(changes))
        return ActionOutcome("Ok", StateDelta(changes), f"You place {target} {rel} {dest}.")

    def _toggle(self, scene: SceneGraph, cmd: ActionCommand, key: str, value: bool,
                missing: tuple[str, str], already: tuple[str, str], done_msg: str) -> ActionOutcome:
        agent, target = cmd.issuer, cmd.args[0]
        if target not in scene.objects:
            return _fail("UnknownEntity", f"there is no object named {target}.")
        if target not in scene.proximity.get(agent, set()):
            return _fail("NotNear", f"you must GOTO {target} first.")
        obj = scene.objects[target]
        if key not in obj.states:
            return _fail(missing[0], missing[1].format(target=target))
        if obj.states[key] == value:
            return _fail(already[0], already[1].format(target=target))
        changes = [("state_set", target, key, obj.states[key], value)]
        scene.apply_delta(StateDelta(changes))
        return ActionOutcome("Ok", StateDelta(changes), done_msg.format(target=target))

    def _do_open(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        return self._toggle(scene, cmd, "is_open", True,
                            ("NotOpenable", "{target} cannot be opened."),
                            ("AlreadyOpen", "{target} is already open."),
                            "You open {target}.")

    def _do_close(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        return self._toggle(scene, cmd, "is_open", False,
                            ("NotOpenable", "{target} cannot be closed."),
                            ("AlreadyClosed", "{target} is already closed."),
                            "You close {target}.")

    def _do_turn_on(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        return self._toggle(scene, cmd, "is_on", True,
                            ("NotSwitchable", "{target} has no power switch."),
                            ("AlreadyOn", "{target} is already on."),
                            "You turn on {target}.")

    def _do_turn_off(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        return self._toggle(scene, cmd, "is_on", False,
                            ("NotSwitchable", "{target} has no power switch."),
                            ("AlreadyOff", "{target} is already off."),
                            "You turn off {target}.")

    def _do_tool_verb(self, scene: SceneGraph, cmd: ActionCommand, effect: AbilityEffect) -> ActionOutcome:
        agent, target = cmd.issuer, cmd.args[0]
        node = scene.agents[agent]
        if effect.ability not in node.effective_abilities:
            return _fail("MissingAbility", f"you lack the '{effect.ability}' ability; "
                                           f"find and GRAB a tool that provides it.")
        if target not in scene.objects:
            return _fail("UnknownEntity", f"there is no object named {target}.")
        if target not in scene.proximity.get(agent, set()):
            return _fail("NotNear", f"you must GOTO {target} first.")
        obj = scene.objects[target]
        if obj.states.get(effect.requires_state) != effect.requires_value:
            return _fail("TargetNotApplicable",
                         f"{effect.verb} does not apply to {target} right now.")
        changes = [("state_set", target, effect.sets_state,
                    obj.states.get(effect.sets_state), effect.sets_value)]
        scene.apply_delta(StateDelta(changes))
        return ActionOutcome("Ok", StateDelta(changes),
                             f"You {effect.verb.lower().replace('_', ' ')} {target}.")

    def _do_explore(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        # No scene mutation; discovery happens on the observation side.
        return ActionOutcome("Ok", StateDelta(), "You survey the room.")

    def _do_done(self, scene: SceneGraph, cmd: ActionCommand) -> ActionOutcome:
        node = scene.agents[cmd.issuer]
        if node.done:
            return ActionOutcome("Ok", StateDelta(), "You are done.")
        changes = [("done_set", cmd.issuer, False, True)]
        scene.apply_delta(StateDelta(changes))
        return ActionOutcome("Ok", StateDelta(changes), "You declare the task done.")

    # -- joint execution -------------------------------------------------

    def execute_joint(self, scene: SceneGraph,
                      cmds: dict[str, ActionCommand]) -> dict[str, ActionOutcome]:
        """One command per agent; matched CORP_ pairs execute atomically."""
        ids = sorted(cmds)
        outcomes: dict[str, ActionOutcome] = {}
        corp = [a for a in ids if cmds[a].verb.startswith("CORP_")]
        if (len(corp) == 2
                and cmds[corp[0]].verb == cmds[corp[1]].verb
                and cmds[corp[0]].args == cmds[corp[1]].args):
            pair_outcome = self._execute_corp(scene, corp, cmds[corp[0]])
            outcomes[corp[0]] = pair_outcome
            outcomes[corp[1]] = ActionOutcome(pair_outcome.status, StateDelta(),
                                              pair_outcome.message, pair_outcome.error)
            for agent in ids:
                if agent not in corp:
                    outcomes[agent] = self.execute(scene, cmds[agent])
            return outcomes
        for agent in ids:
            outcomes[agent] = self.execute(scene, cmds[agent])
        return outcomes

    def _execute_corp(self, scene: SceneGraph, pair: list[str],
                      cmd: ActionCommand) -> ActionOutcome:
        a, b = pair
        for agent in pair:
            if scene.agents[agent].done:
                return _fail("AgentDone", f"{agent} has already declared DONE.")
        if cmd.verb == "CORP_GRAB":
            target = cmd.args[0]
            if target not in scene.objects:
                return _fail("UnknownEntity", f"there is no object named {target}.")
            for agent in pair:
                if target not in scene.proximity.get(agent, set()):
                    return _fail("NotNear", f"{agent} must GOTO {target} first.")
            if scene.holder_of(target):
                return _fail("AlreadyHeld", f"{target} is already being held.")
            free = 0.0
            for agent in pair:
                node = scene.agents[agent]
                if len(node.holding) >= node.grasp_limit:
                    return _fail("HandsFull", f"{agent}'s hands are full.")
                if scene.joint_held(agent):
                    return _fail("JointHoldActive", f"{agent} is already in a joint hold.")
                free += node.max_weight - scene.solo_carried_weight(agent)
            weight = scene.objects[target].weight
            if weight > free:
                return _fail("JointCapacityExceeded",
                             f"{target} weighs {fmt_num(weight)}kg; "
                             f"your combined free capacity is {fmt_num(free)}kg.")
            changes: list[tuple] = [("moved", target, scene.containment[target],
                                     make_joint_ref(pair))]
            changes += self._ability_changes(scene, {a: {"add": {target}},
                                                     b: {"add": {target}}})
            scene.apply_delta(StateDelta(changes))
            return ActionOutcome("Ok", StateDelta(changes),
                                 f"You jointly grab {target}.")

        held = self._common_joint_hold(scene, pair)
        if cmd.verb == "CORP_GOTO":
            room = cmd.args[0]
            if held is None:
                return _fail("NoJointHold", "you are not jointly holding anything.")
            if room not in scene.rooms:
                return _fail("UnknownEntity", f"there is no room named {room}.")
            if room not in scene.rooms_reachable(scene.agents[a].location):
                return _fail("Unreachable", f"{room} is not reachable.")
            changes = self._movement_changes(scene, pair, room)
            scene.apply_delta(StateDelta(changes))
            return ActionOutcome("Ok", StateDelta(changes),
                                 f"You both carry {held} to {room}.")

        if cmd.verb == "CORP_PLACE":
            target, rel, dest = cmd.args[0], cmd.args[1], cmd.args[2]
            if held is None or held != target:
                return _fail("NoJointHold", f"you are not jointly holding {target}.")
            if dest in scene.rooms:
                if rel != "in":
                    return _fail("InvalidTarget", "use 'in' to place something in a room.")
                if dest != scene.agents[a].location:
                    return _fail("NotNear", f"you are not in {dest}.")
            elif dest in scene.objects:
                for agent in pair:
                    if dest not in scene.proximity.get(agent, set()):
                        return _fail("NotNear", f"{agent} must GOTO {dest} first.")
                if dest in scene.subtree(target):
                    return _fail("InvalidTarget", f"cannot place {target} inside itself.")
                if rel == "in":
                    dest_obj = scene.objects[dest]
                    if dest_obj.category != "Container":
                        return _fail("NotAContainer", f"{dest} is not a container.")
                    if not dest_obj.states.get("is_open", False):
                        return _fail("ContainerClosed", f"{dest} is closed; OPEN it first.")
            else:
                return _fail("UnknownEntity", f"there is no room or object named {dest}.")
            changes = [("moved", target, scene.containment[target], f"{rel}:{dest}")]
            changes += self._ability_changes(scene, {a: {"remove": {target}},
                                                     b: {"remove": {target}}})
            scene.apply_delta(StateDelta(changes))
            return ActionOutcome("Ok", StateDelta(changes),
                                 f"You jointly place {target} {rel} {dest}.")
        return _fail("PartnerNotReady", f"unsupported joint verb {cmd.verb}.")

    def _common_joint_hold(self, scene: SceneGraph, pair: list[str]) -> str | None:
        for obj in scene.joint_held(pair[0]):
            if set(joint_holders(scene.containment[obj])) == set(pair):
                return obj
        return None
