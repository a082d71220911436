"""Action engine: grammar, preconditions, effects, capability binding,
collaborative transport, and golden feedback messages."""

from __future__ import annotations

import pytest

from roomsim.actions import ActionCommand, ActionEngine
from roomsim.errors import ArityError, UnknownVerb
from roomsim.world import load_scene

from conftest import basic_document, duo_document


def run(engine, scene, raw, agent="agent_1"):
    return engine.execute(scene, engine.parse_action(raw, agent))


def run_joint(engine, scene, raws: dict):
    cmds = {a: engine.parse_action(raw, a) for a, raw in raws.items()}
    return engine.execute_joint(scene, cmds)


class TestParse:
    def test_case_insensitive_verb(self, engine):
        cmd = engine.parse_action("goto kitchen_1", "agent_1")
        assert cmd.verb == "GOTO" and cmd.args == ("kitchen_1",)

    def test_entity_tokens_verbatim(self, engine):
        cmd = engine.parse_action("GRAB Cup_1", "agent_1")
        assert cmd.args == ("Cup_1",)  # not case-folded; resolution fails later

    def test_whitespace_tolerant(self, engine):
        cmd = engine.parse_action("  PLACE   cup_1  on   table_1 ", "agent_1")
        assert cmd.raw == "PLACE cup_1 on table_1"

    def test_unknown_verb(self, engine):
        with pytest.raises(UnknownVerb):
            engine.parse_action("FROBNICATE cup_1", "agent_1")

    def test_arity_error(self, engine):
        with pytest.raises(ArityError):
            engine.parse_action("GRAB", "agent_1")
        with pytest.raises(ArityError):
            engine.parse_action("GOTO a b", "agent_1")


class TestGotoAndProximity:
    def test_goto_room_clears_proximity(self, scene, engine):
        run(engine, scene, "GOTO table_1")
        assert "table_1" in scene.proximity["agent_1"]
        run(engine, scene, "GOTO hall_1")
        assert scene.proximity["agent_1"] == set()

    def test_goto_object_sets_proximity_with_children(self, scene, engine):
        run(engine, scene, "GOTO table_1")
        assert scene.proximity["agent_1"] == {"table_1", "cup_1", "cup_2"}

    def test_goto_room_is_one_action_regardless_of_hops(self):
        # movement is teleport-along-graph: kitchen -> attic via hall in one step
        doc = basic_document()
        doc["rooms"].append({"id": "attic_1", "name": "Attic",
                             "connects_to": ["hall_1"]})
        scene = load_scene(doc)
        engine = ActionEngine()
        out = run(engine, scene, "GOTO attic_1")
        assert out.ok
        assert scene.agents["agent_1"].location == "attic_1"

    def test_goto_object_other_room_fails(self, scene, engine):
        out = run(engine, scene, "GOTO mop_1")
        assert out.error == "NotNear" and not out.ok

    def test_closed_container_contents_not_proximate(self, scene, engine):
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO box_1")
        assert "coin_1" not in scene.proximity["agent_1"]
        run(engine, scene, "OPEN box_1")
        run(engine, scene, "GOTO box_1")
        assert "coin_1" in scene.proximity["agent_1"]


class TestGrabPlace:
    def test_grab_requires_proximity(self, scene, engine):
        out = run(engine, scene, "GRAB cup_1")
        assert out.error == "NotNear"
        assert out.message == "you must GOTO cup_1 first."

    def test_too_heavy_message(self, scene, engine):
        run(engine, scene, "GOTO table_1")
        out = run(engine, scene, "GRAB table_1")
        assert out.error == "TooHeavy"
        assert out.message == "table_1 weighs 40kg; your limit is 25kg."

    def test_hands_full(self, scene, engine):
        run(engine, scene, "GOTO table_1")
        run(engine, scene, "GRAB cup_1")
        out = run(engine, scene, "GRAB cup_2")
        assert out.error == "HandsFull"
        assert out.message == "your hands are full (limit 1)."

    def test_place_in_room(self, scene, engine):
        run(engine, scene, "GOTO cup_1")
        run(engine, scene, "GRAB cup_1")
        out = run(engine, scene, "PLACE cup_1 in kitchen_1")
        assert out.ok and scene.containment["cup_1"] == "in:kitchen_1"

    def test_place_into_closed_container(self, scene, engine):
        run(engine, scene, "GOTO cup_1")
        run(engine, scene, "GRAB cup_1")
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO box_1")
        out = run(engine, scene, "PLACE cup_1 in box_1")
        assert out.error == "ContainerClosed"
        assert out.message == "box_1 is closed; OPEN it first."

    def test_place_not_holding(self, scene, engine):
        out = run(engine, scene, "PLACE cup_1 on table_1")
        assert out.error == "NotHolding"

    def test_self_containment_rejected(self, scene, engine):
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "OPEN box_1")
        run(engine, scene, "GOTO box_1")
        run(engine, scene, "GRAB box_1")
        out = run(engine, scene, "PLACE box_1 in box_1")
        assert out.error == "InvalidTarget"


class TestToggles:
    def test_open_close_cycle(self, scene, engine):
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO box_1")
        assert run(engine, scene, "OPEN box_1").ok
        assert run(engine, scene, "OPEN box_1").error == "AlreadyOpen"
        assert run(engine, scene, "CLOSE box_1").ok
        assert run(engine, scene, "CLOSE box_1").error == "AlreadyClosed"

    def test_open_non_openable(self, scene, engine):
        run(engine, scene, "GOTO table_1")
        out = run(engine, scene, "OPEN table_1")
        assert out.error == "NotOpenable"


class TestCapabilityBinding:
    def test_grab_tool_grants_ability(self, scene, engine):
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO mop_1")
        run(engine, scene, "GRAB mop_1")
        assert "clean" in scene.agents["agent_1"].effective_abilities

    def test_release_revokes_ability(self, scene, engine):
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO mop_1")
        run(engine, scene, "GRAB mop_1")
        run(engine, scene, "PLACE mop_1 in hall_1")
        assert "clean" not in scene.agents["agent_1"].effective_abilities

    def test_clean_without_tool(self, scene, engine):
        run(engine, scene, "GOTO table_1")
        out = run(engine, scene, "CLEAN table_1")
        assert out.error == "MissingAbility"

    def test_clean_with_tool(self, scene, engine):
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO mop_1")
        run(engine, scene, "GRAB mop_1")
        run(engine, scene, "GOTO kitchen_1")
        run(engine, scene, "GOTO table_1")
        out = run(engine, scene, "CLEAN table_1")
        assert out.ok
        assert scene.objects["table_1"].states["is_dirty"] is False

    def test_clean_clean_target(self, scene, engine):
        scene.objects["table_1"].states["is_dirty"] = False
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO mop_1")
        run(engine, scene, "GRAB mop_1")
        run(engine, scene, "GOTO kitchen_1")
        run(engine, scene, "GOTO table_1")
        out = run(engine, scene, "CLEAN table_1")
        assert out.error == "TargetNotApplicable"

    def test_tool_verbs_listed_only_when_held(self, scene, engine):
        forms = [f for f, _ in engine.available_actions(scene, "agent_1")]
        assert not any(f.startswith("CLEAN") for f in forms)
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO mop_1")
        run(engine, scene, "GRAB mop_1")
        forms = [f for f, _ in engine.available_actions(scene, "agent_1")]
        assert any(f.startswith("CLEAN") for f in forms)


class TestCollaboration:
    def corp_grab(self, engine, scene):
        run_joint(engine, scene, {"agent_1": "GOTO crate_1",
                                  "agent_2": "GOTO crate_1"})
        return run_joint(engine, scene, {"agent_1": "CORP_GRAB crate_1",
                                         "agent_2": "CORP_GRAB crate_1"})

    def test_full_transport_sequence(self, duo_scene, engine):
        outs = self.corp_grab(engine, duo_scene)
        assert all(o.ok for o in outs.values())
        assert duo_scene.containment["crate_1"] == "joint_held_by:agent_1+agent_2"
        outs = run_joint(engine, duo_scene, {"agent_1": "CORP_GOTO hall_1",
                                             "agent_2": "CORP_GOTO hall_1"})
        assert all(o.ok for o in outs.values())
        assert duo_scene.agents["agent_1"].location == "hall_1"
        assert duo_scene.agents["agent_2"].location == "hall_1"
        outs = run_joint(engine, duo_scene, {"agent_1": "CORP_PLACE crate_1 in hall_1",
                                             "agent_2": "CORP_PLACE crate_1 in hall_1"})
        assert all(o.ok for o in outs.values())
        assert duo_scene.containment["crate_1"] == "in:hall_1"

    def test_unmatched_corp_fails(self, duo_scene, engine):
        run_joint(engine, duo_scene, {"agent_1": "GOTO crate_1",
                                      "agent_2": "GOTO crate_1"})
        outs = run_joint(engine, duo_scene, {"agent_1": "CORP_GRAB crate_1",
                                             "agent_2": "EXPLORE"})
        assert outs["agent_1"].error == "PartnerNotReady"
        assert "joint_held_by" not in duo_scene.containment["crate_1"]

    def test_solo_grab_too_heavy_but_joint_ok(self, duo_scene, engine):
        run(engine, duo_scene, "GOTO crate_1")
        out = run(engine, duo_scene, "GRAB crate_1")
        assert out.error == "TooHeavy"
        outs = self.corp_grab(engine, duo_scene)
        assert all(o.ok for o in outs.values())

    def test_joint_capacity_exceeded(self, duo_scene, engine):
        duo_scene.objects["crate_1"].attributes["weight"] = 60.0
        outs = self.corp_grab(engine, duo_scene)
        assert outs["agent_1"].error == "JointCapacityExceeded"
        assert outs["agent_1"].message == \
            "crate_1 weighs 60kg; your combined free capacity is 50kg."

    def test_solo_room_move_blocked_during_joint_hold(self, duo_scene, engine):
        self.corp_grab(engine, duo_scene)
        out = run(engine, duo_scene, "GOTO hall_1")
        assert out.error == "JointHoldActive"

    def test_solo_grab_blocked_during_joint_hold(self, duo_scene, engine):
        self.corp_grab(engine, duo_scene)
        run(engine, duo_scene, "GOTO cup_1")  # approaching objects is allowed
        out = run(engine, duo_scene, "GRAB cup_1")
        assert out.error == "JointHoldActive"

    def test_corp_goto_without_hold(self, duo_scene, engine):
        outs = run_joint(engine, duo_scene, {"agent_1": "CORP_GOTO hall_1",
                                             "agent_2": "CORP_GOTO hall_1"})
        assert outs["agent_1"].error == "NoJointHold"

    def test_moved_only_after_corp_place(self, duo_scene, engine):
        """A joint-held object matches no in:/on: location predicate."""
        self.corp_grab(engine, duo_scene)
        run_joint(engine, duo_scene, {"agent_1": "CORP_GOTO hall_1",
                                      "agent_2": "CORP_GOTO hall_1"})
        assert duo_scene.containment["crate_1"] == "joint_held_by:agent_1+agent_2"
        assert duo_scene.resolve_room("crate_1") == "hall_1"


class TestDone:
    def test_done_is_sticky(self, scene, engine):
        assert run(engine, scene, "DONE").ok
        out = run(engine, scene, "GOTO hall_1")
        assert out.error == "AgentDone"

    def test_failed_actions_never_mutate(self, scene, engine):
        attempts = ["GRAB cup_1", "GOTO mop_1", "OPEN box_1",
                    "PLACE cup_1 on table_1", "CLEAN table_1", "GOTO nowhere_9"]
        before = scene.canonical_json()
        for raw in attempts:
            out = run(engine, scene, raw)
            assert not out.ok
            assert scene.canonical_json() == before


class TestExplore:
    def test_explore_pure(self, scene, engine):
        before = scene.canonical_json()
        out = run(engine, scene, "EXPLORE")
        assert out.ok and scene.canonical_json() == before
