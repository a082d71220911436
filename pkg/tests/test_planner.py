"""Planner: soundness, optimality against brute force, determinism."""

from __future__ import annotations

import random

import pytest

from roomsim import planner
from roomsim.goals import And, Location, StatePred, evaluate
from roomsim.world import load_scene

from conftest import basic_document, duo_document
from oracle_utils import brute_force_length


class TestSolve:
    def test_already_satisfied_empty_plan(self, scene):
        result = planner.solve(scene, Location("cup_1", "on:table_1"), ["agent_1"])
        assert isinstance(result, planner.Plan) and result.length == 0

    def test_move_cup_plan_length(self, scene):
        # GOTO table_1, GRAB cup_2, GOTO hall_1, PLACE cup_2 in hall_1
        result = planner.solve(scene, Location("cup_2", "in:hall_1"), ["agent_1"])
        assert result.length == 4

    def test_tool_fetch_plan_length(self, scene):
        # fetch the mop from the other room before cleaning
        result = planner.solve(scene, StatePred("table_1", "is_dirty", False),
                               ["agent_1"])
        assert result.length == 6
        verbs = [step["agent_1"].verb for step in result.steps]
        assert verbs[-1] == "CLEAN"
        assert "GRAB" in verbs

    def test_hidden_object_requires_open(self, scene):
        result = planner.solve(scene, Location("coin_1", "in:kitchen_1"),
                               ["agent_1"])
        verbs = [step["agent_1"].verb for step in result.steps]
        assert "OPEN" in verbs
        assert verbs.index("OPEN") < verbs.index("GRAB")

    def test_collaboration_plan_uses_corp(self, duo_scene):
        result = planner.solve(duo_scene, Location("crate_1", "in:hall_1"),
                               ["agent_1", "agent_2"])
        assert isinstance(result, planner.Plan)
        verb_sets = [{cmd.verb for cmd in step.values()} for step in result.steps]
        assert {"CORP_GRAB"} in verb_sets
        assert {"CORP_PLACE"} in verb_sets

    def test_unsolvable_carries_bound(self, scene):
        scene.objects["cup_1"].attributes["weight"] = 500.0
        result = planner.solve(scene, Location("cup_1", "in:hall_1"),
                               ["agent_1"], bound=6)
        assert isinstance(result, planner.Unsolvable) and result.bound == 6

    def test_plans_replay_ok(self, scene):
        goal = StatePred("table_1", "is_dirty", False)
        result = planner.solve(scene, goal, ["agent_1"])
        final, outcomes = planner.replay(scene, result)
        assert all(o.ok for step in outcomes for o in step.values())
        assert evaluate(final, goal).satisfied

    def test_deterministic_tie_break(self, scene):
        goal = Location("cup_2", "in:hall_1")
        first = planner.solve(scene, goal, ["agent_1"])
        second = planner.solve(scene, goal, ["agent_1"])
        assert [{a: c.raw for a, c in s.items()} for s in first.steps] == \
               [{a: c.raw for a, c in s.items()} for s in second.steps]


class TestExpertPlan:
    def test_appends_terminal_done(self, scene):
        goal = Location("cup_2", "in:hall_1")
        result = planner.expert_plan(scene, goal, ["agent_1"])
        assert result.length == 5  # 4 work steps + the closing DONE
        assert result.steps[-1]["agent_1"].verb == "DONE"

    def test_certify_reports_length(self, scene):
        cert = planner.certify(scene, Location("cup_2", "in:hall_1"), ["agent_1"])
        assert cert["solvable"] and cert["expert_length"] == 5

    def test_replay_divergence_on_bad_plan(self, scene, engine):
        plan = planner.Plan([{"agent_1": engine.parse_action("GRAB cup_1",
                                                             "agent_1")}])
        with pytest.raises(planner.ReplayDivergence):
            planner.replay(scene, plan)


class TestOptimalityAgainstBruteForce:
    """Spot checks here; the full 50-scene sweep runs in acceptance."""

    def test_fixture_scene_goals(self, scene):
        for goal in (Location("cup_2", "in:hall_1"),
                     Location("cup_1", "on:table_1"),
                     StatePred("table_1", "is_dirty", False),
                     StatePred("box_1", "is_open", True),
                     And((Location("cup_1", "in:hall_1"),
                          Location("cup_2", "in:hall_1")))):
            expected = brute_force_length(scene, goal, ["agent_1"], bound=10)
            result = planner.solve(scene, goal, ["agent_1"], bound=10)
            got = result.length if isinstance(result, planner.Plan) else None
            assert got == expected, goal

    def test_duo_scene_corp_goal(self):
        # minimal two-agent scene keeps the exhaustive oracle tractable
        scene = load_scene({
            "scene_id": "scene_9",
            "rooms": [
                {"id": "kitchen_1", "name": "Kitchen", "connects_to": ["hall_1"]},
                {"id": "hall_1", "name": "Hall", "connects_to": []},
            ],
            "objects": [
                {"id": "crate_1", "category": "Furniture",
                 "location": "in:kitchen_1", "attributes": {"weight": 40.0}},
                {"id": "cup_1", "category": "Other", "location": "in:hall_1",
                 "attributes": {"weight": 0.3}},
            ],
            "agents": [
                {"id": "agent_1", "location": "kitchen_1", "grasp_limit": 2,
                 "max_weight": 25.0, "base_abilities": []},
                {"id": "agent_2", "location": "hall_1", "grasp_limit": 2,
                 "max_weight": 25.0, "base_abilities": []},
            ],
        })
        goal = Location("crate_1", "in:hall_1")
        expected = brute_force_length(scene, goal,
                                      ["agent_1", "agent_2"], bound=5)
        result = planner.solve(scene, goal, ["agent_1", "agent_2"], bound=5)
        assert isinstance(result, planner.Plan) and result.length == expected

    def test_completeness_up_to_bound(self, scene):
        goal = Location("coin_1", "in:kitchen_1")
        expected = brute_force_length(scene, goal, ["agent_1"], bound=8)
        assert expected is not None
        result = planner.solve(scene, goal, ["agent_1"], bound=8)
        assert isinstance(result, planner.Plan) and result.length == expected
