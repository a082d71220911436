"""Observation rendering, knowledge accumulation, and visibility rules."""

from __future__ import annotations

import re

from roomsim import observe
from roomsim.observe import (OBS_VERSION, KnowledgeState, explore,
                             refresh_surroundings, render_observation)


def run(engine, scene, raw, agent="agent_1"):
    return engine.execute(scene, engine.parse_action(raw, agent))


GOLDEN_INITIAL = """\
== Observation (obs-v1, Partial) ==
You are agent_1 in kitchen_1 (Kitchen).
Exits: hall_1
Holding: nothing
Abilities: none
Known objects:
(none discovered yet; try EXPLORE)"""


class TestRendering:
    def test_golden_initial_partial(self, scene):
        knowledge = KnowledgeState()
        text = render_observation(scene, knowledge, "agent_1").text
        assert text == GOLDEN_INITIAL

    def test_version_tag_present(self, scene):
        knowledge = KnowledgeState()
        assert OBS_VERSION in render_observation(scene, knowledge, "agent_1").text

    def test_byte_stable_rendering(self, scene):
        knowledge = KnowledgeState()
        refresh_surroundings(scene, knowledge, "agent_1")
        explore(scene, knowledge, "agent_1")
        first = render_observation(scene, knowledge, "agent_1").text
        second = render_observation(scene, knowledge, "agent_1").text
        assert first == second

    def test_world_graph_shows_everything(self, scene):
        knowledge = KnowledgeState()
        text = render_observation(scene, knowledge, "agent_1", "WorldGraph").text
        for entity in ("table_1", "cup_1", "cup_2", "mop_1", "box_1", "hall_1"):
            assert entity in text


class TestExplore:
    def test_discovers_room_contents(self, scene):
        knowledge = KnowledgeState()
        refresh_surroundings(scene, knowledge, "agent_1")
        message = explore(scene, knowledge, "agent_1")
        assert "table_1" in message
        assert "cup_1" in knowledge.discovered_objects

    def test_re_explore_reports_nothing_new(self, scene):
        knowledge = KnowledgeState()
        refresh_surroundings(scene, knowledge, "agent_1")
        explore(scene, knowledge, "agent_1")
        assert "nothing new" in explore(scene, knowledge, "agent_1")

    def test_closed_container_contents_hidden(self, scene, engine):
        knowledge = KnowledgeState()
        run(engine, scene, "GOTO hall_1")
        refresh_surroundings(scene, knowledge, "agent_1")
        explore(scene, knowledge, "agent_1")
        assert "box_1" in knowledge.discovered_objects
        assert "coin_1" not in knowledge.discovered_objects

    def test_open_container_reveals_contents(self, scene, engine):
        knowledge = KnowledgeState()
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO box_1")
        run(engine, scene, "OPEN box_1")
        refresh_surroundings(scene, knowledge, "agent_1")
        explore(scene, knowledge, "agent_1")
        assert "coin_1" in knowledge.discovered_objects


class TestKnowledge:
    def test_monotone_growth(self, scene, engine):
        knowledge = KnowledgeState()
        sizes = []
        for raw in ("EXPLORE", "GOTO hall_1", "EXPLORE", "GOTO kitchen_1"):
            run(engine, scene, raw)
            refresh_surroundings(scene, knowledge, "agent_1")
            explore(scene, knowledge, "agent_1")
            sizes.append(len(knowledge.entity_ids()))
        assert sizes == sorted(sizes)

    def test_no_leakage_in_partial_mode(self, scene):
        """Partial observations never mention ids the agent has not learned."""
        knowledge = KnowledgeState()
        refresh_surroundings(scene, knowledge, "agent_1")
        text = render_observation(scene, knowledge, "agent_1").text
        mentioned = set(re.findall(r"\b[a-z][a-z0-9_]*_[0-9]+\b", text))
        allowed = knowledge.entity_ids() | {"agent_1"}
        assert mentioned <= allowed
        # in particular: hall contents and the boxed coin stay unknown
        for hidden in ("mop_1", "box_1", "coin_1"):
            assert hidden not in text

    def test_snapshot_refreshes_state(self, scene, engine):
        knowledge = KnowledgeState()
        refresh_surroundings(scene, knowledge, "agent_1")
        explore(scene, knowledge, "agent_1")
        assert knowledge.discovered_objects["table_1"].states["is_dirty"] is True
        run(engine, scene, "GOTO hall_1")
        run(engine, scene, "GOTO mop_1")
        run(engine, scene, "GRAB mop_1")
        run(engine, scene, "GOTO kitchen_1")
        run(engine, scene, "GOTO table_1")
        run(engine, scene, "CLEAN table_1")
        explore(scene, knowledge, "agent_1")
        assert knowledge.discovered_objects["table_1"].states["is_dirty"] is False


class TestDiff:
    def test_diff_lists_additions_only(self, scene):
        before = KnowledgeState()
        after = KnowledgeState()
        refresh_surroundings(scene, after, "agent_1")
        explore(scene, after, "agent_1")
        summary = observe.diff_knowledge(before, after)
        assert "table_1" in summary
        assert observe.diff_knowledge(after, after) == ""
