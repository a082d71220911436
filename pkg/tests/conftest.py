"""Shared fixtures: hand-built micro scenes used across the suite."""

from __future__ import annotations

import pytest

from roomsim.actions import ActionEngine
from roomsim.world import load_scene


def basic_document() -> dict:
    """Two rooms, a surface, two cups of different weight, a mop, a box."""
    return {
        "scene_id": "scene_1",
        "rooms": [
            {"id": "kitchen_1", "name": "Kitchen", "connects_to": ["hall_1"]},
            {"id": "hall_1", "name": "Hall", "connects_to": []},
        ],
        "objects": [
            {"id": "table_1", "category": "Furniture", "location": "in:kitchen_1",
             "attributes": {"weight": 40.0, "material": "wood"}, "states": {"is_dirty": True}},
            {"id": "cup_1", "category": "Other", "location": "on:table_1",
             "attributes": {"weight": 0.3, "color": "red"}, "states": {}},
            {"id": "cup_2", "category": "Other", "location": "on:table_1",
             "attributes": {"weight": 0.5, "color": "blue"}, "states": {}},
            {"id": "mop_1", "category": "Tool", "location": "in:hall_1",
             "attributes": {"weight": 1.2}, "states": {},
             "provides_abilities": ["clean"]},
            {"id": "box_1", "category": "Container", "location": "in:hall_1",
             "attributes": {"weight": 2.0}, "states": {"is_open": False}},
            {"id": "coin_1", "category": "Other", "location": "in:box_1",
             "attributes": {"weight": 0.01}, "states": {}},
        ],
        "agents": [
            {"id": "agent_1", "location": "kitchen_1", "grasp_limit": 1,
             "max_weight": 25.0, "base_abilities": []},
        ],
    }


def duo_document() -> dict:
    """Two agents and a crate only liftable together."""
    doc = basic_document()
    doc["scene_id"] = "scene_2"
    doc["objects"].append(
        {"id": "crate_1", "category": "Furniture", "location": "in:kitchen_1",
         "attributes": {"weight": 40.0}, "states": {}})
    doc["agents"] = [
        {"id": "agent_1", "location": "kitchen_1", "grasp_limit": 2,
         "max_weight": 25.0, "base_abilities": []},
        {"id": "agent_2", "location": "kitchen_1", "grasp_limit": 2,
         "max_weight": 25.0, "base_abilities": []},
    ]
    return doc


@pytest.fixture
def scene():
    return load_scene(basic_document())


@pytest.fixture
def duo_scene():
    return load_scene(duo_document())


@pytest.fixture
def engine():
    return ActionEngine()
