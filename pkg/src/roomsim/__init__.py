"""roomsim: a text-based embodied-environment engine and benchmark harness.

Scenes are attribute-rich graphs of rooms, objects, and agents; actions
execute under capability and collaboration constraints; a search-based
oracle certifies every generated task; and the harness evaluates scripted
or LLM-backed agents over recorded, replayable episodes.
"""

from .actions import ActionCommand, ActionEngine, ActionOutcome  # noqa: F401
from .errors import RoomsimError  # noqa: F401
from .goals import evaluate, extract_goal  # noqa: F401
from .observe import KnowledgeState, render_observation  # noqa: F401
from .planner import Plan, Unsolvable, expert_plan, solve  # noqa: F401
from .runtime import Episode, run_episode  # noqa: F401
from .world import SceneGraph, StateDelta, load_scene, scene_to_document  # noqa: F401

__version__ = "0.1.0"
