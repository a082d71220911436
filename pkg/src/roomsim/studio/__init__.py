"""Scenario generation pipeline: scenes, feasibility, tasks, validation, stats."""

from .generate import (  # noqa: F401
    CATEGORIES,
    DEFAULT_MIX,
    MULTI_CATEGORIES,
    SINGLE_CATEGORIES,
    SceneKnobs,
    SemanticSeed,
    analyze_environment,
    generate_bundle,
    generate_corpus,
    generate_scene,
    generate_task,
)
from .tasks import TaskSpec  # noqa: F401
from .validate import validate_bundle  # noqa: F401
from .stats import corpus_stats  # noqa: F401
