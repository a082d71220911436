"""Descriptive statistics over a generated corpus."""

from __future__ import annotations

from collections import Counter


def corpus_stats(bundles) -> dict:
    """Aggregate counts and averages for a list of bundles.

    Works on anything exposing ``.scene`` (a SceneGraph) and ``.task``
    (a TaskSpec), so both in-memory bundles and rehydrated corpora fit.
    """
    categories = Counter()
    domains = Counter()
    materials = Counter()
    object_categories = Counter()
    rooms_total = objects_total = agents_total = 0
    expert_lengths: list[int] = []

    for bundle in bundles:
        scene, task = bundle.scene, bundle.task
        categories[task.category] += 1
        domains[bundle.seed.resolved_domain()] += 1
        rooms_total += len(scene.rooms)
        objects_total += len(scene.objects)
        agents_total += len(scene.agents)
        expert_lengths.append(task.expert_length)
        for obj in scene.objects.values():
            object_categories[obj.category] += 1
            material = obj.attributes.get("material")
            if material:
                materials[material] += 1

    n = len(bundles)
    lengths = sorted(expert_lengths)
    return {
        "tasks": n,
        "categories": dict(sorted(categories.items())),
        "category_fractions": {c: round(v / n, 4)
                               for c, v in sorted(categories.items())} if n else {},
        "domains": dict(sorted(domains.items())),
        "materials": dict(sorted(materials.items())),
        "object_categories": dict(sorted(object_categories.items())),
        "avg_rooms": round(rooms_total / n, 2) if n else 0.0,
        "avg_objects": round(objects_total / n, 2) if n else 0.0,
        "avg_agents": round(agents_total / n, 2) if n else 0.0,
        "avg_expert_length": round(sum(lengths) / n, 2) if n else 0.0,
        "min_expert_length": lengths[0] if lengths else 0,
        "max_expert_length": lengths[-1] if lengths else 0,
    }
