"""Benchmark two built-in baselines against each other.

Runs the planning oracle and a uniform-random policy over the same tasks
and prints the metric tables side by side: the oracle pins the ceiling
(SR 100, RSR 1.0) while the random agent shows the floor.
"""

from __future__ import annotations

from roomsim.harness.metrics import aggregate, render_table, result_row
from roomsim.runtime import OracleAdapter, RandomAdapter, run_episode
from roomsim.studio import CATEGORIES, SemanticSeed, generate_bundle


def main():
    bundles = [generate_bundle(SemanticSeed(f"stock the lab shelves {i}", i),
                               category)
               for i, category in enumerate(CATEGORIES, start=1)]

    for label, make_adapter in (
            ("oracle", lambda b: OracleAdapter(b.task)),
            ("random", lambda b: RandomAdapter(seed=42))):
        rows = []
        for bundle in bundles:
            result = run_episode(bundle.scene, bundle.task,
                                 make_adapter(bundle), step_cap=35)
            rows.append(result_row(bundle.task.category, result))
        print(f"\n=== {label} ===")
        print(render_table(aggregate(rows)))


if __name__ == "__main__":
    main()
