"""Generate a task corpus and inspect it.

Builds 14 task bundles across the seven categories, writes them to disk in
the corpus layout, and prints the aggregate statistics plus one sample
instruction per category.
"""

from __future__ import annotations

import json
import tempfile

from roomsim.harness.corpus import load_corpus, write_corpus
from roomsim.studio import SemanticSeed, generate_corpus
from roomsim.studio.stats import corpus_stats


def main():
    seeds = [SemanticSeed(f"organize the workshop {i}", 100 + i)
             for i in range(1, 15)]
    bundles = generate_corpus(seeds)

    seen = set()
    print("sample instructions:")
    for bundle in bundles:
        if bundle.task.category not in seen:
            seen.add(bundle.task.category)
            print(f"  {bundle.task.category:24s} {bundle.task.instruction}")

    stats = corpus_stats(bundles)
    print("\ncorpus stats:")
    print(json.dumps({k: stats[k] for k in
                      ("tasks", "categories", "avg_expert_length",
                       "avg_objects", "avg_rooms")}, indent=2))

    with tempfile.TemporaryDirectory() as out:
        write_corpus(bundles, out)
        loaded = load_corpus(out)
        print(f"\nround trip: wrote and re-read {len(loaded)} bundles")


if __name__ == "__main__":
    main()
