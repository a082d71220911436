"""Episode records as verifiable artifacts.

Runs one episode, writes its JSONL record, re-reads it, replays every
command against a fresh copy of the scene, and checks that each step and
the final state hash out identically. Then tampers with one hash to show
that replay catches it.
"""

from __future__ import annotations

import tempfile

from roomsim.errors import ReplayDivergence
from roomsim.runtime import (OracleAdapter, read_record, replay_record,
                             run_episode, write_record)
from roomsim.studio import SemanticSeed, generate_bundle


def main():
    bundle = generate_bundle(SemanticSeed("archive the office files 1", 11),
                             "compound_reasoning")
    print(f"task: {bundle.task.instruction}")

    result = run_episode(bundle.scene, bundle.task, OracleAdapter(bundle.task))
    print(f"success={result.success} steps={result.steps_used} "
          f"rsr={result.rsr:.3f}")

    with tempfile.NamedTemporaryFile(suffix=".jsonl", mode="w") as handle:
        write_record(handle.name, result)
        record = read_record(handle.name)
    print(f"record: {len(record)} entries "
          f"(header + {result.steps_used} steps + footer)")

    final = replay_record(bundle.scene, record)
    assert final.canonical_hash() == result.final_hash
    print("replay: final hash matches")

    tampered = [dict(entry) for entry in record]
    next(e for e in tampered if e["type"] == "step")["scene_hash"] = "0" * 64
    try:
        replay_record(bundle.scene, tampered)
    except ReplayDivergence as exc:
        print(f"tampered copy rejected: {exc}")


if __name__ == "__main__":
    main()
