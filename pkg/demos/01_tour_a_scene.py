"""Walk an agent through a procedurally generated scene.

Generates a small household scene, then drives one agent by hand:
explore, cross a room, grab a tool, and watch the observation text and
ability set change along the way.
"""

from __future__ import annotations

from roomsim import ActionEngine, KnowledgeState, render_observation
from roomsim.observe import explore, refresh_surroundings
from roomsim.studio import SceneKnobs, SemanticSeed, generate_scene


def act(engine, scene, knowledge, agent, raw):
    outcome = engine.execute(scene, engine.parse_action(raw, agent))
    if outcome.ok and raw == "EXPLORE":
        print(f"> {raw}\n  {explore(scene, knowledge, agent)}")
    else:
        print(f"> {raw}\n  [{outcome.status}] {outcome.message}")
    refresh_surroundings(scene, knowledge, agent)


def main():
    seed = SemanticSeed("tidy the house before guests arrive 1", rng_seed=7)
    scene = generate_scene(seed, SceneKnobs(n_rooms=3, n_objects=10))
    agent = sorted(scene.agents)[0]
    engine = ActionEngine()
    knowledge = KnowledgeState()
    refresh_surroundings(scene, knowledge, agent)

    print(f"scene {scene.scene_id}: {len(scene.rooms)} rooms, "
          f"{len(scene.objects)} objects\n")
    print(render_observation(scene, knowledge, agent).text, "\n")

    act(engine, scene, knowledge, agent, "EXPLORE")

    # pick up the first ability-providing tool we can find
    tool = next((oid for oid, obj in sorted(scene.objects.items())
                 if obj.provides_abilities), None)
    if tool is not None:
        room = scene.resolve_room(tool)
        act(engine, scene, knowledge, agent, f"GOTO {room}")
        act(engine, scene, knowledge, agent, f"GOTO {tool}")
        act(engine, scene, knowledge, agent, f"GRAB {tool}")

    print("\nAfter the tour:\n")
    print(render_observation(scene, knowledge, agent).text)


if __name__ == "__main__":
    main()
