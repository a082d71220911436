/** Recorded-shape service payloads used by the contract tests.
 *
 * Observation texts follow the engine's renderer byte-for-byte (same
 * format the service returns); payload field names mirror the HTTP API.
 */

import type { ActionTemplate, EpisodeState } from "../src/types.js";

export const INITIAL_OBSERVATION = [
  "== Observation (obs-v1, Partial) ==",
  "You are agent_1 in kitchen_1 (Kitchen).",
  "Exits: hall_1",
  "Holding: nothing",
  "Abilities: none",
  "Known objects:",
  "(none discovered yet; try EXPLORE)",
].join("\n");

export const RICH_OBSERVATION = [
  "== Observation (obs-v1, Partial) ==",
  "You are agent_1 in kitchen_1 (Kitchen).",
  "Exits: hall_1",
  "Holding: mop_1",
  "Abilities: clean",
  "Agents here: agent_2",
  "Known objects:",
  "- box_1 (Container, material: plastic, weight: 2kg, is_open=false) in kitchen_1",
  "- cup_1 (Other, color: red, weight: 0.3kg) on table_1",
  "- mop_1 (Tool, weight: 1.2kg) held by agent_1",
  "- table_1 (Furniture, material: wood, weight: 40kg, is_dirty=true) in kitchen_1",
  "Unexplored rooms: hall_1",
].join("\n");

export const BASIC_TEMPLATES: ActionTemplate[] = [
  ["GOTO <room|object>", "Move to a connected room, or approach an object in your current room."],
  ["EXPLORE", "Survey your current room to discover objects."],
  ["GRAB <object>", "Pick up a nearby object within your carrying capacity."],
  ["PLACE <object> <in|on> <target>", "Put a held object in/on a nearby target or your current room."],
  ["OPEN <container>", "Open a nearby closed container."],
  ["CLOSE <container>", "Close a nearby open container."],
  ["TURN_ON <appliance>", "Switch on a nearby device."],
  ["TURN_OFF <appliance>", "Switch off a nearby device."],
  ["DONE", "Declare that you have finished your part of the task."],
];

export const TOOL_TEMPLATES: ActionTemplate[] = [
  ...BASIC_TEMPLATES,
  ["CLEAN <object>", "Use your 'clean' ability on a nearby object."],
];

export const CORP_TEMPLATES: ActionTemplate[] = [
  ...BASIC_TEMPLATES,
  ["CORP_GRAB <object>", "Jointly grab a heavy object (both agents must issue this)."],
  ["CORP_GOTO <room>", "Carry a jointly held object to a connected room."],
  ["CORP_PLACE <object> <in|on> <target>", "Jointly place the carried object; ends the joint hold."],
];

export function initialState(overrides: Partial<EpisodeState> = {}): EpisodeState {
  return {
    episode_id: "ep_fixture0001",
    task_id: "task_1",
    instruction: "Place cup_1 in hall_1.",
    agents: ["agent_1"],
    step_index: 0,
    step_cap: 35,
    done: false,
    goal_leaf_report: [
      { predicate: "cup_1 is in hall_1", satisfied: false },
    ],
    scene_hash: "a".repeat(64),
    observation: { agent_1: INITIAL_OBSERVATION },
    available_actions: { agent_1: BASIC_TEMPLATES },
    feedback: { agent_1: "" },
    ...overrides,
  };
}
