import { describe, expect, it } from "vitest";

import { knownRooms, parseObservation } from "../src/observation.js";
import { INITIAL_OBSERVATION, RICH_OBSERVATION } from "./fixtures.js";

describe("parseObservation", () => {
  it("parses the empty initial view", () => {
    const parsed = parseObservation(INITIAL_OBSERVATION);
    expect(parsed.agent).toBe("agent_1");
    expect(parsed.room).toBe("kitchen_1");
    expect(parsed.roomName).toBe("Kitchen");
    expect(parsed.exits).toEqual(["hall_1"]);
    expect(parsed.holding).toEqual([]);
    expect(parsed.abilities).toEqual([]);
    expect(parsed.knownObjects).toEqual([]);
    expect(parsed.worldGraph).toBe(false);
  });

  it("parses a populated view", () => {
    const parsed = parseObservation(RICH_OBSERVATION);
    expect(parsed.holding).toEqual(["mop_1"]);
    expect(parsed.abilities).toEqual(["clean"]);
    expect(parsed.agentsHere).toEqual(["agent_2"]);
    expect(parsed.unexploredRooms).toEqual(["hall_1"]);
    expect(parsed.knownObjects.map((o) => o.id)).toEqual([
      "box_1",
      "cup_1",
      "mop_1",
      "table_1",
    ]);
  });

  it("keeps attribute and state details", () => {
    const parsed = parseObservation(RICH_OBSERVATION);
    const table = parsed.knownObjects.find((o) => o.id === "table_1")!;
    expect(table.category).toBe("Furniture");
    expect(table.details).toEqual({
      material: "wood",
      weight: "40kg",
      is_dirty: "true",
    });
    expect(table.parent).toBe("in kitchen_1");
    const mop = parsed.knownObjects.find((o) => o.id === "mop_1")!;
    expect(mop.parent).toBe("held by agent_1");
  });

  it("lists referencable rooms as current room plus exits", () => {
    expect(knownRooms(parseObservation(RICH_OBSERVATION))).toEqual([
      "hall_1",
      "kitchen_1",
    ]);
  });
});
