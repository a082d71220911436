/** Structured room map accumulated from observations.
 *
 * Nodes and edges are added only as rooms appear in service-rendered
 * observation text (current room + exits), so the map mirrors what the
 * human has actually been shown.
 */

import type { ParsedObservation } from "./observation.js";

export interface RoomGraph {
  rooms: string[];
  /** undirected, deduplicated, lexicographically ordered pairs */
  edges: [string, string][];
  /** agent id -> room id */
  agents: Record<string, string>;
}

export class RoomMap {
  private rooms = new Set<string>();
  private edges = new Set<string>();
  private agents: Record<string, string> = {};

  update(observation: ParsedObservation): void {
    if (!observation.room) return;
    this.rooms.add(observation.room);
    this.agents[observation.agent] = observation.room;
    for (const exit of observation.exits) {
      this.rooms.add(exit);
      const pair = [observation.room, exit].sort();
      this.edges.add(`${pair[0]}|${pair[1]}`);
    }
    for (const other of observation.agentsHere) {
      this.agents[other] = observation.room;
    }
  }

  toGraph(): RoomGraph {
    return {
      rooms: [...this.rooms].sort(),
      edges: [...this.edges]
        .sort()
        .map((key) => key.split("|") as [string, string]),
      agents: { ...this.agents },
    };
  }
}
