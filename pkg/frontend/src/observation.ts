/** Parser for the engine's observation text.
 *
 * The text is the service's authoritative view of what the agent knows;
 * the UI structures it (room map, inspector, palette) without adding any
 * information of its own.
 */

export interface KnownObject {
  id: string;
  category: string;
  /** attribute/state details as rendered, e.g. {"weight": "0.3kg", "is_open": "false"} */
  details: Record<string, string>;
  /** e.g. "in kitchen_1", "on table_1", "held by agent_1" */
  parent: string;
}

export interface ParsedObservation {
  agent: string;
  room: string;
  roomName: string;
  exits: string[];
  holding: string[];
  abilities: string[];
  agentsHere: string[];
  knownObjects: KnownObject[];
  unexploredRooms: string[];
  /** true for WorldGraph mode renderings */
  worldGraph: boolean;
}

const HEADER = /^== Observation \(([^,]+), (Partial|WorldGraph)\) ==$/;
const WHERE = /^You are (\S+) in (\S+) \((.*)\)\.$/;
const OBJECT = /^- (\S+) \((.*)\) (in|on|held by|jointly held by) (.*)$/;

function splitList(rest: string): string[] {
  if (rest === "none" || rest === "nothing" || rest === "") return [];
  return rest.split(", ").map((item) => item.trim());
}

export function parseObservation(text: string): ParsedObservation {
  const lines = text.split("\n");
  const parsed: ParsedObservation = {
    agent: "",
    room: "",
    roomName: "",
    exits: [],
    holding: [],
    abilities: [],
    agentsHere: [],
    knownObjects: [],
    unexploredRooms: [],
    worldGraph: false,
  };
  for (const line of lines) {
    const header = HEADER.exec(line);
    if (header) {
      parsed.worldGraph = header[2] === "WorldGraph";
      continue;
    }
    const where = WHERE.exec(line);
    if (where) {
      parsed.agent = where[1]!;
      parsed.room = where[2]!;
      parsed.roomName = where[3]!;
      continue;
    }
    if (line.startsWith("Exits: ")) {
      parsed.exits = splitList(line.slice("Exits: ".length));
    } else if (line.startsWith("Holding: ")) {
      parsed.holding = splitList(line.slice("Holding: ".length));
    } else if (line.startsWith("Abilities: ")) {
      parsed.abilities = splitList(line.slice("Abilities: ".length));
    } else if (line.startsWith("Agents here: ")) {
      parsed.agentsHere = splitList(line.slice("Agents here: ".length));
    } else if (line.startsWith("Unexplored rooms: ")) {
      parsed.unexploredRooms = splitList(line.slice("Unexplored rooms: ".length));
    } else if (line.startsWith("- ")) {
      const match = OBJECT.exec(line);
      if (!match) continue;
      const [, id, detailText, , parentTarget] = match;
      const parentPhrase = line.slice(line.lastIndexOf(") ") + 2);
      const details: Record<string, string> = {};
      const parts = detailText!.split(", ");
      const category = parts.shift() ?? "";
      for (const part of parts) {
        const colon = part.indexOf(": ");
        const equals = part.indexOf("=");
        if (colon >= 0) {
          details[part.slice(0, colon)] = part.slice(colon + 2);
        } else if (equals >= 0) {
          details[part.slice(0, equals)] = part.slice(equals + 1);
        }
      }
      parsed.knownObjects.push({
        id: id!,
        category,
        details,
        parent: parentPhrase,
      });
      void parentTarget;
    }
  }
  return parsed;
}

/** Room ids the agent can currently reference: where it is plus exits. */
export function knownRooms(parsed: ParsedObservation): string[] {
  const rooms = new Set<string>([parsed.room, ...parsed.exits]);
  rooms.delete("");
  return [...rooms].sort();
}
