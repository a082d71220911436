/** Action palette: concrete, grammatically valid commands.
 *
 * Entries are built by filling the service's action templates with entity
 * ids taken from the same agent's observation. Every entry parses under
 * the engine grammar by construction, so submitting one can fail only
 * with an engine-level error message — never a grammar 422.
 */

import type { ActionTemplate } from "./types.js";
import { knownRooms, type ParsedObservation } from "./observation.js";

export interface PaletteEntry {
  command: string;
  description: string;
}

function verbOf(template: string): string {
  return template.split(" ")[0]!;
}

export function buildPalette(
  observation: ParsedObservation,
  templates: ActionTemplate[],
): PaletteEntry[] {
  const objects = observation.knownObjects.map((o) => o.id).sort();
  const rooms = knownRooms(observation);
  const entries: PaletteEntry[] = [];
  const add = (command: string, description: string) =>
    entries.push({ command, description });

  for (const [template, description] of templates) {
    const verb = verbOf(template);
    switch (verb) {
      case "EXPLORE":
      case "DONE":
        add(verb, description);
        break;
      case "GOTO":
        for (const room of rooms) add(`GOTO ${room}`, description);
        for (const obj of objects) add(`GOTO ${obj}`, description);
        break;
      case "GRAB":
      case "OPEN":
      case "CLOSE":
      case "TURN_ON":
      case "TURN_OFF":
      case "CORP_GRAB":
        for (const obj of objects) add(`${verb} ${obj}`, description);
        break;
      case "PLACE":
        for (const held of observation.holding) {
          add(`PLACE ${held} in ${observation.room}`, description);
          for (const obj of objects) {
            if (obj === held) continue;
            add(`PLACE ${held} in ${obj}`, description);
            add(`PLACE ${held} on ${obj}`, description);
          }
        }
        break;
      case "CORP_GOTO":
        for (const room of rooms) add(`CORP_GOTO ${room}`, description);
        break;
      case "CORP_PLACE":
        for (const obj of objects) {
          for (const room of rooms) add(`CORP_PLACE ${obj} in ${room}`, description);
        }
        break;
      default:
        // tool-granted single-argument verbs (CLEAN, HEAT, ...)
        if (/^[A-Z_]+ <object>$/.test(template)) {
          for (const obj of objects) add(`${verb} ${obj}`, description);
        }
    }
  }
  return entries;
}
