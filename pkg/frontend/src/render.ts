/** Pure view -> HTML string rendering, kept DOM-free so it is testable
 * in Node. `main.ts` assigns the result to a container's innerHTML. */

import type { SessionView } from "./session.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function renderChecklist(view: SessionView): string {
  const items = view.goalChecklist
    .map(
      (leaf) =>
        `<li class="${leaf.satisfied ? "satisfied" : "pending"}">` +
        `${leaf.satisfied ? "[x]" : "[ ]"} ${escapeHtml(leaf.predicate)}</li>`,
    )
    .join("");
  return `<ul class="goal-checklist">${items}</ul>`;
}

function renderMap(view: SessionView): string {
  const markers: Record<string, string[]> = {};
  for (const [agent, room] of Object.entries(view.roomMap.agents)) {
    (markers[room] ??= []).push(agent);
  }
  const nodes = view.roomMap.rooms
    .map((room) => {
      const label = markers[room]?.length
        ? `${room} [${markers[room]!.join(", ")}]`
        : room;
      return `<span class="room-node" data-room="${escapeHtml(room)}">${escapeHtml(label)}</span>`;
    })
    .join(" ");
  const edges = view.roomMap.edges
    .map(([a, b]) => `${escapeHtml(a)} &mdash; ${escapeHtml(b)}`)
    .join(", ");
  return `<div class="room-map">${nodes}<div class="room-edges">${edges}</div></div>`;
}

function renderInspector(view: SessionView): string {
  const parsed = view.observations[view.activeAgent];
  if (!parsed) return "";
  const rows = parsed.knownObjects
    .map((obj) => {
      const details = Object.entries(obj.details)
        .map(([key, value]) => `${escapeHtml(key)}: ${escapeHtml(value)}`)
        .join(", ");
      return (
        `<tr><td>${escapeHtml(obj.id)}</td><td>${escapeHtml(obj.category)}</td>` +
        `<td>${details}</td><td>${escapeHtml(obj.parent)}</td></tr>`
      );
    })
    .join("");
  return `<table class="inspector">${rows}</table>`;
}

function renderPalette(view: SessionView): string {
  const entries = view.palettes[view.activeAgent] ?? [];
  const disabled = view.done ? " disabled" : "";
  const buttons = entries
    .map(
      (entry) =>
        `<button class="palette-action" data-command="${escapeHtml(entry.command)}"` +
        `${disabled} title="${escapeHtml(entry.description)}">${escapeHtml(entry.command)}</button>`,
    )
    .join("");
  return `<div class="palette">${buttons}</div>`;
}

function renderLog(view: SessionView): string {
  const rows = view.stepLog
    .map((entry) => {
      const commands = Object.entries(entry.commands)
        .map(([agent, raw]) => `${agent}: ${raw}`)
        .join(" | ");
      const feedback = Object.values(entry.feedback).join(" | ");
      return (
        `<li>step ${entry.step}: ${escapeHtml(commands)} &rarr; ` +
        `${escapeHtml(feedback)}</li>`
      );
    })
    .join("");
  return `<ol class="step-log">${rows}</ol>`;
}

export function renderSession(view: SessionView): string {
  if (!view.episodeId) {
    return view.error
      ? `<div class="error-banner">${escapeHtml(view.error)}</div>`
      : `<div class="empty">No session. Pick a task to begin.</div>`;
  }
  const switcher =
    view.agents.length > 1
      ? `<div class="agent-switcher">${view.agents
          .map(
            (agent) =>
              `<button data-agent="${escapeHtml(agent)}"` +
              `${agent === view.activeAgent ? ' class="active"' : ""}>${escapeHtml(agent)}</button>`,
          )
          .join("")}</div>`
      : "";
  const verdict = view.done
    ? `<div class="verdict">${view.success ? "Success" : "Failed"} in ${view.stepIndex} steps</div>`
    : "";
  const error = view.error
    ? `<div class="error-banner">${escapeHtml(view.error)}</div>`
    : "";
  return [
    `<h1>${escapeHtml(view.instruction)}</h1>`,
    `<div class="status">step ${view.stepIndex}/${view.stepCap}</div>`,
    error,
    verdict,
    switcher,
    renderChecklist(view),
    renderMap(view),
    `<pre class="observation">${escapeHtml(
      view.observations[view.activeAgent]
        ? JSON.stringify(view.observations[view.activeAgent], null, 1)
        : "",
    )}</pre>`,
    renderInspector(view),
    renderPalette(view),
    `<form class="raw-command"><input name="raw" placeholder="type a command"/></form>`,
    renderLog(view),
  ].join("\n");
}
