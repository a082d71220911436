/** Hot-seat session over one service episode.
 *
 * The store is server-authoritative: every field of the view comes from
 * a service response. Multi-agent tasks are played by one human via an
 * agent switcher; a joint step is submitted once commands are staged for
 * all agents.
 */

import { ApiClient, ApiError } from "./api.js";
import { parseObservation, type ParsedObservation } from "./observation.js";
import { buildPalette, type PaletteEntry } from "./palette.js";
import { RoomMap, type RoomGraph } from "./roomMap.js";
import type { ActionResponse, EpisodeState, GoalLeaf } from "./types.js";

export interface StepLogEntry {
  step: number;
  commands: Record<string, string>;
  feedback: Record<string, string>;
  statuses: Record<string, string>;
}

export interface SessionView {
  episodeId: string;
  instruction: string;
  agents: string[];
  activeAgent: string;
  stepIndex: number;
  stepCap: number;
  done: boolean;
  success: boolean | null;
  sceneHash: string;
  goalChecklist: GoalLeaf[];
  observations: Record<string, ParsedObservation>;
  palettes: Record<string, PaletteEntry[]>;
  stagedCommands: Record<string, string>;
  stepLog: StepLogEntry[];
  roomMap: RoomGraph;
  /** last inline error (connection trouble, stale task id, 422 feedback) */
  error: string | null;
}

export class SessionStore {
  private state: EpisodeState | null = null;
  private success: boolean | null = null;
  private activeAgent = "";
  private staged: Record<string, string> = {};
  private log: StepLogEntry[] = [];
  private map = new RoomMap();
  private lastError: string | null = null;

  constructor(private readonly api: ApiClient) {}

  async start(
    taskId: string,
    options: { worldGraph?: boolean; stepCap?: number } = {},
  ): Promise<SessionView> {
    try {
      this.adopt(await this.api.createEpisode(taskId, options));
    } catch (error) {
      this.lastError = describeError(error);
    }
    return this.view();
  }

  /** Re-hydrate an existing episode, e.g. after a page reload. */
  async reconnect(episodeId: string): Promise<SessionView> {
    try {
      this.adopt(await this.api.getEpisode(episodeId));
    } catch (error) {
      this.lastError = describeError(error);
    }
    return this.view();
  }

  switchAgent(agent: string): void {
    if (this.state && this.state.agents.includes(agent)) {
      this.activeAgent = agent;
    }
  }

  /** Stage the active agent's command; submits once every agent has one. */
  async submit(raw: string): Promise<SessionView> {
    if (!this.state) throw new Error("no active session");
    this.staged[this.activeAgent] = raw;
    const pending = this.state.agents.filter((a) => !(a in this.staged));
    if (pending.length > 0) {
      this.switchAgent(pending[0]!);
      return this.view();
    }
    return this.submitJoint({ ...this.staged });
  }

  async submitJoint(actions: Record<string, string>): Promise<SessionView> {
    if (!this.state) throw new Error("no active session");
    this.staged = {};
    try {
      const response = await this.api.submitAction(this.state.episode_id, {
        actions,
      });
      this.applyStep(actions, response);
    } catch (error) {
      this.lastError = describeError(error);
    }
    return this.view();
  }

  /** Terminated sessions export the service-side record as JSON lines. */
  async exportSession(): Promise<string> {
    if (!this.state) throw new Error("no active session");
    if (!this.state.done) throw new Error("session still running");
    const detail = await this.api.getEpisode(this.state.episode_id);
    return (
      detail.record.map((entry) => JSON.stringify(entry)).join("\n") + "\n"
    );
  }

  private adopt(state: EpisodeState): void {
    this.state = state;
    this.lastError = null;
    if (!this.activeAgent || !state.agents.includes(this.activeAgent)) {
      this.activeAgent = state.agents[0] ?? "";
    }
    for (const agent of state.agents) {
      this.map.update(parseObservation(state.observation[agent] ?? ""));
    }
  }

  private applyStep(
    commands: Record<string, string>,
    response: ActionResponse,
  ): void {
    const statuses: Record<string, string> = {};
    for (const [agent, outcome] of Object.entries(response.outcome)) {
      statuses[agent] = outcome.status;
    }
    this.log.push({
      step: response.step_index,
      commands,
      feedback: { ...response.feedback },
      statuses,
    });
    if (response.success !== undefined) this.success = response.success;
    this.adopt(response);
  }

  view(): SessionView {
    const state = this.state;
    if (!state) {
      return {
        episodeId: "",
        instruction: "",
        agents: [],
        activeAgent: "",
        stepIndex: 0,
        stepCap: 0,
        done: false,
        success: null,
        sceneHash: "",
        goalChecklist: [],
        observations: {},
        palettes: {},
        stagedCommands: {},
        stepLog: [],
        roomMap: { rooms: [], edges: [], agents: {} },
        error: this.lastError,
      };
    }
    const observations: Record<string, ParsedObservation> = {};
    const palettes: Record<string, PaletteEntry[]> = {};
    for (const agent of state.agents) {
      const parsed = parseObservation(state.observation[agent] ?? "");
      observations[agent] = parsed;
      palettes[agent] = buildPalette(
        parsed,
        state.available_actions[agent] ?? [],
      );
    }
    return {
      episodeId: state.episode_id,
      instruction: state.instruction,
      agents: [...state.agents],
      activeAgent: this.activeAgent,
      stepIndex: state.step_index,
      stepCap: state.step_cap,
      done: state.done,
      success: this.success,
      sceneHash: state.scene_hash,
      goalChecklist: [...state.goal_leaf_report],
      observations,
      palettes,
      stagedCommands: { ...this.staged },
      stepLog: [...this.log],
      roomMap: this.map.toGraph(),
      error: this.lastError,
    };
  }
}

function describeError(error: unknown): string {
  if (error instanceof ApiError) {
    const detail =
      typeof error.detail === "object" && error.detail !== null
        ? JSON.stringify(error.detail)
        : String(error.detail);
    return `service error ${error.status}: ${detail}`;
  }
  return error instanceof Error ? error.message : String(error);
}
