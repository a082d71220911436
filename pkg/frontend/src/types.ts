/** Wire types for the episode service. The UI never invents state: every
 * field here mirrors a service response verbatim. */

export interface TaskSummary {
  task_id: string;
  scene_id: string;
  category: string;
  instruction: string;
  agents: string[];
  expert_length: number;
}

export interface GoalLeaf {
  predicate: string;
  satisfied: boolean;
}

/** [command template, human description] pairs from available_actions. */
export type ActionTemplate = [string, string];

export interface EpisodeState {
  episode_id: string;
  task_id: string;
  instruction: string;
  agents: string[];
  step_index: number;
  step_cap: number;
  done: boolean;
  goal_leaf_report: GoalLeaf[];
  scene_hash: string;
  observation: Record<string, string>;
  available_actions: Record<string, ActionTemplate[]>;
  feedback: Record<string, string>;
}

export interface ActionResponse extends EpisodeState {
  outcome: Record<string, { status: string; error: string | null }>;
  success?: boolean;
}

export interface EpisodeDetail extends EpisodeState {
  record: RecordEntry[];
}

/** One JSON-lines entry of an episode record (header, step, or footer). */
export type RecordEntry = Record<string, unknown> & { type: string };

export interface SceneDetail {
  scene_id: string;
  document: Record<string, unknown>;
  world_graph: string;
}
