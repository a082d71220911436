import type {
  ActionResponse,
  EpisodeDetail,
  EpisodeState,
  SceneDetail,
  TaskSummary,
} from "./types.js";

/** HTTP error carrying the service's status code and detail payload. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: unknown,
  ) {
    super(`service responded ${status}: ${JSON.stringify(detail)}`);
    this.name = "ApiError";
  }
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

/** Thin typed client over the episode service HTTP API. */
export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = fetch,
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
  ): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (response.status >= 400) {
      throw new ApiError(response.status, payload);
    }
    return payload as T;
  }

  listTasks(): Promise<TaskSummary[]> {
    return this.request("GET", "/tasks");
  }

  getScene(sceneId: string): Promise<SceneDetail> {
    return this.request("GET", `/scenes/${sceneId}`);
  }

  createEpisode(
    taskId: string,
    options: { worldGraph?: boolean; stepCap?: number } = {},
  ): Promise<EpisodeState> {
    const body: Record<string, unknown> = { task_id: taskId };
    if (options.worldGraph !== undefined) body.world_graph = options.worldGraph;
    if (options.stepCap !== undefined) body.step_cap = options.stepCap;
    return this.request("POST", "/episodes", body);
  }

  getEpisode(episodeId: string): Promise<EpisodeDetail> {
    return this.request("GET", `/episodes/${episodeId}`);
  }

  /** Submit one agent's command, or a full joint step via `actions`. */
  submitAction(
    episodeId: string,
    action: { agent: string; raw: string } | { actions: Record<string, string> },
  ): Promise<ActionResponse> {
    return this.request("POST", `/episodes/${episodeId}/action`, action);
  }
}
