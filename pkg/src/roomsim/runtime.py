"""Agent adapters and the episode loop.

An adapter controls every agent in the episode centrally: each step it sees
one observation per agent plus the running history and answers with one raw
command per agent. Episodes are recorded as JSONL with per-step scene hashes
so any run can be replayed and verified bit-for-bit.
"""

from __future__ import annotations

import json
import random
import re
import time
from dataclasses import dataclass, field

from . import observe
from .actions import ActionCommand, ActionEngine
from .errors import AdapterError, ReplayDivergence, RoomsimError
from .goals import GoalPredicate, evaluate
from .world import SceneGraph

DEFAULT_STEP_CAP = 35
HISTORY_WINDOW = 10


@dataclass
class TurnContext:
    step: int
    instruction: str
    agents: list[str]
    observations: dict[str, str]
    available: dict[str, list[tuple[str, str]]]
    feedback: dict[str, str]
    candidates: dict[str, list[str]]
    history: list[dict]


@dataclass
class Decision:
    commands: dict[str, str]  # agent id -> raw command text
    thought: str = ""
    tokens_in: int = 0
    tokens_out: int = 0


class ScriptedAdapter:
    """Plays back a fixed list of per-step command maps, then holds DONE."""

    def __init__(self, steps: list[dict[str, str]]):
        self.steps = list(steps)

    def decide(self, ctx: TurnContext) -> Decision:
        if ctx.step < len(self.steps):
            step = self.steps[ctx.step]
            return Decision({a: step.get(a, "EXPLORE") for a in ctx.agents})
        return Decision({a: "DONE" for a in ctx.agents})


class OracleAdapter(ScriptedAdapter):
    """Scripted playback of a task's certified expert trajectory."""

    def __init__(self, task):
        super().__init__(task.expert_steps())


class RandomAdapter:
    """Uniform choice over grammatically valid commands; the floor baseline."""

    def __init__(self, seed: int = 0, done_rate: float = 0.02):
        self.rng = random.Random(seed)
        self.done_rate = done_rate

    def decide(self, ctx: TurnContext) -> Decision:
        commands = {}
        for agent in ctx.agents:
            pool = ctx.candidates.get(agent) or ["EXPLORE"]
            if self.rng.random() < self.done_rate:
                commands[agent] = "DONE"
            else:
                commands[agent] = self.rng.choice(pool)
        return Decision(commands)


def _estimate_tokens(text: str) -> int:
    return max(1, len(text) // 4)


@dataclass
class PromptBundle:
    system: str
    user: str

    @property
    def token_estimate(self) -> int:
        return _estimate_tokens(self.system + self.user)


def history_summary(history: list[dict], window: int = HISTORY_WINDOW) -> str:
    if not history:
        return "(no actions taken yet)"
    lines = []
    if len(history) > window:
        lines.append(f"({len(history) - window} earlier steps elided)")
    for entry in history[-window:]:
        for agent in sorted(entry["commands"]):
            status = entry["results"][agent]
            lines.append(f"step {entry['step']}: {agent}: {entry['commands'][agent]}"
                         f" -> {status}")
    return "\n".join(lines)


def build_prompt(ctx: TurnContext) -> PromptBundle:
    multi = len(ctx.agents) > 1
    system = (
        "You control {n} embodied agent(s) in a simulated indoor environment. "
        "Issue exactly one action per agent per step using only the listed "
        "action forms. Heavy objects beyond one agent's capacity require the "
        "CORP_ collaborative actions issued identically by both agents in the "
        "same step. Declare DONE once your part of the task is complete."
    ).format(n=len(ctx.agents))
    parts = [f"Task: {ctx.instruction}", ""]
    for agent in ctx.agents:
        parts.append(f"--- {agent} ---")
        parts.append(ctx.observations[agent])
        if ctx.feedback.get(agent):
            parts.append(f"Last result: {ctx.feedback[agent]}")
        parts.append("Available actions:")
        for form, text in ctx.available[agent]:
            parts.append(f"  {form} - {text}")
        parts.append("")
    parts.append("Recent history:")
    parts.append(history_summary(ctx.history))
    parts.append("")
    if multi:
        fmt = "Thought: <your reasoning>\n" + "\n".join(
            f"{a.title()}_Action: <one action>" for a in ctx.agents)
    else:
        fmt = "Thought: <your reasoning>\nAgent_1_Action: <one action>"
    parts.append("Respond in exactly this format:\n" + fmt)
    return PromptBundle(system, "\n".join(parts))


_ACTION_RE = re.compile(r"^\s*(?:Agent[_ ]?(\d+)[_ ]?Action|Action)\s*:\s*(.+?)\s*$",
                        re.IGNORECASE | re.MULTILINE)
_THOUGHT_RE = re.compile(r"^\s*Thought\s*:\s*(.+?)\s*$", re.IGNORECASE | re.MULTILINE)


def parse_response(text: str, agents: list[str]) -> tuple[dict[str, str], str]:
    """Extract the final Thought/Action block from a model response.

    Tolerates code fences and chatter; the LAST action stanza wins. Every
    agent must receive a command or the response is rejected.
    """
    cleaned = text.replace("```", "\n")
    matches = list(_ACTION_RE.finditer(cleaned))
    if not matches:
        raise AdapterError("no Action lines found in response")
    commands: dict[str, str] = {}
    for match in matches:  # later stanzas overwrite earlier ones
        index = match.group(1)
        if index is None:
            agent = agents[0]
        else:
            agent = f"agent_{index}"
            if agent not in agents:
                raise AdapterError(f"response addresses unknown agent {agent}")
        commands[agent] = match.group(2).strip().rstrip(".")
    missing = [a for a in agents if a not in commands]
    if missing:
        raise AdapterError(f"response is missing actions for: {', '.join(missing)}")
    thoughts = _THOUGHT_RE.findall(cleaned)
    return {a: commands[a] for a in agents}, thoughts[-1] if thoughts else ""


def remote_chat(endpoint: str, model: str, prompt: PromptBundle,
                api_key: str = "", temperature: float = 0.3,
                max_tokens: int = 4096, retries: int = 3,
                timeout: float = 120.0) -> tuple[str, int, int]:
    """POST an OpenAI-style chat completion; returns (text, tokens_in, tokens_out)."""
    import requests

    headers = {"Content-Type": "application/json"}
    if api_key:
        headers["Authorization"] = f"Bearer {api_key}"
    payload = {
        "model": model,
        "temperature": temperature,
        "max_tokens": max_tokens,
        "messages": [
            {"role": "system", "content": prompt.system},
            {"role": "user", "content": prompt.user},
        ],
    }
    last_error = None
    for attempt in range(retries):
        try:
            resp = requests.post(endpoint, json=payload, headers=headers,
                                 timeout=timeout)
            resp.raise_for_status()
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
            usage = data.get("usage", {})
            return (text,
                    int(usage.get("prompt_tokens", prompt.token_estimate)),
                    int(usage.get("completion_tokens", _estimate_tokens(text))))
        except Exception as exc:  # noqa: BLE001 - report after final retry
            last_error = exc
            time.sleep(min(2.0 ** attempt, 8.0))
    raise AdapterError(f"remote endpoint failed after {retries} attempts: {last_error}")


class RemoteLLMAdapter:
    """Drives agents through a chat-completions HTTP endpoint."""

    def __init__(self, endpoint: str, model: str, api_key: str = "",
                 temperature: float = 0.3, max_tokens: int = 4096):
        self.endpoint = endpoint
        self.model = model
        self.api_key = api_key
        self.temperature = temperature
        self.max_tokens = max_tokens

    def decide(self, ctx: TurnContext) -> Decision:
        prompt = build_prompt(ctx)
        text, tokens_in, tokens_out = remote_chat(
            self.endpoint, self.model, prompt, self.api_key,
            self.temperature, self.max_tokens)
        try:
            commands, thought = parse_response(text, ctx.agents)
        except AdapterError:
            # an unparsable turn burns the step rather than crashing the episode
            commands, thought = {a: "EXPLORE" for a in ctx.agents}, ""
        return Decision(commands, thought, tokens_in, tokens_out)


def candidate_commands(scene: SceneGraph, knowledge: observe.KnowledgeState,
                       agent: str, engine: ActionEngine) -> list[str]:
    """Grammatically valid commands composable from what the agent knows."""
    node = scene.agents[agent]
    out = ["EXPLORE"]
    for room in sorted(knowledge.discovered_rooms):
        out.append(f"GOTO {room}")
    for obj in sorted(knowledge.discovered_objects):
        out.append(f"GOTO {obj}")
        out.append(f"GRAB {obj}")
        snap = knowledge.discovered_objects[obj]
        if "is_open" in snap.states:
            out.append(f"OPEN {obj}")
            out.append(f"CLOSE {obj}")
        if "is_on" in snap.states:
            out.append(f"TURN_ON {obj}")
            out.append(f"TURN_OFF {obj}")
        for effect in engine.abilities:
            if effect.requires_state in snap.states:
                out.append(f"{effect.verb} {obj}")
    for held in node.holding:
        out.append(f"PLACE {held} in {node.location}")
        for obj in sorted(knowledge.discovered_objects):
            if obj != held:
                out.append(f"PLACE {held} on {obj}")
                out.append(f"PLACE {held} in {obj}")
    if len(scene.agents) > 1:
        for obj in sorted(knowledge.discovered_objects):
            out.append(f"CORP_GRAB {obj}")
    return out


@dataclass
class EpisodeResult:
    task_id: str
    success: bool
    steps_used: int
    step_cap: int
    expert_length: int
    tokens_in: int = 0
    tokens_out: int = 0
    final_hash: str = ""
    goal_report: list = field(default_factory=list)
    record: list[dict] = field(default_factory=list)

    @property
    def rsr(self) -> float:
        """Relative step ratio: expert length over model length, 0 on failure."""
        if not self.success or self.steps_used <= 0 or self.expert_length <= 0:
            return 0.0
        return min(1.0, self.expert_length / self.steps_used)


class Episode:
    """Incremental episode state machine shared by the batch runner and the
    network service, so both paths produce identical records."""

    def __init__(self, scene: SceneGraph, task, step_cap: int = DEFAULT_STEP_CAP,
                 world_graph: bool = False, engine: ActionEngine | None = None):
        self.engine = engine or ActionEngine()
        self.world = scene.clone()
        self.task = task
        self.agents = list(task.agents)
        self.step_cap = step_cap
        self.mode = "WorldGraph" if world_graph else "Partial"
        self.knowledge = {a: observe.KnowledgeState() for a in self.agents}
        self.feedback: dict[str, str] = {}
        self.history: list[dict] = []
        self.record: list[dict] = [{
            "type": "header",
            "task_id": task.task_id,
            "scene_id": self.world.scene_id,
            "obs_version": observe.OBS_VERSION,
            "mode": self.mode,
            "step_cap": step_cap,
            "agents": self.agents,
            "initial_hash": self.world.canonical_hash(),
        }]
        self.tokens_in = self.tokens_out = 0
        self.steps_used = 0
        self.finished = False

    @property
    def all_done(self) -> bool:
        return all(self.world.agents[a].done for a in self.agents)

    def context(self) -> TurnContext:
        for agent in self.agents:
            observe.refresh_surroundings(self.world, self.knowledge[agent], agent)
        return TurnContext(
            step=self.steps_used,
            instruction=self.task.instruction,
            agents=self.agents,
            observations={a: observe.render_observation(
                self.world, self.knowledge[a], a, self.mode).text
                for a in self.agents},
            available={a: self.engine.available_actions(self.world, a)
                       for a in self.agents},
            feedback=dict(self.feedback),
            candidates={a: candidate_commands(self.world, self.knowledge[a], a,
                                              self.engine)
                        for a in self.agents},
            history=self.history,
        )

    def step(self, raw_commands: dict[str, str], thought: str = "") -> dict:
        """Execute one joint step from raw command strings.

        Unparsable commands burn the step as a failed EXPLORE, per the
        one-query-per-step accounting rule.
        """
        if self.finished:
            raise RoomsimError("episode already finished")
        step_index = self.steps_used
        commands: dict[str, ActionCommand] = {}
        parse_failures: dict[str, str] = {}
        for agent in self.agents:
            raw = raw_commands.get(agent, "EXPLORE")
            try:
                commands[agent] = self.engine.parse_action(raw, issuer=agent)
            except RoomsimError as exc:
                parse_failures[agent] = f"Invalid action {raw!r}: {exc}"
                commands[agent] = ActionCommand("EXPLORE", (), agent)

        outcomes = self.engine.execute_joint(self.world, commands)
        self.steps_used += 1
        self.feedback = {}
        results = {}
        for agent in self.agents:
            outcome = outcomes[agent]
            message = parse_failures.get(agent, outcome.message)
            if commands[agent].verb == "EXPLORE" and outcome.ok \
                    and agent not in parse_failures:
                message = observe.explore(self.world, self.knowledge[agent], agent)
            self.feedback[agent] = message
            results[agent] = "Failed" if agent in parse_failures else outcome.status
        self.history.append({"step": step_index,
                             "commands": {a: raw_commands.get(a, "EXPLORE")
                                          for a in self.agents},
                             "results": results})
        entry = {
            "type": "step",
            "index": step_index,
            "commands": {a: commands[a].raw for a in self.agents},
            "thought": thought,
            "outcomes": [{"agent": a, "status": results[a],
                          "message": self.feedback[a], "error": outcomes[a].error}
                         for a in self.agents],
            "scene_hash": self.world.canonical_hash(),
        }
        self.record.append(entry)
        if self.all_done or self.steps_used >= self.step_cap:
            self.finished = True
        return entry

    def result(self) -> EpisodeResult:
        goal_result = evaluate(self.world, self.task.goal)
        success = goal_result.satisfied and self.all_done
        result = EpisodeResult(
            task_id=self.task.task_id,
            success=success,
            steps_used=self.steps_used,
            step_cap=self.step_cap,
            expert_length=self.task.expert_length,
            tokens_in=self.tokens_in,
            tokens_out=self.tokens_out,
            final_hash=self.world.canonical_hash(),
            goal_report=goal_result.leaf_report,
            record=self.record,
        )
        if not self.record or self.record[-1].get("type") != "footer":
            self.record.append({
                "type": "footer",
                "steps_used": self.steps_used,
                "success": success,
                "goal_satisfied": goal_result.satisfied,
                "final_hash": result.final_hash,
                "tokens_in": self.tokens_in,
                "tokens_out": self.tokens_out,
            })
        return result


def run_episode(scene: SceneGraph, task, adapter, step_cap: int = DEFAULT_STEP_CAP,
                world_graph: bool = False,
                engine: ActionEngine | None = None) -> EpisodeResult:
    """Drive one episode to completion (all agents DONE) or to the step cap."""
    episode = Episode(scene, task, step_cap, world_graph, engine)
    while not episode.finished:
        decision = adapter.decide(episode.context())
        episode.tokens_in += decision.tokens_in
        episode.tokens_out += decision.tokens_out
        episode.step(decision.commands, decision.thought)
    return episode.result()


def write_record(path: str, result: EpisodeResult) -> None:
    with open(path, "w") as fh:
        for line in result.record:
            fh.write(json.dumps(line, sort_keys=True) + "\n")


def read_record(path: str) -> list[dict]:
    with open(path) as fh:
        lines = [json.loads(line) for line in fh if line.strip()]
    if not lines or lines[0].get("type") != "header":
        raise ReplayDivergence(f"{path}: not an episode record (missing header)")
    return lines


def replay_record(scene: SceneGraph, record: list[dict],
                  engine: ActionEngine | None = None) -> SceneGraph:
    """Re-execute a recorded episode and verify every per-step scene hash."""
    engine = engine or ActionEngine()
    header = record[0]
    world = scene.clone()
    if world.canonical_hash() != header["initial_hash"]:
        raise ReplayDivergence("initial scene hash does not match the record")
    for entry in record:
        if entry.get("type") != "step":
            continue
        commands = {a: engine.parse_action(raw, issuer=a)
                    for a, raw in entry["commands"].items()}
        engine.execute_joint(world, commands)
        if world.canonical_hash() != entry["scene_hash"]:
            raise ReplayDivergence(f"scene hash diverged at step {entry['index']}")
    footers = [e for e in record if e.get("type") == "footer"]
    if footers and world.canonical_hash() != footers[0]["final_hash"]:
        raise ReplayDivergence("final scene hash does not match the record")
    return world
