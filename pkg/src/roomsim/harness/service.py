"""HTTP/WebSocket episode service.

Human (or browser) sessions are ordinary episodes: the service owns a
runtime.Episode per session, so an action sequence submitted over HTTP
produces exactly the record the in-process runner would. Episode state is
persisted as append-only JSON-lines and rehydrated on startup by replay.
"""

from __future__ import annotations

import asyncio
import json
import os
import threading
import uuid

from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from pydantic import BaseModel

from .. import goals, observe, runtime
from ..errors import RoomsimError
from ..world import scene_to_document
from .corpus import load_corpus


class CreateEpisodeRequest(BaseModel):
    task_id: str
    world_graph: bool = False
    step_cap: int = runtime.DEFAULT_STEP_CAP


class ActionRequest(BaseModel):
    agent: str | None = None
    raw: str | None = None
    actions: dict[str, str] | None = None


class _Session:
    def __init__(self, episode_id: str, bundle, episode: runtime.Episode):
        self.id = episode_id
        self.bundle = bundle
        self.episode = episode
        self.lock = threading.Lock()
        self.subscribers: list[asyncio.Queue] = []


def _leaf_report(episode: runtime.Episode) -> list[dict]:
    result = goals.evaluate(episode.world, episode.task.goal)
    return [{"predicate": goals.describe(leaf), "satisfied": ok}
            for leaf, ok in result.leaf_report]


def _observation_payload(episode: runtime.Episode) -> dict:
    ctx = episode.context()
    return {
        "observation": ctx.observations,
        "available_actions": {a: [list(item) for item in ctx.available[a]]
                              for a in episode.agents},
        "feedback": ctx.feedback,
    }


def _state_payload(session: _Session) -> dict:
    episode = session.episode
    payload = {
        "episode_id": session.id,
        "task_id": episode.task.task_id,
        "instruction": episode.task.instruction,
        "agents": episode.agents,
        "step_index": episode.steps_used,
        "step_cap": episode.step_cap,
        "done": episode.finished,
        "goal_leaf_report": _leaf_report(episode),
        "scene_hash": episode.world.canonical_hash(),
    }
    payload.update(_observation_payload(episode))
    return payload


def create_app(corpus_path: str, state_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="roomsim episode service")
    bundles = {b.task.task_id: b for b in load_corpus(corpus_path)}
    sessions: dict[str, _Session] = {}
    if state_dir:
        os.makedirs(os.path.join(state_dir, "episodes"), exist_ok=True)

    def _record_path(episode_id: str) -> str | None:
        if not state_dir:
            return None
        return os.path.join(state_dir, "episodes", f"{episode_id}.jsonl")

    def _append(episode_id: str, entry: dict) -> None:
        path = _record_path(episode_id)
        if path:
            with open(path, "a") as fh:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def _new_session(episode_id: str, request: CreateEpisodeRequest) -> _Session:
        bundle = bundles.get(request.task_id)
        if bundle is None:
            raise HTTPException(404, f"unknown task {request.task_id}")
        episode = runtime.Episode(bundle.scene, bundle.task,
                                  step_cap=request.step_cap,
                                  world_graph=request.world_graph)
        session = _Session(episode_id, bundle, episode)
        sessions[episode_id] = session
        return session

    def _rehydrate() -> None:
        if not state_dir:
            return
        directory = os.path.join(state_dir, "episodes")
        for name in sorted(os.listdir(directory)):
            if not name.endswith(".jsonl"):
                continue
            episode_id = name[:-6]
            with open(os.path.join(directory, name)) as fh:
                entries = [json.loads(line) for line in fh if line.strip()]
            if not entries or entries[0].get("type") != "header":
                continue
            header = entries[0]
            bundle = bundles.get(header["task_id"])
            if bundle is None:
                continue
            episode = runtime.Episode(bundle.scene, bundle.task,
                                      step_cap=header["step_cap"],
                                      world_graph=header["mode"] == "WorldGraph")
            for entry in entries:
                if entry.get("type") == "step" and not episode.finished:
                    episode.step(entry["commands"], entry.get("thought", ""))
            sessions[episode_id] = _Session(episode_id, bundle, episode)

    _rehydrate()

    def _get_session(episode_id: str) -> _Session:
        session = sessions.get(episode_id)
        if session is None:
            raise HTTPException(404, f"unknown episode {episode_id}")
        return session

    async def _broadcast(session: _Session, payload: dict) -> None:
        for queue in list(session.subscribers):
            await queue.put(payload)

    @app.get("/tasks")
    async def list_tasks():
        return [{
            "task_id": b.task.task_id,
            "scene_id": b.task.scene_id,
            "category": b.task.category,
            "instruction": b.task.instruction,
            "agents": b.task.agents,
            "expert_length": b.task.expert_length,
        } for b in sorted(bundles.values(), key=lambda b: b.task.task_id)]

    @app.get("/scenes/{scene_id}")
    async def get_scene(scene_id: str):
        for bundle in bundles.values():
            if bundle.scene.scene_id == scene_id:
                scene = bundle.scene
                knowledge = observe.KnowledgeState()
                agent = sorted(scene.agents)[0]
                rendering = observe.render_observation(scene, knowledge, agent,
                                                       "WorldGraph").text
                return {"scene_id": scene_id,
                        "document": scene_to_document(scene),
                        "world_graph": rendering}
        raise HTTPException(404, f"unknown scene {scene_id}")

    @app.post("/episodes", status_code=201)
    async def create_episode(request: CreateEpisodeRequest):
        episode_id = f"ep_{uuid.uuid4().hex[:12]}"
        session = _new_session(episode_id, request)
        _append(episode_id, session.episode.record[0])
        payload = _state_payload(session)
        return payload

    @app.get("/episodes/{episode_id}")
    async def get_episode(episode_id: str):
        session = _get_session(episode_id)
        with session.lock:
            state = _state_payload(session)
            state["record"] = list(session.episode.record)
        return state

    @app.post("/episodes/{episode_id}/action")
    async def post_action(episode_id: str, request: ActionRequest):
        session = _get_session(episode_id)
        episode = session.episode
        with session.lock:
            if episode.finished:
                raise HTTPException(409, "episode already finished")
            if request.actions:
                raw_commands = dict(request.actions)
            elif request.agent and request.raw is not None:
                raw_commands = {request.agent: request.raw}
            else:
                raise HTTPException(422, "provide either {agent, raw} or {actions}")
            unknown = [a for a in raw_commands if a not in episode.agents]
            if unknown:
                raise HTTPException(422, f"unknown agents: {', '.join(unknown)}")
            for agent, raw in raw_commands.items():
                try:
                    episode.engine.parse_action(raw, issuer=agent)
                except RoomsimError as exc:
                    raise HTTPException(
                        422, {"feedback": f"Invalid action {raw!r}: {exc}",
                              "agent": agent})
            entry = episode.step(raw_commands)
            _append(episode_id, entry)
            if episode.finished:
                result = episode.result()
                _append(episode_id, episode.record[-1])
            payload = _state_payload(session)
            payload["outcome"] = {o["agent"]: {"status": o["status"],
                                               "error": o["error"]}
                                  for o in entry["outcomes"]}
            payload["feedback"] = {o["agent"]: o["message"]
                                   for o in entry["outcomes"]}
            if episode.finished:
                payload["success"] = result.success
        await _broadcast(session, payload)
        return payload

    @app.websocket("/episodes/{episode_id}/stream")
    async def stream(websocket: WebSocket, episode_id: str):
        session = sessions.get(episode_id)
        if session is None:
            await websocket.close(code=4404)
            return
        await websocket.accept()
        queue: asyncio.Queue = asyncio.Queue()
        session.subscribers.append(queue)
        try:
            with session.lock:
                await websocket.send_json(_state_payload(session))
            while True:
                payload = await queue.get()
                await websocket.send_json(payload)
        except WebSocketDisconnect:
            pass
        finally:
            if queue in session.subscribers:
                session.subscribers.remove(queue)

    return app
