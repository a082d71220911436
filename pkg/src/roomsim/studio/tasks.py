"""Task specification and its file form."""

from __future__ import annotations

from dataclasses import dataclass, field

from .. import goals
from ..actions import ActionCommand


@dataclass
class TaskSpec:
    task_id: str
    scene_id: str
    category: str
    instruction: str
    agents: list[str]
    goal: goals.GoalPredicate
    expert_trajectory: list[dict] = field(default_factory=list)  # {step, agent, raw}
    expert_length: int = 0

    def to_json(self) -> dict:
        return {
            "task_id": self.task_id,
            "scene_id": self.scene_id,
            "category": self.category,
            "instruction": self.instruction,
            "agents": list(self.agents),
            "goal": goals.to_json(self.goal),
            "expert_trajectory": list(self.expert_trajectory),
            "expert_length": self.expert_length,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TaskSpec":
        return cls(
            task_id=data["task_id"],
            scene_id=data["scene_id"],
            category=data["category"],
            instruction=data["instruction"],
            agents=list(data["agents"]),
            goal=goals.from_json(data["goal"]),
            expert_trajectory=list(data.get("expert_trajectory", [])),
            expert_length=int(data.get("expert_length", 0)),
        )

    def expert_steps(self) -> list[dict[str, str]]:
        """Group the flat trajectory back into per-step raw command maps."""
        steps: dict[int, dict[str, str]] = {}
        for entry in self.expert_trajectory:
            steps.setdefault(entry["step"], {})[entry["agent"]] = entry["raw"]
        return [steps[i] for i in sorted(steps)]


def plan_to_trajectory(steps: list[dict[str, ActionCommand]]) -> list[dict]:
    out = []
    for index, step in enumerate(steps):
        for agent in sorted(step):
            out.append({"step": index, "agent": agent, "raw": step[agent].raw})
    return out
