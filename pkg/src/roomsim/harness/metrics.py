"""Metric aggregation: success rate, steps, relative step ratio, tokens."""

from __future__ import annotations

import statistics
from dataclasses import dataclass, field


@dataclass
class MetricsReport:
    overall: dict
    per_category: dict[str, dict] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"overall": self.overall,
                "per_category": dict(sorted(self.per_category.items()))}


def _quartiles(values: list[float]) -> dict:
    if not values:
        return {"q1": None, "median": None, "q3": None}
    values = sorted(values)
    return {
        "q1": statistics.median(values[: (len(values) + 1) // 2]),
        "median": statistics.median(values),
        "q3": statistics.median(values[len(values) // 2:]),
    }


def _fold(rows: list[dict]) -> dict:
    n = len(rows)
    successes = [r for r in rows if r["success"]]
    rsrs = [r["rsr"] for r in successes]
    return {
        "runs": n,
        "sr": round(100.0 * len(successes) / n, 2) if n else 0.0,
        "mean_steps_success": round(
            sum(r["steps_used"] for r in successes) / len(successes), 2)
            if successes else None,
        "rsr": _quartiles(rsrs),
        "mean_tokens_in": round(sum(r["tokens_in"] for r in rows) / n, 1) if n else 0.0,
        "mean_tokens_out": round(sum(r["tokens_out"] for r in rows) / n, 1) if n else 0.0,
    }


def result_row(category: str, result) -> dict:
    """Flatten one EpisodeResult for aggregation and JSON reports."""
    return {
        "task_id": result.task_id,
        "category": category,
        "success": result.success,
        "steps_used": result.steps_used,
        "expert_length": result.expert_length,
        "rsr": result.rsr,
        "tokens_in": result.tokens_in,
        "tokens_out": result.tokens_out,
        "final_hash": result.final_hash,
    }


def aggregate(rows: list[dict]) -> MetricsReport:
    categories: dict[str, list[dict]] = {}
    for row in rows:
        categories.setdefault(row["category"], []).append(row)
    return MetricsReport(
        overall=_fold(rows),
        per_category={c: _fold(v) for c, v in sorted(categories.items())},
    )


def render_table(report: MetricsReport) -> str:
    """Plain-text table with SR and Step columns per category."""
    header = f"{'Category':<26} {'SR %':>7} {'Step':>7} {'RSR med':>8} {'Runs':>5}"
    lines = [header, "-" * len(header)]

    def fmt(name: str, cell: dict) -> str:
        steps = cell["mean_steps_success"]
        median = cell["rsr"]["median"]
        return (f"{name:<26} {cell['sr']:>7.1f} "
                f"{steps if steps is not None else '-':>7} "
                f"{f'{median:.3f}' if median is not None else '-':>8} "
                f"{cell['runs']:>5}")

    for category, cell in sorted(report.per_category.items()):
        lines.append(fmt(category, cell))
    lines.append("-" * len(header))
    lines.append(fmt("overall", report.overall))
    return "\n".join(lines)
