"""Reports emitted by the command line front end."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from typing import Any

SCHEMA_ID = "ccforge.report/1"


@dataclass
class Report:
    command: list[str]
    inputs: dict[str, Any] = field(default_factory=dict)
    outputs: dict[str, Any] = field(default_factory=dict)
    verdicts: dict[str, bool] = field(default_factory=dict)
    wall_time_s: float | None = None

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_json(self, timing: bool = False) -> dict[str, Any]:
        data = {
            "schema": SCHEMA_ID,
            "command": list(self.command),
            "inputs": self.inputs,
            "outputs": self.outputs,
            "verdicts": self.verdicts,
            "pass": self.passed,
        }
        # wall time would break byte-identical reruns, so it is opt-in
        if timing and self.wall_time_s is not None:
            data["wall_time_s"] = self.wall_time_s
        return data

    def dumps(self, timing: bool = False) -> str:
        return json.dumps(self.to_json(timing), sort_keys=True, indent=2)

    def render_text(self) -> str:
        lines = ["$ ccforge " + " ".join(self.command)]
        for k, v in self.inputs.items():
            lines.append(f"  input  {k} = {_short(v)}")
        for k, v in self.outputs.items():
            lines.append(f"  output {k} = {_short(v)}")
        for k, ok in self.verdicts.items():
            lines.append(f"  [{'PASS' if ok else 'FAIL'}] {k}")
        if self.wall_time_s is not None:
            lines.append(f"  wall time {self.wall_time_s:.4f} s")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _short(v: Any) -> str:
    if isinstance(v, dict) and "terms" in v and "generators" in v:
        return _series_text(v)
    if isinstance(v, list) and all(isinstance(x, str) for x in v):
        return "[" + ", ".join(v) + "]"
    return json.dumps(v, sort_keys=True) if isinstance(v, (dict, list)) else str(v)


def _series_text(data: dict) -> str:
    from .series import GradedSeries

    return str(GradedSeries.from_json(data))


def load_schema() -> dict[str, Any]:
    text = resources.files("ccforge").joinpath("schema/report.schema.json").read_text()
    return json.loads(text)
