"""Run configuration shared by every command and embedded in every report."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any

CONFIG_VERSION = 1


@dataclass
class RunConfig:
    subcommand: str = ""
    graph: str | None = None
    generator: str | None = None
    scheme: str | None = None
    directed: bool = True
    model: str = "IC"
    k: int | None = None
    algorithm: str | None = None
    params: list = field(default_factory=list)
    rounds: int | None = None
    budget: float | None = None
    seed: int | None = None
    output: str | None = None
    format: str | None = None
    extra: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"version": CONFIG_VERSION, **asdict(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> RunConfig:
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known - {"version"}
        if unknown:
            raise ValueError(f"unknown RunConfig fields: {', '.join(sorted(unknown))}")
        return cls(**{k: v for k, v in d.items() if k in known})

    @classmethod
    def from_json(cls, text: str) -> RunConfig:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValueError(f"config is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ValueError("config must be a JSON object")
        return cls.from_dict(data)

    def merged(self, overrides: dict) -> RunConfig:
        """Copy with every non-None override applied (flags beat the file)."""
        d = asdict(self)
        for key, val in overrides.items():
            if val is None:
                continue
            if key == "extra":
                d["extra"] = {**d["extra"], **val}
            else:
                d[key] = val
        return RunConfig(**d)
