"""Runtime configuration: file values overridden by GENCANVAS_* env vars."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields


@dataclass
class RuntimeConfig:
    adapter: str = "mock"  # mock | remote
    idle_window_ms: int = 2000
    edit_window_ms: int = 300
    max_inflight: int = 4
    base_seed: int = 7
    mock_image_size: int = 512
    language_url: str = ""
    image_url: str = ""
    language_model: str = "gpt-4o"
    language_token_env: str = "GENCANVAS_LANGUAGE_TOKEN"
    image_token_env: str = "GENCANVAS_IMAGE_TOKEN"
    auth_token: str = ""  # static token for serve mode; empty disables the check
    extra: dict = field(default_factory=dict)

    def windows_ms(self) -> dict[str, int]:
        return {"lens-idle": self.idle_window_ms, "edit-coalesce": self.edit_window_ms}

    @classmethod
    def load(cls, path: str | None = None, overrides: dict | None = None) -> "RuntimeConfig":
        data: dict = {}
        if path:
            with open(path, "r", encoding="utf-8") as fh:
                data.update(json.load(fh))
        if overrides:
            data.update({k: v for k, v in overrides.items() if v is not None})
        cfg = cls()
        known = {f.name: f.type for f in fields(cls)}
        for key, value in data.items():
            if key in known and key != "extra":
                setattr(cfg, key, value)
            else:
                cfg.extra[key] = value
        cfg._apply_env()
        return cfg

    def _apply_env(self) -> None:
        for f in fields(self):
            if f.name == "extra":
                continue
            env_key = f"GENCANVAS_{f.name.upper()}"
            raw = os.environ.get(env_key)
            if raw is None:
                continue
            current = getattr(self, f.name)
            if isinstance(current, bool):
                setattr(self, f.name, raw.lower() in ("1", "true", "yes"))
            elif isinstance(current, int):
                setattr(self, f.name, int(raw))
            else:
                setattr(self, f.name, raw)
