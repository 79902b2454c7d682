"""Service boundary: command dispatch, event broadcast, script runner."""

from __future__ import annotations

import json
from dataclasses import dataclass

from .brushes import Stroke
from .config import RuntimeConfig
from .document import CanvasDocument, canonical_json_bytes
from .errors import GenCanvasError, ScriptParseError
from .fragments import FragmentEdit
from .geometry import Rect
from .protocol import Event, validate_command
from .runtime import CanvasRuntime
from .scheduler import VirtualClock


class Session:
    """One client-facing session over a runtime; many subscribers may attach
    and all see the identical event sequence."""

    def __init__(self, runtime: CanvasRuntime):
        self.runtime = runtime

    def subscribe(self, callback):
        return self.runtime.subscribe(callback)

    def handle_command(self, message: dict) -> list[Event]:
        """Run one command on the document queue; returns the events it
        produced (already broadcast)."""
        rt = self.runtime
        with rt.lock:
            start = len(rt.events)
            try:
                cmd, request_id, args = validate_command(message)
            except GenCanvasError as exc:
                rt._request_id = message.get("request_id") if isinstance(message, dict) else None
                rt._emit("error", {"code": exc.code, "message": str(exc)})
                rt._request_id = None
                return rt.events[start:]
            rt._request_id = request_id
            try:
                self._dispatch(cmd, args)
            except GenCanvasError as exc:
                payload = {"code": exc.code, "message": str(exc), "cmd": cmd}
                if getattr(exc, "pair", None):
                    payload["pair"] = list(exc.pair)
                rt._emit("error", payload)
            finally:
                rt._request_id = None
            return rt.events[start:]

    def _dispatch(self, cmd: str, args: dict) -> None:
        rt = self.runtime
        if cmd == "createElement":
            rt.create_element(args["kind"], Rect.from_dict(args["rect"]), args.get("init"))
        elif cmd == "updateGeometry":
            rt.update_geometry(args["id"], Rect.from_dict(args["rect"]))
        elif cmd == "setPrompt":
            rt.set_prompt(args["id"], args["prompt"])
        elif cmd == "dropOn":
            rt.drop_on(args["source_id"], args["target_id"])
        elif cmd == "revealFragments":
            rt.reveal_fragments(args["id"])
        elif cmd == "varyFragment":
            rt.vary_fragment(args["id"], args["ftype"], int(args.get("k", 3)))
        elif cmd == "extendFragmentTypes":
            rt.extend_fragment_types(args["id"])
        elif cmd == "applyFragmentEdit":
            rt.apply_fragment_edit(args["id"], FragmentEdit.from_dict(args["edit"]))
        elif cmd == "generateContainer":
            rt.generate_container(args["id"])
        elif cmd == "adoptCell":
            rt.adopt_cell(args["id"], int(args["cell_index"]), Rect.from_dict(args["rect"]))
        elif cmd == "fillBrushFromText":
            rt.fill_brush_from_text(args["id"], args["prompt"], args.get("mode", "style"))
        elif cmd == "fillBrushFromExample":
            region = Rect.from_dict(args["region"]) if args.get("region") else None
            rt.fill_brush_from_example(args["id"], args["asset_id"], region, args.get("mode", "style"))
        elif cmd == "applyBrushStroke":
            rt.apply_brush(args["brush_id"], args["target_id"], Stroke.from_dict(args["stroke"]))
        elif cmd == "combineBrushes":
            rt.combine_brushes(args["a_id"], args["b_id"])
        elif cmd == "addToPalette":
            rt.add_to_palette(args["palette_id"], args["element_id"])
        elif cmd == "takeFromPalette":
            rt.take_from_palette(args["palette_id"], int(args["index"]), Rect.from_dict(args["rect"]))
        elif cmd == "generatePalette":
            rect = Rect.from_dict(args["rect"]) if args.get("rect") else None
            rt.generate_palette(args["prompt"], args["kind"], int(args["k"]), rect)
        elif cmd == "restoreHistory":
            rt.restore_history(int(args["entry_index"]))
        elif cmd == "saveDocument":
            from .persistence import save_document

            with rt._patched():
                save_document(rt.doc, args["path"])


@dataclass
class Transcript:
    events: list[Event]
    final_document: dict

    def to_bytes(self) -> bytes:
        return canonical_json_bytes(
            {
                "events": [e.to_dict() for e in self.events],
                "final_document": self.final_document,
            }
        )


def load_script(path: str) -> tuple[dict, list[dict]]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScriptParseError(f"cannot read script {path!r}: {exc}") from exc
    if isinstance(data, list):
        return {}, data
    if isinstance(data, dict) and isinstance(data.get("commands"), list):
        return data.get("config", {}), data["commands"]
    raise ScriptParseError("script must be a command list or {config, commands}")


def run_script(path: str, config: RuntimeConfig | None = None) -> Transcript:
    """Execute a command script against mock adapters on a virtual clock.

    Deterministic: the same script yields byte-identical transcripts."""
    overrides, commands = load_script(path)
    cfg = config or RuntimeConfig.load(overrides=overrides)
    cfg.adapter = "mock"
    runtime = CanvasRuntime(cfg, clock=VirtualClock())
    session = Session(runtime)
    for index, step in enumerate(commands):
        if not isinstance(step, dict):
            raise ScriptParseError(f"step #{index} is not an object")
        if "waitIdle" in step:
            wait = step["waitIdle"]
            if isinstance(wait, (int, float)) and not isinstance(wait, bool):
                runtime.advance(int(wait))
            runtime.wait_idle()
            continue
        events = session.handle_command(step)
        failures = [e for e in events if e.kind == "error"]
        if failures:
            detail = failures[0].payload
            raise ScriptParseError(
                f"step #{index} ({step.get('cmd')}) failed: "
                f"{detail.get('code')}: {detail.get('message')}"
            )
    return Transcript(events=list(runtime.events), final_document=runtime.doc.to_dict())
