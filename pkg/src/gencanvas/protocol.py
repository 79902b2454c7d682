"""Wire protocol: command schemas, events, and document patches.

Messages are line-delimited JSON. A docPatch is the minimal top-level diff
sufficient to rebuild the new document state; replaying every patch from an
empty document reproduces the final document exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import SchemaError, UnknownCommandError

EVENT_KINDS = (
    "docPatch",
    "generationStarted",
    "generationCompleted",
    "generationDiscarded",
    "error",
)

# Required / optional argument names per command.
COMMAND_SCHEMAS: dict[str, tuple[set[str], set[str]]] = {
    "createElement": ({"kind", "rect"}, {"init"}),
    "updateGeometry": ({"id", "rect"}, set()),
    "setPrompt": ({"id", "prompt"}, set()),
    "dropOn": ({"source_id", "target_id"}, set()),
    "revealFragments": ({"id"}, set()),
    "varyFragment": ({"id", "ftype"}, {"k"}),
    "extendFragmentTypes": ({"id"}, set()),
    "applyFragmentEdit": ({"id", "edit"}, set()),
    "generateContainer": ({"id"}, set()),
    "adoptCell": ({"id", "cell_index", "rect"}, set()),
    "fillBrushFromText": ({"id", "prompt"}, {"mode"}),
    "fillBrushFromExample": ({"id", "asset_id"}, {"region", "mode"}),
    "applyBrushStroke": ({"brush_id", "target_id", "stroke"}, set()),
    "combineBrushes": ({"a_id", "b_id"}, set()),
    "addToPalette": ({"palette_id", "element_id"}, set()),
    "takeFromPalette": ({"palette_id", "index", "rect"}, set()),
    "generatePalette": ({"prompt", "kind", "k"}, {"rect"}),
    "restoreHistory": ({"entry_index"}, set()),
    "saveDocument": ({"path"}, set()),
}


def validate_command(message: dict) -> tuple[str, str | None, dict]:
    """Returns (cmd, request_id, args) or raises."""
    if not isinstance(message, dict):
        raise SchemaError("command must be a JSON object")
    cmd = message.get("cmd")
    if not isinstance(cmd, str):
        raise SchemaError("command needs a string 'cmd' field")
    if cmd not in COMMAND_SCHEMAS:
        raise UnknownCommandError(f"unknown command {cmd!r}")
    request_id = message.get("request_id")
    args = message.get("args", {})
    if not isinstance(args, dict):
        raise SchemaError("'args' must be an object")
    required, optional = COMMAND_SCHEMAS[cmd]
    missing = required - set(args)
    if missing:
        raise SchemaError(f"{cmd} missing args: {sorted(missing)}")
    unknown = set(args) - required - optional
    if unknown:
        raise SchemaError(f"{cmd} got unknown args: {sorted(unknown)}")
    return cmd, request_id, args


@dataclass
class Event:
    kind: str
    payload: dict
    doc_revision: int
    request_id: str | None = None
    seq: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "payload": self.payload,
            "doc_revision": self.doc_revision,
            "request_id": self.request_id,
            "seq": self.seq,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


# -- document patches --------------------------------------------------------


def diff_documents(before: dict, after: dict) -> dict:
    """Minimal top-level diff between two document state dicts."""
    patch: dict = {"revision": after["revision"]}

    set_elements = {}
    for eid, el in after["elements"].items():
        if before["elements"].get(eid) != el:
            set_elements[eid] = el
    removed = [eid for eid in before["elements"] if eid not in after["elements"]]
    if set_elements:
        patch["set_elements"] = set_elements
    if removed:
        patch["removed_elements"] = sorted(removed)

    if before["z_order"] != after["z_order"]:
        patch["z_order"] = after["z_order"]

    set_assets = {}
    for aid, asset in after["assets"].items():
        if before["assets"].get(aid) != asset:
            set_assets[aid] = asset
    if set_assets:
        patch["set_assets"] = set_assets

    n_before = len(before["history"])
    if after["history"][:n_before] != before["history"]:
        # History is append-only; a mismatched prefix means state corruption.
        raise SchemaError("history prefix changed; document is not append-only")
    appended = after["history"][n_before:]
    if appended:
        patch["history_append"] = appended

    if before["counters"] != after["counters"]:
        patch["counters"] = after["counters"]
    for key in ("next_element_num", "seed_rolls"):
        if before[key] != after[key]:
            patch[key] = after[key]
    return patch


def apply_patch(state: dict, patch: dict) -> dict:
    """Fold one docPatch into a document state dict (mutates and returns)."""
    for eid in patch.get("removed_elements", []):
        state["elements"].pop(eid, None)
        if eid in state["z_order"]:
            state["z_order"].remove(eid)
    for eid, el in patch.get("set_elements", {}).items():
        state["elements"][eid] = el
        if eid not in state["z_order"]:
            state["z_order"].append(eid)
    if "z_order" in patch:
        state["z_order"] = list(patch["z_order"])
    for aid, asset in patch.get("set_assets", {}).items():
        state["assets"][aid] = asset
    state["history"].extend(patch.get("history_append", []))
    if "counters" in patch:
        state["counters"] = dict(patch["counters"])
    for key in ("next_element_num", "seed_rolls", "revision"):
        if key in patch:
            state[key] = patch[key]
    return state


def empty_state() -> dict:
    from .document import CanvasDocument

    return CanvasDocument().to_dict()


def is_empty_patch(patch: dict) -> bool:
    return set(patch.keys()) <= {"revision"}
