"""Canvas document: elements, z-order, asset store, history, serialization.

Single-writer model: every mutation goes through one command queue per
document (the runtime enforces this); the document itself is plain state
plus invariant checks.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .assets import ImageAsset
from .errors import (
    CorruptPayloadError,
    DanglingAssetError,
    MalformedPayloadError,
    UnknownIdError,
    VersionMismatchError,
)
from .fragments import Fragment, FragmentRow
from .geometry import Rect

DOCUMENT_VERSION = 1

ELEMENT_KINDS = ("image", "fragment", "lens", "container", "brush", "palette")


# ---------------------------------------------------------------------------
# Kind-specific payloads


@dataclass
class ImagePayload:
    asset_id: str | None = None
    prompt: str = ""  # creation prompt while the first generation is pending
    fragment_row: FragmentRow | None = None

    def to_dict(self) -> dict:
        return {
            "asset_id": self.asset_id,
            "prompt": self.prompt,
            "fragment_row": self.fragment_row.to_dict() if self.fragment_row else None,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ImagePayload":
        row = d.get("fragment_row")
        return cls(
            asset_id=d.get("asset_id"),
            prompt=d.get("prompt", ""),
            fragment_row=FragmentRow.from_dict(row) if row else None,
        )


@dataclass
class FragmentCardPayload:
    fragment: Fragment

    def to_dict(self) -> dict:
        return {"fragment": self.fragment.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "FragmentCardPayload":
        return cls(fragment=Fragment.from_dict(d["fragment"]))


@dataclass
class LensPayload:
    prompt: str = ""
    last_result: str | None = None
    faded: bool = False  # UI mirror only; never triggers regeneration
    pending_job: int | None = None
    seed: int | None = None

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "last_result": self.last_result,
            "faded": self.faded,
            "pending_job": self.pending_job,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LensPayload":
        return cls(
            prompt=d.get("prompt", ""),
            last_result=d.get("last_result"),
            faded=d.get("faded", False),
            pending_job=d.get("pending_job"),
            seed=d.get("seed"),
        )


@dataclass(frozen=True)
class Grounding:
    """At most one example grounds a container: an asset, a fragment, or text."""

    source: str = "none"  # none | asset | fragment | text
    asset_id: str | None = None
    fragment: Fragment | None = None
    prompt: str | None = None

    def __post_init__(self):
        if self.source not in ("none", "asset", "fragment", "text"):
            raise MalformedPayloadError(f"unknown grounding source {self.source!r}")
        needed = {"asset": self.asset_id, "fragment": self.fragment, "text": self.prompt}
        if self.source != "none" and needed[self.source] is None:
            raise MalformedPayloadError(f"grounding {self.source} missing its payload")

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "asset_id": self.asset_id,
            "fragment": self.fragment.to_dict() if self.fragment else None,
            "prompt": self.prompt,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Grounding":
        frag = d.get("fragment")
        return cls(
            source=d.get("source", "none"),
            asset_id=d.get("asset_id"),
            fragment=Fragment.from_dict(frag) if frag else None,
            prompt=d.get("prompt"),
        )


@dataclass
class ContainerPayload:
    prompt: str = ""
    grounding: Grounding = field(default_factory=Grounding)
    # Exactly four cells; each None, {"asset": id} or {"fragment": {...}}.
    cells: list[dict | None] = field(default_factory=lambda: [None, None, None, None])
    cell_kind: str = "images"  # images | fragments
    base_seed: int | None = None

    def __post_init__(self):
        if len(self.cells) != 4:
            raise MalformedPayloadError("container always has exactly 4 cells")
        if self.cell_kind not in ("images", "fragments"):
            raise MalformedPayloadError(f"unknown cell kind {self.cell_kind!r}")

    def to_dict(self) -> dict:
        return {
            "prompt": self.prompt,
            "grounding": self.grounding.to_dict(),
            "cells": self.cells,
            "cell_kind": self.cell_kind,
            "base_seed": self.base_seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ContainerPayload":
        return cls(
            prompt=d.get("prompt", ""),
            grounding=Grounding.from_dict(d.get("grounding", {"source": "none"})),
            cells=list(d.get("cells", [None, None, None, None])),
            cell_kind=d.get("cell_kind", "images"),
            base_seed=d.get("base_seed"),
        )


@dataclass
class BrushPayload:
    prompt: str = ""
    mode: str = "style"  # style | content
    # Application counts per target element; emphasis grows per target.
    applications: dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        if self.mode not in ("style", "content"):
            raise MalformedPayloadError(f"unknown brush mode {self.mode!r}")

    @property
    def filled(self) -> bool:
        return bool(self.prompt.strip())

    def to_dict(self) -> dict:
        return {"prompt": self.prompt, "mode": self.mode, "applications": dict(self.applications)}

    @classmethod
    def from_dict(cls, d: dict) -> "BrushPayload":
        return cls(
            prompt=d.get("prompt", ""),
            mode=d.get("mode", "style"),
            applications=dict(d.get("applications", {})),
        )


@dataclass
class PalettePayload:
    title: str = ""
    # Immutable snapshots, not live references.
    items: list[dict] = field(default_factory=list)
    generated_from: str | None = None

    def to_dict(self) -> dict:
        return {"title": self.title, "items": list(self.items), "generated_from": self.generated_from}

    @classmethod
    def from_dict(cls, d: dict) -> "PalettePayload":
        return cls(
            title=d.get("title", ""),
            items=list(d.get("items", [])),
            generated_from=d.get("generated_from"),
        )


_PAYLOAD_TYPES = {
    "image": ImagePayload,
    "fragment": FragmentCardPayload,
    "lens": LensPayload,
    "container": ContainerPayload,
    "brush": BrushPayload,
    "palette": PalettePayload,
}


def payload_from_dict(kind: str, d: dict):
    try:
        return _PAYLOAD_TYPES[kind].from_dict(d)
    except KeyError as exc:
        raise MalformedPayloadError(f"unknown element kind {kind!r}") from exc
    except (TypeError, AttributeError) as exc:
        raise MalformedPayloadError(f"bad {kind} payload: {exc}") from exc


# ---------------------------------------------------------------------------
# Elements and history


@dataclass
class Element:
    id: str
    kind: str
    rect: Rect
    z: int
    payload: Any

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "rect": self.rect.to_dict(),
            "z": self.z,
            "payload": self.payload.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Element":
        kind = d["kind"]
        return cls(
            id=d["id"],
            kind=kind,
            rect=Rect.from_dict(d["rect"]),
            z=d["z"],
            payload=payload_from_dict(kind, d["payload"]),
        )


@dataclass(frozen=True)
class HistoryEntry:
    element_id: str
    prior_asset: str | None
    payload_snapshot: dict
    cause: str
    timestamp: int

    def to_dict(self) -> dict:
        return {
            "element_id": self.element_id,
            "prior_asset": self.prior_asset,
            "payload_snapshot": self.payload_snapshot,
            "cause": self.cause,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "HistoryEntry":
        return cls(
            element_id=d["element_id"],
            prior_asset=d.get("prior_asset"),
            payload_snapshot=d["payload_snapshot"],
            cause=d.get("cause", ""),
            timestamp=d.get("timestamp", 0),
        )


# ---------------------------------------------------------------------------
# Document


class CanvasDocument:
    def __init__(self):
        self.version = DOCUMENT_VERSION
        self.elements: dict[str, Element] = {}
        self.z_order: list[str] = []
        self.assets: dict[str, ImageAsset] = {}
        self.history: list[HistoryEntry] = []
        self.counters: dict[str, int] = {}
        self.revision = 0
        self.next_element_num = 1
        self.seed_rolls = 0  # deterministic re-roll stream for containers

    # -- accessors ----------------------------------------------------------

    def element(self, element_id: str) -> Element:
        try:
            return self.elements[element_id]
        except KeyError:
            raise UnknownIdError(f"no element {element_id!r}") from None

    def asset(self, asset_id: str) -> ImageAsset:
        try:
            return self.assets[asset_id]
        except KeyError:
            raise DanglingAssetError(f"no asset {asset_id!r}") from None

    def counter(self, element_id: str) -> int:
        return self.counters.get(element_id, 0)

    def bump_counter(self, element_id: str) -> int:
        self.counters[element_id] = self.counter(element_id) + 1
        return self.counters[element_id]

    def elements_by_z(self) -> list[Element]:
        return [self.elements[eid] for eid in self.z_order]

    # -- mutations ----------------------------------------------------------

    def add_asset(self, asset: ImageAsset) -> str:
        self.assets.setdefault(asset.id, asset)
        return asset.id

    def create_element(self, kind: str, rect: Rect, payload) -> str:
        if kind not in ELEMENT_KINDS:
            raise MalformedPayloadError(f"unknown element kind {kind!r}")
        if isinstance(payload, dict):
            payload = payload_from_dict(kind, payload)
        if not isinstance(payload, _PAYLOAD_TYPES[kind]):
            raise MalformedPayloadError(f"payload does not match kind {kind!r}")
        element_id = f"e{self.next_element_num}"
        self.next_element_num += 1
        top_z = max((e.z for e in self.elements.values()), default=0)
        self.elements[element_id] = Element(element_id, kind, rect, top_z + 1, payload)
        self.z_order.append(element_id)
        self.revision += 1
        return element_id

    def update_geometry(self, element_id: str, rect: Rect) -> bool:
        el = self.element(element_id)
        if el.rect == rect:
            return False
        el.rect = rect
        self.revision += 1
        return True

    def delete_element(self, element_id: str) -> None:
        self.element(element_id)
        del self.elements[element_id]
        self.z_order.remove(element_id)
        self.counters.pop(element_id, None)
        self.revision += 1

    def snapshot(self, element_id: str, cause: str, timestamp: int) -> HistoryEntry:
        el = self.element(element_id)
        prior_asset = el.payload.asset_id if isinstance(el.payload, ImagePayload) else None
        entry = HistoryEntry(
            element_id=element_id,
            prior_asset=prior_asset,
            payload_snapshot=el.payload.to_dict(),
            cause=cause,
            timestamp=timestamp,
        )
        if self.history and timestamp < self.history[-1].timestamp:
            raise MalformedPayloadError("history timestamps must be monotone")
        self.history.append(entry)
        return entry

    def restore(self, entry: HistoryEntry, timestamp: int) -> None:
        """Reinstate the snapshotted payload bit-exactly. Never regenerates."""
        if entry.element_id not in self.elements:
            raise DanglingAssetError(f"restore target {entry.element_id!r} is gone")
        if entry.prior_asset is not None and entry.prior_asset not in self.assets:
            raise DanglingAssetError(f"restore needs missing asset {entry.prior_asset!r}")
        el = self.elements[entry.element_id]
        self.snapshot(entry.element_id, "restore", timestamp)
        el.payload = payload_from_dict(el.kind, entry.payload_snapshot)
        self.revision += 1

    # -- serialization ------------------------------------------------------

    def to_dict(self, include_rasters: bool = True) -> dict:
        return {
            "version": self.version,
            "elements": {eid: el.to_dict() for eid, el in self.elements.items()},
            "z_order": list(self.z_order),
            "assets": {aid: a.to_dict(include_raster=include_rasters) for aid, a in self.assets.items()},
            "history": [h.to_dict() for h in self.history],
            "counters": dict(self.counters),
            "revision": self.revision,
            "next_element_num": self.next_element_num,
            "seed_rolls": self.seed_rolls,
        }

    def serialize(self) -> bytes:
        return canonical_json_bytes(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict, rasters: dict[str, bytes] | None = None) -> "CanvasDocument":
        try:
            version = d["version"]
        except (KeyError, TypeError) as exc:
            raise CorruptPayloadError("document payload missing version") from exc
        if version != DOCUMENT_VERSION:
            raise VersionMismatchError(
                f"document version {version} != {DOCUMENT_VERSION}; re-export from a matching runtime"
            )
        doc = cls()
        try:
            for eid, ed in d["elements"].items():
                doc.elements[eid] = Element.from_dict(ed)
            doc.z_order = list(d["z_order"])
            for aid, ad in d["assets"].items():
                raster = rasters.get(aid) if rasters is not None else None
                doc.assets[aid] = ImageAsset.from_dict(ad, raster=raster)
            doc.history = [HistoryEntry.from_dict(h) for h in d["history"]]
            doc.counters = dict(d.get("counters", {}))
            doc.revision = d.get("revision", 0)
            doc.next_element_num = d.get("next_element_num", len(doc.elements) + 1)
            doc.seed_rolls = d.get("seed_rolls", 0)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptPayloadError(f"bad document payload: {exc}") from exc
        doc.validate()
        return doc

    @classmethod
    def deserialize(cls, data: bytes) -> "CanvasDocument":
        try:
            payload = json.loads(data.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CorruptPayloadError(f"unparseable document bytes: {exc}") from exc
        if not isinstance(payload, dict):
            raise CorruptPayloadError("document payload is not an object")
        return cls.from_dict(payload)

    # -- invariants ---------------------------------------------------------

    def referenced_asset_ids(self) -> set[str]:
        refs: set[str] = set()
        for el in self.elements.values():
            p = el.payload
            if isinstance(p, ImagePayload) and p.asset_id:
                refs.add(p.asset_id)
            elif isinstance(p, LensPayload) and p.last_result:
                refs.add(p.last_result)
            elif isinstance(p, ContainerPayload):
                if p.grounding.asset_id:
                    refs.add(p.grounding.asset_id)
                for cell in p.cells:
                    if cell and "asset" in cell:
                        refs.add(cell["asset"])
            elif isinstance(p, PalettePayload):
                for item in p.items:
                    if item.get("kind") == "asset":
                        refs.add(item["asset_id"])
        for h in self.history:
            if h.prior_asset:
                refs.add(h.prior_asset)
        return refs

    def validate(self) -> None:
        if sorted(self.z_order) != sorted(self.elements.keys()):
            raise MalformedPayloadError("z_order is not a permutation of element ids")
        zs = [e.z for e in self.elements.values()]
        if len(set(zs)) != len(zs):
            raise MalformedPayloadError("duplicate z values")
        order = [self.elements[eid].z for eid in self.z_order]
        if order != sorted(order):
            raise MalformedPayloadError("z_order not ascending by z")
        missing = self.referenced_asset_ids() - set(self.assets)
        if missing:
            raise DanglingAssetError(f"dangling asset ids: {sorted(missing)}")
        for i in range(1, len(self.history)):
            if self.history[i].timestamp < self.history[i - 1].timestamp:
                raise MalformedPayloadError("history timestamps regress")


def canonical_json_bytes(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")
