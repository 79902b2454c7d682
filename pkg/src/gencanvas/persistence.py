"""Document files: one canonical JSON file plus an adjacent directory of
PNG rasters named by content hash."""

from __future__ import annotations

import json
import os
from pathlib import Path

from .assets import asset_content_id
from .document import CanvasDocument, canonical_json_bytes
from .errors import CorruptPayloadError, DanglingAssetError
from .pngio import decode_png, encode_png


def asset_dir_for(path: str | Path) -> Path:
    p = Path(path)
    return p.parent / (p.stem + ".assets")


def save_document(doc: CanvasDocument, path: str | Path) -> Path:
    """Write doc JSON and asset PNGs. Asset files are content-addressed, so
    existing files are left untouched."""
    p = Path(path)
    assets = asset_dir_for(p)
    doc_dict = doc.to_dict(include_rasters=False)
    for aid, entry in doc_dict["assets"].items():
        entry["raster_file"] = f"{aid}.png"
    p.parent.mkdir(parents=True, exist_ok=True)
    if doc_dict["assets"]:
        assets.mkdir(parents=True, exist_ok=True)
    for aid, asset in doc.assets.items():
        target = assets / f"{aid}.png"
        if not target.exists():
            target.write_bytes(encode_png(asset.width, asset.height, asset.raster))
    tmp = p.with_suffix(p.suffix + ".tmp")
    tmp.write_bytes(canonical_json_bytes(doc_dict))
    os.replace(tmp, p)
    return p


def load_document(path: str | Path) -> CanvasDocument:
    p = Path(path)
    try:
        payload = json.loads(p.read_text("utf-8"))
    except OSError as exc:
        raise CorruptPayloadError(f"cannot read document {p}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CorruptPayloadError(f"document {p} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise CorruptPayloadError("document payload is not an object")

    assets = asset_dir_for(p)
    rasters: dict[str, bytes] = {}
    for aid, entry in payload.get("assets", {}).items():
        raster_file = entry.pop("raster_file", f"{aid}.png")
        file_path = assets / raster_file
        if not file_path.exists():
            raise DanglingAssetError(f"missing asset file {file_path}")
        width, height, raster = decode_png(file_path.read_bytes())
        if (width, height) != (entry.get("width"), entry.get("height")):
            raise CorruptPayloadError(f"asset {aid} dimensions disagree with its file")
        rasters[aid] = raster

    doc = CanvasDocument.from_dict(payload, rasters=rasters)
    for aid, asset in doc.assets.items():
        if asset_content_id(asset.raster, asset.scene) != aid:
            raise CorruptPayloadError(f"asset {aid} content hash mismatch")
    return doc
