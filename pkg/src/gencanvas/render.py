"""Inspection output for documents: a delimited element table and a rendered
canvas figure."""

from __future__ import annotations

import io
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.patches as mpatches
import matplotlib.pyplot as plt
import numpy as np

from .document import (
    BrushPayload,
    CanvasDocument,
    ContainerPayload,
    FragmentCardPayload,
    ImagePayload,
    LensPayload,
    PalettePayload,
)

KIND_COLORS = {
    "image": "#4878d0",
    "fragment": "#ee854a",
    "lens": "#6acc64",
    "container": "#d65f5f",
    "brush": "#956cb4",
    "palette": "#8c613c",
}

TABLE_COLUMNS = ("id", "kind", "x", "y", "w", "h", "z", "summary")


def element_summary(doc: CanvasDocument, element) -> str:
    p = element.payload
    if isinstance(p, ImagePayload):
        if p.asset_id:
            asset = doc.assets[p.asset_id]
            prompt = asset.provenance.prompt if asset.provenance else p.prompt
            return f"asset={p.asset_id[:8]} prompt={prompt!r}"
        return f"pending prompt={p.prompt!r}"
    if isinstance(p, FragmentCardPayload):
        return f"[{p.fragment.ftype}, {p.fragment.value}]"
    if isinstance(p, LensPayload):
        state = "generated" if p.last_result else "blank"
        return f"prompt={p.prompt!r} ({state})"
    if isinstance(p, ContainerPayload):
        filled = sum(1 for c in p.cells if c)
        return f"prompt={p.prompt!r} grounding={p.grounding.source} cells={filled}/4"
    if isinstance(p, BrushPayload):
        return f"prompt={p.prompt!r} mode={p.mode}" if p.filled else "unfilled"
    if isinstance(p, PalettePayload):
        return f"title={p.title!r} items={len(p.items)}"
    return ""


def element_rows(doc: CanvasDocument) -> list[dict]:
    rows = []
    for el in doc.elements_by_z():
        rows.append(
            {
                "id": el.id,
                "kind": el.kind,
                "x": el.rect.x,
                "y": el.rect.y,
                "w": el.rect.w,
                "h": el.rect.h,
                "z": el.z,
                "summary": element_summary(doc, el),
            }
        )
    return rows


def write_delimited(doc: CanvasDocument, fh, sep: str = "\t") -> None:
    fh.write(sep.join(TABLE_COLUMNS) + "\n")
    for row in element_rows(doc):
        fh.write(sep.join(str(row[c]) for c in TABLE_COLUMNS) + "\n")


def delimited_text(doc: CanvasDocument, sep: str = "\t") -> str:
    buf = io.StringIO()
    write_delimited(doc, buf, sep)
    return buf.getvalue()


def render_document(doc: CanvasDocument, out_path: str | Path, dpi: int = 100) -> Path:
    """Paint the canvas (ascending z) to an image file: rasters for image
    elements and lens results, outlined boxes for the instruments."""
    xs = [0.0, 640.0]
    ys = [0.0, 480.0]
    for el in doc.elements.values():
        xs += [el.rect.x, el.rect.x2]
        ys += [el.rect.y, el.rect.y2]
    pad = 20
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad

    fig, ax = plt.subplots(figsize=((x1 - x0) / dpi, (y1 - y0) / dpi), dpi=dpi)
    ax.set_xlim(x0, x1)
    ax.set_ylim(y1, y0)  # y grows down
    ax.set_aspect("equal")
    ax.axis("off")

    for el in doc.elements_by_z():
        color = KIND_COLORS.get(el.kind, "#444444")
        r = el.rect
        asset_id = None
        if isinstance(el.payload, ImagePayload):
            asset_id = el.payload.asset_id
        elif isinstance(el.payload, LensPayload):
            asset_id = el.payload.last_result
        if asset_id and asset_id in doc.assets:
            asset = doc.assets[asset_id]
            pixels = np.frombuffer(asset.raster, dtype=np.uint8).reshape(
                asset.height, asset.width, 4
            )
            alpha = 0.45 if el.kind == "lens" else 1.0
            ax.imshow(
                pixels, extent=(r.x, r.x2, r.y2, r.y), interpolation="nearest", alpha=alpha
            )
        ax.add_patch(
            mpatches.Rectangle(
                (r.x, r.y),
                r.w,
                r.h,
                fill=asset_id is None,
                facecolor=color,
                alpha=0.25 if asset_id is None else 1.0,
                edgecolor=color,
                linewidth=1.5,
            )
        )
        label = f"{el.id}:{el.kind}"
        ax.text(
            r.x + 2,
            r.y + 10,
            label,
            fontsize=7,
            color="#202020",
            family="monospace",
        )
        if isinstance(el.payload, ContainerPayload):
            ax.plot([r.x + r.w / 2] * 2, [r.y, r.y2], color=color, linewidth=0.8)
            ax.plot([r.x, r.x2], [r.y + r.h / 2] * 2, color=color, linewidth=0.8)

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out, bbox_inches="tight")
    plt.close(fig)
    return out
