"""The canvas runtime: one document, one command queue, debounced generation.

Every mutation runs on the holder's thread under a single lock (the
"command queue"); adapter work happens in job execution and its results
re-enter through the scheduler's staleness filter. Each top-level mutation
emits one docPatch event diffed against the pre-command state.
"""

from __future__ import annotations

import dataclasses
import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable

from . import brushes, containers, fragment_ops, lenses, palettes
from .assets import ImageAsset, Provenance
from .config import RuntimeConfig
from .controls import GenerationControls, GenerationRequest
from .document import (
    BrushPayload,
    CanvasDocument,
    ContainerPayload,
    FragmentCardPayload,
    Grounding,
    ImagePayload,
    LensPayload,
    PalettePayload,
)
from .errors import (
    DanglingAssetError,
    GenCanvasError,
    MalformedPayloadError,
    UnsupportedKindError,
    UnsupportedPairError,
)
from .fragments import Fragment, FragmentEdit, FragmentRow
from .geometry import Rect
from .lexicon import load_lexicon
from .protocol import Event, diff_documents
from .scheduler import EDIT_COALESCE, IMMEDIATE, LENS_IDLE, Job, Scheduler, VirtualClock


@dataclass
class DropEffect:
    effect: str
    details: dict = field(default_factory=dict)


class CanvasRuntime:
    def __init__(self, config: RuntimeConfig | None = None, language=None, image=None, clock=None):
        self.config = config or RuntimeConfig()
        self.lexicon = load_lexicon()
        if language is None or image is None:
            language, image = self._build_adapters(language, image)
        self.language = language
        self.image = image
        self.clock = clock or VirtualClock()
        self.doc = CanvasDocument()
        self.scheduler = Scheduler(
            self.clock,
            counter_of=lambda target: self.doc.counter(target),
            windows_ms=self.config.windows_ms(),
            max_inflight=self.config.max_inflight,
        )
        self.events: list[Event] = []
        self.lock = threading.RLock()
        self._subscribers: list[Callable[[Event], None]] = []
        self._event_seq = 0
        self._request_id: str | None = None
        self._patch_depth = 0
        self._patch_before: dict | None = None
        self._pending_edits: dict[str, list[FragmentEdit]] = {}
        self._pending_edit_jobs: dict[str, int] = {}

    def _build_adapters(self, language, image):
        if self.config.adapter == "remote":
            from .remote import RemoteImageAdapter, RemoteLanguageAdapter

            language = language or RemoteLanguageAdapter(
                self.config.language_url,
                model=self.config.language_model,
                token_env=self.config.language_token_env,
            )
            image = image or RemoteImageAdapter(
                self.config.image_url, token_env=self.config.image_token_env
            )
        else:
            from .adapters import MockImageAdapter, MockLanguageAdapter

            size = (self.config.mock_image_size, self.config.mock_image_size)
            language = language or MockLanguageAdapter(self.lexicon)
            image = image or MockImageAdapter(self.lexicon, default_size=size)
        return language, image

    # -- events and patches ---------------------------------------------------

    def subscribe(self, callback: Callable[[Event], None]) -> Callable[[], None]:
        self._subscribers.append(callback)

        def unsubscribe():
            if callback in self._subscribers:
                self._subscribers.remove(callback)

        return unsubscribe

    def _emit(self, kind: str, payload: dict) -> None:
        event = Event(kind, payload, self.doc.revision, self._request_id, self._event_seq)
        self._event_seq += 1
        self.events.append(event)
        for sub in list(self._subscribers):
            sub(event)

    @contextmanager
    def _patched(self):
        """Diff the document around a mutation and emit one docPatch. On an
        exception the document is rolled back so failed commands never leave
        partial state."""
        if self._patch_depth == 0:
            self._patch_before = self.doc.to_dict()
        self._patch_depth += 1
        try:
            yield
        except BaseException:
            self._patch_depth -= 1
            if self._patch_depth == 0:
                before = self._patch_before
                self._patch_before = None
                if self.doc.to_dict() != before:
                    self.doc = CanvasDocument.from_dict(before)
            raise
        else:
            self._patch_depth -= 1
            if self._patch_depth == 0:
                before = self._patch_before
                self._patch_before = None
                patch = diff_documents(before, self.doc.to_dict())
                self.doc.validate()
                self._emit("docPatch", {"patch": patch})

    # -- time -----------------------------------------------------------------

    def now(self) -> int:
        return self.clock.now_ms()

    def pump(self) -> None:
        """Fire and settle everything due at the current time."""
        while True:
            due = self.scheduler.due_jobs()
            if not due:
                return
            for job in due:
                self._fire(job)

    def advance(self, ms: int) -> None:
        """Move a virtual clock forward, firing timers on the way."""
        deadline = self.clock.now_ms() + ms
        while True:
            self.pump()
            nxt = self.scheduler.next_fire_time()
            if nxt is None or nxt > deadline:
                break
            if nxt > self.clock.now_ms():
                self.clock.set(nxt)
        if deadline > self.clock.now_ms():
            self.clock.set(deadline)
        self.pump()

    def wait_idle(self, max_steps: int = 10_000) -> None:
        steps = 0
        self.pump()
        while not self.scheduler.idle() and steps < max_steps:
            nxt = self.scheduler.next_fire_time()
            if nxt is not None and nxt > self.clock.now_ms():
                self.clock.set(nxt)
            self.pump()
            steps += 1

    def _roll_seed(self) -> int:
        self.doc.seed_rolls += 1
        return self.config.base_seed + 7919 * self.doc.seed_rolls

    # -- element lifecycle ------------------------------------------------------

    def create_element(self, kind: str, rect: Rect, init: dict | None = None) -> str:
        init = dict(init or {})
        with self._patched():
            if kind == "image":
                asset_id = init.get("asset_id")
                if asset_id is not None and asset_id not in self.doc.assets:
                    raise DanglingAssetError(f"init asset {asset_id!r} not found")
                payload = ImagePayload(asset_id=asset_id, prompt=init.get("prompt", ""))
                eid = self.doc.create_element(kind, rect, payload)
                if asset_id is None and payload.prompt.strip():
                    seed = init.get("seed", self._roll_seed())
                    request = GenerationRequest(
                        prompt=payload.prompt,
                        controls=GenerationControls(op_kind="txt2img"),
                        seed=seed,
                    )
                    self.scheduler.submit("image-create", eid, IMMEDIATE, request)
                    self.pump()
            elif kind == "lens":
                payload = LensPayload(
                    prompt=init.get("prompt", ""), seed=init.get("seed", self._roll_seed())
                )
                eid = self.doc.create_element(kind, rect, payload)
                self._queue_lens(eid, require=False)
            elif kind == "container":
                eid = self.doc.create_element(kind, rect, ContainerPayload(prompt=init.get("prompt", "")))
            elif kind == "brush":
                payload = BrushPayload(prompt=init.get("prompt", ""), mode=init.get("mode", "style"))
                eid = self.doc.create_element(kind, rect, payload)
            elif kind == "palette":
                eid = self.doc.create_element(kind, rect, PalettePayload(title=init.get("title", "")))
            elif kind == "fragment":
                try:
                    fragment = Fragment.from_dict(init["fragment"])
                except KeyError as exc:
                    raise MalformedPayloadError("fragment element needs init.fragment") from exc
                eid = self.doc.create_element(kind, rect, FragmentCardPayload(fragment=fragment))
            else:
                raise MalformedPayloadError(f"unknown element kind {kind!r}")
            return eid

    def update_geometry(self, element_id: str, rect: Rect) -> bool:
        with self._patched():
            el = self.doc.element(element_id)
            old_rect = el.rect
            changed = self.doc.update_geometry(element_id, rect)
            if changed and el.kind in ("image", "lens"):
                affected = [element_id] if el.kind == "lens" else []
                affected += lenses.lenses_affected_by(self.doc, element_id, old_rect, rect)
                for lens_id in dict.fromkeys(affected):
                    self._queue_lens(lens_id, require=False)
            return changed

    def delete_element(self, element_id: str) -> None:
        with self._patched():
            self.doc.element(element_id)
            self.scheduler.cancel_target(element_id)
            self._pending_edits.pop(element_id, None)
            self._pending_edit_jobs.pop(element_id, None)
            self.doc.delete_element(element_id)

    def set_prompt(self, element_id: str, prompt: str) -> None:
        with self._patched():
            el = self.doc.element(element_id)
            if el.kind == "lens":
                self.doc.snapshot(element_id, "set-prompt", self.now())
                el.payload.prompt = prompt
                self.doc.revision += 1
                self._queue_lens(element_id, require=False)
            elif el.kind == "container":
                self.doc.snapshot(element_id, "set-prompt", self.now())
                el.payload.prompt = prompt
                self.doc.revision += 1
            elif el.kind == "brush":
                self.doc.snapshot(element_id, "set-prompt", self.now())
                if prompt.strip():
                    brushes.fill_brush_from_text(self.doc, element_id, prompt, el.payload.mode)
                else:
                    el.payload.prompt = ""
                    el.payload.applications = {}
                    self.doc.revision += 1
            elif el.kind == "palette":
                el.payload.title = prompt
                self.doc.revision += 1
            else:
                raise UnsupportedKindError(f"{el.kind} elements take no direct prompt")

    # -- drag and drop ----------------------------------------------------------

    def drop_on(self, source_id: str, target_id: str) -> DropEffect:
        with self._patched():
            source = self.doc.element(source_id)
            target = self.doc.element(target_id)
            if source_id == target_id:
                raise UnsupportedPairError(source.kind, target.kind)
            pair = (source.kind, target.kind)

            if target.kind == "palette":
                index = self._add_to_palette(target_id, source_id)
                return DropEffect("stored", {"index": index})
            if pair == ("fragment", "image"):
                job_id = self.apply_fragment_edit(
                    target_id, FragmentEdit("add", source.payload.fragment)
                )
                return DropEffect("fragment-added", {"job_id": job_id})
            if pair in (("image", "container"), ("fragment", "container")):
                if source.kind == "image":
                    if not source.payload.asset_id:
                        raise UnsupportedPairError(*pair)
                    grounding = Grounding(source="asset", asset_id=source.payload.asset_id)
                else:
                    grounding = Grounding(source="fragment", fragment=source.payload.fragment)
                self.doc.snapshot(target_id, "ground", self.now())
                containers.ground_container(self.doc, target_id, grounding)
                return DropEffect("grounded", {"source": grounding.source})
            if pair in (("image", "lens"), ("lens", "image")):
                lens_id = target_id if target.kind == "lens" else source_id
                job = self._queue_lens(lens_id, require=True)
                return DropEffect("lens-scheduled", {"job_id": job.id if job else None})
            if pair == ("brush", "brush"):
                new_id = self.combine_brushes(source_id, target_id)
                return DropEffect("brushes-combined", {"brush_id": new_id})
            if pair == ("image", "brush"):
                if not source.payload.asset_id:
                    raise UnsupportedPairError(*pair)
                extracted = self.fill_brush_from_example(
                    target_id, source.payload.asset_id, None, target.payload.mode
                )
                return DropEffect("brush-filled", {"prompt": extracted})
            raise UnsupportedPairError(*pair)

    # -- fragments ----------------------------------------------------------------

    def reveal_fragments(self, element_id: str) -> FragmentRow:
        with self._patched():
            return fragment_ops.reveal_fragments(self.doc, element_id, self.language)

    def extend_fragment_types(self, element_id: str) -> list[Fragment]:
        with self._patched():
            return fragment_ops.extend_fragment_types(self.doc, element_id, self.language)

    def vary_fragment(self, element_id: str, ftype: str, k: int = 3) -> list[Fragment]:
        with self._patched():
            return fragment_ops.vary_fragment(self.doc, element_id, ftype, k, self.language)

    def apply_fragment_edit(self, element_id: str, edit: FragmentEdit) -> int:
        """Recompose the element's prompt and queue a debounced regeneration;
        edits inside one window coalesce into a single job."""
        with self._patched():
            el = self.doc.element(element_id)
            if el.kind != "image":
                raise MalformedPayloadError(f"{element_id} is not an image element")
            base_prompt = fragment_ops.element_prompt(self.doc, el, self.language)
            edits = list(self._pending_edits.get(element_id, ())) + [edit]
            new_prompt = self.language.compose(base_prompt, edits)

            asset = self.doc.assets.get(el.payload.asset_id) if el.payload.asset_id else None
            if asset is not None and asset.provenance is not None:
                seed = asset.provenance.seed  # steering keeps the seed
            else:
                seed = self.config.base_seed
            refs = (el.payload.asset_id,) if el.payload.asset_id else ()
            # The edited fragment set fully states the intent; keep the
            # reference for content grounding only (no style copy-through).
            request = GenerationRequest(
                prompt=new_prompt,
                reference_assets=refs,
                controls=GenerationControls(
                    content_weight=0.7,
                    style_weight=0.3,
                    op_kind="img2img" if refs else "txt2img",
                ),
                seed=seed,
            )
            job = self.scheduler.submit(
                "image-edit",
                element_id,
                EDIT_COALESCE,
                request,
                payload={"edits": [e.to_dict() for e in edits]},
            )
            self._pending_edits[element_id] = edits
            self._pending_edit_jobs[element_id] = job.id
            return job.id

    # -- lenses ---------------------------------------------------------------------

    def covered_elements(self, lens_id: str) -> list[str]:
        return lenses.covered_elements(self.doc, lens_id)

    def build_composition(self, lens_id: str):
        return lenses.build_composition(self.doc, lens_id, self.language)

    def regenerate_lens(self, lens_id: str) -> int:
        with self._patched():
            job = self._queue_lens(lens_id, require=True)
            return job.id

    def _queue_lens(self, lens_id: str, require: bool) -> Job | None:
        """Debounced lens job; composition is rebuilt on each submit so the
        fired job reflects the final geometry of the burst."""
        try:
            request = lenses.lens_request(self.doc, lens_id, self.language)
        except GenCanvasError:
            if require:
                raise
            return None
        job = self.scheduler.submit("lens", lens_id, LENS_IDLE, request)
        lens = self.doc.element(lens_id)
        if lens.payload.pending_job != job.id:
            lens.payload.pending_job = job.id
            self.doc.revision += 1
        return job

    def set_lens_fade(self, lens_id: str, faded: bool) -> None:
        """UI hover mirror; never queues generation."""
        with self._patched():
            lens = self.doc.element(lens_id)
            if lens.kind != "lens":
                raise MalformedPayloadError(f"{lens_id} is not a lens")
            if lens.payload.faded != faded:
                lens.payload.faded = faded
                self.doc.revision += 1

    def resolve_lens_stack(self, region: Rect) -> list[str]:
        return lenses.resolve_lens_stack(self.doc, region)

    # -- containers --------------------------------------------------------------------

    def ground_container(self, container_id: str, grounding: Grounding) -> None:
        with self._patched():
            self.doc.snapshot(container_id, "ground", self.now())
            containers.ground_container(self.doc, container_id, grounding)

    def generate_container(self, container_id: str, base_seed: int | None = None) -> int:
        with self._patched():
            el = self.doc.element(container_id)
            if el.kind != "container":
                raise MalformedPayloadError(f"{container_id} is not a container")
            containers.check_generatable(el.payload)
            if base_seed is None:
                base_seed = self._roll_seed()
            request = containers.container_request(el.payload, base_seed)
            job = self.scheduler.submit(
                "container", container_id, IMMEDIATE, request, payload={"base_seed": base_seed}
            )
            self.pump()
            return job.id

    def adopt_cell(self, container_id: str, cell_index: int, rect: Rect) -> str:
        with self._patched():
            kind, payload = containers.cell_payload(self.doc, container_id, cell_index)
            return self.doc.create_element(kind, rect, payload)

    # -- brushes -----------------------------------------------------------------------

    def fill_brush_from_text(self, brush_id: str, prompt: str, mode: str = "style") -> None:
        with self._patched():
            self.doc.snapshot(brush_id, "fill-brush", self.now())
            brushes.fill_brush_from_text(self.doc, brush_id, prompt, mode)

    def fill_brush_from_example(
        self, brush_id: str, asset_id: str, region: Rect | None = None, mode: str = "style"
    ) -> str:
        with self._patched():
            self.doc.snapshot(brush_id, "fill-brush", self.now())
            return brushes.fill_brush_from_example(
                self.doc, brush_id, asset_id, region, mode, self.language
            )

    def apply_brush(self, brush_id: str, target_id: str, stroke: brushes.Stroke) -> int:
        with self._patched():
            brush = self.doc.element(brush_id)
            if brush.kind != "brush":
                raise MalformedPayloadError(f"{brush_id} is not a brush")
            payload = brushes.require_filled(brush)
            target = self.doc.element(target_id)
            if target.kind != "image" or not target.payload.asset_id:
                raise MalformedPayloadError(f"{target_id} is not a generated image element")
            asset = self.doc.asset(target.payload.asset_id)

            points = brushes.resample_stroke(stroke, asset.width, asset.height)
            mask = self.image.segment(asset, points)  # segmentation-empty propagates, no job
            x0, y0, x1, y1 = _mask_bbox(mask)
            described = self.language.extract(
                asset, Rect(x0, y0, max(1, x1 - x0), max(1, y1 - y0)), "content"
            )
            combined = self.language.merge([payload.prompt, described])

            applications = brushes.bump_applications(payload, target_id)
            self.doc.revision += 1
            seed = asset.provenance.seed if asset.provenance else self.config.base_seed
            request = GenerationRequest(
                prompt=combined,
                reference_assets=(asset.id,),
                mask=mask,
                controls=brushes.brush_controls(payload.mode, applications),
                seed=seed,
            )
            job = self.scheduler.submit(
                "brush", target_id, IMMEDIATE, request, payload={"brush_id": brush_id}
            )
            self.pump()
            return job.id

    def combine_brushes(self, brush_a: str, brush_b: str) -> str:
        with self._patched():
            a = self.doc.element(brush_a)
            b = self.doc.element(brush_b)
            if a.kind != "brush" or b.kind != "brush":
                raise MalformedPayloadError("combine needs two brushes")
            pa = brushes.require_filled(a)
            pb = brushes.require_filled(b)
            prompt = brushes.combined_prompt_tokens(pa.prompt, pb.prompt)
            mode = "style" if "style" in (pa.mode, pb.mode) else "content"
            rect = Rect(a.rect.x + 16, a.rect.y + 16, a.rect.w, a.rect.h)
            return self.doc.create_element("brush", rect, BrushPayload(prompt=prompt, mode=mode))

    def resample_stroke(self, stroke: brushes.Stroke, width: int, height: int):
        return brushes.resample_stroke(stroke, width, height)

    # -- palettes ------------------------------------------------------------------------

    def _add_to_palette(self, palette_id: str, element_id: str) -> int:
        self.doc.snapshot(palette_id, "palette-add", self.now())
        return palettes.add_to_palette(self.doc, palette_id, element_id)

    def add_to_palette(self, palette_id: str, element_id: str) -> int:
        with self._patched():
            return self._add_to_palette(palette_id, element_id)

    def take_from_palette(self, palette_id: str, index: int, rect: Rect) -> str:
        with self._patched():
            item = palettes.palette_item(self.doc, palette_id, index)
            seed = self._roll_seed() if item.get("kind") == "lens" else None
            kind, payload = palettes.item_to_payload(item, lens_seed=seed)
            return self.doc.create_element(kind, rect, payload)

    def generate_palette(self, prompt: str, kind: str, k: int, rect: Rect | None = None) -> str:
        with self._patched():
            items = palettes.generated_items(self.language, self.lexicon, prompt, kind, k)
            payload = PalettePayload(title=prompt, items=items, generated_from=prompt)
            return self.doc.create_element(
                "palette", rect or Rect(0, 0, 200, 150), payload
            )

    # -- history ----------------------------------------------------------------------------

    def snapshot_element(self, element_id: str, cause: str = "snapshot"):
        with self._patched():
            return self.doc.snapshot(element_id, cause, self.now())

    def restore_history(self, entry_index: int) -> None:
        with self._patched():
            try:
                entry = self.doc.history[entry_index]
            except IndexError:
                raise MalformedPayloadError(f"no history entry {entry_index}") from None
            self.scheduler.cancel_target(entry.element_id)
            self._pending_edits.pop(entry.element_id, None)
            self._pending_edit_jobs.pop(entry.element_id, None)
            self.doc.restore(entry, self.now())

    # -- job execution ------------------------------------------------------------------------

    def _fire(self, job: Job) -> None:
        if job.kind == "image-edit" and self._pending_edit_jobs.get(job.target) == job.id:
            self._pending_edits.pop(job.target, None)
            self._pending_edit_jobs.pop(job.target, None)
        self._emit(
            "generationStarted",
            {"job_id": job.id, "target": job.target, "kind": job.kind},
        )
        outcome = self._execute(job)
        status = self.scheduler.on_result(job)
        if status == "discarded" or job.target not in self.doc.elements:
            self._emit(
                "generationDiscarded",
                {"job_id": job.id, "target": job.target, "reason": "stale"},
            )
            return
        if not outcome["ok"]:
            self._emit(
                "error",
                {
                    "code": outcome["code"],
                    "message": outcome["message"],
                    "job_id": job.id,
                    "target": job.target,
                },
            )
            return
        with self._patched():
            self._apply(job, outcome)
        self._emit(
            "generationCompleted",
            {
                "job_id": job.id,
                "target": job.target,
                "kind": job.kind,
                "assets": outcome.get("asset_ids", []),
            },
        )

    def _execute(self, job: Job) -> dict:
        try:
            references = [
                self.doc.assets[aid]
                for aid in job.request.reference_assets
                if aid in self.doc.assets
            ]
            if job.kind in ("image-create", "image-edit", "lens"):
                asset = self.image.generate(job.request, references)
                return {"ok": True, "asset": asset, "asset_ids": [asset.id]}
            if job.kind == "brush":
                asset = self.image.inpaint(job.request, references)
                return {"ok": True, "asset": asset, "asset_ids": [asset.id]}
            if job.kind == "container":
                return self._execute_container(job, references)
            raise MalformedPayloadError(f"unknown job kind {job.kind!r}")
        except GenCanvasError as exc:
            return {"ok": False, "code": exc.code, "message": str(exc)}
        except Exception as exc:  # adapter bugs surface as job errors
            return {"ok": False, "code": "adapter-failure", "message": str(exc)}

    def _execute_container(self, job: Job, references: list[ImageAsset]) -> dict:
        el = self.doc.element(job.target)
        payload: ContainerPayload = el.payload
        if payload.grounding.source == "fragment":
            fragments = containers.derive_cell_fragments(payload, self.language)
            return {"ok": True, "fragments": fragments, "asset_ids": []}
        prompts = containers.derive_cell_prompts(
            payload, self.language, lambda aid: self.language.describe(self.doc.asset(aid))
        )
        assets = []
        for i, prompt in enumerate(prompts):
            request = GenerationRequest(
                prompt=prompt,
                reference_assets=job.request.reference_assets,
                controls=job.request.controls,
                seed=job.request.seed + i,
            )
            assets.append((self.image.generate(request, references), request))
        return {
            "ok": True,
            "cells": assets,
            "asset_ids": [a.id for a, _req in assets],
        }

    def _with_provenance(
        self, asset: ImageAsset, request: GenerationRequest, fragments: tuple, parents: tuple
    ) -> ImageAsset:
        provenance = Provenance(
            prompt=request.prompt,
            fragments=fragments,
            parents=parents,
            seed=request.seed,
            controls=request.controls,
            adapter_id=self.image.id,
            created_at=self.now(),
        )
        return dataclasses.replace(asset, provenance=provenance)

    def _apply(self, job: Job, outcome: dict) -> None:
        el = self.doc.element(job.target)
        now = self.now()
        if job.kind in ("image-create", "image-edit", "brush"):
            prior = el.payload.asset_id
            fragments = tuple(self.language.decompose(job.request.prompt)) if job.request.prompt.strip() else ()
            asset = self._with_provenance(
                outcome["asset"], job.request, fragments, (prior,) if prior else ()
            )
            self.doc.snapshot(job.target, f"{job.kind}:{job.id}", now)
            self.doc.add_asset(asset)
            el.payload.asset_id = asset.id
            el.payload.fragment_row = None  # stale after regeneration
        elif job.kind == "lens":
            asset = self._with_provenance(
                outcome["asset"], job.request, (), tuple(job.request.reference_assets)
            )
            self.doc.snapshot(job.target, f"lens:{job.id}", now)
            self.doc.add_asset(asset)
            el.payload.last_result = asset.id
            el.payload.pending_job = None
            for upper in lenses.lenses_affected_by(self.doc, job.target, el.rect):
                self._queue_lens(upper, require=False)
        elif job.kind == "container":
            self.doc.snapshot(job.target, f"container:{job.id}", now)
            base_seed = job.payload["base_seed"]
            if "fragments" in outcome:
                containers.fill_cells_with_fragments(el.payload, outcome["fragments"], base_seed)
            else:
                parents = tuple(job.request.reference_assets)
                asset_ids = []
                for asset, request in outcome["cells"]:
                    fragments = tuple(self.language.decompose(request.prompt))
                    stamped = self._with_provenance(asset, request, fragments, parents)
                    self.doc.add_asset(stamped)
                    asset_ids.append(stamped.id)
                containers.fill_cells_with_assets(el.payload, asset_ids, base_seed)
        else:
            raise MalformedPayloadError(f"unknown job kind {job.kind!r}")
        self.doc.bump_counter(job.target)
        self.doc.revision += 1


def _mask_bbox(mask) -> tuple[int, int, int, int]:
    xs0, ys0, xs1, ys1 = mask.width, mask.height, 0, 0
    for y in range(mask.height):
        row_start = y * mask.width
        row = mask.bits[row_start : row_start + mask.width]
        left = row.find(1)
        if left < 0:
            continue
        right = len(row) - row[::-1].find(1)
        xs0 = min(xs0, left)
        xs1 = max(xs1, right)
        ys0 = min(ys0, y)
        ys1 = max(ys1, y + 1)
    if xs1 <= xs0:
        return (0, 0, 0, 0)
    return (xs0, ys0, xs1, ys1)
