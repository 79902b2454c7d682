"""HTTP-backed adapters: a chat-completions language endpoint and a
stable-diffusion-webui-compatible image endpoint.

Responses are parsed schema-tolerantly (unknown fields ignored, the first
JSON payload in a reply wins). Failures surface as RemoteAdapterError with
reason network | auth | rate-limit | malformed-response, which the runtime
turns into job error outcomes; targets keep their previous asset.
"""

from __future__ import annotations

import base64
import json
import os
import re
from importlib import resources
from typing import Sequence

import httpx

from .assets import ImageAsset, make_asset
from .controls import GenerationRequest
from .document import Grounding
from .errors import RemoteAdapterError
from .fragments import Fragment, FragmentEdit, apply_edits, join_fragments
from .geometry import Rect
from .lexicon import load_lexicon
from .masks import Mask
from .pngio import decode_png, encode_png
from .adapters.base import ImageAdapter, LanguageAdapter

_JSON_BLOB = re.compile(r"[\[{].*[\]}]", re.DOTALL)


def _load_template(name: str) -> str:
    return resources.files("gencanvas.templates").joinpath(f"{name}_v1.txt").read_text("utf-8")


def _first_json(text: str):
    match = _JSON_BLOB.search(text)
    if not match:
        raise RemoteAdapterError("malformed-response", f"no JSON in reply: {text[:120]!r}")
    try:
        return json.loads(match.group(0))
    except json.JSONDecodeError as exc:
        raise RemoteAdapterError("malformed-response", f"bad JSON in reply: {exc}") from exc


def _raise_for(response: httpx.Response) -> None:
    if response.status_code in (401, 403):
        raise RemoteAdapterError("auth", f"endpoint rejected credentials ({response.status_code})")
    if response.status_code == 429:
        raise RemoteAdapterError("rate-limit", "endpoint rate limit hit")
    if response.status_code >= 400:
        raise RemoteAdapterError("network", f"endpoint error {response.status_code}")


class RemoteLanguageAdapter(LanguageAdapter):
    id = "remote"

    def __init__(
        self,
        url: str,
        model: str = "gpt-4o",
        token_env: str = "GENCANVAS_LANGUAGE_TOKEN",
        timeout: float = 60.0,
    ):
        self.url = url.rstrip("/")
        self.model = model
        self.token_env = token_env
        self.timeout = timeout
        self.lexicon = load_lexicon()

    def _chat(self, system: str, user: str) -> str:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        body = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system},
                {"role": "user", "content": user},
            ],
        }
        try:
            response = httpx.post(
                f"{self.url}/chat/completions", json=body, headers=headers, timeout=self.timeout
            )
        except httpx.HTTPError as exc:
            raise RemoteAdapterError("network", str(exc)) from exc
        _raise_for(response)
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, json.JSONDecodeError) as exc:
            raise RemoteAdapterError("malformed-response", str(exc)) from exc

    def _fragments_from(self, raw, origin: str) -> list[Fragment]:
        if not isinstance(raw, list):
            raise RemoteAdapterError("malformed-response", "expected a JSON array of pairs")
        out = []
        for pair in raw:
            if isinstance(pair, (list, tuple)) and len(pair) == 2:
                out.append(Fragment(str(pair[0]), str(pair[1]), origin))
            elif isinstance(pair, dict) and "type" in pair and "value" in pair:
                out.append(Fragment(str(pair["type"]), str(pair["value"]), origin))
        return out

    def decompose(self, prompt: str, max_fragments: int | None = None) -> list[Fragment]:
        system = _load_template("decompose").format(max_fragments=max_fragments or 5)
        raw = _first_json(self._chat(system, prompt))
        fragments = self._fragments_from(raw, "decomposed")
        return fragments[:max_fragments] if max_fragments else fragments

    def vary_values(self, fragment: Fragment, context: str, k: int) -> list[Fragment]:
        if k <= 0:
            return []
        system = _load_template("vary").format(
            ftype=fragment.ftype, value=fragment.value, context=context, k=k
        )
        raw = _first_json(self._chat(system, fragment.value))
        values = [str(v) for v in raw if str(v).strip()] if isinstance(raw, list) else []
        values = [v for v in dict.fromkeys(values) if v != fragment.value][:k]
        return [Fragment(fragment.ftype, v, "suggested") for v in values]

    def suggest_types(
        self, prompt: str, existing: Sequence[Fragment], max_fragments: int = 5
    ) -> list[Fragment]:
        system = _load_template("suggest_types").format(
            prompt=prompt,
            existing=sorted({f.ftype for f in existing}),
            max_fragments=max_fragments,
        )
        raw = _first_json(self._chat(system, prompt))
        present = {f.ftype for f in existing}
        return [f for f in self._fragments_from(raw, "suggested") if f.ftype not in present]

    def compose(self, base_prompt: str, edits: Sequence[FragmentEdit]) -> str:
        # Composition is deterministic string work; the local canonical join
        # keeps round-trip invariants even against a remote model.
        base = self._local_decompose(base_prompt)
        return join_fragments(apply_edits(base, list(edits)), self.lexicon)

    def _local_decompose(self, prompt: str) -> list[Fragment]:
        from .adapters.mock import classify_prompt

        return classify_prompt(self.lexicon, prompt)

    def describe(self, asset: ImageAsset) -> str:
        if asset.provenance and asset.provenance.prompt:
            return asset.provenance.prompt
        system = _load_template("describe")
        return self._chat(system, _image_payload_text(asset)).strip().lower()

    def merge(self, prompts: Sequence[str]) -> str:
        cleaned = [p.strip() for p in prompts if p.strip()]
        if len(cleaned) <= 1:
            return cleaned[0] if cleaned else ""
        return ", ".join(cleaned)

    def extract(self, asset: ImageAsset, region: Rect | None, mode: str) -> str:
        region_note = f" within region {region.to_dict()}" if region else ""
        system = _load_template("extract").format(mode=mode, region_note=region_note)
        return self._chat(system, _image_payload_text(asset)).strip().lower()

    def derive_variant_prompts(self, prompt: str, grounding: Grounding, k: int = 4) -> list[str]:
        system = _load_template("derive").format(
            prompt=prompt, grounding=json.dumps(grounding.to_dict(), sort_keys=True), k=k
        )
        raw = _first_json(self._chat(system, prompt))
        if not isinstance(raw, list):
            raise RemoteAdapterError("malformed-response", "expected a JSON array of prompts")
        prompts = [str(p).strip() for p in raw if str(p).strip()]
        prompts = list(dict.fromkeys(prompts))
        if len(prompts) < k:
            raise RemoteAdapterError("malformed-response", f"needed {k} prompts, got {len(prompts)}")
        return prompts[:k]


def _image_payload_text(asset: ImageAsset) -> str:
    png = encode_png(asset.width, asset.height, asset.raster)
    return json.dumps(
        {"width": asset.width, "height": asset.height, "png_base64": base64.b64encode(png).decode()}
    )


class RemoteImageAdapter(ImageAdapter):
    """stable-diffusion-webui style endpoint; controls map onto per-model
    control weights (content -> edge/depth, style -> reference) and the
    emphasis weight onto prompt-weight syntax."""

    id = "remote"

    def __init__(self, url: str, token_env: str = "GENCANVAS_IMAGE_TOKEN", timeout: float = 300.0):
        self.url = url.rstrip("/")
        self.token_env = token_env
        self.timeout = timeout

    def _post(self, path: str, body: dict) -> dict:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env, "")
        if token:
            headers["Authorization"] = f"Bearer {token}"
        try:
            response = httpx.post(f"{self.url}{path}", json=body, headers=headers, timeout=self.timeout)
        except httpx.HTTPError as exc:
            raise RemoteAdapterError("network", str(exc)) from exc
        _raise_for(response)
        try:
            data = response.json()
        except json.JSONDecodeError as exc:
            raise RemoteAdapterError("malformed-response", str(exc)) from exc
        if not isinstance(data, dict):
            raise RemoteAdapterError("malformed-response", "expected a JSON object")
        return data

    def _weighted_prompt(self, request: GenerationRequest) -> str:
        w = request.controls.emphasis_weight
        if w > 1.0:
            return f"({request.prompt}:{w:.2f})"
        return request.prompt

    def _controlnet_args(self, request: GenerationRequest, references: Sequence[ImageAsset]) -> list[dict]:
        if not references:
            return []
        ref_b64 = base64.b64encode(
            encode_png(references[0].width, references[0].height, references[0].raster)
        ).decode()
        c = request.controls
        return [
            {"module": "canny", "model": "control_canny", "weight": c.content_weight, "image": ref_b64},
            {"module": "depth", "model": "control_depth", "weight": c.content_weight, "image": ref_b64},
            {"module": "reference_only", "model": "reference", "weight": c.style_weight, "image": ref_b64},
        ]

    def _decode_asset(self, data: dict) -> ImageAsset:
        images = data.get("images") or []
        if not images:
            raise RemoteAdapterError("malformed-response", "no images in reply")
        raw = images[0]
        if isinstance(raw, str) and "," in raw[:30]:
            raw = raw.split(",", 1)[1]
        try:
            width, height, rgba = decode_png(base64.b64decode(raw))
        except Exception as exc:
            raise RemoteAdapterError("malformed-response", f"undecodable image: {exc}") from exc
        return make_asset(width, height, rgba)

    def generate(
        self, request: GenerationRequest, references: Sequence[ImageAsset] = ()
    ) -> ImageAsset:
        c = request.controls
        body = {
            "prompt": self._weighted_prompt(request),
            "seed": request.seed,
            "cfg_scale": c.guidance,
            "denoising_strength": c.denoise_strength,
            "alwayson_scripts": {"controlnet": {"args": self._controlnet_args(request, references)}},
        }
        if c.op_kind == "txt2img" or not references:
            body.update({"width": 512, "height": 512})
            return self._decode_asset(self._post("/sdapi/v1/txt2img", body))
        ref = references[0]
        body["init_images"] = [
            base64.b64encode(encode_png(ref.width, ref.height, ref.raster)).decode()
        ]
        if request.mask is not None:
            body["mask"] = base64.b64encode(_mask_png(request.mask)).decode()
            body["inpainting_fill"] = 1
            body["inpaint_full_res"] = False
        return self._decode_asset(self._post("/sdapi/v1/img2img", body))

    def inpaint(
        self, request: GenerationRequest, references: Sequence[ImageAsset] = ()
    ) -> ImageAsset:
        return self.generate(request, references)

    def segment(self, asset: ImageAsset, points: Sequence[tuple[float, float]]) -> Mask:
        body = {
            "image": base64.b64encode(encode_png(asset.width, asset.height, asset.raster)).decode(),
            "points": [[float(x), float(y)] for x, y in points],
        }
        data = self._post("/segment", body)
        raw = data.get("mask")
        if not raw:
            raise RemoteAdapterError("malformed-response", "no mask in reply")
        width, height, rgba = decode_png(base64.b64decode(raw))
        bits = bytes(1 if rgba[i * 4] > 127 else 0 for i in range(width * height))
        return Mask(width, height, bits)


def _mask_png(mask: Mask) -> bytes:
    rgba = bytearray()
    for bit in mask.bits:
        v = 255 if bit else 0
        rgba.extend((v, v, v, 255))
    return encode_png(mask.width, mask.height, bytes(rgba))
