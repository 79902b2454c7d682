import base64
import json
import os

import httpx
import pytest

from gencanvas.adapters.mock import MockImageAdapter
from gencanvas.controls import GenerationControls, GenerationRequest
from gencanvas.document import Grounding
from gencanvas.errors import RemoteAdapterError
from gencanvas.fragments import Fragment, FragmentEdit
from gencanvas.pngio import encode_png
from gencanvas.remote import RemoteImageAdapter, RemoteLanguageAdapter


class FakePost:
    """Swaps httpx.post for a canned-response stub."""

    def __init__(self, monkeypatch):
        self.requests = []
        self.responder = None
        monkeypatch.setattr(httpx, "post", self)

    def __call__(self, url, json=None, headers=None, timeout=None):
        self.requests.append({"url": url, "json": json, "headers": headers})
        if isinstance(self.responder, Exception):
            raise self.responder
        return self.responder(url, json)


def chat_reply(content):
    def responder(url, body):
        return httpx.Response(
            200, json={"choices": [{"message": {"content": content}}]}
        )

    return responder


def test_language_decompose_parses_pairs(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = chat_reply('[["content", "castle"], ["style", "illustration"]]')
    adapter = RemoteLanguageAdapter("http://lang.example/v1")
    frags = adapter.decompose("an illustration of a castle")
    assert [(f.ftype, f.value) for f in frags] == [("content", "castle"), ("style", "illustration")]
    assert fake.requests[0]["url"] == "http://lang.example/v1/chat/completions"


def test_language_tolerates_prose_around_json(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = chat_reply('Sure! Here you go: [["tone", "serene"]] hope that helps')
    adapter = RemoteLanguageAdapter("http://lang.example/v1")
    assert adapter.decompose("x")[0].value == "serene"


def test_language_auth_token_header(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = chat_reply("[]")
    monkeypatch.setenv("GENCANVAS_LANGUAGE_TOKEN", "sekrit")
    RemoteLanguageAdapter("http://lang.example/v1").decompose("x")
    assert fake.requests[0]["headers"]["Authorization"] == "Bearer sekrit"


@pytest.mark.parametrize(
    "status,reason",
    [(401, "auth"), (403, "auth"), (429, "rate-limit"), (500, "network")],
)
def test_language_error_mapping(monkeypatch, status, reason):
    fake = FakePost(monkeypatch)
    fake.responder = lambda url, body: httpx.Response(status, json={})
    adapter = RemoteLanguageAdapter("http://lang.example/v1")
    with pytest.raises(RemoteAdapterError) as err:
        adapter.decompose("x")
    assert err.value.reason == reason


def test_language_network_failure(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = httpx.ConnectError("refused")
    with pytest.raises(RemoteAdapterError) as err:
        RemoteLanguageAdapter("http://down.example").decompose("x")
    assert err.value.reason == "network"


def test_language_malformed_reply(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = chat_reply("no json here at all")
    with pytest.raises(RemoteAdapterError) as err:
        RemoteLanguageAdapter("http://lang.example").decompose("x")
    assert err.value.reason == "malformed-response"


def test_language_compose_stays_local(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = httpx.ConnectError("should not be called")
    adapter = RemoteLanguageAdapter("http://lang.example")
    out = adapter.compose(
        "castle, illustration",
        [FragmentEdit("replace", Fragment("style", "illustration"), Fragment("style", "watercolor"))],
    )
    assert out == "castle, watercolor"
    assert fake.requests == []


def test_language_derive_variants(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = chat_reply('["heron, sketch", "owl, sketch", "crane, sketch", "falcon, sketch"]')
    adapter = RemoteLanguageAdapter("http://lang.example")
    out = adapter.derive_variant_prompts("different birds", Grounding(), 4)
    assert len(out) == 4 and len(set(out)) == 4


def image_reply(width=16, height=16):
    raster = b"\x10\x20\x30\xff" * (width * height)
    png_b64 = base64.b64encode(encode_png(width, height, raster)).decode()

    def responder(url, body):
        return httpx.Response(200, json={"images": [png_b64], "info": "{}"})

    return responder


def test_image_txt2img_roundtrip(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = image_reply()
    adapter = RemoteImageAdapter("http://sd.example")
    req = GenerationRequest(prompt="castle", seed=3, controls=GenerationControls(op_kind="txt2img"))
    asset = adapter.generate(req)
    assert (asset.width, asset.height) == (16, 16)
    sent = fake.requests[0]["json"]
    assert sent["prompt"] == "castle" and sent["seed"] == 3
    assert fake.requests[0]["url"].endswith("/sdapi/v1/txt2img")


def test_image_img2img_carries_controlnet_weights_and_mask(monkeypatch, lexicon):
    fake = FakePost(monkeypatch)
    fake.responder = image_reply()
    mock = MockImageAdapter(lexicon, default_size=(16, 16))
    ref = mock.generate(GenerationRequest(prompt="castle", seed=1))
    mask = mock.segment(ref, [(8.0, 8.0)])
    req = GenerationRequest(
        prompt="watercolor",
        reference_assets=(ref.id,),
        mask=mask,
        controls=GenerationControls(content_weight=0.3, style_weight=0.8, emphasis_weight=1.25, op_kind="inpaint"),
        seed=4,
    )
    adapter = RemoteImageAdapter("http://sd.example")
    adapter.inpaint(req, [ref])
    sent = fake.requests[0]["json"]
    assert fake.requests[0]["url"].endswith("/sdapi/v1/img2img")
    args = sent["alwayson_scripts"]["controlnet"]["args"]
    weights = {a["module"]: a["weight"] for a in args}
    assert weights["canny"] == 0.3 and weights["reference_only"] == 0.8
    assert sent["prompt"] == "(watercolor:1.25)"  # emphasis mapped to weight syntax
    assert "mask" in sent and sent["init_images"]


def test_image_malformed_reply(monkeypatch):
    fake = FakePost(monkeypatch)
    fake.responder = lambda url, body: httpx.Response(200, json={"images": []})
    adapter = RemoteImageAdapter("http://sd.example")
    with pytest.raises(RemoteAdapterError) as err:
        adapter.generate(GenerationRequest(prompt="x", seed=0))
    assert err.value.reason == "malformed-response"


def test_misconfigured_url_surfaces_as_error_outcome_keeping_asset(monkeypatch, make_runtime):
    # End to end: a failing adapter produces an error event; the element
    # keeps its previous asset.
    rt = make_runtime()
    from gencanvas.geometry import Rect

    eid = rt.create_element("image", Rect(0, 0, 64, 64), {"prompt": "castle", "seed": 1})
    before = rt.doc.element(eid).payload.asset_id

    def boom(request, references=()):
        raise RemoteAdapterError("network", "connection refused")

    rt.image.generate = boom
    from gencanvas.fragments import Fragment as F, FragmentEdit as FE

    rt.apply_fragment_edit(eid, FE("add", F("color", "teal")))
    rt.wait_idle()
    errors = [e for e in rt.events if e.kind == "error"]
    assert errors and errors[-1].payload["code"] == "adapter-failure"
    assert rt.doc.element(eid).payload.asset_id == before


@pytest.mark.skipif(
    not os.environ.get("GENCANVAS_IMAGE_URL"),
    reason="integration smoke test needs GENCANVAS_IMAGE_URL",
)
def test_integration_txt2img_smoke():
    adapter = RemoteImageAdapter(os.environ["GENCANVAS_IMAGE_URL"])
    asset = adapter.generate(GenerationRequest(prompt="a heron sketch", seed=1))
    assert asset.width > 0 and asset.height > 0


@pytest.mark.skipif(
    not os.environ.get("GENCANVAS_IMAGE_URL"),
    reason="integration smoke test needs GENCANVAS_IMAGE_URL",
)
def test_integration_segment_smoke(lexicon):
    mock = MockImageAdapter(lexicon, default_size=(64, 64))
    asset = mock.generate(GenerationRequest(prompt="castle", seed=1))
    adapter = RemoteImageAdapter(os.environ["GENCANVAS_IMAGE_URL"])
    mask = adapter.segment(asset, [(32.0, 32.0)])
    assert (mask.width, mask.height) == (asset.width, asset.height)
