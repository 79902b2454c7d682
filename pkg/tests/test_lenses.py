import pytest

from gencanvas.errors import BlankLensNoPromptError, UnknownIdError
from gencanvas.geometry import Rect
from gencanvas.lenses import build_composition, covered_elements, resolve_lens_stack


def image(runtime, rect, prompt="heron, sketch", seed=3):
    return runtime.create_element("image", rect, {"prompt": prompt, "seed": seed})


def lens(runtime, rect, prompt="forest backdrop"):
    return runtime.create_element("lens", rect, {"prompt": prompt})


def test_covered_elements_intersection_oracle(runtime):
    img = image(runtime, Rect(50, 50, 100, 100))
    lid = lens(runtime, Rect(0, 0, 100, 100))
    assert covered_elements(runtime.doc, lid) == [img]


def test_covered_excludes_disjoint_and_touching(runtime):
    image(runtime, Rect(100, 0, 50, 50))  # shares an edge: zero area
    image(runtime, Rect(300, 300, 50, 50))
    lid = lens(runtime, Rect(0, 0, 100, 100))
    assert covered_elements(runtime.doc, lid) == []


def test_covered_excludes_higher_z(runtime):
    lid = lens(runtime, Rect(0, 0, 100, 100))
    image(runtime, Rect(10, 10, 50, 50))  # created later: z above the lens
    assert covered_elements(runtime.doc, lid) == []


def test_covered_unknown_lens(runtime):
    with pytest.raises(UnknownIdError):
        covered_elements(runtime.doc, "e9")


def test_masks_tile_lens_rect_exactly(runtime):
    image(runtime, Rect(50, 50, 100, 100))
    lid = lens(runtime, Rect(0, 0, 100, 100))
    comp = build_composition(runtime.doc, lid, runtime.language)
    area = 100 * 100
    assert comp.preserve_mask.count() + comp.generate_mask.count() == area
    assert comp.preserve_mask.count() == 50 * 50  # overlap region
    overlap = bytes(
        a & b for a, b in zip(comp.preserve_mask.bits, comp.generate_mask.bits)
    )
    assert overlap.count(1) == 0  # disjoint


def test_composite_prompt_token_multiset(runtime):
    image(runtime, Rect(0, 0, 64, 64), prompt="heron, sketch")
    lid = lens(runtime, Rect(0, 0, 100, 100), prompt="forest backdrop")
    comp = build_composition(runtime.doc, lid, runtime.language)

    def toks(s):
        return sorted(w for w in s.replace(",", " ").split() if w)

    assert toks(comp.composite_prompt) == toks("forest backdrop heron sketch")


def test_blank_lens_without_prompt_rejected(runtime):
    lid = lens(runtime, Rect(0, 0, 100, 100), prompt="")
    with pytest.raises(BlankLensNoPromptError):
        runtime.regenerate_lens(lid)


def test_blank_lens_with_prompt_generates(runtime):
    lid = lens(runtime, Rect(0, 0, 80, 60), prompt="forest")
    runtime.wait_idle()
    payload = runtime.doc.element(lid).payload
    assert payload.last_result is not None
    asset = runtime.doc.asset(payload.last_result)
    assert (asset.width, asset.height) == (80, 60)  # lens-sized output
    assert asset.scene.objects[0].label == "forest"


def test_idle_rule_one_generation_after_moves(runtime):
    img = image(runtime, Rect(200, 200, 50, 50))
    lid = lens(runtime, Rect(0, 0, 100, 100), prompt="forest backdrop")
    runtime.wait_idle()
    start = len(runtime.events)
    # Three moves with gaps under the 2 s window: one generation total.
    runtime.update_geometry(img, Rect(10, 10, 50, 50))
    runtime.advance(1500)
    runtime.update_geometry(img, Rect(20, 10, 50, 50))
    runtime.advance(1500)
    runtime.update_geometry(img, Rect(30, 10, 50, 50))
    runtime.advance(1999)
    started = [e for e in runtime.events[start:] if e.kind == "generationStarted"]
    assert not started
    runtime.advance(1)
    started = [e for e in runtime.events[start:] if e.kind == "generationStarted"]
    assert len(started) == 1
    assert runtime.doc.element(lid).payload.last_result is not None


def test_noop_move_queues_nothing(runtime):
    img = image(runtime, Rect(10, 10, 50, 50))
    lens(runtime, Rect(0, 0, 100, 100))
    runtime.wait_idle()
    assert runtime.update_geometry(img, Rect(10, 10, 50, 50)) is False
    assert runtime.scheduler.pending_count() == 0


def test_move_then_delete_lens_cancels_job(runtime):
    img = image(runtime, Rect(10, 10, 50, 50))
    lid = lens(runtime, Rect(0, 0, 100, 100))
    runtime.wait_idle()
    start = len(runtime.events)
    runtime.update_geometry(img, Rect(20, 10, 50, 50))
    assert runtime.scheduler.pending_count() == 1
    runtime.delete_element(lid)
    assert runtime.scheduler.pending_count() == 0
    runtime.wait_idle()
    assert not [e for e in runtime.events[start:] if e.kind == "generationCompleted"]


def test_stacked_lenses_chain_in_z_order(runtime):
    image(runtime, Rect(10, 10, 50, 50), prompt="heron")
    lower = lens(runtime, Rect(0, 0, 100, 100), prompt="forest backdrop")
    runtime.wait_idle()
    upper = lens(runtime, Rect(0, 0, 100, 100), prompt="pastel")
    runtime.wait_idle()
    comp = build_composition(runtime.doc, upper, runtime.language)
    assert comp.covered[-1] == lower  # lower lens result is consumed
    lower_result = runtime.doc.element(lower).payload.last_result
    assert lower_result in comp.reference_assets
    upper_asset = runtime.doc.asset(runtime.doc.element(upper).payload.last_result)
    assert "forest" in upper_asset.provenance.prompt
    assert "pastel" in upper_asset.provenance.prompt


def test_never_generated_lens_is_skipped_by_upper(runtime):
    lower = lens(runtime, Rect(0, 0, 100, 100), prompt="")  # blank, never generates
    upper = lens(runtime, Rect(0, 0, 100, 100), prompt="forest")
    comp = build_composition(runtime.doc, upper, runtime.language)
    assert lower not in comp.covered


def test_removing_lens_never_mutates_sources(runtime):
    img = image(runtime, Rect(10, 10, 50, 50))
    asset_before = runtime.doc.element(img).payload.asset_id
    lid = lens(runtime, Rect(0, 0, 100, 100), prompt="forest")
    runtime.wait_idle()
    runtime.delete_element(lid)
    runtime.wait_idle()
    assert runtime.doc.element(img).payload.asset_id == asset_before


def test_fixed_seed_lens_result_is_bit_identical(make_runtime):
    def run():
        rt = make_runtime()
        rt.create_element("image", Rect(10, 10, 50, 50), {"prompt": "heron, sketch", "seed": 5})
        lid = rt.create_element("lens", Rect(0, 0, 100, 100), {"prompt": "forest backdrop", "seed": 9})
        rt.wait_idle()
        return rt.doc.asset(rt.doc.element(lid).payload.last_result)

    a, b = run(), run()
    assert a.id == b.id and a.raster == b.raster


def test_lens_fade_is_ui_only(runtime):
    lid = lens(runtime, Rect(0, 0, 80, 60), prompt="forest")
    runtime.wait_idle()
    pending_before = runtime.scheduler.pending_count()
    runtime.set_lens_fade(lid, True)
    runtime.set_lens_fade(lid, False)
    assert runtime.scheduler.pending_count() == pending_before == 0


def test_resolve_lens_stack_orders_by_z(runtime):
    l1 = lens(runtime, Rect(0, 0, 100, 100), prompt="a")
    l2 = lens(runtime, Rect(50, 50, 100, 100), prompt="b")
    l3 = lens(runtime, Rect(400, 400, 50, 50), prompt="c")
    stack = resolve_lens_stack(runtime.doc, Rect(40, 40, 30, 30))
    assert stack == [l1, l2]
    assert l3 not in stack


def test_drop_image_on_lens_schedules_composition(runtime):
    img = image(runtime, Rect(10, 10, 50, 50))
    lid = lens(runtime, Rect(0, 0, 100, 100), prompt="forest")
    runtime.wait_idle()
    effect = runtime.drop_on(img, lid)
    assert effect.effect == "lens-scheduled"
    assert runtime.scheduler.pending_count() == 1
