import pytest

from gencanvas.document import Grounding
from gencanvas.errors import (
    BadIndexError,
    EmptyCellError,
    EmptyContainerError,
    UnresolvableSourceError,
)
from gencanvas.fragments import Fragment
from gencanvas.geometry import Rect


def bird_image(runtime, seed=11):
    return runtime.create_element("image", Rect(0, 0, 64, 64), {"prompt": "a bird, sketch", "seed": seed})


def container(runtime, prompt=""):
    return runtime.create_element("container", Rect(200, 0, 150, 150), {"prompt": prompt})


def cells_of(runtime, cid):
    return runtime.doc.element(cid).payload.cells


def test_ground_on_asset_clears_cells_sets_images(runtime):
    img = bird_image(runtime)
    cid = container(runtime, "different art styles")
    runtime.generate_container(cid)
    assert all(cells_of(runtime, cid))
    runtime.drop_on(img, cid)
    payload = runtime.doc.element(cid).payload
    assert payload.grounding.source == "asset"
    assert payload.cell_kind == "images"
    assert cells_of(runtime, cid) == [None, None, None, None]


def test_ground_on_fragment_sets_fragment_cells(runtime):
    cid = container(runtime, "more concrete")
    runtime.ground_container(cid, Grounding(source="fragment", fragment=Fragment("style", "illustration")))
    assert runtime.doc.element(cid).payload.cell_kind == "fragments"


def test_second_grounding_replaces_first(runtime):
    img = bird_image(runtime)
    cid = container(runtime)
    runtime.drop_on(img, cid)
    runtime.ground_container(cid, Grounding(source="fragment", fragment=Fragment("style", "sketch")))
    payload = runtime.doc.element(cid).payload
    assert payload.grounding.source == "fragment"
    assert payload.grounding.asset_id is None


def test_unresolvable_grounding(runtime):
    cid = container(runtime)
    with pytest.raises(UnresolvableSourceError):
        runtime.ground_container(cid, Grounding(source="asset", asset_id="missing"))


def test_generate_fills_four_distinct_image_cells(runtime):
    img = bird_image(runtime)
    cid = container(runtime, "different types of bird")
    runtime.drop_on(img, cid)
    runtime.generate_container(cid)
    cells = cells_of(runtime, cid)
    assert len(cells) == 4 and all(c and "asset" in c for c in cells)
    prompts = [runtime.doc.asset(c["asset"]).provenance.prompt for c in cells]
    assert len(set(prompts)) == 4
    # Style consistency: reference style tags copied into every cell.
    for cell in cells:
        asset = runtime.doc.asset(cell["asset"])
        assert any("sketch" in o.style_tags for o in asset.scene.objects)


def test_generate_seeds_are_base_plus_offset(runtime):
    img = bird_image(runtime)
    cid = container(runtime, "different types of bird")
    runtime.drop_on(img, cid)
    runtime.generate_container(cid, base_seed=100)
    seeds = [runtime.doc.asset(c["asset"]).provenance.seed for c in cells_of(runtime, cid)]
    assert seeds == [100, 101, 102, 103]


def test_same_base_seed_regeneration_is_identical(runtime):
    img = bird_image(runtime)
    cid = container(runtime, "different types of bird")
    runtime.drop_on(img, cid)
    runtime.generate_container(cid, base_seed=42)
    first = [c["asset"] for c in cells_of(runtime, cid)]
    runtime.generate_container(cid, base_seed=42)
    second = [c["asset"] for c in cells_of(runtime, cid)]
    assert first == second


def test_regeneration_rerolls_base_seed_by_default(runtime):
    img = bird_image(runtime)
    cid = container(runtime, "different types of bird")
    runtime.drop_on(img, cid)
    runtime.generate_container(cid)
    s1 = runtime.doc.element(cid).payload.base_seed
    runtime.generate_container(cid)
    s2 = runtime.doc.element(cid).payload.base_seed
    assert s1 != s2


def test_fragment_grounded_generation_yields_fragments(runtime):
    cid = container(runtime, "more concrete")
    runtime.ground_container(cid, Grounding(source="fragment", fragment=Fragment("style", "illustration")))
    runtime.generate_container(cid)
    cells = cells_of(runtime, cid)
    values = [c["fragment"]["value"] for c in cells]
    assert len(set(values)) == 4
    assert "illustration" not in values
    assert all(c["fragment"]["ftype"] == "style" for c in cells)


def test_empty_container_rejected(runtime):
    cid = container(runtime, "")
    with pytest.raises(EmptyContainerError):
        runtime.generate_container(cid)


def test_adopt_cell_carries_provenance_parents(runtime):
    img = bird_image(runtime)
    source_asset = runtime.doc.element(img).payload.asset_id
    cid = container(runtime, "different types of bird")
    runtime.drop_on(img, cid)
    runtime.generate_container(cid)
    eid = runtime.adopt_cell(cid, 2, Rect(0, 200, 64, 64))
    adopted = runtime.doc.element(eid)
    assert adopted.kind == "image"
    asset = runtime.doc.asset(adopted.payload.asset_id)
    assert asset.provenance.parents == (source_asset,)
    # Container cell is retained after adoption.
    assert cells_of(runtime, cid)[2] == {"asset": adopted.payload.asset_id}


def test_chained_containers_preserve_lineage(runtime):
    img = bird_image(runtime)
    a_source = runtime.doc.element(img).payload.asset_id
    a = container(runtime, "different art styles")
    runtime.drop_on(img, a)
    runtime.generate_container(a)
    adopted_a = runtime.adopt_cell(a, 0, Rect(0, 200, 64, 64))
    a_cell_asset = runtime.doc.element(adopted_a).payload.asset_id

    b = container(runtime, "different types of bird")
    runtime.drop_on(adopted_a, b)
    runtime.generate_container(b)
    adopted_b = runtime.adopt_cell(b, 1, Rect(100, 200, 64, 64))
    b_asset = runtime.doc.asset(runtime.doc.element(adopted_b).payload.asset_id)

    assert b_asset.provenance.parents == (a_cell_asset,)
    assert runtime.doc.asset(a_cell_asset).provenance.parents == (a_source,)


def test_adopt_empty_cell_and_bad_index(runtime):
    cid = container(runtime, "birds")
    with pytest.raises(EmptyCellError):
        runtime.adopt_cell(cid, 0, Rect(0, 0, 10, 10))
    with pytest.raises(BadIndexError):
        runtime.adopt_cell(cid, 7, Rect(0, 0, 10, 10))


def test_grounding_replacement_never_mutates_source(runtime):
    img = bird_image(runtime)
    asset_before = runtime.doc.element(img).payload.asset_id
    cid = container(runtime)
    runtime.drop_on(img, cid)
    runtime.ground_container(cid, Grounding(source="text", prompt="castles"))
    assert runtime.doc.element(img).payload.asset_id == asset_before


def test_adopt_into_second_container_via_drop(runtime):
    img = bird_image(runtime)
    a = container(runtime, "different art styles")
    runtime.drop_on(img, a)
    runtime.generate_container(a)
    adopted = runtime.adopt_cell(a, 0, Rect(0, 200, 64, 64))
    b = container(runtime, "")
    effect = runtime.drop_on(adopted, b)
    assert effect.effect == "grounded"
    assert runtime.doc.element(b).payload.grounding.asset_id == runtime.doc.element(adopted).payload.asset_id
