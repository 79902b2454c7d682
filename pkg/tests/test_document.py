import pytest

from gencanvas.assets import make_asset
from gencanvas.document import (
    CanvasDocument,
    FragmentCardPayload,
    ImagePayload,
    LensPayload,
)
from gencanvas.errors import (
    CorruptPayloadError,
    DanglingAssetError,
    MalformedPayloadError,
    UnknownIdError,
    VersionMismatchError,
)
from gencanvas.fragments import Fragment
from gencanvas.geometry import Rect
from gencanvas.scene import SceneSpec, render_scene


def tiny_asset(seed=0):
    scene = SceneSpec(objects=(), background_color_tag="", render_seed=seed)
    return make_asset(8, 8, render_scene(scene, 8, 8), scene)


def test_first_element_gets_e1_and_z1():
    doc = CanvasDocument()
    eid = doc.create_element("image", Rect(0, 0, 100, 100), ImagePayload())
    assert eid == "e1"
    assert doc.element(eid).z == 1


def test_z_order_is_insertion_order():
    # Oracle: z order equals creation order.
    doc = CanvasDocument()
    ids = [
        doc.create_element("container", Rect(0, 0, 10, 10), {"prompt": "x"}),
        doc.create_element("image", Rect(0, 0, 10, 10), ImagePayload()),
        doc.create_element("lens", Rect(0, 0, 10, 10), LensPayload(prompt="p")),
    ]
    assert doc.z_order == ids
    zs = [doc.element(i).z for i in ids]
    assert zs == sorted(zs)
    assert doc.element(ids[0]).z < doc.element(ids[1]).z


def test_create_validates_kind_and_payload():
    doc = CanvasDocument()
    with pytest.raises(MalformedPayloadError):
        doc.create_element("hologram", Rect(0, 0, 1, 1), {})
    with pytest.raises(MalformedPayloadError):
        doc.create_element("image", Rect(0, 0, 1, 1), LensPayload())


def test_update_geometry_flags_noop():
    doc = CanvasDocument()
    eid = doc.create_element("image", Rect(0, 0, 100, 100), ImagePayload())
    rev = doc.revision
    assert doc.update_geometry(eid, Rect(10, 0, 100, 100)) is True
    assert doc.revision == rev + 1
    assert doc.update_geometry(eid, Rect(10, 0, 100, 100)) is False
    assert doc.revision == rev + 1
    with pytest.raises(UnknownIdError):
        doc.update_geometry("missing", Rect(0, 0, 1, 1))


def test_snapshot_restore_is_bit_exact():
    doc = CanvasDocument()
    a1, a2 = tiny_asset(1), tiny_asset(2)
    doc.add_asset(a1)
    doc.add_asset(a2)
    eid = doc.create_element("image", Rect(0, 0, 8, 8), ImagePayload(asset_id=a1.id))
    entry = doc.snapshot(eid, "test", 5)
    doc.element(eid).payload.asset_id = a2.id
    doc.restore(entry, 9)
    assert doc.element(eid).payload.asset_id == a1.id
    assert doc.element(eid).payload.to_dict() == entry.payload_snapshot
    assert doc.assets[a1.id].raster == a1.raster


def test_two_snapshots_of_unchanged_element_share_prior_asset():
    # Content-hash oracle: unchanged payload, equal prior ids.
    doc = CanvasDocument()
    asset = tiny_asset()
    doc.add_asset(asset)
    eid = doc.create_element("image", Rect(0, 0, 8, 8), ImagePayload(asset_id=asset.id))
    e1 = doc.snapshot(eid, "a", 1)
    e2 = doc.snapshot(eid, "b", 2)
    assert e1.prior_asset == e2.prior_asset == asset.id


def test_restore_onto_deleted_element_is_dangling():
    doc = CanvasDocument()
    eid = doc.create_element("fragment", Rect(0, 0, 4, 4), FragmentCardPayload(Fragment("style", "sketch")))
    entry = doc.snapshot(eid, "t", 1)
    doc.delete_element(eid)
    with pytest.raises(DanglingAssetError):
        doc.restore(entry, 2)


def test_history_timestamps_must_be_monotone():
    doc = CanvasDocument()
    eid = doc.create_element("image", Rect(0, 0, 8, 8), ImagePayload())
    doc.snapshot(eid, "a", 10)
    with pytest.raises(MalformedPayloadError):
        doc.snapshot(eid, "b", 5)


def make_populated_doc():
    doc = CanvasDocument()
    asset = tiny_asset(3)
    doc.add_asset(asset)
    doc.create_element("image", Rect(0, 0, 8, 8), ImagePayload(asset_id=asset.id))
    doc.create_element("lens", Rect(2, 2, 10, 10), LensPayload(prompt="forest backdrop", seed=4))
    doc.create_element(
        "fragment", Rect(30, 0, 8, 4), FragmentCardPayload(Fragment("color", "pastel"))
    )
    doc.snapshot("e1", "setup", 1)
    return doc


def test_serialize_round_trip_structural_equality():
    doc = make_populated_doc()
    data = doc.serialize()
    back = CanvasDocument.deserialize(data)
    assert back.to_dict() == doc.to_dict()


def test_serialize_is_canonical_fixed_point():
    doc = make_populated_doc()
    data = doc.serialize()
    again = CanvasDocument.deserialize(data).serialize()
    assert data == again


def test_empty_document_round_trip():
    doc = CanvasDocument()
    assert CanvasDocument.deserialize(doc.serialize()).to_dict() == doc.to_dict()


def test_truncated_bytes_are_corrupt():
    doc = make_populated_doc()
    data = doc.serialize()
    with pytest.raises(CorruptPayloadError):
        CanvasDocument.deserialize(data[: len(data) // 2])
    with pytest.raises(CorruptPayloadError):
        CanvasDocument.deserialize(b"[1, 2, 3]")


def test_version_mismatch():
    doc = CanvasDocument()
    payload = doc.to_dict()
    payload["version"] = 0
    with pytest.raises(VersionMismatchError):
        CanvasDocument.from_dict(payload)


def test_validate_catches_dangling_and_permutation():
    doc = make_populated_doc()
    doc.validate()
    doc.z_order.append("ghost")
    with pytest.raises(MalformedPayloadError):
        doc.validate()
    doc.z_order.pop()
    doc.element("e1").payload.asset_id = "nope"
    with pytest.raises(DanglingAssetError):
        doc.validate()
