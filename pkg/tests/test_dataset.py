import json
import math
import shutil

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from graspforge import jsonio
from graspforge.demo import (DatasetError, DatasetVersionError, DemoRecord, LiftValidation, Stage,
                             append_records, read_dataset, write_dataset)

from _records import synthetic_record


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(root.rglob("*")) if p.is_file()}


@settings(max_examples=300, deadline=None)
@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_text_round_trip_is_exact(x):
    text = jsonio.dumps({"x": x})
    y = json.loads(text)["x"]
    assert isinstance(y, float)
    assert y == x and math.copysign(1, y) == math.copysign(1, x)


def test_jsonio_rejects_non_finite():
    with pytest.raises(ValueError):
        jsonio.dumps([float("nan")])
    with pytest.raises(TypeError):
        jsonio.dumps({"x": object()})
    assert jsonio.dumps({"a": np.arange(2.0), "b": np.int64(3), "c": True}) == \
        '{"a":[0.0,1.0],"b":3,"c":true}'


def test_round_trip_byte_identical(tmp_path):
    recs = [synthetic_record(i, object_id=("a" if i % 2 else "b")) for i in range(10)]
    m1 = write_dataset(recs, tmp_path / "one")
    back = read_dataset(tmp_path / "one")
    assert [r.to_json() for r in back] == [r.to_json() for r in sorted(recs, key=lambda r: r.object_id)]
    m2 = write_dataset(back, tmp_path / "two")
    assert m1 == m2
    assert _tree(tmp_path / "one") == _tree(tmp_path / "two")
    assert m1["total_records"] == 10
    assert set(m1["objects"]) == {"a", "b"}


def test_field_for_field(tmp_path):
    rec = synthetic_record(3)
    write_dataset([rec], tmp_path)
    (back,) = read_dataset(tmp_path)
    np.testing.assert_array_equal(back.grasp.rotations, rec.grasp.rotations)
    np.testing.assert_array_equal(back.waypoints[2].arm_joints[0], rec.waypoints[2].arm_joints[0])
    np.testing.assert_array_equal(back.waypoints[1].wrists[0].matrix(),
                                  rec.waypoints[1].wrists[0].matrix())
    assert back.validation == rec.validation
    assert back.config == rec.config and back.config_hash == rec.config_hash
    assert back.object_mass == rec.object_mass


def test_layout(tmp_path):
    recs = [synthetic_record(i) for i in range(3)]
    m = write_dataset(recs, tmp_path)
    assert (tmp_path / "manifest.json").exists()
    assert (tmp_path / "records" / "obj.jsonl").read_text().count("\n") == 3
    for h in m["config_hashes"]:
        cfg = json.loads((tmp_path / "config" / f"{h}.json").read_text())
        assert jsonio.content_hash(cfg) == h
    assert "quasi-static" in m["substitutions"]


def test_count_mismatch(tmp_path):
    write_dataset([synthetic_record(i) for i in range(4)], tmp_path)
    path = tmp_path / "records" / "obj.jsonl"
    lines = path.read_text().splitlines(keepends=True)
    path.write_text("".join(lines[:3]))
    with pytest.raises(DatasetError, match="count"):
        read_dataset(tmp_path)


def test_record_tamper(tmp_path):
    write_dataset([synthetic_record(i) for i in range(4)], tmp_path)
    path = tmp_path / "records" / "obj.jsonl"
    path.write_text(path.read_text().replace('"success":true', '"success":false', 1))
    with pytest.raises(DatasetError, match="hash"):
        read_dataset(tmp_path)


def test_manifest_tamper(tmp_path):
    write_dataset([synthetic_record(i) for i in range(4)], tmp_path)
    path = tmp_path / "manifest.json"
    m = json.loads(path.read_text())
    m["substitutions"] = "none"
    path.write_text(json.dumps(m))
    with pytest.raises(DatasetError, match="digest"):
        read_dataset(tmp_path)


def _rewrite(root, edit):
    """Apply ``edit`` to every record dict and refresh the manifest hashes consistently."""
    recs = []
    for f in sorted((root / "records").glob("*.jsonl")):
        lines = [edit(json.loads(ln)) for ln in f.read_text().splitlines()]
        text = "".join(jsonio.dumps(d) + "\n" for d in lines)
        f.write_text(text)
        recs.append((f.stem, text, len(lines)))
    m = json.loads((root / "manifest.json").read_text())
    m.pop("digest")
    for oid, text, n in recs:
        m["objects"][oid]["sha256"] = jsonio.sha256_hex(text)
    return m


def _write_manifest(root, m):
    m["digest"] = jsonio.sha256_hex(jsonio.dumps(m))
    (root / "manifest.json").write_text(jsonio.dumps(m, indent=2))


def test_minor_bump_keeps_unknown_fields(tmp_path):
    write_dataset([synthetic_record(i) for i in range(2)], tmp_path)

    def edit(d):
        d["schema_version"] = "1.7"
        d["camera_model"] = {"fx": 600.0}
        return d
    m = _rewrite(tmp_path, edit)
    m["schema_version"] = "1.7"
    _write_manifest(tmp_path, m)
    back = read_dataset(tmp_path)
    assert all(r.extra == {"camera_model": {"fx": 600.0}} for r in back)
    assert all(json.loads(r.to_json())["camera_model"] == {"fx": 600.0} for r in back)
    assert back[0].schema_version == "1.7"


def test_major_bump_rejected(tmp_path):
    write_dataset([synthetic_record(0)], tmp_path)
    m = json.loads((tmp_path / "manifest.json").read_text())
    m.pop("digest")
    m["schema_version"] = "2.0"
    _write_manifest(tmp_path, m)
    with pytest.raises(DatasetVersionError):
        read_dataset(tmp_path)
    with pytest.raises(DatasetVersionError):
        DemoRecord.from_dict({**synthetic_record(0).to_dict(), "schema_version": "3.1"})


def test_missing_manifest(tmp_path):
    with pytest.raises(DatasetError):
        read_dataset(tmp_path)


def test_stale_files_removed(tmp_path):
    write_dataset([synthetic_record(0, "a"), synthetic_record(1, "b")], tmp_path)
    write_dataset([synthetic_record(1, "b")], tmp_path)
    assert sorted(p.name for p in (tmp_path / "records").iterdir()) == ["b.jsonl"]
    assert len(list((tmp_path / "config").iterdir())) == 1
    assert len(read_dataset(tmp_path)) == 1


def test_append_replaces_same_key(tmp_path):
    append_records(tmp_path, [synthetic_record(0), synthetic_record(1)])
    before = _tree(tmp_path)
    append_records(tmp_path, [synthetic_record(1)])
    assert _tree(tmp_path) == before
    append_records(tmp_path, [synthetic_record(2)])
    assert len(read_dataset(tmp_path)) == 3


def test_record_invariants():
    rec = synthetic_record(0)
    with pytest.raises(ValueError, match="stages"):
        DemoRecord(rec.object_id, rec.object_mass, rec.strategy, rec.grasp,
                   tuple(w for w in rec.waypoints if w.stage is not Stage.SQUEEZE),
                   rec.validation, rec.config)
    with pytest.raises(ValueError, match="stages"):
        DemoRecord(rec.object_id, rec.object_mass, rec.strategy, rec.grasp,
                   rec.waypoints[::-1], rec.validation, rec.config)
    with pytest.raises(ValueError, match="success"):
        DemoRecord(rec.object_id, rec.object_mass, rec.strategy, rec.grasp, rec.waypoints,
                   LiftValidation(0.1, 0.0, True), rec.config)
    with pytest.raises(ValueError, match="success"):
        DemoRecord(rec.object_id, rec.object_mass, rec.strategy, rec.grasp, rec.waypoints,
                   LiftValidation(0.2, 0.5, True), rec.config)
    with pytest.raises(ValueError, match="file stem"):
        DemoRecord("../x", rec.object_mass, rec.strategy, rec.grasp, rec.waypoints,
                   rec.validation, rec.config)


def test_copied_dataset_reads(tmp_path):
    write_dataset([synthetic_record(i) for i in range(3)], tmp_path / "src")
    shutil.copytree(tmp_path / "src", tmp_path / "dst")
    assert len(read_dataset(tmp_path / "dst")) == 3
