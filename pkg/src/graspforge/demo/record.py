"""Demonstration records and the on-disk dataset."""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .. import jsonio
from ..synthesis import BimanualGraspPose
from .plan import Waypoint
from .stages import Stage
from .validate import MIN_LIFT, RESIDUAL_LIMIT, LiftValidation

SCHEMA_VERSION = "1.0"
FORMAT = "graspforge-demo"
SUBSTITUTIONS = (
    "The simulated one-second hold after lifting is replaced by a quasi-static check: "
    "the squeeze-stage contacts must support the object's weight within the residual limit."
)


class DatasetError(ValueError):
    pass


class DatasetVersionError(DatasetError):
    pass


def _major(version: str) -> int:
    try:
        return int(str(version).split(".")[0])
    except ValueError:
        raise DatasetVersionError(f"malformed schema version {version!r}") from None


def check_version(version: str) -> None:
    if _major(version) != _major(SCHEMA_VERSION):
        raise DatasetVersionError(
            f"schema version {version} is incompatible with reader version {SCHEMA_VERSION}")


_SAFE_ID = re.compile(r"[A-Za-z0-9_.-]+")
_KNOWN = ("schema_version", "object_id", "object_mass", "strategy", "grasp", "grasp_seed",
          "grasp_energy", "waypoints", "validation", "config_hash", "config")


@dataclass(frozen=True, eq=False)
class DemoRecord:
    object_id: str
    object_mass: float
    strategy: str
    grasp: BimanualGraspPose
    waypoints: tuple
    validation: LiftValidation
    config: dict
    config_hash: str = ""
    grasp_seed: int = None
    grasp_energy: dict = None
    schema_version: str = SCHEMA_VERSION
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.waypoints:
            raise ValueError("a record needs waypoints")
        orders = [w.stage.order for w in self.waypoints]
        if orders != sorted(orders) or set(orders) != {s.order for s in Stage}:
            raise ValueError("waypoints must cover all four stages in order")
        if not _SAFE_ID.fullmatch(str(self.object_id)):
            raise ValueError(f"object id {self.object_id!r} is not a safe file stem")
        v = self.validation
        demo = self.config.get("demo", {})
        if v.success and not (v.lift_height_m >= demo.get("min_lift", MIN_LIFT)
                              and v.gravity_residual <= demo.get("residual_limit", RESIDUAL_LIMIT)):
            raise ValueError("success recorded for a failing validation")
        if not self.config_hash:
            object.__setattr__(self, "config_hash", jsonio.content_hash(self.config))

    @property
    def key(self) -> tuple:
        return (self.object_id, self.config_hash, self.grasp_seed)

    @property
    def success(self) -> bool:
        return self.validation.success

    def to_dict(self) -> dict:
        d = {
            "schema_version": self.schema_version,
            "object_id": self.object_id,
            "object_mass": self.object_mass,
            "strategy": self.strategy,
            "grasp": self.grasp.to_dict(),
            "grasp_seed": self.grasp_seed,
            "grasp_energy": self.grasp_energy,
            "waypoints": [w.to_dict() for w in self.waypoints],
            "validation": self.validation.to_dict(),
            "config_hash": self.config_hash,
            "config": self.config,
        }
        d.update(self.extra)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "DemoRecord":
        check_version(d.get("schema_version", "0"))
        extra = {k: v for k, v in d.items() if k not in _KNOWN}
        return cls(
            object_id=d["object_id"],
            object_mass=d["object_mass"],
            strategy=d["strategy"],
            grasp=BimanualGraspPose.from_dict(d["grasp"]),
            waypoints=tuple(Waypoint.from_dict(w) for w in d["waypoints"]),
            validation=LiftValidation.from_dict(d["validation"]),
            config=d["config"],
            config_hash=d.get("config_hash", ""),
            grasp_seed=d.get("grasp_seed"),
            grasp_energy=d.get("grasp_energy"),
            schema_version=d["schema_version"],
            extra=extra,
        )

    def to_json(self) -> str:
        return jsonio.dumps(self.to_dict())


def write_dataset(records, directory) -> dict:
    """Write records grouped by object, one JSONL file each, plus manifest and configs.

    Stale record and config files from an earlier write are removed so the
    directory content depends only on ``records``. Returns the manifest.
    """
    root = Path(directory)
    (root / "records").mkdir(parents=True, exist_ok=True)
    (root / "config").mkdir(parents=True, exist_ok=True)
    groups = {}
    configs = {}
    for r in records:
        groups.setdefault(r.object_id, []).append(r)
        configs[r.config_hash] = r.config
    for f in (root / "records").glob("*.jsonl"):
        if f.stem not in groups:
            f.unlink()
    for f in (root / "config").glob("*.json"):
        if f.stem not in configs:
            f.unlink()
    entries = {}
    for oid in sorted(groups):
        text = "".join(r.to_json() + "\n" for r in groups[oid])
        path = root / "records" / f"{oid}.jsonl"
        path.write_text(text, encoding="utf-8")
        entries[oid] = {"file": f"records/{oid}.jsonl", "count": len(groups[oid]),
                        "sha256": jsonio.sha256_hex(text)}
    for h in sorted(configs):
        (root / "config" / f"{h}.json").write_text(jsonio.dumps(configs[h], indent=2) + "\n",
                                                  encoding="utf-8")
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "format": FORMAT,
        "total_records": sum(e["count"] for e in entries.values()),
        "objects": entries,
        "config_hashes": sorted(configs),
        "substitutions": SUBSTITUTIONS,
    }
    manifest["digest"] = jsonio.sha256_hex(jsonio.dumps(manifest))
    (root / "manifest.json").write_text(jsonio.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    return manifest


def read_dataset(directory) -> list:
    """Read and verify a dataset directory.

    Raises ``DatasetError`` when a file's hash or line count disagrees with
    the manifest, and ``DatasetVersionError`` on an incompatible schema.
    """
    root = Path(directory)
    mpath = root / "manifest.json"
    if not mpath.exists():
        raise DatasetError(f"no manifest.json in {root}")
    manifest = json.loads(mpath.read_text(encoding="utf-8"))
    check_version(manifest.get("schema_version", "0"))
    body = {k: v for k, v in manifest.items() if k != "digest"}
    if manifest.get("digest") != jsonio.sha256_hex(jsonio.dumps(body)):
        raise DatasetError("manifest digest does not match its content")
    records = []
    for oid, entry in manifest["objects"].items():
        path = root / entry["file"]
        if not path.exists():
            raise DatasetError(f"manifest lists missing file {entry['file']}")
        text = path.read_text(encoding="utf-8")
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if len(lines) != entry["count"]:
            raise DatasetError(f"{entry['file']}: manifest count {entry['count']} "
                               f"but {len(lines)} records on disk")
        if jsonio.sha256_hex(text) != entry["sha256"]:
            raise DatasetError(f"{entry['file']}: content hash does not match the manifest")
        for ln in lines:
            rec = DemoRecord.from_dict(json.loads(ln))
            if rec.object_id != oid:
                raise DatasetError(f"{entry['file']} holds a record for {rec.object_id!r}")
            records.append(rec)
    total = manifest.get("total_records", len(records))
    if total != len(records):
        raise DatasetError(f"manifest total {total} but {len(records)} records read")
    for h in manifest.get("config_hashes", []):
        cpath = root / "config" / f"{h}.json"
        if not cpath.exists():
            raise DatasetError(f"missing config file config/{h}.json")
        if jsonio.content_hash(json.loads(cpath.read_text(encoding="utf-8"))) != h:
            raise DatasetError(f"config/{h}.json does not match its hash")
    return records


def append_records(directory, new_records) -> dict:
    """Add records to a dataset (created if absent) and rewrite it.

    A new record replaces an existing one with the same object, config
    hash and grasp seed, so re-running a demo leaves the dataset unchanged.
    """
    root = Path(directory)
    existing = read_dataset(root) if (root / "manifest.json").exists() else []
    merged = {r.key: r for r in existing}
    for r in new_records:
        merged[r.key] = r
    return write_dataset(list(merged.values()), root)
