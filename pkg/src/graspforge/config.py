"""Run configuration: a strict JSON schema resolved into pipeline objects."""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import jsonio
from .contact import FrictionCone
from .demo import DemoConfig
from .fixtures import fixture_root
from .force_qp import default_targets
from .geometry import MeshError, TriMesh, load_mesh
from .kinematics import IKConfig, RigidTransform, load_arms, load_hand, rpy_matrix
from .scene import Scene
from .selection import Thresholds
from .strategy import GraspStrategy
from .synthesis import EnergyWeights, GraspContext, OptimizerConfig

CONFIG_SCHEMA_VERSION = "1.0"
AUTO = "auto"
SMALL_OBJECT_EDGE = 0.03
HEAVY_OBJECT_MASS = 0.8
DEFAULT_HAND_SPAN = 0.12


class ConfigError(ValueError):
    """Invalid or inconsistent run configuration."""


def choose_strategy(mesh: TriMesh, mass: float, hand_span: float = DEFAULT_HAND_SPAN) -> GraspStrategy:
    """Size and mass heuristic for ``auto``.

    Objects longer than one hand can span, or heavier than 0.8 kg, get both
    hands; objects under 3 cm on every side get a two-finger pinch; all
    others a whole-hand grasp. Tripod3 is only used when asked for.
    """
    edge = float(mesh.extents.max())
    if edge > hand_span or mass > HEAVY_OBJECT_MASS:
        return GraspStrategy.BIMANUAL
    if edge < SMALL_OBJECT_EDGE:
        return GraspStrategy.PINCH2
    return GraspStrategy.WHOLE_HAND


def _check_keys(d, allowed, where):
    if not isinstance(d, dict):
        raise ConfigError(f"{where}: expected an object, got {type(d).__name__}")
    unknown = sorted(set(d) - set(allowed))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")


def _dataclass_from(cls, d, where):
    names = [f.name for f in fields(cls)]
    _check_keys(d, names, where)
    try:
        return cls(**d)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{where}: {e}") from None


@dataclass(frozen=True)
class ObjectSpec:
    id: str
    mesh: str
    mass: float
    position: tuple = (0.0, 0.0, 0.0)
    rpy: tuple = (0.0, 0.0, 0.0)

    def pose(self) -> RigidTransform:
        return RigidTransform(rpy_matrix(*self.rpy), self.position)


@dataclass(frozen=True, eq=False)
class RunConfig:
    """Everything needed to synthesize, select and demonstrate one object.

    Relative paths are resolved against the config file's directory when
    they exist there, otherwise against the fixture root.
    """

    object: ObjectSpec
    strategy: str = AUTO
    hand: str = "hand.json"
    arms: str = "arm.json"
    table_height: float = 0.0
    n_candidates: int = 64
    seed: int = 0
    seeds: tuple = None
    mu: float = 0.6
    edge_count: int = 8
    disturbance: float = 1.0
    targets: tuple = None
    weights: EnergyWeights = EnergyWeights()
    thresholds: Thresholds = Thresholds()
    optimizer: OptimizerConfig = OptimizerConfig()
    ik: IKConfig = IKConfig()
    demo: DemoConfig = DemoConfig()
    distractors: tuple = ()
    out: str = "out"
    jobs: int = 1
    base_dir: str = field(default=".", compare=False)
    schema_version: str = CONFIG_SCHEMA_VERSION

    _SECTIONS = {"weights": EnergyWeights, "thresholds": Thresholds,
                 "optimizer": OptimizerConfig, "ik": IKConfig, "demo": DemoConfig}

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ConfigError("n_candidates must be >= 1")
        if not self.object.mass > 0:
            raise ConfigError("object mass must be positive")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if self.seeds is not None and len(self.seeds) != self.n_candidates:
            raise ConfigError(f"{len(self.seeds)} seeds given for {self.n_candidates} candidates")
        if self.strategy != AUTO:
            try:
                GraspStrategy.parse(self.strategy)
            except ValueError as e:
                raise ConfigError(str(e)) from None
        try:
            FrictionCone(self.mu, self.edge_count)
        except ValueError as e:
            raise ConfigError(str(e)) from None
        for d in self.distractors:
            if d.id == self.object.id:
                raise ConfigError(f"distractor id {d.id!r} repeats the target object id")

    # loading

    @classmethod
    def from_dict(cls, d: dict, base_dir=".") -> "RunConfig":
        top = [f.name for f in fields(cls) if f.name != "base_dir"]
        _check_keys(d, top, "config")
        version = str(d.get("schema_version", ""))
        if version.split(".")[0] != CONFIG_SCHEMA_VERSION.split(".")[0]:
            raise ConfigError(f"config schema_version {version!r} is not supported "
                              f"(expected {CONFIG_SCHEMA_VERSION})")
        if "object" not in d:
            raise ConfigError("config: missing required key object")
        kw = dict(d)
        kw["object"] = cls._object(d["object"], "object")
        kw["distractors"] = tuple(cls._object(o, f"distractors[{i}]")
                                  for i, o in enumerate(d.get("distractors", [])))
        for name, sub in cls._SECTIONS.items():
            if name in d:
                kw[name] = _dataclass_from(sub, d[name], name)
        for name in ("seeds", "targets"):
            if d.get(name) is not None:
                kw[name] = tuple(tuple(x) if isinstance(x, list) else x for x in d[name])
        try:
            return cls(base_dir=str(base_dir), **kw)
        except TypeError as e:
            raise ConfigError(f"config: {e}") from None

    @staticmethod
    def _object(d, where) -> ObjectSpec:
        spec = _dataclass_from(ObjectSpec, d, where)
        return replace(spec, position=tuple(spec.position), rpy=tuple(spec.rpy))

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            d = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: invalid JSON ({e})") from None
        cfg = cls.from_dict(d, base_dir=path.parent)
        cfg.check_paths()
        return cfg

    def with_overrides(self, seed=None, strategy=None, out=None, jobs=None) -> "RunConfig":
        kw = {}
        if seed is not None:
            kw["seed"] = int(seed)
        if strategy is not None:
            kw["strategy"] = strategy
        if out is not None:
            kw["out"] = str(Path(out).resolve())
        if jobs is not None:
            kw["jobs"] = int(jobs)
        return replace(self, **kw) if kw else self

    # paths

    def resolve(self, p) -> Path:
        p = Path(p)
        if p.is_absolute():
            return p
        local = Path(self.base_dir) / p
        return local if local.exists() else fixture_root() / p

    def check_paths(self) -> None:
        for p in [self.hand, self.arms, self.object.mesh] + [o.mesh for o in self.distractors]:
            if not self.resolve(p).exists():
                raise ConfigError(f"path not found: {p}")

    @property
    def out_dir(self) -> Path:
        p = Path(self.out)
        return p if p.is_absolute() else Path(self.base_dir) / p

    # derived objects

    def hand_model(self):
        return load_hand(self.resolve(self.hand))

    def arm_rigs(self):
        return load_arms(self.resolve(self.arms))

    def _posed_mesh(self, spec: ObjectSpec) -> TriMesh:
        try:
            mesh = load_mesh(self.resolve(spec.mesh))
        except (OSError, MeshError) as e:
            raise ConfigError(f"cannot load mesh {spec.mesh}: {e}") from None
        T = spec.pose()
        return mesh.transformed(T.rotation, T.translation)

    def object_mesh(self) -> TriMesh:
        return self._posed_mesh(self.object)

    def scene(self, mesh: TriMesh = None) -> Scene:
        objs = {self.object.id: mesh if mesh is not None else self.object_mesh()}
        for o in self.distractors:
            objs[o.id] = self._posed_mesh(o)
        return Scene(objs, self.table_height)

    def resolved_strategy(self, mesh: TriMesh = None, hand=None) -> GraspStrategy:
        if self.strategy != AUTO:
            return GraspStrategy.parse(self.strategy)
        span = (hand or self.hand_model()).span
        return choose_strategy(mesh if mesh is not None else self.object_mesh(),
                               self.object.mass, span)

    def seed_list(self) -> list:
        if self.seeds is not None:
            return [int(s) for s in self.seeds]
        return list(range(self.seed, self.seed + self.n_candidates))

    def target_wrenches(self) -> np.ndarray:
        if self.targets is not None:
            t = np.asarray(self.targets, float)
            if t.ndim != 2 or t.shape[1] != 6:
                raise ConfigError("targets must be a list of 6-vectors")
            return t
        return default_targets(self.object.mass, self.disturbance)

    def context(self, mesh: TriMesh = None, hand=None) -> GraspContext:
        mesh = mesh if mesh is not None else self.object_mesh()
        hand = hand or self.hand_model()
        return GraspContext.build(mesh, hand, self.resolved_strategy(mesh, hand),
                                  mass=self.object.mass, mu=self.mu, edge_count=self.edge_count,
                                  weights=self.weights, table_height=self.table_height,
                                  targets=self.target_wrenches())

    def snapshot(self, ctx: GraspContext) -> dict:
        """Everything that determines results, for records and hashing."""
        def dc(x):
            return {f.name: getattr(x, f.name) for f in fields(x)}
        return {
            "object": {"id": self.object.id, "mesh": Path(self.object.mesh).name,
                       "mass": self.object.mass, "position": list(self.object.position),
                       "rpy": list(self.object.rpy)},
            "strategy": str(ctx.strategy),
            "table_height": self.table_height,
            "seeds": self.seed_list(),
            "cone": {"mu": self.mu, "edge_count": self.edge_count},
            "targets": ctx.targets,
            "com": ctx.com,
            "alpha": ctx.alpha,
            "weights": dc(self.weights),
            "thresholds": dc(self.thresholds),
            "optimizer": dc(self.optimizer),
            "ik": dc(self.ik),
            "demo": dc(self.demo),
            "distractors": [{"id": o.id, "mesh": Path(o.mesh).name, "position": list(o.position),
                             "rpy": list(o.rpy)} for o in self.distractors],
        }

    def snapshot_hash(self, ctx: GraspContext) -> str:
        return jsonio.content_hash(self.snapshot(ctx))
