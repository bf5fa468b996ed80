"""Command line front end.

Exit codes: 0 success, 2 configuration error, 3 no candidate passed
selection, 4 planning failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import jsonio
from .config import AUTO, ConfigError, RunConfig, choose_strategy
from .demo import (DatasetError, DemoRecord, append_records, build_demo, read_dataset)
from .fixtures import fixture_root
from .geometry import MeshError, center_of_mass, load_mesh
from .selection import filter_batch, select_preferred
from .synthesis import CandidateBatch, synthesize_batch

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EMPTY = 3
EXIT_PLANNING = 4

CANDIDATES_FILE = "candidates.json"
SELECTION_FILE = "selection.json"
DATASET_DIR = "dataset"

log = logging.getLogger("graspforge")


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


def _write(path: Path, obj) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(jsonio.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _read(path: Path) -> dict:
    if not path.exists():
        raise ConfigError(f"file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from None


def _load_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config is required for this command")
    cfg = RunConfig.load(args.config)
    return cfg.with_overrides(seed=args.seed, strategy=args.strategy, out=args.out,
                              jobs=args.jobs)


class _Session:
    """Lazily built pipeline objects for one config."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.mesh = cfg.object_mesh()
        self.hand = cfg.hand_model()
        self.ctx = cfg.context(self.mesh, self.hand)
        self.snapshot = cfg.snapshot(self.ctx)
        self.config_hash = jsonio.content_hash(self.snapshot)

    def check_hash(self, d: dict, what: str) -> None:
        if d.get("config_hash") != self.config_hash:
            raise ConfigError(f"{what} was produced with a different configuration "
                              f"({d.get('config_hash')} != {self.config_hash})")


def synthesize(cfg: RunConfig) -> Path:
    s = _Session(cfg)
    log.info("synthesizing %d %s candidates for %s", cfg.n_candidates, s.ctx.strategy,
             cfg.object.id)
    batch = synthesize_batch(s.ctx, cfg.n_candidates, cfg.seed_list(), cfg.optimizer, cfg.jobs)
    path = cfg.out_dir / CANDIDATES_FILE
    _write(path, {"object_id": cfg.object.id, "strategy": str(s.ctx.strategy),
                  "config_hash": s.config_hash, "batch": batch.to_dict()})
    return path


def select(cfg: RunConfig, batch_path: Path = None) -> dict:
    s = _Session(cfg)
    d = _read(batch_path or cfg.out_dir / CANDIDATES_FILE)
    s.check_hash(d, "candidate batch")
    batch = CandidateBatch.from_dict(d["batch"])
    arms = cfg.arm_rigs()
    scene = cfg.scene(s.mesh)
    report = filter_batch(batch, s.ctx, arms, scene, cfg.object.id, cfg.thresholds, cfg.ik)
    current = [a.home_pose() for a in arms]
    best = select_preferred(batch, report, current)
    out = {
        "object_id": cfg.object.id,
        "config_hash": s.config_hash,
        "preferred": best,
        "candidate": None if best is None else batch[best].to_dict(),
        "arm_joints": None if best is None else report.entries[best].to_dict()["arm_joints"],
        "physical_pass_rate": report.physical_pass_rate,
        "report": report.to_dict(),
    }
    _write(cfg.out_dir / SELECTION_FILE, out)
    return out


def demo(cfg: RunConfig, selection_path: Path = None) -> DemoRecord:
    from .synthesis import Candidate
    s = _Session(cfg)
    d = _read(selection_path or cfg.out_dir / SELECTION_FILE)
    s.check_hash(d, "selection")
    if d["preferred"] is None:
        raise CommandError("selection holds no preferred grasp", EXIT_EMPTY)
    cand = Candidate.from_dict(d["candidate"])
    joints = tuple(None if q is None else np.asarray(q, float) for q in d["arm_joints"])
    arms = cfg.arm_rigs()
    result = build_demo(cand.pose, s.ctx, arms, cfg.scene(s.mesh), cfg.object.id, joints,
                        cfg.demo, cfg.ik)
    if not result:
        raise CommandError(f"planning failed for {cfg.object.id} (seed {cand.seed}): {result}",
                           EXIT_PLANNING)
    record = DemoRecord(cfg.object.id, cfg.object.mass, str(s.ctx.strategy), cand.pose,
                        tuple(result.waypoints), result.validation, s.snapshot, s.config_hash,
                        grasp_seed=cand.seed, grasp_energy=cand.energy.to_dict())
    append_records(cfg.out_dir / DATASET_DIR, [record])
    return record


def stats(records) -> dict:
    """Counts, success rates and grasp-energy summaries, overall and per strategy."""
    def summary(rs):
        n = len(rs)
        ok = sum(r.success for r in rs)
        e = [r.grasp_energy["total"] for r in rs if r.grasp_energy]
        out = {"records": n, "success": ok, "success_rate": ok / n if n else 0.0}
        if e:
            out["energy"] = {"min": float(np.min(e)), "median": float(np.median(e)),
                             "mean": float(np.mean(e)), "max": float(np.max(e))}
        return out
    by = {}
    for r in records:
        by.setdefault(r.strategy, []).append(r)
    return {**summary(records), "by_strategy": {k: summary(v) for k, v in sorted(by.items())}}


def format_stats(st: dict) -> str:
    if st["records"] == 0:
        return "0 records"
    lines = [f"{st['records']} records, {st['success']} successful, "
             f"success rate {st['success_rate']:.3f}"]
    for k, v in st["by_strategy"].items():
        line = f"  {k}: {v['records']} records, success rate {v['success_rate']:.3f}"
        if "energy" in v:
            e = v["energy"]
            line += (f", energy min {e['min']:.3e} median {e['median']:.3e} "
                     f"max {e['max']:.3e}")
        lines.append(line)
    return "\n".join(lines)


def inspect_mesh(path: Path, mass: float) -> dict:
    mesh = load_mesh(path)
    ext = mesh.extents
    info = {"name": mesh.name, "vertices": len(mesh.vertices), "faces": len(mesh.faces),
            "watertight": bool(mesh.watertight), "extents": ext, "area": float(mesh.face_areas.sum())}
    if mesh.watertight:
        com = center_of_mass(mesh)
        info.update(volume=float(mesh.signed_volume), center_of_mass=com,
                    bounding_radius=float(mesh.bounding_radius(com)))
    info["auto_strategy"] = str(choose_strategy(mesh, mass))
    return info


def _resolve_input(p) -> Path:
    p = Path(p)
    if p.exists() or p.is_absolute():
        return p
    return fixture_root() / p


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration JSON")
    common.add_argument("--seed", type=int, help="base seed (candidates use seed..seed+n-1)")
    common.add_argument("--strategy", help=f"grasp strategy or '{AUTO}'")
    common.add_argument("--out", help="output directory")
    common.add_argument("--jobs", type=int, help="worker processes for synthesis")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="graspforge", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("synthesize", parents=[common], help="generate a candidate batch")
    sp = sub.add_parser("select", parents=[common], help="filter and rank candidates")
    sp.add_argument("batch", nargs="?", help="candidate batch file (default: <out>/candidates.json)")
    sp = sub.add_parser("demo", parents=[common], help="plan, validate and record a demonstration")
    sp.add_argument("selection", nargs="?", help="selection file (default: <out>/selection.json)")
    sp = sub.add_parser("stats", parents=[common], help="summarize a dataset")
    sp.add_argument("dataset", nargs="?", help="dataset directory (default: <out>/dataset)")
    sp = sub.add_parser("inspect-mesh", parents=[common], help="report mesh properties")
    sp.add_argument("mesh", help="OBJ file (relative paths also tried under the fixture root)")
    sp.add_argument("--mass", type=float, default=0.1, help="object mass for the auto strategy")
    return p


def _run(args) -> int:
    if args.command == "synthesize":
        path = synthesize(_load_config(args))
        print(f"wrote {path}")
    elif args.command == "select":
        cfg = _load_config(args)
        out = select(cfg, Path(args.batch) if args.batch else None)
        n = len(out["report"]["entries"])
        print(f"physical filter pass rate {out['physical_pass_rate']:.3f} over {n} candidates")
        if out["preferred"] is None:
            print("no candidate passed all filters")
            return EXIT_EMPTY
        print(f"preferred candidate index {out['preferred']} "
              f"(seed {out['candidate']['seed']})")
    elif args.command == "demo":
        rec = demo(_load_config(args), Path(args.selection) if args.selection else None)
        v = rec.validation
        print(f"recorded {rec.object_id}: {len(rec.waypoints)} waypoints, "
              f"lift {v.lift_height_m:.4f} m, residual {v.gravity_residual:.3e}, "
              f"success={str(v.success).lower()}")
    elif args.command == "stats":
        if args.dataset:
            root = Path(args.dataset)
        else:
            root = _load_config(args).out_dir / DATASET_DIR
        if not root.is_dir():
            raise ConfigError(f"dataset directory not found: {root}")
        records = read_dataset(root) if (root / "manifest.json").exists() else []
        print(format_stats(stats(records)))
    elif args.command == "inspect-mesh":
        path = _resolve_input(args.mesh)
        if not path.exists():
            raise ConfigError(f"mesh not found: {args.mesh}")
        info = inspect_mesh(path, args.mass)
        print(json.dumps({k: v.tolist() if isinstance(v, np.ndarray) else v
                          for k, v in info.items()}, indent=2))
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return _run(args)
    except CommandError as e:
        log.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except (ConfigError, DatasetError, MeshError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
