"""Projected finite-difference descent on the grasp objective."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ..kinematics import so3_exp
from .energy import EnergyBreakdown, GraspContext, total_energy
from .pose import BimanualGraspPose, init_grasp


@dataclass(frozen=True)
class OptimizerConfig:
    """Descent settings.

    Steps are taken in scaled coordinates: a unit move is
    ``translation_scale`` metres, one radian of wrist rotation or one
    radian of joint motion. ``fd_*`` are finite-difference half-widths in
    physical units. Trial step lengths are ``max_step / 2**k``.
    """

    max_iterations: int = 100
    fd_translation: float = 1e-4
    fd_rotation: float = 1e-4
    fd_joint: float = 1e-3
    translation_scale: float = 0.05
    initial_step: float = 0.05
    max_step: float = 0.2
    min_step: float = 1e-5
    min_decrease: float = 1e-10


@dataclass(frozen=True, eq=False)
class OptimizeResult:
    pose: BimanualGraspPose
    energy: EnergyBreakdown
    converged: bool
    iterations: int
    history: list = field(repr=False)
    initial_energy: EnergyBreakdown = None


class _Chart:
    """Local coordinates around a pose: per active hand (dt, dw, dq) in scaled units."""

    def __init__(self, pose: BimanualGraspPose, ctx: GraspContext, cfg: OptimizerConfig):
        self.pose, self.ctx, self.cfg = pose, ctx, cfg
        self.blocks = []
        n = 0
        for h in pose.active_indices:
            dof = ctx.hands[h].dof
            self.blocks.append((h, n, dof))
            n += 6 + dof
        self.size = n
        scale, fd = np.empty(n), np.empty(n)
        for h, s, dof in self.blocks:
            scale[s:s + 3] = cfg.translation_scale
            scale[s + 3:s + 6] = 1.0
            scale[s + 6:s + 6 + dof] = 1.0
            fd[s:s + 3] = cfg.fd_translation
            fd[s + 3:s + 6] = cfg.fd_rotation
            fd[s + 6:s + 6 + dof] = cfg.fd_joint
        self.scale, self.fd = scale, fd

    def retract(self, u: np.ndarray) -> BimanualGraspPose:
        """Pose at scaled offset ``u``: translate, rotate by exp on the left, clamp joints."""
        x = u * self.scale
        t = self.pose.translations.copy()
        R = self.pose.rotations.copy()
        q = list(self.pose.joints)
        for h, s, dof in self.blocks:
            t[h] = t[h] + x[s:s + 3]
            R[h] = so3_exp(x[s + 3:s + 6]) @ R[h]
            q[h] = self.ctx.hands[h].chain.clamp(q[h] + x[s + 6:s + 6 + dof])
        return BimanualGraspPose(t, R, tuple(q), self.pose.strategy)

    def energy(self, u) -> float:
        return total_energy(self.retract(u), self.ctx).total

    def gradient(self, h_scale: float = 1.0) -> np.ndarray:
        """Central-difference gradient in scaled coordinates."""
        g = np.zeros(self.size)
        for i in range(self.size):
            step = h_scale * self.fd[i] / self.scale[i]
            e = np.zeros(self.size)
            e[i] = step
            g[i] = (self.energy(e) - self.energy(-e)) / (2 * step)
        return g

    def project(self, g: np.ndarray) -> np.ndarray:
        """Drop joint components that would push past a limit."""
        g = g.copy()
        for h, s, dof in self.blocks:
            chain = self.ctx.hands[h].chain
            q = self.pose.joints[h]
            sl = slice(s + 6, s + 6 + dof)
            at_lo = (q <= chain.lower) & (g[sl] > 0)
            at_hi = (q >= chain.upper) & (g[sl] < 0)
            g[sl][at_lo | at_hi] = 0.0
        return g


def _grid(cfg: OptimizerConfig, k0: int):
    k = k0
    while cfg.max_step * 0.5 ** k >= cfg.min_step:
        yield k
        k += 1


def _search(chart: _Chart, d: np.ndarray, e0: float, cfg: OptimizerConfig, k0: int):
    for k in _grid(cfg, k0):
        cand = chart.retract(cfg.max_step * 0.5 ** k * d)
        e = total_energy(cand, chart.ctx)
        if e.total < e0:
            return k, cand, e
    return None


def optimize_grasp(pose0: BimanualGraspPose, ctx: GraspContext,
                   config: OptimizerConfig = None) -> OptimizeResult:
    """Descend the objective from ``pose0``.

    Each iteration takes the projected central-difference gradient and
    backtracks along its normalized negative, accepting only strict
    decreases. Step lengths live on a fixed halving grid; the search starts
    one notch above the last accepted length and, failing that, rescans the
    whole grid before declaring convergence, so a converged pose is a fixed
    point of a re-run.
    """
    cfg = config or OptimizerConfig()
    pose = pose0
    energy = total_energy(pose, ctx)
    initial = energy
    history = [energy.total]
    k = max(0, int(round(np.log2(cfg.max_step / cfg.initial_step))))
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        chart = _Chart(pose, ctx, cfg)
        g = chart.project(chart.gradient())
        norm = np.linalg.norm(g)
        if not np.isfinite(norm) or norm == 0.0:
            converged = True
            break
        d = -g / norm
        start = max(k - 1, 0)
        found = _search(chart, d, energy.total, cfg, start)
        if found is None and start > 0:
            found = _search(chart, d, energy.total, cfg, 0)
        if found is None:
            converged = True
            break
        k, pose, new = found
        decrease = energy.total - new.total
        energy = new
        history.append(energy.total)
        if decrease < cfg.min_decrease:
            converged = True
            break
    return OptimizeResult(pose, energy, converged, it, history, initial)


@dataclass(frozen=True, eq=False)
class Candidate:
    seed: int
    pose: BimanualGraspPose
    energy: EnergyBreakdown
    converged: bool
    iterations: int
    initial_energy: EnergyBreakdown

    def to_dict(self) -> dict:
        return {"seed": self.seed, "pose": self.pose.to_dict(), "energy": self.energy.to_dict(),
                "initial_energy": self.initial_energy.to_dict(),
                "converged": self.converged, "iterations": self.iterations}

    @classmethod
    def from_dict(cls, d: dict) -> "Candidate":
        return cls(int(d["seed"]), BimanualGraspPose.from_dict(d["pose"]),
                   EnergyBreakdown(**d["energy"]), bool(d["converged"]), int(d["iterations"]),
                   EnergyBreakdown(**d["initial_energy"]))


@dataclass(frozen=True, eq=False)
class CandidateBatch:
    """Candidates sorted by total energy, ties by seed."""

    candidates: tuple

    def __post_init__(self):
        ordered = sorted(self.candidates, key=lambda c: (c.energy.total, c.seed))
        object.__setattr__(self, "candidates", tuple(ordered))

    def __len__(self):
        return len(self.candidates)

    def __iter__(self):
        return iter(self.candidates)

    def __getitem__(self, i):
        return self.candidates[i]

    def to_dict(self) -> dict:
        return {"candidates": [c.to_dict() for c in self.candidates]}

    @classmethod
    def from_dict(cls, d: dict) -> "CandidateBatch":
        return cls(tuple(Candidate.from_dict(c) for c in d["candidates"]))


def run_candidate(ctx: GraspContext, seed: int, config: OptimizerConfig = None) -> Candidate:
    pose0 = init_grasp(ctx.mesh, ctx.hands, ctx.strategy, seed,
                       table_height=ctx.table_height, hull=ctx.hull)
    res = optimize_grasp(pose0, ctx, config)
    return Candidate(int(seed), res.pose, res.energy, res.converged, res.iterations,
                     res.initial_energy)


def _run_star(args):
    return run_candidate(*args)


def synthesize_batch(ctx: GraspContext, n: int, seeds=None, config: OptimizerConfig = None,
                     jobs: int = 1) -> CandidateBatch:
    """Initialize and optimize ``n`` candidates, one per seed.

    Seeds default to ``0..n-1``. Each candidate depends only on its seed, so
    results do not depend on ``jobs`` or on the order of ``seeds``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    seeds = list(range(n)) if seeds is None else [int(s) for s in seeds]
    if len(seeds) != n:
        raise ValueError(f"expected {n} seeds, got {len(seeds)}")
    jobs = (os.cpu_count() or 1) if jobs == 0 else jobs
    work = [(ctx, s, config) for s in seeds]
    if jobs <= 1:
        out = [_run_star(w) for w in work]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            out = list(ex.map(_run_star, work))
    return CandidateBatch(tuple(out))
