"""Seeded closed-loop episodes and Monte-Carlo aggregation.

Each run index owns three independent RNG streams (availability,
disturbance, initial state) derived deterministically from the master
seed, so comparing controllers on the same run index reuses identical
(N, w) draws: common random numbers across controller variants.

Two execution paths produce identical per-run costs: a per-run reference
loop (`run_episode`, works with any plant and records full traces) and a
batch engine that steps all runs at once through vectorized plant
closures. `monte_carlo` picks the batch path whenever the plant supports
it.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .availability import AvailabilityModel, make_sampler, require_valid
from .controller import (BufferState, ControllerKind, controller_step,
                         empty_buffer, tentative_sequence, DECREASE_SLACK,
                         DECREASE_CHECK_LIMIT)
from .errors import CertificateViolation, ConfigError
from .plants import DisturbanceModel, PlantModel

OVERFLOW_GUARD = 1e12
CI_Z = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class SimConfig:
    """Everything one Monte-Carlo study needs, including the seeding policy."""

    plant: PlantModel
    availability: AvailabilityModel
    controller: ControllerKind
    disturbance: DisturbanceModel = DisturbanceModel()
    horizon: int = 10_000
    runs: int = 200
    master_seed: int = 0
    x0: Optional[np.ndarray] = None
    x0_box: Optional[Tuple[float, float]] = None  # uniform box, overrides x0
    q_x: float = 0.2
    r_u: float = 2.0

    def __post_init__(self):
        if self.horizon < 1:
            raise ConfigError(f"horizon must be >= 1, got {self.horizon}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        require_valid(self.availability)
        if self.disturbance.dim != self.plant.m:
            raise ConfigError(
                f"disturbance dim {self.disturbance.dim} != plant disturbance dim {self.plant.m}")
        if self.x0 is not None:
            object.__setattr__(self, "x0", np.asarray(self.x0, dtype=float))
            if self.x0.shape != (self.plant.n,):
                raise ConfigError(f"x0 must have shape ({self.plant.n},)")

    @property
    def buffer_capacity(self) -> int:
        cap = self.availability.max_len
        if self.controller.buffer_cap is not None:
            cap = min(cap, self.controller.buffer_cap)
        return max(cap, 1)


def default_x0(plant: PlantModel) -> np.ndarray:
    """All-ones initial state; keeps runs comparable across plants."""
    return np.ones(plant.n)


def run_streams(master_seed: int, run_index: int):
    """(availability, disturbance, initial-state) generators for one run."""
    root = np.random.SeedSequence([int(master_seed), int(run_index)])
    children = root.spawn(3)
    return tuple(np.random.default_rng(c) for c in children)


def _initial_state(config: SimConfig, init_rng: np.random.Generator) -> np.ndarray:
    if config.x0_box is not None:
        lo, hi = config.x0_box
        return init_rng.random(config.plant.n) * (hi - lo) + lo
    if config.x0 is not None:
        return config.x0.copy()
    return default_x0(config.plant)


@dataclass
class SimTrace:
    """Per-step closed-loop records; truncated early when the state overflows."""

    x: np.ndarray  # (steps, n)
    u: np.ndarray  # (steps, p)
    n_seq: np.ndarray  # (steps,)
    lam: np.ndarray  # (steps,)
    v: np.ndarray  # (steps,)
    diverged: bool

    @property
    def steps(self) -> int:
        return self.x.shape[0]


def run_episode(config: SimConfig, run_index: int,
                forced_n: Optional[Sequence[int]] = None) -> SimTrace:
    """Simulate one closed-loop episode; deterministic given (master_seed, run_index).

    `forced_n` replaces the availability draws with a fixed sequence-length
    schedule (used for trace-level checks).
    """
    plant = config.plant
    avail_rng, dist_rng, init_rng = run_streams(config.master_seed, run_index)
    sampler = make_sampler(config.availability, avail_rng)
    x = _initial_state(config, init_rng)
    buf = empty_buffer(config.buffer_capacity, plant.p)

    horizon = config.horizon if forced_n is None else min(config.horizon, len(forced_n))
    xs = np.empty((horizon, plant.n))
    us = np.empty((horizon, plant.p))
    ns = np.empty(horizon, dtype=np.int64)
    lams = np.empty(horizon, dtype=np.int64)
    vs = np.empty(horizon)
    diverged = False

    for k in range(horizon):
        n_avail = int(forced_n[k]) if forced_n is not None else sampler.sample()
        u, buf = controller_step(config.controller, plant, x, n_avail, buf)
        w = config.disturbance.draw(dist_rng, ())
        xs[k], us[k], ns[k], lams[k] = x, u, n_avail, buf.effective_length
        vs[k] = float(plant.lyapunov(x))
        x = plant.f(x, u, w)
        if not np.all(np.isfinite(x)) or float(np.linalg.norm(x)) > OVERFLOW_GUARD:
            diverged = True
            horizon = k + 1
            break

    return SimTrace(xs[:horizon], us[:horizon], ns[:horizon], lams[:horizon],
                    vs[:horizon], diverged)


def empirical_cost(trace: SimTrace, q_x: float, r_u: float) -> float:
    """Per-step average of q_x*|x|^2 + r_u*|u|^2; infinite for diverged traces."""
    if trace.diverged:
        return float("inf")
    stage = q_x * np.sum(trace.x ** 2, axis=1) + r_u * np.sum(trace.u ** 2, axis=1)
    return float(np.sum(stage)) / trace.steps


@dataclass
class CostSummary:
    """Aggregated empirical costs over runs; mean/SE/CI over non-diverged runs."""

    mean: float
    stderr: float
    ci95: Tuple[float, float]
    per_run_costs: np.ndarray
    diverged_count: int

    @classmethod
    def from_costs(cls, costs: np.ndarray) -> "CostSummary":
        costs = np.asarray(costs, dtype=float)
        finite = costs[np.isfinite(costs)]
        diverged = int(costs.size - finite.size)
        if finite.size == 0:
            return cls(float("inf"), float("nan"), (float("nan"), float("nan")), costs, diverged)
        mean = float(np.mean(finite))
        stderr = float(np.std(finite, ddof=1) / np.sqrt(finite.size)) if finite.size > 1 else 0.0
        return cls(mean, stderr, (mean - CI_Z * stderr, mean + CI_Z * stderr), costs, diverged)


def _presample_run(config: SimConfig, run_index: int):
    """(N schedule, disturbance draws, x0) for one run, matching run_episode's streams."""
    avail_rng, dist_rng, init_rng = run_streams(config.master_seed, run_index)
    sampler = make_sampler(config.availability, avail_rng)
    n_sched = sampler.presample(config.horizon)
    w = config.disturbance.draw(dist_rng, (config.horizon,))
    return n_sched, w, _initial_state(config, init_rng)


def _batch_simulate(config: SimConfig,
                    checkpoints: Optional[Sequence[int]] = None):
    """Step all runs at once; returns (per-run costs, V means at checkpoints).

    Requires a vectorized plant. Arithmetic per run is identical to
    run_episode, so per-run costs agree bit-for-bit.
    """
    plant = config.plant
    horizon, runs = config.horizon, config.runs
    cap = config.buffer_capacity
    kind = config.controller
    rho, slack = plant.rho, DECREASE_SLACK

    n_all = np.empty((runs, horizon), dtype=np.int64)
    w_all = np.empty((runs, horizon, plant.m))
    x = np.empty((runs, plant.n))
    for r in range(runs):
        n_all[r], w_all[r], x[r] = _presample_run(config, r)
    if kind.buffer_cap is not None:
        n_all = np.minimum(n_all, kind.buffer_cap)

    buf = np.zeros((runs, cap, plant.p))
    lam = np.zeros(runs, dtype=np.int64)
    alive = np.ones(runs, dtype=bool)
    cost = np.zeros(runs)
    check_rows = []
    checkpoints = list(checkpoints or [])

    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(horizon):
            n_now = n_all[:, k]
            if kind.kind == "baseline":
                u = np.where((n_now >= 1)[:, None], plant.policy(x), 0.0)
            else:
                shifted = np.concatenate([buf[:, 1:], np.zeros((runs, 1, plant.p))], axis=1)
                lam_shift = np.maximum(lam - 1, 0)
                fresh = np.zeros_like(buf)
                chi = x
                for j in range(1, int(n_now.max(initial=0)) + 1):
                    act = n_now >= j
                    uj = plant.policy(chi)
                    nxt = plant.f(chi, uj, np.zeros((runs, plant.m)))
                    v = plant.lyapunov(chi)
                    bad = (act & alive & (v <= DECREASE_CHECK_LIMIT)
                           & (plant.lyapunov(nxt) > rho * v + slack * np.maximum(1.0, v)))
                    if np.any(bad):
                        raise CertificateViolation(j)
                    fresh[act, j - 1] = uj[act]
                    chi = np.where(act[:, None], nxt, chi)
                recompute = n_now >= 1
                slot_idx = np.arange(cap)[None, :, None]
                tail = shifted if kind.kind == "a2" else np.zeros_like(buf)
                cand = np.where(slot_idx < n_now[:, None, None], fresh, tail)
                buf = np.where(recompute[:, None, None], cand, shifted)
                lam_new = n_now if kind.kind == "a1" else np.maximum(n_now, lam - 1)
                lam = np.where(recompute, lam_new, lam_shift)
                u = buf[:, 0, :]

            if k in checkpoints:
                check_rows.append(plant.lyapunov(x).copy())
            stage = config.q_x * np.sum(x ** 2, axis=-1) + config.r_u * np.sum(u ** 2, axis=-1)
            cost = np.where(alive, cost + stage, cost)
            x_next = plant.f(x, u, w_all[:, k])
            dead = ~np.all(np.isfinite(x_next), axis=-1) | (np.linalg.norm(x_next, axis=-1) > OVERFLOW_GUARD)
            alive = alive & ~dead
            x = np.where(alive[:, None], x_next, x)

    costs = cost / horizon
    costs[~alive] = float("inf")
    v_at = np.array(check_rows) if check_rows else None  # (len(checkpoints), runs)
    return costs, v_at


def monte_carlo(config: SimConfig) -> CostSummary:
    """Run all episodes and aggregate; independent of execution path and order."""
    if config.plant.vectorized:
        costs, _ = _batch_simulate(config)
    else:
        costs = np.array([
            empirical_cost(run_episode(config, r), config.q_x, config.r_u)
            for r in range(config.runs)
        ])
    return CostSummary.from_costs(costs)


def mean_lyapunov_at(config: SimConfig, checkpoints: Sequence[int]):
    """Mean and standard error of V(x(k)) over runs at the given steps."""
    if config.plant.vectorized:
        _, v_at = _batch_simulate(config, checkpoints=checkpoints)
    else:
        rows = []
        for r in range(config.runs):
            trace = run_episode(config, r)
            rows.append([trace.v[k] for k in checkpoints])
        v_at = np.asarray(rows).T
    means = v_at.mean(axis=1)
    ses = v_at.std(axis=1, ddof=1) / np.sqrt(v_at.shape[1])
    return means, ses


def improvement_pct(candidate: CostSummary, reference: CostSummary) -> float:
    """Percentage cost reduction of candidate relative to reference.

    A reference whose every run diverged counts as 100% improvement for a
    finite candidate (the reference cost is unbounded).
    """
    if not (reference.mean > 0.0):
        raise ConfigError("reference mean cost must be positive for improvement")
    if np.isinf(reference.mean):
        return 100.0 if np.isfinite(candidate.mean) else float("nan")
    return 100.0 * (reference.mean - candidate.mean) / reference.mean


def paired_diff(reference: CostSummary, candidate: CostSummary) -> Tuple[float, float]:
    """Mean and standard error of per-run cost differences (reference - candidate).

    Exploits common random numbers: differences are computed run by run,
    over runs where both controllers stayed finite.
    """
    ref, cand = reference.per_run_costs, candidate.per_run_costs
    mask = np.isfinite(ref) & np.isfinite(cand)
    d = ref[mask] - cand[mask]
    if d.size == 0:
        return float("nan"), float("nan")
    se = float(np.std(d, ddof=1) / np.sqrt(d.size)) if d.size > 1 else 0.0
    return float(np.mean(d)), se


def write_runs_csv(summary: CostSummary, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "cost", "diverged"])
        for r, c in enumerate(summary.per_run_costs):
            writer.writerow([r, repr(float(c)), int(not np.isfinite(c))])


def write_trace_csv(trace: SimTrace, path) -> None:
    n, p = trace.x.shape[1], trace.u.shape[1]
    header = (["k"] + [f"x{i + 1}" for i in range(n)] + [f"u{i + 1}" for i in range(p)]
              + ["N", "lambda", "V"])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k in range(trace.steps):
            writer.writerow([k, *map(repr, trace.x[k]), *map(repr, trace.u[k]),
                             int(trace.n_seq[k]), int(trace.lam[k]), repr(float(trace.v[k]))])
