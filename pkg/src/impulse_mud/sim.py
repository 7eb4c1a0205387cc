"""Seeded Monte Carlo BER estimation over parameter grids.

Every trial draws its own hopping pattern, information bits and noise
from a generator seeded by ``SeedSequence(master_seed, spawn_key=(point,
trial))``, so any point or trial can be replayed in isolation and results
do not depend on how trials are spread over worker processes.
"""
from __future__ import annotations

import csv
import io
import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .channel import (
    SystemParams,
    add_awgn,
    build_slot_matrix,
    generate_hopping,
    noise_std_from_ebn0,
    transmit,
)
from .codes import LinearCode, encode, encoder_for
from .detectors import (
    MAX_HYPOTHESIS_BITS,
    build_graph,
    detect_blinking_all,
    detect_cfg3,
    detect_fg3,
    detect_fp,
    detect_id,
    detect_map_oracle,
)

DETECTORS = ("id", "fg3", "cfg3", "fp", "br", "map")
CSV_COLUMNS = (
    "detector", "code", "K", "Nc", "n", "k", "ebn0_db", "iterations", "trials",
    "bit_errors", "ber", "frame_errors", "seed", "wall_time_s",
)
BATCH = 32  # trials per scheduling unit; fixed so results ignore worker count


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class StopRule:
    min_errors: int = 100
    max_trials: int = 10_000_000

    def __post_init__(self):
        if self.min_errors < 1 or self.max_trials < 1:
            raise ConfigError("min_errors and max_trials must be >= 1")


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: fixed system and detector, swept over grids.

    ``code=None`` means repetition transmission over all frames (one
    information bit per user). Grid points are the product
    users x iterations x Eb/N0, Eb/N0 varying fastest.
    """

    params: SystemParams
    detector: str
    code: LinearCode | None = None
    ebn0_db_grid: tuple[float, ...] = (0.0,)
    users_grid: tuple[int, ...] | None = None
    iterations: int = 8
    iterations_grid: tuple[int, ...] | None = None
    stop_rule: StopRule = field(default_factory=StopRule)
    master_seed: int = 0

    def __post_init__(self):
        det = self.detector.lower()
        object.__setattr__(self, "detector", det)
        if det not in DETECTORS:
            raise ConfigError(f"unknown detector {self.detector!r}; choose from {', '.join(DETECTORS)}")
        if not self.ebn0_db_grid:
            raise ConfigError("Eb/N0 grid is empty")
        if self.users_grid is not None and not self.users_grid:
            raise ConfigError("users grid is empty")
        if self.iterations_grid is not None and not self.iterations_grid:
            raise ConfigError("iterations grid is empty")
        if self.iterations < 1 or any(i < 1 for i in self.iterations_grid or ()):
            raise ConfigError("iterations must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if self.code is not None and self.code.n != self.params.frames:
            raise ConfigError(f"code length {self.code.n} differs from frames={self.params.frames}")
        if det == "cfg3" and self.code is None:
            raise ConfigError("cfg3 needs a code (use a repetition code for repetition transmission)")
        if det in ("id", "fg3", "fp", "br") and self.code is not None:
            raise ConfigError(f"{det} only supports repetition transmission (code must be unset)")
        if self.users_grid is not None:
            if any(u < 1 for u in self.users_grid):
                raise ConfigError("users must be >= 1")
            if np.ptp(self.params.amplitudes) != 0:
                raise ConfigError("a users sweep needs equal amplitudes for all users")
        if det == "map":
            k = self.k
            for users in self.users_grid or (self.params.users,):
                if users * k > MAX_HYPOTHESIS_BITS:
                    raise ConfigError(
                        f"map detector with K={users}, k={k} exceeds 2^{MAX_HYPOTHESIS_BITS} hypotheses"
                    )

    @property
    def n(self) -> int:
        return self.params.frames

    @property
    def k(self) -> int:
        return 1 if self.code is None else self.code.k

    @property
    def code_id(self) -> str:
        if self.code is None:
            return "uncoded" if self.params.frames == 1 else f"rep{self.params.frames}"
        return self.code.name or f"code{self.code.n}x{self.code.k}"

    def points(self) -> list["GridPoint"]:
        users = self.users_grid or (self.params.users,)
        iters = self.iterations_grid or (self.iterations,)
        return [
            GridPoint(i, u, it, float(e))
            for i, (u, it, e) in enumerate(itertools.product(users, iters, self.ebn0_db_grid))
        ]


@dataclass(frozen=True)
class GridPoint:
    index: int
    users: int
    iterations: int
    ebn0_db: float


@dataclass(frozen=True)
class BerRecord:
    detector: str
    code: str
    K: int
    Nc: int
    n: int
    k: int
    ebn0_db: float
    iterations: int
    trials: int
    bit_errors: int
    ber: float
    frame_errors: int
    seed: int
    wall_time_s: float

    def data(self) -> tuple:
        """Every field except the wall-clock time."""
        return tuple(getattr(self, c) for c in CSV_COLUMNS[:-1])


def trial_rng(master_seed: int, point_index: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(point_index, trial_index)))


def _point_params(config: ExperimentConfig, point: GridPoint) -> SystemParams:
    p = config.params
    if point.users == p.users:
        return p
    return SystemParams(point.users, p.chips_per_frame, p.frames, np.full(point.users, p.amplitudes[0]))


def point_noise_std(config: ExperimentConfig, params: SystemParams, ebn0_db: float) -> float:
    """Noise level for ``ebn0_db`` using the RMS user amplitude as reference."""
    if math.isinf(ebn0_db) and ebn0_db > 0:
        return 0.0
    ref = float(np.sqrt(np.mean(params.amplitudes**2)))
    return noise_std_from_ebn0(ebn0_db, ref, config.n, config.k)


def run_trial(config: ExperimentConfig, point: GridPoint, trial: int) -> tuple[int, int]:
    """(bit errors, user-frame errors) of one trial."""
    params = _point_params(config, point)
    rng = trial_rng(config.master_seed, point.index, trial)
    sigma = point_noise_std(config, params, point.ebn0_db)
    slot = build_slot_matrix(generate_hopping(params, rng), params)
    info = rng.integers(0, 2, size=(params.users, config.k), dtype=np.uint8)
    if config.code is None:
        words = np.repeat(info, params.frames, axis=1)
    else:
        words = encode(encoder_for(config.code), info)
    samples = add_awgn(transmit(slot, params, 1.0 - 2.0 * words), sigma, rng)
    det = config.detector
    if det == "br":
        result = detect_blinking_all(samples, slot, params)
    elif det == "map":
        floor = 1e-6 * float(params.amplitudes.min())
        result = detect_map_oracle(samples, slot, params, config.code, noise_std=max(sigma, floor))
    else:
        graph = build_graph(slot, params, config.code if det == "cfg3" else None)
        if det == "id":
            result = detect_id(graph, samples, point.iterations)
        elif det == "fg3":
            result = detect_fg3(graph, samples, point.iterations)
        elif det == "fp":
            result = detect_fp(graph, samples, point.iterations)
        else:
            result = detect_cfg3(graph, samples, iterations=point.iterations)
    wrong = result.decisions != info
    return int(wrong.sum()), int(wrong.any(axis=1).sum())


def _run_trials(config: ExperimentConfig, point: GridPoint, start: int, stop: int) -> list[tuple[int, int]]:
    return [run_trial(config, point, t) for t in range(start, stop)]


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        threads = int(os.environ.get("IMPULSE_MUD_THREADS", "1") or 1)
    if threads < 0:
        raise ConfigError("threads must be >= 0")
    return threads or (os.cpu_count() or 1)


def run_point(
    config: ExperimentConfig, point: GridPoint, *, threads: int | None = 1, executor=None
) -> BerRecord:
    """Run trials until ``min_errors`` bit errors or ``max_trials`` trials."""
    params = _point_params(config, point)
    rule = config.stop_rule
    t0 = time.perf_counter()
    bit_errors = frame_errors = trials = 0
    own_pool = None
    workers = resolve_threads(threads)
    if executor is None and workers > 1:
        own_pool = executor = ProcessPoolExecutor(workers)
    try:
        next_trial = 0
        done = False
        while not done and next_trial < rule.max_trials:
            # one round = `workers` consecutive batches, consumed strictly in trial order
            bounds = []
            for _ in range(workers):
                if next_trial >= rule.max_trials:
                    break
                stop = min(next_trial + BATCH, rule.max_trials)
                bounds.append((next_trial, stop))
                next_trial = stop
            if executor is None:
                chunks = (_run_trials(config, point, a, b) for a, b in bounds)
            else:
                chunks = executor.map(_run_trials, *zip(*[(config, point, a, b) for a, b in bounds]))
            for chunk in chunks:
                for be, fe in chunk:
                    if done:
                        break
                    trials += 1
                    bit_errors += be
                    frame_errors += fe
                    if bit_errors >= rule.min_errors:
                        done = True
    finally:
        if own_pool is not None:
            own_pool.shutdown()
    bits = trials * params.users * config.k
    return BerRecord(
        detector=config.detector,
        code=config.code_id,
        K=params.users,
        Nc=params.chips_per_frame,
        n=config.n,
        k=config.k,
        ebn0_db=point.ebn0_db,
        iterations=point.iterations,
        trials=trials,
        bit_errors=bit_errors,
        ber=bit_errors / bits if bits else 0.0,
        frame_errors=frame_errors,
        seed=config.master_seed,
        wall_time_s=time.perf_counter() - t0,
    )


class SweepError(RuntimeError):
    def __init__(self, failures: list[tuple[GridPoint, BaseException]]):
        self.failures = failures
        lines = [f"point {p.index} (K={p.users}, iterations={p.iterations}, ebn0_db={p.ebn0_db}): {e}" for p, e in failures]
        super().__init__("; ".join(lines))


def run_sweep(config: ExperimentConfig, *, threads: int | None = 1, progress=None) -> list[BerRecord]:
    """Every grid point in grid order. Worker processes are shared across points."""
    workers = resolve_threads(threads)
    records = []
    failures = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for point in config.points():
            try:
                rec = run_point(config, point, threads=workers, executor=pool)
            except Exception as exc:  # collected and reported per point
                failures.append((point, exc))
                continue
            records.append(rec)
            if progress is not None:
                progress(rec)
    finally:
        if pool is not None:
            pool.shutdown()
    if failures:
        raise SweepError(failures)
    return records


def _fmt_ber(x: float) -> str:
    if x == 0:
        return "0"
    return np.format_float_positional(x, precision=6, unique=False, fractional=False, trim="-")


def _fmt_float(x: float) -> str:
    return "inf" if math.isinf(x) else f"{x:g}"


def write_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([
            r.detector, r.code, r.K, r.Nc, r.n, r.k, _fmt_float(r.ebn0_db), r.iterations,
            r.trials, r.bit_errors, _fmt_ber(r.ber), r.frame_errors, r.seed, f"{r.wall_time_s:.3f}",
        ])
    return buf.getvalue()


def read_csv(text: str) -> list[BerRecord]:
    rows = list(csv.DictReader(io.StringIO(text)))
    out = []
    for row in rows:
        out.append(BerRecord(
            detector=row["detector"], code=row["code"], K=int(row["K"]), Nc=int(row["Nc"]),
            n=int(row["n"]), k=int(row["k"]), ebn0_db=float(row["ebn0_db"]),
            iterations=int(row["iterations"]), trials=int(row["trials"]),
            bit_errors=int(row["bit_errors"]), ber=float(row["ber"]),
            frame_errors=int(row["frame_errors"]), seed=int(row["seed"]),
            wall_time_s=float(row["wall_time_s"]),
        ))
    return out
