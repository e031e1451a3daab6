"""Seeded, block-partitioned sampling for deterministic sweeps.

Every sweep is cut into blocks of BLOCK_SIZE indices. Block k of a named
stream draws from its own generator seeded by (seed, stream, k), so a sweep
produces bit-identical samples whatever the number of worker threads.
"""

import logging
import math
import os
import threading
import zlib
from collections.abc import Callable, Iterator
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from typing import TypeVar

import numpy as np
import numpy.typing as npt

from sqc_lab.errors import InvalidArgumentError
from sqc_lab.geometry.vectors import NormSpec, Vector, as_vector, norms

logger = logging.getLogger(__name__)

BLOCK_SIZE = 1024
THREADS_ENV = "SQCLAB_THREADS"

T = TypeVar("T")

_local = threading.local()


@dataclass(frozen=True)
class SamplerConfig:
    """Sampling budget and seed for a sweep."""

    seed: int = 0
    n_pairs: int = 10_000
    lambda_grid: int = 33  # interior λ count; 0.5 is always added
    jitter: bool = False

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise InvalidArgumentError(f"seed must be unsigned, got {self.seed}")
        if self.n_pairs < 1:
            raise InvalidArgumentError(f"n_pairs must be positive, got {self.n_pairs}")
        if self.lambda_grid < 1:
            raise InvalidArgumentError(f"lambda_grid must be positive, got {self.lambda_grid}")

    def lambdas(self) -> npt.NDArray[np.float64]:
        """Interior λ values: Chebyshev nodes on (0, 1) plus the midpoint.

        With jitter, every node except 0.5 moves by a seeded amount smaller than
        a quarter of the gap to its neighbours, so all values stay in (0, 1).
        """
        m = self.lambda_grid
        k = np.arange(1, m + 1)
        nodes = (1.0 - np.cos((2 * k - 1) * np.pi / (2 * m))) / 2.0
        nodes = nodes[np.abs(nodes - 0.5) > 1e-12]
        nodes = np.sort(np.append(nodes, 0.5))
        if self.jitter and nodes.size > 1:
            padded = np.concatenate(([0.0], nodes, [1.0]))
            gaps = np.minimum(np.diff(padded)[:-1], np.diff(padded)[1:])
            rng = block_rng(self.seed, "lambda-jitter", 0)
            shift = rng.uniform(-0.25, 0.25, size=nodes.size) * gaps
            shift[nodes == 0.5] = 0.0
            nodes = nodes + shift
        return nodes


def stream_key(stream: str) -> int:
    """Stable integer key for a named sample stream."""
    return zlib.crc32(stream.encode("utf-8"))


def block_rng(seed: int, stream: str, block: int) -> np.random.Generator:
    """Generator for one block of one stream."""
    return np.random.default_rng(np.random.SeedSequence([seed, stream_key(stream), block]))


def block_bounds(total: int) -> list[tuple[int, int]]:
    """Half-open index ranges covering range(total) in BLOCK_SIZE chunks."""
    return [(start, min(start + BLOCK_SIZE, total)) for start in range(0, total, BLOCK_SIZE)]


def worker_count() -> int:
    """Worker threads allowed for sweeps, capped by SQCLAB_THREADS."""
    default = os.cpu_count() or 1
    raw = os.getenv(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring {THREADS_ENV}={raw!r}: not an integer")
        return default
    if value < 1:
        logger.warning(f"Ignoring {THREADS_ENV}={raw!r}: must be positive")
        return default
    return value


@contextmanager
def serial_blocks() -> Iterator[None]:
    """Run every map_blocks call of the current thread in that thread.

    Callers that already run on a pool of worker_count() threads use this so the
    total stays within SQCLAB_THREADS.
    """
    previous = getattr(_local, "serial", False)
    _local.serial = True
    try:
        yield
    finally:
        _local.serial = previous


def map_blocks(
    fn: Callable[[int, int, int], T], total: int, workers: int | None = None
) -> list[T]:
    """Apply fn(block, start, stop) to every block, results in block order."""
    bounds = block_bounds(total)
    if getattr(_local, "serial", False):
        workers = 1
    workers = min(workers or worker_count(), max(len(bounds), 1))
    if workers <= 1:
        return [fn(k, start, stop) for k, (start, stop) in enumerate(bounds)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(fn, k, start, stop) for k, (start, stop) in enumerate(bounds)]
        return [f.result() for f in futures]


def unit_directions(
    rng: np.random.Generator, count: int, dim: int, n: NormSpec
) -> npt.NDArray[np.float64]:
    """Isotropic Gaussian draws normalized in the norm n."""
    d = rng.standard_normal((count, dim))
    lengths = norms(d, n)
    degenerate = lengths == 0
    if np.any(degenerate):
        d[degenerate] = 0.0
        d[degenerate, 0] = 1.0
        lengths[degenerate] = 1.0
    return d / lengths[:, None]


def sphere_points(
    center: Vector,
    radius: float,
    n: NormSpec,
    count: int,
    seed: int,
    stream: str = "sphere",
) -> npt.NDArray[np.float64]:
    """count points on the n-sphere of the given center and radius."""
    if not radius > 0:
        raise InvalidArgumentError(f"radius must be positive, got {radius}")
    if count < 0:
        raise InvalidArgumentError(f"count must be nonnegative, got {count}")
    if count == 0:
        return np.empty((0, center.size))
    blocks = [
        center + radius * unit_directions(block_rng(seed, stream, k), stop - start, center.size, n)
        for k, (start, stop) in enumerate(block_bounds(count))
    ]
    return np.concatenate(blocks, axis=0)


def sample_sphere(
    center: npt.ArrayLike, radius: float, n: NormSpec, cfg: SamplerConfig
) -> Iterator[Vector]:
    """Stream cfg.n_pairs points z with ‖z − center‖_n = radius.

    For L2 the directions are uniform on the unit sphere; other norms reuse the
    isotropic draw normalized in that norm.

    Raises:
        InvalidArgumentError: If radius <= 0.
    """
    c = as_vector(center, "center")
    if not radius > 0:
        raise InvalidArgumentError(f"radius must be positive, got {radius}")
    for k, (start, stop) in enumerate(block_bounds(cfg.n_pairs)):
        block = c + radius * unit_directions(block_rng(cfg.seed, "sphere", k), stop - start, c.size, n)
        yield from block


def ball_points(
    rng: np.random.Generator, center: Vector, radius: float, n: NormSpec, count: int
) -> npt.NDArray[np.float64]:
    """Points of the closed n-ball: a normalized direction scaled by radius·U^(1/dim).

    Uniform for L2; other norms only need coverage, not uniformity.
    """
    dim = center.size
    directions = unit_directions(rng, count, dim, n)
    scale = radius * rng.uniform(0.0, 1.0, size=count) ** (1.0 / dim)
    return center + scale[:, None] * directions


def box_points(
    rng: np.random.Generator, lo: Vector, hi: Vector, count: int
) -> npt.NDArray[np.float64]:
    """Uniform points of the box [lo, hi]."""
    return lo + (hi - lo) * rng.uniform(0.0, 1.0, size=(count, lo.size))


def scaled_boundary_count(dim: int, base: int = 4096) -> int:
    """Boundary directions for inclusion checks: base up to dim 4, doubling per extra dimension."""
    return base if dim <= 4 else base * 2 ** (dim - 4)


def circle_directions(count: int) -> npt.NDArray[np.float64]:
    """count evenly spaced unit vectors of the plane."""
    angles = 2.0 * math.pi * np.arange(count) / count
    return np.column_stack((np.cos(angles), np.sin(angles)))
