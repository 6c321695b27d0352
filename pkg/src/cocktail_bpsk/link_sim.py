"""Seeded Monte Carlo transceiver for the two-step cocktail BPSK detector.

The noise here is the real noise on the signal rail: ``NoiseSpec.sigma2``
is the variance of n in y = alpha*x1 + beta*x2 + n.

Trials are split into fixed-size chunks. Chunk ``i`` draws from a Philox
stream keyed by ``(seed, i)``, so the result does not depend on how many
workers process the chunks. Partial sums are reduced in chunk order.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .mi_core import LOG2E, Constellation, NoiseSpec, q_function
from .scheme import CocktailParams, constellation

CHUNK_SIZE = 1 << 18


class CancellationMode(str, enum.Enum):
    GENIE = "genie"
    DECISION_DIRECTED = "decision_directed"

    @classmethod
    def parse(cls, value: "str | CancellationMode") -> "CancellationMode":
        if isinstance(value, cls):
            return value
        if value == "dd":
            return cls.DECISION_DIRECTED
        return cls(value)


@dataclass(frozen=True)
class SimConfig:
    num_symbols: int
    seed: int = 0
    cancellation_mode: CancellationMode = CancellationMode.GENIE
    workers: int = 1

    def __post_init__(self):
        if self.num_symbols < 1:
            raise ValueError(f"num_symbols must be >= 1, got {self.num_symbols!r}")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers!r}")
        object.__setattr__(self, "cancellation_mode", CancellationMode.parse(self.cancellation_mode))


@dataclass(frozen=True)
class SimReport:
    ber_layer1: float
    ber_layer2: float
    mi_sample_total_bits: float
    errors_layer1: int
    errors_layer2: int
    symbols: int
    stderr_ber1: float
    stderr_ber2: float

    def format(self) -> str:
        lines = [
            f"symbols = {self.symbols}",
            f"errors_layer1 = {self.errors_layer1}",
            f"errors_layer2 = {self.errors_layer2}",
            f"ber_layer1 = {self.ber_layer1:.9g}",
            f"ber_layer2 = {self.ber_layer2:.9g}",
            f"stderr_ber1 = {self.stderr_ber1:.9g}",
            f"stderr_ber2 = {self.stderr_ber2:.9g}",
            f"mi_sample_total_bits = {self.mi_sample_total_bits:.9g}",
        ]
        return "\n".join(lines) + "\n"


def _rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, chunk])))


def _chunks(n: int) -> list[tuple[int, int]]:
    return [(i, min(CHUNK_SIZE, n - i * CHUNK_SIZE)) for i in range(-(-n // CHUNK_SIZE))]


def _log_ratio(y: np.ndarray, x: np.ndarray, c: Constellation, sigma2: float) -> np.ndarray:
    """Natural-log ratio log[p(y|x) / sum_j w_j p(y|x_j)] per sample."""
    pts = np.array(c.points)
    log_w = np.log(np.array(c.probs))
    d = y[:, None] - pts[None, :]
    log_mix = np.logaddexp.reduce(log_w[None, :] - d * d / (2.0 * sigma2), axis=1)
    return -((y - x) ** 2) / (2.0 * sigma2) - log_mix


def _sim_chunk(params, sigma, genie, c4, seed, chunk, m):
    rng = _rng(seed, chunk)
    x1 = 2 * rng.integers(0, 2, size=m, dtype=np.int8) - 1
    x2 = 2 * rng.integers(0, 2, size=m, dtype=np.int8) - 1
    x = params.alpha * x1 + params.beta * x2
    y = x + sigma * rng.standard_normal(m)

    x1_hat = np.where(y >= 0, 1, -1)
    y2 = y - params.alpha * (x1 if genie else x1_hat)
    x2_hat = np.where(y2 >= 0, 1, -1)

    lr = _log_ratio(y, x, c4, sigma * sigma)
    return (
        int(np.count_nonzero(x1_hat != x1)),
        int(np.count_nonzero(x2_hat != x2)),
        math.fsum(lr),
    )


def _map_chunks(fn, jobs, workers):
    if workers == 1 or len(jobs) == 1:
        return [fn(*j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda j: fn(*j), jobs))


def simulate(params: CocktailParams, noise: NoiseSpec, cfg: SimConfig) -> SimReport:
    """Run ``cfg.num_symbols`` independent uses of the layered link.

    x1 is detected by the sign of y (zero decides +1). Layer 2 is detected by
    the sign of y - alpha*x1_hat, or y - alpha*x1 in genie mode.
    """
    genie = cfg.cancellation_mode is CancellationMode.GENIE
    c4 = constellation(params)
    jobs = [
        (params, noise.sigma, genie, c4, cfg.seed, i, m) for i, m in _chunks(cfg.num_symbols)
    ]
    parts = _map_chunks(_sim_chunk, jobs, cfg.workers)

    n = cfg.num_symbols
    e1 = sum(p[0] for p in parts)
    e2 = sum(p[1] for p in parts)
    mi = math.fsum(p[2] for p in parts) / n * LOG2E
    p1, p2 = e1 / n, e2 / n
    return SimReport(
        ber_layer1=p1,
        ber_layer2=p2,
        mi_sample_total_bits=mi,
        errors_layer1=e1,
        errors_layer2=e2,
        symbols=n,
        stderr_ber1=math.sqrt(p1 * (1 - p1) / n),
        stderr_ber2=math.sqrt(p2 * (1 - p2) / n),
    )


def ber_analytic_layer1(params: CocktailParams, noise: NoiseSpec) -> float:
    """Sign-detector error rate for x1: 0.5*Q(A1/sigma) + 0.5*Q(A2/sigma)."""
    s = noise.sigma
    return 0.5 * q_function((params.alpha + params.beta) / s) + 0.5 * q_function(
        (params.alpha - params.beta) / s
    )


def ber_analytic_layer2(params: CocktailParams, noise: NoiseSpec) -> float:
    """Layer-2 error rate with perfect cancellation, Q(beta/sigma)."""
    return q_function(params.beta / noise.sigma)


def _mc_chunk(c, sigma, seed, chunk, m):
    rng = _rng(seed, chunk)
    idx = rng.choice(len(c.points), size=m, p=np.array(c.probs))
    x = np.array(c.points)[idx]
    y = x + sigma * rng.standard_normal(m)
    lr = _log_ratio(y, x, c, sigma * sigma)
    return math.fsum(lr), math.fsum(lr * lr)


def mi_monte_carlo_stats(
    c: Constellation, noise: NoiseSpec, n: int, seed: int, workers: int = 1
) -> tuple[float, float]:
    """Sample estimate of I(X;Y) in bits and its standard error."""
    if n < 1000:
        raise ValueError(f"need at least 1000 samples, got {n!r}")
    jobs = [(c, noise.sigma, seed, i, m) for i, m in _chunks(n)]
    parts = _map_chunks(_mc_chunk, jobs, workers)
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0) * n / (n - 1)
    return mean * LOG2E, math.sqrt(var / n) * LOG2E


def mi_monte_carlo(c: Constellation, noise: NoiseSpec, n: int, seed: int) -> float:
    """Average of log2 p(y|x)/p(y) over ``n`` drawn (x, y) pairs."""
    return mi_monte_carlo_stats(c, noise, n, seed)[0]
