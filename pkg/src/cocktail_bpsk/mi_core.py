"""Entropy and mutual information of discrete-input real AWGN channels.

Everything here is in bits. The output density of a finite constellation
observed in Gaussian noise is a Gaussian mixture; its differential entropy
is integrated with composite Simpson on a uniform grid that is doubled
until two successive estimates agree to ``abs_tol``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

LOG2E = math.log2(math.e)

# p * log2(p) is taken as 0 below this density
_TINY_DENSITY = 1e-300
_LOG_TINY_DENSITY = math.log(_TINY_DENSITY)


class QuadratureConvergenceError(ArithmeticError):
    """Raised when Simpson refinement does not reach the requested tolerance.

    ``best`` carries the last (finest) estimate so callers can still use it.
    """

    def __init__(self, message: str, best: "MiResult"):
        super().__init__(message)
        self.best = best


@dataclass(frozen=True)
class Constellation:
    """Finite set of real signal points with their probabilities."""

    points: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        points = tuple(float(p) for p in self.points)
        probs = tuple(float(p) for p in self.probs)
        if not points:
            raise ValueError("constellation needs at least one point")
        if len(points) != len(probs):
            raise ValueError(f"{len(points)} points but {len(probs)} probabilities")
        if any(not math.isfinite(p) for p in points):
            raise ValueError("constellation points must be finite")
        if any(p < 0 or not math.isfinite(p) for p in probs):
            raise ValueError("probabilities must be finite and nonnegative")
        if abs(math.fsum(probs) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(probs)!r}, not 1")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def equiprobable(cls, points) -> "Constellation":
        points = tuple(points)
        n = len(points)
        return cls(points, (1.0 / n,) * n if n else ())

    @property
    def energy(self) -> float:
        return math.fsum(w * x * x for x, w in zip(self.points, self.probs))

    def scaled(self, s: float) -> "Constellation":
        return Constellation(tuple(s * x for x in self.points), self.probs)

    def _active(self) -> tuple[np.ndarray, np.ndarray]:
        # zero-probability points contribute nothing to the mixture
        pts = np.array(self.points)
        w = np.array(self.probs)
        keep = w > 0
        return pts[keep], w[keep]


@dataclass(frozen=True)
class NoiseSpec:
    """Real Gaussian noise of variance ``sigma2``."""

    sigma2: float

    def __post_init__(self):
        if not (self.sigma2 > 0 and math.isfinite(self.sigma2)):
            raise ValueError(f"noise variance must be positive and finite, got {self.sigma2!r}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-9
    max_refinements: int = 24
    tail_sigmas: float = 10.0

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive, got {self.abs_tol!r}")
        if self.max_refinements < 1:
            raise ValueError(f"max_refinements must be >= 1, got {self.max_refinements!r}")
        if not self.tail_sigmas >= 6:
            raise ValueError(f"tail_sigmas must be >= 6, got {self.tail_sigmas!r}")


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass(frozen=True)
class MiResult:
    value_bits: float
    est_error_bits: float
    evaluations: int = field(default=0)


def capacity(snr: float) -> float:
    """Gaussian-input capacity log2(1 + snr) in bits."""
    if snr < 0 or math.isnan(snr):
        raise ValueError(f"snr must be >= 0, got {snr!r}")
    return math.log2(1.0 + snr)


def noise_entropy(noise: NoiseSpec) -> float:
    """Differential entropy of N(0, sigma2) in bits."""
    return 0.5 * math.log2(2.0 * math.pi * math.e * noise.sigma2)


def _neg_plogp(y: np.ndarray, pts: np.ndarray, log_w: np.ndarray, sigma2: float) -> np.ndarray:
    # log p(y) via log-sum-exp over components, then -p log2 p
    d = y[:, None] - pts[None, :]
    log_terms = log_w[None, :] - d * d / (2.0 * sigma2)
    log_p = np.logaddexp.reduce(log_terms, axis=1) - 0.5 * math.log(2.0 * math.pi * sigma2)
    out = -np.exp(log_p) * log_p * LOG2E
    out[log_p < _LOG_TINY_DENSITY] = 0.0
    return out


def mixture_entropy(
    c: Constellation, noise: NoiseSpec, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> MiResult:
    """Differential entropy (bits) of the output of ``c`` observed in ``noise``.

    The integral of ``-p log2 p`` runs over
    ``[min(points) - tail_sigmas*sigma, max(points) + tail_sigmas*sigma]``.
    The starting grid spacing is at most one noise standard deviation; each
    refinement halves it and reuses the previous samples.
    """
    pts, w = c._active()
    log_w = np.log(w)
    sigma = noise.sigma
    lo = float(pts.min()) - q.tail_sigmas * sigma
    hi = float(pts.max()) + q.tail_sigmas * sigma
    width = hi - lo

    n = max(16, 1 << math.ceil(math.log2(width / sigma)))

    def f(y):
        return _neg_plogp(y, pts, log_w, noise.sigma2)

    y = np.linspace(lo, hi, n + 1)
    fy = f(y)
    ends = float(fy[0] + fy[-1])
    odd = math.fsum(fy[1:-1:2])
    even = math.fsum(fy[2:-1:2])
    evals = n + 1
    h = width / n
    prev = h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
    delta = math.inf

    for _ in range(q.max_refinements):
        n *= 2
        h = width / n
        mid = lo + h * np.arange(1, n, 2)
        even += odd
        odd = math.fsum(f(mid))
        evals += mid.size
        cur = h / 3.0 * (ends + 4.0 * odd + 2.0 * even)
        delta = abs(cur - prev)
        prev = cur
        if delta < q.abs_tol:
            return MiResult(float(cur), float(delta), evals)

    raise QuadratureConvergenceError(
        f"Simpson refinement stalled at delta={delta:.3g} bits after "
        f"{q.max_refinements} refinements (abs_tol={q.abs_tol:g})",
        MiResult(float(prev), float(delta), evals),
    )


def mi_discrete_awgn(
    c: Constellation, noise: NoiseSpec, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> MiResult:
    """I(X;Y) = H(Y) - H(N) for Y = X + N, X drawn from ``c``.

    The raw difference is returned; it can dip below zero by up to
    ``est_error_bits`` for (nearly) zero-information inputs.
    """
    try:
        h = mixture_entropy(c, noise, q)
    except QuadratureConvergenceError as exc:
        best = exc.best
        raise QuadratureConvergenceError(
            str(exc),
            MiResult(best.value_bits - noise_entropy(noise), best.est_error_bits, best.evaluations),
        ) from None
    return MiResult(h.value_bits - noise_entropy(noise), h.est_error_bits, h.evaluations)


def mi_binary_antipodal(snr: float, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Mutual information of equiprobable +-sqrt(snr) in unit-variance real noise."""
    if snr < 0 or math.isnan(snr):
        raise ValueError(f"snr must be >= 0, got {snr!r}")
    if snr == 0:
        return 0.0
    a = math.sqrt(snr)
    return mi_discrete_awgn(Constellation.equiprobable((a, -a)), NoiseSpec(1.0), q).value_bits


def q_function(x: float) -> float:
    """Gaussian tail probability P(N(0,1) > x)."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))
