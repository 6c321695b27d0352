"""Cocktail BPSK: two BPSK layers superposed as x = alpha*x1 + beta*x2.

Noise convention
----------------
``NoiseSpec.sigma2`` passed to the functions in this module is the noise
power sigma_N^2 of the complex baseband channel, so the operating SNR is
``gamma = (alpha**2 + beta**2) / sigma2`` and the reference capacity is
``log2(1 + gamma)``. The cocktail symbol is real and occupies the in-phase
rail, which carries half of that noise power (see :func:`rail_noise`).
Under this convention a single BPSK layer at SNR ``g`` carries
``mi_binary_antipodal(2*g)`` bits, whose zero-SNR slope matches the
capacity slope log2(e).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mi_core import (
    DEFAULT_QUADRATURE,
    LOG2E,
    Constellation,
    NoiseSpec,
    QuadratureConfig,
    capacity,
    mi_binary_antipodal,
    mi_discrete_awgn,
    mixture_entropy,
)


@dataclass(frozen=True)
class CocktailParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.beta)):
            raise ValueError("amplitudes must be finite")
        if not self.beta > 0:
            raise ValueError(f"beta must be positive, got {self.beta!r}")
        if not self.alpha > self.beta:
            raise ValueError(
                f"alpha must exceed beta (got alpha={self.alpha!r}, beta={self.beta!r}); "
                "alpha == beta collapses the case-II amplitude to zero"
            )

    @classmethod
    def from_ratio(cls, ratio: float, e_in: float = 1.0) -> "CocktailParams":
        """Amplitudes with beta/alpha = ratio and alpha**2 + beta**2 = e_in."""
        if not 0 < ratio < 1:
            raise ValueError(f"ratio beta/alpha must lie in (0, 1), got {ratio!r}")
        alpha = math.sqrt(e_in / (1.0 + ratio * ratio))
        return cls(alpha, ratio * alpha)

    @property
    def ratio(self) -> float:
        return self.beta / self.alpha


@dataclass(frozen=True)
class DerivedQuantities:
    a1: float
    a2: float
    e_in: float
    e_used: float
    g_e: float
    gamma: float
    gamma1: float
    gamma2: float
    gamma3: float


@dataclass(frozen=True)
class AdrBreakdown:
    """Layered rate formula next to the exact mutual information at one SNR."""

    layer1_bits: float
    layer2_bits: float
    total_bits: float
    capacity_bits: float
    exact_layer1_bits: float
    exact_total_bits: float
    snr: float

    @property
    def gap_paper(self) -> float:
        return self.total_bits - self.capacity_bits

    @property
    def gap_exact(self) -> float:
        return self.exact_total_bits - self.capacity_bits

    @classmethod
    def zero(cls) -> "AdrBreakdown":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)


def derive(params: CocktailParams, noise: NoiseSpec) -> DerivedQuantities:
    a, b = params.alpha, params.beta
    s2 = noise.sigma2
    a1 = a + b
    a2 = a - b
    e_in = a * a + b * b
    e_used = a * a + 2.0 * b * b
    return DerivedQuantities(
        a1=a1,
        a2=a2,
        e_in=e_in,
        e_used=e_used,
        g_e=e_used - e_in,
        gamma=e_in / s2,
        gamma1=a1 * a1 / s2,
        gamma2=a2 * a2 / s2,
        gamma3=b * b / s2,
    )


def layer_symbol(x1: int, x2: int, params: CocktailParams) -> float:
    """Noise-free channel input alpha*x1 + beta*x2 for x1, x2 in {+1, -1}."""
    if x1 not in (1, -1) or x2 not in (1, -1):
        raise ValueError(f"BPSK symbols must be +1 or -1, got ({x1!r}, {x2!r})")
    return params.alpha * x1 + params.beta * x2


def rail_noise(noise: NoiseSpec) -> NoiseSpec:
    """Real-valued noise seen by the in-phase rail: half the complex noise power."""
    return NoiseSpec(noise.sigma2 / 2.0)


def bpsk_rate(gamma: float, q: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Mutual information of a BPSK layer at complex-baseband SNR ``gamma``."""
    return mi_binary_antipodal(2.0 * gamma, q)


def constellation(params: CocktailParams) -> Constellation:
    a1 = params.alpha + params.beta
    a2 = params.alpha - params.beta
    return Constellation.equiprobable((a1, a2, -a2, -a1))


def mi_exact_total(
    params: CocktailParams, noise: NoiseSpec, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """I(X;Y) of the equiprobable four-point input, computed without layering."""
    return mi_discrete_awgn(constellation(params), rail_noise(noise), q).value_bits


def mi_exact_layer1(
    params: CocktailParams, noise: NoiseSpec, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """I(X1;Y) with x2 unknown at the receiver.

    Computed as H(Y) - H(Y|X1). Given x1 = +1 the output is the equal-weight
    mixture centred on A1 and A2; x1 = -1 mirrors it, so both conditionals
    share one entropy.
    """
    rn = rail_noise(noise)
    a1 = params.alpha + params.beta
    a2 = params.alpha - params.beta
    h_y = mixture_entropy(constellation(params), rn, q).value_bits
    h_y_given_x1 = mixture_entropy(Constellation.equiprobable((a1, a2)), rn, q).value_bits
    return h_y - h_y_given_x1


def adr_paper(
    params: CocktailParams, noise: NoiseSpec, q: QuadratureConfig = DEFAULT_QUADRATURE
) -> AdrBreakdown:
    """Per-layer ADR as the case-averaged sum, plus capacity and exact MI.

    ``layer1_bits`` averages the two single-amplitude BPSK rates (case index
    treated as known), ``layer2_bits`` is BPSK at beta**2/sigma2. The
    ``exact_*`` fields carry the true mutual information of the same input.
    """
    d = derive(params, noise)
    layer1 = 0.5 * bpsk_rate(d.gamma1, q) + 0.5 * bpsk_rate(d.gamma2, q)
    layer2 = bpsk_rate(d.gamma3, q)
    return AdrBreakdown(
        layer1_bits=layer1,
        layer2_bits=layer2,
        total_bits=layer1 + layer2,
        capacity_bits=capacity(d.gamma),
        exact_layer1_bits=mi_exact_layer1(params, noise, q),
        exact_total_bits=mi_exact_total(params, noise, q),
        snr=d.gamma,
    )


def normalized_point(ratio: float, snr: float) -> tuple[CocktailParams, NoiseSpec]:
    """Unit input energy and sigma2 = 1/snr, so that gamma == snr."""
    if not snr > 0:
        raise ValueError(f"snr must be positive here, got {snr!r}")
    return CocktailParams.from_ratio(ratio), NoiseSpec(1.0 / snr)


def adr_at_snr(ratio: float, snr: float, q: QuadratureConfig = DEFAULT_QUADRATURE) -> AdrBreakdown:
    """:func:`adr_paper` on the unit-energy normalization; snr == 0 is exact zeros."""
    if snr == 0:
        CocktailParams.from_ratio(ratio)
        return AdrBreakdown.zero()
    params, noise = normalized_point(ratio, snr)
    return adr_paper(params, noise, q)


def low_snr_gap(params: CocktailParams, noise: NoiseSpec) -> float:
    """First-order excess of the layered ADR over capacity: (beta**2/sigma2) log2(e)."""
    return params.beta ** 2 / noise.sigma2 * LOG2E


def low_snr_layer1(params: CocktailParams, noise: NoiseSpec) -> float:
    """First-order layer-1 rate gamma*log2(e), i.e. capacity slope times SNR."""
    return derive(params, noise).gamma * LOG2E
