"""Rate formulas, exact mutual information and link simulation for cocktail BPSK."""

from .mi_core import (
    Constellation,
    MiResult,
    NoiseSpec,
    QuadratureConfig,
    QuadratureConvergenceError,
    capacity,
    mi_binary_antipodal,
    mi_discrete_awgn,
    mixture_entropy,
    noise_entropy,
    q_function,
)
from .scheme import (
    AdrBreakdown,
    CocktailParams,
    DerivedQuantities,
    adr_at_snr,
    adr_paper,
    derive,
    layer_symbol,
    low_snr_gap,
    low_snr_layer1,
    mi_exact_layer1,
    mi_exact_total,
)
from .link_sim import (
    SimConfig,
    SimReport,
    ber_analytic_layer1,
    mi_monte_carlo,
    simulate,
)

__version__ = "0.1.0"
