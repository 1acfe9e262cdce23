"""Exciton-resonator polariton simulations (C++ core)."""

from ._core import (
    PolblockError,
    MaterialParams,
    GaussianProfile,
    CouplingSummary,
    SpectralModel,
    ReducedSystem,
    FockSpace,
    CorrelationResult,
    OptimizationSpec,
    SystemTemplate,
    Optimum,
    ws2_defaults,
    load_material_file,
    collective_coupling,
    kerr_shift_mev,
    cutoff_mev,
    expint_ei,
    residual_rate,
    compare_models,
    analyze,
    optimize_g2,
    run,
    __version__,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
