"""Motion-induced (dynamical Casimir) radiation from a vibrating mirror or cavity."""

__version__ = "0.1.0"

from .cavity import (  # noqa: E402
    FluxBreakdown,
    airy_minus,
    airy_minus_polesum,
    airy_plus,
    airy_plus_polesum,
    flux_mode_sum,
    flux_quadrature,
    flux_resummed,
    gamma_cavity,
    intracavity_photons,
    intracavity_total,
    mode_peak_flux,
    order_of_magnitude,
)
from .errors import (  # noqa: E402
    ConvergenceFailure,
    DomainError,
    PeakUnresolved,
    RegimeWarning,
    UnsupportedRegime,
)
from .model import (  # noqa: E402
    NATURAL,
    SI,
    CavityConfig,
    HarmonicDrive,
    MirrorModel,
    PhysicalConstants,
    ThermalContext,
    nondimensionalize,
    redimensionalize,
    thermal_occupation,
    vacuum_ok,
)
from .quadrature import IntegrationResult, IntegrationSettings, PoleHint, integrate  # noqa: E402
from .single_mirror import (  # noqa: E402
    emission_spectrum_density,
    flux,
    flux_perfect,
    gamma_pair,
    photons_emitted_perfect,
    radiated_power,
)
