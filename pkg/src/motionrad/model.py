"""Domain types shared by the single-mirror and cavity calculations.

Everything here is SI at the boundary.  The cavity formulas only ever need the
three dimensionless numbers ``Omega*tau``, ``rho`` and ``a/(c*tau)`` plus a
``1/tau`` rate prefactor, so :func:`nondimensionalize` is the bridge that the
numerical code works through.

Note on "finesse": throughout this package the finesse is ``1/rho``, where the
loss parameter is defined by ``r1*r2 = exp(-2*rho)``.  This is *not* the
conventional ``pi/(2*rho)``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.constants as _sc

from .errors import DomainError, RegimeWarning

# Perturbative regime bound on the peak mirror velocity.
MAX_VELOCITY_RATIO = 1e-3
# Above this loss parameter the high-finesse formulas degrade.
MAX_HIGH_FINESSE_RHO = 0.1
LOSSLESS_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalConstants:
    """Speed of light, reduced Planck constant and Boltzmann constant.

    Defaults are CODATA SI values.  Use :meth:`natural` for ``c = hbar = k_B = 1``.
    """

    c: float = _sc.c
    hbar: float = _sc.hbar
    k_B: float = _sc.k

    def __post_init__(self):
        for name in ("c", "hbar", "k_B"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise DomainError(f"{name} must be finite and > 0, got {value!r}")

    @classmethod
    def natural(cls) -> PhysicalConstants:
        return cls(c=1.0, hbar=1.0, k_B=1.0)


SI = PhysicalConstants()
NATURAL = PhysicalConstants.natural()


class MirrorKind(enum.Enum):
    PERFECT = "perfect"
    CONSTANT_REAL = "constant"
    TABULATED = "tabulated"


@dataclass(frozen=True, eq=False)
class MirrorModel:
    """Reflection and transmission amplitudes ``r[w]``, ``s[w]`` of one lossless mirror.

    Build instances with :meth:`perfect`, :meth:`constant` or :meth:`tabulated`
    rather than calling the constructor directly.
    """

    kind: MirrorKind
    r: float = -1.0
    s: float = 0.0
    omega_samples: np.ndarray | None = field(default=None, repr=False)
    r_samples: np.ndarray | None = field(default=None, repr=False)
    s_samples: np.ndarray | None = field(default=None, repr=False)

    @classmethod
    def perfect(cls) -> MirrorModel:
        return cls(MirrorKind.PERFECT, r=-1.0, s=0.0)

    @classmethod
    def constant(cls, r: float) -> MirrorModel:
        """Real, frequency-independent amplitudes with ``s = +sqrt(1 - r**2)``."""
        r = float(r)
        if not 0.0 < r <= 1.0:
            raise DomainError(f"reflection amplitude must lie in (0, 1], got {r!r}")
        return cls(MirrorKind.CONSTANT_REAL, r=r, s=math.sqrt((1.0 - r) * (1.0 + r)))

    @classmethod
    def tabulated(cls, omega, r, s) -> MirrorModel:
        """Sampled complex amplitudes, linearly interpolated between samples.

        Interpolated values are renormalized onto ``|r|^2 + |s|^2 = 1``; outside the
        sampled range the end values are held.  Amplitudes with non-zero phase are
        accepted but fall outside the regime the emission formulas were derived
        for, so a :class:`RegimeWarning` is emitted.
        """
        omega = np.asarray(omega, dtype=float)
        r = np.asarray(r, dtype=complex)
        s = np.asarray(s, dtype=complex)
        if omega.ndim != 1 or omega.shape != r.shape or omega.shape != s.shape:
            raise DomainError("omega, r and s must be 1-D arrays of equal length")
        if omega.size < 1 or np.any(np.diff(omega) <= 0) or omega[0] <= 0:
            raise DomainError("omega samples must be positive and strictly increasing")
        norm = np.abs(r) ** 2 + np.abs(s) ** 2
        if np.max(np.abs(norm - 1.0)) > LOSSLESS_TOL:
            raise DomainError("tabulated amplitudes violate |r|^2 + |s|^2 = 1")
        if np.any(r.imag != 0) or np.any(s.imag != 0):
            warnings.warn(
                "complex mirror amplitudes are outside the validated real-amplitude regime",
                RegimeWarning,
                stacklevel=2,
            )
        return cls(MirrorKind.TABULATED, r=float("nan"), s=float("nan"),
                   omega_samples=omega, r_samples=r, s_samples=s)

    @property
    def is_real(self) -> bool:
        if self.kind is not MirrorKind.TABULATED:
            return True
        return not (np.any(self.r_samples.imag) or np.any(self.s_samples.imag))

    def amplitudes(self, omega):
        """Return ``(r, s)`` at the angular frequencies ``omega`` (broadcast arrays)."""
        omega = np.asarray(omega, dtype=float)
        if self.kind is not MirrorKind.TABULATED:
            return np.full_like(omega, self.r), np.full_like(omega, self.s)
        xs = self.omega_samples

        def interp(values):
            return np.interp(omega, xs, values.real) + 1j * np.interp(omega, xs, values.imag)

        r = interp(self.r_samples)
        s = interp(self.s_samples)
        scale = np.sqrt(np.abs(r) ** 2 + np.abs(s) ** 2)
        r, s = r / scale, s / scale
        if self.is_real:
            return r.real, s.real
        return r, s


@dataclass(frozen=True)
class HarmonicDrive:
    """Mirror displacement ``dq(t) = 2*a*cos(Omega*t)`` for ``0 < t < T``."""

    a: float
    Omega: float
    T: float = 1.0

    def __post_init__(self):
        if not self.a >= 0:
            raise DomainError(f"amplitude must be >= 0, got {self.a!r}")
        if not self.Omega > 0:
            raise DomainError(f"drive frequency must be > 0, got {self.Omega!r}")
        if not self.T > 0:
            raise DomainError(f"duration must be > 0, got {self.T!r}")

    @property
    def velocity(self) -> float:
        """Peak mirror velocity ``v = 2*Omega*a``."""
        return 2.0 * self.Omega * self.a

    def displacement(self, t):
        t = np.asarray(t, dtype=float)
        return np.where((t > 0) & (t < self.T), 2.0 * self.a * np.cos(self.Omega * t), 0.0)

    def check_perturbative(self, constants: PhysicalConstants = SI) -> bool:
        """Warn (without failing) when ``v/c`` exceeds the perturbative bound."""
        ok = self.velocity / constants.c <= MAX_VELOCITY_RATIO
        if not ok:
            warnings.warn(
                f"v/c = {self.velocity / constants.c:.3g} exceeds {MAX_VELOCITY_RATIO:g}; "
                "first-order results are unreliable",
                RegimeWarning,
                stacklevel=2,
            )
        return ok


@dataclass(frozen=True)
class CavityConfig:
    """Two-mirror cavity driven in phase at a common frequency.

    Attributes:
        tau: one-way photon flight time between the mirrors (s).
        rho: loss parameter, ``r1*r2 = exp(-2*rho)``.
        a1, a2: signed displacement amplitudes of the two mirrors (m).  Equal
            signs mean the mirrors move together (cavity translation).
        Omega: drive angular frequency (rad/s).
        T: drive duration (s).
    """

    tau: float
    rho: float
    a1: float
    a2: float
    Omega: float
    T: float = 1.0

    def __post_init__(self):
        if not self.tau > 0:
            raise DomainError(f"tau must be > 0, got {self.tau!r}")
        if not self.rho > 0:
            raise DomainError(f"rho must be > 0, got {self.rho!r}")
        if not self.Omega > 0:
            raise DomainError(f"Omega must be > 0, got {self.Omega!r}")
        if not self.T > 0:
            raise DomainError(f"T must be > 0, got {self.T!r}")
        if not (math.isfinite(self.a1) and math.isfinite(self.a2)):
            raise DomainError("amplitudes must be finite")
        if self.rho > MAX_HIGH_FINESSE_RHO:
            warnings.warn(
                f"rho = {self.rho:g} > {MAX_HIGH_FINESSE_RHO:g}: high-finesse formulas degrade",
                RegimeWarning,
                stacklevel=3,
            )

    @property
    def reflectivity_product(self) -> float:
        return math.exp(-2.0 * self.rho)

    @property
    def finesse(self) -> float:
        return 1.0 / self.rho

    @property
    def fundamental(self) -> float:
        """Fundamental optical resonance ``pi/tau`` (rad/s)."""
        return math.pi / self.tau

    def resonance_order(self, Omega: float | None = None) -> float:
        """``Omega*tau/pi``; integer values are the mechanical resonances."""
        Omega = self.Omega if Omega is None else Omega
        return Omega * self.tau / math.pi

    def with_(self, **changes) -> CavityConfig:
        return replace(self, **changes)


@dataclass(frozen=True)
class DimensionlessCavity:
    x_drive: float  # Omega * tau
    rho: float
    alpha1: float  # a1 / (c * tau)
    alpha2: float
    duration: float  # T / tau


def nondimensionalize(cavity: CavityConfig, constants: PhysicalConstants = SI) -> DimensionlessCavity:
    length = constants.c * cavity.tau
    return DimensionlessCavity(
        x_drive=cavity.Omega * cavity.tau,
        rho=cavity.rho,
        alpha1=cavity.a1 / length,
        alpha2=cavity.a2 / length,
        duration=cavity.T / cavity.tau,
    )


def redimensionalize(
    dimless: DimensionlessCavity, tau: float, constants: PhysicalConstants = SI
) -> CavityConfig:
    length = constants.c * tau
    return CavityConfig(
        tau=tau,
        rho=dimless.rho,
        a1=dimless.alpha1 * length,
        a2=dimless.alpha2 * length,
        Omega=dimless.x_drive / tau,
        T=dimless.duration * tau,
    )


@dataclass(frozen=True)
class ThermalContext:
    theta: float  # temperature (K)

    def __post_init__(self):
        if not self.theta >= 0:
            raise DomainError(f"temperature must be >= 0, got {self.theta!r}")


def thermal_occupation(ctx: ThermalContext, omega: float, constants: PhysicalConstants = SI) -> float:
    """Bose-Einstein mean photon number ``1/(exp(hbar*w/kT) - 1)`` of a mode at ``omega``."""
    if not omega > 0:
        raise DomainError(f"omega must be > 0, got {omega!r}")
    if ctx.theta == 0:
        return 0.0
    x = constants.hbar * omega / (constants.k_B * ctx.theta)
    # exp(-x)/(1 - exp(-x)) never overflows
    return math.exp(-x) / -math.expm1(-x)


def vacuum_ok(ctx: ThermalContext, omega: float, constants: PhysicalConstants = SI) -> bool:
    """True when fewer than one thermal photon occupies the mode at ``omega``."""
    return thermal_occupation(ctx, omega, constants) < 1.0
