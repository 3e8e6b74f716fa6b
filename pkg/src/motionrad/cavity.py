"""Vibrating two-mirror cavity with partly transmitting mirrors.

All formulas are evaluated in the dimensionless variables ``x = w*tau``,
``X = Omega*tau``, ``alpha_i = a_i/(c*tau)``; rates pick up a final ``1/tau``.

The Airy-type response functions are written as

    D+(x) = sinh(rho) cosh(rho) / (sinh(rho)**2 + sin(x)**2)
    D-(x) = sinh(rho) cos(x)    / (sinh(rho)**2 + sin(x)**2)

which equal ``sinh(2 rho)/(cosh(2 rho) - cos(2x))`` and
``2 sinh(rho) cos(x)/(cosh(2 rho) - cos(2x))`` but never subtract two nearly equal
numbers, so they stay accurate at ``x = k*pi`` for ``rho`` down to ~1e-150.

Mode pairs ``(k, k')`` resonate when ``X = (k + k')*pi``.  Even orders couple to
``a1 - a2`` (cavity elongation), odd orders to ``a1 + a2`` (global translation).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, RegimeWarning, UnsupportedRegime
from .model import SI, CavityConfig, PhysicalConstants, nondimensionalize
from .quadrature import IntegrationSettings, PoleHint, integrate

# Below this rho the peaks are too narrow to validate by direct quadrature.
QUADRATURE_MIN_RHO = 1e-6
# Mode pairs whose Lorentzian center lies within this many rho of the drive are kept.
MODE_SUM_WINDOW = 100.0


def _check_rho(rho):
    if not np.all(np.asarray(rho) > 0):
        raise DomainError(f"rho must be > 0, got {rho!r}")


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def airy_plus(x, rho):
    _check_rho(rho)
    x = np.asarray(x, dtype=float)
    sh = np.sinh(rho)
    return _scalar_or_array(sh * np.cosh(rho) / (sh * sh + np.sin(x) ** 2))


def airy_minus(x, rho):
    _check_rho(rho)
    x = np.asarray(x, dtype=float)
    sh = np.sinh(rho)
    return _scalar_or_array(sh * np.cos(x) / (sh * sh + np.sin(x) ** 2))


def _polesum(x, rho, K, alternating):
    if K < 1:
        raise DomainError(f"pole sum needs K >= 1, got {K!r}")
    k = np.arange(-K, K + 1, dtype=float)
    terms = rho / (rho * rho + (x - k * math.pi) ** 2)
    if alternating:
        terms = np.where(np.arange(-K, K + 1) % 2 == 0, terms, -terms)
    return math.fsum(terms)


def airy_plus_polesum(x: float, rho: float, K: int) -> float:
    """Truncated Lorentzian expansion ``sum_{|k|<=K} rho/(rho^2 + (x - k pi)^2)``."""
    return _polesum(float(x), rho, int(K), alternating=False)


def airy_minus_polesum(x: float, rho: float, K: int) -> float:
    """Truncated expansion ``sum_{|k|<=K} (-1)^k rho/(rho^2 + (x - k pi)^2)``."""
    return _polesum(float(x), rho, int(K), alternating=True)


def polesum_tail_bound(x: float, rho: float, K: int) -> float:
    """Upper bound on the truncation error of either pole sum (needs ``K*pi > |x|``)."""
    gap = K * math.pi - abs(x)
    if gap <= 0:
        return math.inf
    return 2.0 * rho / (math.pi * gap)


@dataclass(frozen=True)
class CavityKernel:
    """Pair-emission kernels ``g11 = g22`` and ``g12 = g21`` at one frequency pair."""

    g11: float
    g12: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g11]])

    def quadratic_form(self, a1: float, a2: float) -> float:
        return (a1 * a1 + a2 * a2) * self.g11 + 2.0 * a1 * a2 * self.g12


def _kernels_dimless(x, xp, rho):
    g11 = 4.0 + 4.0 * airy_plus(x, rho) * airy_plus(xp, rho)
    g12 = -4.0 * airy_minus(x, rho) * airy_minus(xp, rho)
    return g11, g12


def gamma_cavity(omega: float, omega_p: float, cavity: CavityConfig) -> CavityKernel:
    if omega <= 0 or omega_p <= 0:
        raise DomainError("frequencies must be > 0")
    g11, g12 = _kernels_dimless(omega * cavity.tau, omega_p * cavity.tau, cavity.rho)
    return CavityKernel(float(g11), float(g12))


def _spectral_shape_dimless(x, X, rho, alpha1, alpha2):
    """Dimensionless emission density ``x(X-x)/(2pi) * sum_ij alpha_i alpha_j g_ij``."""
    x = np.asarray(x, dtype=float)
    xp = X - x
    g11, g12 = _kernels_dimless(x, xp, rho)
    weight = (alpha1 * alpha1 + alpha2 * alpha2) * g11 + 2.0 * alpha1 * alpha2 * g12
    out = x * xp * weight / (2.0 * math.pi)
    return np.where((x > 0) & (x < X), out, 0.0)


def emission_density(cavity: CavityConfig, omega, constants: PhysicalConstants = SI):
    """Photons per second per unit angular frequency emitted at ``omega``."""
    d = nondimensionalize(cavity, constants)
    shape = _spectral_shape_dimless(np.asarray(omega, dtype=float) * cavity.tau,
                                    d.x_drive, d.rho, d.alpha1, d.alpha2)
    # d(N/T)/dw = (1/tau) * shape * d(x)/d(w) = shape
    return _scalar_or_array(shape)


def mode_pole_hints(X: float, rho: float) -> list[PoleHint]:
    """Pole hints for the emission integrand on ``[0, X]`` (dimensionless)."""
    hints = []
    for k in range(0, int(X / math.pi) + 1):
        for center in (k * math.pi, X - k * math.pi):
            if -rho <= center <= X + rho:
                hints.append(PoleHint(center, rho))
    return hints


def flux_quadrature(
    cavity: CavityConfig,
    constants: PhysicalConstants = SI,
    settings: IntegrationSettings | None = None,
) -> float:
    """Photon flux (photons/s) by direct integration of the pair-emission spectrum.

    Raises:
        UnsupportedRegime: for ``rho < 1e-6``; use :func:`flux_mode_sum` or
            :func:`flux_resummed` there.
    """
    if cavity.rho < QUADRATURE_MIN_RHO:
        raise UnsupportedRegime(
            f"rho = {cavity.rho:g} < {QUADRATURE_MIN_RHO:g}: direct quadrature is not "
            "validated; use flux_mode_sum or flux_resummed"
        )
    d = nondimensionalize(cavity, constants)
    if d.alpha1 == 0 and d.alpha2 == 0:
        return 0.0
    settings = (settings or IntegrationSettings()).with_hints(mode_pole_hints(d.x_drive, d.rho))
    result = integrate(
        lambda x: _spectral_shape_dimless(x, d.x_drive, d.rho, d.alpha1, d.alpha2),
        0.0,
        d.x_drive,
        settings,
    )
    return result.value / cavity.tau


def nonresonant_flux(cavity: CavityConfig, constants: PhysicalConstants = SI) -> float:
    """Direct-reflection term ``Omega^3 (a1^2 + a2^2) / (3 pi c^2)``."""
    return cavity.Omega**3 * (cavity.a1**2 + cavity.a2**2) / (3.0 * math.pi * constants.c**2)


def _parity_amplitude(cavity: CavityConfig, k: int, k_p: int) -> float:
    # a1 - (-1)**(k+k') a2
    return cavity.a1 - cavity.a2 if (k + k_p) % 2 == 0 else cavity.a1 + cavity.a2


def _mode_pair_factor(cavity: CavityConfig, k: int, k_p: int, constants: PhysicalConstants) -> float:
    """``(k pi/c tau)(k' pi/c tau) (a1 -+ a2)^2 / (4 rho^2 + (Omega tau - (k+k') pi)^2)``.

    Shared by the emitted and intracavity numbers, which differ only by the
    escape rate ``4 rho / (2 tau)``.
    """
    if k < 1 or k_p < 1:
        raise DomainError(f"mode indices must be >= 1, got ({k}, {k_p})")
    length = constants.c * cavity.tau
    detuning = cavity.Omega * cavity.tau - (k + k_p) * math.pi
    amp = _parity_amplitude(cavity, k, k_p)
    return (
        (k * math.pi / length)
        * (k_p * math.pi / length)
        * amp * amp
        / (4.0 * cavity.rho**2 + detuning * detuning)
    )


def mode_peak_flux(cavity: CavityConfig, k: int, k_p: int, constants: PhysicalConstants = SI) -> float:
    """Flux (photons/s) emitted through the cavity mode pair ``(k, k')``.

    A Lorentzian in ``Omega*tau`` centered at ``(k+k')*pi`` with half-width ``2*rho``.
    """
    return _mode_pair_factor(cavity, k, k_p, constants) * 4.0 * cavity.rho / cavity.tau


def intracavity_photons(cavity: CavityConfig, k: int, k_p: int, constants: PhysicalConstants = SI) -> float:
    """Stationary photon number held in the mode pair ``(k, k')``.

    Emitted flux divided by the escape rate: each photon leaves with probability
    ``4*rho`` per round trip of duration ``2*tau``.
    """
    return 2.0 * _mode_pair_factor(cavity, k, k_p, constants)


@dataclass(frozen=True)
class ModePeak:
    k: int
    k_p: int
    flux: float
    intracavity: float


@dataclass(frozen=True)
class FluxBreakdown:
    """Mode-sum decomposition of the emitted flux.

    ``tail_estimate`` is the flux of the first omitted shell ``k + k' = order + 1``.
    The formal sum over all shells does not converge (shell fluxes grow like the
    order), so only the shells near the emission band carry meaning.
    """

    total: float
    nonresonant: float
    peaks: list[ModePeak] = field(default_factory=list)
    order: int = 0
    tail_estimate: float = 0.0
    extrapolated: bool = False

    @property
    def resonant(self) -> float:
        return math.fsum(p.flux for p in self.peaks)

    @property
    def intracavity_total(self) -> float:
        return math.fsum(p.intracavity for p in self.peaks)

    def dominant(self) -> ModePeak | None:
        if not self.peaks:
            return None
        return max(self.peaks, key=lambda p: (p.flux, -p.k))


def mode_sum_order(cavity: CavityConfig) -> int:
    """Largest shell ``k + k'`` kept by the default truncation policy."""
    X = cavity.Omega * cavity.tau
    return max(math.ceil(X / math.pi) + 2, math.floor((X + MODE_SUM_WINDOW * cavity.rho) / math.pi))


def _shell(cavity, n, constants):
    peaks = []
    for k in range(1, n):
        f = mode_peak_flux(cavity, k, n - k, constants)
        peaks.append(ModePeak(k, n - k, f, intracavity_photons(cavity, k, n - k, constants)))
    return peaks


def flux_mode_sum(
    cavity: CavityConfig, constants: PhysicalConstants = SI, k_max: int | None = None
) -> FluxBreakdown:
    """High-finesse flux: non-resonant term plus Lorentzian mode-pair peaks.

    ``k_max`` overrides the highest shell order ``k + k'`` included; by default
    it is :func:`mode_sum_order`.
    """
    order = mode_sum_order(cavity) if k_max is None else int(k_max)
    if order < 2:
        raise DomainError(f"mode-sum order must be >= 2, got {order}")
    peaks = []
    for n in range(2, order + 1):
        peaks.extend(_shell(cavity, n, constants))
    nonres = nonresonant_flux(cavity, constants)
    total = math.fsum([nonres] + [p.flux for p in peaks])
    tail = math.fsum(p.flux for p in _shell(cavity, order + 1, constants))
    return FluxBreakdown(
        total=total,
        nonresonant=nonres,
        peaks=peaks,
        order=order,
        tail_estimate=tail,
        extrapolated=cavity.Omega * cavity.tau < math.pi,
    )


def intracavity_total(cavity: CavityConfig, constants: PhysicalConstants = SI, k_max: int | None = None) -> float:
    return flux_mode_sum(cavity, constants, k_max).intracavity_total


@dataclass(frozen=True)
class ResummedTerms:
    nonresonant: float
    translation: float  # couples to (a1 + a2), resonant at odd orders
    elongation: float  # couples to (a1 - a2), resonant at even orders

    @property
    def total(self) -> float:
        return self.nonresonant + self.translation + self.elongation


def resummed_terms(cavity: CavityConfig, constants: PhysicalConstants = SI) -> ResummedTerms:
    """The three terms of the resummed flux (photons/s).

    Below the first resonance (``Omega*tau < pi``) the resonant terms turn
    negative; they are returned as computed and a :class:`RegimeWarning` is issued.
    """
    rho = cavity.rho
    X = cavity.Omega * cavity.tau
    if X < math.pi:
        warnings.warn(
            f"Omega*tau = {X:.4g} < pi: resummed flux is an extrapolation here",
            RegimeWarning,
            stacklevel=3,
        )
    sh = math.sinh(rho)
    # cosh(2 rho) -+ cos(X) without cancellation
    den_minus = 2.0 * (sh * sh + math.sin(0.5 * X) ** 2)
    den_plus = 2.0 * (sh * sh + math.cos(0.5 * X) ** 2)
    Omega = cavity.Omega
    pref = Omega / (6.0 * math.pi * constants.c**2) * (Omega**2 - (math.pi / cavity.tau) ** 2)
    pref *= math.sinh(2.0 * rho)
    s = cavity.a1 + cavity.a2
    d = cavity.a1 - cavity.a2
    return ResummedTerms(
        nonresonant=nonresonant_flux(cavity, constants),
        translation=pref * s * s / den_plus,
        elongation=pref * d * d / den_minus,
    )


def flux_resummed(cavity: CavityConfig, constants: PhysicalConstants = SI) -> float:
    """Closed-form flux (photons/s) summing every mode pair at once."""
    return resummed_terms(cavity, constants).total


@dataclass(frozen=True)
class OrderOfMagnitude:
    n_outside: float  # photons radiated during T
    n_inside: float  # stationary intracavity photons


def order_of_magnitude(
    v: float,
    Omega: float,
    rho: float,
    T: float,
    constants: PhysicalConstants = SI,
    fresnel_number: float = 1.0,
) -> OrderOfMagnitude:
    """Resonant estimates ``N ~ (Omega T/2pi)(v/c)^2/rho`` and ``N_in ~ (v/c)^2/rho^2``.

    ``v`` is the sum or the difference of the two mirrors' peak velocities,
    whichever the resonance parity selects; choosing it is up to the caller.
    Both numbers are multiplied by ``fresnel_number`` (transverse modes coupled).
    """
    if not rho > 0:
        raise DomainError(f"rho must be > 0, got {rho!r}")
    if not v >= 0:
        raise DomainError(f"v must be >= 0, got {v!r}")
    beta2 = (v / constants.c) ** 2
    return OrderOfMagnitude(
        n_outside=fresnel_number * Omega * T / (2.0 * math.pi) * beta2 / rho,
        n_inside=fresnel_number * beta2 / rho**2,
    )
