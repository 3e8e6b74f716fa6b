"""Photon emission from one harmonically oscillating, partly transmitting mirror.

Photons are created in pairs ``(w, Omega - w)`` so the spectrum is confined to
``0 < w < Omega``.  For a perfect reflector the pair kernel is the constant 8
and the spectrum is the parabola ``w*(Omega - w)``, peaked at ``Omega/2``.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .model import SI, HarmonicDrive, MirrorModel, PhysicalConstants
from .quadrature import IntegrationSettings, integrate

PERFECT_KERNEL = 8.0


def gamma_pair(mirror: MirrorModel, omega, omega_p):
    """Pair-emission kernel, summed over both output ports.

    ``2*(1 - s*s' + r*r') + 2*(1 - conj(s*s') + conj(r*r'))``, which is real and,
    for real amplitudes, equals ``4*(1 - s*s' + r*r')``.
    """
    omega = np.asarray(omega, dtype=float)
    omega_p = np.asarray(omega_p, dtype=float)
    if np.any(omega <= 0) or np.any(omega_p <= 0):
        raise DomainError("frequencies must be > 0")
    r, s = mirror.amplitudes(omega)
    rp, sp = mirror.amplitudes(omega_p)
    term = 1.0 - s * sp + r * rp
    value = 2.0 * term + 2.0 * np.conj(term)
    value = np.real(value)
    return float(value) if value.ndim == 0 else value


def _spectral_shape(mirror: MirrorModel, Omega: float, omega: np.ndarray) -> np.ndarray:
    """``w*(Omega - w)*gamma/(2*pi)`` on the open support, zero elsewhere."""
    inside = (omega > 0) & (omega < Omega)
    out = np.zeros_like(omega)
    w = omega[inside]
    out[inside] = w * (Omega - w) * gamma_pair(mirror, w, Omega - w) / (2.0 * math.pi)
    return out


def emission_spectrum_density(
    mirror: MirrorModel, drive: HarmonicDrive, omega, constants: PhysicalConstants = SI
):
    """Photons per second per unit angular frequency emitted at ``omega``."""
    omega_arr = np.atleast_1d(np.asarray(omega, dtype=float))
    density = (drive.a / constants.c) ** 2 * _spectral_shape(mirror, drive.Omega, omega_arr)
    return float(density[0]) if np.ndim(omega) == 0 else density


def flux(
    mirror: MirrorModel,
    drive: HarmonicDrive,
    constants: PhysicalConstants = SI,
    settings: IntegrationSettings | None = None,
) -> float:
    """Total photon flux (photons/s), integrating the emission spectrum over ``(0, Omega)``.

    The ``(a/c)**2`` prefactor is applied after integration so the result scales
    exactly quadratically with the amplitude.
    """
    drive.check_perturbative(constants)
    if drive.a == 0:
        return 0.0
    result = integrate(lambda w: _spectral_shape(mirror, drive.Omega, w), 0.0, drive.Omega, settings)
    return (drive.a / constants.c) ** 2 * result.value


def flux_perfect(drive: HarmonicDrive, constants: PhysicalConstants = SI) -> float:
    """Closed-form perfect-mirror flux ``2 a^2 Omega^3 / (3 pi c^2)``."""
    return 2.0 * drive.a**2 * drive.Omega**3 / (3.0 * math.pi * constants.c**2)


def photons_emitted_perfect(drive: HarmonicDrive, constants: PhysicalConstants = SI) -> float:
    """Photons emitted by a perfect mirror during the whole drive.

    Equal to ``(Omega*T/(6*pi)) * (v/c)**2`` with ``v = 2*Omega*a``.
    """
    return flux_perfect(drive, constants) * drive.T


def photons_emitted_perfect_velocity_form(drive: HarmonicDrive, constants: PhysicalConstants = SI) -> float:
    return drive.Omega * drive.T / (6.0 * math.pi) * (drive.velocity / constants.c) ** 2


def radiated_power(flux: float, Omega: float, constants: PhysicalConstants = SI) -> float:
    """Radiated power (W): each pair carries ``hbar*Omega``, i.e. half of it per photon."""
    if flux < 0:
        raise DomainError(f"flux must be >= 0, got {flux!r}")
    return 0.5 * flux * constants.hbar * Omega


def spectral_energy_power(
    mirror: MirrorModel,
    drive: HarmonicDrive,
    constants: PhysicalConstants = SI,
    settings: IntegrationSettings | None = None,
) -> float:
    """Radiated power from the first moment ``hbar * integral(w * density)``.

    Independent of :func:`radiated_power`; the two agree because photons come in
    pairs whose energies sum to ``hbar*Omega``.
    """
    if drive.a == 0:
        return 0.0
    result = integrate(
        lambda w: w * _spectral_shape(mirror, drive.Omega, w), 0.0, drive.Omega, settings
    )
    return constants.hbar * (drive.a / constants.c) ** 2 * result.value
