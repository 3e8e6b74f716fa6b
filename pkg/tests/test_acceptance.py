"""Acceptance criteria, each run at its stated tolerance.

Every test records one PASS/FAIL line, printed in the terminal summary.
"""

import math
import time
import warnings

import numpy as np
import pytest

from motionrad.cavity import (
    airy_minus,
    airy_minus_polesum,
    airy_plus,
    airy_plus_polesum,
    flux_mode_sum,
    flux_quadrature,
    flux_resummed,
    intracavity_photons,
    mode_peak_flux,
    order_of_magnitude,
    resummed_terms,
)
from motionrad.errors import RegimeWarning
from motionrad.experiments import sample_emission_spectrum
from motionrad.model import NATURAL, SI, CavityConfig, HarmonicDrive, MirrorModel, ThermalContext, thermal_occupation
from motionrad.single_mirror import emission_spectrum_density, flux, flux_perfect, radiated_power

PI = math.pi
RESULTS = {}


def record(number, name, ok, detail):
    RESULTS[number] = (bool(ok), name, detail)
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} ({detail})")
    assert ok, detail


def test_1_perfect_mirror_oracle():
    start = time.perf_counter()
    worst = 0.0
    for Omega in np.logspace(-3, 3, 25):
        drive = HarmonicDrive(a=1e-4 / Omega, Omega=Omega)
        got = flux(MirrorModel.perfect(), drive, NATURAL)
        worst = max(worst, abs(got / flux_perfect(drive, NATURAL) - 1))
    elapsed = time.perf_counter() - start
    record(1, "perfect-mirror quadrature vs closed form", worst <= 1e-8 and elapsed < 1.0,
           f"max rel err {worst:.2e}, {elapsed:.3f} s")


def test_2_airy_pole_sums():
    rho, K = 1e-2, 10_000
    xs = np.random.default_rng(20240601).uniform(0, 10 * PI, 1000)
    err_p = max(abs(airy_plus_polesum(x, rho, K) - airy_plus(x, rho)) for x in xs)
    err_m = max(abs(airy_minus_polesum(x, rho, K) - airy_minus(x, rho)) for x in xs)
    ratios = []
    for x in xs[:20]:
        e1 = abs(airy_plus_polesum(x, rho, K) - airy_plus(x, rho))
        e2 = abs(airy_plus_polesum(x, rho, 2 * K) - airy_plus(x, rho))
        ratios.append(e1 / e2)
    ok = err_p <= 1e-6 and err_m <= 1e-6 and all(1.9 <= r <= 2.1 for r in ratios)
    record(2, "pole sums vs closed forms", ok,
           f"D+ err {err_p:.2e}, D- err {err_m:.2e}, doubling ratio {min(ratios):.3f}..{max(ratios):.3f}")


def test_3_cross_formula_agreement():
    start = time.perf_counter()
    worst = 0.0
    for rho in (1e-2, 1e-3):
        for X in (2 * PI, 2.5 * PI, 3 * PI, 4 * PI):
            cav = CavityConfig(tau=1.0, rho=rho, a1=0.1, a2=0.03, Omega=X)
            q = flux_quadrature(cav, NATURAL)
            m = flux_mode_sum(cav, NATURAL).total
            r = flux_resummed(cav, NATURAL)
            spread = max(abs(q - m), abs(q - r), abs(m - r)) / abs(q)
            worst = max(worst, spread / rho)
    elapsed = time.perf_counter() - start
    record(3, "quadrature, mode sum and resummed flux agree", worst <= 5 and elapsed < 30,
           f"max spread {worst:.2f} rho, {elapsed:.2f} s")


def test_4_parity_selection():
    translation = CavityConfig(tau=1.0, rho=1e-3, a1=0.1, a2=0.1, Omega=2 * PI)
    elongation = CavityConfig(tau=1.0, rho=1e-3, a1=0.1, a2=-0.1, Omega=3 * PI)
    t_peak = mode_peak_flux(translation, 1, 1, NATURAL)
    e_peaks = [mode_peak_flux(elongation, 1, 2, NATURAL), mode_peak_flux(elongation, 2, 1, NATURAL)]
    t_term = resummed_terms(translation, NATURAL)
    e_term = resummed_terms(elongation, NATURAL)
    ok = t_peak == 0.0 and e_peaks == [0.0, 0.0] and t_term.elongation == 0.0 and e_term.translation == 0.0
    record(4, "parity selection of resonant peaks", ok,
           f"translation peak {t_peak}, elongation peaks {e_peaks}")


def test_5_detailed_balance():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(500):
        k, kp = (int(v) for v in rng.integers(1, 8, 2))
        cav = CavityConfig(tau=float(rng.uniform(1e-10, 1e-8)), rho=float(10 ** rng.uniform(-8, -1.5)),
                           a1=float(rng.uniform(-1e-9, 1e-9)), a2=float(rng.uniform(-1e-9, 1e-9)),
                           Omega=float(rng.uniform(1e9, 1e11)))
        n_in = intracavity_photons(cav, k, kp, SI)
        n_out = mode_peak_flux(cav, k, kp, SI) * cav.tau / (2 * cav.rho)
        if n_in:
            worst = max(worst, abs(n_in / n_out - 1))
    record(5, "intracavity number = flux * tau / (2 rho)", worst <= 1e-15, f"max rel err {worst:.2e}")


def test_6_headline_estimate():
    est = order_of_magnitude(v=1.0, Omega=2 * PI * 1e9, rho=1e-9, T=1.0, constants=SI)
    ok = 5 <= est.n_outside <= 20 and 5 <= est.n_inside <= 20
    record(6, "headline estimate within factor 2 of 10", ok,
           f"flux {est.n_outside:.4f}/s, intracavity {est.n_inside:.4f}")


def test_7_spectrum_shape():
    Omega = 1.0
    drive = HarmonicDrive(a=1e-4, Omega=Omega)
    w = np.linspace(0, Omega, 2001)[1:-1]
    d = emission_spectrum_density(MirrorModel.perfect(), drive, w, NATURAL)
    argmax_ok = w[np.argmax(d)] == pytest.approx(Omega / 2, abs=1e-12)
    asym = float(np.max(np.abs(d - d[::-1]) / np.max(d)))
    # mirror images computed independently rather than by reversing the grid
    asym = max(asym, float(np.max(np.abs(
        emission_spectrum_density(MirrorModel.perfect(), drive, Omega - w, NATURAL) - d) / np.max(d))))

    rho = 1e-3
    table = sample_emission_spectrum(CavityConfig(tau=1.0, rho=rho, a1=0.1, a2=0.0, Omega=4 * PI), constants=NATURAL)
    centers = [p.center for p in table.peaks]
    centers_ok = len(centers) == 3 and all(abs(c - n * PI) <= rho / 10 for c, n in zip(centers, (1, 2, 3)))
    heights = np.array([p.height for p in table.peaks])
    ratio = heights / heights[1] * 4
    ratio_ok = len(heights) == 3 and np.allclose(ratio, [3, 4, 3], rtol=0.02)
    widths = [p.fwhm / rho for p in table.peaks]
    width_ok = all(abs(wd - 2) <= 0.1 for wd in widths)
    ok = argmax_ok and asym <= 1e-9 and centers_ok and ratio_ok and width_ok
    record(7, "spectral shapes", ok,
           f"single max at Omega/2 {argmax_ok}, asymmetry {asym:.1e}, peaks at pi,2pi,3pi {centers_ok}, "
           f"heights {ratio.round(3).tolist()}, FWHM/rho {[round(v, 4) for v in widths]} (target 2)")


def test_8_scaling_laws():
    rhos = np.logspace(-6, -2, 9)
    peaks, inside = [], []
    for rho in rhos:
        cav = CavityConfig(tau=1.0, rho=float(rho), a1=0.1, a2=0.0, Omega=2 * PI)
        peaks.append(flux_mode_sum(cav, NATURAL).dominant().flux)
        inside.append(intracavity_photons(cav, 1, 1, NATURAL))
    slope_flux = np.polyfit(np.log(rhos), np.log(peaks), 1)[0]
    slope_in = np.polyfit(np.log(rhos), np.log(inside), 1)[0]

    worst = 0.0
    base = CavityConfig(tau=1.0, rho=1e-3, a1=0.1, a2=0.04, Omega=3 * PI)
    single = HarmonicDrive(a=1e-4, Omega=1.0)
    for lam in (0.5, 3.0, 1e-3):
        scaled = base.with_(a1=lam * base.a1, a2=lam * base.a2)
        for f0, f1 in (
            (flux_resummed(base, NATURAL), flux_resummed(scaled, NATURAL)),
            (flux_mode_sum(base, NATURAL).total, flux_mode_sum(scaled, NATURAL).total),
            (flux(MirrorModel.perfect(), single, NATURAL),
             flux(MirrorModel.perfect(), HarmonicDrive(a=lam * single.a, Omega=1.0), NATURAL)),
        ):
            worst = max(worst, abs(f1 / (lam * lam * f0) - 1))
    ok = abs(slope_flux + 1) <= 0.01 and abs(slope_in + 2) <= 0.01 and worst <= 1e-12
    record(8, "scaling with rho and amplitude", ok,
           f"flux slope {slope_flux:.5f}, intracavity slope {slope_in:.5f}, amplitude err {worst:.1e}")


def test_9_energy_bookkeeping():
    rng = np.random.default_rng(3)
    identity = all(
        radiated_power(f, W, SI) == 0.5 * f * SI.hbar * W
        for f, W in zip(rng.uniform(0, 1e6, 100), rng.uniform(1e6, 1e12, 100))
    )
    worst = 0.0
    for theta in (1e-3, 0.03, 1.0, 300.0):
        omega = SI.k_B * theta * math.log(2) / SI.hbar
        worst = max(worst, abs(thermal_occupation(ThermalContext(theta), omega, SI) - 1))
    ok = identity and worst <= 1e-12
    record(9, "power = flux * hbar Omega / 2 and thermal boundary", ok,
           f"identity {identity}, occupation at boundary off by {worst:.1e}")


@pytest.fixture(autouse=True)
def _quiet_regime_warnings():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RegimeWarning)
        yield
