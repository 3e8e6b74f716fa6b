"""Parameter scans, spectrum sampling, peak characterization and export."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.signal import find_peaks as _find_local_maxima
from scipy.signal import peak_prominences

from . import __version__
from .cavity import (
    emission_density,
    flux_mode_sum,
    flux_quadrature,
    flux_resummed,
    nonresonant_flux,
)
from .errors import DomainError, MotionRadError, PeakUnresolved, RegimeWarning
from .model import SI, CavityConfig, PhysicalConstants

SCHEMA_VERSION = 1
METHODS = ("resummed", "mode-sum", "quadrature")


@dataclass(frozen=True)
class Peak:
    center: float
    height: float
    fwhm: float


def _half_crossing(x, y, i, half, step):
    """Interpolated abscissa where ``y`` falls below ``half`` walking from ``i``."""
    j = i
    while 0 <= j + step < len(y) and y[j + step] >= half:
        j += step
    if not 0 <= j + step < len(y):
        return None
    x0, x1, y0, y1 = x[j], x[j + step], y[j], y[j + step]
    return x0 + (half - y0) * (x1 - x0) / (y1 - y0)


def find_peaks(x, y, min_prominence: float = 0.5, min_relative_height: float = 0.01,
               min_samples: int = 3) -> list[Peak]:
    """Locate peaks by local maximum and measure their FWHM by half-height crossing.

    Only maxima whose prominence is at least ``min_prominence`` times their
    height, and whose height is at least ``min_relative_height`` times the
    tallest sample, are reported.  The center is refined by a parabola through the
    three samples around the maximum.

    Raises:
        PeakUnresolved: if fewer than ``min_samples`` samples lie above half
            height, or the half-height crossing falls outside the grid.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    idx, _ = _find_local_maxima(y)
    if idx.size == 0:
        return []
    prom = peak_prominences(y, idx)[0]
    floor = min_relative_height * np.max(y)
    peaks = []
    for i, p in zip(idx, prom):
        height = y[i]
        if height <= 0 or height < floor or p < min_prominence * height:
            continue
        half = 0.5 * height
        lo = _half_crossing(x, y, i, half, -1)
        hi = _half_crossing(x, y, i, half, +1)
        if lo is None or hi is None:
            raise PeakUnresolved(f"half-height crossing of peak at x = {x[i]:.6g} leaves the grid")
        n_above = int(np.count_nonzero((x >= lo) & (x <= hi)))
        if n_above < min_samples:
            raise PeakUnresolved(
                f"peak at x = {x[i]:.6g} has only {n_above} samples above half height"
            )
        center = x[i]
        if 0 < i < len(y) - 1:
            x0, x1, x2 = x[i - 1], x[i], x[i + 1]
            y0, y1, y2 = y[i - 1], y[i], y[i + 1]
            denom = (x0 - x1) * (x0 - x2) * (x1 - x2)
            A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / denom
            B = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / denom
            if A < 0:
                center = min(max(-B / (2 * A), x0), x2)
        peaks.append(Peak(float(center), float(height), float(hi - lo)))
    return sorted(peaks, key=lambda pk: pk.center)


def refined_grid(lo: float, hi: float, centers, fwhm: float, base_points: int,
                 samples_per_fwhm: int, span_fwhm: float) -> np.ndarray:
    """Uniform grid on ``[lo, hi]`` plus dense windows of ``+-span_fwhm*fwhm`` around centers.

    Inside ``+-fwhm`` of a center the spacing is ``fwhm/samples_per_fwhm``; beyond
    that it grows geometrically.  Every center is itself a grid point.
    """
    pts = [np.linspace(lo, hi, base_points)]
    step = fwhm / samples_per_fwhm
    inner = np.arange(-samples_per_fwhm, samples_per_fwhm + 1) * step
    outer = fwhm * np.geomspace(1.0, max(span_fwhm, 1.0 + 1e-9), 4 * samples_per_fwhm)
    offsets = np.concatenate((inner, outer, -outer))
    for c in centers:
        pts.append(c + offsets)
    grid = np.unique(np.concatenate(pts))
    return grid[(grid >= lo) & (grid <= hi)]


@dataclass(frozen=True)
class ResolutionPolicy:
    base_points: int = 401
    samples_per_fwhm: int = 40
    span_fwhm: float = 50.0


@dataclass
class ScanRow:
    x: float
    flux_total: float
    flux_nonresonant: float
    dominant_peak: tuple[int, int] | None = None
    regime_flags: list[str] = field(default_factory=list)
    error: str | None = None


@dataclass
class ScanResult:
    """Drive-frequency sweep; ``x`` is ``Omega`` in rad/s."""

    axis: tuple[str, str]
    rows: list[ScanRow]
    params: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return np.array([r.x for r in self.rows])

    @property
    def resonant(self) -> np.ndarray:
        return np.array([r.flux_total - r.flux_nonresonant for r in self.rows])


def _cavity_params(cavity: CavityConfig) -> dict:
    return {k: float(v) for k, v in asdict(cavity).items()}


def _flux_fn(method: str) -> Callable[[CavityConfig, PhysicalConstants], float]:
    if method == "resummed":
        return flux_resummed
    if method == "mode-sum":
        return lambda cav, const: flux_mode_sum(cav, const).total
    if method == "quadrature":
        return flux_quadrature
    raise DomainError(f"unknown method {method!r}; choose from {METHODS}")


def scan_drive_frequency(
    cavity_template: CavityConfig,
    omega_range: tuple[float, float],
    resolution_policy: ResolutionPolicy | None = None,
    method: str = "resummed",
    constants: PhysicalConstants = SI,
) -> ScanResult:
    """Sweep the drive frequency over ``omega_range`` (rad/s).

    The grid is refined around every mechanical resonance ``n*pi/tau`` so each
    peak (FWHM ``4*rho/tau`` in ``Omega``) gets ``samples_per_fwhm`` samples
    across its full width.  Failures are recorded per row.
    """
    policy = resolution_policy or ResolutionPolicy()
    lo, hi = map(float, omega_range)
    if not 0 < lo < hi:
        raise DomainError(f"need 0 < lo < hi, got {omega_range!r}")
    tau, rho = cavity_template.tau, cavity_template.rho
    fwhm = 4.0 * rho / tau
    n_lo = max(2, math.floor(lo * tau / math.pi))
    n_hi = math.ceil(hi * tau / math.pi)
    centers = [n * math.pi / tau for n in range(n_lo, n_hi + 1)]
    grid = refined_grid(lo, hi, centers, fwhm, policy.base_points,
                        policy.samples_per_fwhm, policy.span_fwhm)
    compute = _flux_fn(method)

    rows = []
    for Omega in grid:
        cav = cavity_template.with_(Omega=float(Omega))
        flags = []
        if Omega * tau < math.pi:
            flags.append("below_first_resonance")
        row = ScanRow(x=float(Omega), flux_total=math.nan, flux_nonresonant=math.nan, regime_flags=flags)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RegimeWarning)
                total = compute(cav, constants)
                breakdown = flux_mode_sum(cav, constants)
            row.flux_total = float(total)
            row.flux_nonresonant = nonresonant_flux(cav, constants)
            dom = breakdown.dominant()
            if dom is not None and dom.flux > 0:
                row.dominant_peak = (dom.k, dom.k_p)
            if total < 0:
                flags.append("negative_flux")
        except MotionRadError as exc:
            row.error = f"{type(exc).__name__}: {exc}"
            flags.append("error")
        rows.append(row)
    params = {"method": method, **_cavity_params(cavity_template),
              "omega_lo": lo, "omega_hi": hi, **asdict(policy)}
    params.pop("Omega", None)
    return ScanResult(axis=("Omega", "rad/s"), rows=rows, params=params)


def scan_peaks(scan: ScanResult, min_prominence: float = 0.5) -> list[Peak]:
    """Peaks of the resonant part (total minus non-resonant) of a scan."""
    ok = [i for i, r in enumerate(scan.rows) if r.error is None]
    x = scan.x[ok]
    y = scan.resonant[ok]
    if x.size < 3 or not np.any(y > 0):
        return []
    return find_peaks(x, y, min_prominence)


@dataclass(frozen=True)
class SpectrumPolicy:
    base_points: int = 2001
    samples_per_fwhm: int = 40
    span_fwhm: float = 50.0


@dataclass
class SpectrumTable:
    omega_grid: np.ndarray
    density: np.ndarray
    peaks: list[Peak]
    params: dict = field(default_factory=dict)


def sample_emission_spectrum(
    cavity: CavityConfig,
    omega_grid_policy: SpectrumPolicy | None = None,
    constants: PhysicalConstants = SI,
) -> SpectrumTable:
    """Sample the pair-emission spectral density on ``(0, Omega)`` and locate its peaks.

    The grid is refined around every cavity mode ``k*pi/tau`` and its partner
    ``Omega - k*pi/tau`` inside the emission band.
    """
    if cavity.rho < 1e-6:
        raise PeakUnresolved(f"rho = {cavity.rho:g} < 1e-6: peaks are not resolvable on a float grid")
    policy = omega_grid_policy or SpectrumPolicy()
    Omega, tau, rho = cavity.Omega, cavity.tau, cavity.rho
    centers = []
    for k in range(1, math.ceil(Omega * tau / math.pi) + 1):
        for c in (k * math.pi / tau, Omega - k * math.pi / tau):
            if 0 < c < Omega:
                centers.append(c)
    grid = refined_grid(0.0, Omega, centers, 2.0 * rho / tau, policy.base_points,
                        policy.samples_per_fwhm, policy.span_fwhm)
    density = np.asarray(emission_density(cavity, grid, constants), dtype=float)
    peaks = find_peaks(grid, density)
    return SpectrumTable(grid, density, peaks, params=_cavity_params(cavity))


# --- export -----------------------------------------------------------------

SCAN_COLUMNS = ("x", "flux_total", "flux_nonresonant", "dominant_k", "dominant_kp",
                "regime_flags", "error")
SPECTRUM_COLUMNS = ("omega", "density")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _scan_records(result: ScanResult) -> list[dict]:
    records = []
    for r in result.rows:
        k, kp = r.dominant_peak if r.dominant_peak else (None, None)
        records.append({
            "x": r.x,
            "flux_total": None if math.isnan(r.flux_total) else r.flux_total,
            "flux_nonresonant": None if math.isnan(r.flux_nonresonant) else r.flux_nonresonant,
            "dominant_k": k,
            "dominant_kp": kp,
            "regime_flags": ";".join(r.regime_flags),
            "error": r.error,
        })
    return records


def _spectrum_records(table: SpectrumTable) -> list[dict]:
    return [{"omega": float(w), "density": float(d)} for w, d in zip(table.omega_grid, table.density)]


def to_json(result) -> str:
    if isinstance(result, ScanResult):
        doc = {"schema_version": SCHEMA_VERSION, "kind": "scan",
               "axis": {"name": result.axis[0], "unit": result.axis[1]},
               "params": result.params, "rows": _scan_records(result)}
    elif isinstance(result, SpectrumTable):
        doc = {"schema_version": SCHEMA_VERSION, "kind": "spectrum", "params": result.params,
               "peaks": [asdict(p) for p in result.peaks], "rows": _spectrum_records(result)}
    else:
        raise TypeError(f"cannot export {type(result).__name__}")
    return json.dumps(doc, indent=1, allow_nan=False)


def to_csv(result) -> str:
    buf = io.StringIO()
    buf.write(f"# motionrad {__version__}\n")
    buf.write("# deterministic output: identical inputs give identical files (no random seed involved)\n")
    if isinstance(result, ScanResult):
        buf.write(f"# kind: scan; axis {result.axis[0]} [{result.axis[1]}]\n")
        columns, records = SCAN_COLUMNS, _scan_records(result)
    elif isinstance(result, SpectrumTable):
        buf.write("# kind: spectrum; omega [rad/s], density [photons/s per rad/s]\n")
        columns, records = SPECTRUM_COLUMNS, _spectrum_records(result)
        for p in result.peaks:
            buf.write(f"# peak center={_fmt(p.center)} height={_fmt(p.height)} fwhm={_fmt(p.fwhm)}\n")
    else:
        raise TypeError(f"cannot export {type(result).__name__}")
    buf.write(f"# params: {json.dumps(result.params, sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for rec in records:
        writer.writerow([_fmt(rec[c]) for c in columns])
    return buf.getvalue()


def export(result, format: str, destination) -> None:
    """Write ``result`` as ``csv`` or ``json`` to a path or a text stream."""
    if format == "csv":
        text = to_csv(result)
    elif format == "json":
        text = to_json(result)
    else:
        raise DomainError(f"unknown format {format!r}")
    if hasattr(destination, "write"):
        destination.write(text)
        return
    try:
        with open(os.fspath(destination), "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write output: {exc.strerror}", os.fspath(destination)) from exc


def read_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def read_csv(path) -> tuple[list[str], list[dict]]:
    """Return ``(comment_lines, rows)``; numeric cells are parsed back to floats."""
    comments, lines = [], []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            (comments if line.startswith("#") else lines).append(line)
    rows = []
    for rec in csv.DictReader(lines):
        parsed = {}
        for key, val in rec.items():
            try:
                parsed[key] = float(val) if val not in ("",) else None
            except ValueError:
                parsed[key] = val
        rows.append(parsed)
    return comments, rows
