"""Command-line front end.

Exit codes: 0 success, 2 argument error, 3 computation error.  Errors are
reported as a single JSON line on stderr, e.g.
``{"error": "ConvergenceFailure", "exit_code": 3, "message": "..."}``.

``--units dimensionless`` sets ``c = hbar = k_B = 1`` and ``tau = 1`` so that
``--omega`` is ``Omega*tau`` and amplitudes are in units of ``c*tau``.
The default relative tolerance can be set with ``MOTIONRAD_REL_TOL``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import warnings

from . import __version__
from .cavity import (
    flux_mode_sum,
    flux_quadrature,
    flux_resummed,
    intracavity_photons,
    order_of_magnitude,
    resummed_terms,
)
from .errors import DomainError, MotionRadError, RegimeWarning
from .experiments import (
    ResolutionPolicy,
    SpectrumPolicy,
    export,
    sample_emission_spectrum,
    scan_drive_frequency,
)
from .model import (
    NATURAL,
    SI,
    CavityConfig,
    HarmonicDrive,
    MirrorModel,
    ThermalContext,
    thermal_occupation,
    vacuum_ok,
)
from .quadrature import IntegrationSettings
from .single_mirror import emission_spectrum_density, flux, flux_perfect, radiated_power

TOL_ENV = "MOTIONRAD_REL_TOL"
EXIT_OK, EXIT_USAGE, EXIT_COMPUTE = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(value: str) -> float:
    x = float(value)
    if not (x > 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be finite and > 0, got {value}")
    return x


def _nonnegative(value: str) -> float:
    x = float(value)
    if not (x >= 0 and math.isfinite(x)):
        raise argparse.ArgumentTypeError(f"must be finite and >= 0, got {value}")
    return x


def _finite(value: str) -> float:
    x = float(value)
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"must be finite, got {value}")
    return x


def _default_rel_tol() -> float:
    raw = os.environ.get(TOL_ENV)
    if raw is None:
        return 1e-9
    try:
        return _positive(raw)
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(f"{TOL_ENV}={raw!r} is not a positive number") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--units", choices=("si", "dimensionless"), default="si")
    common.add_argument("--rel-tol", type=_positive, default=None,
                        help=f"quadrature relative tolerance (default ${TOL_ENV} or 1e-9)")
    common.add_argument("--output", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=("text", "csv", "json"), default=None,
                        help="text for scalars, csv for tables by default")
    common.add_argument("--digits", type=int, default=10, help="significant digits (default 10)")

    parser = _Parser(prog="motionrad", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"motionrad {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def freq(p, required=True):
        g = p.add_mutually_exclusive_group(required=required)
        g.add_argument("--omega", type=_positive, help="drive angular frequency (rad/s, or Omega*tau)")
        g.add_argument("--freq-ghz", type=_positive, help="drive frequency Omega/2pi in GHz")

    def cavity_args(p):
        p.add_argument("--tau", type=_positive, default=None, help="one-way flight time (s)")
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--rho", type=_positive)
        g.add_argument("--finesse", type=_positive, help="1/rho")
        p.add_argument("--a1", type=_finite, required=True)
        p.add_argument("--a2", type=_finite, default=0.0)
        p.add_argument("--time", type=_positive, default=1.0, help="drive duration T (s)")

    p = sub.add_parser("flux-single", parents=[common], help="single-mirror photon flux")
    p.add_argument("--a", type=_nonnegative, required=True)
    freq(p)
    p.add_argument("--mirror", choices=("perfect", "constant"), default="perfect")
    p.add_argument("--r", type=float, default=None, help="reflection amplitude for --mirror constant")
    p.add_argument("--time", type=_positive, default=1.0)
    p.add_argument("--verify", action="store_true", help="compare against the perfect-mirror closed form")

    p = sub.add_parser("spectrum-single", parents=[common], help="single-mirror emission spectrum")
    p.add_argument("--a", type=_nonnegative, required=True)
    freq(p)
    p.add_argument("--mirror", choices=("perfect", "constant"), default="perfect")
    p.add_argument("--r", type=float, default=None)
    p.add_argument("--points", type=int, default=101)

    p = sub.add_parser("flux-cavity", parents=[common], help="vibrating-cavity photon flux")
    cavity_args(p)
    freq(p)
    p.add_argument("--method", choices=("resummed", "mode-sum", "quadrature"), default="resummed")
    p.add_argument("--verify", action="store_true", help="cross-check all three methods")

    p = sub.add_parser("intracavity", parents=[common], help="stationary intracavity photon numbers")
    cavity_args(p)
    freq(p)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--kp", type=int, default=None)

    p = sub.add_parser("spectrum-cavity", parents=[common], help="cavity emission spectrum")
    cavity_args(p)
    freq(p)
    p.add_argument("--points", type=int, default=2001)

    p = sub.add_parser("scan", parents=[common], help="drive-frequency sweep")
    cavity_args(p)
    p.add_argument("--omega-min", type=_positive, required=True)
    p.add_argument("--omega-max", type=_positive, required=True)
    p.add_argument("--method", choices=("resummed", "mode-sum", "quadrature"), default="resummed")
    p.add_argument("--points", type=int, default=401)

    p = sub.add_parser("estimate", parents=[common], help="order-of-magnitude resonant estimate")
    p.add_argument("--v", type=_nonnegative, required=True, help="peak velocity sum/difference (m/s)")
    freq(p)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--rho", type=_positive)
    g.add_argument("--finesse", type=_positive)
    p.add_argument("--time", type=_positive, default=1.0)
    p.add_argument("--fresnel", type=_positive, default=1.0, help="number of coupled transverse modes")
    p.add_argument("--theta", type=_nonnegative, default=None,
                   help="temperature (K) for the thermal-photon check at Omega/2")
    return parser


class _Context:
    def __init__(self, args):
        self.args = args
        self.dimensionless = args.units == "dimensionless"
        self.constants = NATURAL if self.dimensionless else SI
        rel_tol = args.rel_tol if args.rel_tol is not None else _default_rel_tol()
        self.settings = IntegrationSettings(rel_tol=rel_tol)
        if args.digits < 1 or args.digits > 17:
            raise UsageError("--digits must be between 1 and 17")

    def num(self, x: float) -> str:
        return format(x, f".{self.args.digits - 1}e")

    @property
    def omega(self) -> float:
        a = self.args
        if a.freq_ghz is not None:
            if self.dimensionless:
                raise UsageError("--freq-ghz requires --units si")
            return 2.0 * math.pi * a.freq_ghz * 1e9
        return a.omega

    @property
    def rho(self) -> float:
        a = self.args
        return a.rho if a.rho is not None else 1.0 / a.finesse

    def cavity(self, Omega: float | None = None) -> CavityConfig:
        a = self.args
        tau = a.tau
        if tau is None:
            if not self.dimensionless:
                raise UsageError("--tau is required with --units si")
            tau = 1.0
        elif self.dimensionless and tau != 1.0:
            raise UsageError("--units dimensionless fixes tau = 1")
        return CavityConfig(tau=tau, rho=self.rho, a1=a.a1, a2=a.a2,
                            Omega=self.omega if Omega is None else Omega, T=a.time)

    def mirror(self) -> MirrorModel:
        a = self.args
        if a.mirror == "perfect":
            if a.r is not None:
                raise UsageError("--r only applies to --mirror constant")
            return MirrorModel.perfect()
        if a.r is None:
            raise UsageError("--mirror constant needs --r")
        if not 0 < a.r <= 1:
            raise UsageError("--r must lie in (0, 1]")
        return MirrorModel.constant(a.r)


def _emit_scalars(ctx: _Context, values: dict, out) -> None:
    fmt = ctx.args.format or "text"
    if fmt == "json":
        doc = {k: (v if isinstance(v, (bool, int, str)) or v is None else float(v)) for k, v in values.items()}
        out.write(json.dumps(doc) + "\n")
        return
    for key, val in values.items():
        if isinstance(val, float):
            val = ctx.num(val)
        elif isinstance(val, bool):
            val = str(val).lower()
        out.write(f"{key},{val}\n" if fmt == "csv" else f"{key} = {val}\n")


def cmd_flux_single(ctx: _Context, out) -> None:
    a = ctx.args
    drive = HarmonicDrive(a=a.a, Omega=ctx.omega, T=a.time)
    value = flux(ctx.mirror(), drive, ctx.constants, ctx.settings)
    result = {"flux": value, "photons": value * drive.T,
              "power": radiated_power(value, drive.Omega, ctx.constants),
              "v_over_c": drive.velocity / ctx.constants.c}
    if a.verify:
        closed = flux_perfect(drive, ctx.constants)
        result["flux_closed_form_perfect"] = closed
        result["relative_difference"] = abs(value - closed) / closed if closed else 0.0
    _emit_scalars(ctx, result, out)


def cmd_spectrum_single(ctx: _Context, out) -> None:
    a = ctx.args
    if a.points < 2:
        raise UsageError("--points must be >= 2")
    drive = HarmonicDrive(a=a.a, Omega=ctx.omega)
    mirror = ctx.mirror()
    fmt = a.format or "csv"
    grid = [drive.Omega * i / (a.points - 1) for i in range(a.points)]
    rows = [(w, emission_spectrum_density(mirror, drive, w, ctx.constants)) for w in grid]
    if fmt == "json":
        out.write(json.dumps({"schema_version": 1, "kind": "spectrum-single",
                              "params": {"a": a.a, "Omega": drive.Omega, "mirror": a.mirror, "r": a.r},
                              "rows": [{"omega": w, "density": d} for w, d in rows]}) + "\n")
        return
    out.write(f"# motionrad {__version__}\n# omega [rad/s], density [photons/s per rad/s]\n")
    out.write("omega,density\n")
    for w, d in rows:
        out.write(f"{ctx.num(w)},{ctx.num(d)}\n")


def cmd_flux_cavity(ctx: _Context, out) -> None:
    a = ctx.args
    cav = ctx.cavity()
    result = {}
    if a.method == "resummed":
        terms = resummed_terms(cav, ctx.constants)
        result.update(flux=terms.total, nonresonant=terms.nonresonant,
                      translation_term=terms.translation, elongation_term=terms.elongation)
    elif a.method == "mode-sum":
        br = flux_mode_sum(cav, ctx.constants)
        dom = br.dominant()
        res_n = round(cav.Omega * cav.tau / math.pi)
        on_peak = [p for p in br.peaks if p.k + p.k_p == res_n]
        result.update(flux=br.total, nonresonant=br.nonresonant, resonant=br.resonant,
                      resonant_peak=math.fsum(p.flux for p in on_peak),
                      dominant_k=dom.k if dom else None, dominant_kp=dom.k_p if dom else None,
                      order=br.order, tail_estimate=br.tail_estimate)
    else:
        result["flux"] = flux_quadrature(cav, ctx.constants, ctx.settings)
    result["photons"] = result["flux"] * cav.T
    if a.verify:
        ref = {"resummed": flux_resummed(cav, ctx.constants),
               "mode_sum": flux_mode_sum(cav, ctx.constants).total}
        try:
            ref["quadrature"] = flux_quadrature(cav, ctx.constants, ctx.settings)
        except MotionRadError as exc:
            result["quadrature_skipped"] = type(exc).__name__
        for name, val in ref.items():
            result[f"verify_{name}"] = val
        vals = list(ref.values())
        spread = (max(vals) - min(vals)) / max(abs(v) for v in vals) if any(vals) else 0.0
        result["verify_max_relative_spread"] = spread
        result["verify_band_5rho"] = spread <= 5 * cav.rho
    _emit_scalars(ctx, result, out)


def cmd_intracavity(ctx: _Context, out) -> None:
    a = ctx.args
    cav = ctx.cavity()
    if (a.k is None) != (a.kp is None):
        raise UsageError("--k and --kp must be given together")
    if a.k is not None:
        if a.k < 1 or a.kp < 1:
            raise UsageError("--k and --kp must be >= 1")
        result = {"k": a.k, "kp": a.kp, "intracavity": intracavity_photons(cav, a.k, a.kp, ctx.constants)}
    else:
        br = flux_mode_sum(cav, ctx.constants)
        dom = br.dominant()
        result = {"intracavity_total": br.intracavity_total,
                  "dominant_k": dom.k if dom else None, "dominant_kp": dom.k_p if dom else None,
                  "dominant_intracavity": dom.intracavity if dom else 0.0}
    _emit_scalars(ctx, result, out)


def cmd_spectrum_cavity(ctx: _Context, out) -> None:
    a = ctx.args
    if a.points < 3:
        raise UsageError("--points must be >= 3")
    table = sample_emission_spectrum(ctx.cavity(), SpectrumPolicy(base_points=a.points), ctx.constants)
    export(table, a.format or "csv", out)


def cmd_scan(ctx: _Context, out) -> None:
    a = ctx.args
    if a.omega_min >= a.omega_max:
        raise UsageError("--omega-min must be < --omega-max")
    if a.points < 2:
        raise UsageError("--points must be >= 2")
    template = ctx.cavity(Omega=a.omega_min)
    scan = scan_drive_frequency(template, (a.omega_min, a.omega_max),
                                ResolutionPolicy(base_points=a.points), a.method, ctx.constants)
    export(scan, a.format or "csv", out)


def cmd_estimate(ctx: _Context, out) -> None:
    a = ctx.args
    Omega = ctx.omega
    est = order_of_magnitude(a.v, Omega, ctx.rho, a.time, ctx.constants, a.fresnel)
    result = {"photons_outside": est.n_outside, "flux_outside": est.n_outside / a.time,
              "photons_inside": est.n_inside}
    if a.theta is not None:
        ctx_t = ThermalContext(a.theta)
        result["thermal_occupation"] = thermal_occupation(ctx_t, Omega / 2.0, ctx.constants)
        result["vacuum_ok"] = vacuum_ok(ctx_t, Omega / 2.0, ctx.constants)
    _emit_scalars(ctx, result, out)


COMMANDS = {
    "flux-single": cmd_flux_single,
    "spectrum-single": cmd_spectrum_single,
    "flux-cavity": cmd_flux_cavity,
    "intracavity": cmd_intracavity,
    "spectrum-cavity": cmd_spectrum_cavity,
    "scan": cmd_scan,
    "estimate": cmd_estimate,
}


def _fail(kind: str, message: str, code: int) -> int:
    line = json.dumps({"error": kind, "exit_code": code, "message": " ".join(str(message).split())})
    sys.stderr.write(line + "\n")
    return code


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        ctx = _Context(args)
    except UsageError as exc:
        return _fail("ArgumentError", str(exc), EXIT_USAGE)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)

    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", RegimeWarning)
            if args.output == "-":
                COMMANDS[args.command](ctx, sys.stdout)
            else:
                with open(args.output, "w", encoding="utf-8", newline="") as fh:
                    COMMANDS[args.command](ctx, fh)
        for w in caught:
            if issubclass(w.category, RegimeWarning):
                sys.stderr.write(json.dumps({"warning": "RegimeWarning", "message": str(w.message)}) + "\n")
    except (UsageError, DomainError) as exc:
        # DomainError here comes from constructing model types out of flags
        return _fail("ArgumentError", str(exc), EXIT_USAGE)
    except MotionRadError as exc:
        return _fail(type(exc).__name__, str(exc), EXIT_COMPUTE)
    except OSError as exc:
        return _fail("IOError", f"{exc.filename or args.output}: {exc.strerror or exc}", EXIT_COMPUTE)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
