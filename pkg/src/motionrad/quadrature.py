"""Adaptive 1-D quadrature with pole hints.

Each panel is integrated with an ``n``-point Gauss-Legendre rule and again with
the same rule on its two halves; the difference is the panel's error estimate
and the two-half value is kept.  Panels are bisected (globally, worst first)
until the summed estimate meets ``max(rel_tol*|value|, abs_tol)``.

Narrow Lorentzian-like peaks are handled through :class:`PoleHint`: before any
adaptivity the interval is cut at the hint center and at geometrically spaced
offsets ``width * 2**j`` on either side, so each peak owns panels no wider than
its own width near the center.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceFailure, DomainError

_ORDER = 15
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(_ORDER)


@dataclass(frozen=True)
class PoleHint:
    center: float
    width: float

    def __post_init__(self):
        if not self.width > 0:
            raise DomainError(f"pole hint width must be > 0, got {self.width!r}")


@dataclass(frozen=True)
class IntegrationSettings:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-300
    max_depth: int = 60
    pole_hints: Sequence[PoleHint] = field(default_factory=tuple)
    max_subdivisions: int = 100_000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be > 0")
        if self.max_depth < 1:
            raise DomainError("max_depth must be >= 1")

    def with_hints(self, hints: Sequence[PoleHint]) -> IntegrationSettings:
        return IntegrationSettings(
            rel_tol=self.rel_tol,
            abs_tol=self.abs_tol,
            max_depth=self.max_depth,
            pole_hints=tuple(self.pole_hints) + tuple(hints),
            max_subdivisions=self.max_subdivisions,
        )


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error_estimate: float
    subdivisions: int


def initial_partition(lo: float, hi: float, hints: Sequence[PoleHint] = ()) -> np.ndarray:
    """Breakpoints covering ``[lo, hi]``, graded geometrically toward every hint."""
    points = [lo, hi]
    span = hi - lo
    for hint in hints:
        if hint.center < lo - span or hint.center > hi + span:
            continue
        offset = hint.width
        points.append(hint.center)
        while offset < span:
            points.extend((hint.center - offset, hint.center + offset))
            offset *= 2.0
    pts = np.unique(np.clip(np.asarray(points, dtype=float), lo, hi))
    # drop slivers that would only cost evaluations
    keep = np.concatenate(([True], np.diff(pts) > 1e-14 * max(abs(lo), abs(hi), span)))
    pts = pts[keep]
    pts[-1] = hi
    return pts


def _panel_values(f, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(f(x.ravel()), dtype=float)
    if y.shape != (x.size,):
        y = np.broadcast_to(y, (x.size,)) if y.ndim == 0 else y.reshape(x.size)
    if not np.all(np.isfinite(y)):
        bad = x.ravel()[~np.isfinite(y)][0]
        raise DomainError(f"integrand is not finite at x = {bad!r}")
    return half * (y.reshape(x.shape) @ _WEIGHTS)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    settings: IntegrationSettings | None = None,
) -> IntegrationResult:
    """Integrate ``f`` over ``[lo, hi]``.

    ``f`` must accept a 1-D numpy array and return values of the same shape.

    Raises:
        DomainError: if ``lo >= hi`` or the integrand returns a non-finite sample.
        ConvergenceFailure: if the tolerance is not met within ``max_depth``
            bisections of any panel (or ``max_subdivisions`` panels in total).
    """
    settings = settings or IntegrationSettings()
    lo, hi = float(lo), float(hi)
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise DomainError(f"need finite lo < hi, got [{lo!r}, {hi!r}]")

    edges = initial_partition(lo, hi, settings.pole_hints)
    a, b = edges[:-1], edges[1:]
    depth = np.zeros(a.size, dtype=int)
    mid = 0.5 * (a + b)
    coarse = _panel_values(f, a, b)
    left = _panel_values(f, a, mid)
    right = _panel_values(f, mid, b)

    while True:
        fine = left + right
        err = np.abs(fine - coarse)
        value = math.fsum(fine)
        total_err = float(np.sum(err))
        tol = max(settings.rel_tol * abs(value), settings.abs_tol)
        if total_err <= tol:
            return IntegrationResult(value, total_err, int(a.size))

        # split every panel carrying more than its share of the tolerance
        split = err > tol / a.size
        blocked = split & (depth >= settings.max_depth)
        split &= ~blocked
        if not np.any(split) or a.size + np.count_nonzero(split) > settings.max_subdivisions:
            reason = "max_depth reached" if np.any(blocked) else "subdivision limit reached"
            raise ConvergenceFailure(
                f"{reason}: error estimate {total_err:.3g} > tolerance {tol:.3g}",
                value=value,
                error_estimate=total_err,
                subdivisions=int(a.size),
            )

        # children [la, lb] and [ra, rb]; their coarse values are the parent's halves
        la, lb = a[split], mid[split]
        ra, rb = mid[split], b[split]
        lmid = 0.5 * (la + lb)
        rmid = 0.5 * (ra + rb)
        halves = _panel_values(
            f,
            np.concatenate((la, lmid, ra, rmid)),
            np.concatenate((lmid, lb, rmid, rb)),
        )
        ll, lr, rl, rr = np.split(halves, 4)

        keep = ~split
        child_depth = depth[split] + 1
        a = np.concatenate((a[keep], la, ra))
        b = np.concatenate((b[keep], lb, rb))
        coarse = np.concatenate((coarse[keep], left[split], right[split]))
        new_left = np.concatenate((left[keep], ll, rl))
        new_right = np.concatenate((right[keep], lr, rr))
        left, right = new_left, new_right
        depth = np.concatenate((depth[keep], child_depth, child_depth))
        mid = 0.5 * (a + b)
