"""Time-domain drawdown: Laplace inversion of the transformed fields.

``drawdown_D`` works on dimensionless input (``t_s = alpha_s t / r**2``) and
is what the scenarios call; ``drawdown`` and ``averaged_drawdown`` accept a
:class:`~leaky_unconfined.params.PhysicalSystem` and dimensional ``r, z, t``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import laplace as lp
from .errors import ConvergenceError, DomainError
from .params import SeriesControls, to_dimensionless
from .transforms import (LaplaceConfig, OscillatoryQuadConfig, dehoog_combine, dehoog_nodes,
                         stehfest_nodes, stehfest_plateau)

FLAGS = ("converged", "accelerated-partial", "failed")


@dataclass(frozen=True)
class SolverControls:
    """All numerical knobs of one drawdown evaluation."""

    laplace: LaplaceConfig = field(default_factory=LaplaceConfig)
    quad: OscillatoryQuadConfig = field(default_factory=OscillatoryQuadConfig)
    series: SeriesControls = field(default_factory=SeriesControls)
    stehfest_terms: int = 18
    average_nodes: int = 8

    def __post_init__(self):
        if self.stehfest_terms not in (12, 14, 16, 18):
            raise DomainError("stehfest_terms (largest order tried) must be 12, 14, 16 or 18")
        if self.average_nodes < 2:
            raise DomainError("average_nodes must be >= 2")


@dataclass(frozen=True)
class PointResult:
    s_D: float
    flag: str
    panels: int
    terms: int


def _split_interval(groups, z1, z2):
    """Pieces of ``[z1, z2]`` lying in a single medium."""
    cuts = [c for c in (0.0, 1.0) if z1 < c < z2]
    edges = [z1, *cuts, z2]
    return list(zip(edges[:-1], edges[1:]))


def _heights_and_weights(groups, z_lo, z_hi, n, medium=None):
    if z_lo > z_hi:
        raise DomainError("interval must satisfy z1 <= z2")
    lp.medium_of(groups, z_lo, medium)
    lp.medium_of(groups, z_hi, medium)
    if z_lo == z_hi:
        return [z_lo], np.array([1.0])
    x, w = np.polynomial.legendre.leggauss(n)
    zs, ws = [], []
    for a, b in _split_interval(groups, z_lo, z_hi):
        zs.extend(0.5 * (a + b) + 0.5 * (b - a) * x)
        ws.extend(0.5 * (b - a) * w)
    return zs, np.asarray(ws) / (z_hi - z_lo)


def transformed_drawdown(groups, r_D, z_lo, z_hi, p, controls=SolverControls(), coupling="general",
                         medium=None):
    """Laplace-domain drawdown at a point (``z_lo == z_hi``) or averaged over an interval.

    Returns ``(value, info)`` where ``info`` holds ``panels``, ``terms`` and
    a ``converged`` flag over every quadrature involved.  ``medium`` forces
    one side of an interface and is only meaningful for a point.
    """
    zs, ws = _heights_and_weights(groups, z_lo, z_hi, controls.average_nodes, medium)
    parts = lp.fields_bar(groups, r_D, zs, p, controls.series, controls.quad, coupling, medium)
    value = complex(np.dot(ws, [v for v, _ in parts]))
    info = {
        "panels": max(i["panels"] for _, i in parts),
        "terms": max(i["terms"] for _, i in parts),
        "converged": all(i["converged"] and i["series_converged"] for _, i in parts),
    }
    return value, info


def _invert(groups, r_D, z_lo, z_hi, t_s, controls, coupling, method, medium):
    if not (t_s > 0 and math.isfinite(t_s)):
        raise DomainError(f"t_s must be positive and finite, got {t_s}")
    if method == "dehoog":
        nodes = dehoog_nodes(t_s, controls.laplace)
    elif method == "stehfest":
        nodes = stehfest_nodes(t_s, controls.stehfest_terms)
    else:
        raise DomainError(f"unknown inversion method {method!r}")
    values, panels, terms, ok = [], 0, 0, True
    for p in nodes:
        v, info = transformed_drawdown(groups, r_D, z_lo, z_hi, p, controls, coupling, medium)
        values.append(v)
        panels, terms = max(panels, info["panels"]), max(terms, info["terms"])
        ok &= info["converged"]
    values = np.asarray(values)
    if method == "stehfest":
        orders = tuple(range(10, controls.stehfest_terms + 1, 2))
        s = stehfest_plateau(values.real, t_s, orders)[0]
    else:
        try:
            s = dehoog_combine(values, t_s, controls.laplace)
        except ConvergenceError as exc:
            s, ok = exc.partial, False
    if s is None or not np.isfinite(s):
        return PointResult(math.nan, "failed", panels, terms)
    return PointResult(float(s), "converged" if ok else "accelerated-partial", panels, terms)


def drawdown_D(groups, r_D, z_D, t_s, controls=SolverControls(), coupling="general",
               method="dehoog", medium=None):
    """Dimensionless drawdown ``s_D`` at ``(r_D, z_D)`` and time ``t_s``.

    ``z_D`` is a height or a ``(z_lo, z_hi)`` interval (averaged).
    ``method`` is ``"dehoog"`` or ``"stehfest"``; ``coupling="no_leak"``
    replaces the aquitard by an impermeable base.  Numerical
    trouble is reported through the returned flag rather than raised; only
    invalid input raises :class:`DomainError`.
    """
    z_lo, z_hi = (z_D, z_D) if np.ndim(z_D) == 0 else (float(z_D[0]), float(z_D[1]))
    try:
        return _invert(groups, r_D, z_lo, z_hi, t_s, controls, coupling, method, medium)
    except DomainError:
        raise
    except (ConvergenceError, FloatingPointError, ZeroDivisionError, ValueError):
        return PointResult(math.nan, "failed", 0, 0)


def delayed_drawdown(s, t, t_B):
    """Observation-well drawdown lagging ``s`` with time constant ``t_B``."""
    if t_B < 0:
        raise DomainError("lag time must be non-negative")
    if t_B == 0:
        return s
    return s * -math.expm1(-t / t_B)


def _dimensional(sys, r, z_lo, z_hi, t, controls, coupling):
    if t <= 0:
        raise DomainError("time must be positive")
    b = sys.aquifer.b
    lo, hi = -sys.aquitard.b_1, b + sys.vadose.L
    if not (lo <= z_lo <= hi and lo <= z_hi <= hi):
        raise DomainError(f"z outside the modelled column [{lo}, {hi}]")
    if r < sys.well.r_w:
        raise DomainError("r must not be smaller than the well radius")
    groups, r_D, t_s = to_dimensionless(sys, r, t)
    res = drawdown_D(groups, r_D, (z_lo / b, z_hi / b), t_s, controls, coupling)
    return sys.s_ref * res.s_D, res


def drawdown(sys, r, z, t, controls=SolverControls(), coupling="general"):
    """Drawdown at radius ``r`` and height ``z`` above the aquifer base at time ``t``.

    Returns ``(s, result)``; ``result.s_D`` is ``4 pi K_r b s / Q``.
    """
    return _dimensional(sys, r, z, z, t, controls, coupling)


def averaged_drawdown(sys, r, z1, z2, t, controls=SolverControls(), coupling="general"):
    """Drawdown averaged over ``z1 <= z <= z2`` (split at layer interfaces)."""
    s, _ = _dimensional(sys, r, z1, z2, t, controls, coupling)
    return s
