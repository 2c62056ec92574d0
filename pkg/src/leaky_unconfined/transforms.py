"""Numerical inversion of Laplace transforms and semi-infinite Hankel integrals.

Two Laplace inverters are provided: the de Hoog, Knight & Stokes accelerated
Fourier series (complex probes, the production route) and Gaver-Stehfest
(real probes only), which serves as an independent cross-check.

Hankel-type integrals ``int_0^inf g(y) J0(c y) dy`` are summed panel by
panel between consecutive zeros of ``J0(c y)`` and the alternating partial
sums are extrapolated with Wynn's epsilon algorithm.  The kernel convention
is fixed: **the engine supplies the J0(c y) factor, ``g`` supplies
everything else** (including any ``y`` weight).
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial, log

import numpy as np
from scipy.special import j0

from .errors import ConvergenceError, DomainError
from .special import j0_zero_table

__all__ = [
    "LaplaceConfig",
    "OscillatoryQuadConfig",
    "dehoog_nodes",
    "dehoog_combine",
    "invert_laplace_dehoog",
    "stehfest_coefficients",
    "stehfest_nodes",
    "invert_laplace_stehfest",
    "stehfest_plateau",
    "accelerate_sequence",
    "integrate_oscillatory",
]


@dataclass(frozen=True)
class LaplaceConfig:
    """de Hoog inversion settings.

    ``n_terms`` is the length ``2M`` of the accelerated series (``2M + 1``
    probes).  The contour period is ``T = contour_shift_factor * t`` and the
    abscissa ``gamma = -log(rel_tol) / (2 T)``.
    """

    n_terms: int = 20
    contour_shift_factor: float = 2.0
    rel_tol: float = 1e-9

    def __post_init__(self):
        if int(self.n_terms) != self.n_terms or self.n_terms % 2 or not 8 <= self.n_terms <= 64:
            raise DomainError(f"n_terms must be an even integer in [8, 64], got {self.n_terms}")
        if not self.contour_shift_factor > 1.0:
            raise DomainError("contour_shift_factor must exceed 1")
        if not 0.0 < self.rel_tol <= 1e-4:
            raise DomainError(f"rel_tol must lie in (0, 1e-4], got {self.rel_tol}")


@dataclass(frozen=True)
class OscillatoryQuadConfig:
    panels_before_extrapolation: int = 12
    max_panels: int = 1024
    panel_rule: int = 16
    tail_rel_tol: float = 1e-10
    # relative to the largest partial sum; guards integrals that cancel to ~0
    cancellation_floor: float = 1e-8

    def __post_init__(self):
        if self.panels_before_extrapolation < 4:
            raise DomainError("panels_before_extrapolation must be >= 4")
        if self.max_panels < self.panels_before_extrapolation:
            raise DomainError("max_panels must be >= panels_before_extrapolation")
        if self.panel_rule < 8:
            raise DomainError("panel_rule (Gauss nodes per panel) must be >= 8")
        if not self.tail_rel_tol > 0:
            raise DomainError("tail_rel_tol must be positive")


# --------------------------------------------------------------------------
# de Hoog
# --------------------------------------------------------------------------

def _dehoog_params(t, cfg):
    if not (np.isfinite(t) and t > 0):
        raise DomainError(f"inversion time must be positive and finite, got {t}")
    T = cfg.contour_shift_factor * t
    gamma = -log(cfg.rel_tol) / (2.0 * T)
    return T, gamma


def dehoog_nodes(t, cfg=LaplaceConfig()):
    """Laplace-parameter probes used to invert at time ``t``."""
    T, gamma = _dehoog_params(t, cfg)
    k = np.arange(cfg.n_terms + 1)
    return gamma + 1j * np.pi * k / T


def dehoog_combine(values, t, cfg=LaplaceConfig()):
    """Turn transform values at :func:`dehoog_nodes` into ``f(t)``.

    Raises :class:`ConvergenceError` (with the un-accelerated Fourier sum as
    ``partial``) when the quotient-difference table breaks down.
    """
    T, gamma = _dehoog_params(t, cfg)
    a = np.array(values, dtype=complex)
    if a.shape != (cfg.n_terms + 1,):
        raise DomainError("expected %d transform values" % (cfg.n_terms + 1))
    if not np.all(np.isfinite(a)):
        raise ConvergenceError("non-finite transform value", partial=np.nan)
    a[0] *= 0.5
    M = cfg.n_terms // 2
    n = 2 * M
    z = np.exp(1j * np.pi * t / T)

    def partial():
        powers = z ** np.arange(n + 1)
        return float(np.exp(gamma * t) / T * np.real(np.sum(a * powers)))

    if np.all(a == 0):
        return 0.0

    # quotient-difference table; e[r][i], q[r][i] with r the column
    with np.errstate(all="ignore"):
        e_prev = np.zeros(n + 1, dtype=complex)
        q = a[1:] / a[:-1]
        if not np.all(np.isfinite(q)):
            raise ConvergenceError("QD breakdown (vanishing probe value)", partial=partial())
        d = np.zeros(n + 1, dtype=complex)
        d[0] = a[0]
        for r in range(1, M + 1):
            e = q[1:] - q[:-1] + e_prev[1:len(q)]
            d[2 * r - 1] = -q[0]
            d[2 * r] = -e[0]
            if r < M:
                if np.any(e[:-1] == 0):
                    raise ConvergenceError("QD breakdown (vanishing e)", partial=partial())
                q = q[1:-1] * e[1:] / e[:-1]
            e_prev = e
        if not np.all(np.isfinite(d)):
            raise ConvergenceError("QD table overflow", partial=partial())

        A_prev, A = 0.0 + 0j, d[0]
        B_prev, B = 1.0 + 0j, 1.0 + 0j
        for i in range(1, n):
            A_prev, A = A, A + d[i] * z * A_prev
            B_prev, B = B, B + d[i] * z * B_prev
        h = 0.5 * (1.0 + (d[n - 1] - d[n]) * z)
        rem = -h * (1.0 - np.sqrt(1.0 + d[n] * z / h**2))
        A = A + rem * A_prev
        B = B + rem * B_prev
        result = np.exp(gamma * t) / T * np.real(A / B)
    if not np.isfinite(result):
        raise ConvergenceError("continued fraction produced a non-finite value", partial=partial())
    return float(result)


def invert_laplace_dehoog(F, t, cfg=LaplaceConfig()):
    """Invert ``F`` (complex ``p`` -> complex) at time ``t`` by de Hoog's method."""
    p = dehoog_nodes(t, cfg)
    values = np.array([F(pk) for pk in p], dtype=complex)
    return dehoog_combine(values, t, cfg)


# --------------------------------------------------------------------------
# Stehfest
# --------------------------------------------------------------------------

@lru_cache(maxsize=None)
def stehfest_coefficients(N):
    """Gaver-Stehfest weights ``V_1 .. V_N`` (exact rationals, returned as floats)."""
    if N % 2 or not 2 <= N <= 30:
        raise DomainError(f"Stehfest N must be even and moderate, got {N}")
    half = N // 2
    V = []
    for k in range(1, N + 1):
        acc = Fraction(0)
        for j in range((k + 1) // 2, min(k, half) + 1):
            acc += Fraction(
                j**half * factorial(2 * j),
                factorial(half - j) * factorial(j) * factorial(j - 1)
                * factorial(k - j) * factorial(2 * j - k),
            )
        V.append(float((-1) ** (k + half) * acc))
    out = np.array(V)
    out.setflags(write=False)
    return out


def stehfest_nodes(t, N=12):
    if not (np.isfinite(t) and t > 0):
        raise DomainError(f"inversion time must be positive and finite, got {t}")
    return np.arange(1, N + 1) * log(2.0) / t


def invert_laplace_stehfest(F, t, N=12):
    """Gaver-Stehfest inversion; ``F`` is only probed on the positive real axis."""
    if not 8 <= N <= 18:
        raise DomainError(f"Stehfest N must lie in [8, 18], got {N}")
    p = stehfest_nodes(t, N)
    vals = np.array([F(pk) for pk in p], dtype=float)
    return float(log(2.0) / t * np.dot(stehfest_coefficients(N), vals))


def stehfest_plateau(values, t, orders=(10, 12, 14, 16, 18)):
    """Stehfest estimate at the most stable order.

    ``values`` holds ``F(k ln2 / t)`` for ``k = 1 .. max(orders)``; because
    the probes are nested every order in ``orders`` is available at no extra
    cost.  Low orders are biased on steep transients while high orders
    amplify the noise in ``F``, so the order whose estimate changes least
    from the previous order is chosen.  Returns ``(estimate, order, spread)``.
    """
    orders = sorted(orders)
    values = np.asarray(values, dtype=float)
    if len(orders) < 2 or len(values) < orders[-1]:
        raise DomainError("need at least two orders and max(orders) transform values")
    est = [log(2.0) / t * float(np.dot(stehfest_coefficients(n), values[:n])) for n in orders]
    diffs = [abs(b - a) for a, b in zip(est[:-1], est[1:])]
    i = int(np.argmin(diffs))
    return est[i + 1], orders[i + 1], diffs[i]


# --------------------------------------------------------------------------
# Sequence acceleration and oscillatory quadrature
# --------------------------------------------------------------------------

def _epsilon(seq):
    """Wynn epsilon table; returns (estimate, degenerate)."""
    s = [complex(v) for v in seq]
    n = len(s)
    prev = [0j] * (n + 1)   # column -1
    cur = list(s)           # column 0
    best = s[-1]
    col = 0
    while len(cur) > 1:
        nxt = []
        for k in range(len(cur) - 1):
            diff = cur[k + 1] - cur[k]
            scale = max(abs(cur[k + 1]), abs(cur[k]), 1e-300)
            if diff == 0 or abs(diff) <= 1e-15 * scale:
                return best, True
            nxt.append(prev[k + 1] + 1.0 / diff)
        prev, cur = cur, nxt
        col += 1
        if col % 2 == 0:
            best = cur[-1]
    return best, False


def accelerate_sequence(partial_sums, full_output=False):
    """Extrapolate a sequence of partial sums with Wynn's epsilon algorithm.

    Exact for sequences whose error is a single geometric term.  If the
    differences degenerate (sequence already converged) the most recent
    stable estimate is returned and, with ``full_output``, flagged.
    """
    if len(partial_sums) < 3:
        raise DomainError("need at least three partial sums")
    value, degenerate = _epsilon(partial_sums)
    if full_output:
        return value, {"degenerate": degenerate}
    return value


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _panel_nodes(edges, rule):
    """Gauss nodes/weights on consecutive sub-intervals of ``edges``."""
    x, w = _gauss_legendre(rule)
    lo = edges[:-1, None]
    hi = edges[1:, None]
    half = 0.5 * (hi - lo)
    return (lo + half * (x + 1.0)).ravel(), (half * w).ravel()


def integrate_oscillatory(g, oscillation_scale, cfg=OscillatoryQuadConfig(),
                          breakpoints=None, full_output=False):
    """``int_0^inf g(y) J0(c y) dy`` with ``c = oscillation_scale``.

    ``g`` is called with a 1-D array of abscissae and must return values of
    the same shape.  ``breakpoints`` are extra interior points (features of
    ``g`` narrower than a ``J0`` half-period) at which panels are split.

    With ``full_output`` a ``(value, info)`` pair is returned, ``info``
    holding the panel count, the last two extrapolated estimates and a
    ``converged`` flag; otherwise non-convergence raises
    :class:`ConvergenceError`.
    """

    c = float(oscillation_scale)
    if not c > 0:
        raise DomainError("oscillation scale must be positive")
    zeros = j0_zero_table(cfg.max_panels) / c
    edges_all = np.concatenate([[0.0], zeros])
    bp = np.sort(np.asarray(breakpoints if breakpoints is not None else [], dtype=float))
    bp = bp[(bp > 0) & (bp < zeros[-1])]
    # partial sums before the last feature are not part of the alternating tail
    first_tail = int(np.searchsorted(zeros, bp[-1])) + 1 if bp.size else 0

    sums = []
    running = 0j
    estimates = []
    info = {"panels": 0, "converged": False, "estimate": None, "previous": None}

    def add_panels(k0, k1):
        nonlocal running
        lo, hi = edges_all[k0], edges_all[k1]
        inner = bp[(bp > lo) & (bp < hi)]
        edges = np.union1d(np.concatenate([edges_all[k0:k1 + 1], inner]), [])
        y, w = _panel_nodes(edges, cfg.panel_rule)
        vals = np.asarray(g(y), dtype=complex) * j0(c * y) * w
        if not np.all(np.isfinite(vals)):
            raise ConvergenceError("integrand is not finite", partial=np.nan,
                                   panels=k1)
        # attribute sub-interval contributions to their J0 panel
        owner = np.searchsorted(edges_all[k0 + 1:k1 + 1], y, side="left")
        contrib = np.bincount(owner, weights=vals.real, minlength=k1 - k0) \
            + 1j * np.bincount(owner, weights=vals.imag, minlength=k1 - k0)
        for v in contrib:
            running += v
            sums.append(running)

    k = min(cfg.panels_before_extrapolation, cfg.max_panels)
    k = max(k, min(first_tail + 4, cfg.max_panels))
    add_panels(0, k)
    window = 24
    while True:
        n = len(sums)
        start = max(min(first_tail, n - 3), n - window, 0)
        tail = sums[start:]
        scale = max(abs(s) for s in sums)
        if len(tail) >= 4:
            e_now = accelerate_sequence(tail)
            e_before = accelerate_sequence(tail[:-1])
        else:
            e_now, e_before = sums[-1], sums[-2] if n > 1 else sums[-1]
        estimates.append(e_now)
        floor = cfg.cancellation_floor * scale
        if abs(e_now - e_before) <= cfg.tail_rel_tol * max(abs(e_now), floor) or scale == 0:
            info.update(panels=n, converged=True, estimate=e_now, previous=e_before)
            break
        if n >= cfg.max_panels:
            info.update(panels=n, converged=False, estimate=e_now, previous=e_before)
            break
        add_panels(n, n + 1)

    value = complex(info["estimate"])
    if full_output:
        return value, info
    if not info["converged"]:
        raise ConvergenceError(
            "oscillatory integral did not converge within %d panels" % info["panels"],
            partial=value, panels=info["panels"],
            change=abs(info["estimate"] - info["previous"]))
    return value
