"""Bessel-type special functions for real and complex arguments.

The numerical kernels are the AMOS-based routines in ``scipy.special``.
This module wraps them with the contracts the flow model relies on:

* domain checking (non-finite input, ``K`` at the origin),
* exponent-carrying (scaled) variants so that ``K`` does not underflow and
  ``I`` does not overflow along the Hankel quadrature tail,
* order ratios ``K_{v+1}/K_v`` and ``I_{v+1}/I_v`` that stay finite for
  orders where the individual functions over/underflow,
* a cached table of the positive zeros of ``J0``.

Mapping of the unsaturated-zone profile
---------------------------------------
The vadose profile is usually written with ``J_v(i x)`` and ``Y_v(i x)``.
For real or complex ``x`` with ``Re x > 0`` we use

    J_v(i x) = i**v I_v(x)
    Y_v(i x) = i**(v + 1) I_v(x) - (2 / pi) i**(-v) K_v(x)

so any combination ``J_v(i x) + chi Y_v(i x)`` is, up to a constant that
cancels in every ratio, ``I_v(x) + chi' K_v(x)``.  The solver therefore
works only with ``I_v``/``K_v`` of the (right half-plane) argument ``x``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special as sp

from .errors import DomainError, SingularityError

__all__ = [
    "AccuracyPolicy",
    "DEFAULT_POLICY",
    "bessel_j",
    "bessel_k_complex",
    "bessel_modified_general",
    "log_bessel_ik",
    "bessel_i_ratio",
    "bessel_k_ratio",
    "j0_zeros",
    "j0_zero_table",
    "stable_tanh",
    "stable_cosh_ratio",
]


@dataclass(frozen=True)
class AccuracyPolicy:
    """Target accuracy for series/continued-fraction fallbacks."""

    rel_tol: float = 1e-14
    max_terms: int = 5000

    def __post_init__(self):
        if not (0.0 < self.rel_tol <= 1e-3):
            raise DomainError(f"rel_tol must lie in (0, 1e-3], got {self.rel_tol}")
        if int(self.max_terms) != self.max_terms or self.max_terms < 50:
            raise DomainError(f"max_terms must be an integer >= 50, got {self.max_terms}")


DEFAULT_POLICY = AccuracyPolicy()


def _check_finite(*args):
    for a in args:
        if not np.all(np.isfinite(a)):
            raise DomainError("non-finite argument")


def _check_order(order):
    order = np.asarray(order, dtype=float)
    if not np.all(np.isfinite(order)) or np.any(order < 0):
        raise DomainError("Bessel order must be finite and non-negative")
    # scipy's K_v returns nan for subnormal v; K is even in v so 0 is exact here
    return np.where(order < np.finfo(float).tiny, 0.0, order)


def bessel_j(order, x):
    """First-kind Bessel function ``J_order(x)`` for real ``x``."""
    order = _check_order(order)
    x = np.asarray(x, dtype=float)
    _check_finite(x)
    out = sp.jv(order, x)
    return out if out.ndim else float(out)


def bessel_k_complex(order, z, scaled=False):
    """Modified Bessel function ``K_0`` or ``K_1`` of complex argument.

    With ``scaled=True`` the value ``exp(z) * K_order(z)`` is returned, which
    is O(|z|**-0.5) and never underflows.
    """
    if order not in (0, 1):
        raise DomainError(f"bessel_k_complex supports orders 0 and 1, got {order}")
    z = np.asarray(z, dtype=complex)
    _check_finite(z)
    if np.any(z == 0):
        raise SingularityError("K_%d is singular at z = 0" % order)
    if np.any(z.real < 0):
        raise DomainError("bessel_k_complex requires Re z >= 0")
    out = sp.kve(order, z) if scaled else sp.kv(order, z)
    return out if out.ndim else complex(out)


def bessel_modified_general(order, z, scaled=False):
    """Return ``(I_v(z), K_v(z))`` for real order ``v >= 0``, ``Re z >= 0``.

    ``scaled=True`` returns ``(exp(-z) I_v(z), exp(z) K_v(z))``; the implied
    exponent is ``z`` itself, so the caller recovers the unscaled pair by
    multiplying with ``exp(z)`` and ``exp(-z)``.  Use :func:`log_bessel_ik`
    when even the scaled values leave the floating-point range (very large
    order at small argument).
    """
    order = _check_order(order)
    z = np.asarray(z, dtype=complex)
    _check_finite(z)
    if np.any(z.real < 0):
        raise DomainError("bessel_modified_general requires Re z >= 0")
    if np.any((z == 0) & (order > 0)):
        raise SingularityError("K_v is singular at z = 0")
    with np.errstate(all="ignore"):
        if scaled:
            # ive scales by exp(-|Re z|); switch to exp(-z) so both members
            # of the pair carry the same (complex) exponent
            i_val = sp.ive(order, z) * np.exp(-1j * z.imag)
            k_val = sp.kve(order, z)
        else:
            i_val = sp.iv(order, z)
            k_val = sp.kv(order, z)
    if i_val.ndim == 0:
        return complex(i_val), complex(k_val)
    return i_val, k_val


# Debye polynomials u_k(p) for the uniform large-order expansion.
def _debye_u(p):
    p2 = p * p
    u1 = p * (3.0 - 5.0 * p2) / 24.0
    u2 = p2 * (81.0 - 462.0 * p2 + 385.0 * p2 * p2) / 1152.0
    u3 = p * p2 * (30375.0 - 369603.0 * p2 + 765765.0 * p2 * p2
                   - 425425.0 * p2 * p2 * p2) / 414720.0
    return u1, u2, u3


def _log_ik_debye(nu, z):
    t = z / nu
    root = np.sqrt(1.0 + t * t)
    eta = root + np.log(t / (1.0 + root))
    p = 1.0 / root
    u1, u2, u3 = _debye_u(p)
    inv = 1.0 / nu
    sum_i = 1.0 + u1 * inv + u2 * inv**2 + u3 * inv**3
    sum_k = 1.0 - u1 * inv + u2 * inv**2 - u3 * inv**3
    common = -0.5 * np.log(root)
    log_i = nu * eta - 0.5 * np.log(2.0 * np.pi * nu) + common + np.log(sum_i)
    log_k = -nu * eta + 0.5 * np.log(np.pi / (2.0 * nu)) + common + np.log(sum_k)
    return log_i, log_k


def log_bessel_ik(order, z):
    """Complex logarithms ``(log I_v(z), log K_v(z))``.

    Imaginary parts are only defined modulo ``2*pi``; use the results in
    differences that are exponentiated.  Falls back to the uniform (Debye)
    expansion where the scaled library values are not representable.
    """
    order = _check_order(order)
    z = np.asarray(z, dtype=complex)
    order, z = np.broadcast_arrays(order, z)
    with np.errstate(all="ignore"):
        ive = sp.ive(order, z)
        kve = sp.kve(order, z)
        log_i = np.log(ive) + np.abs(z.real)
        log_k = np.log(kve) - z
        bad_i = ~np.isfinite(log_i)
        bad_k = ~np.isfinite(log_k)
        bad = bad_i | bad_k
        if np.any(bad):
            nu = np.maximum(order[bad], 1e-300)
            di, dk = _log_ik_debye(nu, z[bad])
            log_i = np.array(log_i, dtype=complex)
            log_k = np.array(log_k, dtype=complex)
            log_i[bad & bad_i] = di[bad_i[bad]]
            log_k[bad & bad_k] = dk[bad_k[bad]]
    return log_i, log_k


def bessel_k_ratio(order, z):
    """``K_{v+1}(z) / K_v(z)`` without intermediate overflow."""
    order = _check_order(order)
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        ratio = sp.kve(order + 1.0, z) / sp.kve(order, z)
    bad = ~np.isfinite(ratio)
    if np.any(bad):
        ratio = np.array(ratio, dtype=complex)
        o, zz = np.broadcast_arrays(order, z)
        _, lk1 = log_bessel_ik(o[bad] + 1.0, zz[bad])
        _, lk0 = log_bessel_ik(o[bad], zz[bad])
        ratio[bad] = np.exp(lk1 - lk0)
    return ratio


def _i_ratio_cf(order, z, policy):
    # Modified Lentz on I_{v+1}/I_v = 1/(2(v+1)/z + 1/(2(v+2)/z + ...))
    tiny = 1e-300
    f = np.full(np.shape(z), tiny, dtype=complex)
    c = f.copy()
    d = np.zeros_like(f)
    done = np.zeros(np.shape(z), dtype=bool)
    for k in range(1, policy.max_terms + 1):
        b = 2.0 * (order + k) / z
        a = 1.0
        d = b + a * d
        d = np.where(d == 0, tiny, d)
        c = b + a / c
        c = np.where(c == 0, tiny, c)
        d = 1.0 / d
        delta = c * d
        f = np.where(done, f, f * delta)
        done |= np.abs(delta - 1.0) < policy.rel_tol
        if np.all(done):
            break
    return f


def bessel_i_ratio(order, z, policy=DEFAULT_POLICY):
    """``I_{v+1}(z) / I_v(z)``; continued fraction where scaled values fail."""
    order = _check_order(order)
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        ratio = sp.ive(order + 1.0, z) / sp.ive(order, z)
    bad = ~np.isfinite(ratio)
    if np.any(bad):
        ratio = np.array(ratio, dtype=complex)
        o, zz = np.broadcast_arrays(order, z)
        ratio[bad] = _i_ratio_cf(o[bad], zz[bad], policy)
    return ratio


@lru_cache(maxsize=None)
def _zero_table(n):
    table = sp.jn_zeros(0, n)
    table.setflags(write=False)
    return table


def j0_zero_table(n):
    """First ``n`` positive zeros of ``J0`` as a read-only array."""
    if n < 1:
        raise DomainError("need at least one zero")
    size = 256
    while size < n:
        size *= 2
    return _zero_table(size)[:n]


def j0_zeros(k):
    """The ``k``-th positive zero of ``J0`` (``k >= 1``)."""
    if int(k) != k or k < 1:
        raise DomainError(f"zero index must be a positive integer, got {k}")
    return float(j0_zero_table(int(k))[-1])


def stable_tanh(z):
    """Complex ``tanh`` that saturates to +-1 instead of overflowing.

    ``z`` may be ``inf`` (used as a sentinel for an unbounded layer).
    """
    z = np.asarray(z, dtype=complex)
    sign = np.where(z.real < 0, -1.0, 1.0)
    with np.errstate(all="ignore"):
        w = sign * z
        e = np.exp(-2.0 * w)
        e = np.where(np.isinf(w.real), 0.0, e)
        out = sign * (1.0 - e) / (1.0 + e)
    return out if out.ndim else complex(out)


def stable_cosh_ratio(num_arg, den_arg):
    """``cosh(num_arg) / cosh(den_arg)`` for ``0 <= Re num_arg <= Re den_arg``.

    Evaluated as ``exp(num - den) (1 + exp(-2 num)) / (1 + exp(-2 den))`` so
    no intermediate exceeds the floating-point range.
    """
    a = np.asarray(num_arg, dtype=complex)
    b = np.asarray(den_arg, dtype=complex)
    a = np.where(a.real < 0, -a, a)
    b = np.where(b.real < 0, -b, b)
    with np.errstate(under="ignore"):
        out = np.exp(a - b) * (1.0 + np.exp(-2.0 * a)) / (1.0 + np.exp(-2.0 * b))
    return out if out.ndim else complex(out)
