"""Laplace and Laplace-Hankel domain solution of the leaky-unconfined problem.

All quantities are dimensionless: lengths are scaled by the initial
saturated thickness ``b`` and drawdown by ``Q / (4 pi K_r b)``.  The Laplace
parameter ``p`` used throughout is conjugate to the dimensionless time
``t_s = alpha_s t / r**2`` of the observation point (the combination often
written ``p_D / t_s``), so inverting a transform at ``t_s`` gives ``s_D``.

The saturated-zone drawdown is split as ``s = s_C + s_U``: ``s_C`` is the
finite-radius, partially penetrating well with wellbore storage in a
confined slab (evaluated as a cosine series), ``s_U`` the correction that
carries the aquitard below and the unsaturated zone above, obtained as a
Hankel integral over ``y`` with kernel ``y J0(y sqrt(K_D) r_D)``.

Formula reconciliations (checked by the test-suite):

* wellbore-storage factor ``Omega(n) = x_n K1(x_n) + C_wD / (2 (l_D - d_D))
  r_wD**2 phi_0**2 K0(x_n)`` with ``x_n = r_wD phi_n``: the storage term
  carries the Laplace parameter only (``phi_0**2``), as the mass balance of
  the casing requires;
* the partial-penetration weights are ``omega_0 = 2 / Omega(0)`` and
  ``omega_n = 4 (sin(n pi l_D) - sin(n pi d_D)) / (n pi (l_D - d_D) Omega(n))``,
  the normalisation for which ``n -> 0`` matches the cosine-series mean;
* ``rho_2`` carries ``exp(+mu)`` on its aquitard term; the impermeable-base
  limit is ``rho_1 = rho_2 = -C1 / (2 (cosh mu - (mu / q_D) sinh mu))``;
* the Hankel transform of ``s_C`` treats the drawdown inside the well radius
  as constant, giving the ``J1``/``J0`` bracket in :func:`ddbar_sC`, with
  coefficients fixed by the round trip back to :func:`sbar_C`.
"""

from dataclasses import dataclass

import numpy as np
from scipy import special as sp

from .errors import ConvergenceError, DomainError, PoleError
from .params import SeriesControls
from .special import bessel_i_ratio, bessel_k_ratio, log_bessel_ik, stable_tanh
from .transforms import OscillatoryQuadConfig, integrate_oscillatory

PI = np.pi


def _sinpi(v):
    # exact zeros at integer arguments so full penetration has no residual modes
    v = np.asarray(v, dtype=float)
    r = np.mod(v, 2.0)
    out = np.sin(PI * r)
    return np.where((r == 0.0) | (r == 1.0), 0.0, out)


def _cospi(v):
    v = np.asarray(v, dtype=float)
    r = np.mod(v, 2.0)
    out = np.cos(PI * r)
    out = np.where(r == 0.0, 1.0, out)
    out = np.where(r == 1.0, -1.0, out)
    return np.where(r == 0.5, 0.0, np.where(r == 1.5, 0.0, out))


def _j1_over_x(x):
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    return np.where(small, 0.5 - x * x / 16.0, sp.j1(safe) / safe)


# --------------------------------------------------------------------------
# Confined partially penetrating well with wellbore storage
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfinedSeries:
    """Cosine-series coefficients of ``s_C`` for one ``(r_D, p)``.

    ``point_w[n]`` is ``omega_n K0(phi_n) / p``; ``coef_A``/``coef_B`` are the
    ``J1``/``J0`` coefficients of the Hankel transform.  All modes up to the
    cap are stored; ``terms`` is where the point series met its tolerance.
    """

    r_D: float
    p: complex
    n: np.ndarray
    point_w: np.ndarray
    coef_A: np.ndarray
    coef_B: np.ndarray
    r_wD: float
    K_D: float
    r_w_over_b: float
    converged: bool
    point_terms: int

    @property
    def terms(self):
        """Cosine modes needed by the point series (reported diagnostic)."""
        return self.point_terms

    def point(self, z_D):
        """``sbar_C`` at ``z_D`` (scalar or array)."""
        z = np.asarray(z_D, dtype=float)
        cosv = _cospi(self.n[:, None] * (1.0 - z.ravel()[None, :]))
        out = self.point_w @ cosv
        return out.reshape(z.shape) if z.ndim else complex(out[0])

    def hankel(self, y, z_D):
        """Laplace-Hankel transform of ``s_C`` at Hankel nodes ``y``.

        ``z_D`` may be a scalar or a 1-D array; the result has shape
        ``(len(y),)`` or ``(len(y), len(z_D))``.
        """
        y = np.asarray(y, dtype=float)
        z = np.atleast_1d(np.asarray(z_D, dtype=float))
        # modes with zero weight (all n >= 1 at full penetration) drop out
        live = (self.coef_A != 0) | (self.coef_B != 0)
        n, cA, cB = self.n[live], self.coef_A[live], self.coef_B[live]
        mu2 = y * y + self.p / (self.K_D * self.r_D**2)
        inv = 1.0 / (mu2[:, None] + ((n * PI) ** 2)[None, :])
        cosv = _cospi(n[:, None] * (1.0 - z[None, :]))
        A = inv @ (cA[:, None] * cosv)
        B = inv @ (cB[:, None] * cosv)
        xw = y * np.sqrt(self.K_D) * self.r_w_over_b
        G = self.r_wD * _j1_over_x(xw)[:, None] * A + sp.j0(xw)[:, None] * B
        return G[:, 0] if np.ndim(z_D) == 0 else G


def confined_series(groups, r_D, p, ctl=SeriesControls()):
    """Build the cosine series of the confined solution at ``(r_D, p)``."""
    if r_D < groups.r_w_over_b * (1 - 1e-12):
        raise DomainError("observation radius is inside the pumping well")
    p = complex(p)
    rwD = min(groups.r_wD(r_D), 1.0)
    ld = groups.l_D - groups.d_D
    beta = groups.C_wD / (2.0 * ld)
    n = np.arange(ctl.max_cosine_terms + 1, dtype=float)
    phi = np.sqrt(p + r_D**2 * groups.K_D * (n * PI) ** 2)
    xw = rwD * phi
    k0w, k1w = sp.kve(0, xw), sp.kve(1, xw)
    omega_scaled = xw * k1w + beta * rwD**2 * phi[0] ** 2 * k0w   # Omega(n) * exp(x_n)
    with np.errstate(divide="ignore", invalid="ignore"):
        weight = np.where(n == 0, 2.0,
                          4.0 * (_sinpi(n * groups.l_D) - _sinpi(n * groups.d_D))
                          / (np.where(n == 0, 1.0, n) * PI * ld))
    point_w = weight * sp.kve(0, phi) / omega_scaled * np.exp(-(phi - xw)) / p
    coef_B = weight * xw * k1w / omega_scaled / p
    coef_A = weight * rwD * phi**2 * k0w / omega_scaled / p

    # The point series decays like K0(phi_n) and is truncated by the
    # three-consecutive-terms rule.  The Hankel coefficients decay only
    # algebraically (the well-face head enters through J1), so every mode up
    # to the cap is kept in both series: the round trip between the two is
    # then exact term by term and the interface conditions hold to rounding.
    pb = np.abs(point_w)
    csum = np.cumsum(pb)
    small = np.where(csum > 0, pb / np.where(csum > 0, csum, 1.0), 0.0)[1:] <= ctl.series_rel_tol
    N = ctl.max_cosine_terms
    converged = False
    run = 0
    for i, ok in enumerate(small, start=1):
        run = run + 1 if ok else 0
        if run >= ctl.consecutive:
            N = i
            converged = True
            break
    return ConfinedSeries(r_D=float(r_D), p=p, n=n, point_w=point_w,
                          coef_A=coef_A, coef_B=coef_B, r_wD=rwD,
                          K_D=groups.K_D, r_w_over_b=groups.r_w_over_b,
                          converged=converged, point_terms=N)


def sbar_C(groups, r_D, z_D, p, ctl=SeriesControls()):
    """Transformed confined drawdown (dimensionless) at ``(r_D, z_D)``.

    Raises :class:`ConvergenceError` (carrying the partial sum) when the
    cosine series has not met ``series_rel_tol`` by ``max_cosine_terms``.
    """
    if not 0.0 <= z_D <= 1.0:
        raise DomainError("z_D must lie in [0, 1] for the saturated zone")
    series = confined_series(groups, r_D, p, ctl)
    value = series.point(z_D)
    if not series.converged:
        raise ConvergenceError("cosine series not converged at the term cap",
                               partial=value, terms=ctl.max_cosine_terms)
    return value


def ddbar_sC(groups, r_D, p, y, z_D, ctl=SeriesControls(), series=None):
    """Laplace-Hankel transform of the confined drawdown at Hankel nodes ``y``."""
    series = series or confined_series(groups, r_D, p, ctl)
    return series.hankel(y, z_D)


# --------------------------------------------------------------------------
# Unsaturated zone
# --------------------------------------------------------------------------

def vadose_B(groups, r_D, p):
    return (p * groups.S_D * groups.a_cD * np.exp(groups.a_kD * (groups.psi_kD - groups.psi_aD))
            / (groups.K_D * r_D**2))


@dataclass
class _VadoseState:
    q: np.ndarray                 # d sigma / d zeta / sigma at the water table
    profile: object               # callable zeta -> profile factor (1 at zeta = 0)
    chi: np.ndarray               # mixing coefficient (J/Y basis)


def _equal_exponent_state(groups, B, y):
    kappa = groups.kappa_D
    L = groups.L_D
    w = B + y * y
    root = np.sqrt(kappa * kappa + 4.0 * w)
    d1 = -2.0 * w / (kappa + root)            # (kappa - root) / 2 without cancellation
    d2 = 0.5 * (kappa + root)
    if np.isinf(L):
        chi = np.zeros_like(d1)
        q = d1

        def profile(zeta):
            return np.exp(d1 * zeta)
    else:
        chi = -(d1 / d2) * np.exp((d1 - d2) * L)
        q = (d1 + chi * d2) / (1.0 + chi)

        def profile(zeta):
            reflected = -(d1 / d2) * np.exp(d1 * L + d2 * (zeta - L))
            return (np.exp(d1 * zeta) + reflected) / (1.0 + chi)
    return _VadoseState(q=q, profile=profile, chi=chi)


def _log_cross(nu, x1, x0, which):
    """``log(X_nu(x1) / X_nu(x0))`` for X in {I, K}."""
    li1, lk1 = log_bessel_ik(nu, x1)
    li0, lk0 = log_bessel_ik(nu, x0)
    return (li1 - li0) if which == "I" else (lk1 - lk0)


def _bessel_state(groups, B, y):
    a = groups.a_kD
    lam = groups.lambda_D
    L = groups.L_D
    alam = abs(lam)
    nu = np.sqrt(a * a + 4.0 * y * y) / alam
    xi0 = 2.0 * np.sqrt(B) / alam * np.ones_like(nu)
    c0 = a + lam * nu
    RI0 = bessel_i_ratio(nu, xi0)
    RK0 = bessel_k_ratio(nu, xi0)
    primary = "K" if lam > 0 else "I"
    secondary = "I" if lam > 0 else "K"

    if np.isinf(L):
        W = np.zeros_like(xi0)
    else:
        xiL = xi0 * np.exp(lam * L / 2.0)
        RIL = bessel_i_ratio(nu, xiL)
        RKL = bessel_k_ratio(nu, xiL)
        num_I = c0 + lam * xiL * RIL
        num_K = c0 - lam * xiL * RKL
        # W = (secondary coefficient) * X_sec(xi0) / X_prim(xi0)
        log_cross = (_log_cross(nu, xiL, xi0, primary) - _log_cross(nu, xiL, xi0, secondary))
        with np.errstate(over="ignore", under="ignore"):
            if lam > 0:
                W = -np.exp(log_cross) * num_K / num_I
            else:
                W = -np.exp(log_cross) * num_I / num_K
        W = np.where(np.isfinite(W), W, 0.0)

    if lam > 0:
        q = 0.5 * c0 + 0.5 * lam * xi0 * (W * RI0 - RK0) / (1.0 + W)
    else:
        q = 0.5 * c0 + 0.5 * lam * xi0 * (RI0 - W * RK0) / (1.0 + W)

    def profile(zeta):
        xi = xi0 * np.exp(lam * zeta / 2.0)
        lp = _log_cross(nu, xi, xi0, primary)
        out = np.exp(a * zeta / 2.0 + lp)
        if not np.isinf(L):
            ls = _log_cross(nu, xi, xi0, secondary)
            with np.errstate(over="ignore", under="ignore", invalid="ignore"):
                mix = W * np.exp(ls - lp)
            mix = np.where(np.isfinite(mix), mix, 0.0)
            out = out * (1.0 + mix) / (1.0 + W)
        return out

    # chi in the J_nu(i xi) / Y_nu(i xi) basis used in the literature
    if lam > 0:
        coef_K_over_I = np.where(W == 0, np.inf, 1.0 / np.where(W == 0, 1.0, W))
    else:
        coef_K_over_I = W
    chi = _chi_jy(nu, coef_K_over_I, xi0, lam)
    return _VadoseState(q=q, profile=profile, chi=chi)


def _chi_jy(nu, ratio_scaled, xi0, lam):
    # ratio_scaled is (coef_K * K(xi0)) / (coef_I * I(xi0)); undo the scaling
    li, lk = log_bessel_ik(nu, xi0)
    with np.errstate(all="ignore"):
        chi_ik = ratio_scaled * np.exp(li - lk)
        phase = np.exp(-1j * PI * nu)
        chi = chi_ik / (-(2.0 / PI) * phase - 1j * chi_ik)
    return np.where(np.isinf(chi_ik), 1j, chi)


def _vadose_state(groups, r_D, p, y):
    B = vadose_B(groups, r_D, p)
    y = np.asarray(y, dtype=float)
    if groups.a_kD == groups.a_cD:
        return _equal_exponent_state(groups, B, y)
    return _bessel_state(groups, B, y)


def vadose_qD(groups, r_D, p, y):
    """Water-table flux coefficient: ``d sigma/d z_D = q_D sigma`` at ``z_D = 1``."""
    return _vadose_state(groups, r_D, p, y).q


def vadose_chi(groups, r_D, p, y):
    """Surface-reflection coefficient of the unsaturated profile.

    For equal exponents this is the weight of the growing exponential; for
    ``a_kD != a_cD`` it is expressed in the ``J_nu(i xi)``/``Y_nu(i xi)``
    basis, so an unbounded zone with ``a_kD > a_cD`` gives ``1j``.
    """
    return _vadose_state(groups, r_D, p, y).chi


def vadose_profile(groups, r_D, p, y, zeta):
    """``sigma(zeta) / sigma(0)`` at height ``zeta = z_D - 1`` above the water table."""
    if zeta < 0 or zeta > groups.L_D:
        raise DomainError("height above the water table outside the unsaturated zone")
    return _vadose_state(groups, r_D, p, y).profile(zeta)


# --------------------------------------------------------------------------
# Aquitard
# --------------------------------------------------------------------------

def _aquitard_mu1(groups, r_D, p, y):
    if groups.R_Kz == 0:
        return None
    return np.sqrt((groups.R_Kr * y * y + groups.R_Ss * p / (groups.K_D * r_D**2)) / groups.R_Kz)


def aquitard_q1b(groups, r_D, p, y):
    """Aquifer-base flux coefficient ``R_Kz mu1 tanh(mu1 R_b)``."""
    y = np.asarray(y, dtype=float)
    if groups.R_Kz == 0:
        return np.zeros(y.shape, dtype=complex)
    mu1 = _aquitard_mu1(groups, r_D, p, y)
    return q1b_from_mu1(groups.R_Kz, mu1, groups.R_b)


def q1b_from_mu1(R_Kz, mu1, R_b):
    mu1 = np.asarray(mu1, dtype=complex)
    if np.isinf(R_b):
        return R_Kz * mu1
    return R_Kz * mu1 * stable_tanh(mu1 * R_b)


def aquitard_profile(groups, r_D, p, y, z_D):
    """``s1(z_D) / s1(0)``: ``cosh(mu1 (z_D + R_b)) / cosh(mu1 R_b)``."""
    if z_D > 0 or z_D < -groups.R_b:
        raise DomainError("z_D outside the aquitard")
    mu1 = _aquitard_mu1(groups, r_D, p, y)
    if mu1 is None:
        raise DomainError("aquitard drawdown undefined for zero vertical conductivity ratio")
    if np.isinf(groups.R_b):
        return np.exp(mu1 * z_D)
    a = mu1 * (z_D + groups.R_b)
    b = mu1 * groups.R_b
    return np.exp(a - b) * (1.0 + np.exp(-2.0 * a)) / (1.0 + np.exp(-2.0 * b))


# --------------------------------------------------------------------------
# Coupling of the saturated correction to its neighbours
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TransformPoint:
    """Derived quantities at one ``(p, y)`` node (arrays over ``y``)."""

    p: complex
    y: np.ndarray
    mu: np.ndarray
    mu1: np.ndarray
    q_Db: np.ndarray
    q1b: np.ndarray
    rho1: np.ndarray
    rho2: np.ndarray
    Delta: np.ndarray


def mu_of(groups, r_D, p, y):
    return np.sqrt(np.asarray(y, dtype=float) ** 2 + p / (groups.K_D * r_D**2))


def _normalised_det(mu, Q1, QD):
    # Delta * exp(-mu) * (-1): every exponential has a non-positive real part
    e2 = np.exp(-2.0 * mu)
    D = (mu + Q1) * (mu - QD) - (mu - Q1) * (mu + QD) * e2
    if np.any(D == 0):
        raise PoleError("coupling determinant vanished", partial=None)
    return D


def u_profile(z, mu, Q1, QD, C0, C1):
    """``rho1 exp(mu z) + rho2 exp(-mu z)`` in overflow-free form."""
    D = _normalised_det(mu, Q1, QD)
    a = np.exp(mu * (z - 1.0))
    t1 = ((mu + Q1) * QD * C1 - Q1 * C0 * (mu + QD) * np.exp(-mu)) * a
    t2 = (mu - Q1) * QD * C1 * np.exp(-mu * (1.0 + z)) - (mu - QD) * Q1 * C0 * np.exp(-mu * z)
    return (t1 + t2) / D


def u_profile_no_leak(z, mu, QD, C1):
    """Impermeable-base closed form ``-C1 cosh(mu z) / (cosh mu - (mu/q_D) sinh mu)``."""
    e2 = np.exp(-2.0 * mu)
    return -QD * C1 * (np.exp(mu * (z - 1.0)) + np.exp(-mu * (z + 1.0))) / ((QD - mu) + (QD + mu) * e2)


def coupling_rho(groups, r_D, p, y, ctl=SeriesControls(), series=None):
    """``(rho1, rho2, Delta)`` in un-normalised form (diagnostics only).

    ``Delta = (mu - q1)(mu + q) e^-mu - (mu - q)(mu + q1) e^mu`` with
    ``q = q_Db`` and ``q1 = q1b``.  Overflows for ``Re mu`` beyond ~700;
    the solver itself uses :func:`u_profile`.
    """
    y = np.asarray(y, dtype=float)
    series = series or confined_series(groups, r_D, p, ctl)
    G = series.hankel(y, np.array([0.0, 1.0]))
    C0, C1 = G[:, 0], G[:, 1]
    mu = mu_of(groups, r_D, p, y)
    QD = vadose_qD(groups, r_D, p, y)
    Q1 = aquitard_q1b(groups, r_D, p, y)
    em, ep = np.exp(-mu), np.exp(mu)
    Delta = (mu - Q1) * (mu + QD) * em - (mu - QD) * (mu + Q1) * ep
    rho1 = (Q1 * (mu + QD) * em * C0 - QD * (mu + Q1) * C1) / Delta
    rho2 = (Q1 * (mu - QD) * ep * C0 - QD * (mu - Q1) * C1) / Delta
    return rho1, rho2, Delta


def transform_point(groups, r_D, p, y, ctl=SeriesControls()):
    y = np.asarray(y, dtype=float)
    rho1, rho2, Delta = coupling_rho(groups, r_D, p, y, ctl)
    mu1 = _aquitard_mu1(groups, r_D, p, y)
    return TransformPoint(
        p=complex(p), y=y, mu=mu_of(groups, r_D, p, y),
        mu1=mu1 if mu1 is not None else np.full(y.shape, np.inf + 0j),
        q_Db=vadose_qD(groups, r_D, p, y), q1b=aquitard_q1b(groups, r_D, p, y),
        rho1=rho1, rho2=rho2, Delta=Delta)


# --------------------------------------------------------------------------
# Hankel integrals
# --------------------------------------------------------------------------

class _Integrands:
    """Shared per-``(r_D, p)`` state for the y-integrands of every field."""

    def __init__(self, groups, r_D, p, ctl, coupling):
        if coupling not in ("general", "no_leak"):
            raise DomainError(f"unknown coupling branch {coupling!r}")
        self.groups = groups
        self.r_D = r_D
        self.p = complex(p)
        self.coupling = coupling
        self.subtract = ctl.interface_subtraction
        self.series = confined_series(groups, r_D, p, ctl)

    def boundary(self, y):
        """Confined transforms at the base/top, water-table coefficient, aquitard coefficient."""
        g, r_D, p = self.groups, self.r_D, self.p
        G = self.series.hankel(y, np.array([0.0, 1.0]))
        mu = mu_of(g, r_D, p, y)
        QD = vadose_qD(g, r_D, p, y)
        if self.coupling == "no_leak" or g.R_Kz == 0:
            Q1 = np.zeros_like(mu)
        else:
            Q1 = aquitard_q1b(g, r_D, p, y)
        return G[:, 0], G[:, 1], mu, QD, Q1

    def U(self, y, z):
        C0, C1, mu, QD, Q1 = self.boundary(y)
        if self.coupling == "no_leak":
            return u_profile_no_leak(z, mu, QD, C1)
        return u_profile(z, mu, Q1, QD, C0, C1)

    def saturated_U(self, z):
        return lambda y: self.U(y, z) * y

    def aquitard(self, z):
        def g(y):
            C0 = self.series.hankel(y, 0.0)
            return (C0 + self.U(y, 0.0)) * aquitard_profile(self.groups, self.r_D, self.p, y, z) * y
        return g

    def vadose(self, zeta):
        def g(y):
            C1 = self.series.hankel(y, 1.0)
            prof = _vadose_state(self.groups, self.r_D, self.p, y).profile(zeta)
            return (C1 + self.U(y, 1.0)) * prof * y
        return g

    def interface_limit(self, z):
        """Large-``y`` limit of ``U(y, z) / C(y, z)`` at an interface height.

        At ``z = 1`` the unsaturated-zone coefficient behaves like ``-y``,
        giving ``-1/2``; at ``z = 0`` the aquitard coefficient behaves like
        ``sqrt(R_Kr R_Kz) y``, giving ``-R / (1 + R)``.
        """
        g = self.groups
        if z == 1.0:
            return -0.5
        if self.coupling == "no_leak" or g.R_Kz == 0:
            return 0.0
        R = np.sqrt(g.R_Kr * g.R_Kz)
        return -R / (1.0 + R)

    def interface_remainder(self, z):
        # Without exponential decay the integrand falls off only
        # algebraically, modulated by the well-radius Bessel factors.  Its
        # leading part is a multiple of the confined transform, whose
        # integral is the cosine series itself, so only the remainder is
        # integrated numerically.
        a = self.interface_limit(z)
        return lambda y: (self.U(y, z) - a * self.series.hankel(y, z)) * y

    def breakpoints(self, decay):
        return hankel_breakpoints(self.groups, self.r_D, self.p, decay)


def hankel_breakpoints(groups, r_D, p, decay=0.0):
    """Interior split points for the ``y`` integrals at ``(r_D, p)``.

    The integrands vary on the scales of the confined and aquitard
    diffusion terms and of the unsaturated-zone coefficients, which can be
    far narrower than a ``J0`` half-period at small ``|p|``.  ``decay`` is
    the exponential decay rate in ``y`` of the integrand (0 if none).
    """
    g = groups
    scales = [np.sqrt(abs(p) / (g.K_D * r_D**2))]
    if g.R_Kz > 0 and g.R_Kr > 0:
        scales.append(np.sqrt(abs(p) * g.R_Ss / (g.K_D * r_D**2 * g.R_Kr)))
    B = abs(vadose_B(g, r_D, p))
    if B > 0:
        scales.append(np.sqrt(B))
    if g.a_kD > 0:
        scales.append(0.5 * g.a_kD)
    pts = [s * 2.0 ** k for s in scales for k in range(-4, 5)]
    top = np.inf
    if decay > 0:
        # beyond 40 decay lengths the integrand is below exp(-40)
        h = 1.0 / decay
        top = 40.0 * h
        pts.extend(np.arange(1, 41) * h)
    return np.array(sorted(set(float(v) for v in pts if np.isfinite(v) and 0 < v <= top)))


def _integrate(ig, g, decay, quad):
    c = np.sqrt(ig.groups.K_D) * ig.r_D
    value, info = integrate_oscillatory(g, c, quad, breakpoints=ig.breakpoints(decay),
                                        full_output=True)
    info["terms"] = ig.series.terms
    info["series_converged"] = ig.series.converged
    return value, info


def sbar_U(groups, r_D, z_D, p, ctl=SeriesControls(), quad=OscillatoryQuadConfig(),
           coupling="general", full_output=False, _ig=None):
    """Transformed saturated-zone correction ``s_U`` at ``(r_D, z_D)``."""
    if not 0.0 <= z_D <= 1.0:
        raise DomainError("z_D must lie in [0, 1] for the saturated zone")
    ig = _ig or _Integrands(groups, r_D, p, ctl, coupling)
    if z_D in (0.0, 1.0) and ig.subtract:
        value, info = _integrate(ig, ig.interface_remainder(z_D), 0.0, quad)
        value += ig.interface_limit(z_D) * ig.series.point(z_D)
    else:
        value, info = _integrate(ig, ig.saturated_U(z_D), min(z_D, 1.0 - z_D), quad)
    return (value, info) if full_output else value


def sbar_1(groups, r_D, z_D, p, ctl=SeriesControls(), quad=OscillatoryQuadConfig(),
           coupling="general", full_output=False, _ig=None):
    """Transformed aquitard drawdown at ``-R_b <= z_D <= 0``."""
    if z_D > 0 or z_D < -groups.R_b:
        raise DomainError("z_D outside the aquitard")
    if groups.R_Kz == 0:
        raise DomainError("aquitard drawdown undefined for zero vertical conductivity ratio")
    ig = _ig or _Integrands(groups, r_D, p, ctl, coupling)
    if z_D == 0.0 and ig.subtract:
        value, info = _integrate(ig, ig.interface_remainder(0.0), 0.0, quad)
        value += (1.0 + ig.interface_limit(0.0)) * ig.series.point(0.0)
        return (value, info) if full_output else value
    decay = -z_D * np.sqrt(groups.R_Kr / groups.R_Kz)
    value, info = _integrate(ig, ig.aquitard(z_D), decay, quad)
    return (value, info) if full_output else value


def sigma_bar(groups, r_D, z_D, p, ctl=SeriesControls(), quad=OscillatoryQuadConfig(),
              coupling="general", full_output=False, _ig=None):
    """Transformed unsaturated-zone drawdown at ``1 <= z_D <= 1 + L_D``."""
    zeta = z_D - 1.0
    if zeta < 0 or zeta > groups.L_D:
        raise DomainError("z_D outside the unsaturated zone")
    ig = _ig or _Integrands(groups, r_D, p, ctl, coupling)
    if zeta == 0.0 and ig.subtract:
        value, info = _integrate(ig, ig.interface_remainder(1.0), 0.0, quad)
        value += (1.0 + ig.interface_limit(1.0)) * ig.series.point(1.0)
        return (value, info) if full_output else value
    value, info = _integrate(ig, ig.vadose(zeta), zeta, quad)
    return (value, info) if full_output else value


def medium_of(groups, z_D, medium=None):
    """Medium holding height ``z_D``; ``medium`` selects a side at an interface."""
    spans = {"aquitard": (-groups.R_b, 0.0), "aquifer": (0.0, 1.0),
             "vadose": (1.0, 1.0 + groups.L_D)}
    if medium is not None:
        if medium not in spans:
            raise DomainError(f"unknown medium {medium!r}")
        lo, hi = spans[medium]
        if not lo <= z_D <= hi:
            raise DomainError(f"z_D = {z_D} is not in the {medium}")
        return medium
    if 0.0 <= z_D <= 1.0:
        return "aquifer"
    if -groups.R_b <= z_D < 0.0:
        return "aquitard"
    if 1.0 < z_D <= 1.0 + groups.L_D:
        return "vadose"
    raise DomainError(f"z_D = {z_D} lies outside the modelled column")


def field_bar(groups, r_D, z_D, p, ctl=SeriesControls(), quad=OscillatoryQuadConfig(),
              coupling="general", medium=None):
    """Transformed drawdown at ``(r_D, z_D)`` in whichever medium holds ``z_D``.

    ``medium`` picks the side of an interface (``z_D`` = 0 or 1).  Returns
    ``(value, info)`` with quadrature/series diagnostics.
    """
    return fields_bar(groups, r_D, [z_D], p, ctl, quad, coupling, medium)[0]


def fields_bar(groups, r_D, z_list, p, ctl=SeriesControls(), quad=OscillatoryQuadConfig(),
               coupling="general", medium=None):
    """:func:`field_bar` at several heights sharing one cosine series."""
    media = [medium_of(groups, z, medium) for z in z_list]
    ig = _Integrands(groups, r_D, p, ctl, coupling)
    out = []
    for z, m in zip(z_list, media):
        if m == "aquifer":
            u, info = sbar_U(groups, r_D, z, p, ctl, quad, coupling, True, _ig=ig)
            out.append((ig.series.point(z) + u, info))
        elif m == "aquitard":
            out.append(sbar_1(groups, r_D, z, p, ctl, quad, coupling, True, _ig=ig))
        else:
            out.append(sigma_bar(groups, r_D, z, p, ctl, quad, coupling, True, _ig=ig))
    return out
