"""Physical description of the pumped system and its dimensionless groups.

Coordinates follow the usual convention for this problem: ``z`` is measured
upward from the aquifer base, the aquifer occupies ``0 <= z <= b``, the
aquitard ``-b1 <= z < 0`` and the unsaturated zone ``b < z <= b + L``.
Screen depths ``d < l`` are measured downward from the aquifer top.
"""

import math
from dataclasses import dataclass, field, fields, replace

from .errors import DomainError

INF = math.inf


def _positive(name, value, allow_inf=False):
    if value is None or math.isnan(value) or value <= 0 or (math.isinf(value) and not allow_inf):
        raise DomainError(f"{name} must be positive{' (or inf)' if allow_inf else ''}, got {value}")


def _non_negative(name, value):
    if value is None or math.isnan(value) or value < 0 or math.isinf(value):
        raise DomainError(f"{name} must be finite and non-negative, got {value}")


@dataclass(frozen=True)
class Aquifer:
    K_r: float
    K_z: float
    S_s: float
    S_y: float
    b: float


@dataclass(frozen=True)
class Aquitard:
    K_r1: float
    K_z1: float
    S_s1: float
    b_1: float = INF


@dataclass(frozen=True)
class Vadose:
    """Exponential retention (``a_c``) and Gardner conductivity (``a_k``) model.

    ``psi_a`` and ``psi_k`` are stored signed as supplied; only their
    difference enters the solution.
    """

    a_c: float
    a_k: float
    psi_a: float = 0.0
    psi_k: float = 0.0
    L: float = INF
    theta_r: float = 0.0
    theta_s: float = None


@dataclass(frozen=True)
class Well:
    Q: float
    r_w: float
    C_w: float
    d: float
    l: float


@dataclass(frozen=True)
class PhysicalSystem:
    aquifer: Aquifer
    aquitard: Aquitard
    vadose: Vadose
    well: Well

    def __post_init__(self):
        aq, at, vz, w = self.aquifer, self.aquitard, self.vadose, self.well
        for name in ("K_r", "K_z", "S_s", "b"):
            _positive(name, getattr(aq, name))
        if not 0 < aq.S_y < 1:
            raise DomainError(f"S_y must lie in (0, 1), got {aq.S_y}")
        if vz.theta_s is not None and not math.isclose(vz.theta_s - vz.theta_r, aq.S_y,
                                                       rel_tol=1e-9, abs_tol=1e-12):
            raise DomainError("S_y must equal theta_s - theta_r")
        for name in ("K_r1", "K_z1"):
            _non_negative(name, getattr(at, name))
        _positive("S_s1", at.S_s1)
        _positive("b_1", at.b_1, allow_inf=True)
        _non_negative("a_c", vz.a_c)
        _non_negative("a_k", vz.a_k)
        _positive("L", vz.L, allow_inf=True)
        _positive("Q", w.Q)
        _positive("r_w", w.r_w)
        _non_negative("C_w", w.C_w)
        if not 0 <= w.d < w.l <= aq.b:
            raise DomainError(f"screen must satisfy 0 <= d < l <= b, got d={w.d}, l={w.l}")

    @property
    def s_ref(self):
        """Drawdown scale ``Q / (4 pi K_r b)``; ``s = s_ref * s_D``."""
        return self.well.Q / (4.0 * math.pi * self.aquifer.K_r * self.aquifer.b)

    @property
    def alpha_s(self):
        return self.aquifer.K_r / self.aquifer.S_s


@dataclass(frozen=True)
class DimensionlessGroups:
    """Dimensionless parameters of the problem (lengths scaled by ``b``).

    ``r_w_over_b`` is stored instead of ``r_wD = r_w / r`` because the latter
    depends on the observation radius; see :meth:`r_wD`.  ``R_Ss`` is the
    aquitard/aquifer specific-storage ratio used in figure captions.
    """

    K_D: float = 1.0
    R_Kr: float = 0.0
    R_Kz: float = 0.0
    R_Ss: float = 1.0
    R_b: float = INF
    r_w_over_b: float = 0.02
    C_wD: float = 0.0
    d_D: float = 0.0
    l_D: float = 1.0
    a_kD: float = 10.0
    a_cD: float = 10.0
    psi_aD: float = 0.0
    psi_kD: float = 0.0
    S_D: float = 1e3
    L_D: float = INF

    def __post_init__(self):
        _positive("K_D", self.K_D)
        _non_negative("R_Kr", self.R_Kr)
        _non_negative("R_Kz", self.R_Kz)
        _positive("R_Ss", self.R_Ss)
        _positive("R_b", self.R_b, allow_inf=True)
        _positive("r_w_over_b", self.r_w_over_b)
        _non_negative("C_wD", self.C_wD)
        if not 0 <= self.d_D < self.l_D <= 1:
            raise DomainError(f"need 0 <= d_D < l_D <= 1, got d_D={self.d_D}, l_D={self.l_D}")
        _non_negative("a_kD", self.a_kD)
        _non_negative("a_cD", self.a_cD)
        _non_negative("S_D", self.S_D)
        _positive("L_D", self.L_D, allow_inf=True)
        for name in ("psi_aD", "psi_kD"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")

    def r_wD(self, r_D):
        return self.r_w_over_b / r_D

    @property
    def R_KD(self):
        """Aquitard/aquifer anisotropy ratio ``K_D1 / K_D``."""
        return self.R_Kz / self.R_Kr if self.R_Kr > 0 else INF

    @property
    def R_alpha_s(self):
        """Aquitard/aquifer diffusivity ratio ``alpha_s1 / alpha_s = R_Kr / R_Ss``."""
        return self.R_Kr / self.R_Ss

    @property
    def lambda_D(self):
        return self.a_kD - self.a_cD

    @property
    def kappa_D(self):
        """Common exponent; only meaningful when ``a_kD == a_cD``."""
        return self.a_kD

    @property
    def leaky(self):
        return self.R_Kz > 0

    def with_(self, **changes):
        return replace(self, **changes)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


GROUP_NAMES = tuple(f.name for f in fields(DimensionlessGroups))


def to_dimensionless(sys, r, t=0.0):
    """Dimensionless groups plus ``(r_D, t_s)`` for observation radius ``r``, time ``t``."""
    if not (r > 0 and math.isfinite(r)):
        raise DomainError(f"radial distance must be positive, got {r}")
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    aq, at, vz, w = sys.aquifer, sys.aquitard, sys.vadose, sys.well
    b = aq.b
    groups = DimensionlessGroups(
        K_D=aq.K_z / aq.K_r,
        R_Kr=at.K_r1 / aq.K_r,
        R_Kz=at.K_z1 / aq.K_z,
        R_Ss=at.S_s1 / aq.S_s,
        R_b=at.b_1 / b,
        r_w_over_b=w.r_w / b,
        C_wD=w.C_w / (math.pi * aq.S_s * b * w.r_w**2),
        d_D=w.d / b,
        l_D=w.l / b,
        a_kD=vz.a_k * b,
        a_cD=vz.a_c * b,
        psi_aD=vz.psi_a / b,
        psi_kD=vz.psi_k / b,
        S_D=aq.S_y / (aq.S_s * b),
        L_D=vz.L / b,
    )
    r_D = r / b
    t_s = sys.alpha_s * t / r**2
    return groups, r_D, t_s


@dataclass(frozen=True)
class SeriesControls:
    """Truncation of the finite-cosine (partial penetration) series.

    ``interface_subtraction`` integrates only the remainder after removing
    the confined-series multiple at the interfaces; switching it off gives
    the direct integral, used as an independent continuity check.
    """

    max_cosine_terms: int = 200
    series_rel_tol: float = 1e-8
    consecutive: int = field(default=3, repr=False)
    interface_subtraction: bool = True

    def __post_init__(self):
        if self.max_cosine_terms < 10:
            raise DomainError("max_cosine_terms must be >= 10")
        if not self.series_rel_tol > 0:
            raise DomainError("series_rel_tol must be positive")
