import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from leaky_unconfined.errors import DomainError, SingularityError
from leaky_unconfined.special import (AccuracyPolicy, bessel_i_ratio, bessel_j, bessel_k_complex,
                                      bessel_k_ratio, bessel_modified_general, j0_zeros,
                                      log_bessel_ik, stable_cosh_ratio, stable_tanh)

mp.mp.dps = 30


def rel(a, b):
    return abs(a - b) / abs(b)


# frozen values: mpmath at 30 digits


def test_bessel_j_origin_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0


def test_bessel_j_first_zero():
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-10


def test_bessel_j_general_order_matches_mpmath():
    for nu, x in [(0.5, 1.3), (2.7, 4.0), (0, 30.0)]:
        assert rel(bessel_j(nu, x), float(mp.besselj(nu, x))) < 1e-12


def test_bessel_j_rejects_non_finite():
    with pytest.raises(DomainError):
        bessel_j(0, math.inf)
    with pytest.raises(DomainError):
        bessel_j(-1, 1.0)


def test_k0_k1_at_one():
    assert rel(bessel_k_complex(0, 1 + 0j), 0.4210244382) < 1e-9
    assert rel(bessel_k_complex(1, 1 + 0j), 0.6019072302) < 1e-9


@pytest.mark.parametrize("z", [0.3 + 2j, 5 - 7j, 40 + 1j, 1e-3 + 1e-3j])
@pytest.mark.parametrize("order", [0, 1])
def test_k_complex_matches_mpmath(order, z):
    ref = complex(mp.besselk(order, mp.mpc(z.real, z.imag)))
    assert rel(bessel_k_complex(order, z), ref) < 1e-12


def test_k_complex_large_argument_decays_and_scaled_stays_finite():
    assert abs(bessel_k_complex(0, 800 + 0j)) == 0.0
    scaled = bessel_k_complex(0, 800 + 0j, scaled=True)
    assert rel(scaled, math.sqrt(math.pi / 1600)) < 1e-3


def test_k_complex_singular_at_zero():
    with pytest.raises(SingularityError):
        bessel_k_complex(0, 0j)
    with pytest.raises(DomainError):
        bessel_k_complex(2, 1 + 0j)


def test_half_order_closed_form():
    i_half, _ = bessel_modified_general(0.5, 1 + 0j)
    assert rel(i_half.real, 0.9376748882) < 1e-9
    assert rel(i_half.real, math.sqrt(2 / math.pi) * math.sinh(1.0)) < 1e-13


def test_modified_general_zero_argument():
    i_val, _ = bessel_modified_general(0.0, 0j)
    assert i_val == 1.0
    with pytest.raises(SingularityError):
        bessel_modified_general(1.5, 0j)


@pytest.mark.parametrize("nu,z", [(0.3, 2 + 1j), (3.7, 0.5 + 4j), (12.0, 30 - 2j)])
def test_modified_general_matches_mpmath(nu, z):
    zz = mp.mpc(z.real, z.imag)
    i_val, k_val = bessel_modified_general(nu, z)
    assert rel(i_val, complex(mp.besseli(nu, zz))) < 1e-11
    assert rel(k_val, complex(mp.besselk(nu, zz))) < 1e-11
    i_s, k_s = bessel_modified_general(nu, z, scaled=True)
    assert rel(i_s * np.exp(z), i_val) < 1e-11
    assert rel(k_s * np.exp(-z), k_val) < 1e-11


def test_k_ratio_tends_to_one():
    assert abs(bessel_k_ratio(2.0, 1e6 + 0j) - 1.0) < 1e-5


def test_ratios_beyond_double_range_match_mpmath():
    # large order at small argument: I underflows and K overflows
    nu, z = 600.0, 3.0 + 1j
    zz = mp.mpc(3, 1)
    ref_k = complex(mp.besselk(nu + 1, zz) / mp.besselk(nu, zz))
    ref_i = complex(mp.besseli(nu + 1, zz) / mp.besseli(nu, zz))
    assert rel(complex(bessel_k_ratio(nu, z)), ref_k) < 1e-9
    assert rel(complex(bessel_i_ratio(nu, z)), ref_i) < 1e-9
    li, lk = log_bessel_ik(nu, z)
    assert abs(complex(li).real - float(mp.re(mp.log(mp.besseli(nu, zz))))) < 1e-8
    assert abs(complex(lk).real - float(mp.re(mp.log(mp.besselk(nu, zz))))) < 1e-8


def test_small_argument_limit_of_x_k1():
    assert abs(1e-4 * bessel_k_complex(1, 1e-4 + 0j) - 1.0) < 1e-6


def test_j0_zeros():
    assert abs(j0_zeros(1) - 2.404825557695773) < 1e-12 * 2.4
    assert abs(j0_zeros(2) - 5.520078110286311) < 1e-12 * 5.5
    assert abs(j0_zeros(51) - j0_zeros(50) - math.pi) < 1e-4
    z = [j0_zeros(k) for k in range(1, 300)]
    assert np.all(np.diff(z) > 0)
    assert abs(j0_zeros(300) - float(mp.besseljzero(0, 300))) < 1e-12 * j0_zeros(300)
    with pytest.raises(DomainError):
        j0_zeros(0)


def test_stable_tanh_and_cosh_ratio():
    assert stable_tanh(700.0) == 1.0
    assert stable_tanh(math.inf) == 1.0
    assert stable_tanh(-1e4 + 3j) == -1.0
    assert abs(stable_cosh_ratio(0.0, 1.0) - 0.6480542737) < 1e-10
    assert stable_cosh_ratio(2 + 1j, 2 + 1j) == pytest.approx(1.0, abs=1e-15)
    # both cosh values overflow individually
    assert abs(stable_cosh_ratio(1000.0, 1001.0) - math.exp(-1.0)) < 1e-15


def test_accuracy_policy_invariants():
    with pytest.raises(DomainError):
        AccuracyPolicy(rel_tol=1e-2)
    with pytest.raises(DomainError):
        AccuracyPolicy(max_terms=10)


def test_pure_functions_bit_identical():
    z = np.array([0.3 + 2j, 7 - 1j])
    assert np.array_equal(bessel_k_complex(0, z), bessel_k_complex(0, z))
    a = bessel_modified_general(2.5, z)
    b = bessel_modified_general(2.5, z)
    assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


@settings(max_examples=1000, deadline=None)
@given(nu=st.floats(0.0, 5.0), x=st.floats(0.1, 30.0))
def test_wronskian_identity(nu, x):
    i0, k0 = bessel_modified_general(nu, x + 0j)
    i1, k1 = bessel_modified_general(nu + 1.0, x + 0j)
    lhs = (i0 * k1 + i1 * k0).real
    assert abs(lhs * x - 1.0) < 1e-9


@settings(max_examples=60, deadline=None)
@given(nu=st.floats(0.0, 40.0), re=st.floats(0.05, 60.0), im=st.floats(-60.0, 60.0))
def test_ratios_consistent_with_pair(nu, re, im):
    z = complex(re, im)
    i0, k0 = bessel_modified_general(nu, z, scaled=True)
    i1, k1 = bessel_modified_general(nu + 1.0, z, scaled=True)
    if abs(k0) > 0 and np.isfinite(k1 / k0):
        assert rel(complex(bessel_k_ratio(nu, z)), k1 / k0) < 1e-10
    if abs(i0) > 1e-250 and np.isfinite(i1 / i0):
        assert rel(complex(bessel_i_ratio(nu, z)), i1 / i0) < 1e-8
