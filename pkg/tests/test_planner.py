import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import icosphere
from spectral_dumbbell.closed_forms import (segment_dirichlet_spectrum, sphere_spectrum,
                                            sphere_volume, weyl_constant, weyl_ratio)
from spectral_dumbbell.errors import DomainError
from spectral_dumbbell.fem import mesh_spectrum
from spectral_dumbbell.mesh import isoperimetric_ratio
from spectral_dumbbell.planner import (GlueParams, PiecewiseLinear, check_isoperimetric_bound, iso_high_alt,
                                       iso_interval, neck_segment_gap, plan_counterexample,
                                       plan_glue, select_h, sphere_dip, verify_certificate,
                                       weyl_threshold)
from spectral_dumbbell.spectra import merge_spectra

ISO_SPHERE = 4.83597586204940892


def zero_f(lo=0.0, hi=1e4):
    return PiecewiseLinear.constant(0.0, lo, hi)


def test_piecewise_linear():
    f = PiecewiseLinear((0, 1, 3), (0, 2, -2))
    assert f(0.5) == 1.0 and f(2.0) == 0.0
    assert f.max_on(0.2, 2.5) == 2.0
    assert f.max_on(2.0, 3.0) == 0.0
    with pytest.raises(DomainError):
        f(4.0)
    with pytest.raises(DomainError, match=r"\[0.0, 3.0\]"):
        f.max_on(-1.0, 2.0)
    with pytest.raises(DomainError):
        PiecewiseLinear((0, 0), (1, 1))
    with pytest.raises(DomainError):
        PiecewiseLinear((0,), (1,))


def test_iso_interval_examples():
    low, high = iso_interval(2, math.pi)
    assert low == pytest.approx(ISO_SPHERE, rel=1e-14)
    # A = pi gives (4A/W)^(n/2) = 1, so the upper bound is 2 * 3^(2/3) * (4 pi)^(1/3)
    assert high == pytest.approx(2 * 3 ** (2 / 3) * (4 * math.pi) ** (1 / 3), rel=1e-14)
    assert high == pytest.approx(2 * low, rel=1e-14)
    assert high == pytest.approx(9.671951724098818, rel=1e-12)
    with pytest.raises(DomainError):
        iso_interval(1, 1.0)
    with pytest.raises(DomainError):
        iso_interval(3, 0.0)


@given(n=st.integers(2, 8), A=st.floats(1e-3, 1e3))
def test_iso_interval_ordered_and_alt_form(n, A):
    low, high = iso_interval(n, A)
    assert 0 < low < high
    assert iso_high_alt(n, A) > 0


def test_weyl_threshold_small_dimensions():
    assert weyl_threshold(2, 10**4)[0] == 5
    assert [weyl_threshold(n, 10**4)[0] for n in (3, 4, 5)] == [6, 7, 8]


def test_sphere_dips():
    for l in range(1, 60):
        assert sphere_dip(2, l) == pytest.approx(l / (l + 1), rel=1e-14)
    assert sphere_dip(2, 1) == 0.5


def test_certificate_n2_zero_f():
    cert = plan_counterexample(2, 1.0, zero_f(), horizon=10**6)
    assert (cert.k1, cert.k2, cert.k0) == (5, 1, 5)
    assert cert.vol_target == pytest.approx(4.0, rel=1e-15)
    assert cert.sigma_volume == pytest.approx(4.0 * 1.0 / weyl_constant(2) * sphere_volume(2))
    assert cert.chain_holds and cert.k1_certified and cert.tail_certified
    assert cert.lambda1_threshold(5) == 7.0
    assert cert.lambda1_threshold_k0 == 7.0
    assert cert.iso_low <= cert.iso_high
    check = verify_certificate(cert)
    assert check.matches and check.chain_holds


def test_certificate_n4_uses_s4_spectrum():
    cert = plan_counterexample(4, 1.0, zero_f(), horizon=10**4)
    assert cert.k1 == 7
    assert cert.lambda1_threshold(1) == 5.0
    assert verify_certificate(cert).matches


def test_certificate_exact_tie_in_k2():
    # 100^(5/2) = 10^5 exactly: k = 10^5 ties, so k2 is the next integer
    f = PiecewiseLinear.constant(100.0, 0.0, 1e4)
    cert = plan_counterexample(5, 1.0, f, horizon=10**4)
    assert cert.k2 == 100001
    assert cert.scan_limit == cert.k0
    assert verify_certificate(cert).matches


def test_certificate_tampering_detected():
    cert = plan_counterexample(3, 1.0, zero_f(), horizon=10**4)
    cert.k1 += 1
    cert.k0 = max(cert.k1, cert.k2)
    assert not verify_certificate(cert).matches


def test_certificate_coverage_error():
    f = PiecewiseLinear((5.0, 6.0), (0.0, 0.0))
    with pytest.raises(DomainError, match="9.67"):
        plan_counterexample(2, math.pi, f)


@settings(max_examples=25, deadline=None)
@given(n=st.integers(2, 5), A=st.floats(0.1, 20.0),
       ys=st.lists(st.floats(-50, 300), min_size=3, max_size=10))
def test_certificate_reverifies(n, A, ys):
    low, high = iso_interval(n, A)
    x = np.linspace(low * 0.9, high * 1.1, len(ys))
    cert = plan_counterexample(n, A, PiecewiseLinear(tuple(x), tuple(ys)), horizon=2000)
    check = verify_certificate(cert)
    assert check.matches, check.messages
    assert check.chain_holds and cert.chain_holds
    assert cert.k0 == max(cert.k1, cert.k2)
    ks = np.arange(cert.k1, 2001)
    s = sphere_spectrum(n, 2001)
    assert all(weyl_ratio(s, int(k)) > 0.5 for k in ks[:50])
    assert A * cert.k2 ** (2 / n) > cert.f_max


def test_check_isoperimetric_bound_on_sphere_and_union():
    s = sphere_spectrum(2, 101)
    iso = isoperimetric_ratio(icosphere(3))
    rep = check_isoperimetric_bound(s, iso, 100)
    assert rep.passes and rep.max_ratio < 1e-9
    assert rep.ratios[0] == 0.0
    fem = mesh_spectrum(icosphere(3), 101)
    assert check_isoperimetric_bound(fem, iso, 100).passes


def test_check_isoperimetric_bound_flags_absurd_spectrum():
    from spectral_dumbbell.mesh import IsoReport
    from spectral_dumbbell.spectra import Spectrum
    s = Spectrum(2, [0.0, 1e30], 1.0)
    assert not check_isoperimetric_bound(s, IsoReport(1.0, 1.0, 5.0), 5).passes


def test_select_h_is_largest_double():
    union = merge_spectra(sphere_spectrum(2, 20), sphere_spectrum(2, 20))
    for N in (1, 5, 19):
        h = select_h(union, N)
        target = union.merged[N] + 1.0
        assert segment_dirichlet_spectrum(h, 1).values[0] > target
        up = math.nextafter(h, math.inf)
        assert not segment_dirichlet_spectrum(up, 1).values[0] > target
        gap = segment_dirichlet_spectrum(h, 1).values[0]
        assert gap == pytest.approx(math.pi**2 / (4 * h * h), rel=1e-12)
    with pytest.raises(DomainError):
        select_h(union, 40)


def test_glue_params():
    union = merge_spectra(sphere_spectrum(2, 20), sphere_spectrum(2, 20))
    p = plan_glue(union, 7, 1e-2, 0.05)
    assert neck_segment_gap(p) > union.merged[7] + 1
    assert plan_glue(union, 7, 1e-2, 0.05, h=0.3).h == 0.3
    with pytest.raises(DomainError):
        GlueParams(0.0, 1, 0.1, 0.1)
    with pytest.raises(DomainError):
        GlueParams(0.1, 0, 0.1, 0.1)


@given(c=st.floats(-1e6, 1e6), t=st.floats(0, 1))
def test_constant_table_interpolates_exactly(c, t):
    f = PiecewiseLinear((0.0, 0.37, 1.0), (c, c, c))
    assert f(t) == c
    assert f(t) == float(np.interp(t, f.x, f.y))


def test_tie_with_constant_table_n3():
    # 100^(3/2) = 1000 exactly, so k = 1000 only ties
    cert = plan_counterexample(3, 1.0, PiecewiseLinear.constant(100.0, 0.0, 1e4), horizon=10**4)
    assert cert.k2 == 1001
    assert verify_certificate(cert).matches
