import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spectral_dumbbell.closed_forms import sphere_spectrum
from spectral_dumbbell.errors import DomainError
from spectral_dumbbell.spectra import (Spectrum, counting_function, merge_spectra,
                                       spectral_functional, verify_shift_lemma)

values = st.lists(st.floats(0, 1e6, allow_nan=False), min_size=1, max_size=40).map(sorted)


def spec(vals, vol=1.0, dim=2):
    return Spectrum(dim, vals, vol)


def test_spectrum_validation():
    with pytest.raises(DomainError):
        spec([1.0, 0.5])
    with pytest.raises(DomainError):
        spec([-1.0, 0.5])
    with pytest.raises(DomainError):
        spec([0.0], vol=0.0)
    with pytest.raises(DomainError):
        spec([])
    with pytest.raises(DomainError):
        Spectrum(0, [0.0], 1.0)


def test_spectrum_is_read_only_and_indexable():
    s = spec([0.0, 1.0, 2.0])
    with pytest.raises(ValueError):
        s.values[0] = 5.0
    assert len(s) == 3 and s[2] == 2.0
    assert s.looks_connected and s.zero_count == 1
    assert s.head(2).values.tolist() == [0.0, 1.0]


@given(a=values, b=values)
def test_merge_commutative(a, b):
    ab = merge_spectra(spec(a), spec(b)).merged
    ba = merge_spectra(spec(b), spec(a)).merged
    assert ab.values.tolist() == ba.values.tolist()
    assert len(ab) == len(a) + len(b)
    assert ab.values[0] == min(a[0], b[0])


@given(a=values, b=values, c=values)
def test_merge_associative(a, b, c):
    left = merge_spectra(merge_spectra(spec(a), spec(b)).merged, spec(c)).merged
    right = merge_spectra(spec(a), merge_spectra(spec(b), spec(c)).merged).merged
    flat = merge_spectra(spec(a), spec(b), spec(c)).merged
    assert left.values.tolist() == right.values.tolist() == flat.values.tolist()


def test_merge_volumes_add_and_ties_are_stable():
    u = merge_spectra(spec([0.0, 2.0], 3.0), spec([0.0, 2.0, 5.0], 4.0))
    assert u.total_volume == 7.0
    assert u.merged.values.tolist() == [0, 0, 2, 2, 5]
    assert u.origin.tolist() == [0, 1, 0, 1, 1]
    assert u.merged.zero_count == 2 and not u.merged.looks_connected


def test_merge_dimension_mismatch():
    with pytest.raises(DomainError):
        merge_spectra(spec([0.0], dim=2), spec([0.0], dim=3))


def test_two_spheres_union():
    s = sphere_spectrum(2, 9)
    u = merge_spectra(s, s).merged
    assert u.values.tolist()[:8] == [0, 0, 2, 2, 2, 2, 2, 2]
    assert u.volume == pytest.approx(8 * np.pi)


@settings(max_examples=300)
@given(n=st.integers(2, 5), k=st.integers(1, 50),
       gap=st.floats(0, 1e4), tail=st.lists(st.floats(0, 1e4), max_size=30))
def test_shift_lemma_holds_under_hypothesis(n, k, gap, tail):
    sphere = sphere_spectrum(n, k + 1)
    first = sphere[k] + 1.0 + gap
    sigma = Spectrum(n, [0.0, first] + sorted(first + t for t in tail), 1.0)
    rep = verify_shift_lemma(sigma, sphere, k)
    assert rep.hypothesis_ok and rep.holds and rep.status == "pass" and bool(rep)
    assert [j for j, *_ in rep.checked] == list(range(2, k + 2))


@settings(max_examples=300)
@given(n=st.integers(2, 5), k=st.integers(1, 50), frac=st.floats(0, 1, exclude_max=True))
def test_shift_lemma_detects_hypothesis_failure(n, k, frac):
    sphere = sphere_spectrum(n, k + 1)
    first = frac * (sphere[k] + 1.0)
    sigma = Spectrum(n, [0.0, first, first + 50.0], 1.0)
    rep = verify_shift_lemma(sigma, sphere, k)
    assert not rep.hypothesis_ok
    assert rep.status == "hypothesis-failure"
    assert not rep


def test_shift_lemma_extra_zero_reported():
    sphere = sphere_spectrum(2, 10)
    sigma = Spectrum(2, [0.0, 0.0, 100.0], 1.0)
    rep = verify_shift_lemma(sigma, sphere, 3)
    assert rep.status == "hypothesis-failure"
    assert not rep.holds
    assert "extra zero at index 2" in rep.messages


def test_shift_lemma_fails_when_sigma_interleaves():
    sphere = sphere_spectrum(2, 10)
    sigma = Spectrum(2, [0.0, 1.0, 1.5], 1.0)
    rep = verify_shift_lemma(sigma, sphere, 4)
    assert rep.status == "hypothesis-failure"
    assert not rep.holds_through(2)


def test_shift_lemma_argument_errors():
    sphere = sphere_spectrum(2, 5)
    sigma = Spectrum(2, [0.0, 100.0], 1.0)
    with pytest.raises(DomainError):
        verify_shift_lemma(sigma, sphere, 0)
    with pytest.raises(DomainError):
        verify_shift_lemma(sigma, sphere, 5)


def test_counting_function():
    s = sphere_spectrum(2, 16)
    assert counting_function(s, 0.0) == 1
    assert counting_function(s, 2.0) == 4
    assert counting_function(s, 5.9) == 4
    assert counting_function(s, 6.0) == 9
    assert counting_function(s, -1.0) == 0


@given(c=st.floats(1e-3, 1e3), n=st.integers(1, 6), k=st.integers(0, 30))
def test_spectral_functional_scale_invariant(c, n, k):
    s = sphere_spectrum(n, 31)
    assert spectral_functional(s.scaled(c), k) == pytest.approx(spectral_functional(s, k),
                                                               rel=1e-12, abs=0)


def test_spectral_functional_range():
    with pytest.raises(DomainError):
        spectral_functional(sphere_spectrum(2, 3), 3)
    with pytest.raises(DomainError):
        sphere_spectrum(2, 3).scaled(0.0)
