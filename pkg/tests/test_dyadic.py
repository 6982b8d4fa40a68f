"""Dyadic cutoffs, band projections, fractional derivatives, band
kernels, and the shell-mass decay checker.

Oracles: telescoping partial sums for the partition of unity, explicit
multiplier sums for the low-pass identity, mpmath quadrature for the
fractional derivative of a gaussian, and hand-integrable power-law
kernels for the decay checker.
"""

import math

import mpmath
import numpy as np
import pytest

from conftest import random_field
from lplab.cutoff import DEFAULT_CUTOFF, CutoffProfile, build_cutoff
from lplab.dyadic import (
    annulus_masses,
    apply_radial_multiplier,
    band_range,
    fractional_derivative,
    lp_kernel,
    project_band,
    project_below,
    project_range,
    project_tilde,
    verify_kernel_hypothesis,
)
from lplab.errors import BandRangeError, GeometryError, ValidationError
from lplab.grid import (
    GridSpec,
    SampledField,
    convolve,
    forward_transform,
    l2_norm,
    quadrature_integral,
)


def rel_err(a, b):
    return l2_norm(SampledField(a.spec, a.values - b.values)) / max(l2_norm(b), 1e-300)


# --------------------------------------------------------------------------
# cutoff profile

def test_psi_plateau_and_support():
    psi = DEFAULT_CUTOFF.psi
    assert psi(0.0) == 1.0
    assert psi(0.5) == 1.0
    assert psi(1.0) == 1.0
    assert psi(2.0) == 0.0
    assert psi(3.7) == 0.0


def test_psi_decreasing_on_transition():
    # strict in the resolvable interior; the exact-plateau construction
    # underflows to constant within ~1e-6 of the endpoints
    t = np.linspace(1.1, 1.9, 200)
    vals = DEFAULT_CUTOFF.psi(t)
    assert np.all(np.diff(vals) < 0)
    t_all = np.linspace(0.0, 2.5, 400)
    assert np.all(np.diff(DEFAULT_CUTOFF.psi(t_all)) <= 0)


def test_phi_support_and_peak():
    phi = DEFAULT_CUTOFF.phi
    assert phi(1.0) == 1.0
    assert phi(0.49) == 0.0
    assert phi(2.01) == 0.0
    t = np.linspace(0.51, 1.99, 100)
    assert np.all(phi(t) >= 0)


def test_phi_telescoping_partition():
    total = sum(DEFAULT_CUTOFF.phi(1.3 * 2.0**-k) for k in range(-20, 21))
    assert abs(total - 1.0) < 1e-12


def test_sharpness_parameter():
    sharp = build_cutoff(4.0)
    assert sharp.psi(1.0) == 1.0
    assert sharp.psi(2.0) == 0.0
    # steeper mid-transition than the default
    assert sharp.psi(1.5) == pytest.approx(0.5, abs=1e-12)
    assert abs(sharp.psi(1.4) - 0.5) > abs(DEFAULT_CUTOFF.psi(1.4) - 0.5)
    with pytest.raises(ValidationError):
        build_cutoff(0.0)


def test_frequency_partition_of_unity(line512):
    spec = line512
    rho = spec.freq_radial()
    total = np.zeros(spec.shape)
    for k in range(-30, 31):
        total += DEFAULT_CUTOFF.phi(rho * 2.0**-k)
    inside = rho > 0
    assert np.max(np.abs(total[inside] - 1.0)) < 1e-10


# --------------------------------------------------------------------------
# band projections

def test_project_band_kills_constants(line512):
    f = SampledField(line512, np.ones(512))
    assert project_band(f, 0).max_abs() < 1e-13


def test_project_band_fixes_band_center(line512):
    spec = line512
    k = 1
    x = spec.axis_coords()
    f = SampledField(spec, np.exp(2j * np.pi * (2.0**k) * x))
    assert rel_err(project_band(f, k), f) < 1e-12


def test_band_sum_reconstructs(line512):
    spec = line512
    k_min, k_max = band_range(spec)
    # random field windowed into the resolvable bands
    base = random_field(spec, 12)
    windowed = apply_radial_multiplier(
        base,
        lambda r: DEFAULT_CUTOFF.psi(r * 2.0**-k_max)
        - DEFAULT_CUTOFF.psi(r * 2.0 ** -(k_min - 1)),
    )
    total = np.zeros(spec.shape, dtype=complex)
    for k in range(k_min, k_max + 1):
        total += project_band(windowed, k).values
    assert rel_err(SampledField(spec, total), windowed) < 1e-10


def test_band_range_rejection(line512):
    f = random_field(line512, 0)
    k_min, k_max = band_range(line512)
    with pytest.raises(BandRangeError) as err:
        project_band(f, k_max + 1)
    assert str(k_max) in str(err.value)
    with pytest.raises(BandRangeError):
        project_below(f, k_min - 1)


def test_idempotent_adjacency(line512):
    f = random_field(line512, 13)
    p0 = project_band(f, 0)
    assert l2_norm(project_band(p0, 2)) <= 1e-12 * l2_norm(f)


def test_multipliers_commute(line512):
    f = random_field(line512, 14)
    a = fractional_derivative(project_band(f, 1), 0.5)
    b = project_band(fractional_derivative(f, 0.5), 1)
    assert rel_err(a, b) < 1e-12


# --------------------------------------------------------------------------
# low-pass and windowed projections

def test_project_below_keeps_constants(line512):
    f = SampledField(line512, np.full(512, 2.5))
    assert rel_err(project_below(f, 0), f) < 1e-13


def test_project_below_plateau(line512):
    spec = line512
    x = spec.axis_coords()
    f = SampledField(spec, np.cos(2 * np.pi * 1.5 * x))
    assert rel_err(project_below(f, 1), f) < 1e-12


def test_project_below_equals_band_sum_oracle(line512):
    # P_{<=k} = (zero mode) + sum_{l<=k} P_l, as multipliers
    spec = line512
    f = random_field(spec, 15)
    k = 1
    k_min, _ = band_range(spec)
    total = apply_radial_multiplier(
        f, lambda r: DEFAULT_CUTOFF.psi(r * 2.0 ** -(k_min - 6))
    ).values
    for l in range(k_min - 6 + 1, k + 1):
        total = total + apply_radial_multiplier(
            f, lambda r, l=l: DEFAULT_CUTOFF.phi(r * 2.0**-l)
        ).values
    assert rel_err(SampledField(spec, total), project_below(f, k)) < 1e-10


def test_project_range_plateau_and_support(line512):
    spec = line512
    x = spec.axis_coords()
    inside = SampledField(spec, np.cos(2 * np.pi * 2.0 * x))
    assert rel_err(project_range(inside, 1, 3), inside) < 1e-10
    far = SampledField(spec, np.cos(2 * np.pi * (2.0**(-3)) * x))
    assert l2_norm(project_range(far, 2, 1)) <= 1e-12 * l2_norm(far)


def test_project_range_full_window_is_mean_removal(line512):
    spec = line512
    f = random_field(spec, 16)
    out = project_range(f, 0, 12)
    mean = quadrature_integral(f) / spec.box_volume
    expected = SampledField(spec, f.values - mean)
    assert rel_err(out, expected) < 1e-10
    with pytest.raises(BandRangeError):
        project_range(f, 0, 0)


# --------------------------------------------------------------------------
# fractional derivative

def test_fractional_derivative_single_mode(line512):
    spec = line512
    x = spec.axis_coords()
    xi0 = 2.0
    f = SampledField(spec, np.exp(2j * np.pi * xi0 * x))
    for s in (0.5, -0.5, 1.0):
        g = fractional_derivative(f, s)
        assert rel_err(g, SampledField(spec, xi0**s * f.values)) < 1e-12


def test_tilde_identity(line512):
    # |D|^s P_k f = 2^(ks) Ptilde_k f
    f = random_field(line512, 17)
    for s in (0.25, 0.5, 0.75, 1.0):
        for k in range(*band_range(line512)):
            a = fractional_derivative(project_band(f, k), s)
            b = project_tilde(f, k, s)
            assert rel_err(a, SampledField(f.spec, 2.0 ** (k * s) * b.values)) < 1e-12


def test_project_tilde_reduces_to_band(line512):
    f = random_field(line512, 18)
    assert rel_err(project_tilde(f, 1, 0.0), project_band(f, 1)) < 1e-14
    const = SampledField(line512, np.ones(512))
    assert project_tilde(const, 0, 0.5).max_abs() < 1e-13


def test_fractional_derivative_gaussian_at_origin_vs_quadrature(line512):
    # (|D|^s exp(-pi x^2))(0) = 2 int_0^inf xi^s exp(-pi xi^2) dxi
    s = 0.5
    with mpmath.workdps(30):
        oracle = 2 * mpmath.quad(
            lambda t: t**s * mpmath.exp(-mpmath.pi * t**2), [0, mpmath.inf]
        )
        closed = mpmath.pi ** (-(s + 1) / 2) * mpmath.gamma((s + 1) / 2)
        assert abs(oracle - closed) < mpmath.mpf("1e-25")
    spec = line512
    f = SampledField(spec, np.exp(-np.pi * spec.radial_coords() ** 2))
    g = fractional_derivative(f, s)
    center = g.values[spec.N // 2]
    assert abs(center - float(oracle)) < 1e-10


def test_negative_order_requires_mean_free(line512):
    f = SampledField(line512, np.ones(512))
    with pytest.raises(ValidationError):
        fractional_derivative(f, -0.5)
    # non-strict mode excises the mean instead
    g = fractional_derivative(f, -0.5, strict=False)
    assert g.max_abs() < 1e-12


def test_zero_order_is_identity(line512):
    f = random_field(line512, 19)
    assert fractional_derivative(f, 0.0) is f


# --------------------------------------------------------------------------
# band kernels

def test_lp_kernel_mean_and_symmetry(line1024):
    ker = lp_kernel(0, line1024, boundary_tol=1e-4)
    assert abs(quadrature_integral(ker)) < 1e-10
    assert ker.is_real()
    flipped = SampledField(line1024, np.roll(ker.values[::-1], 1))
    assert rel_err(flipped, ker) < 1e-12


def test_lp_kernel_convolution_equals_projection(line1024):
    ker = lp_kernel(0, line1024, boundary_tol=1e-4)
    g = random_field(line1024, 20)
    assert rel_err(convolve(ker, g), project_band(g, 0)) < 1e-10


def test_lp_kernel_boundary_guard():
    small = GridSpec(1, 64, 2.0)
    with pytest.raises(GeometryError):
        lp_kernel(0, small, boundary_tol=1e-12)


# --------------------------------------------------------------------------
# shell-mass decay checker

def test_hypothesis_band_kernel_passes(line1024):
    ker = lp_kernel(0, line1024, boundary_tol=1e-4)
    for s in (0.1, 0.5, 0.9):
        for eps in (0.25, 1.0):
            assert verify_kernel_hypothesis(ker, s, eps).passed


def test_hypothesis_compact_kernel_trivially_passes(line1024):
    spec = line1024
    rho = spec.radial_coords()
    vals = np.where(rho > 0, rho, 1.0) ** (-spec.n + 0.1)
    vals[spec.N // 2] = 1.0  # origin cell, finite stand-in
    P = SampledField(spec, np.where(rho <= 1.0, vals, 0.0))
    table = verify_kernel_hypothesis(P, 0.5, 0.5)
    assert table.passed
    assert all(m < 1e-15 for m in table.masses)
    assert table.unit_ball_mass > 0


def test_hypothesis_power_law_pass_fail_pair():
    # shell masses of (1+|x|)^(-n-0.3) decay like 2^(-0.3 j): the decay
    # requirement 2^(-j(eps+s)) holds for eps+s = 0.25, fails for 0.4
    spec = GridSpec(1, 1024, 256.0)
    P = SampledField(spec, (1.0 + spec.radial_coords()) ** (-spec.n - 0.3))
    assert verify_kernel_hypothesis(P, 0.2, 0.05).passed
    assert not verify_kernel_hypothesis(P, 0.2, 0.2).passed


def test_hypothesis_parameter_windows(line1024):
    ker = lp_kernel(0, line1024, boundary_tol=1e-4)
    with pytest.raises(ValidationError):
        verify_kernel_hypothesis(ker, 1.5, 0.5)
    with pytest.raises(ValidationError):
        verify_kernel_hypothesis(ker, 0.5, -1.0)


def test_annulus_masses_against_radial_oracle():
    # |x|^(-1.5) in 1d: shell mass 2 int_{2^(j-1)}^{2^j} x^(-1.5) dx
    spec = GridSpec(1, 4096, 16.0)
    rho = spec.radial_coords()
    vals = np.where(rho > 0, rho, 1.0) ** -1.5
    vals[spec.N // 2] = 0.0
    P = SampledField(spec, vals)
    table = annulus_masses(P, [2, 3])
    for j in (2, 3):
        lo, hi = 2.0 ** (j - 1), 2.0**j
        oracle = 2 * (lo**-0.5 - hi**-0.5) / 0.5
        assert table[j] == pytest.approx(oracle, rel=2e-3)


# --------------------------------------------------------------------------
# dyadic-sweep boundedness (module-level property)

def test_bernstein_ratio_bounded(line1024):
    spec = GridSpec(1, 1024, 4.0)
    f = random_field(spec, 21)
    ratios = []
    for k in range(0, 5):
        g = project_below(f, k)
        K = 2.0**k
        from lplab.norms import lp_norm

        ratios.append(lp_norm(g, 2) / (K**0.5 * lp_norm(g, 1)))
    ratios = np.array(ratios)
    assert ratios.max() / np.median(ratios) <= 3.0
