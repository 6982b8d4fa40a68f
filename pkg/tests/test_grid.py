"""Transforms, quadrature, resampling, and serialization.

Oracles: closed-form gaussian transforms cross-checked by mpmath
quadrature, and a direct O(N^2) summation DFT for the convolution
theorem.
"""

import math

import mpmath
import numpy as np
import pytest

from conftest import random_field
from lplab.errors import ValidationError
from lplab.grid import (
    GridSpec,
    SampledField,
    SpectralField,
    boundary_decay_ratio,
    convolve,
    dilate_field,
    forward_transform,
    inverse_transform,
    l2_norm,
    load_field,
    pad_spectrum,
    quadrature_integral,
    refine_field,
    require_boundary_decay,
    save_field,
    spectral_l2_norm,
    truncate_spectrum,
)


def gaussian(spec, width=1.0):
    x = spec.radial_coords()
    return SampledField(spec, np.exp(-np.pi * (x / width) ** 2))


# --------------------------------------------------------------------------
# forward / inverse

def test_constant_transform(line512):
    f = SampledField(line512, np.ones(512))
    F = forward_transform(f).coefficients
    assert F[0] == pytest.approx(2 * line512.L, abs=1e-12)
    assert np.max(np.abs(F[1:])) < 1e-12


def test_lattice_exponential_transform(line512):
    spec = line512
    j0 = 37
    x = spec.axis_coords()
    f = SampledField(spec, np.exp(2j * np.pi * (j0 * spec.dxi) * x))
    F = forward_transform(f).coefficients
    assert abs(F[j0] - 2 * spec.L) < 1e-10
    rest = np.delete(F, j0)
    assert np.max(np.abs(rest)) < 1e-10


def test_gaussian_self_transform_vs_quadrature_oracle(line512):
    # oracle: high-precision quadrature of exp(-pi x^2) exp(-2 pi i x xi)
    # at a few lattice frequencies; the closed form is exp(-pi xi^2)
    spec = line512
    for xi in (0.0, 0.25, 1.0, 2.5):
        with mpmath.workdps(30):
            oracle = mpmath.quad(
                lambda t: mpmath.exp(-mpmath.pi * t**2)
                * mpmath.cos(2 * mpmath.pi * t * xi),
                [-spec.L, 0, spec.L],
            )
        assert abs(float(oracle) - math.exp(-math.pi * xi**2)) < 1e-14

    F = forward_transform(gaussian(spec)).coefficients
    xi_lattice = spec.freq_integers() * spec.dxi
    assert np.max(np.abs(F - np.exp(-np.pi * xi_lattice**2))) < 1e-10


def test_round_trip(line512):
    f = random_field(line512, seed=1)
    g = inverse_transform(forward_transform(f))
    assert l2_norm(SampledField(line512, g.values - f.values)) <= 1e-12 * l2_norm(f)


def test_inverse_examples(line512):
    spec = line512
    zero = inverse_transform(SpectralField(spec, np.zeros(512)))
    assert zero.max_abs() == 0.0
    coeff = np.zeros(512, dtype=complex)
    j0 = 21
    coeff[j0] = 2 * spec.L
    f = inverse_transform(SpectralField(spec, coeff))
    x = spec.axis_coords()
    expected = np.exp(2j * np.pi * (j0 * spec.dxi) * x)
    assert np.max(np.abs(f.values - expected)) < 1e-12


def test_linearity(line512):
    f, g = random_field(line512, 2), random_field(line512, 3)
    a, b = 1.7 - 0.3j, -2.4 + 1j
    lhs = forward_transform(
        SampledField(line512, a * f.values + b * g.values)
    ).coefficients
    rhs = (
        a * forward_transform(f).coefficients
        + b * forward_transform(g).coefficients
    )
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_translation_covariance(line512):
    # one lattice step multiplies coefficients by exp(-2 pi i xi dx)
    spec = line512
    f = random_field(spec, 4)
    shifted = SampledField(spec, np.roll(f.values, 1))
    F = forward_transform(f).coefficients
    G = forward_transform(shifted).coefficients
    xi = spec.freq_integers() * spec.dxi
    phase = np.exp(-2j * np.pi * xi * spec.dx)
    assert np.max(np.abs(G - F * phase)) <= 1e-10 * np.max(np.abs(F))


def test_parseval(line512):
    for seed in range(3):
        f = random_field(line512, seed)
        a = l2_norm(f)
        b = spectral_l2_norm(forward_transform(f))
        assert abs(a - b) <= 1e-12 * a


def test_parseval_2d(plane64):
    f = random_field(plane64, 7)
    assert abs(l2_norm(f) - spectral_l2_norm(forward_transform(f))) <= 1e-12 * l2_norm(f)


def test_nonfinite_rejected(line512):
    vals = np.ones(512)
    vals[3] = np.nan
    with pytest.raises(ValidationError):
        SampledField(line512, vals)


def test_mismatched_spec_rejected(line512, plane64):
    f = random_field(line512, 0)
    g = random_field(plane64, 0)
    with pytest.raises(ValidationError):
        convolve(f, g)


# --------------------------------------------------------------------------
# quadrature

def test_quadrature_constant(plane64):
    f = SampledField(plane64, np.ones(plane64.shape))
    assert quadrature_integral(f) == pytest.approx((2 * plane64.L) ** 2)


def test_quadrature_gaussian_unit_mass(line512):
    assert quadrature_integral(gaussian(line512)) == pytest.approx(1.0, abs=1e-10)


def test_quadrature_odd_function(line512):
    x = line512.axis_coords()
    f = SampledField(line512, x * np.exp(-np.pi * x**2))
    assert abs(quadrature_integral(f)) < 1e-12


# --------------------------------------------------------------------------
# convolution theorem vs direct summation

def test_convolve_matches_direct_sum():
    spec = GridSpec(1, 64, 4.0)
    rng = np.random.default_rng(5)
    h = SampledField(spec, rng.standard_normal(64))
    g = SampledField(spec, rng.standard_normal(64))
    x = spec.axis_coords()
    direct = np.zeros(64, dtype=complex)
    for i in range(64):
        # sum_y h(y) g(x_i - y) dx with periodic wrap of the argument
        for m in range(64):
            arg = x[i] - x[m]
            idx = int(round((arg + spec.L) / spec.dx)) % 64
            direct[i] += h.values[m] * g.values[idx] * spec.dx
    fast = convolve(h, g).values
    assert np.max(np.abs(fast - direct)) <= 1e-10 * np.max(np.abs(direct))


# --------------------------------------------------------------------------
# boundary decay validation

def test_boundary_decay(line512):
    assert boundary_decay_ratio(gaussian(line512)) < 1e-12
    require_boundary_decay(gaussian(line512))
    wide = gaussian(line512, width=12.0)
    with pytest.raises(ValidationError):
        require_boundary_decay(wide)


# --------------------------------------------------------------------------
# resampling

def test_refine_field_reproduces_samples(line512):
    f = gaussian(line512)
    fine = refine_field(f)
    assert fine.spec.N == 1024
    # every other fine sample sits on the coarse lattice
    assert np.max(np.abs(fine.values[::2] - f.values)) < 1e-12


def test_pad_truncate_round_trip(line512):
    f = random_field(line512, 9)
    F = forward_transform(f)
    back, loss = truncate_spectrum(pad_spectrum(F), line512)
    assert loss < 1e-13
    # everything except the (zeroed) Nyquist bin survives
    keep = ~line512.nyquist_mask()
    assert np.max(np.abs(back.coefficients[keep] - F.coefficients[keep])) < 1e-12


def test_dilate_field_exact():
    spec = GridSpec(1, 256, 4.0)
    x = spec.axis_coords()
    f = SampledField(spec, np.cos(2 * np.pi * 2.0 * x))
    g = dilate_field(f, 2)  # cos(2 pi 8 x)
    assert np.max(np.abs(g.values - np.cos(2 * np.pi * 8.0 * x))) < 1e-12


# --------------------------------------------------------------------------
# serialization

@pytest.mark.parametrize("fmt", ["csv", "bin"])
def test_field_round_trip(tmp_path, fmt, line512):
    f = random_field(line512, 11)
    path = tmp_path / f"field.{fmt}"
    save_field(f, path, fmt=fmt)
    g = load_field(path)
    assert g.spec == line512
    err = np.max(np.abs(g.values - f.values))
    assert err <= 1e-15 * np.max(np.abs(f.values))
