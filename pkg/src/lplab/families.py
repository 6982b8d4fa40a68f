"""Seeded generators for the test-function families driving the sweeps.

Every generator returns a real field that passes the boundary-decay
validation; random members are additionally given exact compact support
(smooth real-space taper) and, when requested, an exactly zero mean.
Generation is deterministic: the random stream is keyed on the suite
seed and the member's own tag, never on its position in a grid, so
shrinking a sweep never changes the surviving members.
"""

from __future__ import annotations

import zlib

import numpy as np

from .cutoff import DEFAULT_CUTOFF, CutoffProfile
from .dyadic import apply_radial_multiplier, band_range
from .errors import ConfigError
from .grid import (
    GridSpec,
    SampledField,
    SpectralField,
    inverse_transform,
    l2_norm,
    quadrature_integral,
    require_boundary_decay,
)


def stable_seed(*parts) -> int:
    """Deterministic 32-bit seed from hashable parts (process-stable)."""
    return zlib.crc32(repr(parts).encode())


def _coords(spec: GridSpec):
    ax = spec.axis_coords()
    return np.meshgrid(*([ax] * spec.n), indexing="ij")


def _shifted_radius(spec: GridSpec, center) -> np.ndarray:
    grids = _coords(spec)
    if np.isscalar(center):
        center = [center] * spec.n
    return np.sqrt(sum((g - c) ** 2 for g, c in zip(grids, center)))


def taper_window(spec: GridSpec, profile: CutoffProfile = DEFAULT_CUTOFF) -> np.ndarray:
    """Radial window: 1 on |x| <= 0.45 L, smooth to 0 at 0.9 L."""
    return profile.psi(spec.radial_coords() / (0.45 * spec.L))


def gaussian_field(
    spec: GridSpec,
    width: float,
    center=0.0,
    modulation: float = 0.0,
) -> SampledField:
    """exp(-pi |x-c|^2 / w^2), optionally modulated by cos(2 pi xi0 x_1)."""
    r = _shifted_radius(spec, center)
    vals = np.exp(-np.pi * (r / width) ** 2)
    if modulation:
        x1 = _coords(spec)[0]
        vals = vals * np.cos(2.0 * np.pi * modulation * x1)
    return SampledField(spec, vals)


def bump_field(spec: GridSpec, radius: float, center=0.0) -> SampledField:
    """Compactly supported C-infinity bump, peak value 1 at the center."""
    t = _shifted_radius(spec, center) / radius
    vals = np.zeros(spec.shape)
    inside = t < 1.0
    vals[inside] = np.exp(1.0 - 1.0 / (1.0 - t[inside] ** 2))
    return SampledField(spec, vals)


def hermite_field(spec: GridSpec, degree: int, width: float) -> SampledField:
    """Hermite polynomial in x_1 times a radial gaussian envelope."""
    if not 0 <= degree <= 4:
        raise ConfigError(f"hermite degree {degree} outside 0..4")
    r = _shifted_radius(spec, 0.0)
    x1 = _coords(spec)[0]
    poly = np.polynomial.hermite.Hermite.basis(degree)(x1 / width)
    return SampledField(spec, poly * np.exp(-np.pi * (r / width) ** 2))


def _raw_band_field(
    spec: GridSpec,
    k_lo: int,
    k_hi: int,
    seed: int,
    profile_exponent: float = 0.0,
    envelope_width: float | None = None,
    profile: CutoffProfile = DEFAULT_CUTOFF,
) -> SampledField:
    """Strictly band-limited seeded noise, not yet tapered."""
    if k_lo > k_hi:
        raise ConfigError(f"empty band window [{k_lo}, {k_hi}]")
    rng = np.random.default_rng(seed)
    ew = envelope_width if envelope_width is not None else spec.L / 4.0
    base = rng.standard_normal(spec.shape) * np.exp(
        -np.pi * (spec.radial_coords() / ew) ** 2
    )

    def window(rho):
        w = np.zeros_like(rho)
        for k in range(k_lo, k_hi + 1):
            w += 2.0 ** (-profile_exponent * (k - k_hi)) * profile.phi(
                rho * 2.0**-k
            )
        return w

    return apply_radial_multiplier(SampledField(spec, base), window)


def random_band_field(
    spec: GridSpec,
    k_lo: int,
    k_hi: int,
    seed: int,
    profile_exponent: float = 0.0,
    envelope_width: float | None = None,
    profile: CutoffProfile = DEFAULT_CUTOFF,
) -> SampledField:
    """Seeded noise localized to dyadic bands k_lo..k_hi.

    Band k receives relative L2 weight 2^(-profile_exponent (k - k_hi)),
    so the band-mass profile decays dyadically with the given exponent.
    White noise is enveloped, frequency-windowed, then tapered to exact
    compact support and recentered to exact zero mean.
    """
    f = _raw_band_field(
        spec, k_lo, k_hi, seed, profile_exponent, envelope_width, profile
    )
    return _finalize(f, taper=True, mean_free=True)


def _finalize(
    f: SampledField, taper: bool = False, mean_free: bool = False
) -> SampledField:
    spec = f.spec
    vals = f.values
    win = taper_window(spec)
    if taper:
        vals = vals * win
    if mean_free:
        # subtract a window multiple: keeps compact support exactly
        total = np.sum(vals) * spec.cell_volume
        wtotal = np.sum(win) * spec.cell_volume
        vals = vals - (total / wtotal) * win
    out = SampledField(spec, vals)
    n = l2_norm(out)
    if n > 0:
        out = SampledField(spec, out.values / n)
    return out


def band_window(f: SampledField, k_lo: int, k_hi: int,
                profile: CutoffProfile = DEFAULT_CUTOFF) -> SampledField:
    """Restrict f to bands k_lo..k_hi (telescoped plateau difference)."""
    return apply_radial_multiplier(
        f,
        lambda r: profile.psi(r * 2.0**-k_hi)
        - profile.psi(r * 2.0 ** -(k_lo - 1)),
    )


def lowpass_kernel_field(
    spec: GridSpec, k: int, profile: CutoffProfile = DEFAULT_CUTOFF
) -> SampledField:
    """Concentrated kernel of the low-pass projection at scale 2^k
    (the extremal profile for band-limited norm comparisons)."""
    rho = spec.freq_radial()
    m = np.where(spec.nyquist_mask(), 0.0, profile.psi(rho * 2.0**-k))
    ker = inverse_transform(SpectralField(spec, m.astype(np.complex128)))
    return SampledField(spec, ker.values.real)


def make_member(spec: GridSpec, desc: dict, seed: int) -> SampledField:
    """Build one family member from its descriptor.

    Descriptor keys: ``kind`` (gaussian | bump | hermite | random_band),
    the kind's own parameters, plus optional post-processing flags
    ``band_passed`` (restrict to the resolvable bands, implies taper and
    zero mean) and ``mean_free``.
    """
    kind = desc.get("kind")
    if kind == "gaussian":
        f = gaussian_field(
            spec,
            width=desc["width"],
            center=desc.get("center", 0.0),
            modulation=desc.get("modulation", 0.0),
        )
    elif kind == "bump":
        f = bump_field(spec, radius=desc["radius"], center=desc.get("center", 0.0))
    elif kind == "hermite":
        f = hermite_field(spec, degree=desc["degree"], width=desc["width"])
    elif kind == "random_band":
        k_lo, k_hi = _band_window_of(spec, desc)
        return random_band_field(
            spec,
            k_lo,
            k_hi,
            seed=stable_seed(seed, desc.get("tag", "rb")),
            profile_exponent=desc.get("profile_exponent", 0.0),
        )
    else:
        raise ConfigError(f"unknown family member kind {kind!r}")
    if desc.get("band_passed"):
        k_lo, k_hi = _band_window_of(spec, desc)
        f = band_window(f, k_lo, k_hi)
        f = _finalize(f, taper=True, mean_free=True)
    elif desc.get("mean_free"):
        f = _finalize(f, mean_free=True)
    else:
        f = _finalize(f)
    return f


def _band_window_of(spec: GridSpec, desc: dict):
    k_min, k_max = band_range(spec)
    return desc.get("k_lo", k_min), desc.get("k_hi", k_max)


def default_family(spec: GridSpec, band_passed: bool = False) -> list:
    """Six standard members: two gaussians, a bump, a modulated gaussian,
    and two seeded rough fields with dyadically decaying band profiles."""
    k_min, k_max = band_range(spec)
    k_mid = (k_min + k_max) // 2
    L = spec.L
    members = [
        {"name": "gauss-wide", "kind": "gaussian", "width": L / 6.0},
        {
            "name": "gauss-offset",
            "kind": "gaussian",
            "width": L / 10.0,
            "center": L / 8.0,
        },
        {"name": "bump", "kind": "bump", "radius": L / 3.0},
        {
            "name": "gauss-modulated",
            "kind": "gaussian",
            "width": L / 6.0,
            "modulation": 2.0**k_mid,
        },
        {
            "name": "rough-half",
            "kind": "random_band",
            "tag": "rough-half",
            "profile_exponent": 0.5,
        },
        {
            "name": "rough-one",
            "kind": "random_band",
            "tag": "rough-one",
            "profile_exponent": 1.0,
        },
    ]
    if band_passed:
        for m in members:
            if m["kind"] != "random_band":
                m["band_passed"] = True
    return members


def instantiate_family(spec: GridSpec, descs: list, seed: int) -> list:
    """Materialize (name, field) pairs, validating boundary decay."""
    out = []
    for i, desc in enumerate(descs):
        name = desc.get("name", f"member-{i}")
        f = make_member(spec, desc, seed)
        require_boundary_decay(f)
        out.append((name, f))
    return out


def band_probe(spec: GridSpec, k: int, seed: int) -> SampledField:
    """Seeded rough field living in the single band k (sweep saturator)."""
    return random_band_field(
        spec, k, k, seed=stable_seed(seed, "band-probe", k)
    )


def dilated_band_probes(spec: GridSpec, k_values, seed: int) -> dict:
    """One rough realization per seed at the lowest requested band,
    dilated up to the other bands (then tapered, which is essentially
    the identity on the shrunken supports).

    Dilation keeps the probe's shape statistics identical across k, so a
    per-band constant measured on these probes varies only through the
    genuine scale dependence of the operator under test.
    """
    from .grid import dilate_field

    k0 = min(k_values)
    base = _raw_band_field(
        spec, k0, k0, seed=stable_seed(seed, "band-probe", k0)
    )
    return {
        k: _finalize(dilate_field(base, k - k0), taper=True, mean_free=True)
        for k in sorted(k_values)
    }
