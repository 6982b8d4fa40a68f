"""Norm scales: Lebesgue norms, dyadic-annulus L2 sums, the weighted
band/annulus seminorm ladder and its dual, weighted Sobolev sums, and
the two Hoelder-type scales.

All annulus-weighted quantities share one truncation policy: the sum or
sup over annulus indices m runs over [m_min, m_max] with
m_min = ceil(log2(2 dx)) and m_max = floor(log2(L/2)); what the
truncation discards is estimated from the field itself and reported
next to the value, never silently dropped.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .cutoff import DEFAULT_CUTOFF, CutoffProfile
from .dyadic import band_range, fractional_derivative, project_band
from .errors import GeometryError, ValidationError
from .grid import GridSpec, SampledField, forward_transform, inverse_transform, SpectralField
from .realspace import pairwise_sup_ratio

_GEOM = 1.0 / (1.0 - 2.0**-0.5)  # sum of 2^(-t/2), t >= 0


@dataclass(frozen=True)
class DyadicAnnulusDecomposition:
    """Radial annulus masks chi_m(x) = phi(2^-m |x|) on a grid.

    ``m_range`` masks are the ones entering norm sums; ``partition``
    additionally provides the closed-form core mask psi(|x|) (index 0)
    so that the masks up to the box scale sum to 1 everywhere.
    """

    spec: GridSpec
    profile: CutoffProfile = DEFAULT_CUTOFF

    @property
    def m_min(self) -> int:
        return math.ceil(math.log2(2.0 * self.spec.dx) - 1e-9)

    @property
    def m_max(self) -> int:
        return math.floor(math.log2(self.spec.L / 2.0) + 1e-9)

    @property
    def m_range(self) -> range:
        return range(self.m_min, self.m_max + 1)

    @property
    def m_box(self) -> int:
        """Smallest m with the whole box inside the psi(2^-m |x|) plateau."""
        return math.ceil(math.log2(math.sqrt(self.spec.n) * self.spec.L) + 1e-9)

    def mask(self, m: int) -> np.ndarray:
        return _annulus_mask(self.spec, self.profile, m)

    def core_mask(self, j_out: int = 0) -> np.ndarray:
        """psi(2^-j_out |x|) = sum of all annulus masks with m <= j_out."""
        return self.profile.psi(self.spec.radial_coords() * 2.0**-j_out)

    def partition(self) -> list:
        """[(0, psi(|x|)), (j, chi_j) for j = 1..m_box]: sums to 1 on the box."""
        out = [(0, self.core_mask(0))]
        for j in range(1, self.m_box + 1):
            out.append((j, self.mask(j)))
        return out


@lru_cache(maxsize=512)
def _annulus_mask(spec: GridSpec, profile: CutoffProfile, m: int) -> np.ndarray:
    return profile.phi(spec.radial_coords() * 2.0**-m)


def lp_norm(f: SampledField, p) -> float:
    """Quadrature L^p norm; p = inf gives the lattice maximum of |f|."""
    if p == math.inf or p == "inf":
        return f.max_abs()
    p = float(p)
    if p < 1:
        raise ValidationError(f"L^p norm needs p >= 1, got {p}")
    a = np.abs(f.values)
    return float((np.sum(a**p) * f.spec.cell_volume) ** (1.0 / p))


def annulus_l2(
    f: SampledField, m: int, decomp: DyadicAnnulusDecomposition | None = None
) -> float:
    """L2 norm of the annulus-masked field phi(2^-m .) f."""
    d = decomp or DyadicAnnulusDecomposition(f.spec)
    if m > d.m_box:
        raise GeometryError(
            f"annulus m={m} lies outside the box (largest usable m={d.m_box})"
        )
    masked = d.mask(m) * f.values
    return float(
        np.sqrt(np.sum(masked.real**2 + masked.imag**2) * f.spec.cell_volume)
    )


def _masked_l2(values: np.ndarray, mask: np.ndarray, vol: float) -> float:
    m = mask * values
    return float(np.sqrt(np.sum(m.real**2 + m.imag**2) * vol))


def _annulus_profile(values: np.ndarray, d: DyadicAnnulusDecomposition):
    """Per-m masked L2 norms over the working range plus the tail data."""
    vol = d.spec.cell_volume
    core = [_masked_l2(values, d.mask(m), vol) for m in d.m_range]
    outer = [
        _masked_l2(values, d.mask(m), vol)
        for m in range(d.m_max + 1, d.m_box + 1)
    ]
    rho = d.spec.radial_coords()
    inner = _masked_l2(values, (rho < 2.0 ** (d.m_min - 1)).astype(float), vol)
    return core, outer, inner


def _sum_tail(d: DyadicAnnulusDecomposition, outer, inner) -> float:
    """Bound on the annulus terms the [m_min, m_max] sum truncates away."""
    t = sum(2.0 ** (m / 2.0) * v for m, v in zip(range(d.m_max + 1, d.m_box + 1), outer))
    t += 2.0 ** ((d.m_min - 1) / 2.0) * _GEOM * inner
    return t


def y_seminorm(
    f: SampledField,
    d: float,
    k: int,
    decomp: DyadicAnnulusDecomposition | None = None,
    profile: CutoffProfile = DEFAULT_CUTOFF,
    with_tail: bool = False,
):
    """Band-k annulus ladder 2^(-dk/2) sum_m 2^(m/2) ||chi_m P_k f||_2.

    Not a faithful norm: it vanishes whenever the band-k piece does.
    """
    dec = decomp or DyadicAnnulusDecomposition(f.spec, profile)
    fk = project_band(f, k, profile).values
    core, outer, inner = _annulus_profile(fk, dec)
    val = 2.0 ** (-d * k / 2.0) * sum(
        2.0 ** (m / 2.0) * v for m, v in zip(dec.m_range, core)
    )
    if with_tail:
        return val, 2.0 ** (-d * k / 2.0) * _sum_tail(dec, outer, inner)
    return val


def y_dual_seminorm(
    f: SampledField,
    d: float,
    k: int,
    decomp: DyadicAnnulusDecomposition | None = None,
    profile: CutoffProfile = DEFAULT_CUTOFF,
    with_tail: bool = False,
):
    """Dual ladder 2^(dk/2) sup_m 2^(-m/2) ||chi_m P_k f||_2."""
    dec = decomp or DyadicAnnulusDecomposition(f.spec, profile)
    fk = project_band(f, k, profile).values
    core, outer, _inner = _annulus_profile(fk, dec)
    val = 2.0 ** (d * k / 2.0) * max(
        (2.0 ** (-m / 2.0) * v for m, v in zip(dec.m_range, core)),
        default=0.0,
    )
    if with_tail:
        omitted = max(
            (
                2.0 ** (-m / 2.0) * v
                for m, v in zip(range(dec.m_max + 1, dec.m_box + 1), outer)
            ),
            default=0.0,
        )
        return val, 2.0 ** (d * k / 2.0) * omitted
    return val


def _band_pieces(f: SampledField, profile: CutoffProfile):
    """All resolvable band projections, reusing one forward transform."""
    spec = f.spec
    F = forward_transform(f).coefficients
    rho = spec.freq_radial()
    nyq = spec.nyquist_mask()
    k_min, k_max = band_range(spec)
    for k in range(k_min, k_max + 1):
        mult = np.where(nyq, 0.0, profile.phi(rho * 2.0**-k))
        yield k, inverse_transform(SpectralField(spec, F * mult)).values


def y_norm(
    f: SampledField,
    gamma: float,
    d: float,
    profile: CutoffProfile = DEFAULT_CUTOFF,
    with_tail: bool = False,
):
    """Weighted scale: l2 over resolvable k of 2^(gamma k) band seminorms."""
    dec = DyadicAnnulusDecomposition(f.spec, profile)
    total = 0.0
    tail = 0.0
    for k, fk in _band_pieces(f, profile):
        core, outer, inner = _annulus_profile(fk, dec)
        semi = 2.0 ** (-d * k / 2.0) * sum(
            2.0 ** (m / 2.0) * v for m, v in zip(dec.m_range, core)
        )
        total += (2.0 ** (gamma * k) * semi) ** 2
        tail += (2.0 ** (gamma * k - d * k / 2.0) * _sum_tail(dec, outer, inner)) ** 2
    if with_tail:
        return math.sqrt(total), math.sqrt(tail)
    return math.sqrt(total)


def y_dual_norm(
    f: SampledField,
    gamma: float,
    d: float,
    profile: CutoffProfile = DEFAULT_CUTOFF,
) -> float:
    """l2 over resolvable k of 2^(gamma k) dual band seminorms."""
    dec = DyadicAnnulusDecomposition(f.spec, profile)
    total = 0.0
    for k, fk in _band_pieces(f, profile):
        core, _outer, _inner = _annulus_profile(fk, dec)
        semi = 2.0 ** (d * k / 2.0) * max(
            (2.0 ** (-m / 2.0) * v for m, v in zip(dec.m_range, core)),
            default=0.0,
        )
        total += (2.0 ** (gamma * k) * semi) ** 2
    return math.sqrt(total)


def weighted_sobolev_sum(
    f: SampledField,
    gamma: float,
    d: float,
    profile: CutoffProfile = DEFAULT_CUTOFF,
    with_tail: bool = False,
):
    """sum_m 2^(m/2) ||chi_m |D|^(gamma - d/2) f||_2 over the working range.

    A negative order gamma - d/2 requires a mean-free field.
    """
    dec = DyadicAnnulusDecomposition(f.spec, profile)
    g = fractional_derivative(f, gamma - d / 2.0).values
    core, outer, inner = _annulus_profile(g, dec)
    val = sum(2.0 ** (m / 2.0) * v for m, v in zip(dec.m_range, core))
    if with_tail:
        return val, _sum_tail(dec, outer, inner)
    return val


def dual_sobolev_sup(
    f: SampledField,
    gamma: float,
    d: float,
    profile: CutoffProfile = DEFAULT_CUTOFF,
) -> float:
    """sup_m 2^(-m/2) ||chi_m |D|^(gamma + d/2) f||_2 over the working range."""
    dec = DyadicAnnulusDecomposition(f.spec, profile)
    g = fractional_derivative(f, gamma + d / 2.0).values
    core, _outer, _inner = _annulus_profile(g, dec)
    return max(
        (2.0 ** (-m / 2.0) * v for m, v in zip(dec.m_range, core)),
        default=0.0,
    )


def lip_s_norm(
    f: SampledField, s: float, profile: CutoffProfile = DEFAULT_CUTOFF
) -> float:
    """sup over resolvable k of 2^(sk) ||P_k f||_inf."""
    if not 0 < s < 1:
        raise ValidationError(f"s={s} outside (0, 1)")
    best = 0.0
    for k, fk in _band_pieces(f, profile):
        best = max(best, 2.0 ** (s * k) * float(np.max(np.abs(fk))))
    return best


def holder_seminorm(
    f: SampledField, s: float, n_pairs: int = 100_000, seed: int = 0
) -> float:
    """Sampled sup of |f(x)-f(y)| / |x-y|^s (same pair scheme as the
    two-point maximal-function ratio)."""
    return pairwise_sup_ratio(f, s, weights=None, n_pairs=n_pairs, seed=seed)
