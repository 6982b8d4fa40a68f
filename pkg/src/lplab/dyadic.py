"""Frequency-localization operators built from the dyadic cutoffs.

All operators here are radial Fourier multipliers: band projections
(band k keeps |xi| in [2^(k-1), 2^(k+1)]), low-pass and windowed
variants, fractional derivatives |D|^s, and the reweighted band
projection that realizes the exact identity

    |D|^s P_k f = 2^(ks) * Ptilde_k f.

Multipliers always zero the Nyquist line so real fields stay real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cutoff import DEFAULT_CUTOFF, CutoffProfile
from .errors import BandRangeError, GeometryError, ValidationError
from .grid import (
    GridSpec,
    SampledField,
    SpectralField,
    boundary_decay_ratio,
    forward_transform,
    inverse_transform,
    quadrature_integral,
)

#: Safety margin between a band edge and the grid's frequency limits.
#: Bands are refused unless 2^(k-1) >= 4*dxi and 2^(k+1) <= nyquist/2,
#: i.e. k in [ceil(log2(4 dxi)), floor(log2(nyquist/4))].
_RANGE_NUDGE = 1e-9


def band_range(spec: GridSpec) -> tuple:
    """Resolvable dyadic band indices (k_min, k_max) on this grid."""
    k_min = math.ceil(math.log2(4.0 * spec.dxi) - _RANGE_NUDGE)
    k_max = math.floor(math.log2(spec.nyquist / 4.0) + _RANGE_NUDGE)
    return k_min, k_max


def check_band(spec: GridSpec, k: int) -> None:
    k_min, k_max = band_range(spec)
    if not k_min <= k <= k_max:
        raise BandRangeError(
            f"band k={k} outside resolvable range [{k_min}, {k_max}] "
            f"(N={spec.N}, L={spec.L}, dxi={spec.dxi:.6g}, "
            f"nyquist={spec.nyquist:.6g})"
        )


def apply_radial_multiplier(f: SampledField, multiplier) -> SampledField:
    """Multiply the spectrum of f by ``multiplier(|xi|)``, Nyquist zeroed."""
    spec = f.spec
    m = np.asarray(multiplier(spec.freq_radial()), dtype=np.float64)
    m = np.where(spec.nyquist_mask(), 0.0, m)
    was_real = f.is_real()
    F = forward_transform(f)
    out = inverse_transform(SpectralField(spec, F.coefficients * m))
    if was_real:
        out = SampledField(spec, out.values.real.astype(np.complex128))
    return out


def project_band(
    f: SampledField, k: int, profile: CutoffProfile = DEFAULT_CUTOFF
) -> SampledField:
    """P_k: keep the dyadic band |xi| ~ 2^k via the smooth bump phi."""
    check_band(f.spec, k)
    return apply_radial_multiplier(f, lambda r: profile.phi(r * 2.0**-k))


def project_below(
    f: SampledField, k: int, profile: CutoffProfile = DEFAULT_CUTOFF
) -> SampledField:
    """P_{<=k}: low-pass with the plateau profile psi(2^-k |xi|)."""
    check_band(f.spec, k)
    return apply_radial_multiplier(f, lambda r: profile.psi(r * 2.0**-k))


def project_range(
    f: SampledField,
    k: int,
    n_band: int,
    profile: CutoffProfile = DEFAULT_CUTOFF,
) -> SampledField:
    """Windowed projection onto bands strictly between k-N and k+N.

    Multiplier psi(2^-(k+N-1) |xi|) - psi(2^-(k-N) |xi|), i.e. the
    difference of the two low-pass operators P_{<k+N} - P_{<=k-N}.
    The window edges may extend past the resolvable range; only the
    center band k is required to be resolvable.
    """
    check_band(f.spec, k)
    if n_band < 1:
        raise BandRangeError(f"n_band must be >= 1, got {n_band}")

    def mult(r):
        return profile.psi(r * 2.0 ** -(k + n_band - 1)) - profile.psi(
            r * 2.0 ** -(k - n_band)
        )

    return apply_radial_multiplier(f, mult)


def field_mean_ratio(f: SampledField) -> float:
    """|zero-frequency coefficient| relative to the spectral maximum."""
    F = forward_transform(f).coefficients
    peak = float(np.max(np.abs(F)))
    if peak == 0.0:
        return 0.0
    return float(np.abs(F[(0,) * f.spec.n]) / peak)


def fractional_derivative(
    f: SampledField,
    s: float,
    strict: bool = True,
    mean_tol: float = 1e-10,
) -> SampledField:
    """|D|^s: multiply the spectrum by |xi|^s.

    For s > 0 the zero mode is annihilated; s = 0 is the identity.  For
    s < 0 the multiplier is singular at the origin, so the input must be
    mean-free: a zero-frequency coefficient above ``mean_tol`` (relative
    to the spectral peak) is rejected in strict mode and excised
    otherwise.
    """
    if s < 0 and strict:
        r = field_mean_ratio(f)
        if r > mean_tol:
            raise ValidationError(
                f"|D|^{s} needs a mean-free field; relative zero-mode "
                f"magnitude {r:.3e} exceeds {mean_tol:.1e}"
            )
    if s == 0:
        return f

    def mult(rho):
        with np.errstate(divide="ignore"):
            out = np.where(rho > 0, rho, 1.0) ** s
        return np.where(rho > 0, out, 0.0)

    return apply_radial_multiplier(f, mult)


def project_tilde(
    f: SampledField,
    k: int,
    s: float,
    profile: CutoffProfile = DEFAULT_CUTOFF,
) -> SampledField:
    """Ptilde_k: band projection reweighted by |2^-k xi|^s.

    Satisfies |D|^s P_k f = 2^(ks) Ptilde_k f exactly (same multiplier
    algebra evaluated once).
    """
    check_band(f.spec, k)

    def mult(rho):
        t = rho * 2.0**-k
        return profile.phi(t) * t**s

    return apply_radial_multiplier(f, mult)


def lp_kernel(
    k: int,
    spec: GridSpec,
    profile: CutoffProfile = DEFAULT_CUTOFF,
    boundary_tol: float = 1e-12,
) -> SampledField:
    """Real-space kernel of P_k: convolution against it equals P_k.

    The kernel is the inverse transform of the sampled band multiplier,
    a real, even, rapidly decaying bump of width ~ 2^-k.  Rejected when
    its tail has not decayed at the box boundary (grid too small for
    this band).
    """
    check_band(spec, k)
    rho = spec.freq_radial()
    m = np.where(spec.nyquist_mask(), 0.0, profile.phi(rho * 2.0**-k))
    kernel = inverse_transform(SpectralField(spec, m.astype(np.complex128)))
    kernel = SampledField(spec, kernel.values.real.astype(np.complex128))
    r = boundary_decay_ratio(kernel)
    if r > boundary_tol:
        raise GeometryError(
            f"band-{k} kernel tail is {r:.3e} of its peak at the box "
            f"boundary (tolerance {boundary_tol:.1e}); grid too small"
        )
    return kernel


# --------------------------------------------------------------------------
# Integrable-kernel hypothesis: dyadic annulus masses and their decay.

@dataclass(frozen=True)
class AnnulusMassTable:
    """Dyadic-shell L1 masses of a kernel and the decay verdict.

    ``masses[i]`` is the integral of |P| over 2^(j-1) <= |x| <= 2^j for
    j = j_values[i]; ``unit_ball_mass`` integrates over |x| <= 1.  The
    hypothesis requires masses <= C0 * 2^(-j(eps+s)) with one finite C0;
    on a finite grid this is tested as: the regression slope of
    log2(mass * 2^(j(eps+s))) against j, fitted on the outer half of the
    nonzero shells (where the decay is asymptotic), must not exceed
    ``slope_tol``.
    """

    s: float
    eps: float
    j_values: tuple
    masses: tuple
    unit_ball_mass: float
    omitted: tuple
    c0: float
    slope: float | None
    slope_tol: float
    passed: bool

    def as_dict(self) -> dict:
        return {
            "s": self.s,
            "eps": self.eps,
            "j_values": list(self.j_values),
            "masses": list(self.masses),
            "unit_ball_mass": self.unit_ball_mass,
            "omitted": list(self.omitted),
            "c0": self.c0,
            "slope": self.slope,
            "slope_tol": self.slope_tol,
            "passed": self.passed,
        }


def annulus_masses(P: SampledField, j_values) -> dict:
    """Sharp-shell L1 masses of |P| for the given dyadic indices."""
    rho = P.spec.radial_coords()
    a = np.abs(P.values) * P.spec.cell_volume
    out = {}
    for j in j_values:
        shell = (rho >= 2.0 ** (j - 1)) & (rho <= 2.0**j)
        out[j] = float(np.sum(a[shell]))
    return out


def mass_decay_verdict(
    j_values,
    masses,
    unit_ball_mass: float,
    s: float,
    eps: float,
    slope_tol: float = 0.05,
    omitted=(),
) -> AnnulusMassTable:
    """Decide the dyadic-decay hypothesis from a mass table."""
    weights = [m * 2.0 ** (j * (eps + s)) for j, m in zip(j_values, masses)]
    c0 = max([unit_ball_mass] + weights) if weights else unit_ball_mass
    floor = 1e-300 + 1e-14 * max(weights, default=0.0)
    live = [(j, w) for j, w in zip(j_values, weights) if w > floor]
    slope = None
    passed = True
    if len(live) >= 3:
        tail = live[-max(3, (len(live) + 1) // 2):]
        ks = np.array([j for j, _ in tail], dtype=np.float64)
        logw = np.log2([w for _, w in tail])
        slope = float(np.polyfit(ks, logw, 1)[0])
        passed = slope <= slope_tol
    return AnnulusMassTable(
        s=s,
        eps=eps,
        j_values=tuple(j_values),
        masses=tuple(masses),
        unit_ball_mass=unit_ball_mass,
        omitted=tuple(omitted),
        c0=c0,
        slope=slope,
        slope_tol=slope_tol,
        passed=passed,
    )


def verify_kernel_hypothesis(
    P: SampledField, s: float, eps: float, slope_tol: float = 0.05
) -> AnnulusMassTable:
    """Measure shell masses of ``P`` and test the 2^(-j(eps+s)) decay.

    Shells that stick out of the box (2^j > L) are omitted and reported.
    """
    if not 0 < s < 1:
        raise ValidationError(f"s={s} outside (0, 1)")
    if eps <= 0:
        raise ValidationError(f"eps={eps} must be positive")
    spec = P.spec
    if spec.L < 1.0:
        raise GeometryError("unit ball does not fit inside the box")
    j_all = range(1, max(2, math.floor(math.log2(spec.L * 2)) + 1))
    kept = [j for j in j_all if 2.0**j <= spec.L]
    omitted = [j for j in j_all if 2.0**j > spec.L]
    table = annulus_masses(P, kept)
    rho = spec.radial_coords()
    m0 = float(
        np.sum(np.abs(P.values)[rho <= 1.0]) * spec.cell_volume
    )
    return mass_decay_verdict(
        kept,
        [table[j] for j in kept],
        m0,
        s,
        eps,
        slope_tol=slope_tol,
        omitted=omitted,
    )
