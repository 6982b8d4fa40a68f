"""Physical-space operators: maximal function, Riesz potentials,
truncated power kernels, and sampled difference-quotient suprema.

The Hardy-Littlewood maximal function is discretized with a geometric
radius ladder; ball averages are periodic convolutions against
normalized ball indicators, and the pointwise value |f|(x) is the r->0
member of the ladder.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import dyadic
from .errors import GeometryError, ValidationError
from .grid import (
    GridSpec,
    SampledField,
    SpectralField,
    convolve,
    forward_transform,
    inverse_transform,
    l2_norm,
)


@dataclass(frozen=True)
class RadiiPolicy:
    """Geometric radius ladder r_i = dx * ratio^i, capped at L/2."""

    ratio: float = math.sqrt(2.0)

    def __post_init__(self):
        if not self.ratio > 1.0:
            raise ValidationError(f"ladder ratio must exceed 1, got {self.ratio}")

    def radii(self, spec: GridSpec) -> tuple:
        out = []
        r = spec.dx
        while r <= spec.L / 2.0 + 1e-12:
            out.append(r)
            r *= self.ratio
        return tuple(out)


DEFAULT_RADII = RadiiPolicy()


@lru_cache(maxsize=6)
def _ball_averagers(spec: GridSpec, policy: RadiiPolicy):
    """Per-radius spectra of mass-normalized ball indicators."""
    rho = spec.radial_coords()
    out = []
    for r in policy.radii(spec):
        w = (rho <= r).astype(np.float64)
        mass = float(w.sum()) * spec.cell_volume
        W = forward_transform(SampledField(spec, w)).coefficients.real / mass
        out.append((r, W))
    return tuple(out)


def ball_average(f: SampledField, r: float) -> SampledField:
    """Mean of |f| over the periodic ball of radius r around each point."""
    spec = f.spec
    rho = spec.radial_coords()
    w = (rho <= r).astype(np.float64)
    mass = float(w.sum()) * spec.cell_volume
    if mass == 0.0:
        raise GeometryError(f"ball radius {r} below lattice resolution")
    a = SampledField(spec, np.abs(f.values))
    out = convolve(SampledField(spec, w), a)
    return SampledField(spec, np.maximum(out.values.real, 0.0) / mass)


def maximal_function(
    f: SampledField, policy: RadiiPolicy = DEFAULT_RADII
) -> SampledField:
    """Ladder maximal function: max of ball averages of |f| and |f| itself."""
    spec = f.spec
    a = np.abs(f.values)
    A = forward_transform(SampledField(spec, a)).coefficients
    best = a.copy()
    scale = spec.dxi**spec.n * spec.size
    from .grid import _center_signs  # shared cached phase array

    signs = _center_signs(spec)
    for _r, W in _ball_averagers(spec, policy):
        avg = np.fft.ifftn(A * W * signs).real * scale
        np.maximum(best, avg, out=best)
    return SampledField(spec, best)


# --------------------------------------------------------------------------
# Riesz potentials

def riesz_scaling_constant(s: float, n: int) -> float:
    """Normalization c so that c * |x|^(s-n) convolution realizes |D|^-s.

    Reciprocal of pi^(n/2) 2^s Gamma(s/2) / Gamma((n-s)/2).
    """
    gamma = math.pi ** (n / 2.0) * 2.0**s * math.gamma(s / 2.0) / math.gamma(
        (n - s) / 2.0
    )
    return 1.0 / gamma


def _sphere_area(n: int) -> float:
    """Surface measure of the unit sphere in R^n."""
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


def _singular_cell_average(spec: GridSpec, power: float) -> float:
    """Average of |z|^power over the origin cell, via the ball of equal
    volume (first-order-correct treatment of the integrable singularity)."""
    n = spec.n
    h = spec.dx
    ball_vol = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
    r_eq = h * (1.0 / ball_vol) ** (1.0 / n)
    expo = power + n
    if expo <= 0:
        raise ValidationError(f"|z|^{power} not integrable in dimension {n}")
    integral = _sphere_area(n) * r_eq**expo / expo
    return integral / h**n


def power_kernel_field(spec: GridSpec, power: float) -> SampledField:
    """|z|^power sampled on the lattice, singular cell averaged analytically."""
    rho = spec.radial_coords()
    with np.errstate(divide="ignore"):
        vals = np.where(rho > 0, rho, 1.0) ** power
    vals[(0,) * spec.n] = _singular_cell_average(spec, power)
    return SampledField(spec, vals)


def riesz_potential_spectral(g: SampledField, s: float) -> SampledField:
    """I_s g via the |xi|^-s multiplier (reference implementation)."""
    if not 0 < s < g.spec.n:
        raise ValidationError(f"Riesz order s={s} outside (0, {g.spec.n})")
    return dyadic.fractional_derivative(g, -s)


def riesz_potential_kernel(
    g: SampledField, s: float, constant: float | None = None
) -> SampledField:
    """I_s g via convolution against c_{s,n} |z|^(s-n)."""
    if not 0 < s < g.spec.n:
        raise ValidationError(f"Riesz order s={s} outside (0, {g.spec.n})")
    c = riesz_scaling_constant(s, g.spec.n) if constant is None else constant
    kernel = power_kernel_field(g.spec, s - g.spec.n)
    out = convolve(kernel, g)
    return SampledField(g.spec, c * out.values)


def fit_riesz_constant(g: SampledField, s: float) -> float:
    """Least-squares scale matching the kernel route to the spectral route."""
    ref = riesz_potential_spectral(g, s).values
    raw = convolve(power_kernel_field(g.spec, s - g.spec.n), g).values
    denom = float(np.sum(raw.real**2 + raw.imag**2))
    if denom == 0.0:
        raise ValidationError("kernel route vanished; cannot fit constant")
    return float(np.sum(raw.real * ref.real + raw.imag * ref.imag) / denom)


# --------------------------------------------------------------------------
# Truncated power kernels

@dataclass(frozen=True, eq=False)
class TruncatedKernelPair:
    """Inner kernel |z|^(s-n) on {|z| <= 4R} and outer |z|^(s-n-1) on
    {|z| >= 4R}, with lattice and radial-integral L1 masses.

    The analytic masses obey the exact scalings mass1 = c R^s and
    mass2 = c' R^(s-1); the sampled outer kernel misses the tail beyond
    the box, reported as ``outer_tail_fraction``.
    """

    R: float
    s: float
    spec: GridSpec
    inner: SampledField
    outer: SampledField
    inner_mass_lattice: float
    outer_mass_lattice: float
    inner_mass_analytic: float
    outer_mass_analytic: float
    outer_tail_fraction: float


def build_truncated_kernels(
    R: float, s: float, spec: GridSpec, tail_tol: float = 0.95
) -> TruncatedKernelPair:
    if not 0 < s < 1:
        raise ValidationError(f"s={s} outside (0, 1)")
    if not 4.0 * R <= spec.L / 2.0 + 1e-12:
        raise GeometryError(
            f"inner kernel support 4R={4 * R} exceeds L/2={spec.L / 2}"
        )
    n = spec.n
    rho = spec.radial_coords()
    cut = 4.0 * R

    inner = power_kernel_field(spec, s - n).values * (rho <= cut)
    with np.errstate(divide="ignore"):
        outer_prof = np.where(rho > 0, rho, 1.0) ** (s - n - 1.0)
    outer = np.where(rho >= cut, outer_prof, 0.0)

    area = _sphere_area(n)
    m1_exact = area * cut**s / s
    m2_exact = area * cut ** (s - 1.0) / (1.0 - s)
    tail_frac = (spec.L / cut) ** (s - 1.0)
    if tail_frac > tail_tol:
        raise GeometryError(
            f"outer kernel keeps only {1 - tail_frac:.2%} of its mass "
            f"inside the box (R={R}, L={spec.L})"
        )
    vol = spec.cell_volume
    return TruncatedKernelPair(
        R=R,
        s=s,
        spec=spec,
        inner=SampledField(spec, inner),
        outer=SampledField(spec, outer),
        inner_mass_lattice=float(np.abs(inner).sum() * vol),
        outer_mass_lattice=float(np.abs(outer).sum() * vol),
        inner_mass_analytic=m1_exact,
        outer_mass_analytic=m2_exact,
        outer_tail_fraction=tail_frac,
    )


# --------------------------------------------------------------------------
# Radially-decreasing majorant bound

def _radial_groups(spec: GridSpec):
    rho = spec.radial_coords().ravel()
    order = np.argsort(rho, kind="stable")
    sorted_rho = rho[order]
    boundaries = np.concatenate(
        ([0], np.nonzero(np.diff(sorted_rho) > 1e-12 * spec.dx)[0] + 1)
    )
    return order, boundaries, sorted_rho[boundaries]


def radial_majorant_check(
    phi: SampledField,
    g: SampledField,
    policy: RadiiPolicy = DEFAULT_RADII,
    radial_tol: float = 1e-9,
    floor_rel: float = 1e-9,
) -> float:
    """Largest ratio |phi * g| / (||phi||_1 * Mg) over the lattice.

    ``phi`` must be nonnegative and radially non-increasing (within
    ``radial_tol`` of its peak); points where the denominator is below
    ``floor_rel`` times its maximum are excluded.
    """
    spec = phi.spec
    vals = phi.values.real
    if np.min(vals) < -radial_tol * max(np.max(vals), 1e-300):
        raise ValidationError("majorant kernel must be nonnegative")
    order, bounds, _ = _radial_groups(spec)
    flat = vals.ravel()[order]
    peak = float(np.max(np.abs(flat))) or 1.0
    groups = np.split(flat, bounds[1:])
    means = np.array([gr.mean() for gr in groups])
    spreads = np.array([gr.max() - gr.min() for gr in groups])
    if np.max(spreads) > radial_tol * peak:
        raise ValidationError("majorant kernel is not radial on the lattice")
    running = np.minimum.accumulate(means)
    if np.max(means - running) > radial_tol * peak:
        raise ValidationError("majorant kernel is not radially decreasing")

    mass = float(np.abs(vals).sum() * spec.cell_volume)
    conv = np.abs(convolve(phi, g).values)
    mg = maximal_function(g, policy).values.real
    denom = mass * mg
    live = denom > floor_rel * np.max(denom)
    if not np.any(live):
        return 0.0
    return float(np.max(conv[live] / denom[live]))


# --------------------------------------------------------------------------
# Sampled two-point difference quotients

def periodic_pair_distances(spec: GridSpec, ix, iy) -> np.ndarray:
    """Euclidean distance with periodic wrap between flat lattice indices."""
    d2 = np.zeros(ix.shape, dtype=np.float64)
    rem_x, rem_y = ix, iy
    for axis in range(spec.n - 1, -1, -1):
        cx, rem_x = rem_x % spec.N, rem_x // spec.N
        cy, rem_y = rem_y % spec.N, rem_y // spec.N
        d = (cx - cy + spec.N // 2) % spec.N - spec.N // 2
        d2 += (d * spec.dx) ** 2
    return np.sqrt(d2)


def pairwise_sup_ratio(
    f: SampledField,
    s: float,
    weights: np.ndarray | None = None,
    n_pairs: int = 100_000,
    seed: int = 0,
) -> float:
    """sup over sampled pairs of |f(x)-f(y)| / (|x-y|^s * (w(x)+w(y))).

    Samples ``n_pairs`` seeded uniform pairs plus every nearest-neighbor
    pair along each axis; |x-y| uses the periodic wrap.  ``weights=None``
    means the plain difference quotient (denominator weight 1).
    """
    if not 0 < s < 1:
        raise ValidationError(f"s={s} outside (0, 1)")
    spec = f.spec
    v = f.values
    w = None if weights is None else np.asarray(weights, dtype=np.float64)

    best = 0.0
    # nearest neighbors along each axis, at exact distance dx
    for axis in range(spec.n):
        shifted = np.roll(v, 1, axis=axis)
        num = np.abs(v - shifted)
        if w is None:
            den = spec.dx**s
            best = max(best, float(np.max(num)) / den)
        else:
            den = spec.dx**s * (w + np.roll(w, 1, axis=axis))
            live = den > 0
            if np.any(live):
                best = max(best, float(np.max(num[live] / den[live])))

    rng = np.random.default_rng(seed)
    ix = rng.integers(0, spec.size, n_pairs)
    iy = rng.integers(0, spec.size, n_pairs)
    keep = ix != iy
    ix, iy = ix[keep], iy[keep]
    dist = periodic_pair_distances(spec, ix, iy)
    flat = v.ravel()
    num = np.abs(flat[ix] - flat[iy])
    if w is None:
        den = dist**s
    else:
        wf = w.ravel()
        den = dist**s * (wf[ix] + wf[iy])
    live = den > 0
    if np.any(live):
        best = max(best, float(np.max(num[live] / den[live])))
    elif float(np.max(num)) > 0:
        return math.inf
    return best


def holder_ratio(
    f: SampledField,
    s: float,
    n_pairs: int = 100_000,
    seed: int = 0,
    policy: RadiiPolicy = DEFAULT_RADII,
) -> float:
    """Empirical constant in the two-point bound
    |f(x)-f(y)| <= C |x-y|^s (M|D|^s f(x) + M|D|^s f(y)).

    Returns 0 for (numerically) constant f.
    """
    h = dyadic.fractional_derivative(f, s)
    if l2_norm(h) <= 1e-14 * max(f.max_abs(), 1.0):
        return 0.0
    mh = maximal_function(h, policy).values.real
    return pairwise_sup_ratio(f, s, weights=mh, n_pairs=n_pairs, seed=seed)
