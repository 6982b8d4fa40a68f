"""Sampled fields on a periodic box and their spectral transforms.

The box is [-L, L)^n sampled on a uniform lattice x_i = -L + i*dx with
dx = 2L/N, N a power of two.  Spectral coefficients live on the integer
frequency lattice xi = j*dxi with dxi = 1/(2L) and |j| <= N/2 per axis,
and approximate the integral transform

    F(xi) = integral f(x) exp(-2 pi i x.xi) dx

by trapezoidal (here: plain lattice) quadrature with weight dx^n.  The
inverse applies weight dxi^n, so forward followed by inverse is exact up
to round-off.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError

#: Default relative magnitude allowed at the box boundary.  Rapidly
#: decaying test functions must be below this so that periodization
#: error is negligible against the identities checked at 1e-10..1e-12.
BOUNDARY_DECAY_TOL = 1e-12


@dataclass(frozen=True)
class GridSpec:
    """Geometry of the periodic sampling lattice.

    Parameters
    ----------
    n : spatial dimension, 1 <= n <= 3
    N : samples per axis, power of two, >= 16
    L : half-width of the box [-L, L)^n
    """

    n: int
    N: int
    L: float

    def __post_init__(self):
        if not 1 <= self.n <= 3:
            raise ValidationError(f"dimension n={self.n} outside 1..3")
        if self.N < 16 or (self.N & (self.N - 1)) != 0:
            raise ValidationError(f"N={self.N} must be a power of two >= 16")
        if not (self.L > 0 and np.isfinite(self.L)):
            raise ValidationError(f"half-width L={self.L} must be positive")
        object.__setattr__(self, "L", float(self.L))

    @property
    def dx(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dxi(self) -> float:
        return 1.0 / (2.0 * self.L)

    @property
    def nyquist(self) -> float:
        """Largest lattice frequency magnitude per axis, N/(4L)."""
        return self.N / (4.0 * self.L)

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.n

    @property
    def size(self) -> int:
        return self.N**self.n

    @property
    def cell_volume(self) -> float:
        return self.dx**self.n

    @property
    def box_volume(self) -> float:
        return (2.0 * self.L) ** self.n

    def axis_coords(self) -> np.ndarray:
        """Lattice coordinates -L + i*dx along one axis."""
        return -self.L + self.dx * np.arange(self.N)

    def radial_coords(self) -> np.ndarray:
        """|x| on the full lattice, shape ``self.shape``."""
        return _radial_coords(self)

    def freq_integers(self) -> np.ndarray:
        """Integer frequency index j along one axis, FFT (unshifted) order."""
        return np.fft.fftfreq(self.N, d=1.0 / self.N).astype(np.int64)

    def freq_radial(self) -> np.ndarray:
        """|xi| on the frequency lattice, shape ``self.shape``."""
        return _freq_radial(self)

    def nyquist_mask(self) -> np.ndarray:
        """Boolean mask of modes touching the Nyquist line on any axis."""
        return _nyquist_mask(self)


@lru_cache(maxsize=32)
def _radial_coords(spec: GridSpec) -> np.ndarray:
    ax = spec.axis_coords()
    grids = np.meshgrid(*([ax] * spec.n), indexing="ij")
    return np.sqrt(sum(g * g for g in grids))


@lru_cache(maxsize=32)
def _freq_radial(spec: GridSpec) -> np.ndarray:
    ax = spec.freq_integers() * spec.dxi
    grids = np.meshgrid(*([ax] * spec.n), indexing="ij")
    return np.sqrt(sum(g * g for g in grids))


@lru_cache(maxsize=32)
def _nyquist_mask(spec: GridSpec) -> np.ndarray:
    j = spec.freq_integers()
    hit = j == -spec.N // 2
    mask = np.zeros(spec.shape, dtype=bool)
    for axis in range(spec.n):
        shape = [1] * spec.n
        shape[axis] = spec.N
        mask |= hit.reshape(shape)
    return mask


@lru_cache(maxsize=32)
def _center_signs(spec: GridSpec) -> np.ndarray:
    # (-1)^(j_1+...+j_n): phase that moves the transform origin to the
    # box center -L.  Real-valued, its own inverse.
    j = spec.freq_integers()
    s = 1.0 - 2.0 * (j % 2)
    out = np.ones(spec.shape)
    for axis in range(spec.n):
        shape = [1] * spec.n
        shape[axis] = spec.N
        out = out * s.reshape(shape)
    return out


@dataclass(frozen=True, eq=False)
class SampledField:
    """Complex samples of a function on the lattice of ``spec``."""

    spec: GridSpec
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128)
        if v.shape != self.spec.shape:
            v = v.reshape(self.spec.shape)
        if not np.all(np.isfinite(v.view(np.float64))):
            raise ValidationError("field contains NaN or Inf samples")
        object.__setattr__(self, "values", v)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    def is_real(self, tol: float = 1e-12) -> bool:
        scale = self.max_abs() or 1.0
        return float(np.max(np.abs(self.values.imag))) <= tol * scale


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Spectral coefficients in FFT (unshifted) layout on ``spec``."""

    spec: GridSpec
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=np.complex128)
        if c.shape != self.spec.shape:
            c = c.reshape(self.spec.shape)
        if not np.all(np.isfinite(c.view(np.float64))):
            raise ValidationError("spectrum contains NaN or Inf coefficients")
        object.__setattr__(self, "coefficients", c)


def forward_transform(f: SampledField) -> SpectralField:
    """Lattice approximation of F(xi) = integral f exp(-2 pi i x.xi) dx."""
    spec = f.spec
    coeff = np.fft.fftn(f.values) * (_center_signs(spec) * spec.cell_volume)
    return SpectralField(spec, coeff)


def inverse_transform(F: SpectralField) -> SampledField:
    """Exact inverse of :func:`forward_transform` up to round-off."""
    spec = F.spec
    scale = spec.dxi**spec.n * spec.size
    vals = np.fft.ifftn(F.coefficients * _center_signs(spec)) * scale
    return SampledField(spec, vals)


def quadrature_integral(f: SampledField) -> complex:
    """Box integral of f: plain lattice sum weighted by dx^n."""
    return complex(np.sum(f.values) * f.spec.cell_volume)


def l2_norm(f: SampledField) -> float:
    """Quadrature L2 norm on the box."""
    v = f.values
    return float(np.sqrt(np.sum(v.real**2 + v.imag**2) * f.spec.cell_volume))


def spectral_l2_norm(F: SpectralField) -> float:
    """L2 norm evaluated on the spectral side (Parseval)."""
    c = F.coefficients
    return float(
        np.sqrt(np.sum(c.real**2 + c.imag**2) * F.spec.dxi**F.spec.n)
    )


def boundary_decay_ratio(f: SampledField) -> float:
    """Largest |f| on the outermost lattice shell, relative to max |f|.

    The shell is the set of points with any coordinate index 0 or N-1.
    """
    m = f.max_abs()
    if m == 0.0:
        return 0.0
    a = np.abs(f.values)
    worst = 0.0
    for axis in range(f.spec.n):
        worst = max(worst, float(np.max(a.take(0, axis=axis))))
        worst = max(worst, float(np.max(a.take(-1, axis=axis))))
    return worst / m


def require_boundary_decay(f: SampledField, tol: float = BOUNDARY_DECAY_TOL):
    """Reject fields that have not decayed at the box boundary."""
    r = boundary_decay_ratio(f)
    if r > tol:
        raise ValidationError(
            f"field magnitude at box boundary is {r:.3e} of max, above {tol:.1e}; "
            "enlarge the box or narrow the profile"
        )


def convolve(h: SampledField, g: SampledField) -> SampledField:
    """Periodic convolution (h*g)(x) = integral h(y) g(x-y) dy.

    Computed spectrally; exact (to round-off) for lattice-resolved data
    by the convolution theorem for the box transforms above.
    """
    if h.spec != g.spec:
        raise ValidationError("convolve: mismatched grids")
    H = forward_transform(h).coefficients
    G = forward_transform(g).coefficients
    return inverse_transform(SpectralField(h.spec, H * G))


# --------------------------------------------------------------------------
# Lattice refinement: spectral zero-padding evaluates the same
# trigonometric interpolant on a finer lattice over the same box.

def pad_spectrum(F: SpectralField, factor: int = 2) -> SpectralField:
    """Embed coefficients into a lattice ``factor`` times finer (same box).

    The ambiguous Nyquist line of the coarse lattice is zeroed before
    embedding.
    """
    spec = F.spec
    fine = GridSpec(spec.n, factor * spec.N, spec.L)
    c = np.where(_nyquist_mask(spec), 0.0, F.coefficients)
    shifted = np.fft.fftshift(c)
    out = np.zeros(fine.shape, dtype=np.complex128)
    lo = (fine.N - spec.N) // 2
    block = tuple(slice(lo, lo + spec.N) for _ in range(spec.n))
    out[block] = shifted
    return SpectralField(fine, np.fft.ifftshift(out))


def truncate_spectrum(F: SpectralField, spec: GridSpec):
    """Restrict fine-lattice coefficients back to ``spec``.

    Returns (coarse spectrum, discarded fraction of the total l2 mass).
    """
    fine = F.spec
    shifted = np.fft.fftshift(F.coefficients)
    lo = (fine.N - spec.N) // 2
    block = tuple(slice(lo, lo + spec.N) for _ in range(spec.n))
    inside = shifted[block]
    total = float(np.sum(np.abs(F.coefficients) ** 2))
    kept = float(np.sum(np.abs(inside) ** 2))
    loss = 0.0 if total == 0.0 else max(0.0, 1.0 - kept / total) ** 0.5
    coarse = np.fft.ifftshift(inside)
    coarse = np.where(_nyquist_mask(spec), 0.0, coarse)
    return SpectralField(spec, coarse), loss


def refine_field(f: SampledField, factor: int = 2) -> SampledField:
    """Resample f onto a ``factor`` times finer lattice (same function)."""
    return inverse_transform(pad_spectrum(forward_transform(f), factor))


def dilate_field(f: SampledField, j: int) -> SampledField:
    """x -> f(2^j x) for j >= 0, exact on the lattice.

    Every spectral coefficient moves from frequency index i to 2^j i;
    content that a doubling would push past Nyquist must be absent
    (it is checked to be, at 1e-13 relative).
    """
    if j < 0:
        raise ValidationError("dilate_field only shrinks (j >= 0)")
    if j == 0:
        return f
    spec = f.spec
    F = forward_transform(f).coefficients
    shifted = np.fft.fftshift(F)
    half = spec.N // 2
    m = (half - 1) >> j
    src = half + np.arange(-m, m + 1)
    dst = half + (np.arange(-m, m + 1) << j)
    out = np.zeros_like(shifted)
    out[np.ix_(*([dst] * spec.n))] = shifted[np.ix_(*([src] * spec.n))]
    kept = shifted[np.ix_(*([src] * spec.n))]
    lost = np.sqrt(
        max(0.0, float(np.sum(np.abs(shifted) ** 2) - np.sum(np.abs(kept) ** 2)))
    )
    total = np.sqrt(float(np.sum(np.abs(shifted) ** 2)))
    if total > 0 and lost > 1e-13 * total:
        raise ValidationError(
            f"dilation by 2^{j} would move {lost / total:.2e} of the "
            "spectral mass past Nyquist"
        )
    return inverse_transform(SpectralField(spec, np.fft.ifftshift(out)))


# --------------------------------------------------------------------------
# Field serialization: one file, first line a JSON header, then either CSV
# rows "index,re,im" or raw little-endian complex128 in C order.

def save_field(f: SampledField, path, fmt: str = "csv") -> None:
    if fmt not in ("csv", "bin"):
        raise ValidationError(f"unknown field format {fmt!r}")
    spec = f.spec
    header = {"n": spec.n, "N": spec.N, "L": spec.L, "format": fmt}
    flat = f.values.ravel()
    if fmt == "csv":
        with open(path, "w") as fh:
            fh.write(json.dumps(header) + "\n")
            for i, z in enumerate(flat):
                fh.write(f"{i},{z.real:.17g},{z.imag:.17g}\n")
    else:
        with open(path, "wb") as fh:
            fh.write((json.dumps(header) + "\n").encode())
            fh.write(np.ascontiguousarray(flat, dtype="<c16").tobytes())


def load_field(path) -> SampledField:
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode())
        spec = GridSpec(header["n"], header["N"], header["L"])
        if header.get("format") == "bin":
            raw = fh.read(16 * spec.size)
            vals = np.frombuffer(raw, dtype="<c16").astype(np.complex128)
        else:
            vals = np.empty(spec.size, dtype=np.complex128)
            for line in fh.read().decode().splitlines():
                if not line:
                    continue
                idx, re, im = line.split(",")
                vals[int(idx)] = float(re) + 1j * float(im)
    return SampledField(spec, vals)
