"""Scalar field engine: Gaussian / Laguerre-Gaussian modes, phase masks,
angular-spectrum propagation and modal diagnostics.

Fields live on square n x n grids (n a power of two) with pixel pitch in
metres; the grid origin sits at pixel (n//2, n//2).  A field's total power is
sum(|a|^2) * pitch^2.  ScalarField instances are immutable values: the sample
array is marked read-only and every operation allocates its output, so fields
can be shared freely between threads.  All reductions use fixed numpy
ordering, making results bit-deterministic.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates
from scipy.special import eval_genlaguerre


class BandLimitWarning(UserWarning):
    """Propagation kernel undersampled where the field carries power."""


@dataclass(frozen=True)
class LGIndex:
    """Laguerre-Gaussian mode label: radial index p >= 0, azimuthal index l,
    waist w0 (m)."""

    p: int
    l: int
    w0: float

    def __post_init__(self) -> None:
        if self.p < 0:
            raise ValueError("p must be >= 0")
        if not self.w0 > 0.0:
            raise ValueError("w0 must be > 0")


@dataclass(frozen=True)
class ScalarField:
    """Complex optical field sampled on a uniform square grid."""

    n: int
    pitch: float
    lam: float
    amps: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 32 or (self.n & (self.n - 1)) != 0:
            raise ValueError("grid size n must be a power of two, >= 32")
        if not (self.pitch > 0.0 and self.lam > 0.0):
            raise ValueError("pitch and wavelength must be > 0")
        amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if amps.shape != (self.n, self.n):
            raise ValueError(f"amps must have shape ({self.n}, {self.n})")
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValueError("amps must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    def total_power(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2)) * self.pitch**2

    def axis(self) -> np.ndarray:
        """Transverse coordinates (m) of pixel centres along one side."""
        return (np.arange(self.n) - self.n // 2) * self.pitch

    def with_amps(self, amps: np.ndarray) -> "ScalarField":
        return ScalarField(n=self.n, pitch=self.pitch, lam=self.lam, amps=amps)


def _grids(n: int, pitch: float):
    x = (np.arange(n) - n // 2) * pitch
    xx, yy = np.meshgrid(x, x, indexing="xy")
    return xx, yy


def _normalized(field: ScalarField) -> ScalarField:
    p = field.total_power()
    if p == 0.0:
        raise ValueError("zero-power field")
    return field.with_amps(field.amps / math.sqrt(p))


def make_gaussian(n: int, pitch: float, lam: float, w0: float) -> ScalarField:
    """Unit-power Gaussian at its waist, centred on the grid."""
    return make_lg(n, pitch, lam, LGIndex(p=0, l=0, w0=w0))


def make_lg(n: int, pitch: float, lam: float, idx: LGIndex) -> ScalarField:
    """Unit-power Laguerre-Gaussian mode LG_{p,l} at its waist.

    Amplitude ~ (sqrt(2) r / w0)^|l| L_p^|l|(2 r^2 / w0^2) exp(-r^2/w0^2)
    exp(i l phi), normalized on the grid.  The waist must satisfy
    w0 >= 4 * pitch so the mode is adequately sampled.
    """
    if idx.w0 < 4.0 * pitch:
        raise ValueError(f"w0 = {idx.w0} under-sampled: requires w0 >= 4 * pitch")
    xx, yy = _grids(n, pitch)
    r2 = xx**2 + yy**2
    u = 2.0 * r2 / idx.w0**2
    radial = eval_genlaguerre(idx.p, abs(idx.l), u) * np.exp(-r2 / idx.w0**2)
    if idx.l != 0:
        radial = radial * np.sqrt(u) ** abs(idx.l)
        phi = np.arctan2(yy, xx)
        amps = radial * np.exp(1j * idx.l * phi)
    else:
        amps = radial.astype(np.complex128)
    return _normalized(ScalarField(n=n, pitch=pitch, lam=lam, amps=amps))


def vortex_mask(n: int, pitch: float, delta_l: int) -> np.ndarray:
    """Unit-modulus spiral phase mask exp(i delta_l phi) about the grid centre."""
    xx, yy = _grids(n, pitch)
    return np.exp(1j * delta_l * np.arctan2(yy, xx))


def staircase_vortex_mask(n: int, pitch: float, delta_l: int, levels: int = 11) -> np.ndarray:
    """Spiral phase mask quantized to uniformly spaced discrete levels.

    The leading azimuthal order of a `levels`-step staircase carries a power
    fraction sinc^2(pi / levels) of an input without azimuthal structure.
    """
    xx, yy = _grids(n, pitch)
    phi = np.mod(delta_l * np.arctan2(yy, xx), 2.0 * math.pi)
    step = 2.0 * math.pi / levels
    quantized = np.round(phi / step) % levels * step
    return np.exp(1j * quantized)


def apply_mask(field: ScalarField, mask: np.ndarray) -> ScalarField:
    """Pixel-wise product of a field with a transmission mask."""
    mask = np.asarray(mask)
    if mask.shape != field.amps.shape:
        raise ValueError(
            f"mask shape {mask.shape} does not match field grid {field.amps.shape}"
        )
    return field.with_amps(field.amps * mask)


def propagate(field: ScalarField, z: float) -> ScalarField:
    """Exact scalar angular-spectrum propagation over a distance z (m).

    Evanescent components are removed (never amplified) for any z != 0, so
    power is conserved on the propagating band and propagate(-z) undoes
    propagate(z) there.  A BandLimitWarning is emitted when the propagation
    phase is undersampled in a spectral region that carries more than 1e-9
    of the field power.
    """
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    if z == 0.0:
        return field.with_amps(field.amps.copy())
    k = 2.0 * math.pi / field.lam
    kx = 2.0 * math.pi * np.fft.fftfreq(field.n, d=field.pitch)
    kxx, kyy = np.meshgrid(kx, kx, indexing="xy")
    kz2 = k * k - kxx**2 - kyy**2
    propagating = kz2 > 0.0
    kz = np.sqrt(np.where(propagating, kz2, 0.0))

    spectrum = np.fft.fft2(np.fft.ifftshift(field.amps))
    power = np.abs(spectrum) ** 2
    total = float(np.sum(power))
    if total > 0.0:
        # Local spectral phase slope must stay below pi per sample.
        dk = 2.0 * math.pi / (field.n * field.pitch)
        with np.errstate(divide="ignore", invalid="ignore"):
            slope = np.where(
                propagating,
                np.maximum(np.abs(kxx), np.abs(kyy)) * abs(z) / np.maximum(kz, 1e-300),
                0.0,
            )
        bad = propagating & (slope * dk > math.pi)
        if float(np.sum(power[bad])) > 1e-9 * total:
            warnings.warn(
                "angular-spectrum kernel undersampled for this z; "
                "enlarge the grid or reduce z",
                BandLimitWarning,
                stacklevel=2,
            )
    kernel = np.where(propagating, np.exp(1j * kz * z), 0.0)
    out = np.fft.fftshift(np.fft.ifft2(spectrum * kernel))
    return field.with_amps(out)


def fidelity(field: ScalarField, reference: ScalarField) -> float:
    """Squared magnitude of the normalized overlap, in [0, 1].

    Both fields are normalized internally, so F = |<field, ref>|^2 for
    unit-power inputs.  Symmetric, and invariant under a global phase of
    either argument.
    """
    if field.n != reference.n or field.pitch != reference.pitch:
        raise ValueError("fields must share one grid (n, pitch)")
    a = _normalized(field).amps
    b = _normalized(reference).amps
    overlap = np.sum(a * np.conj(b)) * field.pitch**2
    return float(np.abs(overlap) ** 2)


def _fourier_upsample(amps: np.ndarray, factor: int) -> np.ndarray:
    """Band-limited upsampling by spectral zero padding."""
    n = amps.shape[0]
    spectrum = np.fft.fftshift(np.fft.fft2(np.fft.ifftshift(amps)))
    big = np.zeros((n * factor, n * factor), dtype=np.complex128)
    lo = (n * factor - n) // 2
    big[lo:lo + n, lo:lo + n] = spectrum
    return np.fft.fftshift(np.fft.ifft2(np.fft.ifftshift(big))) * factor * factor


def azimuthal_spectrum(field: ScalarField, l_values) -> np.ndarray:
    """Power fraction carried by each azimuthal order exp(i l phi).

    The field is band-limit upsampled and resampled onto polar rings about
    the grid centre; an FFT along the angle projects out the harmonics, and
    ring powers are summed radially.  Fractions are relative to the field's
    total power, so they sum to <= 1 over any set of orders.
    """
    l_values = np.asarray(list(l_values), dtype=int)
    total = field.total_power()
    if total == 0.0:
        raise ValueError("zero-power field")
    n_theta = 1024
    if np.any(np.abs(l_values) >= n_theta // 2):
        raise ValueError(f"|l| must be < {n_theta // 2}")
    up = 2 if field.n <= 2048 else 1
    amps = _fourier_upsample(field.amps, up) if up > 1 else field.amps
    n = field.n * up
    pitch = field.pitch / up
    n_r = n // 2 - 1
    radii = (np.arange(n_r) + 0.5) * pitch
    theta = np.arange(n_theta) * (2.0 * math.pi / n_theta)
    rr = radii[:, None]
    cols = rr * np.cos(theta)[None, :] / pitch + n // 2
    rows = rr * np.sin(theta)[None, :] / pitch + n // 2
    coords = np.stack([rows.ravel(), cols.ravel()])
    polar = (
        map_coordinates(amps.real, coords, order=1, mode="nearest")
        + 1j * map_coordinates(amps.imag, coords, order=1, mode="nearest")
    ).reshape(n_r, n_theta)
    coeffs = np.fft.fft(polar, axis=1) / n_theta
    # power in order l: 2 pi * integral |a_l(r)|^2 r dr
    ring_weight = 2.0 * math.pi * radii * pitch
    fractions = np.empty(len(l_values))
    for i, l in enumerate(l_values):
        a_l = coeffs[:, l % n_theta]
        fractions[i] = float(np.sum(np.abs(a_l) ** 2 * ring_weight)) / total
    return fractions


def _golden_section(fun, lo: float, hi: float, iters: int = 60) -> float:
    """Deterministic golden-section minimizer on [lo, hi]."""
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = fun(d)
    return 0.5 * (a + b)


@dataclass(frozen=True)
class ConversionMetrics:
    """Mode-conversion scores: waist-optimized fidelity, fidelity at the
    nominal reference waist, the optimizing waist, power transmission, and
    the conversion efficiency eta = fidelity * t_swg."""

    fidelity: float
    fidelity_fixed_waist: float
    w0_opt: float
    t_swg: float
    eta: float


def conversion_metrics(
    field_in: ScalarField,
    mask: np.ndarray,
    target: LGIndex,
    z_eval: float = 0.0,
    optimize_waist: bool = True,
) -> ConversionMetrics:
    """Score a phase mask as an OAM converter against a target LG mode.

    The mask is applied, the field optionally propagated by z_eval, and the
    fidelity against LG_{p,l} evaluated.  The reference waist is optimized by
    golden-section search over [0.3, 3] x target.w0 (the fixed-waist value is
    reported alongside).  t_swg is output power over input power.
    """
    out = apply_mask(field_in, mask)
    t_swg = out.total_power() / field_in.total_power()
    if z_eval != 0.0:
        out = propagate(out, z_eval)

    def fid(w0: float) -> float:
        ref = make_lg(out.n, out.pitch, out.lam, LGIndex(p=target.p, l=target.l, w0=w0))
        return fidelity(out, ref)

    f_fixed = fid(target.w0)
    if optimize_waist:
        lo = max(0.3 * target.w0, 4.0 * field_in.pitch)
        w_opt = _golden_section(lambda w: -fid(w), lo, 3.0 * target.w0)
        f_opt = fid(w_opt)
        if f_fixed > f_opt:  # keep the better of the two ends of the search
            f_opt, w_opt = f_fixed, target.w0
    else:
        f_opt, w_opt = f_fixed, target.w0
    return ConversionMetrics(
        fidelity=f_opt,
        fidelity_fixed_waist=f_fixed,
        w0_opt=w_opt,
        t_swg=t_swg,
        eta=f_opt * t_swg,
    )


def fidelity_vs_wavelength(
    design,
    lambdas,
    n: int = 1024,
    pitch: float = 50e-9,
    w0: float = 5e-6,
    z_eval: float = 0.0,
) -> list[tuple[float, ConversionMetrics]]:
    """Conversion metrics of a pillar-grating design across wavelengths.

    For each wavelength the design's dispersion table re-tunes the per-pillar
    phases, a fresh Gaussian input is built, and conversion_metrics is
    evaluated against LG_{0, delta_l} at the same nominal waist.
    """
    from . import swg  # local import; swg builds masks, beams consumes them

    lams = list(lambdas)
    if any(l <= 0.0 for l in lams) or any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError("wavelengths must be positive and increasing")
    layout = swg.generate_layout(design)
    target_l = design.delta_l * design.phase_sign
    results = []
    for lam in lams:
        retuned = swg.retune_layout(design, layout, lam)
        mask = swg.layout_to_mask(retuned, n, pitch, lam)
        field_in = make_gaussian(n, pitch, lam, w0)
        metrics = conversion_metrics(
            field_in, mask, LGIndex(p=0, l=target_l, w0=w0), z_eval=z_eval
        )
        results.append((lam, metrics))
    return results


def save_field(field: ScalarField, path) -> None:
    """Text export: header comments (n, pitch, lambda) then x_m,y_m,re,im rows."""
    ax = field.axis()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={field.n}\n# pitch_m={field.pitch!r}\n# lambda_m={field.lam!r}\n")
        fh.write("x_m,y_m,re,im\n")
        for iy in range(field.n):
            for ix in range(field.n):
                a = field.amps[iy, ix]
                fh.write(f"{float(ax[ix])!r},{float(ax[iy])!r},{float(a.real)!r},{float(a.imag)!r}\n")


def load_field(path) -> ScalarField:
    """Inverse of save_field."""
    meta = {}
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line.startswith("#"):
                key, _, value = line.lstrip("#").strip().partition("=")
                meta[key.strip()] = value.strip()
            elif line and not line.startswith("x_m"):
                rows.append([float(v) for v in line.split(",")])
    n = int(meta["n"])
    data = np.asarray(rows)
    amps = (data[:, 2] + 1j * data[:, 3]).reshape(n, n)
    return ScalarField(n=n, pitch=float(meta["pitch_m"]), lam=float(meta["lambda_m"]), amps=amps)


def save_raster(matrix: np.ndarray, path) -> None:
    """Comma-separated matrix export (one grid row per line), for plotting."""
    with open(path, "w", encoding="utf-8") as fh:
        for row in np.asarray(matrix):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")
