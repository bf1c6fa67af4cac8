"""Pillar-grating layout for transmissive OAM conversion.

A circular aperture is filled with a hexagonal lattice of high-index pillars.
The pillar diameter sets the local transmission phase (through the effective
refractive index), so stepping the diameter with azimuth imprints a spiral
phase exp(i delta_l phi) on a transmitted beam.  The diameter -> (phase,
amplitude) relation is a replaceable lookup table; the bundled default is a
linear 11-level ramp spanning [0, 2 pi * 10/11] at the design wavelength with
a uniform amplitude matching a 0.92 power transmission.

Layout generation is pure and deterministic: one lattice vector points along
+x, a pillar sits at the origin, and sites are emitted in (y, x) raster
order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.spatial import cKDTree

TWO_PI = 2.0 * math.pi

DEFAULT_DIAMETERS = tuple(float(d) for d in range(110, 211, 10))  # nm, 11 steps
DEFAULT_T_SWG = 0.92
LOOKUP_LAMBDA_RANGE = (700e-9, 1000e-9)

LAYOUT_HEADER = "x_m,y_m,diameter_nm,phase_rad,amplitude"


@dataclass(frozen=True)
class SWGLookup:
    """Tabulated per-diameter transmission phase and amplitude vs wavelength."""

    wavelengths: tuple[float, ...]
    phases: tuple[tuple[float, ...], ...]      # [wavelength][diameter], rad
    amplitudes: tuple[tuple[float, ...], ...]  # [wavelength][diameter], in [0, 1]

    def phase_amp_at(self, lam: float) -> tuple[np.ndarray, np.ndarray]:
        """Linear interpolation of the table at wavelength lam (m)."""
        w = np.asarray(self.wavelengths)
        if not w[0] <= lam <= w[-1]:
            raise ValueError(
                f"wavelength {lam} outside lookup range [{w[0]}, {w[-1]}] m"
            )
        phases = np.asarray(self.phases)
        amps = np.asarray(self.amplitudes)
        out_p = np.array([np.interp(lam, w, phases[:, j]) for j in range(phases.shape[1])])
        out_a = np.array([np.interp(lam, w, amps[:, j]) for j in range(amps.shape[1])])
        return out_p, out_a


def default_lookup(design_lambda: float = 840e-9, n_diameters: int = 11) -> SWGLookup:
    """Effective-medium stand-in table over 700-1000 nm.

    At the design wavelength the phases ramp linearly over the diameters,
    spanning exactly [0, 2 pi (1 - 1/n)] (endpoint-exclusive full circle);
    the amplitude is uniform sqrt(0.92).  The ramp span disperses linearly
    with wavelength, span(lam) = span0 * (2 - lam / design_lambda).
    """
    lo, hi = LOOKUP_LAMBDA_RANGE
    if not lo <= design_lambda <= hi:
        raise ValueError(f"design wavelength must lie in [{lo}, {hi}] m")
    span0 = TWO_PI * (n_diameters - 1) / n_diameters
    amp = math.sqrt(DEFAULT_T_SWG)
    wavelengths = [lo + 20e-9 * k for k in range(16)]  # 700..1000 nm step 20
    if design_lambda not in wavelengths:
        wavelengths = sorted(wavelengths + [design_lambda])
    phases = []
    amplitudes = []
    for lam in wavelengths:
        span = span0 * (2.0 - lam / design_lambda)
        phases.append(tuple(np.linspace(0.0, span, n_diameters)))
        amplitudes.append((amp,) * n_diameters)
    return SWGLookup(
        wavelengths=tuple(wavelengths),
        phases=tuple(phases),
        amplitudes=tuple(amplitudes),
    )


@dataclass(frozen=True)
class SWGDesign:
    """Grating design: aperture diameter, lattice constant, pillar thickness,
    the available diameters, the target OAM shift and the lookup table.

    phase_sign flips the direction in which phase grows with diameter,
    turning a +delta_l design into -delta_l.
    """

    aperture_d: float = 20e-6
    lattice_a: float = 360e-9
    pillar_t: float = 450e-9
    diameters: tuple[float, ...] = DEFAULT_DIAMETERS  # nanometres (file unit)
    delta_l: int = 1
    design_lambda: float = 840e-9
    lookup: SWGLookup = field(default=None)  # type: ignore[assignment]
    phase_sign: int = 1

    def __post_init__(self) -> None:
        if self.lookup is None:
            object.__setattr__(
                self, "lookup", default_lookup(self.design_lambda, len(self.diameters))
            )
        if not (self.aperture_d > 0.0 and self.lattice_a > 0.0 and self.pillar_t > 0.0):
            raise ValueError("aperture_d, lattice_a and pillar_t must be > 0")
        d = np.asarray(self.diameters)
        if np.any(np.diff(d) <= 0.0):
            raise ValueError("diameters must be strictly increasing")
        if np.any(d * 1e-9 >= self.lattice_a):
            raise ValueError("every diameter must be smaller than the lattice constant")
        if self.phase_sign not in (-1, 1):
            raise ValueError("phase_sign must be +1 or -1")
        phases, _ = self.lookup.phase_amp_at(self.design_lambda)
        if len(phases) != len(self.diameters):
            raise ValueError("lookup must tabulate one entry per diameter")
        span = float(np.max(phases) - np.min(phases))
        min_span = TWO_PI * (1.0 - 1.0 / len(phases))
        if span < min_span - 1e-9:
            raise ValueError(
                f"lookup phase span {span:.3f} rad below required {min_span:.3f} rad"
            )


@dataclass(frozen=True)
class PillarSite:
    """One pillar: position (m), diameter (nm), transmission phase (rad) and
    amplitude at the wavelength the layout was evaluated for."""

    x: float
    y: float
    diameter: float  # nm
    phase: float
    amplitude: float


def _nearest_level(targets: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Index of the circularly nearest phase level for each target phase."""
    diff = np.abs(targets[:, None] - levels[None, :]) % TWO_PI
    diff = np.minimum(diff, TWO_PI - diff)
    return np.argmin(diff, axis=1)


def generate_layout(design: SWGDesign) -> list[PillarSite]:
    """Hexagonal lattice clipped to the aperture, one pillar per site.

    Each site's target phase wrap(phase_sign * delta_l * azimuth) is
    quantized to the circularly nearest lookup level (error <= pi/n_levels);
    the pillar diameter and amplitude follow from that level.  Sites whose
    centres fall inside the aperture are kept, ordered by (y, x).
    """
    a = design.lattice_a
    radius = design.aperture_d / 2.0
    # row spacing is a sqrt(3)/2, and the skewed coordinate i + j/2 must span
    # the full disk on every row, so both index windows are widened
    mi = int(radius / a) + 2
    mj = int(radius / (a * math.sqrt(3.0) / 2.0)) + 2
    span = mi + (mj + 1) // 2 + 1
    jj, ii = np.meshgrid(np.arange(-mj, mj + 1), np.arange(-span, span + 1), indexing="ij")
    # lattice vectors a1 = a (1, 0), a2 = a (1/2, sqrt(3)/2)
    xs = a * (ii + 0.5 * jj).ravel()
    ys = a * (math.sqrt(3.0) / 2.0) * jj.ravel()
    inside = xs**2 + ys**2 <= radius**2
    xs, ys = xs[inside], ys[inside]

    phases, amps = design.lookup.phase_amp_at(design.design_lambda)
    levels = np.mod(np.asarray(phases), TWO_PI)
    target = np.mod(design.phase_sign * design.delta_l * np.arctan2(ys, xs), TWO_PI)
    idx = _nearest_level(target, levels)

    order = np.lexsort((xs, ys))
    diameters = np.asarray(design.diameters)
    return [
        PillarSite(
            x=float(xs[k]),
            y=float(ys[k]),
            diameter=float(diameters[idx[k]]),
            phase=float(phases[idx[k]]),
            amplitude=float(amps[idx[k]]),
        )
        for k in order
    ]


def retune_layout(design: SWGDesign, layout: list[PillarSite], lam: float) -> list[PillarSite]:
    """Re-evaluate per-site phase/amplitude at another wavelength.

    Pillar positions and diameters are fabrication-fixed; only the lookup
    values change.  Swapping in a measured lookup table changes nothing else.
    """
    phases, amps = design.lookup.phase_amp_at(lam)
    diameters = np.asarray(design.diameters)
    index = {round(d * 1e3): j for j, d in enumerate(diameters)}
    out = []
    for site in layout:
        j = index[round(site.diameter * 1e3)]
        out.append(replace(site, phase=float(phases[j]), amplitude=float(amps[j])))
    return out


def layout_to_mask(layout: list[PillarSite], n: int, pitch: float, lam: float | None = None) -> np.ndarray:
    """Rasterize a layout to a complex transmission mask for the beam engine.

    Every grid pixel inside the pattern footprint takes the phase and
    amplitude of its nearest pillar (piecewise-constant cells); pixels
    outside are zero.  The grid must resolve the lattice: pitch <= lattice/4.
    lam is informational; re-tune the layout first for other wavelengths.
    """
    if not layout:
        raise ValueError("empty layout")
    pos = np.array([(s.x, s.y) for s in layout])
    tree = cKDTree(pos)
    # lattice constant recovered from the nearest-neighbour spacing
    dists, _ = tree.query(pos[len(pos) // 2], k=2)
    lattice = float(dists[1])
    if pitch > lattice / 4.0:
        raise ValueError(
            f"pitch {pitch} too coarse: must be <= lattice/4 = {lattice / 4.0}"
        )
    x = (np.arange(n) - n // 2) * pitch
    xx, yy = np.meshgrid(x, x, indexing="xy")
    r_sites = np.sqrt(np.sum(pos**2, axis=1))
    footprint = float(np.max(r_sites)) + lattice / 2.0
    inside = (xx**2 + yy**2) <= footprint**2
    mask = np.zeros((n, n), dtype=np.complex128)
    pts = np.column_stack([xx[inside], yy[inside]])
    _, nearest = tree.query(pts, k=1)
    values = np.array([s.amplitude * np.exp(1j * s.phase) for s in layout])
    mask[inside] = values[nearest]
    return mask


def export_layout(layout: list[PillarSite], path) -> None:
    """CSV dump in (y, x) raster order: x_m,y_m,diameter_nm,phase_rad,amplitude."""
    ordered = sorted(layout, key=lambda s: (s.y, s.x))
    lines = [LAYOUT_HEADER]
    for s in ordered:
        lines.append(
            ",".join(
                [repr(s.x), repr(s.y), repr(s.diameter), repr(s.phase), repr(s.amplitude)]
            )
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_layout(path) -> list[PillarSite]:
    """Inverse of export_layout."""
    sites = []
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != LAYOUT_HEADER:
            raise ValueError(f"bad layout header; expected {LAYOUT_HEADER!r}")
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            x, y, d_nm, phase, amp = (float(v) for v in line.split(","))
            sites.append(PillarSite(x=x, y=y, diameter=d_nm, phase=phase, amplitude=amp))
    return sites


def expected_site_count(design: SWGDesign) -> float:
    """Area-density estimate: aperture area over the hexagonal cell area."""
    radius = design.aperture_d / 2.0
    cell = (math.sqrt(3.0) / 2.0) * design.lattice_a**2
    return math.pi * radius**2 / cell
