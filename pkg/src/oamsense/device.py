"""Tabulated mechanical-mode data for the torsional OAM sensor.

The physics modules consume effective single-mode parameters (frequency,
effective mass, effective lever arm, quality factor, optomechanical coupling)
of the suspended-pad / nanobeam structure.  Those parameters come from
finite-element sweeps or measurement, so here they are treated purely as
data: loaded from CSV, validated, and linearly interpolated along the
support length ``l_s``.

Datasets are immutable after loading; every record and the dataset itself
are frozen dataclasses, so concurrent readers need no synchronization.

File format (UTF-8, comma separated, ``#`` starts a comment line)::

    l_s_um,w_h_um,l_h_um,branch,omega_m_hz,m_eff_kg,r_eff_m,q_m,g_om_hz_per_m

``omega_m_hz`` and ``g_om_hz_per_m`` are ordinary frequencies; the loader
multiplies them by 2*pi to obtain the angular quantities stored on records.
Leading comment lines are kept as the dataset's provenance note.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

#: Recognised mechanical branch labels.
BRANCHES = ("twist-like", "bounce-like", "hybrid-lower", "hybrid-upper", "see-saw")

HEADER = "l_s_um,w_h_um,l_h_um,branch,omega_m_hz,m_eff_kg,r_eff_m,q_m,g_om_hz_per_m"

# Geometry values not carried by the dataset columns; fixed by the device stack.
DEFAULT_SLOT_WIDTH_NM = 100.0
DEFAULT_THICKNESS_NM = 370.0


class DatasetError(ValueError):
    """Raised for malformed dataset files or invariant violations."""


@dataclass(frozen=True)
class DeviceGeometry:
    """Geometric parameters of one device variant.

    l_s_um, w_h_um, l_h_um are the support length, hanger width and hanger
    length in micrometres; slot_width_nm and thickness_nm are the cavity gap
    and film thickness in nanometres.
    """

    l_s_um: float
    w_h_um: float
    l_h_um: float
    slot_width_nm: float = DEFAULT_SLOT_WIDTH_NM
    thickness_nm: float = DEFAULT_THICKNESS_NM

    def __post_init__(self) -> None:
        for name in ("l_s_um", "w_h_um", "l_h_um", "slot_width_nm", "thickness_nm"):
            if not getattr(self, name) > 0.0:
                raise DatasetError(f"geometry field {name} must be > 0")
        if not self.slot_width_nm < 10.0 * self.thickness_nm:
            raise DatasetError("slot_width_nm must be < 10 * thickness_nm")


@dataclass(frozen=True)
class MechanicalModeRecord:
    """One mechanical branch at one geometry point.

    omega_m is the angular mode frequency (rad/s), m_eff the effective mass
    (kg), r_eff the effective lever arm (m), q_m the mechanical quality
    factor, and g_om the optomechanical coupling (rad/s per metre of
    displacement).
    """

    geometry: DeviceGeometry
    branch: str
    omega_m: float
    m_eff: float
    r_eff: float
    q_m: float
    g_om: float

    def __post_init__(self) -> None:
        if self.branch not in BRANCHES:
            raise DatasetError(
                f"unknown branch {self.branch!r}; expected one of {', '.join(BRANCHES)}"
            )
        for name in ("omega_m", "m_eff", "r_eff", "q_m"):
            if not getattr(self, name) > 0.0:
                raise DatasetError(f"record field {name} must be > 0")
        if self.g_om < 0.0:
            raise DatasetError("record field g_om must be >= 0")


@dataclass(frozen=True)
class DeviceDataset:
    """Validated, immutable collection of mode records.

    Records are kept sorted by (l_s, branch).  Within each branch the l_s
    values are strictly increasing; that interval is the branch's
    interpolation domain.
    """

    records: tuple[MechanicalModeRecord, ...]
    provenance: str = ""

    @classmethod
    def from_records(
        cls, records: Iterable[MechanicalModeRecord], provenance: str = ""
    ) -> "DeviceDataset":
        ordered = tuple(sorted(records, key=lambda r: (r.geometry.l_s_um, r.branch)))
        for branch in {r.branch for r in ordered}:
            ls = [r.geometry.l_s_um for r in ordered if r.branch == branch]
            for a, b in zip(ls, ls[1:]):
                if not a < b:
                    raise DatasetError(
                        f"branch {branch!r}: l_s values must be strictly increasing "
                        f"(found {a} followed by {b})"
                    )
        return cls(records=ordered, provenance=provenance)

    def branches(self) -> tuple[str, ...]:
        seen: list[str] = []
        for r in self.records:
            if r.branch not in seen:
                seen.append(r.branch)
        return tuple(sorted(seen))

    def records_for(self, branch: str) -> tuple[MechanicalModeRecord, ...]:
        recs = tuple(
            sorted(
                (r for r in self.records if r.branch == branch),
                key=lambda r: r.geometry.l_s_um,
            )
        )
        if not recs:
            raise DatasetError(
                f"branch {branch!r} not present; dataset has {', '.join(self.branches())}"
            )
        return recs

    def domain(self, branch: str) -> tuple[float, float]:
        recs = self.records_for(branch)
        return recs[0].geometry.l_s_um, recs[-1].geometry.l_s_um


def _parse_row(fields: Sequence[str], line_no: int) -> MechanicalModeRecord:
    if len(fields) != 9:
        raise DatasetError(f"line {line_no}: expected 9 columns, got {len(fields)}")
    try:
        l_s, w_h, l_h = (float(fields[i]) for i in range(3))
        branch = fields[3].strip()
        omega_hz, m_eff, r_eff, q_m, g_om_hz = (float(fields[i]) for i in range(4, 9))
    except ValueError as exc:
        raise DatasetError(f"line {line_no}: {exc}") from exc
    try:
        geometry = DeviceGeometry(l_s_um=l_s, w_h_um=w_h, l_h_um=l_h)
        return MechanicalModeRecord(
            geometry=geometry,
            branch=branch,
            omega_m=TWO_PI * omega_hz,
            m_eff=m_eff,
            r_eff=r_eff,
            q_m=q_m,
            g_om=TWO_PI * g_om_hz,
        )
    except DatasetError as exc:
        raise DatasetError(f"line {line_no}: {exc}") from exc


def load_dataset(path) -> DeviceDataset:
    """Load and validate a dataset file.

    Raises DatasetError with the offending line number for malformed rows,
    non-positive values, duplicate keys or non-monotone l_s.
    """
    provenance_lines: list[str] = []
    header_seen = False
    records: list[MechanicalModeRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if not header_seen:
                    provenance_lines.append(line.lstrip("#").strip())
                continue
            if not header_seen:
                if line != HEADER:
                    raise DatasetError(
                        f"line {line_no}: bad header; expected {HEADER!r}"
                    )
                header_seen = True
                continue
            records.append(_parse_row(line.split(","), line_no))
    if not header_seen:
        raise DatasetError(f"{path}: empty file (no header row)")
    if not records:
        raise DatasetError(f"{path}: no data rows")
    return DeviceDataset.from_records(records, provenance="\n".join(provenance_lines))


def write_dataset(dataset: DeviceDataset, path) -> None:
    """Write a dataset back to CSV.  write(load(f)) re-parses identically."""
    lines = []
    for note in dataset.provenance.splitlines():
        lines.append(f"# {note}" if note else "#")
    lines.append(HEADER)
    for r in dataset.records:
        g = r.geometry
        lines.append(
            ",".join(
                [
                    repr(g.l_s_um),
                    repr(g.w_h_um),
                    repr(g.l_h_um),
                    r.branch,
                    repr(r.omega_m / TWO_PI),
                    repr(r.m_eff),
                    repr(r.r_eff),
                    repr(r.q_m),
                    repr(r.g_om / TWO_PI),
                ]
            )
        )
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def interpolate(
    dataset: DeviceDataset,
    branch: str,
    l_s_um: float,
    q_m_override: float | None = None,
) -> MechanicalModeRecord:
    """Piecewise-linear interpolation of one branch at support length l_s (um).

    At a tabulated l_s the stored record is reproduced exactly.  q_m_override,
    when given, replaces the interpolated quality factor (run-time override).
    Queries outside the branch domain raise DatasetError.
    """
    recs = dataset.records_for(branch)
    lo, hi = recs[0].geometry.l_s_um, recs[-1].geometry.l_s_um
    if not lo <= l_s_um <= hi:
        raise DatasetError(
            f"l_s = {l_s_um} um outside branch {branch!r} domain [{lo}, {hi}] um"
        )
    ls = np.array([r.geometry.l_s_um for r in recs])
    idx = int(np.searchsorted(ls, l_s_um))
    if idx < len(recs) and ls[idx] == l_s_um:
        hit = recs[idx]
        if q_m_override is None:
            return hit
        return MechanicalModeRecord(
            geometry=hit.geometry,
            branch=hit.branch,
            omega_m=hit.omega_m,
            m_eff=hit.m_eff,
            r_eff=hit.r_eff,
            q_m=q_m_override,
            g_om=hit.g_om,
        )

    def field(get) -> float:
        return float(np.interp(l_s_um, ls, np.array([get(r) for r in recs])))

    geometry = DeviceGeometry(
        l_s_um=l_s_um,
        w_h_um=field(lambda r: r.geometry.w_h_um),
        l_h_um=field(lambda r: r.geometry.l_h_um),
        slot_width_nm=recs[0].geometry.slot_width_nm,
        thickness_nm=recs[0].geometry.thickness_nm,
    )
    q_m = q_m_override if q_m_override is not None else field(lambda r: r.q_m)
    return MechanicalModeRecord(
        geometry=geometry,
        branch=branch,
        omega_m=field(lambda r: r.omega_m),
        m_eff=field(lambda r: r.m_eff),
        r_eff=field(lambda r: r.r_eff),
        q_m=q_m,
        g_om=field(lambda r: r.g_om),
    )


def sample_dataset_path():
    """Path of the bundled illustrative device dataset."""
    return resources.files("oamsense").joinpath("data/sample_device.csv")


def load_sample_dataset() -> DeviceDataset:
    return load_dataset(sample_dataset_path())


def sample_anticrossing_path():
    """Path of the bundled synthetic mode-crossing table (for coupling fits)."""
    return resources.files("oamsense").joinpath("data/sample_anticrossing.csv")
