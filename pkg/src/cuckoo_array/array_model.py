"""Planar array factor, pattern cuts, main-lobe bracketing and side lobe level.

Elements sit on a regular ``M x N`` grid in the x-y plane with spacings given
in wavelengths. Elements are isotropic and all feed phases are zero, so the
pattern is fully determined by the amplitude grid.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, DegenerateExcitationError, NoSidelobeRegionError

DB_FLOOR = -120.0
"""Normalized samples below this level are clamped (exact nulls would be -inf)."""

DEFAULT_GRID_POINTS = 1801


class AngleConvention(str, enum.Enum):
    """How the polar angle enters the inter-element phase.

    ``BROADSIDE_AT_90`` uses ``cos(theta)`` so an in-phase array peaks at
    theta = 90 deg. ``PAPER_LITERAL`` uses ``sin(theta)`` and peaks at 0 deg.
    """

    BROADSIDE_AT_90 = "broadside90"
    PAPER_LITERAL = "literal"


@dataclass(frozen=True)
class ArrayGeometry:
    m_count: int
    n_count: int
    dx_wavelengths: float = 0.5
    dy_wavelengths: float = 0.5

    def __post_init__(self):
        for name in ("m_count", "n_count"):
            value = getattr(self, name)
            if isinstance(value, bool) or int(value) != value or value < 1:
                raise ContractViolation(f"{name} must be a positive integer, got {value!r}")
            object.__setattr__(self, name, int(value))
        for name in ("dx_wavelengths", "dy_wavelengths"):
            value = float(getattr(self, name))
            if not np.isfinite(value) or value <= 0:
                raise ContractViolation(f"{name} must be positive, got {value!r}")
            object.__setattr__(self, name, value)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.m_count, self.n_count)


@dataclass(frozen=True, eq=False)
class ExcitationMatrix:
    """Non-negative element amplitudes, row index along x and column along y."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=float)
        if a.ndim != 2 or a.size == 0:
            raise ContractViolation(f"amplitudes must be a non-empty 2-D grid, got shape {a.shape}")
        if not np.all(np.isfinite(a)) or np.any(a < 0):
            raise ContractViolation("amplitudes must be finite and non-negative")
        if not np.any(a > 0):
            raise DegenerateExcitationError("all amplitudes are zero")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def uniform(cls, geometry: ArrayGeometry, value: float = 1.0) -> "ExcitationMatrix":
        return cls(np.full(geometry.shape, float(value)))

    @property
    def shape(self) -> tuple[int, int]:
        return self.amplitudes.shape

    def __eq__(self, other):
        if not isinstance(other, ExcitationMatrix):
            return NotImplemented
        return np.array_equal(self.amplitudes, other.amplitudes)


@dataclass(frozen=True)
class Direction:
    theta_deg: float
    phi_deg: float = 0.0

    def __post_init__(self):
        theta = float(self.theta_deg)
        if not 0.0 <= theta <= 180.0:
            raise ContractViolation(f"theta_deg must lie in [0, 180], got {theta}")
        object.__setattr__(self, "theta_deg", theta)
        object.__setattr__(self, "phi_deg", float(self.phi_deg) % 360.0)


@dataclass(frozen=True, eq=False)
class PatternCut:
    """Peak-normalized pattern samples (dB) along a fixed azimuth plane."""

    phi_deg: float
    theta_deg: np.ndarray
    magnitude_db: np.ndarray

    def __post_init__(self):
        theta = _check_grid(self.theta_deg)
        db = np.array(self.magnitude_db, dtype=float)
        if db.shape != theta.shape:
            raise ContractViolation(
                f"magnitude_db has {db.size} samples but the grid has {theta.size}"
            )
        theta.setflags(write=False)
        db.setflags(write=False)
        object.__setattr__(self, "theta_deg", theta)
        object.__setattr__(self, "magnitude_db", db)

    def __len__(self):
        return self.theta_deg.size


@dataclass(frozen=True)
class LobeInterval:
    theta_low_deg: float
    theta_high_deg: float

    def __post_init__(self):
        if not self.theta_low_deg < self.theta_high_deg:
            raise ContractViolation(
                f"empty lobe interval [{self.theta_low_deg}, {self.theta_high_deg}]"
            )

    def contains(self, theta_deg: float) -> bool:
        return self.theta_low_deg <= theta_deg <= self.theta_high_deg

    @property
    def width_deg(self) -> float:
        return self.theta_high_deg - self.theta_low_deg


def default_theta_grid(points: int = DEFAULT_GRID_POINTS, start: float = 0.0,
                       stop: float = 180.0) -> np.ndarray:
    return np.linspace(start, stop, points)


def _check_grid(theta_grid) -> np.ndarray:
    theta = np.array(theta_grid, dtype=float)
    if theta.ndim != 1 or theta.size < 3:
        raise ContractViolation("theta grid needs at least 3 samples")
    if not np.all(np.isfinite(theta)) or theta[0] < 0.0 or theta[-1] > 180.0:
        raise ContractViolation("theta grid must lie within [0, 180] degrees")
    if np.any(np.diff(theta) <= 0):
        raise ContractViolation("theta grid must be strictly increasing")
    return theta


def _check_dims(geometry: ArrayGeometry, excitation: ExcitationMatrix):
    if excitation.shape != geometry.shape:
        raise ContractViolation(
            f"excitation is {excitation.shape[0]}x{excitation.shape[1]} but geometry "
            f"is {geometry.m_count}x{geometry.n_count}"
        )


def _direction_cosine(theta_deg, convention: AngleConvention):
    # sin(90 - theta) is exactly zero at broadside and odd about it, unlike cos(theta)
    if AngleConvention(convention) is AngleConvention.BROADSIDE_AT_90:
        return np.sin(np.radians(90.0 - theta_deg))
    return np.sin(np.radians(theta_deg))


def evaluate_array_factor(geometry: ArrayGeometry, excitation: ExcitationMatrix,
                          direction: Direction,
                          convention: AngleConvention = AngleConvention.BROADSIDE_AT_90) -> complex:
    """Complex array factor in one direction, phase referenced to element (1, 1)."""
    _check_dims(geometry, excitation)
    phi = np.radians(direction.phi_deg)
    s = _direction_cosine(direction.theta_deg, convention)
    kx_dx = 2.0 * np.pi * geometry.dx_wavelengths * s * np.cos(phi)
    ky_dy = 2.0 * np.pi * geometry.dy_wavelengths * s * np.sin(phi)
    ex = np.exp(1j * kx_dx * np.arange(geometry.m_count))
    ey = np.exp(1j * ky_dy * np.arange(geometry.n_count))
    return complex(ex @ excitation.amplitudes @ ey)


@dataclass(frozen=True, eq=False)
class CutEvaluator:
    """Precomputed steering matrices for repeated cuts of one geometry and plane.

    Element indices are centred on the array so symmetric excitations give a
    real-valued factor; magnitudes are identical to the corner-referenced form.
    """

    geometry: ArrayGeometry
    phi_deg: float
    theta_deg: np.ndarray
    convention: AngleConvention = AngleConvention.BROADSIDE_AT_90
    _ex: np.ndarray = field(init=False, repr=False)
    _ey: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        theta = _check_grid(self.theta_deg)
        theta.setflags(write=False)
        object.__setattr__(self, "theta_deg", theta)
        object.__setattr__(self, "convention", AngleConvention(self.convention))
        phi = np.radians(float(self.phi_deg) % 360.0)
        s = _direction_cosine(theta, self.convention)
        if self.convention is AngleConvention.BROADSIDE_AT_90 and \
                np.allclose(theta + theta[::-1], 180.0, rtol=0.0, atol=1e-9):
            # mirrored grid points differ by an ulp; make the cosine exactly odd about 90 deg
            s = 0.5 * (s - s[::-1])
        g = self.geometry
        m = np.arange(g.m_count) - (g.m_count - 1) / 2.0
        n = np.arange(g.n_count) - (g.n_count - 1) / 2.0
        ax = 2.0 * np.pi * g.dx_wavelengths * np.cos(phi) * s
        ay = 2.0 * np.pi * g.dy_wavelengths * np.sin(phi) * s
        object.__setattr__(self, "_ex", np.exp(1j * np.outer(ax, m)))
        object.__setattr__(self, "_ey", np.exp(1j * np.outer(ay, n)))

    def magnitude(self, amplitudes: np.ndarray) -> np.ndarray:
        """|AF| on the grid for a raw amplitude array (no validation)."""
        return np.abs(np.einsum("tm,tm->t", self._ex @ amplitudes, self._ey))

    def cut(self, excitation: ExcitationMatrix) -> PatternCut:
        _check_dims(self.geometry, excitation)
        return PatternCut(float(self.phi_deg), self.theta_deg,
                          to_normalized_db(self.magnitude(excitation.amplitudes)))


def to_normalized_db(magnitude: np.ndarray) -> np.ndarray:
    peak = magnitude.max()
    if not peak > 0:
        raise DegenerateExcitationError("pattern is identically zero on the grid")
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(magnitude / peak)
    return np.maximum(db, DB_FLOOR)


def evaluate_cut(geometry: ArrayGeometry, excitation: ExcitationMatrix, phi_deg: float,
                 theta_grid=None,
                 convention: AngleConvention = AngleConvention.BROADSIDE_AT_90) -> PatternCut:
    if theta_grid is None:
        theta_grid = default_theta_grid()
    return CutEvaluator(geometry, phi_deg, theta_grid, convention).cut(excitation)


def locate_main_lobe(cut: PatternCut) -> LobeInterval:
    """Bracket the global peak by the first local minimum on each side.

    A side without an interior minimum extends to the grid edge. Among
    equal peak samples the one nearest the grid centre wins.
    """
    db = cut.magnitude_db
    if db.size < 3:
        raise ContractViolation("cut needs at least 3 samples")
    peaks = np.flatnonzero(db == db.max())
    centre = (db.size - 1) / 2.0
    i = int(peaks[np.argmin(np.abs(peaks - centre))])
    lo = i
    while lo > 0 and db[lo - 1] <= db[lo]:
        lo -= 1
    hi = i
    while hi < db.size - 1 and db[hi + 1] <= db[hi]:
        hi += 1
    return LobeInterval(float(cut.theta_deg[lo]), float(cut.theta_deg[hi]))


def compute_sll(cut: PatternCut, lobe: LobeInterval) -> float:
    """Highest sample strictly outside the main lobe, in dB relative to the peak."""
    theta = cut.theta_deg
    if lobe.theta_low_deg < theta[0] or lobe.theta_high_deg > theta[-1]:
        raise ContractViolation("lobe interval extends beyond the cut grid")
    outside = (theta < lobe.theta_low_deg) | (theta > lobe.theta_high_deg)
    if not outside.any():
        raise NoSidelobeRegionError("main lobe spans the whole grid; no side lobes to measure")
    return float(cut.magnitude_db[outside].max())
