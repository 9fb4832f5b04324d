"""Side-lobe-level objective over element amplitudes and single synthesis runs."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .array_model import (
    DEFAULT_GRID_POINTS,
    AngleConvention,
    ArrayGeometry,
    CutEvaluator,
    ExcitationMatrix,
    LobeInterval,
    PatternCut,
    compute_sll,
    locate_main_lobe,
    to_normalized_db,
)
from .cuckoo import Bounds, CsaConfig, RunResult, run_csa
from .errors import ContractViolation, DegenerateExcitationError, NoSidelobeRegionError

SENTINEL_DB = 1000.0
"""Objective value for candidates whose pattern has no measurable side lobes."""

SYMMETRIES = ("none", "quadrant")


@dataclass(frozen=True)
class SynthesisSpec:
    """Everything needed to reproduce one synthesis run.

    ``lobe_window`` optionally confines the main lobe: each degree by which
    the lobe edges fall outside ``[low, high]`` adds ``lobe_penalty_db_per_deg``
    to the objective. Without it the side lobe level is minimized with no
    limit on beam broadening.
    """

    geometry: ArrayGeometry = field(default_factory=lambda: ArrayGeometry(11, 11))
    cut_phi_deg: float = 0.0
    theta_points: int = DEFAULT_GRID_POINTS
    theta_range: tuple[float, float] = (0.0, 180.0)
    convention: AngleConvention = AngleConvention.BROADSIDE_AT_90
    symmetry: str = "quadrant"
    taper_monotone: bool = False
    amplitude_bounds: tuple[float, float] = (0.0, 1.0)
    lobe_window: tuple[float, float] | None = None
    lobe_penalty_db_per_deg: float = 10.0
    csa: CsaConfig = field(default_factory=CsaConfig)

    def __post_init__(self):
        if self.symmetry not in SYMMETRIES:
            raise ContractViolation(f"symmetry must be one of {SYMMETRIES}, got {self.symmetry!r}")
        object.__setattr__(self, "convention", AngleConvention(self.convention))
        lo, hi = (float(v) for v in self.amplitude_bounds)
        if not 0.0 <= lo < hi:
            raise ContractViolation(f"amplitude bounds need 0 <= lower < upper, got {self.amplitude_bounds}")
        object.__setattr__(self, "amplitude_bounds", (lo, hi))
        t0, t1 = (float(v) for v in self.theta_range)
        if not 0.0 <= t0 < t1 <= 180.0:
            raise ContractViolation(f"theta_range must satisfy 0 <= start < stop <= 180, got {self.theta_range}")
        object.__setattr__(self, "theta_range", (t0, t1))
        if int(self.theta_points) != self.theta_points or self.theta_points < 3:
            raise ContractViolation("theta_points must be an integer >= 3")
        object.__setattr__(self, "theta_points", int(self.theta_points))
        if self.lobe_window is not None:
            w0, w1 = (float(v) for v in self.lobe_window)
            if not w0 < w1:
                raise ContractViolation(f"lobe_window needs low < high, got {self.lobe_window}")
            object.__setattr__(self, "lobe_window", (w0, w1))
        if not self.lobe_penalty_db_per_deg >= 0:
            raise ContractViolation("lobe_penalty_db_per_deg must be non-negative")

    @property
    def theta_grid(self) -> np.ndarray:
        return np.linspace(self.theta_range[0], self.theta_range[1], self.theta_points)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["convention"] = self.convention.value
        d["amplitude_bounds"] = list(self.amplitude_bounds)
        d["theta_range"] = list(self.theta_range)
        d["lobe_window"] = None if self.lobe_window is None else list(self.lobe_window)
        return d


@dataclass
class SynthesisResult:
    spec: SynthesisSpec
    best_excitation: ExcitationMatrix
    sll_db: float
    main_lobe: LobeInterval
    run: RunResult
    cut: PatternCut

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "seed": self.spec.csa.seed,
            "sll_db": self.sll_db,
            "main_lobe_deg": [self.main_lobe.theta_low_deg, self.main_lobe.theta_high_deg],
            "best_excitation": self.best_excitation.amplitudes.tolist(),
            "run": self.run.to_dict(),
        }


def decision_dimension(spec: SynthesisSpec) -> int:
    m, n = spec.geometry.shape
    if spec.symmetry == "quadrant":
        return math.ceil(m / 2) * math.ceil(n / 2)
    return m * n


def _fold_index(count: int) -> np.ndarray:
    # distance (in elements) from the array centre, 0 for the central element(s)
    return np.floor(np.abs(np.arange(count) - (count - 1) / 2.0)).astype(int)


def _outward_cummin(a: np.ndarray, axis: int) -> np.ndarray:
    a = np.moveaxis(np.array(a, dtype=float), axis, 0)
    count = a.shape[0]
    upper = count // 2
    lower = (count - 1) // 2
    out = a.copy()
    out[upper:] = np.minimum.accumulate(a[upper:], axis=0)
    out[:lower + 1] = np.minimum.accumulate(a[lower::-1], axis=0)[::-1]
    return np.moveaxis(out, 0, axis)


def expand_amplitudes(vector, spec: SynthesisSpec) -> np.ndarray:
    """Decision vector to a raw ``M x N`` amplitude array (no validation of sign)."""
    x = np.asarray(vector, dtype=float).reshape(-1)
    dim = decision_dimension(spec)
    if x.size != dim:
        raise ContractViolation(f"decision vector has length {x.size}, expected {dim}")
    m, n = spec.geometry.shape
    if spec.symmetry == "quadrant":
        quad = x.reshape(math.ceil(m / 2), math.ceil(n / 2))
        if spec.taper_monotone:
            # the quadrant is stored centre-outward, so a plain running minimum suffices
            quad = np.minimum.accumulate(np.minimum.accumulate(quad, axis=0), axis=1)
        return quad[np.ix_(_fold_index(m), _fold_index(n))]
    full = x.reshape(m, n)
    if spec.taper_monotone:
        full = _outward_cummin(_outward_cummin(full, 0), 1)
    return full


def expand_excitation(vector, spec: SynthesisSpec) -> ExcitationMatrix:
    return ExcitationMatrix(expand_amplitudes(vector, spec))


def lobe_violation_deg(lobe: LobeInterval, window: tuple[float, float] | None) -> float:
    if window is None:
        return 0.0
    return max(0.0, window[0] - lobe.theta_low_deg) + max(0.0, lobe.theta_high_deg - window[1])


class SllObjective:
    """Side lobe level (dB) of the configured cut as a function of the decision vector.

    Pure and thread-safe: the steering matrices are built once and only read.
    """

    def __init__(self, spec: SynthesisSpec):
        self.spec = spec
        self.evaluator = CutEvaluator(spec.geometry, spec.cut_phi_deg, spec.theta_grid,
                                      spec.convention)

    def measure(self, vector) -> tuple[float, LobeInterval, PatternCut]:
        amplitudes = expand_amplitudes(vector, self.spec)
        if not np.any(amplitudes > 0):
            raise DegenerateExcitationError("all amplitudes are zero")
        cut = PatternCut(self.spec.cut_phi_deg, self.evaluator.theta_deg,
                         to_normalized_db(self.evaluator.magnitude(amplitudes)))
        lobe = locate_main_lobe(cut)
        return compute_sll(cut, lobe), lobe, cut

    def __call__(self, vector) -> float:
        try:
            sll, lobe, _ = self.measure(vector)
        except (DegenerateExcitationError, NoSidelobeRegionError):
            return SENTINEL_DB
        return sll + self.spec.lobe_penalty_db_per_deg * lobe_violation_deg(lobe, self.spec.lobe_window)


def build_objective(spec: SynthesisSpec) -> SllObjective:
    return SllObjective(spec)


def synthesize(spec: SynthesisSpec, workers: int = 1) -> SynthesisResult:
    objective = build_objective(spec)
    lo, hi = spec.amplitude_bounds
    run = run_csa(spec.csa, Bounds.box(lo, hi, decision_dimension(spec)), objective,
                  workers=workers)
    excitation = expand_excitation(run.best_position, spec)
    cut = objective.evaluator.cut(excitation)
    lobe = locate_main_lobe(cut)
    return SynthesisResult(spec, excitation, compute_sll(cut, lobe), lobe, run, cut)
