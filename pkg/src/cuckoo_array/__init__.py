"""Cuckoo-search amplitude synthesis of low-sidelobe planar antenna arrays."""

from .array_model import (
    AngleConvention,
    ArrayGeometry,
    CutEvaluator,
    Direction,
    ExcitationMatrix,
    LobeInterval,
    PatternCut,
    compute_sll,
    default_theta_grid,
    evaluate_array_factor,
    evaluate_cut,
    locate_main_lobe,
)
from .cuckoo import (
    Bounds,
    CsaConfig,
    Nest,
    RunResult,
    init_population,
    levy_step,
    propose_cuckoo,
    run_csa,
    step_iteration,
)
from .errors import (
    ContractViolation,
    DegenerateExcitationError,
    NoSidelobeRegionError,
    ObjectiveEvaluationError,
)
from .synthesis import (
    SynthesisResult,
    SynthesisSpec,
    build_objective,
    decision_dimension,
    expand_excitation,
    synthesize,
)

__version__ = "0.1.0"
