"""Computational toolkit for Wiener norms of indicator functions on finite
Abelian groups: Fourier analysis, Bohr sets, physical-space structure,
local Chang covers, and a certified iteration giving lower bounds."""

__version__ = "0.1.0"

from .bohr import (
    BohrSet,
    CutoffMeasure,
    RegularityConfig,
    StabilizedPair,
    approx_annihilator_dual,
    bohr_set,
    cutoff,
    is_regular,
    measure_profile,
    regular_delta,
    smoothing_defect,
    stabilized_pair,
    subgroup_chain,
    translation_defect,
)
from .certificate import CheckReport, check_certificate, lower_bound_from_certificate
from .chang import ChangCover, LargeSpectrum, is_dissociated, large_spectrum, local_chang_cover
from .config import IterationConfig
from .errors import *  # noqa: F401,F403
from .fourier import (
    Measure,
    a_norm,
    convolve,
    convolve_measure,
    dft,
    idft,
    indicator,
    local_norm,
    local_transform,
    oscillation_on_bohr_translates,
    spectral_truncation,
)
from .groups import (
    CharacterSet,
    GroupSpec,
    Subgroup,
    annihilator,
    char_eval,
    fractional_obstruction,
    generated_subgroup,
    parse_group_spec,
)
from .iteration import IterationResult, NormEvidence, StepOutput, iteration_step, run_iteration
from .search import brute_force_min_anorm, scan
from .structure import (
    CohenVerdict,
    CosetStructure,
    IvtWitness,
    PhysicalEstimate,
    SplitCoset,
    cohen_verdict,
    coset_structure,
    discrete_ivt,
    physical_estimate,
    split_coset,
)
