"""Stable three-party matching: solvers, approximations, generators, and
hardness-style instance constructions.

The library covers two stability-counting problems -- three-gender stable
marriage (3GSM) and three-person stable assignment (3PSA) -- plus
three-dimensional matching (3DM) and the instance constructions linking
bounded-occurrence SAT to all of them.
"""

from .approx import (
    ASA_QUADRATIC_SLACK,
    amsm,
    amsm_detailed,
    amsm_instability_bound,
    asa,
    asa_detailed,
    asa_instability_bound,
    gsm_step_floor,
    psa_stable_set_size,
    psa_step_floor,
    stable_set_size,
)
from .core import (
    DOGS,
    DmInstance,
    GsmInstance,
    Marriage,
    Matching,
    MEN,
    PsaInstance,
    StabilityReport,
    Submarriage,
    Submatching,
    WOMEN,
    build_dm_instance,
    build_gsm_instance,
    build_matching,
    build_psa_instance,
    build_submarriage,
    build_submatching,
    dm_check_matching,
    dm_uncovered_count,
    marriage_from_permutations,
    pair_index,
    pair_members,
    prefers,
    read_instance,
    read_solution,
    write_instance,
    write_solution,
)
from .errors import (
    InstanceTooLarge,
    SolverTimeout,
    TristableError,
    ValidationError,
)
from .exact import max_3dm, msm_opt, mss_opt, psa_opt
from .generators import (
    embed_3dm,
    gen_adversarial,
    gen_gadget2,
    gen_planted_dm,
    gen_random,
    gen_random_psa,
    lift_gsm_to_psa,
    lift_marriage_to_matching,
    witness_marriage,
)
from .reductions import (
    SatBFormula,
    assignment_to_matching,
    build_satb_formula,
    decode_matching_to_assignment,
    enumerate_small_formulas,
    max_satisfiable,
    sat_to_3dm3,
    symmetrize_matching,
)
from .stability import (
    is_unstable_triple_gsm,
    is_unstable_triple_psa,
    stability_report_gsm,
    stability_report_psa,
)

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
