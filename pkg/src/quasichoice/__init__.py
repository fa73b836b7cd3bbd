"""Choice rules built from chains of majority relations over arbitrary reflexive preferences."""

from .axioms import (
    AxiomReport,
    Scope,
    check_choice_consistency,
    check_immunity,
    check_pareto,
    check_PR,
    check_ratio_rule_pairs,
    check_sNNR,
    check_triangle,
    ratio_functions,
    run_axiom,
)
from .generators import random_profile
from .majority import (
    MajorityType,
    build_chain,
    critical_strengths,
    majority_relation,
    parse_chain,
    verify_inclusions,
)
from .profile_io import parse_profile, read_profile, serialize_profile, write_profile
from .profiles import PerturbationStep, Profile, all_components, quotient, tally
from .relations import (
    NotNestedError,
    Relation,
    classify,
    common_optimals,
    decompose_quasiorder,
    optimal_elements,
    top_cycle,
    transitive_hull,
)
from .rules import (
    RuleSpec,
    base_choice,
    compile_rule,
    evaluate,
    modify_C,
    modify_CC,
    modify_GC,
    modify_Id,
    parse_rule,
    phi_step,
    smallest_component,
)
from .simulation import ExperimentSpec, run_experiment, write_csv

__version__ = "0.1.0"
