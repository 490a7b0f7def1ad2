"""Actual-cause analysis for modal-logic effects over labeled transition
systems, with causal projections and compositional-law verification."""

from .causality import (
    Classification,
    CauseReport,
    CauseSet,
    ConditionReport,
    Exactness,
    causal_projection,
    cause_candidate,
    causes,
    classify_word,
    default_bound,
    exploration_is_exact,
    extension_universe,
    oracle_check_cause,
    oracle_check_details,
)
from .composition import (
    CrossCheckReport,
    PreconditionReport,
    TheoremReport,
    check_preconditions,
    cross_check_disjunction_lifting,
    cross_check_single_component,
    shrink_counterexample,
    verify_both,
    verify_conjunction_theorem,
    verify_disjunction_theorem,
    write_counterexample_bundle,
)
from .computation import (
    Computation,
    Core,
    ValidationReport,
    computation_traces,
    size_compatible,
    sub_cores,
    traces,
    trivial_computation,
    validate_computation,
)
from .hml import (
    And,
    Box,
    Diamond,
    EffectContext,
    FF,
    Formula,
    FormulaParseError,
    Not,
    Or,
    TT,
    Top,
    format_formula,
    formula_alphabet,
    is_immediate_effect,
    parse_formula,
    satisfies,
    states_satisfying,
)
from .lts import (
    AutParseError,
    CHOICE_INITIAL,
    EPSILON,
    Lts,
    choice,
    emit_aut,
    emit_dot,
    format_state,
    init_actions,
    interleave,
    is_acyclic,
    isomorphic,
    longest_acyclic_path,
    make_lts,
    parse_aut,
    project_word,
    reach,
    reachable_states,
    restrict_to_reachable,
    step,
    subwords,
)
from .testkit import (
    CorpusInstance,
    GenParams,
    corpus,
    fixture_context,
    fixtures,
    gen_effect,
    gen_lts,
)

__version__ = "0.1.0"

__all__ = [
    "And",
    "AutParseError",
    "Box",
    "CHOICE_INITIAL",
    "CauseReport",
    "CauseSet",
    "Classification",
    "Computation",
    "ConditionReport",
    "Core",
    "CorpusInstance",
    "CrossCheckReport",
    "Diamond",
    "EPSILON",
    "EffectContext",
    "Exactness",
    "FF",
    "Formula",
    "FormulaParseError",
    "GenParams",
    "Lts",
    "Not",
    "Or",
    "PreconditionReport",
    "TT",
    "TheoremReport",
    "Top",
    "ValidationReport",
    "causal_projection",
    "cause_candidate",
    "causes",
    "check_preconditions",
    "choice",
    "classify_word",
    "computation_traces",
    "corpus",
    "cross_check_disjunction_lifting",
    "cross_check_single_component",
    "default_bound",
    "emit_aut",
    "emit_dot",
    "exploration_is_exact",
    "extension_universe",
    "fixture_context",
    "fixtures",
    "format_formula",
    "format_state",
    "formula_alphabet",
    "gen_effect",
    "gen_lts",
    "init_actions",
    "interleave",
    "is_acyclic",
    "is_immediate_effect",
    "isomorphic",
    "longest_acyclic_path",
    "make_lts",
    "oracle_check_cause",
    "oracle_check_details",
    "parse_aut",
    "parse_formula",
    "project_word",
    "reach",
    "reachable_states",
    "restrict_to_reachable",
    "satisfies",
    "shrink_counterexample",
    "size_compatible",
    "states_satisfying",
    "step",
    "sub_cores",
    "subwords",
    "traces",
    "trivial_computation",
    "validate_computation",
    "verify_both",
    "verify_conjunction_theorem",
    "verify_disjunction_theorem",
    "write_counterexample_bundle",
]
