"""Inductive verification of parameterized guarded-command protocols.

The pipeline finds counterexamples to induction on small finite instances,
generalizes them into concise auxiliary invariants, promotes those to
quantified parameterized invariants via type saturation, and confirms
inductiveness at several instance sizes.
"""

from .ast import ProtocolSpec
from .checker import Checker, CheckResult
from .concrete import (
    ConcreteProtocol,
    concretize,
    enumerate_instance_pairs,
    min_concretization,
    uniform_sizes,
)
from .corpus import corpus_names, corpus_source, load_corpus_protocol
from .cti import (
    BlockedAssertionStore,
    EquationSet,
    IndObligation,
    block_assertion,
    build_obligation,
    candidate_invariant,
    solve_obligation,
)
from .errors import ConcretizeError, PromotionError, ResourceLimitError
from .formulas import Clause, ParamInvariant, ground_expand, param_from_safety
from .generalize import (
    GeneralizeContext,
    compute_join_diff,
    generalize,
    heuristic_generalize,
    simplify_aux_inv_decreasing,
    simplify_aux_inv_increasing,
)
from .parser import ParseError, parse_protocol
from .pipeline import PipelineConfig, VerificationReport, final_inductive_check, run_pipeline
from .printer import print_protocol
from .promote import (
    compute_saturation,
    extend_group,
    implies_semantically,
    merge_invariants,
    promote,
)
from .report import emit_report, report_dict
from .symmetry import canonical_form, get_symmetry_invs

__all__ = [
    "BlockedAssertionStore",
    "CheckResult",
    "Checker",
    "Clause",
    "ConcreteProtocol",
    "ConcretizeError",
    "EquationSet",
    "GeneralizeContext",
    "IndObligation",
    "ParamInvariant",
    "ParseError",
    "PipelineConfig",
    "PromotionError",
    "ProtocolSpec",
    "ResourceLimitError",
    "VerificationReport",
    "block_assertion",
    "build_obligation",
    "candidate_invariant",
    "canonical_form",
    "compute_join_diff",
    "compute_saturation",
    "concretize",
    "corpus_names",
    "corpus_source",
    "emit_report",
    "enumerate_instance_pairs",
    "extend_group",
    "final_inductive_check",
    "generalize",
    "get_symmetry_invs",
    "ground_expand",
    "heuristic_generalize",
    "implies_semantically",
    "load_corpus_protocol",
    "merge_invariants",
    "min_concretization",
    "param_from_safety",
    "parse_protocol",
    "print_protocol",
    "promote",
    "report_dict",
    "run_pipeline",
    "simplify_aux_inv_decreasing",
    "simplify_aux_inv_increasing",
    "solve_obligation",
    "uniform_sizes",
]
