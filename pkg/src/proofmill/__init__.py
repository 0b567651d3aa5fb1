"""Proof search, proof checking, cut elimination, Hilbert-style
deduction, and finite resource models for intuitionistic linear logic
with non-normal modalities.

Four systems share one engine.  MILL and RSBIAT read antecedents as
multisets; PCMILL and SRSBIAT read them as ordered trees mixing
parallel (``,``) and serial (``;``) composition.  MILL and PCMILL carry
a box modality, RSBIAT and SRSBIAT replace it with agent-indexed
bringing-about modalities ``E[a]``.  Everything below is re-exported
from the per-concern modules; importing from those directly is equally
supported.
"""

from .calculus import (
    SYSTEM_RULES,
    CheckReport,
    Proof,
    Rule,
    check_proof,
    cut_count,
    cutrank,
    proof_from_json,
    proof_size,
    proof_to_json,
)
from .context import (
    Sequent,
    fill,
    leaf,
    mset,
    par,
    parse_sequent,
    positions,
    print_sequent,
    sequent,
    ser,
    to_formula,
    total_complexity,
    validate_sequent,
)
from .corpus import (
    CorpusEntry,
    CorpusError,
    EntryResult,
    expand_macros,
    load_corpus_dir,
    load_corpus_file,
    run_corpus,
    run_entry,
    verdict_word,
)
from .cutelim import (
    DEFECTIVE_PAIRS,
    CutEliminationError,
    ReductionStep,
    ReductionTrace,
    eliminate_cuts,
    reduce_once,
)
from .hilbert import (
    AXIOM_SCHEMATA,
    AxiomSchema,
    DeductionTree,
    assumption,
    axiom_leaf,
    box_re_rule,
    brings_re_rule,
    check_deduction,
    deduction_from_json,
    deduction_theorem,
    deduction_to_json,
    hilbert_to_sequent,
    modus_ponens,
    not_nec_rule,
    schema,
    with_rule,
)
from .search import (
    BudgetExceeded,
    Exhausted,
    Proved,
    SearchBudget,
    SearchStats,
    prove,
    prove_with_stats,
    subformula_audit,
)
from .semantics import (
    Countermodel,
    Evaluator,
    Model,
    ModelReport,
    eval_formula,
    extension,
    find_countermodel,
    model_from_json,
    model_to_json,
    random_model,
    sequent_valid,
    validate_model,
)
from .syntax import (
    Formula,
    System,
    SystemId,
    atom,
    box,
    brings,
    complexity,
    limp,
    lres,
    odot,
    parse_formula,
    parse_system,
    print_formula,
    rres,
    subformulas,
    tensor,
    unit,
    with_,
)

__version__ = "0.1.0"

__all__ = [
    "AXIOM_SCHEMATA",
    "AxiomSchema",
    "BudgetExceeded",
    "CheckReport",
    "CorpusEntry",
    "CorpusError",
    "Countermodel",
    "CutEliminationError",
    "DEFECTIVE_PAIRS",
    "DeductionTree",
    "EntryResult",
    "Evaluator",
    "Exhausted",
    "Formula",
    "Model",
    "ModelReport",
    "Proof",
    "Proved",
    "ReductionStep",
    "ReductionTrace",
    "Rule",
    "SYSTEM_RULES",
    "SearchBudget",
    "SearchStats",
    "Sequent",
    "System",
    "SystemId",
    "assumption",
    "atom",
    "axiom_leaf",
    "box",
    "box_re_rule",
    "brings",
    "brings_re_rule",
    "check_deduction",
    "check_proof",
    "complexity",
    "cut_count",
    "cutrank",
    "deduction_from_json",
    "deduction_theorem",
    "deduction_to_json",
    "eliminate_cuts",
    "eval_formula",
    "expand_macros",
    "extension",
    "fill",
    "find_countermodel",
    "hilbert_to_sequent",
    "leaf",
    "limp",
    "load_corpus_dir",
    "load_corpus_file",
    "lres",
    "model_from_json",
    "model_to_json",
    "modus_ponens",
    "mset",
    "not_nec_rule",
    "odot",
    "par",
    "parse_formula",
    "parse_sequent",
    "parse_system",
    "positions",
    "print_formula",
    "print_sequent",
    "proof_from_json",
    "proof_size",
    "proof_to_json",
    "prove",
    "prove_with_stats",
    "random_model",
    "reduce_once",
    "rres",
    "run_corpus",
    "run_entry",
    "schema",
    "sequent",
    "sequent_valid",
    "ser",
    "subformula_audit",
    "subformulas",
    "tensor",
    "to_formula",
    "total_complexity",
    "unit",
    "validate_model",
    "validate_sequent",
    "verdict_word",
    "with_rule",
    "with_",
]
