"""The generalised Hilbert calculus CK + Ax."""

from .builder import ProofBuilder, deduction, detach, k_rule, substitute_proof, weaken
from .calculus import (
    BASE_SCHEMAS,
    CK,
    EXTRA_SCHEMAS,
    AxiomSet,
    CheckReport,
    Line,
    Proof,
    ProofError,
    check_proof,
)
from .library import BUILTINS, builtin_proof
from .randomproofs import random_formula, random_proof

__all__ = [
    "BASE_SCHEMAS",
    "BUILTINS",
    "CK",
    "EXTRA_SCHEMAS",
    "AxiomSet",
    "CheckReport",
    "Line",
    "Proof",
    "ProofBuilder",
    "ProofError",
    "builtin_proof",
    "check_proof",
    "deduction",
    "detach",
    "k_rule",
    "random_formula",
    "random_proof",
    "substitute_proof",
    "weaken",
]
