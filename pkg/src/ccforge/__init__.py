"""Characteristic-class calculus for singular Bott-Chern theory.

Exact truncated series in Chern classes, genera, projective-completion
pushforwards, the classification of singular Bott-Chern theories by their
line profiles, and a quadrature oracle for the fiber integrals behind the
homogeneous theory.
"""

from .bundles import (
    FormalBundle,
    Genus,
    VirtualClass,
    chern_character,
    direct_sum,
    dual,
    exterior_power_ch,
    genus_evaluate,
    koszul_alternating_ch,
    tensor_line,
    todd,
    todd_inverse,
    top_chern,
    total_chern,
)
from .projective import ProjCompletion
from .series import GeneratorTable, GradedSeries, OneVarSeries, Rat, invert, substitute
from .singular_bc import (
    BCTheory,
    OddClass,
    class_line,
    class_pair_defect,
    derive_phi_from_fiber_integrals,
    genus_from_class,
    grr_defect_term,
    harmonic,
    phi_homogeneous,
)

__version__ = "0.1.0"

__all__ = [
    "BCTheory",
    "FormalBundle",
    "GeneratorTable",
    "Genus",
    "GradedSeries",
    "OddClass",
    "OneVarSeries",
    "ProjCompletion",
    "Rat",
    "VirtualClass",
    "chern_character",
    "class_line",
    "class_pair_defect",
    "derive_phi_from_fiber_integrals",
    "direct_sum",
    "dual",
    "exterior_power_ch",
    "genus_evaluate",
    "genus_from_class",
    "grr_defect_term",
    "harmonic",
    "invert",
    "koszul_alternating_ch",
    "phi_homogeneous",
    "substitute",
    "tensor_line",
    "todd",
    "todd_inverse",
    "top_chern",
    "total_chern",
]
