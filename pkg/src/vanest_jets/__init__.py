"""Exact Van Est map for jets of local Lie groups, with its Weil-algebra and perturbation machinery."""

from .lie import LieAlgebraSpec, abelian, aff1, bch, builtin, heisenberg, sl2, validate_jacobi
from .cealg import ActionSpec, CEElement, ce_differential, cohomology_dims
from .weil import WeilElement, ce_weil_differential, contract, format_weil, kalkman_twist, koszul_differential, \
    parse_weil
from .hpl import ContractionData, perturb, random_contraction, verify_lemma_a
from .vanest import (ASCochain, GroupoidCochain, TripleElement, alexander_spanier_ve, cup, reverse_map,
                     simplicial_delta, ve_dproduct, ve_explicit, ve_zigzag)

__version__ = "0.1.0"

__all__ = [
    "LieAlgebraSpec", "abelian", "aff1", "bch", "builtin", "heisenberg", "sl2", "validate_jacobi",
    "ActionSpec", "CEElement", "ce_differential", "cohomology_dims",
    "WeilElement", "ce_weil_differential", "contract", "format_weil", "kalkman_twist", "koszul_differential",
    "parse_weil",
    "ContractionData", "perturb", "random_contraction", "verify_lemma_a",
    "ASCochain", "GroupoidCochain", "TripleElement", "alexander_spanier_ve", "cup", "reverse_map",
    "simplicial_delta", "ve_dproduct", "ve_explicit", "ve_zigzag",
]
