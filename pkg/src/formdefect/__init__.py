"""Exact Witt-group defect invariants of abelian covers, knot infections,
and number-theoretic certificates for their discriminants."""

from .cyclotomic import CyclotomicElement, ComplexInterval, embed, involution, zeta_power
from .witt import HermitianForm, WittClass, WittInvariants, radical_reduce, signature
from .seifert import (LaurentPolynomial, SeifertMatrix, alexander, build_lambda_r, dis_formula,
                      k_a_matrix, knot_cover_defect, levine_tristram)
from .covers import (Character, DerivedCover, FiniteAbelianGroup, LoopLiftRecord, VoltageGraph,
                     Word, character_rank, derive_cover, loop_lift_collection)
from .numtheory import (DualSequence, SymbolCertificate, dual_sequence, is_norm_from_Qi,
                        norm_class_equal, norm_residue_symbol)
from .pipeline import (InfectionScenario, ObstructionReport, bd_lift_structure_check,
                       bd_signature_recovery, bd_slice_obstruction, bing_double_tower,
                       homology_cobordism_distinguisher, infection_defect, lens_seed_scan,
                       solvability_report)

__version__ = "0.1.0"
