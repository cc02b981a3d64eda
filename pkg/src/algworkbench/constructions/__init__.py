"""Builders for the concrete atom structures."""
from .blur import (BlurSpec, BlownUp, CofiniteSet, IndexSet, TermAlgebraBlur, blur_structure,
                   check_complex_blur, cross_check_composition, evenly_distributed, f_family,
                   h_join_check, safe, term_algebra_blur)
from .hirsch import (HirschAlgebra, HirschParams, bin_labels, commutativity_witness, forb_table,
                     hirsch_algebra, hirsch_kappa, hirsch_neat_reduct_iso, hirsch_psi)
from .monk import monk_ra
from .rainbow import rainbow_ra

__all__ = [
    "BlurSpec", "BlownUp", "CofiniteSet", "IndexSet", "TermAlgebraBlur", "blur_structure",
    "check_complex_blur", "cross_check_composition", "evenly_distributed", "f_family",
    "h_join_check", "safe", "term_algebra_blur", "HirschAlgebra", "HirschParams", "bin_labels",
    "commutativity_witness", "forb_table", "hirsch_algebra", "hirsch_kappa",
    "hirsch_neat_reduct_iso", "hirsch_psi", "monk_ra", "rainbow_ra",
]
