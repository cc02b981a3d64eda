"""Cylindric and polyadic atom structures, basic matrices and rainbow coloured graphs."""
from .coloured import (Colour, ColouredGraph, Palette, canonical_form, coloured_graph_check, find_cones,
                       forbidden_triangle, isomorphic, parse_colour)
from .matrices import (BasisReport, MatrixSet, agree_off, basic_matrices, is_basic_matrix, is_cylindric_basis,
                       matrices_ca, required_amalgams)
from .rainbow_atoms import growth_patterns, rainbow_ca_atoms
from .structure import (SIGNATURES, AxiomReport, CaAtomStructure, ComplexCa, ca_axiom_check, commutativity_violation,
                        complex_ca, frame_from_functions, hirsch_ca, set_algebra_atoms)
