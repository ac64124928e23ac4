"""Exact tools for polynomial identities of matrix and block-triangular algebras."""
from .coeffring import Field, FieldScalar, field_op, frobenius, make_field, parse_field
from .freealg import (NcPolynomial, blended_components, format_poly, homogeneous_components,
                      parse_poly, partial_linearization, quasi_linearize, recover_leading,
                      substitute, ultra_homogeneous_closure)
from .matalg import (CharPoly, Matrix, char_poly, is_semisimple, left_regular, matrix_char_coeff,
                     q_char_coeffs, symmetrized_char_coeffs)

__version__ = "0.1.0"
