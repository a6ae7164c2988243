"""
Qudit state-vector algebra, basis families and GHZ consistency tools
"""
from .errors import (
    AttackUnavailable, DimensionError, EnumerationError, LabelError,
    ProtocolError, QssError, StateError,
)
from .qmath import (
    ComplexAmp, SeededRng, StateVector, born_measure, inner, partial_inner, tensor,
)
from .bases import (
    BasisKind, BasisSpec, analytic_overlap, basis_family, fourier_vector,
    mbb_vector, mub_vector, validate_dimension,
)
from .ghz import (
    ConditionalState, GhzSpec, LookupTable, UniquenessReport, conditional_state,
    consistent, ghz_state, lookup_table, verify_uniqueness, vperp_basis,
)

__all__ = [
    'QssError', 'DimensionError', 'StateError', 'LabelError', 'EnumerationError',
    'ProtocolError', 'AttackUnavailable',
    'ComplexAmp', 'SeededRng', 'StateVector', 'tensor', 'inner', 'partial_inner', 'born_measure',
    'BasisKind', 'BasisSpec', 'validate_dimension', 'fourier_vector', 'mub_vector',
    'mbb_vector', 'analytic_overlap', 'basis_family',
    'GhzSpec', 'ConditionalState', 'LookupTable', 'UniquenessReport', 'ghz_state',
    'consistent', 'lookup_table', 'conditional_state', 'vperp_basis', 'verify_uniqueness',
]
