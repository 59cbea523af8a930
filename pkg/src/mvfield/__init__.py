"""Combinatorial multivector fields from finite vector-field data.

Builds simplicial complexes on sampled vector fields, constructs
combinatorial multivector fields by solving binary linear programs, and
analyzes the induced combinatorial dynamics (Morse decomposition, Conley
indices, attractor / repeller / periodic-orbit classification).
"""

from .complexes import (
    MalformedSimplexError,
    Simplex,
    SimplexSet,
    SimplicialComplex,
    build_complex,
    closure,
    is_convex,
    model1_triplets,
    model1_variables,
    model2_triplets,
    model2_variable_pairs,
    mouth,
)
from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"
