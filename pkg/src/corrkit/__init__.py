"""Correspondences over finite-dimensional C*-algebras.

Ideal lattices, Hilbert modules, left actions, interior tensor products,
truncated Fock representations, covariance checks and graph correspondences,
all computed with dense numpy linear algebra.
"""
__version__ = "0.1.0"

from .corr import (
    Correspondence,
    StarHom,
    TensorProduct,
    correspondence_flags,
    detect_bimodule,
    from_partial_automorphism,
    identity_correspondence,
    jx,
    ker_phi,
    left_act,
    left_inner,
    make_correspondence,
    tensor,
    zero_correspondence,
)
from .errors import (
    ConsistencyError,
    CorrkitError,
    InputError,
    NumericalError,
    SizeLimitError,
    StructureError,
    UnsupportedInstance,
)
from .fdalg import AlgElement, FdAlgebra, Ideal, ideal_join, ideal_meet, ideal_perp, is_essential
from .fock import build_fock, fock_defect_profile, fock_dims
from .graphalg import Graph, check_ck_family, ck_relations, classify_vertices, graph_correspondence, graph_ideals
from .hmod import HilbertModule, ModuleElement, ModuleOperator, inner, is_full, theta
from .rep import Representation, check_relative_covariance, rep_injectivity, verify_representation

__all__ = [
    "Correspondence",
    "StarHom",
    "TensorProduct",
    "correspondence_flags",
    "detect_bimodule",
    "from_partial_automorphism",
    "identity_correspondence",
    "jx",
    "ker_phi",
    "left_act",
    "left_inner",
    "make_correspondence",
    "tensor",
    "zero_correspondence",
    "ConsistencyError",
    "CorrkitError",
    "InputError",
    "NumericalError",
    "SizeLimitError",
    "StructureError",
    "UnsupportedInstance",
    "AlgElement",
    "FdAlgebra",
    "Ideal",
    "ideal_join",
    "ideal_meet",
    "ideal_perp",
    "is_essential",
    "build_fock",
    "fock_defect_profile",
    "fock_dims",
    "Graph",
    "check_ck_family",
    "ck_relations",
    "classify_vertices",
    "graph_correspondence",
    "graph_ideals",
    "HilbertModule",
    "ModuleElement",
    "ModuleOperator",
    "inner",
    "is_full",
    "theta",
    "Representation",
    "check_relative_covariance",
    "rep_injectivity",
    "verify_representation",
]
