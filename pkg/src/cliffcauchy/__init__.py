"""Numerical verification of Cauchy integral formulas in euclidean, hermitian,
quaternionic and osp(4|2) Clifford analysis on spheres."""
from .algebra import Algebra, Multivector, algebra
from .boundary import NodeSet, SurfaceDomain, build_quadrature, eval_measure
from .cif_engine import (
    CirculantPair, QuatBlockQuad, VerificationReport, cauchy_transform, check_condition,
    cif_euclidean, cif_hermitian, cif_osp, cif_quaternionic, hilbert_transform, lemma_integrals,
    martinelli_bochner, plemelj_check, test_function,
)
from .fields import CliffordField, PolynomialField, apply_operator, classify_monogenicity
from .kernels import eval_kernel, kernel_values
from .structures import structure_set, witt_frame

__version__ = "0.1.0"

__all__ = [
    "Algebra", "Multivector", "algebra", "NodeSet", "SurfaceDomain", "build_quadrature",
    "eval_measure", "CirculantPair", "QuatBlockQuad", "VerificationReport", "cauchy_transform",
    "check_condition", "cif_euclidean", "cif_hermitian", "cif_osp", "cif_quaternionic",
    "hilbert_transform", "lemma_integrals", "martinelli_bochner", "plemelj_check", "test_function",
    "CliffordField", "PolynomialField", "apply_operator", "classify_monogenicity", "eval_kernel",
    "kernel_values", "structure_set", "witt_frame",
]
