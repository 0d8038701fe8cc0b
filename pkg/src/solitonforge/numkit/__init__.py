"""Exact-derivative jets and small dense complex linear algebra."""
from .jets import (
    CJet,
    JetOrderError,
    JetZeroDivision,
    jconj,
    align,
    jet,
    jet_arith,
    jet_exp_log,
    jexp,
    jlog,
    jsqrt,
)
from .linalg import (
    SingularMatrixError,
    determinant,
    jet_det,
    jet_solve,
    lu_factor,
    lu_solve,
)

__all__ = [
    "CJet",
    "align",
    "JetOrderError",
    "JetZeroDivision",
    "SingularMatrixError",
    "determinant",
    "jconj",
    "jet",
    "jet_arith",
    "jet_det",
    "jet_exp_log",
    "jet_solve",
    "jexp",
    "jlog",
    "jsqrt",
    "lu_factor",
    "lu_solve",
]
