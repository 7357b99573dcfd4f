"""Exact verification and sharpening of tridiagonal pairs."""

from __future__ import annotations

from .fields import GF, RATIONALS, FieldElement, FieldSpec, embed_base, field_create
from .linalg import ExactMatrix, eigendecompose, kernel, rank, rref, solve_linear
from .tdverify import TDSystemRecord, VerificationFailure, verify_td_system

__all__ = [
    "GF", "RATIONALS", "FieldElement", "FieldSpec", "embed_base", "field_create",
    "ExactMatrix", "eigendecompose", "kernel", "rank", "rref", "solve_linear",
    "TDSystemRecord", "VerificationFailure", "verify_td_system",
]
