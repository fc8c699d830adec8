"""Exact holant evaluation, gadget construction and complexity classification for Boolean signatures."""
from .algebra import ExactScalar, FloatScalar, Mat2, parse_scalar, scalar
from .signatures import EQ, NEQ, ONE, Signature, SymSignature, delta
from .grids import Gadget, SignatureGrid, effective_signature
from .evaluate import holant
from .entanglement import classify, factorize
from .dichotomy import Verdict, classify as classify_problem

__all__ = [
    "ExactScalar", "FloatScalar", "Mat2", "parse_scalar", "scalar",
    "EQ", "NEQ", "ONE", "Signature", "SymSignature", "delta",
    "Gadget", "SignatureGrid", "effective_signature", "holant",
    "classify", "factorize", "Verdict", "classify_problem",
]
