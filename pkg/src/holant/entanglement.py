"""Tensor factorisation and GHZ / W classification of signatures."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import List, Optional, Tuple

from .algebra import Mat2, Scalar, root, scalar
from .signatures import (Signature, SymSignature, ZeroSignatureError, EQ,
                         apply_matrix, as_signature, bits_of, index_of,
                         is_rank_one, matricize, to_symmetric)

DEGENERATE = "Degenerate"
DECOMPOSABLE = "DecomposableNontrivial"
GHZ = "GHZ"
W = "W"
BINARY = "BinaryEntangled"
HIGHER = "HigherUnclassified"


class OutsideFieldError(ValueError):
    """A witness needs a root that does not exist in the exact field."""


@dataclass
class EntanglementClass:
    tag: str
    partition: List[Tuple[int, ...]]
    witness: Optional[object] = None

    @property
    def decomposable(self) -> bool:
        return self.tag in (DEGENERATE, DECOMPOSABLE)


def _split_once(f: Signature) -> Optional[tuple]:
    """A rank-one bipartition (rows, g, h) with f = g (x) h, rows containing argument 0."""
    n = f.arity
    rest = list(range(1, n))
    for size in range(0, n - 1):
        for extra in combinations(rest, size):
            rows = (0,) + extra
            mat = matricize(f, rows)
            if not is_rank_one(mat):
                continue
            pi, pj = next((i, j) for i, r in enumerate(mat) for j, v in enumerate(r) if not v.is_zero())
            p = mat[pi][pj]
            g = Signature([r[pj] for r in mat], len(rows), f.backend)
            h = Signature([v / p for v in mat[pi]], n - len(rows), f.backend)
            return rows, g, h
        # complement sizes are covered by symmetry of the search
    return None


def factorize(f: Signature) -> List[Tuple[Tuple[int, ...], Signature]]:
    """Finest tensor decomposition of f.

    Returns (argument positions, factor) pairs sorted by smallest position.
    The factors multiply back to f exactly: the overall scalar sits in the
    first factor.
    """
    f.require_nonzero()
    if f.arity <= 1:
        return [(tuple(range(f.arity)), f)]

    def rec(sig: Signature, args: Tuple[int, ...]) -> list:
        if sig.arity <= 1:
            return [(args, sig)]
        split = _split_once(sig)
        if split is None:
            return [(args, sig)]
        rows, g, h = split
        cols = tuple(j for j in range(sig.arity) if j not in rows)
        return rec(g, tuple(args[j] for j in rows)) + rec(h, tuple(args[j] for j in cols))

    parts = rec(f, tuple(range(f.arity)))
    parts.sort(key=lambda p: p[0][0])
    return parts


def factor_product(parts: List[Tuple[Tuple[int, ...], Signature]], n: int) -> Signature:
    """Rebuild the arity-n signature from factorize output."""
    backend = parts[0][1].backend
    vals = []
    for k in range(1 << n):
        x = bits_of(k, n)
        v = scalar(1, backend)
        for args, g in parts:
            v = v * g.values[index_of([x[a] for a in args])]
        vals.append(v)
    return Signature(vals, n, backend)


def is_decomposable(f: Signature) -> bool:
    return len(factorize(f)) > 1


def is_degenerate(f: Signature) -> bool:
    return all(len(args) <= 1 for args, _ in factorize(f))


def nondecomposable_factors(f: Signature, min_arity: int = 0) -> list:
    return [(a, g) for a, g in factorize(f) if len(a) >= min_arity]


def ghz_polynomial(f: Signature) -> Scalar:
    v = lambda s: f.values[int(s, 2)]
    a = v("000") * v("111") - v("010") * v("101") + v("001") * v("110") - v("011") * v("100")
    b = (v("010") * v("100") - v("000") * v("110")) * (v("011") * v("101") - v("001") * v("111"))
    return a * a - 4 * b


def w_conditions(f: Signature) -> Tuple[bool, bool, bool]:
    v = lambda s: f.values[int(s, 2)]
    ne = lambda x, y: not (x == y)
    w1 = ne(v("000") * v("011"), v("001") * v("010")) or ne(v("101") * v("110"), v("100") * v("111"))
    w2 = ne(v("001") * v("100"), v("000") * v("101")) or ne(v("011") * v("110"), v("010") * v("111"))
    w3 = ne(v("011") * v("101"), v("001") * v("111")) or ne(v("010") * v("100"), v("000") * v("110"))
    return w1, w2, w3


def classify_ternary(f: Signature) -> EntanglementClass:
    if f.arity != 3:
        raise ValueError("classify_ternary needs an arity-3 signature")
    f.require_nonzero()
    if not ghz_polynomial(f).is_zero():
        return EntanglementClass(GHZ, [(0, 1, 2)])
    if all(w_conditions(f)):
        return EntanglementClass(W, [(0, 1, 2)])
    parts = [a for a, _ in factorize(f)]
    tag = DEGENERATE if all(len(a) == 1 for a in parts) else DECOMPOSABLE
    return EntanglementClass(tag, parts)


def symmetric_ghz_polynomial(f: SymSignature) -> Scalar:
    f0, f1, f2, f3 = f.values
    return (f0 * f3 - f1 * f2) ** 2 - 4 * (f1 * f1 - f0 * f2) * (f2 * f2 - f1 * f3)


def classify_ternary_symmetric(f: SymSignature) -> EntanglementClass:
    if len(f.values) != 4:
        raise ValueError("classify_ternary_symmetric needs [f0, f1, f2, f3]")
    if all(v.is_zero() for v in f.values):
        raise ZeroSignatureError("signature is identically zero")
    f0, f1, f2, f3 = f.values
    if not symmetric_ghz_polynomial(f).is_zero():
        return EntanglementClass(GHZ, [(0, 1, 2)])
    if not (f1 * f1 == f0 * f2) or not (f2 * f2 == f1 * f3):
        return EntanglementClass(W, [(0, 1, 2)])
    return EntanglementClass(DEGENERATE, [(0,), (1,), (2,)])


def classify(f: Signature) -> EntanglementClass:
    """Entanglement tag of an arbitrary nonzero signature."""
    parts = factorize(f)
    partition = [a for a, _ in parts]
    if all(len(a) <= 1 for a in partition):
        return EntanglementClass(DEGENERATE, partition)
    if len(parts) > 1:
        return EntanglementClass(DECOMPOSABLE, partition)
    if f.arity == 2:
        return EntanglementClass(BINARY, partition)
    if f.arity == 3:
        return classify_ternary(f)
    return EntanglementClass(HIGHER, partition)


def _annihilator(f: SymSignature) -> tuple:
    """(c0, c1, c2) with c0 f_k + c1 f_{k+1} + c2 f_{k+2} = 0 for k = 0, 1."""
    f0, f1, f2, f3 = f.values
    return (f1 * f3 - f2 * f2, f2 * f1 - f0 * f3, f0 * f2 - f1 * f1)


def _normalise_vec(w: tuple) -> tuple:
    if not w[0].is_zero():
        return (w[0] / w[0], w[1] / w[0])
    return (w[0], w[1] / w[1])


def ghz_witness(f: SymSignature) -> Mat2:
    """M with M o EQ_3 == f for a GHZ-type symmetric ternary f.

    The columns u, v of M satisfy f = u^(x)3 + v^(x)3.  Their directions are the
    roots of the quadratic that annihilates the sequence f_k (the linear
    recurrence of the sequence); the scales are cube roots.  Raises
    OutsideFieldError if a needed root is not in the exact field.
    """
    cls = classify_ternary_symmetric(f)
    if cls.tag != GHZ:
        raise ValueError(f"ghz_witness needs a GHZ-type input, got {cls.tag}")
    be = f.backend
    c0, c1, c2 = _annihilator(f)
    if not c2.is_zero():
        disc = c1 * c1 - 4 * c0 * c2
        s = root(disc, 2)
        if s is None:
            raise OutsideFieldError("square root of the discriminant is not in the field")
        one = scalar(1, be)
        u = (one, (-c1 + s) / (2 * c2))
        v = (one, (-c1 - s) / (2 * c2))
    else:
        u = _normalise_vec((c1, -c0))
        v = (scalar(0, be), scalar(1, be))
    # solve f_k = lam * u0^(3-k) u1^k + mu * v0^(3-k) v1^k
    mono = lambda w, k: w[0] ** (3 - k) * w[1] ** k
    lam = mu = None
    for k, l in combinations(range(4), 2):
        a, b, c, d = mono(u, k), mono(v, k), mono(u, l), mono(v, l)
        det = a * d - b * c
        if det.is_zero():
            continue
        fk, fl = f.values[k], f.values[l]
        lam = (fk * d - b * fl) / det
        mu = (a * fl - c * fk) / det
        break
    if lam is None:
        raise ValueError("degenerate recurrence")
    alpha, beta = root(lam, 3), root(mu, 3)
    if alpha is None or beta is None:
        raise OutsideFieldError("cube root of a column scale is not in the field")
    m = Mat2(alpha * u[0], beta * v[0], alpha * u[1], beta * v[1])
    if not (apply_matrix(m, EQ(3, be)) == f.expand()):
        raise ArithmeticError("ghz_witness reconstruction failed")
    return m


def w_direction(f: SymSignature) -> tuple:
    """Projective direction u of the repeated root of a W-type symmetric ternary.

    f = M o [1, 1, 0, 0] for some M whose first column is proportional to u.
    """
    cls = classify_ternary_symmetric(f)
    if cls.tag != W:
        raise ValueError(f"w_direction needs a W-type input, got {cls.tag}")
    c0, c1, c2 = _annihilator(f)
    be = f.backend
    if not c2.is_zero():
        return (scalar(1, be), -c1 / (2 * c2))
    return (scalar(0, be), scalar(1, be))
