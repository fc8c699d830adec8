"""Constraint functions {0,1}^n -> C stored densely.

Index convention (used everywhere through `index_of` / `bits_of`): the first
argument is the most significant bit, so values[0b011] = f(0, 1, 1).
Argument positions are 0-based throughout the library.
"""
from __future__ import annotations

from itertools import product
from typing import Callable, Iterable, List, Optional, Sequence

from .algebra import (ExactScalar, FloatScalar, Mat2, Scalar, backend_of,
                      default_backend, i_power, scalar)


class ZeroSignatureError(ValueError):
    """Raised by operations that need a function that is not identically zero."""


def index_of(bits: Sequence[int]) -> int:
    idx = 0
    for b in bits:
        idx = (idx << 1) | (1 if b else 0)
    return idx


def bits_of(index: int, n: int) -> tuple:
    return tuple((index >> (n - 1 - j)) & 1 for j in range(n))


def weight(index: int) -> int:
    return bin(index).count("1")


class Signature:
    """Arity-n function given by its 2^n values."""

    __slots__ = ("arity", "values")

    def __init__(self, values: Iterable, arity: Optional[int] = None, backend: Optional[str] = None):
        vals = list(values)
        if backend is None:
            backend = next((backend_of(v) for v in vals if backend_of(v)), None) or default_backend()
        n = len(vals).bit_length() - 1
        if len(vals) != 1 << n:
            raise ValueError(f"value count {len(vals)} is not a power of two")
        if arity is not None and arity != n:
            raise ValueError(f"arity {arity} needs {1 << arity} values, got {len(vals)}")
        self.arity = n
        self.values = tuple(scalar(v, backend) for v in vals)

    @classmethod
    def from_function(cls, arity: int, fn: Callable, backend: Optional[str] = None) -> "Signature":
        return cls([fn(*bits_of(k, arity)) for k in range(1 << arity)], arity, backend)

    @property
    def backend(self) -> str:
        return self.values[0].backend

    def to_backend(self, backend: str) -> "Signature":
        if backend == self.backend:
            return self
        if backend == "exact":
            raise TypeError("cannot convert float values to the exact backend")
        return Signature([FloatScalar(v) for v in self.values], self.arity, "float")

    def __getitem__(self, key) -> Scalar:
        if isinstance(key, int):
            return self.values[key]
        return self.values[index_of(key)]

    def value(self, *bits) -> Scalar:
        return self.values[index_of(bits)]

    def __len__(self):
        return len(self.values)

    def is_zero(self) -> bool:
        return all(v.is_zero() for v in self.values)

    def support(self) -> List[int]:
        return [k for k, v in enumerate(self.values) if not v.is_zero()]

    def require_nonzero(self) -> "Signature":
        if self.is_zero():
            raise ZeroSignatureError("signature is identically zero")
        return self

    def __mul__(self, c) -> "Signature":
        return Signature([v * c for v in self.values], self.arity, self.backend)

    __rmul__ = __mul__

    def __add__(self, other: "Signature") -> "Signature":
        if other.arity != self.arity:
            raise ValueError("arity mismatch")
        return Signature([x + y for x, y in zip(self.values, other.values)], self.arity, self.backend)

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return self.arity == other.arity and all(x == y for x, y in zip(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        sym = to_symmetric(self)
        if sym is not None and self.arity > 1:
            return f"Signature(sym[{', '.join(map(str, sym.values))}])"
        return f"Signature([{', '.join(map(str, self.values))}])"

    def key(self) -> tuple:
        """Hashable exact key (exact backend only)."""
        return (self.arity, self.values)

    # small conveniences
    def tensor(self, other: "Signature") -> "Signature":
        return tensor(self, other)

    def permute(self, rho: Sequence[int]) -> "Signature":
        return permute(self, rho)


class SymSignature:
    """Symmetric function listed by Hamming weight: [f_0, ..., f_n]."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable, backend: Optional[str] = None):
        vals = list(values)
        if not vals:
            raise ValueError("a symmetric signature needs at least one value")
        if backend is None:
            backend = next((backend_of(v) for v in vals if backend_of(v)), None) or default_backend()
        self.values = tuple(scalar(v, backend) for v in vals)

    @property
    def arity(self) -> int:
        return len(self.values) - 1

    @property
    def backend(self) -> str:
        return self.values[0].backend

    def expand(self) -> Signature:
        n = self.arity
        return Signature([self.values[weight(k)] for k in range(1 << n)], n, self.backend)

    def __getitem__(self, k):
        return self.values[k]

    def __len__(self):
        return len(self.values)

    def __eq__(self, other):
        if not isinstance(other, SymSignature):
            return NotImplemented
        return len(self.values) == len(other.values) and all(x == y for x, y in zip(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        return f"SymSignature([{', '.join(map(str, self.values))}])"


def as_signature(f) -> Signature:
    if isinstance(f, SymSignature):
        return f.expand()
    if isinstance(f, Signature):
        return f
    raise TypeError(f"expected a signature, got {type(f).__name__}")


def sym(*values, backend: Optional[str] = None) -> Signature:
    """Dense signature from symmetric notation: sym(1, 0, 0, 1) is EQ_3."""
    return SymSignature(values, backend).expand()


STANDARD_NAMES = ("EQ", "ONE", "NEQ", "delta0", "delta1", "deltaPlus",
                  "deltaMinus", "deltaI", "deltaMinusI")


def standard(name: str, arity: int = 1, backend: Optional[str] = None) -> Signature:
    backend = backend or default_backend()
    if arity < 1:
        raise ValueError("arity must be at least 1")
    i = i_power(1, backend)
    unary = {"delta0": (1, 0), "delta1": (0, 1), "deltaPlus": (1, 1), "deltaMinus": (1, -1),
             "deltaI": (1, i), "deltaMinusI": (1, -i)}
    if name == "EQ":
        return SymSignature([1] + [0] * (arity - 1) + [1], backend).expand()
    if name == "ONE":
        return SymSignature([0, 1] + [0] * (arity - 1), backend).expand()
    if name == "NEQ":
        if arity != 2:
            raise ValueError("NEQ has arity 2")
        return SymSignature([0, 1, 0], backend).expand()
    if name in unary:
        if arity != 1:
            raise ValueError(f"{name} has arity 1")
        return Signature(unary[name], 1, backend)
    raise ValueError(f"unknown standard signature {name!r}")


def EQ(k: int, backend: Optional[str] = None) -> Signature:
    return standard("EQ", k, backend)


def ONE(k: int, backend: Optional[str] = None) -> Signature:
    return standard("ONE", k, backend)


def NEQ(backend: Optional[str] = None) -> Signature:
    return standard("NEQ", 2, backend)


def delta(name: str, backend: Optional[str] = None) -> Signature:
    """Unary by short name: '0', '1', '+', '-', 'i', '-i'."""
    table = {"0": "delta0", "1": "delta1", "+": "deltaPlus", "-": "deltaMinus",
             "i": "deltaI", "-i": "deltaMinusI"}
    return standard(table[name], 1, backend)


def to_symmetric(f: Signature) -> Optional[SymSignature]:
    n = f.arity
    by_weight = [None] * (n + 1)
    for k, v in enumerate(f.values):
        w = weight(k)
        if by_weight[w] is None:
            by_weight[w] = v
        elif not (by_weight[w] == v):
            return None
    return SymSignature(by_weight, f.backend)


def is_symmetric(f: Signature) -> bool:
    return to_symmetric(f) is not None


def scale_equiv(f: Signature, g: Signature) -> Optional[Scalar]:
    """c != 0 with f == c * g; 1 when both are zero; None otherwise."""
    if f.arity != g.arity:
        raise ValueError("arity mismatch")
    fz, gz = f.is_zero(), g.is_zero()
    if fz and gz:
        return scalar(1, f.backend)
    if fz or gz:
        return None
    k = next(k for k, v in enumerate(g.values) if not v.is_zero())
    c = f.values[k] / g.values[k]
    if c.is_zero():
        return None
    if all(x == c * y for x, y in zip(f.values, g.values)):
        return c
    return None


def tensor(*fs: Signature) -> Signature:
    """Tensor product; earlier factors own the earlier (more significant) arguments."""
    out = fs[0]
    for g in fs[1:]:
        out = Signature([x * y for x in out.values for y in g.values], out.arity + g.arity, out.backend)
    return out


def permute(f: Signature, rho: Sequence[int]) -> Signature:
    """g(x_0..x_{n-1}) = f(x_{rho[0]}, ..., x_{rho[n-1]})."""
    n = f.arity
    rho = list(rho)
    if sorted(rho) != list(range(n)):
        raise ValueError(f"{rho} is not a permutation of range({n})")
    vals = []
    for k in range(1 << n):
        x = bits_of(k, n)
        vals.append(f.values[index_of([x[r] for r in rho])])
    return Signature(vals, n, f.backend)


def move_to_front(f: Signature, args: Sequence[int]) -> Signature:
    """Reorder arguments so `args` come first (in that order), the rest keep their order."""
    rest = [j for j in range(f.arity) if j not in args]
    order = list(args) + rest
    # g(y) = f(x) where x[order[t]] = y[t]
    inv = [0] * f.arity
    for t, j in enumerate(order):
        inv[j] = t
    return permute(f, inv)


def matricize(f: Signature, rows: Sequence[int]) -> List[list]:
    """Matrix with rows indexed by the arguments `rows` and columns by the rest."""
    n = f.arity
    rows = list(rows)
    if not rows or len(rows) >= n or len(set(rows)) != len(rows) or any(not 0 <= r < n for r in rows):
        raise ValueError("rows must be a proper nonempty subset of the arguments")
    cols = [j for j in range(n) if j not in rows]
    mat = []
    for rk in range(1 << len(rows)):
        rb = bits_of(rk, len(rows))
        line = []
        for ck in range(1 << len(cols)):
            cb = bits_of(ck, len(cols))
            x = [0] * n
            for j, b in zip(rows, rb):
                x[j] = b
            for j, b in zip(cols, cb):
                x[j] = b
            line.append(f.values[index_of(x)])
        mat.append(line)
    return mat


def rank(matrix: List[list]) -> int:
    """Rank by Gaussian elimination over the scalar field."""
    m = [list(r) for r in matrix]
    if not m:
        return 0
    rows, cols = len(m), len(m[0])
    r = 0
    for c in range(cols):
        piv = next((k for k in range(r, rows) if not m[k][c].is_zero()), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        for k in range(rows):
            if k != r and not m[k][c].is_zero():
                t = m[k][c] * inv
                m[k] = [a - t * b for a, b in zip(m[k], m[r])]
        r += 1
        if r == rows:
            break
    return r


def is_rank_one(matrix: List[list]) -> bool:
    """True iff the matrix has rank exactly 1."""
    piv = None
    for i, row in enumerate(matrix):
        for j, v in enumerate(row):
            if not v.is_zero():
                piv = (i, j)
                break
        if piv:
            break
    if piv is None:
        return False
    pi, pj = piv
    p = matrix[pi][pj]
    prow = matrix[pi]
    for i, row in enumerate(matrix):
        ri = row[pj]
        for j, v in enumerate(row):
            if not (v * p == ri * prow[j]):
                return False
    return True


def apply_matrix(m: Mat2, f: Signature, axes: Optional[Iterable[int]] = None) -> Signature:
    """Apply m to the chosen arguments (all by default): (m^{(x)n} f)."""
    n = f.arity
    vals = list(f.values)
    for ax in (range(n) if axes is None else axes):
        bit = 1 << (n - 1 - ax)
        new = list(vals)
        for k in range(1 << n):
            if k & bit:
                continue
            v0, v1 = vals[k], vals[k | bit]
            new[k] = m.a * v0 + m.b * v1
            new[k | bit] = m.c * v0 + m.d * v1
        vals = new
    return Signature(vals, n, f.backend)


def transform(m: Mat2, f: Signature, transpose: bool = False) -> Signature:
    """Holographic action m o f (or m^T o f)."""
    if f.backend != m.backend:
        m = m.to_backend(f.backend)
    return apply_matrix(m.transpose() if transpose else m, f)


def binary_matrix(f: Signature) -> Mat2:
    """The 2x2 matrix [[f00, f01], [f10, f11]] of a binary signature."""
    if f.arity != 2:
        raise ValueError("expected a binary signature")
    return Mat2(*f.values)


def matrix_signature(m: Mat2) -> Signature:
    """The binary signature f_m with f_m(x, y) = m[x, y]."""
    return Signature(m.entries(), 2, m.backend)
