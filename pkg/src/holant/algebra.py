"""Scalars in the cyclotomic field Q(zeta_24), a floating fallback, and 2x2 matrices.

Exact elements are stored as 8 rational coefficients over the power basis
1, z, ..., z^7 of z = exp(2*pi*i/24), reduced modulo x^8 - x^4 + 1.  The field
contains i = z^6, w = z^8 (a primitive cube root of unity) and
exp(i*pi/4) = z^3.  Float elements wrap a Python complex and compare with a
tolerance.  The two kinds never mix in one arithmetic expression.
"""
from __future__ import annotations

import cmath
import itertools
import math
import os
import re
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np

DEGREE = 8
CONDUCTOR = 24
UNITS = (1, 5, 7, 11, 13, 17, 19, 23)
DEFAULT_EPS = 1e-9
BACKEND_ENV = "HOLANT_BACKEND"
BACKENDS = ("exact", "float")

Rational = Union[int, Fraction]


def default_backend() -> str:
    name = os.environ.get(BACKEND_ENV, "exact").strip().lower() or "exact"
    if name not in BACKENDS:
        raise ValueError(f"{BACKEND_ENV} must be one of {BACKENDS}, got {name!r}")
    return name


def _norm(x):
    if type(x) is Fraction and x.denominator == 1:
        return x.numerator
    return x


def _reduce(c: list) -> tuple:
    """Reduce a coefficient list of length <= 15 modulo x^8 - x^4 + 1."""
    c = list(c) + [0] * (15 - len(c))
    for k in range(14, 7, -1):
        v = c[k]
        if v:
            c[k - 4] += v
            c[k - 8] -= v
    return tuple(_norm(x) for x in c[:8])


def _zeta_table() -> list:
    table = []
    cur = [1] + [0] * 7
    for _ in range(CONDUCTOR):
        table.append(tuple(cur))
        cur = list(_reduce([0] + cur))
    return table


_ZPOW = _zeta_table()
_ZERO = (0,) * 8


class ExactScalar:
    """Element of Q(zeta_24)."""

    __slots__ = ("c",)
    backend = "exact"

    def __init__(self, value=0):
        if isinstance(value, ExactScalar):
            self.c = value.c
        elif isinstance(value, (int, Fraction)):
            self.c = (_norm(value),) + (0,) * 7
        elif isinstance(value, tuple) and len(value) == DEGREE:
            self.c = value
        elif isinstance(value, Sequence) and not isinstance(value, str):
            vals = [_norm(Fraction(v)) if not isinstance(v, int) else v for v in value]
            if len(vals) > 15:
                raise ValueError("too many coefficients")
            self.c = _reduce(vals)
        elif isinstance(value, str):
            self.c = parse_scalar(value, "exact").c
        else:
            raise TypeError(f"cannot build an exact scalar from {type(value).__name__}")

    # constructors
    @classmethod
    def zeta(cls, k: int = 1) -> "ExactScalar":
        return cls(_ZPOW[k % CONDUCTOR])

    @classmethod
    def i_power(cls, k: int) -> "ExactScalar":
        return cls.zeta(6 * k)

    # coercion
    @staticmethod
    def _co(other):
        if isinstance(other, ExactScalar):
            return other
        if isinstance(other, (int, Fraction)):
            return ExactScalar(other)
        if isinstance(other, (FloatScalar, float, complex)):
            raise TypeError("exact and float scalars cannot be mixed")
        return None

    def __add__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return ExactScalar(tuple(_norm(x + y) for x, y in zip(self.c, o.c)))

    __radd__ = __add__

    def __neg__(self):
        return ExactScalar(tuple(-x for x in self.c))

    def __pos__(self):
        return self

    def __sub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return ExactScalar(tuple(_norm(x - y) for x, y in zip(self.c, o.c)))

    def __rsub__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ExactScalar(tuple(_norm(x * other) for x in self.c))
        o = self._co(other)
        if o is None:
            return NotImplemented
        a, b = self.c, o.c
        # cheap paths for rationals
        if not any(a[1:]):
            return o * a[0]
        if not any(b[1:]):
            return self * b[0]
        out = [0] * 15
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out[i + j] += x * y
        return ExactScalar(_reduce(out))

    __rmul__ = __mul__

    def galois(self, k: int) -> "ExactScalar":
        """Image under the automorphism z -> z^k (k a unit mod 24)."""
        out = [0] * 8
        for j, x in enumerate(self.c):
            if x:
                for t, y in enumerate(_ZPOW[(j * k) % CONDUCTOR]):
                    if y:
                        out[t] += x * y
        return ExactScalar(tuple(_norm(v) for v in out))

    def norm(self) -> Rational:
        """Field norm down to Q."""
        prod = ExactScalar(1)
        for k in UNITS:
            prod = prod * self.galois(k)
        assert not any(prod.c[1:])
        return prod.c[0]

    def inverse(self) -> "ExactScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        c = self.c
        if not any(c[1:]):
            return ExactScalar(_norm(Fraction(1) / c[0]))
        nz = [j for j, x in enumerate(c) if x]
        if len(nz) == 1:
            j = nz[0]
            return ExactScalar(_ZPOW[(-j) % CONDUCTOR]) * _norm(Fraction(1) / c[j])
        partial = ExactScalar(1)
        for k in UNITS[1:]:
            partial = partial * self.galois(k)
        n = (self * partial).c[0]
        return partial * _norm(Fraction(1) / n)

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = ExactScalar(1)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        try:
            o = self._co(other)
        except TypeError:
            return NotImplemented
        if o is None:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        if not any(self.c[1:]):
            return hash(self.c[0])
        return hash(self.c)

    def __bool__(self):
        return any(self.c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def is_rational(self) -> bool:
        return not any(self.c[1:])

    def to_complex(self) -> complex:
        return sum(complex(float(x)) * cmath.exp(2j * math.pi * j / CONDUCTOR)
                   for j, x in enumerate(self.c) if x) + 0j

    def root_order(self) -> Optional[int]:
        """Multiplicative order if self is a root of unity, else None."""
        if self.is_zero():
            return None
        for d in (1, 2, 3, 4, 6, 8, 12, 24):
            if self ** d == 1:
                return d
        return None

    def nth_root(self, n: int) -> Optional["ExactScalar"]:
        return _exact_root(self, n)

    def __repr__(self):
        return f"ExactScalar({str(self)!r})"

    def __str__(self):
        terms = []
        for j, x in enumerate(self.c):
            if not x:
                continue
            mag = abs(x)
            body = str(mag)
            if j:
                body = f"w^{j}" if mag == 1 else f"{body}*w^{j}"
            sign = "-" if x < 0 else "+"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first = terms[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in terms[1:]:
            out += sign + body
        return out


class FloatScalar:
    """Complex double with tolerance-based equality."""

    __slots__ = ("z",)
    backend = "float"
    eps = DEFAULT_EPS

    def __init__(self, value=0):
        if isinstance(value, FloatScalar):
            self.z = value.z
        elif isinstance(value, ExactScalar):
            self.z = value.to_complex()
        elif isinstance(value, str):
            self.z = parse_scalar(value, "float").z
        else:
            self.z = complex(value)

    @classmethod
    def zeta(cls, k: int = 1) -> "FloatScalar":
        return cls(cmath.exp(2j * math.pi * k / CONDUCTOR))

    @classmethod
    def i_power(cls, k: int) -> "FloatScalar":
        return cls((1, 1j, -1, -1j)[k % 4])

    @staticmethod
    def _co(other):
        if isinstance(other, FloatScalar):
            return other.z
        if isinstance(other, (int, Fraction, float, complex)):
            return complex(other)
        if isinstance(other, ExactScalar):
            raise TypeError("exact and float scalars cannot be mixed")
        return None

    def __add__(self, other):
        o = self._co(other)
        return NotImplemented if o is None else FloatScalar(self.z + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._co(other)
        return NotImplemented if o is None else FloatScalar(self.z - o)

    def __rsub__(self, other):
        o = self._co(other)
        return NotImplemented if o is None else FloatScalar(o - self.z)

    def __mul__(self, other):
        o = self._co(other)
        return NotImplemented if o is None else FloatScalar(self.z * o)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        if abs(o) <= self.eps:
            raise ZeroDivisionError("division by (numerically) zero scalar")
        return FloatScalar(self.z / o)

    def __rtruediv__(self, other):
        o = self._co(other)
        if o is None:
            return NotImplemented
        return FloatScalar(o) / self

    def __neg__(self):
        return FloatScalar(-self.z)

    def __pos__(self):
        return self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return FloatScalar(1) / FloatScalar(self.z ** (-k))
        return FloatScalar(self.z ** k)

    def __eq__(self, other):
        try:
            o = self._co(other)
        except TypeError:
            return NotImplemented
        if o is None:
            return NotImplemented
        # relative above magnitude 1, absolute below
        return abs(self.z - o) <= self.eps * max(1.0, abs(self.z), abs(o))

    __hash__ = None

    def __bool__(self):
        return abs(self.z) > self.eps

    def is_zero(self) -> bool:
        return abs(self.z) <= self.eps

    def is_rational(self) -> bool:
        return False

    def inverse(self) -> "FloatScalar":
        return FloatScalar(1) / self

    def to_complex(self) -> complex:
        return self.z

    def root_order(self, max_order: int = 10_000) -> Optional[int]:
        if abs(abs(self.z) - 1) > self.eps:
            return None
        t = (cmath.phase(self.z) / (2 * math.pi)) % 1.0
        frac = Fraction(t).limit_denominator(max_order)
        if abs(float(frac) - t) > self.eps and abs(abs(float(frac) - t) - 1) > self.eps:
            return None
        return frac.denominator

    def nth_root(self, n: int) -> "FloatScalar":
        if self.is_zero():
            return FloatScalar(0)
        r = abs(self.z) ** (1.0 / n)
        return FloatScalar(r * cmath.exp(1j * cmath.phase(self.z) / n))

    def __repr__(self):
        return f"FloatScalar({self.z!r})"

    def __str__(self):
        z = self.z
        re_, im = (0.0 if abs(z.real) <= self.eps else z.real), (0.0 if abs(z.imag) <= self.eps else z.imag)
        if im == 0:
            return f"{re_:.12g}"
        return f"{re_:.12g}{im:+.12g}i"


Scalar = Union[ExactScalar, FloatScalar]


def scalar(value, backend: Optional[str] = None) -> Scalar:
    """Coerce value (int, Fraction, literal string, complex, scalar) to the backend."""
    backend = backend or default_backend()
    if backend == "exact":
        if isinstance(value, ExactScalar):
            return value
        if isinstance(value, FloatScalar):
            raise TypeError("cannot convert a float scalar to the exact backend")
        if isinstance(value, (float, complex)):
            raise TypeError("floating values need the float backend")
        return ExactScalar(value)
    if backend == "float":
        return value if isinstance(value, FloatScalar) else FloatScalar(value)
    raise ValueError(f"unknown backend {backend!r}")


def backend_of(value) -> Optional[str]:
    if isinstance(value, (ExactScalar, FloatScalar)):
        return value.backend
    if isinstance(value, (float, complex)):
        return "float"
    return None


def zeta(k: int = 1, backend: Optional[str] = None) -> Scalar:
    backend = backend or default_backend()
    return ExactScalar.zeta(k) if backend == "exact" else FloatScalar.zeta(k)


def i_power(k: int, backend: Optional[str] = None) -> Scalar:
    return zeta(6 * k, backend)


# ---------------------------------------------------------------- literals

_TERM = re.compile(r"^(?P<num>\d+(?:/\d+)?)?(?P<star>\*)?(?P<unit>w\^\d+|w|i)?$")


def parse_scalar(text: str, backend: Optional[str] = None) -> Scalar:
    """Parse the scalar literal grammar, e.g. '1/2*w^3 - 3 + i'.

    In float mode a Python-style complex such as '0.5+1.2i' is also accepted.
    """
    backend = backend or default_backend()
    s = str(text).replace(" ", "")
    if not s:
        raise ValueError("empty scalar literal")
    if backend == "float":
        try:
            return FloatScalar(complex(s.replace("i", "j")))
        except ValueError:
            return FloatScalar(parse_scalar(s, "exact"))
    total = ExactScalar(0)
    pos = 0
    if s[0] not in "+-":
        s = "+" + s
    for m in re.finditer(r"([+-])([^+-]+)", s):
        if m.start() != pos:
            raise ValueError(f"malformed scalar literal {text!r}")
        pos = m.end()
        sign, body = m.group(1), m.group(2)
        t = _TERM.match(body)
        if not t or not (t.group("num") or t.group("unit")) or (t.group("star") and not (t.group("num") and t.group("unit"))):
            raise ValueError(f"malformed term {body!r} in scalar literal {text!r}")
        coef = Fraction(t.group("num")) if t.group("num") else Fraction(1)
        unit = t.group("unit")
        k = 0
        if unit == "i":
            k = 6
        elif unit == "w":
            k = 1
        elif unit:
            k = int(unit[2:])
        term = ExactScalar.zeta(k) * _norm(coef)
        total = total + term if sign == "+" else total - term
    if pos != len(s):
        raise ValueError(f"malformed scalar literal {text!r}")
    return total


def format_scalar(x: Scalar) -> str:
    return str(x)


# ---------------------------------------------------------- exact roots

_EMBED = np.array([[cmath.exp(2j * math.pi * k * j / CONDUCTOR) for j in range(DEGREE)] for k in UNITS])
_EMBED_INV = np.linalg.inv(_EMBED)


def _prime_root(a: ExactScalar, p: int) -> list:
    """All p-th roots of a lying in the field (p in {2, 3})."""
    coeffs = np.array([float(x) for x in a.c])
    emb = _EMBED @ coeffs
    base = emb ** (1.0 / p)
    unity = np.exp(2j * math.pi * np.arange(p) / p)
    cands = base[:, None] * unity[None, :]  # 8 x p
    combos = np.array(list(itertools.product(range(p), repeat=DEGREE - 1)))
    vals = np.empty((len(combos), DEGREE), dtype=complex)
    vals[:, 0] = cands[0, 0]
    for r in range(1, DEGREE):
        vals[:, r] = cands[r, combos[:, r - 1]]
    coef = vals @ _EMBED_INV.T
    scale = max(1.0, float(np.max(np.abs(coef))) if coef.size else 1.0)
    good = np.where(np.max(np.abs(coef.imag), axis=1) < 1e-7 * scale)[0]
    found = []
    for g in good:
        x = ExactScalar(tuple(_norm(Fraction(float(v)).limit_denominator(10 ** 6)) for v in coef[g].real))
        if x ** p == a:
            found.append(x)
            break
    if not found:
        return []
    x = found[0]
    if p == 2:
        return [x, -x]
    w = ExactScalar.zeta(8)
    return [x, x * w, x * w * w]


def _canonical(roots: list) -> ExactScalar:
    def key(x):
        z = x.to_complex()
        return (round(z.real, 9), round(z.imag, 9))
    return max(roots, key=key)


def _exact_root(a: ExactScalar, n: int) -> Optional[ExactScalar]:
    """An n-th root of a inside the field (n of the form 2^s 3^t), else None.

    Roots are recognised numerically from the 8 complex embeddings and then
    verified exactly, so a returned value is always correct.
    """
    if n < 1:
        raise ValueError("root degree must be positive")
    if a.is_zero():
        return ExactScalar(0)
    if n == 1:
        return a
    primes = []
    m = n
    for p in (2, 3):
        while m % p == 0:
            primes.append(p)
            m //= p
    if m != 1:
        raise ValueError("only roots of degree 2^s 3^t are supported")
    frontier = [a]
    for p in primes:
        nxt = []
        for b in frontier:
            nxt.extend(_prime_root(b, p))
        if not nxt:
            return None
        # keep distinct values only
        uniq = []
        for x in nxt:
            if all(x != y for y in uniq):
                uniq.append(x)
        frontier = uniq
    return _canonical(frontier)


def root(x: Scalar, n: int) -> Optional[Scalar]:
    """n-th root in the same backend; None when it leaves the exact field."""
    return x.nth_root(n)


# ---------------------------------------------------------------- matrices

class Mat2:
    """2x2 matrix [[a, b], [c, d]]; rows and columns are indexed by bits."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, backend: Optional[str] = None):
        if backend is None:
            backend = next((backend_of(v) for v in (a, b, c, d) if backend_of(v)), None) or default_backend()
        self.a, self.b, self.c, self.d = (scalar(v, backend) for v in (a, b, c, d))

    @classmethod
    def from_rows(cls, rows, backend: Optional[str] = None) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(a, b, c, d, backend)

    @classmethod
    def diag(cls, x, y, backend: Optional[str] = None) -> "Mat2":
        return cls(x, 0, 0, y, backend)

    @property
    def backend(self) -> str:
        return self.a.backend

    def to_backend(self, backend: str) -> "Mat2":
        if backend == self.backend:
            return self
        return Mat2(*(FloatScalar(v) for v in self.entries()), backend="float")

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def rows(self) -> tuple:
        return ((self.a, self.b), (self.c, self.d))

    def __getitem__(self, rc):
        r, c = rc
        return self.rows()[r][c]

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __mul__(self, k) -> "Mat2":
        return Mat2(*(v * k for v in self.entries()))

    __rmul__ = __mul__

    def apply(self, vec: Sequence) -> tuple:
        x, y = vec
        return (self.a * x + self.b * y, self.c * x + self.d * y)

    def transpose(self) -> "Mat2":
        return Mat2(self.a, self.c, self.b, self.d)

    def det(self) -> Scalar:
        return self.a * self.d - self.b * self.c

    def is_invertible(self) -> bool:
        return not self.det().is_zero()

    def inverse(self) -> "Mat2":
        det = self.det()
        if det.is_zero():
            raise ValueError("matrix is singular")
        inv = 1 / det
        return Mat2(self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def is_diagonal(self) -> bool:
        return self.b.is_zero() and self.c.is_zero()

    def is_antidiagonal(self) -> bool:
        return self.a.is_zero() and self.d.is_zero()

    def scale_to(self, other: "Mat2") -> Optional[Scalar]:
        """c with self == c * other, if it exists and other is nonzero."""
        pivot = next((k for k, v in enumerate(other.entries()) if not v.is_zero()), None)
        if pivot is None:
            return None
        c = self.entries()[pivot] / other.entries()[pivot]
        if c.is_zero():
            return None
        if all(x == c * y for x, y in zip(self.entries(), other.entries())):
            return c
        return None

    def equiv(self, other: "Mat2") -> bool:
        return self.scale_to(other) is not None

    def __eq__(self, other):
        if not isinstance(other, Mat2):
            return NotImplemented
        return all(x == y for x, y in zip(self.entries(), other.entries()))

    __hash__ = None

    def __repr__(self):
        return f"Mat2([[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def named(name: str, backend: Optional[str] = None) -> Mat2:
    """The named matrices I, X, Z, K, T, H."""
    backend = backend or default_backend()
    i = i_power(1, backend)
    table = {
        "I": (1, 0, 0, 1),
        "X": (0, 1, 1, 0),
        "Z": (1, 0, 0, -1),
        "K": (1, 1, i, -i),
        "KX": (1, 1, -i, i),
        "T": (1, 0, 0, zeta(3, backend)),
        "H": (1, 1, 1, -1),
    }
    if name not in table:
        raise KeyError(f"unknown matrix name {name!r}")
    return Mat2(*table[name], backend=backend)


I = named("I", "exact")
X = named("X", "exact")
K = named("K", "exact")
KX = named("KX", "exact")
T = named("T", "exact")
H = named("H", "exact")


def is_orthogonal_up_to_scalar(q: Mat2) -> bool:
    g = q.transpose() @ q
    return g.is_diagonal() and g.a == g.d and not g.a.is_zero()


def qr_orthogonal_decompose(m: Mat2, side: str = "lower") -> tuple:
    """Split m = q r with r triangular and q orthogonal up to scale, or q in {K, KX}.

    side="lower" zeroes r[0,1]; side="upper" zeroes r[1,0].  Returns
    (q, r, kind) with kind in {"orthogonal", "K", "KX"} and m == q @ r.
    """
    if not m.is_invertible():
        raise ValueError("matrix is singular")
    if side not in ("lower", "upper"):
        raise ValueError("side must be 'lower' or 'upper'")
    be = m.backend
    i = i_power(1, be)
    if side == "lower":
        u, v = m.b, m.d
        if not (u * u + v * v).is_zero():
            q = Mat2(v, u, -u, v)
            kind = "orthogonal"
        else:
            kind = "K" if v == -i * u else "KX"
            q = named(kind, be)
    else:
        u, v = m.a, m.c
        if not (u * u + v * v).is_zero():
            q = Mat2(u, -v, v, u)
            kind = "orthogonal"
        else:
            kind = "K" if v == i * u else "KX"
            q = named(kind, be)
    r = q.inverse() @ m
    return q, r, kind


def factor_orthogonal_diagonal(m: Mat2) -> Optional[tuple]:
    """(q, d) with m == q @ d, q orthogonal up to scale, d diagonal; None unless m^T m is diagonal."""
    if not m.is_invertible():
        raise ValueError("matrix is singular")
    g = m.transpose() @ m
    if not g.is_diagonal():
        return None
    p, r = m.a, m.c
    if not p.is_zero():
        t = r / p
        q = Mat2(1, -t, t, 1)
    else:
        q = Mat2(0, -1, 1, 0, backend=m.backend)
    d = q.inverse() @ m
    assert d.is_diagonal()
    return q, d


def ata_x_form(a: Mat2) -> Optional[tuple]:
    """("KD" | "KXD", D) with a == K @ D or a == KX @ D, iff a^T a is a multiple of X."""
    if not a.is_invertible():
        raise ValueError("matrix is singular")
    g = a.transpose() @ a
    if not (g.is_antidiagonal() and not g.b.is_zero()):
        return None
    be = a.backend
    d = Mat2.diag(a.a, a.b, backend=be)
    for kind, name in (("KD", "K"), ("KXD", "KX")):
        if named(name, be) @ d == a:
            return kind, d
    return None
