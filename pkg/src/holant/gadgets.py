"""Gadget toolbox: pinning, self-loops, holographic action, extraction and symmetrisation.

Every constructive procedure returns a GadgetRecipe whose gadget, evaluated
with `grids.effective_signature`, reproduces the recorded signature exactly.
Argument positions are 0-based.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import Mat2, Scalar, named, scalar
from .entanglement import (GHZ, W, classify_ternary, classify_ternary_symmetric,
                           factorize, is_decomposable)
from .evaluate import contract_network
from .families import in_M_closure
from .grids import Gadget, effective_signature
from .signatures import (Signature, SymSignature, ZeroSignatureError, apply_matrix,
                         bits_of, delta, index_of, permute, to_symmetric, transform)

UNARY_ORDER = ("0", "1", "+", "-")


class SearchExhausted(RuntimeError):
    """An exhaustive search that a theorem guarantees to succeed came up empty."""


# ------------------------------------------------------------ basic operations

def contract_unary(f: Signature, slot: int, u: Signature) -> Signature:
    """sum over x_slot of f(..., x_slot, ...) u(x_slot)."""
    n = f.arity
    if u.arity != 1:
        raise ValueError("u must be unary")
    if not 0 <= slot < n:
        raise IndexError(f"slot {slot} out of range for arity {n}")
    bit = 1 << (n - 1 - slot)
    hi_mask = ~((bit << 1) - 1)
    vals = []
    for k in range(1 << (n - 1)):
        # insert a zero bit at the slot position
        full = ((k << 1) & hi_mask) | (k & (bit - 1))
        vals.append(f.values[full] * u.values[0] + f.values[full | bit] * u.values[1])
    return Signature(vals, n - 1, f.backend)


def pin(f: Signature, slot: int, b: int) -> Signature:
    """Fix argument `slot` to bit b (contraction with delta_b)."""
    n = f.arity
    bit = 1 << (n - 1 - slot)
    hi_mask = ~((bit << 1) - 1)
    vals = []
    for k in range(1 << (n - 1)):
        full = ((k << 1) & hi_mask) | (k & (bit - 1))
        vals.append(f.values[full | bit] if b else f.values[full])
    return Signature(vals, n - 1, f.backend)


def self_loop(f: Signature, i: int, j: int) -> Signature:
    """sum over y of f with x_i = x_j = y."""
    n = f.arity
    if i == j:
        raise ValueError("self-loop needs two distinct arguments")
    if not (0 <= i < n and 0 <= j < n):
        raise IndexError("argument out of range")
    rest = [t for t in range(n) if t not in (i, j)]
    vals = []
    for k in range(1 << (n - 2)):
        rb = bits_of(k, n - 2)
        acc = None
        for y in (0, 1):
            x = [0] * n
            for t, b in zip(rest, rb):
                x[t] = b
            x[i] = x[j] = y
            v = f.values[index_of(x)]
            acc = v if acc is None else acc + v
        vals.append(acc)
    return Signature(vals, n - 2, f.backend)


def holographic(m: Mat2, f: Signature, transpose: bool = False) -> Signature:
    if not m.is_invertible():
        raise ValueError("matrix is singular")
    return transform(m, f, transpose)


def _inverse_perm(rho: Sequence[int]) -> List[int]:
    inv = [0] * len(rho)
    for s, t in enumerate(rho):
        inv[t] = s
    return inv


# ------------------------------------------------------------ recipes

@dataclass
class GadgetRecipe:
    """A signature together with a gadget realising it and the steps taken."""

    signature: Signature
    gadget: Gadget
    steps: List[str] = field(default_factory=list)
    sources: List[Signature] = field(default_factory=list)

    @classmethod
    def source(cls, f: Signature, label: str = "f") -> "GadgetRecipe":
        return cls(f, Gadget.from_signature(f), [f"start from {label}"], [f])

    def _next(self, sig, gadget, step, extra_sources=()):
        return GadgetRecipe(sig, gadget, self.steps + [step], self.sources + list(extra_sources))

    def pin(self, pos: int, name: str) -> "GadgetRecipe":
        u = delta(name, self.signature.backend)
        return self._next(contract_unary(self.signature, pos, u),
                          self.gadget.attach_unary(pos, u), f"contract argument {pos} with delta_{name}")

    def pin_many(self, assignment: Dict[int, str]) -> "GadgetRecipe":
        rec = self
        for pos in sorted(assignment, reverse=True):
            rec = rec.pin(pos, assignment[pos])
        return rec

    def attach(self, pos: int, u: Signature, label: str) -> "GadgetRecipe":
        return self._next(contract_unary(self.signature, pos, u),
                          self.gadget.attach_unary(pos, u), f"contract argument {pos} with {label}", [u])

    def loop(self, i: int, j: int) -> "GadgetRecipe":
        return self._next(self_loop(self.signature, i, j), self.gadget.loop(i, j),
                          f"self-loop on arguments {i} and {j}")

    def permute(self, rho: Sequence[int]) -> "GadgetRecipe":
        """Same convention as signatures.permute: g(x) = f(x[rho[0]], ...)."""
        return self._next(permute(self.signature, rho), self.gadget.reorder(_inverse_perm(rho)),
                          f"permute arguments by {list(rho)}")

    def holographic(self, m: Mat2, transpose: bool = False) -> "GadgetRecipe":
        return self._next(holographic(m, self.signature, transpose), self.gadget.holographic(m, transpose),
                          f"holographic transform by {m}{' (transposed)' if transpose else ''}")

    def apply_binary(self, other: "GadgetRecipe", axis: int) -> "GadgetRecipe":
        """sum over z of other(x_axis, z) * self(..., z, ...)."""
        g = other.signature
        m = Mat2(*g.values)
        sig = apply_matrix(m, self.signature, [axis])
        merged = other.gadget.merge(self.gadget, [(1, axis)])
        n = self.signature.arity
        order = [t + 1 if t < axis else (0 if t == axis else t) for t in range(n)]
        gad = merged.reorder(order)
        return GadgetRecipe(sig, gad, self.steps + [f"compose binary gadget into argument {axis}: ["
                                                    + "; ".join(other.steps) + "]"],
                            self.sources + other.sources)

    def join(self, other: "GadgetRecipe", joins: List[Tuple[int, int]], label: str) -> "GadgetRecipe":
        gad = self.gadget.merge(other.gadget, joins)
        sig = contract_network(gad, gad.dangling_ends)
        return GadgetRecipe(sig, gad, self.steps + [label + ": [" + "; ".join(other.steps) + "]"],
                            self.sources + other.sources)

    def replay(self) -> Signature:
        return effective_signature(self.gadget)

    def verify(self) -> bool:
        return self.replay() == self.signature


# ------------------------------------------------------------ extraction searches

def _non_decomposable(f: Signature) -> bool:
    return not f.is_zero() and len(factorize(f)) == 1


def _binary_entangled(g: Signature) -> bool:
    v = g.values
    return not (v[0] * v[3] - v[1] * v[2]).is_zero()


def _ternary_entangled(g: Signature) -> bool:
    if g.is_zero():
        return False
    return classify_ternary(g).tag in (GHZ, W)


def _pin_others(f: Signature, keep: Sequence[int], names: Sequence[str]) -> Signature:
    others = [t for t in range(f.arity) if t not in keep]
    g = f
    for pos, name in sorted(zip(others, names), reverse=True):
        g = contract_unary(g, pos, delta(name, f.backend))
    return g


def pr_binary_extract(f: Signature, j: int, k: int) -> Tuple[Signature, Tuple[str, ...]]:
    """First non-decomposable binary obtained by contracting all arguments except j, k.

    The other arguments are contracted (in increasing position order of the
    returned tuple) with unaries from {delta_0, delta_1, delta_+, delta_-},
    tried lexicographically.  The result has x_j as its first argument.
    """
    n = f.arity
    if n < 2 or j == k or not (0 <= j < n and 0 <= k < n):
        raise ValueError("need two distinct argument positions")
    if not _non_decomposable(f):
        raise ValueError("pr_binary_extract needs a non-decomposable signature")
    # depth-first with shared prefixes
    others = [t for t in range(n) if t not in (j, k)]
    lo, hi = min(j, k), max(j, k)
    for names in product(UNARY_ORDER, repeat=n - 2):
        g = _pin_others(f, (j, k), names)
        if _binary_entangled(g):
            if j > k:
                g = permute(g, [1, 0])
            return g, tuple(names)
    raise SearchExhausted("no non-decomposable binary found; contradicts the binary extraction theorem")


def pr_binary_recipe(f: Signature, j: int, k: int) -> GadgetRecipe:
    g, names = pr_binary_extract(f, j, k)
    others = [t for t in range(f.arity) if t not in (j, k)]
    rec = GadgetRecipe.source(f).pin_many(dict(zip(others, names)))
    if j > k:
        rec = rec.permute([1, 0])
    assert rec.signature == g
    return rec


def ternary_extract(f: Signature) -> Tuple[Signature, GadgetRecipe]:
    """A non-decomposable ternary obtained from f by unary contractions."""
    n = f.arity
    if n < 3:
        raise ValueError("ternary_extract needs arity >= 3")
    if not _non_decomposable(f):
        raise ValueError("ternary_extract needs a non-decomposable signature")
    if n == 3:
        return f, GadgetRecipe.source(f)
    for triple in combinations(range(n), 3):
        others = [t for t in range(n) if t not in triple]
        for names in product(UNARY_ORDER, repeat=n - 3):
            g = _pin_others(f, triple, names)
            if _ternary_entangled(g):
                rec = GadgetRecipe.source(f).pin_many(dict(zip(others, names)))
                assert rec.signature == g
                return g, rec
    raise SearchExhausted("no non-decomposable ternary found; contradicts the three-argument extraction theorem")


# ------------------------------------------------------------ symmetrisation

def _rotate(f: Signature, rotation: int) -> List[int]:
    return [[0, 1, 2], [1, 2, 0], [2, 0, 1]][rotation]


def triangle_symmetrize(f: Signature, rotation: int = 0) -> Signature:
    """g(x1,x2,x3) = sum f'(x1,y12,y31) f'(x2,y23,y12) f'(x3,y31,y23), f' a cyclic rotation of f."""
    if f.arity != 3:
        raise ValueError("triangle_symmetrize needs an arity-3 signature")
    if rotation not in (0, 1, 2):
        raise ValueError("rotation must be 0, 1 or 2")
    fr = permute(f, _rotate(f, rotation))
    v = fr.values
    vals = []
    for k in range(8):
        x1, x2, x3 = bits_of(k, 3)
        acc = None
        for y12, y23, y31 in product((0, 1), repeat=3):
            t = v[x1 * 4 + y12 * 2 + y31] * v[x2 * 4 + y23 * 2 + y12] * v[x3 * 4 + y31 * 2 + y23]
            acc = t if acc is None else acc + t
        vals.append(acc)
    return Signature(vals, 3, f.backend)


def triangle_recipe(base: GadgetRecipe, rotation: int = 0) -> GadgetRecipe:
    """Three copies of `base` (rotated) wired as a triangle."""
    r = base.permute(_rotate(base.signature, rotation))
    ab = r.join(r, [(1, 2)], "attach second copy")            # dangling: A0 A2 B0 B1
    abc = ab.join(r, [(1, 1), (3, 2)], "attach third copy")    # dangling: A0 B0 C0
    sig = triangle_symmetrize(base.signature, rotation)
    return GadgetRecipe(sig, abc.gadget, abc.steps + [f"triangle symmetrisation, rotation {rotation}"],
                        abc.sources)


def _in_km(f: Signature) -> Optional[str]:
    for name in ("K", "KX"):
        if in_M_closure(f, named(name, f.backend)):
            return name
    return None


def symmetrize(f: Signature, helper: Optional[Signature] = None,
               base: Optional[GadgetRecipe] = None, helper_recipe: Optional[GadgetRecipe] = None
               ) -> Tuple[SymSignature, GadgetRecipe]:
    """A symmetric non-decomposable ternary realisable from f (and helper when needed).

    If f lies in K o M or KX o M, a binary helper outside the matching closure
    is composed into one argument first.  Among the triangle rotations, a
    GHZ-type result is preferred.
    """
    if f.arity != 3:
        raise ValueError("symmetrize needs an arity-3 signature")
    if not _ternary_entangled(f):
        raise ValueError("symmetrize needs a non-decomposable signature")
    rec = base or GadgetRecipe.source(f)
    which = _in_km(f)
    s = to_symmetric(f)
    if s is not None and which is None:
        return s, rec
    if which is not None:
        if helper is None:
            raise ValueError(f"f lies in {which} o M: a binary helper is required")
        if helper.arity != 2 or in_M_closure(helper, named(which, f.backend)):
            raise ValueError(f"helper must be binary and outside <{which} o M>")
        hrec = helper_recipe or GadgetRecipe.source(helper, "helper")
        cands = [hrec, hrec.permute([1, 0])]
        chosen = None
        for axis in range(3):
            for h in cands:
                g = rec.apply_binary(h, axis)
                if _ternary_entangled(g.signature) and _in_km(g.signature) is None:
                    chosen = g
                    break
            if chosen:
                break
        if chosen is None:
            raise SearchExhausted("helper composition stayed inside K o M / KX o M")
        rec = chosen
        f = rec.signature
        s = to_symmetric(f)
        if s is not None:
            return s, rec
    fallback = None
    for rot in range(3):
        g = triangle_symmetrize(f, rot)
        if g.is_zero():
            continue
        tag = classify_ternary(g).tag
        if tag == GHZ:
            return to_symmetric(g), triangle_recipe(rec, rot)
        if tag == W and fallback is None:
            fallback = rot
    if fallback is not None:
        g = triangle_recipe(rec, fallback)
        return to_symmetric(g.signature), g
    raise SearchExhausted("all triangle rotations are decomposable")


def binary_escape(f: Signature, which: str = "K") -> Tuple[Signature, GadgetRecipe]:
    """A non-decomposable binary outside <which o M> obtained from f by unary contractions."""
    m = named(which, f.backend)
    if in_M_closure(f, m):
        raise ValueError(f"input already lies in <{which} o M>")

    def search(rec: GadgetRecipe):
        g = rec.signature
        if g.arity == 2:
            return rec if _binary_entangled(g) else None
        if g.arity < 2:
            return None
        for pos in range(g.arity):
            for name in UNARY_ORDER:
                nxt = rec.pin(pos, name)
                h = nxt.signature
                if h.is_zero() or in_M_closure(h, m):
                    continue
                found = search(nxt)
                if found is not None:
                    return found
        return None

    found = search(GadgetRecipe.source(f))
    if found is None:
        raise SearchExhausted("no escaping binary found")
    return found.signature, found


def unary_chain_recipe(kprime: Signature, sign: str, length: int) -> GadgetRecipe:
    """delta_{sign}, then `length` rounds of (k', NEQ): realises [1, length*z + sign 1]."""
    if kprime.arity != 2 or to_symmetric(kprime) is None:
        raise ValueError("k' must be a symmetric binary signature")
    a, b, _, d = kprime.values
    if not d.is_zero() or b.is_zero():
        raise ValueError("k' must have the shape [z, 1, 0] up to scale")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    if length < 0:
        raise ValueError("length must be non-negative")
    be = kprime.backend
    k = kprime * (1 / b)
    neq = Signature([0, 1, 1, 0], 2, be)
    rec = GadgetRecipe.source(delta(sign, be), f"delta_{sign}")
    kr = GadgetRecipe.source(k, "k'")
    nr = GadgetRecipe.source(neq, "NEQ")
    for _ in range(length):
        rec = rec.join(kr, [(0, 1)], "attach k'")    # dangling: k'(x, .)
        rec = rec.join(nr, [(0, 1)], "attach NEQ")   # dangling: NEQ(x, .)
    return rec


def unary_chain(kprime: Signature, sign: str, length: int) -> Signature:
    return unary_chain_recipe(kprime, sign, length).signature


# ------------------------------------------------------------ hard core pipeline

TERNARY = "TernaryNonDecomposable"
GENEQ4 = "GeneralizedEquality4"
NOT_APPLICABLE = "NotApplicable"


@dataclass
class HardCoreTrace:
    source_index: Optional[int] = None
    factor_args: Tuple[int, ...] = ()
    D: Dict[str, int] = field(default_factory=dict)
    pairs: Dict[str, Tuple[int, ...]] = field(default_factory=dict)
    values: Dict[str, Scalar] = field(default_factory=dict)
    steps: List[str] = field(default_factory=list)

    def note(self, text: str) -> None:
        self.steps.append(text)


@dataclass
class HardCoreResult:
    outcome: str
    signature: Optional[Signature]
    recipe: Optional[GadgetRecipe]
    trace: HardCoreTrace


def _dist(x: Sequence[int], y: Sequence[int]) -> int:
    return sum(a != b for a, b in zip(x, y))


def _pin_agreeing(rec: GadgetRecipe, a: Sequence[int], b: Sequence[int], keep: Sequence[int] = ()) -> GadgetRecipe:
    """Pin every argument where a and b agree (except those in keep) to that common bit."""
    assign = {t: str(a[t]) for t in range(len(a)) if a[t] == b[t] and t not in keep}
    return rec.pin_many(assign)


def _is_geneq(f: Signature) -> bool:
    supp = f.support()
    return len(supp) == 2 and supp[0] ^ supp[1] == (1 << f.arity) - 1


def _reduce_geneq(rec: GadgetRecipe, trace: HardCoreTrace) -> HardCoreResult:
    f = rec.signature
    assert _is_geneq(f) and f.arity >= 3
    while f.arity > 4:
        a = bits_of(f.support()[0], f.arity)
        j, k = next((j, k) for j, k in combinations(range(f.arity), 2) if a[j] == a[k])
        rec = rec.loop(j, k)
        trace.note(f"self-loop arguments {j},{k} of the generalized equality (arity {f.arity} -> {f.arity - 2})")
        f = rec.signature
    if f.arity == 4:
        trace.note("reached an arity-4 generalized equality")
        return HardCoreResult(GENEQ4, f, rec, trace)
    assert f.arity == 3 and _ternary_entangled(f)
    trace.note("reached a ternary generalized equality")
    return HardCoreResult(TERNARY, f, rec, trace)


def _restriction(f: Signature, P: Sequence[int], x: Dict[int, int]) -> Signature:
    """f with the arguments outside P fixed by x; arguments P in the given order."""
    n = f.arity
    vals = []
    for k in range(1 << len(P)):
        z = bits_of(k, len(P))
        full = [0] * n
        for t, b in x.items():
            full[t] = b
        for t, b in zip(P, z):
            full[t] = b
        vals.append(f.values[index_of(full)])
    return Signature(vals, len(P), f.backend)


def _second_level(f: Signature, P: Sequence[int], ref: Signature) -> Tuple[int, dict, dict]:
    """The A/B-set refinement: minimum distance between proportional and non-proportional restrictions."""
    from .signatures import scale_equiv
    rest = [t for t in range(f.arity) if t not in P]
    A, B = [], []
    for k in range(1 << len(rest)):
        xb = bits_of(k, len(rest))
        x = dict(zip(rest, xb))
        r = _restriction(f, P, x)
        if r.is_zero():
            continue
        (A if scale_equiv(r, ref) is not None else B).append(x)
    best = None
    for x in A:
        for y in B:
            d = sum(x[t] != y[t] for t in rest)
            if best is None or d < best[0]:
                best = (d, x, y)
    if best is None:
        raise ArithmeticError("restriction sets are degenerate: input is decomposable")
    return best


def _full_point(x: Dict[int, int], P: Sequence[int], n: int, fill: int = 0) -> list:
    return [x.get(t, fill) for t in range(n)]


def _pin_outside(rec: GadgetRecipe, P: Sequence[int], x: Dict[int, int], y: Dict[int, int]) -> Tuple[GadgetRecipe, list]:
    """Pin arguments outside P where x and y agree; return recipe with P first, then the differing ones."""
    n = rec.signature.arity
    assign = {t: str(x[t]) for t in x if x[t] == y[t]}
    kept = [t for t in range(n) if t not in assign]
    diff = [t for t in kept if t not in P]
    r = rec.pin_many(assign)
    # reorder kept arguments: P first (in the order given), then diff
    order_src = [kept.index(t) for t in list(P) + diff]
    if order_src != list(range(len(kept))):
        r = r.permute(_inverse_perm(order_src))
    return r, diff


def extract_hard_core(F: Sequence[Signature]) -> HardCoreResult:
    """Constructive pinning pipeline reducing F to a ternary or an arity-4 equality-like core.

    Uses only delta_0, delta_1 pins, self-loops and compositions of realised
    functions.  Every returned recipe replays exactly.
    """
    trace = HardCoreTrace()
    choice = None
    for idx, f in enumerate(F):
        if f.is_zero():
            continue
        for args, g in factorize(f):
            if len(args) >= 3:
                choice = (idx, f, args)
                break
        if choice:
            break
    if choice is None:
        trace.note("no non-decomposable factor of arity >= 3")
        return HardCoreResult(NOT_APPLICABLE, None, None, trace)
    idx, f, args = choice
    trace.source_index, trace.factor_args = idx, tuple(args)
    rec = GadgetRecipe.source(f, f"F[{idx}]")
    if len(args) < f.arity:
        point = bits_of(f.support()[0], f.arity)
        rec = rec.pin_many({t: str(point[t]) for t in range(f.arity) if t not in args})
        trace.note(f"isolate the factor on arguments {list(args)} by pinning the others at {point}")
    f = rec.signature
    n = f.arity
    if n == 3:
        trace.note("the factor is already ternary")
        return HardCoreResult(TERNARY, f, rec, trace)

    supp = [bits_of(k, n) for k in f.support()]
    D0, a, b = min(((_dist(x, y), x, y) for x, y in combinations(supp, 2)), key=lambda t: t[0])
    trace.D["D0"] = D0
    trace.pairs["a"], trace.pairs["b"] = a, b
    trace.note(f"D0 = {D0} from support pair {a}, {b}")

    if D0 >= 3:
        rec = _pin_agreeing(rec, a, b)
        trace.values["alpha"], trace.values["beta"] = f[a], f[b]
        trace.note(f"pin the {n - D0} agreeing arguments")
        return _reduce_geneq(rec, trace)

    if D0 == 2:
        j, k = [t for t in range(n) if a[t] != b[t]]
        grec = _pin_agreeing(rec, a, b)
        g = grec.signature
        if g.values[0].is_zero() and g.values[3].is_zero():
            trace.note(f"pinning gives a generalized disequality on ({j},{k}); compose it into argument {j}")
            rec = rec.apply_binary(grec, j)
            f = rec.signature
            flip = lambda x: tuple(1 - v if t == j else v for t, v in enumerate(x))
            a, b = flip(b), flip(a)
            if a[j] == 1:
                a, b = b, a
            trace.pairs["a"], trace.pairs["b"] = a, b
        alpha, beta = f[a], f[b]
        trace.values["alpha"], trace.values["beta"] = alpha, beta
        P = (j, k)
        ref = _restriction(f, P, {t: a[t] for t in range(n) if t not in P})
        D1, x, y = _second_level(f, P, ref)
        trace.D["D1"] = D1
        trace.pairs["a1"] = tuple(x[t] for t in sorted(x))
        trace.pairs["b1"] = tuple(y[t] for t in sorted(y))
        h, diff = _pin_outside(rec, P, x, y)
        gx = _restriction(f, P, x)
        gy = _restriction(f, P, y)
        diag = gy.values[1].is_zero() and gy.values[2].is_zero()
        lam, mu = (gy.values[0], gy.values[3]) if diag else (gy.values[1], gy.values[2])
        trace.values.update({"alpha": gx.values[0], "beta": gx.values[3], "lambda": lam, "mu": mu})
        xa = tuple(x[t] for t in diff)
        trace.note(f"D1 = {D1}; g' is {'diagonal' if diag else 'anti-diagonal'}; a = {xa}")
        if D1 >= 3:
            if diag:
                pins = {0: "0", 1: "0"} if not lam.is_zero() else {0: "1", 1: "1"}
            else:
                pins = {0: "0"} if not lam.is_zero() else {0: "1"}
            h = h.pin_many(pins)
            trace.note(f"pin the first inputs to {''.join(pins[t] for t in sorted(pins))}")
            return _reduce_geneq(h, trace)
        if D1 == 2:
            if diag:
                if xa in ((0, 0), (1, 1)):
                    trace.note("arity-4 function of full-rank equality shape")
                    return HardCoreResult(GENEQ4, h.signature, h, trace)
                hh = h.join(h, [(2, 2), (3, 3)], "pair two copies on the last two inputs")
                trace.note("pair two copies on the last two inputs to reach the full-rank equality shape")
                return HardCoreResult(GENEQ4, hh.signature, hh, trace)
            pins = {0: "0"} if not lam.is_zero() else {0: "1"}
            h = h.pin_many(pins)
            trace.note(f"pin the first input to {pins[0]}")
            assert _ternary_entangled(h.signature)
            return HardCoreResult(TERNARY, h.signature, h, trace)
        assert _ternary_entangled(h.signature)
        trace.note("D1 = 1 gives a ternary directly")
        return HardCoreResult(TERNARY, h.signature, h, trace)

    # D0 == 1
    (j,) = [t for t in range(n) if a[t] != b[t]]
    grec = _pin_agreeing(rec, a, b)  # unary [alpha, beta]
    alpha, beta = grec.signature.values
    trace.values["alpha"], trace.values["beta"] = alpha, beta
    P = (j,)
    D2, x, y = _second_level(f, P, grec.signature)
    trace.D["D2"] = D2
    trace.pairs["a2"] = tuple(x[t] for t in sorted(x))
    trace.pairs["b2"] = tuple(y[t] for t in sorted(y))
    gy = _restriction(f, P, y)
    lam, mu = gy.values
    trace.values["lambda"], trace.values["mu"] = lam, mu
    h, diff = _pin_outside(rec, P, x, y)
    trace.note(f"D2 = {D2}")
    if D2 >= 3:
        h = h.pin_many({0: "0" if not lam.is_zero() else "1"})
        trace.note("pin the first input")
        return _reduce_geneq(h, trace)
    if D2 == 2:
        assert _ternary_entangled(h.signature)
        trace.note("D2 = 2 gives a ternary directly")
        return HardCoreResult(TERNARY, h.signature, h, trace)
    # D2 == 1: binary h on (j, k)
    (k,) = diff
    P = (j, k)
    hb = h.signature
    D3, x3, y3 = _second_level(f, P, hb)
    trace.D["D3"] = D3
    trace.pairs["a3"] = tuple(x3[t] for t in sorted(x3))
    trace.pairs["b3"] = tuple(y3[t] for t in sorted(y3))
    H, diff3 = _pin_outside(rec, P, x3, y3)
    hx = _restriction(f, P, x3)
    hy = _restriction(f, P, y3)
    for name, v in zip(("alpha", "beta", "lambda", "mu"), hx.values):
        trace.values[name] = v
    for name, v in zip(("alpha'", "beta'", "lambda'", "mu'"), hy.values):
        trace.values[name] = v
    trace.note(f"D3 = {D3}")
    if D3 == 1:
        assert _ternary_entangled(H.signature)
        return HardCoreResult(TERNARY, H.signature, H, trace)
    if D3 == 2:
        H = H.join(grec, [(3, 0)], "connect the unary [alpha, beta] to the last input")
        assert _ternary_entangled(H.signature)
        return HardCoreResult(TERNARY, H.signature, H, trace)
    labels = [(0, 0), (0, 1), (1, 0), (1, 1)]
    for lab, u, v in zip(labels, hx.values, hy.values):
        if not u.is_zero() and not v.is_zero():
            H2 = H.pin_many({0: str(lab[0]), 1: str(lab[1])})
            trace.note(f"pin the first two inputs to {lab[0]}{lab[1]}")
            return _reduce_geneq(H2, trace)
    for pos, bit in ((0, "1"), (0, "0"), (1, "1"), (1, "0")):
        H2 = H.pin(pos, bit)
        if _is_geneq(H2.signature):
            trace.note(f"pin input {pos} to {bit}")
            return _reduce_geneq(H2, trace)
    raise SearchExhausted("no pinning reaches a generalized equality in the D3 >= 3 case")
