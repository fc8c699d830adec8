"""Holant evaluation: brute force, tensor contraction and the tractable-family evaluators."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .algebra import Mat2, Scalar, i_power, scalar
from .signatures import Signature, bits_of, index_of, transform
from .grids import Gadget, GridError, SignatureGrid, ensure_valid


class EvaluationError(ValueError):
    """An evaluator's precondition does not hold."""


class ContractionError(EvaluationError):
    """An intermediate tensor would exceed the arity cap."""


def _slot_edges(grid: SignatureGrid) -> Dict[Hashable, List[int]]:
    """For each vertex, the edge index attached to each slot."""
    table = {v: [None] * s.arity for v, s in grid.vertices.items()}
    for e, (a, b) in enumerate(grid.edges):
        table[a[0]][a[1]] = e
        table[b[0]][b[1]] = e
    return table


def _require_closed(grid: SignatureGrid) -> None:
    ensure_valid(grid)
    if grid.dangling_ends:
        raise GridError("holant evaluation needs a grid without dangling edges")


def holant_bruteforce(grid: SignatureGrid) -> Scalar:
    """Sum over all 0/1 edge assignments of the product of vertex values."""
    _require_closed(grid)
    slots = _slot_edges(grid)
    items = [(sig, slots[v]) for v, sig in grid.vertices.items()]
    total = scalar(0, grid.backend())
    for sigma in product((0, 1), repeat=len(grid.edges)):
        term = scalar(1, grid.backend())
        for sig, es in items:
            v = sig.values[index_of([sigma[e] for e in es])]
            if v.is_zero():
                term = None
                break
            term = term * v
        if term is not None:
            total = total + term
    return total


def effective_bruteforce(g: Gadget) -> Signature:
    """Effective signature by enumerating internal edges for each dangling assignment."""
    ensure_valid(g)
    slots = {v: [None] * s.arity for v, s in g.vertices.items()}
    for e, (a, b) in enumerate(g.edges):
        slots[a[0]][a[1]] = ("in", e)
        slots[b[0]][b[1]] = ("in", e)
    for k, (v, s) in enumerate(g.dangling):
        slots[v][s] = ("out", k)
    be = g.backend()
    vals = []
    for ob in range(1 << len(g.dangling)):
        out = bits_of(ob, len(g.dangling))
        total = scalar(0, be)
        for sigma in product((0, 1), repeat=len(g.edges)):
            term = scalar(1, be)
            for v, sig in g.vertices.items():
                x = [sigma[i] if kind == "in" else out[i] for kind, i in slots[v]]
                term = term * sig.values[index_of(x)]
            total = total + term
        vals.append(total)
    return Signature(vals, len(g.dangling), be)


# ------------------------------------------------------------ contraction

def _reorder(values: Sequence, legs: List, new_legs: List) -> list:
    n = len(legs)
    pos = [legs.index(l) for l in new_legs]
    out = []
    for k in range(1 << n):
        nb = bits_of(k, n)
        old = [0] * n
        for t, p in enumerate(pos):
            old[p] = nb[t]
        out.append(values[index_of(old)])
    return out


def _trace_duplicates(legs: List, values: list, zero) -> Tuple[List, list]:
    """Sum out legs that appear twice on the same tensor (self-loops)."""
    while True:
        dup = next((l for l in legs if legs.count(l) == 2), None)
        if dup is None:
            return legs, values
        i = legs.index(dup)
        j = legs.index(dup, i + 1)
        rest = [l for k, l in enumerate(legs) if k not in (i, j)]
        n = len(legs)
        out = []
        for k in range(1 << len(rest)):
            rb = bits_of(k, len(rest))
            acc = zero
            for y in (0, 1):
                x = list(rb[:i]) + [y] + list(rb[i:])
                x = x[:j] + [y] + x[j:]
                acc = acc + values[index_of(x)]
            out.append(acc)
        legs, values = rest, out


def _contract_pair(A, B, zero):
    la, va = A
    lb, vb = B
    shared = [l for l in la if l in lb]
    ra = [l for l in la if l not in shared]
    rb = [l for l in lb if l not in shared]
    ma = _reorder(va, la, ra + shared)
    mb = _reorder(vb, lb, shared + rb)
    s, nb = 1 << len(shared), 1 << len(rb)
    out = []
    for i in range(1 << len(ra)):
        row = ma[i * s:(i + 1) * s]
        nz = [(k, x) for k, x in enumerate(row) if not x.is_zero()]
        for j in range(nb):
            acc = zero
            for k, x in nz:
                y = mb[k * nb + j]
                if not y.is_zero():
                    acc = acc + x * y
            out.append(acc)
    return ra + rb, out


def contract_network(grid: SignatureGrid, outputs: Optional[List] = None, max_arity: int = 22) -> Signature:
    """Greedy pairwise contraction.

    At each step the pair of tensors sharing an edge whose product has the
    smallest arity is contracted; ties go to the lowest vertex ranks.
    `outputs` lists the (vertex, slot) ends left open, in output order.
    """
    outputs = outputs or []
    be = grid.backend()
    zero = scalar(0, be)
    labels: Dict[Tuple, object] = {}
    for e, (a, b) in enumerate(grid.edges):
        labels[a] = e
        labels[b] = e
    for k, end in enumerate(outputs):
        labels[tuple(end)] = ("out", k)
    rank = grid.order()
    tensors = {}
    for v, sig in grid.vertices.items():
        legs = [labels[(v, s)] for s in range(sig.arity)]
        legs, vals = _trace_duplicates(legs, list(sig.values), zero)
        tensors[rank[v]] = (legs, vals)
    while True:
        best = None
        keys = sorted(tensors)
        for x_i, x in enumerate(keys):
            lx = tensors[x][0]
            if not lx:
                continue
            for y in keys[x_i + 1:]:
                ly = tensors[y][0]
                sh = sum(1 for l in lx if l in ly)
                if not sh:
                    continue
                size = len(lx) + len(ly) - 2 * sh
                cand = (size, x, y)
                if best is None or cand < best:
                    best = cand
        if best is None:
            break
        size, x, y = best
        if size > max_arity:
            raise ContractionError(f"intermediate arity {size} exceeds cap {max_arity}")
        tensors[x] = _contract_pair(tensors[x], tensors.pop(y), zero)
    # remaining tensors share no edges: combine by outer product
    legs: List = []
    vals = [scalar(1, be)]
    for k in sorted(tensors):
        l, v = tensors[k]
        vals = [a * b for a in vals for b in v]
        legs = legs + l
    want = [("out", k) for k in range(len(outputs))]
    vals = _reorder(vals, legs, want) if legs else vals
    return Signature(vals, len(outputs), be)


def holant_contract(grid: SignatureGrid, max_arity: int = 22) -> Scalar:
    _require_closed(grid)
    return contract_network(grid, [], max_arity).values[0]


# ------------------------------------------------------------ binary chains

def _factor_nodes(grid: SignatureGrid, check) -> Tuple[list, Scalar]:
    """Split every vertex into its tensor factors; returns (nodes, scalar).

    nodes: list of (labels per factor argument, factor signature).
    """
    from .entanglement import factorize
    slots = _slot_edges(grid)
    be = grid.backend()
    const = scalar(1, be)
    nodes = []
    for v, sig in grid.vertices.items():
        if sig.is_zero():
            return [], scalar(0, be)
        if sig.arity == 0:
            const = const * sig.values[0]
            continue
        for args, g in factorize(sig):
            if not check(g):
                raise EvaluationError(f"vertex {v!r}: factor on slots {list(args)} violates the precondition")
            nodes.append(([slots[v][a] for a in args], g))
    return nodes, const


def holant_binary_chain(grid: SignatureGrid) -> Scalar:
    """Holant of a grid whose signatures are products of unary and binary factors."""
    _require_closed(grid)
    nodes, const = _factor_nodes(grid, lambda g: g.arity <= 2)
    be = grid.backend()
    if const.is_zero():
        return const
    owners: Dict[int, List[Tuple[int, int]]] = {}
    for n, (labels, _) in enumerate(nodes):
        for p, l in enumerate(labels):
            owners.setdefault(l, []).append((n, p))
    done = [False] * len(nodes)
    total = const

    def other_end(label, n, p):
        a, b = owners[label]
        return b if a == (n, p) else a

    def step(vec, n, p):
        """Push vec through node n entered at position p; returns (vec, exit position or None)."""
        labels, g = nodes[n]
        if g.arity == 1:
            return [vec[0] * g.values[0] + vec[1] * g.values[1]], None
        out = []
        for y in (0, 1):
            acc = scalar(0, be)
            for x in (0, 1):
                acc = acc + vec[x] * (g.value(x, y) if p == 0 else g.value(y, x))
            out.append(acc)
        return out, 1 - p

    # paths start at unary factors
    for n, (labels, g) in enumerate(nodes):
        if done[n] or g.arity != 1:
            continue
        done[n] = True
        vec = list(g.values)
        label = labels[0]
        cur = (n, 0)
        while True:
            m, p = other_end(label, *cur)
            done[m] = True
            vec, q = step(vec, m, p)
            if q is None:
                break
            label = nodes[m][0][q]
            cur = (m, q)
        total = total * vec[0]
    # what is left are cycles of binary factors
    for n, (labels, g) in enumerate(nodes):
        if done[n]:
            continue
        acc = scalar(0, be)
        for x0 in (0, 1):
            vec = [scalar(1 if x == x0 else 0, be) for x in (0, 1)]
            # leave through position 1, come back through position 0
            done[n] = True
            vec, _ = step(vec, n, 0)
            label, cur = labels[1], (n, 1)
            while True:
                m, p = other_end(label, *cur)
                if m == n:
                    break
                done[m] = True
                vec, q = step(vec, m, p)
                label, cur = nodes[m][0][q], (m, q)
            acc = acc + vec[x0]
        total = total * acc
    return total


# ------------------------------------------------------------ generalized equalities

def _edge_weight(transform_m: Optional[Mat2], be: str) -> Tuple[Mat2, str]:
    if transform_m is None:
        return Mat2(1, 0, 0, 1, backend=be), "eq"
    w = transform_m.transpose() @ transform_m
    if w.is_diagonal() and w.is_invertible():
        return w, "eq"
    if w.is_antidiagonal() and w.is_invertible():
        return w, "neq"
    raise EvaluationError("transform M must have M^T M diagonal or anti-diagonal (orthogonal up to scalar, or K-like)")


def _generalized_support(g: Signature) -> Optional[list]:
    supp = g.support()
    n = g.arity
    if len(supp) > 2:
        return None
    if len(supp) == 2 and n >= 1 and supp[0] ^ supp[1] != (1 << n) - 1:
        return None
    return [(bits_of(k, n), g.values[k]) for k in supp]


def holant_generalized_equality(grid: SignatureGrid, transform_m: Optional[Mat2] = None) -> Scalar:
    """Holant when every signature of transform^-1 o grid is a product of generalized equalities.

    Each connected piece has at most two consistent assignments (a support
    point and its complement); they are propagated and their weights summed.
    With a transform M, the edges carry M^T M, which must be diagonal or
    anti-diagonal.
    """
    _require_closed(grid)
    be = grid.backend()
    w, mode = _edge_weight(transform_m, be)
    if transform_m is not None:
        inv = transform_m.to_backend(be).inverse()
        g2 = SignatureGrid({v: transform(inv, s) for v, s in grid.vertices.items()}, list(grid.edges))
    else:
        g2 = grid
    nodes, const = _factor_nodes(g2, lambda g: _generalized_support(g) is not None)
    if const.is_zero():
        return const
    supports = [_generalized_support(g) for _, g in nodes]
    owners: Dict[int, List[Tuple[int, int]]] = {}
    for n, (labels, _) in enumerate(nodes):
        for p, l in enumerate(labels):
            owners.setdefault(l, []).append((n, p))
    seen = [False] * len(nodes)
    total = const
    for start in range(len(nodes)):
        if seen[start]:
            continue
        comp_sum = scalar(0, be)
        comp_nodes = None
        for choice in supports[start]:
            assigned = {start: choice}
            weight = choice[1]
            queue = [start]
            done_labels = set()
            ok = True
            while queue and ok:
                n = queue.pop()
                bits = assigned[n][0]
                for p, l in enumerate(nodes[n][0]):
                    if l in done_labels:
                        continue
                    done_labels.add(l)
                    a, b = owners[l]
                    m, q = b if a == (n, p) else a
                    x = bits[p]
                    y = x if mode == "eq" else 1 - x
                    weight = weight * w[x, y]
                    if m in assigned:
                        if assigned[m][0][q] != y:
                            ok = False
                            break
                        continue
                    match = [c for c in supports[m] if c[0][q] == y]
                    if not match:
                        ok = False
                        break
                    assigned[m] = match[0]
                    weight = weight * match[0][1]
                    queue.append(m)
            comp_nodes = comp_nodes or set(assigned)
            if ok:
                comp_sum = comp_sum + weight
                comp_nodes = set(assigned)
        if comp_nodes is None:
            comp_nodes = {start}
        # mark the whole component, even when a branch died early
        stack = [start]
        while stack:
            n = stack.pop()
            if seen[n]:
                continue
            seen[n] = True
            for l in nodes[n][0]:
                for m, _ in owners[l]:
                    if not seen[m]:
                        stack.append(m)
        total = total * comp_sum
    return total


# ------------------------------------------------------------ affine machinery

def _mask(bits: Sequence[int]) -> int:
    return sum(1 << j for j, b in enumerate(bits) if b)


def _unmask(m: int, n: int) -> tuple:
    return tuple((m >> j) & 1 for j in range(n))


def xor_basis(vectors: Sequence[int]) -> Dict[int, int]:
    """Reduced basis {pivot bit: vector}; each pivot bit occurs in exactly one vector."""
    basis: Dict[int, int] = {}
    for v in vectors:
        for p, b in basis.items():
            if v >> p & 1:
                v ^= b
        if not v:
            continue
        p = (v & -v).bit_length() - 1
        for q in list(basis):
            if basis[q] >> p & 1:
                basis[q] ^= v
        basis[p] = v
    return basis


def _reduce_by(v: int, basis: Dict[int, int]) -> int:
    for p, b in basis.items():
        if v >> p & 1:
            v ^= b
    return v


@dataclass
class AffineForm:
    """c * i^(l.x + 2 q(x)) on the affine space offset + span(basis), zero elsewhere.

    Bit masks use bit j for argument j.  `basis` maps a pivot argument to a
    basis vector; `lin` holds Z4 coefficients and `quad` the cross terms
    (pairs j < k) of the F2 quadratic part.
    """

    arity: int
    c: Scalar
    offset: int
    basis: Dict[int, int]
    lin: List[int]
    quad: set = field(default_factory=set)

    def in_support(self, x: int) -> bool:
        return _reduce_by(x ^ self.offset, self.basis) == 0

    def phase(self, x: int) -> int:
        bits = _unmask(x, self.arity)
        ph = sum(l * b for l, b in zip(self.lin, bits))
        ph += 2 * sum(bits[j] * bits[k] for j, k in self.quad)
        return ph % 4

    def evaluate(self, bits: Sequence[int]):
        x = _mask(bits)
        if not self.in_support(x):
            return self.c * 0
        return self.c * i_power(self.phase(x), self.c.backend)

    def to_signature(self) -> Signature:
        n = self.arity
        return Signature([self.evaluate(bits_of(k, n)) for k in range(1 << n)], n, self.c.backend)

    def constraints(self) -> List[Tuple[int, int]]:
        """Equations (mask, rhs) cutting out the support: parity(x & mask) == rhs."""
        out = []
        for m in range(self.arity):
            if m in self.basis:
                continue
            mask = 1 << m
            for p, b in self.basis.items():
                if b >> m & 1:
                    mask |= 1 << p
            out.append((mask, self.offset >> m & 1))
        return out


def affine_normal_form(f: Signature) -> Optional[AffineForm]:
    """The affine form of f, or None when f is not affine."""
    n = f.arity
    be = f.backend
    supp = f.support()
    if not supp:
        return AffineForm(n, scalar(0, be), 0, {j: 1 << j for j in range(n)}, [0] * n)
    pts = [_mask(bits_of(k, n)) for k in supp]
    x0 = pts[0]
    basis = xor_basis([p ^ x0 for p in pts])
    if len(pts) != 1 << len(basis):
        return None
    offset = _reduce_by(x0, basis)
    val = {p: f.values[index_of(_unmask(p, n))] for p in pts}
    if offset not in val:
        return None
    c = val[offset]
    units = [i_power(k, be) for k in range(4)]
    phase = {}
    for p in pts:
        r = val[p] / c
        k = next((k for k in range(4) if r == units[k]), None)
        if k is None:
            return None
        phase[p] = k
    pivots = sorted(basis)
    lam = {p: phase[offset ^ basis[p]] for p in pivots}
    quad = set()
    for a_i, a in enumerate(pivots):
        for b in pivots[a_i + 1:]:
            d = (phase[offset ^ basis[a] ^ basis[b]] - lam[a] - lam[b]) % 4
            if d == 2:
                quad.add((a, b))
            elif d != 0:
                return None
    lin = [lam.get(j, 0) for j in range(n)]
    form = AffineForm(n, c, offset, basis, lin, quad)
    for p in pts:
        if form.phase(p) != phase[p]:
            return None
    return form


class _PhasePoly:
    """i^(const + sum lin_j x_j + 2 sum_{quad} x_j x_k) over F2 variables."""

    def __init__(self):
        self.const = 0
        self.lin: Dict[int, int] = {}
        self.quad: Dict[int, set] = {}

    def add_lin(self, j, a):
        self.lin[j] = (self.lin.get(j, 0) + a) % 4

    def toggle(self, j, k):
        if j == k:
            self.add_lin(j, 2)
            return
        for a, b in ((j, k), (k, j)):
            s = self.quad.setdefault(a, set())
            if b in s:
                s.remove(b)
            else:
                s.add(b)

    def remove(self, j) -> Tuple[int, set]:
        lj = self.lin.pop(j, 0)
        nbrs = self.quad.pop(j, set())
        for k in nbrs:
            self.quad[k].discard(j)
        return lj, nbrs

    def add_xor_times(self, coef: int, rhs: int, others: Sequence[int]):
        """Add coef * (rhs XOR x_others) to the phase (mod 4)."""
        self.const = (self.const + coef * rhs) % 4
        c2 = (coef * (1 - 2 * rhs)) % 4
        for r in others:
            self.add_lin(r, c2)
        if c2 % 2:
            others = list(others)
            for a in range(len(others)):
                for b in range(a + 1, len(others)):
                    self.toggle(others[a], others[b])

    def substitute(self, p: int, rhs: int, others: Sequence[int]):
        """Replace x_p by rhs XOR (XOR of x_r for r in others)."""
        lp, nbrs = self.remove(p)
        self.add_xor_times(lp, rhs, others)
        for q in nbrs:
            # 2 x_p x_q = 2 (rhs + sum x_r) x_q  (mod 4)
            if rhs:
                self.add_lin(q, 2)
            for r in others:
                self.toggle(r, q)


def _eliminate(poly: _PhasePoly, variables: set, constraints: List[Tuple[int, int]], be: str) -> Scalar:
    zero = scalar(0, be)
    factor = scalar(1, be)
    variables = set(variables)
    cons = list(constraints)

    def bits(mask):
        return [j for j in range(mask.bit_length()) if mask >> j & 1]

    def substitute_everywhere(p, rhs, others):
        nonlocal cons
        poly.substitute(p, rhs, others)
        variables.discard(p)
        rmask = sum(1 << r for r in others)
        cons = [((m ^ (1 << p) ^ rmask, b ^ rhs) if m >> p & 1 else (m, b)) for m, b in cons]

    while cons:
        m, b = cons.pop()
        if m == 0:
            if b:
                return zero
            continue
        ones = bits(m)
        p = ones[0]
        substitute_everywhere(p, b, ones[1:])
    two = scalar(2, be)
    while variables:
        j = min(variables)
        variables.discard(j)
        lj, nbrs = poly.remove(j)
        nbrs = sorted(nbrs)
        if lj % 2:
            factor = factor * (1 + i_power(lj, be))
            e = 3 if lj == 1 else 1
            for r in nbrs:
                poly.add_lin(r, e)
            for a in range(len(nbrs)):
                for c in range(a + 1, len(nbrs)):
                    poly.toggle(nbrs[a], nbrs[c])
        else:
            half = lj // 2
            if not nbrs:
                if half:
                    return zero
                factor = factor * two
                continue
            factor = factor * two
            substitute_everywhere(nbrs[0], half, nbrs[1:])
    return factor * i_power(poly.const, be)


def gauss_sum(n: int, lin: Sequence[int], quad, const: int = 0, backend: Optional[str] = None) -> Scalar:
    """Sum over x in F2^n of i^(const + sum lin_j x_j + 2 sum_{(j,k) in quad} x_j x_k)."""
    poly = _PhasePoly()
    poly.const = const % 4
    for j, a in enumerate(lin):
        if a % 4:
            poly.add_lin(j, a)
    for j, k in quad:
        poly.toggle(j, k)
    return _eliminate(poly, set(range(n)), [], backend or "exact")


def holant_affine(grid: SignatureGrid) -> Scalar:
    """Polynomial-time holant when every vertex signature is affine."""
    _require_closed(grid)
    be = grid.backend()
    slots = _slot_edges(grid)
    poly = _PhasePoly()
    c = scalar(1, be)
    cons: List[Tuple[int, int]] = []
    for v, sig in grid.vertices.items():
        form = affine_normal_form(sig)
        if form is None:
            raise EvaluationError(f"vertex {v!r}: signature is not affine")
        c = c * form.c
        if c.is_zero():
            return c
        es = slots[v]
        for j, a in enumerate(form.lin):
            if a:
                poly.add_lin(es[j], a)
        for j, k in form.quad:
            poly.toggle(es[j], es[k])
        for mask, rhs in form.constraints():
            m = 0
            for j in range(sig.arity):
                if mask >> j & 1:
                    m ^= 1 << es[j]
            cons.append((m, rhs))
    return c * _eliminate(poly, set(range(len(grid.edges))), cons, be)


METHODS = ("auto", "brute", "contract", "chain", "geneq", "affine")


def holant(grid: SignatureGrid, method: str = "auto") -> Scalar:
    """Holant value by the named method.

    "auto" tries the polynomial-time evaluators whose preconditions hold
    (binary chains, generalized equalities, affine) and falls back to
    tensor contraction.
    """
    if method == "brute":
        return holant_bruteforce(grid)
    if method == "contract":
        return holant_contract(grid)
    if method == "chain":
        return holant_binary_chain(grid)
    if method == "geneq":
        return holant_generalized_equality(grid)
    if method == "affine":
        return holant_affine(grid)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    for fn in (holant_binary_chain, holant_generalized_equality, holant_affine):
        try:
            return fn(grid)
        except EvaluationError:
            continue
    return holant_contract(grid)
