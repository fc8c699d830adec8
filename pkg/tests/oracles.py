"""Independent brute-force oracles and random generators shared by the tests.

Oracles work on plain complex numbers or integers and never call the code
under test, so agreement with them is real evidence.
"""
from __future__ import annotations

import itertools
import random
from typing import Dict, List, Sequence, Tuple

import numpy as np

from holant.algebra import Mat2, scalar, zeta
from holant.grids import SignatureGrid
from holant.signatures import Signature

TOL = 1e-7


# ------------------------------------------------------------ scalars

def rand_scalar(rng: random.Random, nonzero: bool = False, terms: int = 2):
    """A small random element of Q(zeta_24)."""
    while True:
        x = scalar(0)
        for _ in range(rng.randint(1, terms)):
            x = x + rng.randint(-2, 2) * zeta(rng.randrange(24))
        if not nonzero or not x.is_zero():
            return x


def rand_signature(rng: random.Random, arity: int, zero_prob: float = 0.2) -> Signature:
    vals = [scalar(0) if rng.random() < zero_prob else rand_scalar(rng) for _ in range(1 << arity)]
    if all(v.is_zero() for v in vals):
        vals[rng.randrange(len(vals))] = scalar(1)
    return Signature(vals, arity)


def rand_invertible(rng: random.Random) -> Mat2:
    while True:
        m = Mat2(*(rand_scalar(rng) for _ in range(4)))
        if m.is_invertible():
            return m


def as_complex(f: Signature) -> np.ndarray:
    return np.array([v.to_complex() for v in f.values], dtype=complex)


# ------------------------------------------------------------ grids

def rand_closed_grid(rng: random.Random, make_sig, max_edges: int = 8, max_arity: int = 4) -> SignatureGrid:
    """Random closed multigraph (loops and parallel edges allowed) with signatures from make_sig(arity)."""
    while True:
        n_edges = rng.randint(1, max_edges)
        n_ends = 2 * n_edges
        nv = rng.randint(max(1, -(-n_ends // max_arity)), min(n_ends, 6))
        degs = [1] * nv
        for _ in range(n_ends - nv):
            choices = [v for v in range(nv) if degs[v] < max_arity]
            if not choices:
                break
            degs[rng.choice(choices)] += 1
        if sum(degs) == n_ends:
            break
    ends = [(v, s) for v in range(nv) for s in range(degs[v])]
    rng.shuffle(ends)
    grid = SignatureGrid()
    for v in range(nv):
        grid.add_vertex(make_sig(degs[v]), v)
    for k in range(0, len(ends), 2):
        grid.add_edge(ends[k], ends[k + 1])
    return grid


def naive_holant(grid: SignatureGrid) -> complex:
    """Sum over edge assignments of the vertex product, in complex arithmetic."""
    slot_edge: Dict[Tuple, int] = {}
    for e, (a, b) in enumerate(grid.edges):
        slot_edge[a] = e
        slot_edge[b] = e
    vals = {v: [x.to_complex() for x in f.values] for v, f in grid.vertices.items()}
    total = 0j
    for sigma in itertools.product((0, 1), repeat=len(grid.edges)):
        prod = 1 + 0j
        for v, f in grid.vertices.items():
            idx = 0
            for s in range(f.arity):
                idx = 2 * idx + sigma[slot_edge[(v, s)]]
            prod *= vals[v][idx]
            if prod == 0:
                break
        total += prod
    return total


def count_perfect_matchings(n: int, edges: Sequence[Tuple[int, int]]) -> int:
    """Edge subsets covering every vertex exactly once."""
    count = 0
    for k in range(len(edges) + 1):
        if 2 * k != n:
            continue
        for sub in itertools.combinations(edges, k):
            seen = set()
            ok = True
            for u, w in sub:
                if u in seen or w in seen:
                    ok = False
                    break
                seen.update((u, w))
            if ok:
                count += 1
    return count


K4_EDGES = [(u, w) for u in range(4) for w in range(u + 1, 4)]
CUBE_EDGES = [(u, u ^ (1 << b)) for u in range(8) for b in range(3) if u < u ^ (1 << b)]
PETERSEN_EDGES = ([(k, (k + 1) % 5) for k in range(5)] + [(k, k + 5) for k in range(5)]
                  + [(5 + k, 5 + (k + 2) % 5) for k in range(5)])


# ------------------------------------------------------------ linear algebra

def np_rank(values: np.ndarray, n: int, rows: Sequence[int]) -> int:
    """Rank of the flattening of a 2^n tensor with `rows` as row arguments."""
    t = values.reshape((2,) * n)
    cols = [j for j in range(n) if j not in rows]
    m = np.transpose(t, list(rows) + cols).reshape(1 << len(rows), 1 << len(cols))
    s = np.linalg.svd(m, compute_uv=False)
    return int((s > TOL * max(1.0, s[0])).sum())


def np_decomposable(f: Signature) -> bool:
    """Some proper bipartition of the arguments gives a rank-one flattening."""
    n = f.arity
    v = as_complex(f)
    for mask in range(1, (1 << (n - 1))):
        rows = [j for j in range(n) if mask >> j & 1]
        if np_rank(v, n, rows) == 1:
            return True
    return False


# ------------------------------------------------------------ affine functions

def rand_affine(rng: random.Random, n: int, c=None) -> Tuple[Signature, dict]:
    """Random affine signature built from pivot coordinates, plus its description."""
    k = rng.randint(0, n)
    pivots = sorted(rng.sample(range(n), k))
    deps = {}
    for j in range(n):
        if j in pivots:
            continue
        deps[j] = ([p for p in pivots if rng.random() < 0.5], rng.randint(0, 1))
    lin = {p: rng.randrange(4) for p in pivots}
    quad = {(a, b) for a in pivots for b in pivots if a < b and rng.random() < 0.4}
    c = scalar(1) * zeta(rng.randrange(24)) * rng.randint(1, 3) if c is None else c

    def fn(*x):
        for j, (ps, b) in deps.items():
            if x[j] != (sum(x[p] for p in ps) + b) % 2:
                return 0
        ph = sum(lin[p] * x[p] for p in pivots) + 2 * sum(x[a] * x[b] for a, b in quad)
        return c * zeta(6 * (ph % 4))

    return Signature.from_function(n, fn), {"pivots": pivots, "deps": deps, "lin": lin, "quad": quad}


def brute_gauss(n: int, lin: Sequence[int], quad, const: int = 0) -> complex:
    total = 0j
    for x in itertools.product((0, 1), repeat=n):
        e = const + sum(l * b for l, b in zip(lin, x)) + 2 * sum(x[j] * x[k] for j, k in quad)
        total += 1j ** (e % 4)
    return total


def close(a: complex, b: complex) -> bool:
    return abs(a - b) <= TOL * max(1.0, abs(a), abs(b))


# ------------------------------------------------------------ family generators

def _shuffle_args(rng: random.Random, f: Signature) -> Signature:
    from holant.signatures import permute
    rho = list(range(f.arity))
    rng.shuffle(rho)
    return permute(f, rho)


def _product_of_blocks(rng: random.Random, n: int, block, max_block: int) -> Signature:
    from holant.signatures import tensor
    parts = []
    left = n
    while left:
        k = rng.randint(1, min(max_block, left))
        parts.append(block(k))
        left -= k
    return _shuffle_args(rng, tensor(*parts))


def rand_T_member(rng: random.Random, n: int) -> Signature:
    """Product of random unary and binary factors on shuffled arguments."""
    return _product_of_blocks(rng, n, lambda k: rand_signature(rng, k, zero_prob=0.1), 2)


def rand_generalized_equality(rng: random.Random, k: int) -> Signature:
    vals = [scalar(0)] * (1 << k)
    a = rng.randrange(1 << k)
    vals[a] = rand_scalar(rng, nonzero=True)
    if rng.random() < 0.8:
        vals[a ^ ((1 << k) - 1)] = rand_scalar(rng, nonzero=True)
    return Signature(vals, k)


def rand_E_member(rng: random.Random, n: int) -> Signature:
    """Product of random generalized equalities on shuffled arguments."""
    return _product_of_blocks(rng, n, lambda k: rand_generalized_equality(rng, k), 4)


def rand_M_member(rng: random.Random, n: int) -> Signature:
    """Product of functions supported on inputs of weight at most one."""
    def block(k):
        vals = [scalar(0)] * (1 << k)
        for j in [0] + [1 << t for t in range(k)]:
            if rng.random() < 0.7:
                vals[j] = rand_scalar(rng, nonzero=True)
        if all(v.is_zero() for v in vals):
            vals[0] = scalar(1)
        return Signature(vals, k)
    return _product_of_blocks(rng, n, block, 3)


def rand_nondecomposable(rng: random.Random, n: int, zero_prob: float = 0.3) -> Signature:
    while True:
        f = rand_signature(rng, n, zero_prob)
        if not np_decomposable(f):
            return f


def rand_w_type(rng: random.Random) -> Tuple[Signature, Tuple[Mat2, Mat2, Mat2]]:
    """(A (x) B (x) C) o ONE_3 for random invertible A, B, C."""
    from holant.signatures import ONE, apply_matrix
    mats = tuple(rand_invertible(rng) for _ in range(3))
    f = ONE(3)
    for axis, m in enumerate(mats):
        f = apply_matrix(m, f, [axis])
    return f, mats
