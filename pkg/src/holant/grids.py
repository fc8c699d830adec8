"""Signature grids, gadgets with dangling edges, rotation systems and file I/O."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Hashable, List, Optional, Tuple, Union

from .algebra import Mat2, default_backend, parse_scalar
from .signatures import Signature, SymSignature, matrix_signature, to_symmetric

End = Tuple[Hashable, int]  # (vertex id, argument slot)


class GridError(ValueError):
    """Invalid grid or gadget."""


@dataclass
class SignatureGrid:
    """Multigraph with a signature on every vertex.

    Each edge joins two (vertex, slot) ends; slot j of vertex v is the j-th
    argument of v's signature.  `rotation[v]` optionally lists v's slots in
    cyclic (counter-clockwise) order.
    """

    vertices: Dict[Hashable, Signature] = field(default_factory=dict)
    edges: List[Tuple[End, End]] = field(default_factory=list)
    rotation: Optional[Dict[Hashable, List[int]]] = None

    def add_vertex(self, sig: Signature, vid: Optional[Hashable] = None) -> Hashable:
        if vid is None:
            vid = len(self.vertices)
            while vid in self.vertices:
                vid += 1
        if vid in self.vertices:
            raise GridError(f"duplicate vertex id {vid!r}")
        self.vertices[vid] = sig
        return vid

    def add_edge(self, a: End, b: End) -> None:
        self.edges.append((tuple(a), tuple(b)))

    @property
    def dangling_ends(self) -> List[End]:
        return []

    def order(self) -> Dict[Hashable, int]:
        """Insertion rank of each vertex (used for deterministic tie-breaks)."""
        return {v: k for k, v in enumerate(self.vertices)}

    def backend(self) -> str:
        for sig in self.vertices.values():
            return sig.backend
        return default_backend()

    def copy(self) -> "SignatureGrid":
        return SignatureGrid(dict(self.vertices), list(self.edges),
                             None if self.rotation is None else {v: list(r) for v, r in self.rotation.items()})

    def with_natural_rotation(self) -> "SignatureGrid":
        g = self.copy()
        g.rotation = {v: list(range(s.arity)) for v, s in self.vertices.items()}
        return g

    def components(self) -> List[List[Hashable]]:
        parent = {v: v for v in self.vertices}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for (u, _), (w, _) in self.edges:
            ru, rw = find(u), find(w)
            if ru != rw:
                parent[ru] = rw
        groups: Dict[Hashable, List[Hashable]] = {}
        for v in self.vertices:
            groups.setdefault(find(v), []).append(v)
        return list(groups.values())


@dataclass
class Gadget(SignatureGrid):
    """A grid fragment with ordered dangling edges; dangling[k] is output argument k."""

    dangling: List[End] = field(default_factory=list)

    @property
    def dangling_ends(self) -> List[End]:
        return list(self.dangling)

    @property
    def arity(self) -> int:
        return len(self.dangling)

    def copy(self) -> "Gadget":
        return Gadget(dict(self.vertices), list(self.edges),
                      None if self.rotation is None else {v: list(r) for v, r in self.rotation.items()},
                      list(self.dangling))

    @classmethod
    def from_signature(cls, f: Signature) -> "Gadget":
        g = cls()
        v = g.add_vertex(f)
        g.dangling = [(v, j) for j in range(f.arity)]
        return g

    # Construction steps used by gadget recipes.  Each returns a new gadget.
    def attach_unary(self, pos: int, u: Signature) -> "Gadget":
        g = self.copy()
        end = g.dangling.pop(pos)
        v = g.add_vertex(u)
        g.add_edge(end, (v, 0))
        return g

    def loop(self, i: int, j: int) -> "Gadget":
        if i == j:
            raise GridError("a self-loop needs two distinct dangling edges")
        g = self.copy()
        a, b = g.dangling[i], g.dangling[j]
        g.add_edge(a, b)
        g.dangling = [e for k, e in enumerate(g.dangling) if k not in (i, j)]
        return g

    def reorder(self, order: List[int]) -> "Gadget":
        """New dangling list [dangling[order[0]], dangling[order[1]], ...]."""
        if sorted(order) != list(range(len(self.dangling))):
            raise GridError("reorder needs a permutation of the dangling edges")
        g = self.copy()
        g.dangling = [self.dangling[k] for k in order]
        return g

    def merge(self, other: "Gadget", joins: List[Tuple[int, int]] = ()) -> "Gadget":
        """Disjoint union; joins pair dangling self[i] with other[j].

        Remaining dangling edges: self's (in order) then other's (in order).
        """
        g = self.copy()
        rename = {}
        for v, sig in other.vertices.items():
            rename[v] = g.add_vertex(sig)
        for (u, s), (w, t) in other.edges:
            g.add_edge((rename[u], s), (rename[w], t))
        odang = [(rename[v], s) for v, s in other.dangling]
        used_self = {i for i, _ in joins}
        used_other = {j for _, j in joins}
        for i, j in joins:
            g.add_edge(g.dangling[i], odang[j])
        g.dangling = [e for k, e in enumerate(g.dangling) if k not in used_self] + \
                     [e for k, e in enumerate(odang) if k not in used_other]
        g.rotation = None
        return g

    def holographic(self, m: Mat2, transpose: bool = False) -> "Gadget":
        """Attach the binary f_m to every dangling edge: realises m o f (or m^T o f)."""
        g = self.copy()
        fm = matrix_signature(m)
        new = []
        for end in g.dangling:
            v = g.add_vertex(fm)
            inner, outer = (0, 1) if transpose else (1, 0)
            g.add_edge(end, (v, inner))
            new.append((v, outer))
        g.dangling = new
        return g

    def close(self) -> SignatureGrid:
        if self.dangling:
            raise GridError("gadget still has dangling edges")
        return SignatureGrid(dict(self.vertices), list(self.edges), self.rotation)


def validate(grid: SignatureGrid) -> List[str]:
    """Diagnostics for every invariant violation; an empty list means valid."""
    diags: List[str] = []
    used: Dict[End, int] = {}
    ends = [e for edge in grid.edges for e in edge] + list(grid.dangling_ends)
    for v, s in ends:
        if v not in grid.vertices:
            diags.append(f"edge end ({v!r}, {s}) refers to unknown vertex")
            continue
        if not (isinstance(s, int) and 0 <= s < grid.vertices[v].arity):
            diags.append(f"vertex {v!r}: slot {s} out of range for arity {grid.vertices[v].arity}")
            continue
        used[(v, s)] = used.get((v, s), 0) + 1
    for (v, s), cnt in used.items():
        if cnt > 1:
            diags.append(f"vertex {v!r}: duplicate slot {s} used {cnt} times")
    for v, sig in grid.vertices.items():
        deg = sum(1 for u, _ in used if u == v)
        if deg != sig.arity:
            diags.append(f"vertex {v!r}: arity mismatch, signature arity {sig.arity} but degree {deg}")
    if grid.rotation is not None:
        for v, order in grid.rotation.items():
            if v not in grid.vertices:
                diags.append(f"rotation lists unknown vertex {v!r}")
            elif sorted(order) != list(range(grid.vertices[v].arity)):
                diags.append(f"vertex {v!r}: rotation {order} must list each slot exactly once")
        for v in grid.vertices:
            if v not in grid.rotation and grid.vertices[v].arity:
                diags.append(f"vertex {v!r}: missing from rotation system")
    backends = {sig.backend for sig in grid.vertices.values()}
    if len(backends) > 1:
        diags.append("signatures mix exact and float backends")
    return diags


def ensure_valid(grid: SignatureGrid) -> None:
    diags = validate(grid)
    if diags:
        raise GridError("; ".join(diags))


def effective_signature(g: Gadget) -> Signature:
    """Sum over internal edges of the product of vertex values, as a function of the dangling edges."""
    from .evaluate import contract_network
    ensure_valid(g)
    return contract_network(g, list(g.dangling_ends))


def genus(grid: SignatureGrid) -> int:
    """Genus of the embedding given by the rotation system (summed over components)."""
    if grid.rotation is None:
        raise GridError("genus needs a rotation system")
    ensure_valid(grid)
    if grid.dangling_ends:
        raise GridError("genus is defined for closed grids")
    partner: Dict[End, End] = {}
    for a, b in grid.edges:
        partner[a] = b
        partner[b] = a
    succ: Dict[End, End] = {}
    for v, order in grid.rotation.items():
        for k, s in enumerate(order):
            succ[(v, s)] = (v, order[(k + 1) % len(order)])
    total = 0
    for comp in grid.components():
        cset = set(comp)
        darts = [d for d in partner if d[0] in cset]
        seen = set()
        faces = 0
        for d in darts:
            if d in seen:
                continue
            faces += 1
            cur = d
            while cur not in seen:
                seen.add(cur)
                cur = succ[partner[cur]]
        nv = len(comp)
        ne = len(darts) // 2
        if ne == 0:
            faces = 1
        total += (2 - nv + ne - faces) // 2
    return total


# ------------------------------------------------------------------ file I/O

def signature_from_entry(entry: dict, backend: Optional[str] = None, where: str = "") -> Signature:
    backend = backend or default_backend()
    name = entry.get("name", where)
    try:
        if "symmetric" in entry and entry["symmetric"] is not None:
            vals = [parse_scalar(str(v), backend) for v in entry["symmetric"]]
            sig = SymSignature(vals, backend).expand()
            if "values" in entry:
                dense = [parse_scalar(str(v), backend) for v in entry["values"]]
                if not (Signature(dense, backend=backend) == sig):
                    raise ValueError("values disagree with symmetric form")
        else:
            vals = [parse_scalar(str(v), backend) for v in entry["values"]]
            sig = Signature(vals, backend=backend)
    except (ValueError, KeyError, TypeError) as exc:
        raise GridError(f"signature {name!r}: {exc}") from exc
    if "arity" in entry and entry["arity"] != sig.arity:
        raise GridError(f"signature {name!r}: arity {entry['arity']} but {len(sig.values)} values")
    return sig


def signature_entry(name: str, sig: Signature) -> dict:
    entry = {"name": name, "arity": sig.arity, "values": [str(v) for v in sig.values]}
    s = to_symmetric(sig)
    if s is not None and sig.arity > 1:
        entry["symmetric"] = [str(v) for v in s.values]
    return entry


def _vid(x):
    return x


def grid_from_dict(data: dict, backend: Optional[str] = None) -> SignatureGrid:
    sigs = {}
    for name, entry in (data.get("signatures") or {}).items():
        sigs[name] = signature_from_entry(entry, backend, name)
    dangling = data.get("dangling") or []
    grid: SignatureGrid = Gadget() if dangling else SignatureGrid()
    for k, vert in enumerate(data.get("vertices") or []):
        try:
            sig = sigs[vert["sig"]]
        except KeyError as exc:
            raise GridError(f"vertex entry {k}: unknown signature {vert.get('sig')!r}") from exc
        grid.add_vertex(sig, _vid(vert.get("id", k)))
    for k, edge in enumerate(data.get("edges") or []):
        try:
            (u, s), (w, t) = edge
        except (TypeError, ValueError) as exc:
            raise GridError(f"edge {k}: expected [[v, slot], [v, slot]]") from exc
        grid.add_edge((u, s), (w, t))
    if dangling:
        grid.dangling = [tuple(e) for e in dangling]
    rot = data.get("rotation")
    if rot is not None:
        lookup = {str(v): v for v in grid.vertices}
        grid.rotation = {lookup.get(str(v), v): list(order) for v, order in rot.items()}
    return grid


def grid_to_dict(grid: SignatureGrid) -> dict:
    names: Dict[int, str] = {}
    entries = {}
    keys = []
    for v, sig in grid.vertices.items():
        for k, (key_sig, nm) in enumerate(keys):
            if key_sig == sig:
                names[v] = nm
                break
        else:
            nm = f"f{len(keys)}"
            keys.append((sig, nm))
            entries[nm] = signature_entry(nm, sig)
            names[v] = nm
    data = {
        "signatures": entries,
        "vertices": [{"id": v, "sig": names[v]} for v in grid.vertices],
        "edges": [[[u, s], [w, t]] for (u, s), (w, t) in grid.edges],
    }
    if grid.dangling_ends:
        data["dangling"] = [[v, s] for v, s in grid.dangling_ends]
    if grid.rotation is not None:
        data["rotation"] = {str(v): list(o) for v, o in grid.rotation.items()}
    return data


def load_grid(path: Union[str, Path], backend: Optional[str] = None) -> SignatureGrid:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise GridError(f"{path}: line {exc.lineno}: {exc.msg}") from exc
    return grid_from_dict(data, backend)


def save_grid(grid: SignatureGrid, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(grid_to_dict(grid), fh, indent=1)


def graph_grid(edges: List[Tuple[int, int]], make_sig, n_vertices: Optional[int] = None) -> SignatureGrid:
    """Grid on a simple graph: vertex v gets make_sig(degree), slots in edge order."""
    n = n_vertices if n_vertices is not None else 1 + max(max(e) for e in edges)
    deg = [0] * n
    ends = []
    for u, w in edges:
        ends.append(((u, deg[u]), (w, deg[w])))
        deg[u] += 1
        deg[w] += 1
    grid = SignatureGrid()
    for v in range(n):
        grid.add_vertex(make_sig(deg[v]), v)
    for a, b in ends:
        grid.add_edge(a, b)
    return grid
