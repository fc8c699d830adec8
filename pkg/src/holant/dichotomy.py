"""Complexity classifiers: verdicts with witnesses for each tractable case.

A PolyTime verdict names the case that holds and carries the transform that
certifies it.  A Hard verdict means every tractable case was checked and
disproved; each disproof records the signature that failed.  Transforms
that cannot be found by blind search are derived from GHZ witnesses of
ternary signatures realised from F.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

from .algebra import Mat2, factor_orthogonal_diagonal, named, scalar, zeta
from .entanglement import (DEGENERATE, GHZ, W, OutsideFieldError, classify_ternary_symmetric,
                           factorize, ghz_witness, w_direction)
from .families import (in_affine, in_B, in_E_closure, in_local_affine, in_M_closure,
                       in_T_closure, in_transformed_affine, is_omega_normalised)
from .gadgets import (GENEQ4, NOT_APPLICABLE, TERNARY, SearchExhausted, binary_escape,
                      extract_hard_core, symmetrize, ternary_extract,
                      triangle_symmetrize)
from .signatures import (Signature, SymSignature, as_signature, matrix_signature, to_symmetric,
                         transform)

POLYTIME = "PolyTime"
HARD = "Hard"

# case labels
T_CASE = "<T>"
OE_CASE = "<O o E>"
KE_CASE = "<K o E>"
KM_CASE = "<K o M>"
KXM_CASE = "<KX o M>"
A_CASE = "A"
BA_CASE = "B o A"
L_CASE = "L"
E_CASE = "<E>"
TA_CASE = "T o A"
PL_E_CASE = "g in <E>"
PL_AFFINE_CASE = "diag(1, lambda) o g in A"
PL_MATCHGATE_CASE = "g = c[a,1,b] with a^3 = b^3"
DEGENERATE_CASE = "x degenerate"
GHZ_CASE = "x = M o EQ3, M^T o y in A or <E>"
W_CASE = "x = M o [1,1,0,0], y = (M^-1)^T o [0,a,b]"


@dataclass
class CaseCheck:
    case: str
    holds: bool
    witness: Optional[object] = None
    detail: str = ""

    def to_dict(self) -> dict:
        return {"case": self.case, "holds": self.holds,
                "witness": None if self.witness is None else str(self.witness), "detail": self.detail}


@dataclass
class Verdict:
    problem: str
    result: str
    case: Optional[str] = None
    witness: Optional[object] = None
    checks: List[CaseCheck] = field(default_factory=list)
    trace: List[str] = field(default_factory=list)
    planar: bool = False

    @property
    def tractable(self) -> bool:
        return self.result == POLYTIME

    @property
    def cases(self) -> List[str]:
        return [c.case for c in self.checks if c.holds]

    def check(self, case: str) -> Optional[CaseCheck]:
        return next((c for c in self.checks if c.case == case), None)

    def to_dict(self) -> dict:
        return {"problem": self.problem, "result": self.result, "case": self.case,
                "witness": None if self.witness is None else str(self.witness),
                "satisfied": self.cases, "planar_valid": self.planar,
                "checks": [c.to_dict() for c in self.checks], "trace": list(self.trace)}

    def render(self) -> str:
        head = f"{self.problem}: {self.result}"
        if self.case:
            head += f" ({self.case}"
            if self.witness is not None:
                head += f", witness {self.witness}"
            head += ")"
        lines = [head]
        for c in self.checks:
            mark = "holds" if c.holds else "fails"
            extra = f" witness={c.witness}" if c.witness is not None else ""
            lines.append(f"  {c.case}: {mark}{extra}{'  ' + c.detail if c.detail else ''}")
        if self.trace:
            lines.append("  trace:")
            lines.extend("    " + t for t in self.trace)
        return "\n".join(lines)


def _finish(problem: str, checks: List[CaseCheck], priority: Sequence[str], trace: List[str],
            planar: bool = False) -> Verdict:
    for name in priority:
        c = next((c for c in checks if c.case == name and c.holds), None)
        if c is not None:
            return Verdict(problem, POLYTIME, c.case, c.witness, checks, trace, planar)
    return Verdict(problem, HARD, None, None, checks, trace, planar)


def _members(F: Sequence[Signature], pred: Callable[[Signature], bool], case: str,
             witness=None, what: str = "") -> CaseCheck:
    for idx, f in enumerate(F):
        if not pred(f):
            return CaseCheck(case, False, witness, f"F[{idx}] is not in {what or case}")
    return CaseCheck(case, True, witness)


def _prepare(F) -> List[Signature]:
    out = []
    for f in F:
        s = as_signature(f)
        s.require_nonzero()
        out.append(s)
    return out


def _direct_conservative(F: Sequence[Signature]) -> List[CaseCheck]:
    be = F[0].backend if F else None
    K = named("K", be) if F else None
    KX = named("KX", be) if F else None
    return [
        _members(F, in_T_closure, T_CASE),
        _members(F, lambda f: in_E_closure(f, K), KE_CASE, K),
        _members(F, lambda f: in_M_closure(f, K), KM_CASE, K),
        _members(F, lambda f: in_M_closure(f, KX), KXM_CASE, KX),
    ]


def _unit_scale(vals) -> list:
    top = max(abs(v) for v in vals)
    return [v / top for v in vals] if top else list(vals)


def _to_float(F: Sequence[Signature]) -> List[Signature]:
    # scale never changes family membership; unit scale keeps zero tests meaningful
    return [Signature(_unit_scale([v.to_complex() for v in f.values]), f.arity, "float") for f in F]


def _witness(s: SymSignature, trace: List[str]) -> Optional[Mat2]:
    """GHZ witness of s, up to an overall scale; exact when the field allows."""
    try:
        return ghz_witness(s)
    except OutsideFieldError:
        pass
    # overall scale does not matter for any membership test: retry normalised by each nonzero entry
    for v in s.values:
        if v.is_zero():
            continue
        try:
            m = ghz_witness(SymSignature(tuple(x / v for x in s.values), s.backend))
            trace.append("GHZ witness computed up to an overall scale")
            return m
        except OutsideFieldError:
            continue
    return None


def _ghz_candidates(F: Sequence[Signature], s: SymSignature, trace: List[str]) -> Tuple[List[Signature], Optional[Mat2]]:
    """(family to test against, witness M) with M o EQ3 proportional to s.

    Falls back to the float backend when the exact field lacks a needed root.
    """
    m = _witness(s, trace)
    if m is not None:
        return list(F), m
    trace.append("witness needs a root outside the exact field: switching to the float backend")
    sf = SymSignature(tuple(_unit_scale([v.to_complex() for v in s.values])), "float")
    return _to_float(F), ghz_witness(sf)


def _orthogonal_candidate(m: Mat2) -> Optional[Mat2]:
    """Orthogonal Q with m = Q D (D diagonal) when m^T m is diagonal."""
    qd = factor_orthogonal_diagonal(m)
    if qd is None or not qd[0].is_invertible():
        return None
    return qd[0]


def _twist_candidates(m: Mat2) -> List[Mat2]:
    """m diag(1, w^k), k = 0, 1, 2, ordered so the omega-normalised choice comes first."""
    be = m.backend
    one = scalar(1, be)
    cands = [m @ Mat2.diag(one, zeta(8 * k, be)) for k in range(3)]

    def normalised(c: Mat2) -> bool:
        g = matrix_signature(c.transpose() @ c)
        y0, y1, y2 = g.values[0], g.values[1], g.values[3]
        if y0.is_zero() and y2.is_zero():
            return is_omega_normalised(SymSignature((c.a, c.b), be))
        return is_omega_normalised(SymSignature((y0, y1, y2), be))

    return sorted(cands, key=lambda c: not normalised(c))


def _symmetric_ghz(F: Sequence[Signature], ternary: Signature, trace: List[str],
                   allow_helper: bool) -> Optional[SymSignature]:
    """Symmetric GHZ-type ternary realisable from the given one, or None."""
    helper = None
    try:
        s, rec = symmetrize(ternary)
    except ValueError:
        if not allow_helper:
            trace.append("ternary lies in K o M or KX o M: no GHZ-type symmetrisation")
            return None
        s = None
        for which in ("K", "KX"):
            if not in_M_closure(ternary, named(which, ternary.backend)):
                continue
            for f in F:
                if in_M_closure(f, named(which, f.backend)):
                    continue
                try:
                    helper, _ = binary_escape(f, which)
                except (SearchExhausted, ValueError):
                    continue
                break
        if helper is None:
            trace.append("no binary escapes the matching closure")
            return None
        trace.append(f"escape binary {list(map(str, helper.values))} used as symmetrisation helper")
        s, rec = symmetrize(ternary, helper)
    except SearchExhausted:
        trace.append("all triangle rotations decomposable")
        return None
    tag = classify_ternary_symmetric(s).tag
    trace.append(f"symmetric ternary {[str(v) for v in s.values]} of type {tag}")
    if tag == W:
        # a second triangle turns W-type inputs outside K o M / KX o M into GHZ type
        g = triangle_symmetrize(s.expand())
        s2 = to_symmetric(g)
        if g.is_zero() or s2 is None or classify_ternary_symmetric(s2).tag != GHZ:
            trace.append("second triangle does not reach GHZ type")
            return None
        trace.append(f"second triangle gives {[str(v) for v in s2.values]}")
        s = s2
    return s


def _first_ternary(F: Sequence[Signature], trace: List[str]) -> Optional[Signature]:
    """A non-decomposable ternary realised from F with pinnings by delta_0, delta_1, delta_+, delta_-."""
    for idx, f in enumerate(F):
        for args, g in factorize(f):
            if len(args) >= 3:
                t, rec = ternary_extract(g)
                trace.append(f"ternary {[str(v) for v in t.values]} extracted from a factor of F[{idx}] "
                             f"on arguments {list(args)}")
                return t
    return None


def _witness_cases(F: Sequence[Signature], s: Optional[SymSignature], trace: List[str],
                   with_b: bool) -> List[CaseCheck]:
    """The <O o E> check and optionally the B o A check, driven by a GHZ witness."""
    checks = []
    if s is None:
        checks.append(CaseCheck(OE_CASE, False, None, "no GHZ-type symmetric ternary, so no orthogonal candidate"))
        if with_b:
            checks.append(CaseCheck(BA_CASE, False, None, "no GHZ-type symmetric ternary, so no B candidate"))
        return checks
    G, m = _ghz_candidates(F, s, trace)
    trace.append(f"GHZ witness M = {m}")
    q = _orthogonal_candidate(m)
    if q is None:
        checks.append(CaseCheck(OE_CASE, False, None, "M^T M is not diagonal"))
    else:
        checks.append(_members(G, lambda f: in_E_closure(f, q), OE_CASE, q, f"<{q} o E>"))
    if with_b:
        found = None
        detail = []
        for b in _twist_candidates(m):
            if not in_B(b):
                detail.append(f"{b} not in B")
                continue
            c = _members(G, lambda f: in_transformed_affine(f, b), BA_CASE, b, f"{b} o A")
            if c.holds:
                found = c
                break
            detail.append(c.detail)
        checks.append(found or CaseCheck(BA_CASE, False, None, "; ".join(detail)))
    return checks


def _order(checks: List[CaseCheck], priority: Sequence[str]) -> List[CaseCheck]:
    rank = {c: k for k, c in enumerate(priority)}
    return sorted(checks, key=lambda c: rank.get(c.case, len(rank)))


CONSERVATIVE_ORDER = (T_CASE, OE_CASE, KE_CASE, KM_CASE, KXM_CASE)
PLUS_ORDER = (T_CASE, A_CASE, OE_CASE, KE_CASE, KM_CASE, KXM_CASE)
C_ORDER = (T_CASE, BA_CASE, L_CASE, OE_CASE, KE_CASE, KM_CASE, KXM_CASE)


def classify_conservative(F) -> Verdict:
    F = _prepare(F)
    trace: List[str] = []
    checks = _direct_conservative(F)
    s = None
    if not checks[0].holds:
        t = _first_ternary(F, trace)
        if t is not None:
            s = _symmetric_ghz(F, t, trace, allow_helper=True)
    checks += _witness_cases(F, s, trace, with_b=False)
    return _finish("conservative", _order(checks, CONSERVATIVE_ORDER), CONSERVATIVE_ORDER, trace, planar=True)


def classify_holant_plus(F) -> Verdict:
    F = _prepare(F)
    v = classify_conservative(F)
    checks = list(v.checks) + [_members(F, in_affine, A_CASE)]
    return _finish("holant_plus", _order(checks, PLUS_ORDER), PLUS_ORDER, v.trace, planar=True)


def classify_holant_c(F) -> Verdict:
    F = _prepare(F)
    trace: List[str] = []
    checks = _direct_conservative(F)
    checks.append(_members(F, in_local_affine, L_CASE))
    if checks[0].holds:
        trace.append("F lies in <T>: no witness needed")
        I = named("I", F[0].backend)
        checks.append(_members(F, in_E_closure, OE_CASE, I, "<E>"))
        checks.append(_members(F, in_affine, BA_CASE, I, "A"))
        return _finish("holant_c", _order(checks, C_ORDER), C_ORDER, trace)
    core = extract_hard_core(F)
    trace.extend(core.trace.steps)
    trace.append(f"hard core outcome: {core.outcome}")
    if core.outcome == GENEQ4:
        be = F[0].backend
        I, T = named("I", be), named("T", be)
        checks.append(_members(F, in_E_closure, OE_CASE, I, "<E>"))
        ba = _members(F, in_affine, BA_CASE, I, "A")
        if not ba.holds:
            tb = _members(F, lambda f: in_transformed_affine(f, T), BA_CASE, T, "T o A")
            ba = tb if tb.holds else CaseCheck(BA_CASE, False, None, ba.detail + "; " + tb.detail)
        checks.append(ba)
    else:
        s = _symmetric_ghz(F, core.signature, trace, allow_helper=False)
        checks += _witness_cases(F, s, trace, with_b=True)
    return _finish("holant_c", _order(checks, C_ORDER), C_ORDER, trace)


def classify_csp(F) -> Verdict:
    F = _prepare(F)
    checks = [_members(F, in_E_closure, E_CASE), _members(F, in_affine, A_CASE)]
    return _finish("csp", checks, (E_CASE, A_CASE), [])


def classify_csp2c(F) -> Verdict:
    F = _prepare(F)
    be = F[0].backend if F else None
    T = named("T", be) if F else None
    checks = [_members(F, in_affine, A_CASE),
              _members(F, lambda f: in_transformed_affine(f, T), TA_CASE, T),
              _members(F, in_local_affine, L_CASE),
              _members(F, in_E_closure, E_CASE)]
    return _finish("csp2c", checks, (A_CASE, TA_CASE, L_CASE, E_CASE), [])


def _sym_values(g, length: int) -> tuple:
    if isinstance(g, SymSignature):
        vals = tuple(g.values)
    elif isinstance(g, Signature):
        s = to_symmetric(g)
        if s is None:
            raise ValueError("signature is not symmetric")
        vals = tuple(s.values)
    else:
        vals = tuple(SymSignature(tuple(g)).values)
    if len(vals) != length:
        raise ValueError(f"expected a symmetric signature with {length} values, got {len(vals)}")
    return vals


def classify_planar_binary(g) -> Verdict:
    """Planar Holant({g} | {EQ3}) for a symmetric binary g."""
    y0, y1, y2 = _sym_values(g, 3)
    be = y0.backend
    gs = SymSignature((y0, y1, y2), be).expand()
    gs.require_nonzero()
    trace: List[str] = []
    checks = [_members([gs], in_E_closure, PL_E_CASE)]
    aff = None
    for k in range(3):
        lam = zeta(8 * k, be)
        d = Mat2.diag(scalar(1, be), lam)
        if in_affine(transform(d, gs)):
            aff = d
            break
    checks.append(CaseCheck(PL_AFFINE_CASE, aff is not None, aff,
                            "" if aff is not None else "no cube root of unity makes the twist affine"))
    mg = False
    if not y1.is_zero():
        a, b = y0 / y1, y2 / y1
        mg = not a.is_zero() and not b.is_zero() and a ** 3 == b ** 3
        X, Y = a * b, a ** 3 + b ** 3
        i = zeta(6, be)
        conds = [X == 1, X.is_zero() and Y.is_zero(),
                 X == -1 and (Y.is_zero() or Y == 2 * i or Y == -2 * i),
                 4 * X ** 3 == Y * Y]
        trace.append(f"X = {X}, Y = {Y}; conditions {conds}")
        tract = any(c.holds for c in checks) or mg
        if tract != any(conds):
            raise ArithmeticError("corollary and theorem conditions disagree")
        trace.append("cross-check against the X/Y conditions agrees")
    checks.append(CaseCheck(PL_MATCHGATE_CASE, mg, None, "" if mg else "a^3 != b^3 or g has a zero entry"))
    return _finish("planar_binary_eq3", checks, (PL_E_CASE, PL_AFFINE_CASE, PL_MATCHGATE_CASE), trace, planar=True)


def classify_ternary_bipartite(y, x) -> Verdict:
    """Holant({y} | {x}) for symmetric binary y and symmetric ternary x."""
    yv = _sym_values(y, 3)
    xv = _sym_values(x, 4)
    be = xv[0].backend
    ys = SymSignature(yv, be).expand()
    xs = SymSignature(xv, be)
    trace: List[str] = []
    tag = classify_ternary_symmetric(xs).tag
    trace.append(f"x has type {tag}")
    if tag == DEGENERATE:
        return _finish("ternary_bipartite", [CaseCheck(DEGENERATE_CASE, True)], (DEGENERATE_CASE,), trace)
    checks = [CaseCheck(DEGENERATE_CASE, False, None, f"x has type {tag}")]
    if tag == GHZ:
        try:
            m = _witness(xs, trace)
        except OutsideFieldError:
            m = None
        yy = ys
        if m is None:
            trace.append("switching to the float backend for the witness")
            m = ghz_witness(SymSignature(tuple(_unit_scale([v.to_complex() for v in xv])), "float"))
            yy = _to_float([ys])[0]
        found = None
        for c in _twist_candidates(m):
            t = transform(c.transpose(), yy)
            if t.is_zero():
                continue
            if in_affine(t) or in_E_closure(t):
                found = c
                break
        checks.append(CaseCheck(GHZ_CASE, found is not None, found,
                                "" if found else "M^T o y is neither affine nor a generalized equality"))
        checks.append(CaseCheck(W_CASE, False, None, "x is not of W type"))
    else:
        u = w_direction(xs)
        yvals = ys.values
        q = u[0] * u[0] * yvals[0] + u[0] * u[1] * (yvals[1] + yvals[2]) + u[1] * u[1] * yvals[3]
        checks.append(CaseCheck(GHZ_CASE, False, None, "x is not of GHZ type"))
        checks.append(CaseCheck(W_CASE, q.is_zero(), u if q.is_zero() else None,
                                "" if q.is_zero() else "u^T y u != 0 for the repeated direction u"))
    return _finish("ternary_bipartite", checks, (DEGENERATE_CASE, GHZ_CASE, W_CASE), trace)


PROBLEMS = {
    "conservative": classify_conservative,
    "holant_plus": classify_holant_plus,
    "holant_c": classify_holant_c,
    "csp": classify_csp,
    "csp2c": classify_csp2c,
}


def classify(problem: str, F) -> Verdict:
    """Dispatch by problem tag; planar_binary and ternary_bipartite take their special shapes."""
    if problem in PROBLEMS:
        return PROBLEMS[problem](F)
    F = list(F)
    if problem in ("planar_binary", "planar_binary_eq3"):
        if len(F) != 1:
            raise ValueError("planar_binary takes exactly one symmetric binary signature")
        return classify_planar_binary(F[0])
    if problem == "ternary_bipartite":
        if len(F) != 2:
            raise ValueError("ternary_bipartite takes a binary y and a ternary x")
        return classify_ternary_bipartite(F[0], F[1])
    raise ValueError(f"unknown problem tag {problem!r}")
