"""Membership tests for the tractable families and related normal forms."""
from __future__ import annotations

from enum import Enum
from math import gcd
from typing import Iterable, List, Optional, Tuple, Union

from .algebra import Mat2, Scalar, named, scalar, zeta
from .entanglement import factorize
from .evaluate import affine_normal_form
from .signatures import (Signature, SymSignature, apply_matrix, bits_of,
                         matrix_signature, transform, weight)


class FamilyTag(str, Enum):
    T_CLOSURE = "Tclosure"
    E_CLOSURE = "Eclosure"
    M_CLOSURE = "Mclosure"
    AFFINE = "Affine"
    LOCAL_AFFINE = "LocalAffine"
    B_SET = "Bset"
    BA_GROUP = "BAgroup"
    MATCHGATE_PARITY = "MatchgateParity"


def _pull_back(f: Signature, m: Optional[Mat2]) -> Signature:
    if m is None:
        return f
    m = m.to_backend(f.backend)
    return transform(m.inverse(), f)


def in_T_closure(f: Signature) -> bool:
    return all(len(args) <= 2 for args, _ in factorize(f))


def is_generalized_equality(g: Signature) -> bool:
    """Support contained in {a, complement of a}."""
    supp = g.support()
    if len(supp) <= 1:
        return True
    return len(supp) == 2 and supp[0] ^ supp[1] == (1 << g.arity) - 1


def in_E_closure(f: Signature, transform_m: Optional[Mat2] = None) -> bool:
    g = _pull_back(f.require_nonzero(), transform_m)
    return all(is_generalized_equality(h) for _, h in factorize(g))


def in_M_closure(f: Signature, transform_m: Optional[Mat2] = None) -> bool:
    g = _pull_back(f.require_nonzero(), transform_m)
    return all(all(weight(k) <= 1 for k in h.support()) for _, h in factorize(g))


def in_affine(f: Signature) -> bool:
    return affine_normal_form(f) is not None


def in_transformed_affine(f: Signature, m: Mat2) -> bool:
    """f in m o A, i.e. m^-1 o f affine."""
    return in_affine(_pull_back(f, m))


def local_twist(f: Signature, a: Iterable[int]) -> Signature:
    """(T^{a_1} (x) ... (x) T^{a_n}) o f."""
    t = named("T", f.backend)
    axes = [j for j, b in enumerate(a) if b]
    return apply_matrix(t, f, axes)


def in_local_affine(f: Signature) -> bool:
    for k in f.support():
        if not in_affine(local_twist(f, bits_of(k, f.arity))):
            return False
    return True


def _check_invertible(m: Mat2) -> None:
    if not m.is_invertible():
        raise ValueError("matrix is singular")


def b_set_images(m: Mat2) -> List[Signature]:
    """m^T o EQ_2, m^T o delta_0, m^T o delta_1."""
    return [matrix_signature(m.transpose() @ m),
            Signature([m.a, m.b], 1), Signature([m.c, m.d], 1)]


def in_B(m: Mat2) -> bool:
    _check_invertible(m)
    return all(in_affine(g) for g in b_set_images(m))


def in_B_A(m: Mat2) -> bool:
    _check_invertible(m)
    return in_affine(matrix_signature(m))


def _bad_order(lam: Scalar) -> bool:
    order = lam.root_order()
    if order is None or order % 3:
        return False
    return gcd(order // 3, 3) == 1


def is_omega_normalised(f: Union[Signature, SymSignature]) -> bool:
    vals = _omega_values(f)
    y0, y_last = vals[0], vals[-1]
    if y0.is_zero():
        return True
    return not _bad_order(y_last / y0)


def _omega_values(f) -> tuple:
    if isinstance(f, SymSignature):
        vals = f.values
    elif isinstance(f, Signature):
        if f.arity == 1:
            vals = f.values
        elif f.arity == 2 and f.values[1] == f.values[2]:
            vals = (f.values[0], f.values[1], f.values[3])
        else:
            raise ValueError("omega_normalise needs a unary or symmetric binary signature")
    else:
        vals = tuple(f)
    if len(vals) not in (2, 3):
        raise ValueError("omega_normalise needs a unary or symmetric binary signature")
    return tuple(vals)


def omega_normalise(f) -> Tuple[Union[Signature, SymSignature], Mat2]:
    """Return (normalised f, diag(1, w')) with w' in {1, w, w^2}.

    A unary [a, b] transforms to [a, w' b]; a binary [y0, y1, y2] to
    [y0, w' y1, w'^2 y2].
    """
    vals = _omega_values(f)
    be = vals[0].backend
    one = scalar(1, be)
    if is_omega_normalised(f):
        return f, Mat2.diag(one, one)
    for k in (1, 2):
        w = zeta(8 * k, be)
        new = tuple(v * w ** j for j, v in enumerate(vals))
        cand = SymSignature(new, be)
        if is_omega_normalised(cand):
            out = cand if isinstance(f, SymSignature) else cand.expand()
            return out, Mat2.diag(one, w)
    raise ArithmeticError("no cube-root twist normalises the input")


def matchgate_parity(f: Signature) -> bool:
    if f.arity > 3:
        raise ValueError("parity condition is only implemented for arity <= 3")
    supp = f.support()
    return all(weight(k) % 2 == 0 for k in supp) or all(weight(k) % 2 == 1 for k in supp)


def family_tags(f: Signature) -> List[str]:
    """Tags of the (untransformed) families that contain f."""
    tags = []
    if f.is_zero():
        return tags
    if in_T_closure(f):
        tags.append(FamilyTag.T_CLOSURE.value)
    if in_E_closure(f):
        tags.append(FamilyTag.E_CLOSURE.value)
    if in_M_closure(f):
        tags.append(FamilyTag.M_CLOSURE.value)
    if in_affine(f):
        tags.append(FamilyTag.AFFINE.value)
    if in_local_affine(f):
        tags.append(FamilyTag.LOCAL_AFFINE.value)
    if f.arity <= 3 and matchgate_parity(f):
        tags.append(FamilyTag.MATCHGATE_PARITY.value)
    if f.arity == 2 and Mat2(*f.values).is_invertible():
        m = Mat2(*f.values)
        if in_B(m):
            tags.append(FamilyTag.B_SET.value)
        if in_B_A(m):
            tags.append(FamilyTag.BA_GROUP.value)
    return tags
