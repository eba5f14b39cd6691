"""Normal forms: redNFBuchberger for global orderings, the highest corner,
and the truncated local reduction halted at the highest corner.

The local variant works on parametric coefficients.  It only ever divides
by the leading coefficient of a generator; that coefficient must be a
nonzero rational (or, if ``unit_pivots`` is set, a unit of the truncated
parameter ring, inverted as a truncated geometric series).
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (DimensionError, DomainError, NoHighestCornerError, NonConstantPivotError,
                     NotFoundError, OrderingClassError)
from .ordering import MonomialOrdering, Ws, weights_for
from .polyring import (_UNSET, ParamCoefficient, Polynomial, divides, exp_add, exp_sub,
                       partial_derivative, pc_add_into, pc_inverse, pc_mul, pc_scale)


@dataclass(frozen=True)
class GeneratorSet:
    generators: tuple
    ordering: MonomialOrdering

    def __init__(self, generators, ordering: MonomialOrdering):
        gens = tuple(generators)
        if not gens:
            raise DomainError("a generator set must be nonempty")
        if any(g.is_zero() for g in gens):
            raise DomainError("zero generator")
        nv = {g.nvars for g in gens}
        if len(nv) != 1:
            raise DimensionError("generators live in different variable spaces")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "ordering", ordering)

    @property
    def nvars(self) -> int:
        return self.generators[0].nvars

    def leading_monomials(self) -> list:
        key = self.ordering.key_function(self.nvars)
        return [max(g.terms, key=key) for g in self.generators]


@dataclass(frozen=True)
class HighestCorner:
    monomial: tuple


@dataclass
class Trace:
    steps: list = field(default_factory=list)


def _find_divisor(lm, lms):
    for i, g in enumerate(lms):
        if divides(g, lm):
            return i
    return None


def red_nf_buchberger(f: Polynomial, G: GeneratorSet, trace: Trace | None = None) -> Polynomial:
    """Reduced normal form for a global ordering, normalized to LC 1."""
    ordering = G.ordering
    if not ordering.is_global:
        raise OrderingClassError("redNFBuchberger needs a global ordering")
    if f.nvars != G.nvars:
        raise DimensionError("f and G live in different variable spaces")
    gens = [g if isinstance(g, Polynomial) else _plain(g) for g in G.generators]
    key = ordering.key_function(f.nvars)
    lms = [max(g.terms, key=key) for g in gens]
    h = dict(f.terms)
    p: dict = {}
    while h:
        lm = max(h, key=key)
        i = _find_divisor(lm, lms)
        if i is not None:
            g = gens[i]
            q = exp_sub(lm, lms[i])
            c = h[lm] / g.terms[lms[i]]
            for e, gc in g.terms.items():
                ne = exp_add(e, q)
                v = h.get(ne, 0) - c * gc
                if v:
                    h[ne] = v
                else:
                    h.pop(ne, None)
            if trace is not None:
                trace.steps.append({"op": "reduce", "lm": list(lm), "by": i, "quotient": [str(c), list(q)]})
        else:
            p[lm] = h.pop(lm)
            if trace is not None:
                trace.steps.append({"op": "emit", "lm": list(lm)})
    if not p:
        return Polynomial.zero(f.nvars)
    lc = p[max(p, key=key)]
    return Polynomial._raw(f.nvars, {e: c / lc for e, c in p.items()})


def _plain(g) -> Polynomial:
    if any(m for coef in g.terms.values() for m in coef):
        raise DomainError("redNFBuchberger works with rational coefficients only")
    return Polynomial._raw(g.nvars, {e: coef[()] for e, coef in g.terms.items()})


def highest_corner(leading_monomials, ordering: MonomialOrdering) -> HighestCorner:
    """Highest corner of the monomial ideal generated by ``leading_monomials``."""
    if ordering.is_global:
        raise OrderingClassError("the highest corner is defined for local orderings")
    lms = [tuple(m) for m in leading_monomials]
    if not lms:
        raise NoHighestCornerError("empty monomial ideal is not cofinite")
    n = len(lms[0])
    bounds = []
    for i in range(n):
        pure = [m[i] for m in lms if all(m[j] == 0 for j in range(n) if j != i)]
        if not pure:
            raise NoHighestCornerError(f"no pure power of x{i + 1} among the leading monomials")
        bounds.append(min(pure))
    outside = [e for e in itertools.product(*(range(b) for b in bounds))
               if not any(divides(m, e) for m in lms)]
    if not outside:
        raise NotFoundError("1 lies in the ideal; no monomial outside it")
    return HighestCorner(min(outside, key=ordering.key_function(n)))


def _prepare_generators(G: GeneratorSet, cap, unit_pivots: bool):
    key = G.ordering.key_function(G.nvars)
    prepared = []
    for g in G.generators:
        if isinstance(g, Polynomial):
            terms = {e: {(): c} for e, c in g.terms.items()}
        else:
            terms = g.terms
        lm = max(terms, key=key)
        lc = terms[lm]
        if set(lc) == {()}:
            inv = {(): 1 / Fraction(lc[()])}
        elif unit_pivots and lc.get((), 0):
            inv = pc_inverse(lc, cap)
        else:
            raise NonConstantPivotError(f"leading coefficient at {lm} depends on parameters")
        tail = [(e, c) for e, c in terms.items() if e != lm]
        prepared.append((lm, inv, tail))
    return prepared


def truncated_nf(F, G: GeneratorSet, stop, *, cap=_UNSET, unit_pivots: bool = False,
                 trace: Trace | None = None) -> dict:
    """Local reduction of ``F`` by ``G`` halted below the monomial ``stop``.

    Works on every monomial ``>= stop``; everything smaller is dropped as soon
    as it appears, since a reduction step only creates monomials smaller than
    the current leading one.  Returns the normal form ``p`` as a dict from
    exponents to raw parameter-coefficient dicts.
    """
    ordering = G.ordering
    if ordering.is_global:
        raise OrderingClassError("truncated reduction needs a local ordering")
    n = G.nvars
    stop = tuple(stop.monomial if isinstance(stop, HighestCorner) else stop)
    if F.nvars != n or len(stop) != n:
        raise DimensionError("F, G and the stop monomial live in different spaces")
    if isinstance(F, Polynomial):
        h = {e: {(): c} for e, c in F.terms.items()}
        if cap is _UNSET:
            cap = None
    else:
        h = {e: dict(c) for e, c in F.terms.items()}
        if cap is _UNSET:
            cap = F.cap
    key = ordering.key_function(n)
    kstop = key(stop)
    gens = _prepare_generators(G, cap, unit_pivots)
    lms = [g[0] for g in gens]
    keys: dict = {}

    def k_of(e):
        k = keys.get(e)
        if k is None:
            k = keys[e] = key(e)
        return k

    h = {e: c for e, c in h.items() if k_of(e) >= kstop}
    counter = itertools.count()
    heap = [(_negate(k_of(e)), next(counter), e) for e in h]
    heapq.heapify(heap)
    p: dict = {}
    while heap:
        _, _, lm = heapq.heappop(heap)
        coef = h.pop(lm, None)
        if not coef:
            continue
        i = _find_divisor(lm, lms)
        if i is None:
            p[lm] = coef
            if trace is not None:
                trace.steps.append({"op": "emit", "lm": list(lm)})
            continue
        glm, inv, tail = gens[i]
        q = exp_sub(lm, glm)
        quot = pc_mul(coef, inv, cap) if inv != {(): 1} else coef
        if trace is not None:
            trace.steps.append({"op": "reduce", "lm": list(lm), "by": i})
        for te, tc in tail:
            ne = exp_add(te, q)
            kn = k_of(ne)
            if kn < kstop:
                continue
            prod = pc_mul(quot, tc, cap)
            if not prod:
                continue
            acc = h.get(ne)
            if acc is None:
                h[ne] = pc_scale(prod, -1)
                heapq.heappush(heap, (_negate(kn), next(counter), ne))
            else:
                pc_add_into(acc, prod, -1)
                if not acc:
                    del h[ne]
    return p


def _negate(key):
    if isinstance(key, tuple):
        return tuple(_negate(k) for k in key)
    return -key


def jacobian_generators(F) -> list:
    return [partial_derivative(F, i) for i in range(F.nvars)]


def truncated_local_nf(F, partials: GeneratorSet, stop: HighestCorner, *, cap=_UNSET,
                       trace: Trace | None = None) -> list:
    """Normal form coefficients at the surviving basis monomials.

    Each partial must lead with a pure power and a constant coefficient.
    Returns ``(exponent, ParamCoefficient)`` pairs in decreasing order.
    """
    key = partials.ordering.key_function(partials.nvars)
    for lm in partials.leading_monomials():
        if sum(1 for x in lm if x) != 1:
            raise DomainError(f"leading monomial {lm} of a partial is not a pure power")
    p = truncated_nf(F, partials, stop, cap=cap, trace=trace)
    return [(e, ParamCoefficient._raw(p[e])) for e in sorted(p, key=key, reverse=True)]


def _check_semiquasihomogeneous(F: Polynomial, alpha) -> None:
    n = len(alpha)
    for i, a in enumerate(alpha):
        e = tuple(a if j == i else 0 for j in range(n))
        if not F.terms.get(e):
            raise DomainError(f"pure power x{i + 1}^{a} is missing")
    for e in F.terms:
        w = sum(Fraction(x, a) for x, a in zip(e, alpha))
        pure = sum(1 for x in e if x) == 1 and any(x == a for x, a in zip(e, alpha))
        if w <= 1 and not pure:
            raise DomainError(f"term at {e} lies on or below the Newton polytope")


def membership_in_jacobian(F: Polynomial, alpha) -> bool:
    """Decide F in <F_x1, ..., F_xn> for a perturbation of sum x_i^alpha_i."""
    alpha = tuple(int(a) for a in alpha)
    if F.nvars != len(alpha):
        raise DimensionError("alpha length differs from the number of variables")
    if any(a < 2 for a in alpha):
        raise DomainError("exponents must be at least 2")
    _check_semiquasihomogeneous(F, alpha)
    ordering = Ws(weights_for(alpha))
    G = GeneratorSet(jacobian_generators(F), ordering)
    hc = HighestCorner(tuple(a - 2 for a in alpha))
    out = truncated_local_nf(F, G, hc, cap=None)
    return all(c.is_zero() for _, c in out)
