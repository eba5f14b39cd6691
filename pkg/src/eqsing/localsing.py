"""Local invariants of isolated hypersurface singularities.

Milnor and Tjurina algebras are modelled on jet spaces: for an ideal I of
the local ring, ``Q[x]/(I + m^N)`` is computed by exact sparse elimination
of the truncated products ``x^b * g``.  If the quotient has the same
dimension at orders N and N+1 then m^N lies in I (Nakayama), so that
dimension is the colength of I.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import prod

from .errors import DomainError, NonIsolatedError
from .linalg import SparseEchelon, feasible, rank, solve
from .polyring import Polynomial, partial_derivative

JET_ORDER_CAP = 64


@dataclass(frozen=True)
class SingularitySpec:
    """Canonical quasihomogeneous data f = sum x_i^alpha_i + sum lambda_i x_i^d."""

    alpha: tuple
    d: int
    lam: tuple
    qhomn_default: bool = False

    @classmethod
    def make(cls, alpha, d: int | None = None, lam=None) -> "SingularitySpec":
        alpha = tuple(int(a) for a in alpha)
        if not alpha:
            raise DomainError("alpha must be nonempty")
        if any(a < 2 for a in alpha):
            raise DomainError("every alpha_i must be at least 2")
        n = len(alpha)
        default = d is None
        if default:
            d = sum(alpha) - (2 * n + 1)
            if any(a > d for a in alpha):
                raise DomainError(f"default degree d={d} is smaller than some alpha_i")
        d = int(d)
        lam = tuple(Fraction(x) for x in (lam if lam is not None else (0,) * n))
        if len(lam) != n:
            raise DomainError("lambda must have one entry per variable")
        for a, l in zip(alpha, lam):
            if a == d and 1 + l == 0:
                raise DomainError("1 + lambda_i must be nonzero when alpha_i = d")
        return cls(alpha, d, lam, default)

    @property
    def n(self) -> int:
        return len(self.alpha)

    @property
    def tau(self) -> int:
        return prod(a - 1 for a in self.alpha)

    @property
    def weights(self) -> tuple:
        return tuple(Fraction(1, a) for a in self.alpha)

    def is_qhomn(self) -> bool:
        return self.d == sum(self.alpha) - (2 * self.n + 1)

    def sorted(self):
        """Spec with alpha sorted descending, and the permutation used.

        ``perm[k]`` is the original index of sorted coordinate ``k``.
        """
        perm = tuple(sorted(range(self.n), key=lambda i: (-self.alpha[i], i)))
        spec = SingularitySpec(tuple(self.alpha[i] for i in perm), self.d,
                               tuple(self.lam[i] for i in perm), self.qhomn_default)
        return spec, perm


def canonical_polynomial(spec: SingularitySpec) -> Polynomial:
    """f = sum (1 + delta_{alpha_i,d} lambda_i) x_i^alpha_i + sum_{alpha_i<d} lambda_i x_i^d."""
    n = spec.n
    terms = {}
    for i, (a, l) in enumerate(zip(spec.alpha, spec.lam)):
        e = tuple(a if j == i else 0 for j in range(n))
        terms[e] = terms.get(e, 0) + 1
        if l:
            ed = tuple(spec.d if j == i else 0 for j in range(n))
            terms[ed] = terms.get(ed, 0) + l
    return Polynomial(n, terms)


def milnor_basis(spec: SingularitySpec) -> list:
    """The parallelepiped {I : I_j <= alpha_j - 2}."""
    return [tuple(e) for e in itertools.product(*(range(a - 1) for a in spec.alpha))]


def determinacy_bound(tau: int) -> int:
    if tau < 1:
        raise DomainError("tau must be positive")
    return tau + 1


def weighted_degree(e, spec: SingularitySpec) -> Fraction:
    return sum((Fraction(x, a) for x, a in zip(e, spec.alpha)), Fraction(0))


def weighted_position(e, spec: SingularitySpec) -> str:
    w = weighted_degree(e, spec)
    return "Below" if w < 1 else "On" if w == 1 else "Above"


# jet-space linear algebra

def monomials_upto(nvars: int, k: int) -> list:
    """All exponents of total degree <= k, by degree then lex."""
    out = []
    for deg in range(k + 1):
        out.extend(_monomials_of_degree(nvars, deg))
    return out


def _monomials_of_degree(nvars: int, deg: int):
    if nvars == 1:
        yield (deg,)
        return
    for first in range(deg, -1, -1):
        for rest in _monomials_of_degree(nvars - 1, deg - first):
            yield (first,) + rest


def _column_key(e):
    return (sum(e), e)


class JetQuotient:
    """The vector space Q[x]/(I + m^N) for I generated by ``generators``."""

    def __init__(self, generators, nvars: int, order: int):
        self.nvars = nvars
        self.order = order
        self.echelon = SparseEchelon(_column_key)
        gens = [g for g in generators if not g.is_zero()]
        for g in gens:
            low = g.min_degree()
            if low >= order:
                continue
            for beta in monomials_upto(nvars, order - 1 - low):
                row = {}
                for e, c in g.terms.items():
                    ne = tuple(a + b for a, b in zip(e, beta))
                    if sum(ne) < order:
                        row[ne] = c
                if row:
                    self.echelon.add(row)

    @property
    def dimension(self) -> int:
        total = sum(1 for _ in monomials_upto(self.nvars, self.order - 1))
        return total - len(self.echelon)

    def basis(self) -> list:
        """Standard monomials: degree < order and not a pivot column."""
        piv = self.echelon.pivots
        return [e for e in monomials_upto(self.nvars, self.order - 1) if e not in piv]

    def contains(self, p: Polynomial) -> bool:
        return self.echelon.contains({e: c for e, c in p.terms.items() if sum(e) < self.order})

    def coordinates(self, p: Polynomial) -> dict:
        """Normal form of p as a combination of basis monomials."""
        return self.echelon.reduce_full({e: c for e, c in p.terms.items() if sum(e) < self.order})


def local_quotient(generators, nvars: int, start: int = 1, cap: int = JET_ORDER_CAP) -> JetQuotient:
    """Smallest N >= start with dim at N equal to dim at N+1 (so m^N lies in I)."""
    n_order = max(1, start)
    current = JetQuotient(generators, nvars, n_order)
    while n_order < cap:
        nxt = JetQuotient(generators, nvars, n_order + 1)
        if nxt.dimension == current.dimension:
            return current
        current = nxt
        n_order += 1
    raise NonIsolatedError(f"jet quotient did not stabilize below order {cap}")


def tjurina_generators(f: Polynomial) -> list:
    return [f] + [partial_derivative(f, i) for i in range(f.nvars)]


def tjurina_algebra(f: Polynomial, start: int = 1, cap: int = JET_ORDER_CAP) -> JetQuotient:
    _check_singular(f)
    return local_quotient(tjurina_generators(f), f.nvars, start, cap)


def tjurina_number(f: Polynomial, start: int = 1, cap: int = JET_ORDER_CAP) -> int:
    return tjurina_algebra(f, start, cap).dimension


def milnor_number(f: Polynomial, start: int = 1, cap: int = JET_ORDER_CAP) -> int:
    _check_singular(f)
    return local_quotient([partial_derivative(f, i) for i in range(f.nvars)], f.nvars, start, cap).dimension


def _check_singular(f: Polynomial) -> None:
    if any(sum(e) <= 1 for e in f.terms):
        raise DomainError("f must vanish to order 2 at the origin")


def local_membership(f: Polynomial, generators, start: int = 1, cap: int = JET_ORDER_CAP) -> bool:
    """f in the ideal of the local ring generated by ``generators``."""
    q = local_quotient(generators, f.nvars, start, cap)
    return q.contains(f)


# Newton polytope

@dataclass(frozen=True)
class NewtonPolytope:
    vertices: tuple
    weights: tuple | None = None

    @property
    def is_quasihomogeneous(self) -> bool:
        return self.weights is not None


def _in_hull(point, others) -> bool:
    if not others:
        return False
    rows = [[s[i] for s in others] for i in range(len(point))] + [[1] * len(others)]
    return feasible(rows, list(point) + [1])


def newton_polytope(f: Polynomial) -> NewtonPolytope:
    if f.is_zero():
        raise DomainError("the zero polynomial has no Newton polytope")
    support = sorted(f.terms, key=_column_key)
    vertices = tuple(p for p in support if not _in_hull(p, [q for q in support if q != p]))
    sol = solve([list(e) for e in support], [1] * len(support))
    weights = None
    if sol is not None and rank([list(e) for e in support]) == f.nvars and all(w > 0 for w in sol):
        weights = tuple(sol)
    return NewtonPolytope(vertices, weights)
