"""Lattice-point counts for the canonical quasihomogeneous family.

For f = sum x_i^alpha_i the Tjurina ideal is monomial, so the cohomology of
its twisted ideal sheaf reduces to counting points of the parallelepiped
P = {I : I_j <= alpha_j - 2} against the simplices T_k = {I : |I| <= k}:
h^1(k) = |P \\ T_k| and h^0(k) = |T_k| - |T_k & P|.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb, prod

from .errors import DomainError, InvalidProfileError
from .localsing import SingularitySpec


def parallelepiped(alpha) -> list:
    return [tuple(e) for e in itertools.product(*(range(a - 1) for a in alpha))]


def simplex_size(n: int, k: int) -> int:
    """|T_k| for n variables."""
    return comb(k + n, n) if k >= 0 else 0


def _degree_counts(alpha) -> list:
    # coefficients of prod_j (1 + t + ... + t^(alpha_j - 2))
    counts = [1]
    for a in alpha:
        nxt = [0] * (len(counts) + a - 2)
        for i, c in enumerate(counts):
            for j in range(a - 1):
                nxt[i + j] += c
        counts = nxt
    return counts


def _alpha(spec_or_alpha) -> tuple:
    if isinstance(spec_or_alpha, SingularitySpec):
        return spec_or_alpha.alpha
    return tuple(int(a) for a in spec_or_alpha)


def h1(spec, k: int) -> int:
    """|P \\ T_k|: parallelepiped points of total degree > k."""
    counts = _degree_counts(_alpha(spec))
    return sum(counts[max(k + 1, 0):])


def h0(spec, k: int) -> int:
    alpha = _alpha(spec)
    return simplex_size(len(alpha), k) - prod(a - 1 for a in alpha) + h1(alpha, k)


def expected_dimension(spec: SingularitySpec) -> int:
    return comb(spec.d + spec.n, spec.n) - 1 - spec.tau


def h1_sequence(spec, k0: int = 0, k1: int | None = None) -> list:
    alpha = _alpha(spec)
    if k1 is None:
        k1 = sum(a - 2 for a in alpha)
    return [h1(alpha, k) for k in range(k0, k1 + 1)]


@dataclass(frozen=True)
class CastelnuovoProfile:
    """C(k) = h1(k-1) - h1(k) for k = start, start+1, ... (h1(-1) = deg)."""

    start: int
    values: tuple
    degree: int | None
    a: int | None
    t: int | None

    def __getitem__(self, k: int) -> int:
        i = k - self.start
        if i < 0:
            raise IndexError(k)
        return self.values[i] if i < len(self.values) else 0

    def as_dict(self) -> dict:
        return {self.start + i: v for i, v in enumerate(self.values)}


def castelnuovo_profile(h1_seq, degree: int | None = None, start: int = 0,
                        h0_seq=None) -> CastelnuovoProfile:
    """Difference a sequence of h1 values taken at k = start, start+1, ...

    With ``degree`` given and ``start == 0`` the value C(0) = degree - h1(0)
    is included; otherwise the first difference is at ``start + 1``.
    ``h0_seq`` (aligned with ``h1_seq``) is only used to locate a(X).
    """
    seq = [int(x) for x in h1_seq]
    if not seq:
        raise InvalidProfileError("empty h1 sequence")
    if any(x < 0 for x in seq):
        raise InvalidProfileError("h1 values must be non-negative")
    if seq[-1] != 0:
        raise InvalidProfileError("h1 sequence must end in 0")
    if degree is not None and start == 0:
        prev, first = int(degree), 0
    else:
        prev, first = seq[0], 1
    values = []
    for x in seq[first:]:
        c = prev - x
        if c < 0:
            raise InvalidProfileError("negative Castelnuovo value: h1 increased")
        values.append(c)
        prev = x
    t = next(start + i for i, x in enumerate(seq) if x == 0)
    a = None
    if h0_seq is not None:
        a = next((start + i for i, x in enumerate(h0_seq) if x > 0), None)
    return CastelnuovoProfile(start + first, tuple(values), degree, a, t)


def a_invariant(spec) -> int:
    """Least k with h^0(k) > 0, i.e. |T_k| - |T_k & P| > 0."""
    alpha = _alpha(spec)
    k = 0
    while h0(alpha, k) <= 0:
        k += 1
    return k


def t_invariant(spec) -> int:
    """Least k >= 0 with h^1(k) = 0."""
    alpha = _alpha(spec)
    k = 0
    while h1(alpha, k):
        k += 1
    return k


def canonical_profile(spec, k_max: int | None = None) -> CastelnuovoProfile:
    """Full profile C(0..k_max) of the canonical scheme with degree tau."""
    alpha = _alpha(spec)
    t = t_invariant(alpha)
    k_max = t + 1 if k_max is None else max(k_max, t)
    seq = h1_sequence(alpha, 0, k_max)
    h0s = [h0(alpha, k) for k in range(0, k_max + 1)]
    return castelnuovo_profile(seq, prod(a - 1 for a in alpha), 0, h0s)


# monomial complete intersections

def monomial_ci_h1(d: int, k: int, t: int) -> int:
    """h1 of V(x^d) & V(y^k) twisted by t: points of {i<d, j<k} of degree > t."""
    return sum(1 for i in range(d) for j in range(k) if i + j > t)


def davis_profile(d: int, k: int) -> CastelnuovoProfile:
    top = d + k
    seq = [monomial_ci_h1(d, k, t) for t in range(0, top + 1)]
    return castelnuovo_profile(seq, d * k, 0)


def davis_check(d: int, k: int) -> bool:
    if not 1 <= k <= d:
        raise DomainError("Davis check needs 1 <= k <= d")
    prof = davis_profile(d, k)
    bounded = all(prof[i] <= k for i in range(0, d + k + 2))
    tail = all(prof[d + k - j] == j - 1 for j in range(1, k + 2))
    return bounded and tail


# regions of the generic family

@dataclass(frozen=True)
class LatticeRegions:
    alpha: tuple
    d: int
    P: tuple
    D: tuple
    E: tuple
    dual: dict

    def T(self, k: int) -> list:
        return [e for e in itertools.product(range(k + 1), repeat=len(self.alpha)) if sum(e) <= k]


def weight(e, alpha) -> Fraction:
    return sum((Fraction(x, a) for x, a in zip(e, alpha)), Fraction(0))


def _excluded(alpha) -> set:
    n = len(alpha)
    out = set()
    for i in range(n):
        out.add(tuple(alpha[i] if t == i else 0 for t in range(n)))
        for j in range(n):
            if i != j:
                out.add(tuple(alpha[i] - 1 if t == i else 1 if t == j else 0 for t in range(n)))
    return out


def family_support(alpha, d: int) -> list:
    """The index set of free coefficients: alpha_min <= |I| <= d minus exclusions."""
    n = len(alpha)
    lo = min(alpha)
    excl = _excluded(alpha)
    out = []
    for deg in range(lo, d + 1):
        for e in _of_degree(n, deg):
            if e not in excl:
                out.append(e)
    return out


def _of_degree(n: int, deg: int):
    if n == 1:
        yield (deg,)
        return
    for first in range(deg, -1, -1):
        for rest in _of_degree(n - 1, deg - first):
            yield (first,) + rest


def in_edge_set(e, alpha) -> bool:
    """Some I_j = alpha_j - 1, every other I_k <= alpha_k - 2, and some other I_k > 0."""
    n = len(alpha)
    hits = [j for j in range(n) if e[j] == alpha[j] - 1]
    if len(hits) != 1:
        return False
    j = hits[0]
    others = [k for k in range(n) if k != j]
    return all(e[k] <= alpha[k] - 2 for k in others) and any(e[k] > 0 for k in others)


def dual(e, alpha) -> tuple:
    n = len(alpha)
    hits = [j for j in range(n) if e[j] == alpha[j] - 1]
    if len(hits) != 1:
        raise DomainError(f"{e} is not an edge point")
    k = hits[0]
    return tuple(alpha[k] - 1 if t == k else alpha[t] - 2 - e[t] for t in range(n))


def lattice_regions(spec: SingularitySpec) -> LatticeRegions:
    alpha, d = spec.alpha, spec.d
    D = tuple(family_support(alpha, d))
    Dset = set(D)
    E = tuple(e for e in D if in_edge_set(e, alpha))
    duals = {}
    for e in E:
        de = dual(e, alpha)
        if de not in Dset:
            raise DomainError(f"dual of {e} is {de}, outside the coefficient set for d={d}")
        duals[e] = de
    return LatticeRegions(alpha, d, tuple(parallelepiped(alpha)), D, E, duals)


# sweeps

def canonical_alphas(max_n: int, max_sum: int, min_n: int = 1):
    """All alpha sorted descending with alpha_i >= 2, min_n <= n <= max_n, sum <= max_sum."""
    def rec(n, remaining, cap):
        if n == 0:
            yield ()
            return
        for a in range(min(cap, remaining - 2 * (n - 1)), 1, -1):
            for rest in rec(n - 1, remaining - a, a):
                yield (a,) + rest
    for n in range(min_n, max_n + 1):
        yield from rec(n, max_sum, max_sum)


def squares_d_holds(alpha, d: int) -> bool:
    """If h1(d) < d - 1 then h1(2d - 2) = 0."""
    if h1(alpha, d) < d - 1:
        return h1(alpha, 2 * d - 2) == 0
    return True


def squares_d_degrees(alpha) -> range:
    """Degrees d >= max(3, max alpha) worth checking (h1 vanishes beyond |HC|)."""
    top = sum(a - 2 for a in alpha) + 1
    return range(max(3, max(alpha)), max(top, max(3, max(alpha))) + 1)
