"""Suspension by squares: W^m = f0 + x_{n+1}^2 + ... + x_{n+m}^2.

For each added square the terms x^I x_{n+j} linear in the new variable are
removed by x_{n+j} -> x_{n+j} - 1/2 a x^I (smallest |I| first).  The x-only
coefficients then change by a'_{I,0} = a_{I,0} - 1/4 [x^I] (A_j)^2 + O(a^3)
with A_j = sum a_{J,e_j} x^J.  Composing the Tjurina-coordinate rows of the
base stratum at degree tau + 1 with this map, and dropping every coefficient
of degree > d, gives the equations on the suspended stratum up to quadratic
order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (CertificateInconclusive, ConstructionError, DomainError, InvariantViolation,
                     NormalizationError, UnsupportedBaseError, WrongShapeError)
from .lattice import h1 as lattice_h1
from .linalg import SparseEchelon, determinant, rank, solve
from .localsing import (SingularitySpec, canonical_polynomial, monomials_upto, tjurina_algebra,
                        tjurina_number)
from .polyring import (ParamPolynomial, Polynomial, param_index, param_name, param_sort_key,
                       pc_add_into, substitute)
from .stratum import derive, quadratic_rank

STABILIZE_CAP = 2


@dataclass(frozen=True)
class SuspensionSpec:
    base: SingularitySpec
    m: int
    d: int
    unisingular: bool = False

    @classmethod
    def make(cls, base: SingularitySpec, m: int, d: int | None = None, unisingular: bool = False):
        if m < 0:
            raise DomainError("the number of squares must be non-negative")
        d = base.d if d is None else int(d)
        if d < 3:
            raise DomainError("the degree must be at least 3")
        base, _ = base.sorted()
        return cls(base, int(m), d, unisingular)

    @property
    def n(self) -> int:
        return self.base.n

    @property
    def nvars(self) -> int:
        return self.base.n + self.m

    def base_polynomial(self) -> Polynomial:
        return canonical_polynomial(self.base)

    def suspended_polynomial(self) -> Polynomial:
        n, nv = self.n, self.nvars
        f0 = self.base_polynomial()
        terms = {e + (0,) * self.m: c for e, c in f0.terms.items()}
        for j in range(self.m):
            e = tuple(2 if i == n + j else 0 for i in range(nv))
            terms[e] = Fraction(1)
        return Polynomial(nv, terms)


# mixed-term elimination

def _square_exp(nvars: int, s: int, k: int = 2) -> tuple:
    return tuple(k if i == s else 0 for i in range(nvars))


def eliminate_mixed_terms(F: ParamPolynomial, nbase: int, degree_bound: int | None = None,
                          max_steps: int = 100000):
    """Remove every term x^I x_s (s a square variable) by completing squares.

    Variables ``nbase .. nvars-1`` are the square variables; each must carry
    x_s^2 with coefficient exactly 1.  ``degree_bound`` truncates the x-degree
    after each step, which is exact for all coefficients of degree <= bound.
    Returns the new polynomial and a map from each x-only coefficient name
    a[K,0..0] to its new value.
    """
    nv = F.nvars
    for s in range(nbase, nv):
        if F.terms.get(_square_exp(nv, s)) != {(): Fraction(1)}:
            raise NormalizationError(f"coefficient of x{s + 1}^2 must be 1")
    if degree_bound is not None:
        F = ParamPolynomial._raw(nv, {e: c for e, c in F.terms.items() if sum(e) <= degree_bound},
                                 F.cap, F.params)
    steps = 0
    for s in range(nbase, nv):
        while True:
            cand = [e for e, c in F.terms.items() if c and e[s] == 1 and sum(e) >= 2]
            if not cand:
                break
            e = min(cand, key=lambda x: (sum(x), x))
            I = tuple(0 if i == s else e[i] for i in range(nv))
            c = F.terms[e]
            xs = tuple(int(i == s) for i in range(nv))
            rep = ParamPolynomial._raw(nv, {xs: {(): Fraction(1)},
                                            I: {m: v * Fraction(-1, 2) for m, v in c.items()}}, F.cap)
            F = substitute(F, s, rep, max_degree=degree_bound)
            if F.terms.get(e):
                raise ConstructionError(f"failed to clear the mixed term at {e}")
            steps += 1
            if steps > max_steps:
                raise ConstructionError("mixed-term elimination did not terminate")
    mapping = {}
    for e, c in F.terms.items():
        if all(x == 0 for x in e[nbase:]):
            mapping[param_name(e)] = dict(c)
    return F, mapping


def generic_suspended_family(spec: SuspensionSpec, cap=STABILIZE_CAP) -> ParamPolynomial:
    """W^m plus a_{I,j} x^I x'^j for 2 <= |I|+|j| <= d (squares fixed at 1) and a_{K,0} for |K| <= d."""
    n, nv, d = spec.n, spec.nvars, spec.d
    W = spec.suspended_polynomial()
    terms = {e: {(): c} for e, c in W.terms.items()}
    if spec.unisingular:
        for s in range(n, nv):
            e = _square_exp(nv, s, d)
            acc = terms.setdefault(e, {})
            pc_add_into(acc, {(): Fraction(1)})
    names = []
    for e in monomials_upto(nv, d):
        mixed = any(e[n:])
        if mixed and sum(e) < 2:
            continue
        if mixed and sum(e) == 2 and sum(1 for x in e[n:] if x == 2) == 1:
            continue
        name = param_name(e)
        names.append(name)
        acc = terms.setdefault(e, {})
        pc_add_into(acc, {(name,): Fraction(1)})
    return ParamPolynomial._raw(nv, terms, cap, tuple(names))


# base rows

@dataclass
class BaseRows:
    """Echelonized Tjurina-coordinate rows of the base stratum at degree tau + 1."""

    rows: list
    specials: list


def tjurina_rows(spec: SingularitySpec, degree: int) -> BaseRows:
    f0 = canonical_polynomial(spec)
    q = tjurina_algebra(f0)
    basis = q.basis()
    monos = monomials_upto(spec.n, degree)
    # functional b: a -> coordinate of sum a_K x^K at basis element b
    cols = {}
    for K in monos:
        coords = q.coordinates(Polynomial.monomial(K))
        for b, c in coords.items():
            cols.setdefault(b, {})[K] = c
    order = {K: i for i, K in enumerate(monos)}
    ech = SparseEchelon(lambda K: -order[K])
    for b in basis:
        ech.add(cols.get(b, {}))
    # back-substitute so each special column appears in one row only
    rows = []
    for piv in sorted(ech.pivots, key=lambda K: order[K]):
        rows.append(ech.reduce_full({k: v for k, v in ech.pivots[piv].items() if k != piv}) | {piv: Fraction(1)})
    specials = [min(r, key=lambda K: order[K]) for r in rows]
    return BaseRows(rows, specials)


@dataclass
class SuspendedSystem:
    spec: SuspensionSpec
    equations: list
    linear_rows: list
    obstructed: list
    specials: list
    w0: dict
    blocks: dict
    map_: dict = field(default_factory=dict)

    def variables(self) -> list:
        names = set()
        for q in self.equations:
            for m in q:
                names.update(m)
        return sorted(names, key=param_sort_key)

    def linear_rank(self) -> int:
        vs = self.variables()
        col = {v: i for i, v in enumerate(vs)}
        mat = []
        for q in self.equations:
            row = [Fraction(0)] * len(vs)
            for m, c in q.items():
                if len(m) == 1:
                    row[col[m[0]]] = c
            mat.append(row)
        return rank(mat) if mat else 0

    def quadratic_matrix(self, index: int, variables=None):
        poly = self.equations[index]
        quad = {m: c for m, c in poly.items() if len(m) == 2}
        if variables is None:
            names = set()
            for m in quad:
                names.update(m)
            variables = sorted(names, key=param_sort_key)
        col = {v: i for i, v in enumerate(variables)}
        mat = [[Fraction(0)] * len(variables) for _ in variables]
        for (u, v), c in quad.items():
            if u in col and v in col:
                i, j = col[u], col[v]
                if i == j:
                    mat[i][i] += c
                else:
                    mat[i][j] += c / 2
                    mat[j][i] += c / 2
        return variables, mat


def _block_of(name: str, n: int) -> int:
    """0 for a[K,0..0], i for a[K,e_i], -1 for anything else."""
    idx = param_index(name)
    tail = idx[n:]
    if not any(tail):
        return 0
    if sum(tail) == 1:
        return tail.index(1) + 1
    return -1


def derive_suspended_system(spec: SuspensionSpec) -> SuspendedSystem:
    base = spec.base
    tau = base.tau
    if lattice_h1(base, tau + 1) != 0:
        raise UnsupportedBaseError("the base stratum at degree tau + 1 is not T-smooth")
    n, d = spec.n, spec.d
    rows = tjurina_rows(base, tau + 1)
    top = max(sum(K) for r in rows.rows for K in r)
    F = generic_suspended_family(spec)
    _, amap = eliminate_mixed_terms(F, n, degree_bound=top)
    zeros = (0,) * spec.m
    equations, obstructed = [], []
    for r in rows.rows:
        poly: dict = {}
        for K, c in r.items():
            name = param_name(K + zeros)
            if name in amap:
                pc_add_into(poly, amap[name], c)
        is_obstructed = all(sum(K) > d for K in r)
        equations.append(poly)
        obstructed.append(is_obstructed)
    # w0: quadratic part of the base stratum's obstructed equation at degree d
    w0 = {}
    if any(obstructed):
        if spec.base.d != d:
            raise UnsupportedBaseError("the base quadratic form is known only at the base degree")
        bsys = derive(spec.base, cap=STABILIZE_CAP)
        last = bsys.reduced_last()
        for m, c in last.items():
            if len(m) == 2:
                key = tuple(sorted(param_name(param_index(v) + zeros) for v in m))
                w0[key] = w0.get(key, 0) + c
        if sum(obstructed) != 1 and w0:
            raise WrongShapeError("the base quadratic form is attached only when h1 = 1")
        for poly, ob in zip(equations, obstructed):
            if ob:
                pc_add_into(poly, w0)
    blocks = {}
    for i, (poly, ob) in enumerate(zip(equations, obstructed)):
        if not ob:
            continue
        for m in poly:
            if len(m) == 2:
                b = {_block_of(v, n) for v in m}
                blocks.setdefault(i, set()).add(tuple(sorted(b)))
    return SuspendedSystem(spec, equations, [i for i, ob in enumerate(obstructed) if not ob],
                           [i for i, ob in enumerate(obstructed) if ob], rows.specials, w0, blocks, amap)


def blocks_separated(system: SuspendedSystem) -> bool:
    """No quadratic term of an obstructed equation mixes two variable groups."""
    return all(len(b) == 1 for groups in system.blocks.values() for b in groups)


@dataclass
class RankReport:
    combined: int
    w0: int
    per_square: tuple
    block_sum: int


def combined_quadratic_rank(system: SuspendedSystem) -> int:
    """Rank of w = w0 + sum w_i on the single obstructed equation."""
    return quadratic_rank_report(system).combined


def quadratic_rank_report(system: SuspendedSystem) -> RankReport:
    if len(system.obstructed) != 1:
        raise WrongShapeError(f"combined rank needs h1 = 1, got {len(system.obstructed)} obstructed rows")
    idx = system.obstructed[0]
    variables, mat = system.quadratic_matrix(idx)
    full = quadratic_rank(mat) if mat else 0
    n = system.spec.n
    ranks = []
    for b in range(0, system.spec.m + 1):
        vs = [v for v in variables if _block_of(v, n) == b]
        _, sub = system.quadratic_matrix(idx, vs)
        ranks.append(quadratic_rank(sub) if sub else 0)
    return RankReport(full, ranks[0], tuple(ranks[1:]), sum(ranks))


# witness of a reduced component

def choose_split(L, d: int):
    """J + K = L with |J| >= 2 smallest, |J|, |K| <= d - 1, ties by lex."""
    options = []
    for J in itertools.product(*(range(x + 1) for x in L)):
        K = tuple(a - b for a, b in zip(L, J))
        if 2 <= sum(J) <= d - 1 and sum(K) <= d - 1:
            options.append((sum(J), J, K))
    if not options:
        raise ConstructionError(f"no split J + K = {L} with |J|, |K| <= {d - 1}")
    _, J, K = min(options)
    return J, K


def _derivative(poly: dict, name: str) -> dict:
    out: dict = {}
    for m, c in poly.items():
        k = m.count(name)
        if not k:
            continue
        rest = list(m)
        rest.remove(name)
        key = tuple(rest)
        out[key] = out.get(key, 0) + c * k
    return {m: c for m, c in out.items() if c}


def _evaluate(poly: dict, point: dict) -> Fraction:
    total = Fraction(0)
    for m, c in poly.items():
        v = Fraction(c)
        for name in m:
            v *= point.get(name, 0)
            if not v:
                break
        total += v
    return total


def principal_part(system: SuspendedSystem, i: int) -> dict:
    poly = system.equations[i]
    if i in system.obstructed:
        return {m: c for m, c in poly.items() if len(m) == 2}
    return {m: c for m, c in poly.items() if len(m) == 1}


@dataclass
class Witness:
    point: dict
    minor: Fraction
    jacobian_rank: int
    tau: int
    splits: list
    minor_columns: list
    diagonal_on_A: bool


def minor_columns(system: SuspendedSystem):
    spec = system.spec
    m = spec.m
    zeros = (0,) * m
    cols = []
    for i in system.linear_rows:
        cols.append(param_name(system.specials[i] + zeros))
    splits = []
    for j, i in enumerate(system.obstructed, start=1):
        L = system.specials[i]
        J, K = choose_split(L, spec.d)
        e = tuple(int(t == j - 1) for t in range(m))
        cols.append(param_name(J + e))
        splits.append((L, J, K, param_name(K + e)))
    return cols, splits


def _jacobian(system: SuspendedSystem, point: dict, columns) -> list:
    rows = []
    for i in range(len(system.equations)):
        pp = principal_part(system, i)
        rows.append([_evaluate(_derivative(pp, v), point) for v in columns])
    return rows


def restricted_minor_block(system: SuspendedSystem, A_vars) -> list:
    """d w^j / d a_{J_i,e_i} restricted to span(A_vars), as linear forms."""
    _, splits = minor_columns(system)
    A = set(A_vars)
    block = []
    for i in system.obstructed:
        pp = principal_part(system, i)
        row = []
        for (L, J, K, kname) in splits:
            e_idx = param_index(kname)[system.spec.n:]
            jname = param_name(J + e_idx)
            der = _derivative(pp, jname)
            row.append({mm: c for mm, c in der.items() if all(v in A for v in mm)})
        block.append(row)
    return block


def witness_reduced_component(system: SuspendedSystem, seed: int = 0, budget: int = 64) -> Witness:
    spec = system.spec
    h = len(system.obstructed)
    if spec.m < h + 1:
        raise DomainError(f"a witness needs m >= h1 + 1 = {h + 1}")
    if lattice_h1(spec.base, 2 * spec.d - 2) != 0:
        raise DomainError("the base needs h1(2d - 2) = 0")
    n, m = spec.n, spec.m
    cols, splits = minor_columns(system)
    em = tuple(int(t == m - 1) for t in range(m))
    e_m_vars = [param_name(I + em) for I in monomials_upto(n, spec.d - 1) if sum(I) >= 1]
    k_vars = [s[3] for s in splits]
    A_vars = sorted(set(k_vars) | set(e_m_vars), key=param_sort_key)
    block = restricted_minor_block(system, A_vars)
    diagonal = True
    for a, row in enumerate(block):
        for b, form in enumerate(row):
            want = {(k_vars[b],)} if a == b else set()
            if set(form) != want:
                diagonal = False
    rng = random.Random(seed)
    ws = [principal_part(system, i) for i in system.obstructed]
    for _ in range(budget):
        point = {k: Fraction(rng.choice([-1, 1]) * rng.randint(1, 8)) for k in k_vars}
        point = _complete_on_A(ws, point, e_m_vars, rng)
        if point is None:
            continue
        if any(_evaluate(principal_part(system, i), point) for i in range(len(system.equations))):
            continue
        J = _jacobian(system, point, cols)
        minor = determinant(J)
        if not minor:
            continue
        allv = system.variables()
        jr = rank(_jacobian(system, point, allv))
        return Witness(point, minor, jr, spec.base.tau, splits, cols, diagonal)
    raise CertificateInconclusive("no point with a nonzero designated minor within the sample budget")


def _complete_on_A(ws, point, e_m_vars, rng):
    """Choose the e_m block so every obstructed principal part vanishes."""
    fixed = dict(point)
    residual = [_evaluate(w, fixed) for w in ws]
    if not any(residual):
        return fixed
    h = len(ws)
    # solver variables: appear in the e_m block only paired with other (fixed) variables
    usable = []
    for v in e_m_vars:
        if any((v, v) in w for w in ws):
            continue
        usable.append(v)
    for _ in range(16):
        chosen = rng.sample(usable, min(h, len(usable)))
        partners = {}
        for w in ws:
            for mm in w:
                if len(mm) == 2 and (mm[0] in chosen) != (mm[1] in chosen):
                    other = mm[1] if mm[0] in chosen else mm[0]
                    if other in e_m_vars:
                        partners[other] = True
        trial = dict(fixed)
        for p in partners:
            if p not in chosen:
                trial[p] = Fraction(rng.randint(1, 8))
        if any(mm[0] in chosen and mm[1] in chosen for w in ws for mm in w if len(mm) == 2):
            continue
        mat, rhs = [], []
        for w in ws:
            row = [_evaluate(_derivative(w, v), {**trial, **{c: 0 for c in chosen}}) for v in chosen]
            mat.append(row)
            rhs.append(-_evaluate(w, {**trial, **{c: 0 for c in chosen}}))
        sol = solve(mat, rhs)
        if sol is None:
            continue
        for v, x in zip(chosen, sol):
            trial[v] = x
        if not any(_evaluate(w, trial) for w in ws):
            return trial
    return None


# invariants

def suspended_h1_oracle(spec: SuspensionSpec) -> tuple:
    """(h1, tau) of W^m by jet-space linear algebra: tau - rank(S_{<=d} -> T_W)."""
    W = spec.suspended_polynomial()
    q = tjurina_algebra(W)
    tau = q.dimension
    ech = SparseEchelon(lambda b: (sum(b), b))
    for K in monomials_upto(spec.nvars, spec.d):
        coords = q.coordinates(Polynomial.monomial(K))
        if coords:
            ech.add(coords)
    return tau - len(ech), tau


def check_h1_tau_preserved(spec: SuspensionSpec) -> tuple:
    """(h1, tau) of W^m, checked against the base.

    tau comes from the jet-space oracle on W^m.  h1 is tau minus the linear
    rank of the suspended system when that system is available, and is also
    recomputed from the image of S_{<=d} in the Tjurina algebra of W^m.
    """
    base = spec.base
    base_tau = tjurina_number(canonical_polynomial(base))
    base_h1 = lattice_h1(base, spec.d)
    if spec.m == 0:
        return base_h1, base_tau
    h, tau = suspended_h1_oracle(spec)
    if (h, tau) != (base_h1, base_tau):
        raise InvariantViolation(f"suspension changed (h1, tau): base {(base_h1, base_tau)}, suspended {(h, tau)}")
    if lattice_h1(base, base.tau + 1) == 0:
        hs = tau - derive_suspended_system(spec).linear_rank()
        if hs != base_h1:
            raise InvariantViolation(f"linear rank of the suspended system gives h1 = {hs}, expected {base_h1}")
    return h, tau


def check_curve_2dminus4(alpha) -> bool:
    from .lattice import davis_profile
    alpha = tuple(sorted((int(a) for a in alpha), reverse=True))
    if len(alpha) != 2:
        raise DomainError("the curve check needs n = 2")
    d = max(sum(alpha) - 5, max(alpha))
    direct = lattice_h1(alpha, 2 * d - 4) == 0
    # the partials cut a complete intersection of degrees alpha_1 - 1 >= alpha_2 - 1
    k1, k2 = alpha[0] - 1, alpha[1] - 1
    prof = davis_profile(k1, k2)
    chain = all(prof[i] == 0 for i in range(2 * d - 3, k1 + k2 + 2))
    return direct and chain
