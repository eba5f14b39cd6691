"""Equations of the substratum germ of the equianalytic family at f.

The generic member F = f + sum_{I in D} a_I x^I is reduced modulo its own
partials with the negative weighted degree ordering, halting at the highest
corner x^(alpha - 2).  The coefficients R_I of the surviving basis monomials
above the Newton polytope are the equations.  When alpha_1 >= 2 alpha_n a
chain of coordinate changes first removes the edge terms x_k^(alpha_k-1) x^J
lying on or below the polytope.

Coefficient roles (b, e, g, u, q) follow the usual split of D: basis points
above / on-or-below the polytope, edge points, points outside the
parallelepiped and the pure powers x_j^(alpha_j - 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import CertificateInconclusive, ConstructionError, DomainError, WrongCaseError
from .lattice import dual, h1, in_edge_set, lattice_regions, parallelepiped, simplex_size, weight
from .linalg import inverse, rank
from .localsing import SingularitySpec
from .ordering import Ws, weights_for
from .polyring import (_UNSET, ParamCoefficient, ParamPolynomial, default_cap, param_index, param_name,
                       param_sort_key, pc_add_into, pc_inverse, pc_mul, pc_scale,
                       pc_substitute, pc_truncate, substitute)
from .reduction import GeneratorSet, HighestCorner, jacobian_generators, truncated_nf

ROLES = ("b", "e", "g", "u", "q")

VERDICTS = ("SmoothNonExpectedDim", "NonReducedDouble", "TwoSmoothComponents", "ReducedIrreducibleA1")


@dataclass(frozen=True)
class CoefficientRole:
    role: str
    index: tuple


def coefficient_role(e, alpha) -> str:
    n = len(alpha)
    if any(e[j] >= alpha[j] for j in range(n)):
        return "u"
    tops = [j for j in range(n) if e[j] == alpha[j] - 1]
    if len(tops) >= 2:
        return "u"
    if len(tops) == 1:
        return "g" if in_edge_set(e, alpha) else "q"
    return "b" if weight(e, alpha) > 1 else "e"


def coefficient_roles(spec: SingularitySpec) -> dict:
    """index -> CoefficientRole for every free coefficient of the family."""
    regions = lattice_regions(spec)
    return {e: CoefficientRole(coefficient_role(e, spec.alpha), e) for e in regions.D}


def build_generic_family(spec: SingularitySpec, cap=_UNSET) -> ParamPolynomial:
    """F = sum x_i^alpha_i + sum lambda_i x_i^d + sum_{I in D} a_I x^I."""
    n, d = spec.n, spec.d
    if any(a > d for a in spec.alpha):
        raise DomainError("the family needs d >= alpha_i for every i")
    cap = default_cap() if cap is _UNSET else cap
    terms: dict = {}
    for i, (a, l) in enumerate(zip(spec.alpha, spec.lam)):
        for deg, c in ((a, 1), (d, l)):
            if c:
                e = tuple(deg if j == i else 0 for j in range(n))
                acc = terms.setdefault(e, {})
                pc_add_into(acc, {(): Fraction(c)})
                if not acc:
                    del terms[e]
    names = []
    for e in lattice_regions(spec).D:
        name = param_name(e)
        names.append(name)
        acc = terms.setdefault(e, {})
        pc_add_into(acc, {(name,): Fraction(1)})
    return ParamPolynomial._raw(n, terms, cap, tuple(names))


# equation bookkeeping

@dataclass
class Equation:
    poly: dict
    target: str | None = None
    index: tuple | None = None
    kind: str = "solved"
    certificates: dict = field(default_factory=dict)

    @property
    def coefficient(self) -> ParamCoefficient:
        return ParamCoefficient._raw(self.poly)

    def linear_part(self) -> dict:
        return {m[0]: c for m, c in self.poly.items() if len(m) == 1}

    def quadratic_terms(self) -> dict:
        return {m: c for m, c in self.poly.items() if len(m) == 2}


@dataclass(frozen=True)
class CoordinateChange:
    """x_var -> x_var - coefficient * x^monomial, removing the term at ``source``."""

    var: int
    monomial: tuple
    coefficient: dict
    source: tuple


@dataclass
class EquationSystem:
    spec: SingularitySpec
    perm: tuple
    case: str
    equations: list
    roles: dict
    cap: int | None
    changes: list = field(default_factory=list)
    _reduced: dict | None = None

    @property
    def targets(self) -> list:
        return [q.target for q in self.equations if q.target is not None]

    @property
    def obstructed(self) -> list:
        return [q for q in self.equations if q.kind == "last"]

    @property
    def last_equation(self) -> Equation:
        hc = tuple(a - 2 for a in self.spec.alpha)
        for q in self.equations:
            if q.index == hc and q.kind == "last":
                return q
        raise DomainError("the system has no highest-corner equation")

    def variables(self) -> list:
        names = set(self.roles)
        for q in self.equations:
            for m in q.poly:
                names.update(m)
        return sorted(names, key=param_sort_key)

    def role_of(self, name: str) -> str | None:
        return self.roles.get(name)

    def linear_matrix(self, variables=None) -> list:
        variables = variables or self.variables()
        col = {v: i for i, v in enumerate(variables)}
        rows = []
        for q in self.equations:
            row = [Fraction(0)] * len(variables)
            for v, c in q.linear_part().items():
                row[col[v]] = c
            rows.append(row)
        return rows

    def linear_rank(self) -> int:
        return rank(self.linear_matrix()) if self.equations else 0

    def ambient_linear_rank(self) -> int:
        """Codimension of the tangent space of the whole stratum.

        The substratum omits the degree < alpha_n coefficients (killed by
        translations and the singularity at the origin, less the n
        translation directions) and the GL_n directions x_i^(alpha_i-1) x_j.
        """
        n = self.spec.n
        return self.linear_rank() + simplex_size(n, min(self.spec.alpha) - 1) - n

    def solved_map(self) -> dict:
        """target -> expression in the remaining variables, up to the cap."""
        if self._reduced is not None:
            return self._reduced
        solved = [q for q in self.equations if q.target is not None]
        targets = [q.target for q in solved]
        # normalize the target block of the linear part to the identity
        block = [[q.linear_part().get(t, Fraction(0)) for t in targets] for q in solved]
        inv = inverse(block) if block else []
        if inv is None:
            raise ConstructionError("linear part is singular on the solved coefficients")
        polys = []
        for i in range(len(solved)):
            acc: dict = {}
            for j, q in enumerate(solved):
                if inv[i][j]:
                    pc_add_into(acc, q.poly, inv[i][j])
            polys.append(acc)
        base = {}
        for t, p in zip(targets, polys):
            rhs = dict(p)
            pc_add_into(rhs, {(t,): Fraction(1)}, -1)
            base[t] = pc_scale(rhs, -1)
        current = {t: {} for t in targets}
        rounds = (self.cap if self.cap is not None else 8) + 2
        for _ in range(rounds):
            nxt = {t: pc_truncate(pc_substitute(base[t], current, self.cap), self.cap) for t in targets}
            if nxt == current:
                break
            current = nxt
        else:
            if self.cap is None:
                raise ConstructionError("elimination did not converge without a parameter cap")
        self._reduced = current
        return current

    def reduced_last(self, equation: Equation | None = None) -> dict:
        q = equation or self.last_equation
        return pc_truncate(pc_substitute(q.poly, self.solved_map(), self.cap), self.cap)

    def quadratic_form(self, equation: Equation | None = None, variables=None):
        """Symmetric matrix of the quadratic part of a reduced obstructed equation."""
        poly = self.reduced_last(equation)
        quad = {m: c for m, c in poly.items() if len(m) == 2}
        if variables is None:
            names = set()
            for m in quad:
                names.update(m)
            variables = sorted(names, key=param_sort_key)
        col = {v: i for i, v in enumerate(variables)}
        mat = [[Fraction(0)] * len(variables) for _ in variables]
        for (u, v), c in quad.items():
            if u not in col or v not in col:
                continue
            i, j = col[u], col[v]
            if i == j:
                mat[i][i] += c
            else:
                mat[i][j] += c / 2
                mat[j][i] += c / 2
        return variables, mat


def quadratic_rank(Q) -> int:
    if any(len(row) != len(Q) for row in Q):
        raise DomainError("quadratic form matrix must be square")
    if any(Q[i][j] != Q[j][i] for i in range(len(Q)) for j in range(i)):
        raise DomainError("quadratic form matrix must be symmetric")
    return rank(Q)


# derivation

def case_of(spec: SingularitySpec) -> str:
    alpha = sorted(spec.alpha, reverse=True)
    return "Case1" if alpha[0] < 2 * alpha[-1] else "Case2"


def derive_case1(spec: SingularitySpec, cap=_UNSET) -> EquationSystem:
    s, perm = spec.sorted()
    if case_of(s) != "Case1":
        raise WrongCaseError("alpha_1 >= 2 alpha_n: use the second case")
    return _derive(s, perm, "Case1", cap)


def derive_case2(spec: SingularitySpec, cap=_UNSET) -> EquationSystem:
    s, perm = spec.sorted()
    if case_of(s) != "Case2":
        raise WrongCaseError("alpha_1 < 2 alpha_n: use the first case")
    return _derive(s, perm, "Case2", cap)


def derive(spec: SingularitySpec, cap=_UNSET) -> EquationSystem:
    s, perm = spec.sorted()
    return _derive(s, perm, case_of(s), cap)


def _is_pure(e) -> bool:
    return sum(1 for x in e if x) == 1


def _chain_candidate(F: ParamPolynomial, alpha, key):
    best = None
    for e, c in F.terms.items():
        if not c or _is_pure(e) or weight(e, alpha) > 1:
            continue
        ks = [k for k in range(len(alpha)) if e[k] == alpha[k] - 1]
        if not ks:
            continue
        if best is None or key(e) > key(best[0]):
            best = (e, ks[0])
    return best


def coordinate_chain(F: ParamPolynomial, alpha, d: int, cap, max_steps: int = 10000):
    """Remove edge terms on or below the polytope; truncate at x-degree d + 3."""
    n = len(alpha)
    key = Ws(weights_for(alpha)).key_function(n)
    changes = []
    for _ in range(max_steps):
        cand = _chain_candidate(F, alpha, key)
        if cand is None:
            return F, changes
        e, k = cand
        pure = tuple(alpha[k] if j == k else 0 for j in range(n))
        unit = F.terms.get(pure, {})
        if not unit.get((), 0):
            raise ConstructionError(f"coefficient of x{k + 1}^{alpha[k]} is not a unit")
        J = tuple(0 if j == k else e[j] for j in range(n))
        c = pc_scale(pc_mul(F.terms[e], pc_inverse(unit, cap), cap), Fraction(1, alpha[k]))
        xk = tuple(int(j == k) for j in range(n))
        rep = ParamPolynomial._raw(n, {xk: {(): Fraction(1)}, J: pc_scale(c, -1)}, cap)
        F = substitute(F, k, rep, max_degree=d + 3)
        if F.terms.get(e):
            raise ConstructionError(f"coordinate change failed to clear the term at {e}")
        changes.append(CoordinateChange(k, J, c, e))
    raise ConstructionError("coordinate change chain did not terminate")


def _derive(s: SingularitySpec, perm, case: str, cap) -> EquationSystem:
    cap = default_cap() if cap is _UNSET else cap
    alpha, n = s.alpha, s.n
    roles = {param_name(e): r.role for e, r in coefficient_roles(s).items()}
    index_of = {param_name(e): e for e in lattice_regions(s).D}
    F = build_generic_family(s, cap)
    changes = []
    unit_pivots = False
    if case == "Case2":
        F, changes = coordinate_chain(F, alpha, s.d, cap)
        unit_pivots = True
    equations = []
    kept = {}
    for e, c in F.terms.items():
        if _is_pure(e) and any(e[j] == alpha[j] for j in range(n)):
            kept[e] = c
        elif weight(e, alpha) <= 1:
            name = param_name(e)
            target = name if name in roles else None
            equations.append(Equation(dict(c), target, e, "linear" if case == "Case1" else "lower"))
        else:
            kept[e] = c
    # every on-or-below coefficient of the family must be constrained
    for name, role in roles.items():
        if role in ("e", "q") and not any(q.target == name for q in equations):
            equations.append(Equation({(name,): Fraction(1)}, name, index_of[name], "lower"))
    Ft = ParamPolynomial._raw(n, kept, cap, F.params)
    ordering = Ws(weights_for(alpha))
    G = GeneratorSet(jacobian_generators(Ft), ordering)
    hc = tuple(a - 2 for a in alpha)
    nf = truncated_nf(Ft, G, HighestCorner(hc), cap=cap, unit_pivots=unit_pivots)
    key = ordering.key_function(n)
    basis_above = [e for e in parallelepiped(alpha) if weight(e, alpha) > 1]
    for e in sorted(basis_above, key=key, reverse=True):
        poly = nf.get(e, {})
        name = param_name(e)
        if name in roles and sum(e) <= s.d:
            equations.append(Equation(dict(poly), name, e, "solved"))
        else:
            equations.append(Equation(dict(poly), None, e, "last"))
    order = {"linear": 0, "lower": 0, "solved": 1, "last": 2}
    equations.sort(key=lambda q: (order[q.kind], _neg(key(q.index))))
    return EquationSystem(s, perm, case, equations, roles, cap, changes)


def _neg(k):
    return tuple(_neg(x) for x in k) if isinstance(k, tuple) else -k


# certificates

def _g_degree(m, roles) -> int:
    return sum(1 for v in m if roles.get(v) == "g")


def pairing_report(system: EquationSystem) -> dict:
    """Coefficients of g_I g_dual(I) in the reduced last equation."""
    alpha = system.spec.alpha
    poly = system.reduced_last()
    regions = lattice_regions(system.spec)
    pairs = {}
    off_pairing = []
    for m, c in poly.items():
        if len(m) != 2 or not all(system.roles.get(v) == "g" for v in m):
            continue
        i1, i2 = param_index(m[0]), param_index(m[1])
        if dual(i1, alpha) == i2:
            pairs[m] = c
        else:
            off_pairing.append(m)
    expected = {tuple(sorted((param_name(e), param_name(regions.dual[e])))) for e in regions.E}
    missing = sorted(m for m in expected if m not in pairs)
    return {"pairs": pairs, "off_pairing": off_pairing, "missing": missing}


def derivatives_in_g(system: EquationSystem) -> bool:
    """Every first partial of the reduced last equation has only terms involving some g."""
    poly = system.reduced_last()
    roles = system.roles
    names = set()
    for m in poly:
        names.update(m)
    for v in names:
        coef = ParamCoefficient._raw(poly).derivative(v)
        for m in coef.terms:
            if _g_degree(m, roles) == 0:
                return False
    return True


def in_g_squared(system: EquationSystem) -> bool:
    return all(_g_degree(m, system.roles) >= 2 for m in system.reduced_last())


@dataclass
class Classification:
    verdict: str
    case: str
    alpha: tuple
    d: int
    tau: int
    h1: int
    linear_rank: int
    ambient_linear_rank: int
    quadratic_rank: int
    pairing_rank: int
    last_equation_zero: bool
    derivatives_in_g: bool
    in_g_squared: bool
    diagonal_linear_part: bool
    pair_signs: dict
    sign_pairs_agree: bool
    off_pairing: int
    missing_pairs: int
    dim_actual: int
    dim_expected: int

    def as_record(self) -> dict:
        out = dict(self.__dict__)
        out["alpha"] = list(self.alpha)
        return out


def _is_diagonal(system: EquationSystem) -> bool:
    targets = set(system.targets)
    for q in system.equations:
        lin = {v for v, c in q.linear_part().items() if v in targets}
        if q.target is None:
            if lin:
                return False
        elif lin != {q.target}:
            return False
    return True


def classify_stratum(spec: SingularitySpec, cap=_UNSET, system: EquationSystem | None = None) -> Classification:
    s, _ = spec.sorted()
    h = h1(s, s.d)
    if h != 1:
        raise DomainError(f"classification needs h1 = 1, got {h}")
    system = system or derive(spec, cap)
    if system.cap is not None and system.cap < 2:
        # the verdict is read off the quadratic part, which such a cap discards
        raise CertificateInconclusive(f"parameter-degree cap {system.cap} hides the quadratic part")
    last = system.reduced_last()
    zero = not last
    variables, Q = system.quadratic_form()
    qrank = quadratic_rank(Q) if Q else 0
    g_vars = [v for v in variables if system.roles.get(v) == "g"]
    _, Qg = system.quadratic_form(variables=g_vars)
    grank = quadratic_rank(Qg) if Qg else 0
    report = pairing_report(system)
    signs = {}
    for (u, v), c in report["pairs"].items():
        signs[f"{u}*{v}"] = 1 if c > 0 else -1
    agree = len(set(signs.values())) <= 1
    lin = system.linear_rank()
    amb = system.ambient_linear_rank()
    N = comb(s.d + s.n, s.n) - 1
    if zero:
        verdict = VERDICTS[0]
    elif qrank == 0:
        raise CertificateInconclusive("last equation has no quadratic part up to the cap")
    elif qrank == 1:
        verdict = VERDICTS[1]
    elif qrank == 2:
        verdict = VERDICTS[2]
    else:
        verdict = VERDICTS[3]
    dim_actual = N - amb - (0 if zero else 1)
    return Classification(verdict, system.case, s.alpha, s.d, s.tau, h, lin, amb, qrank, grank, zero,
                          derivatives_in_g(system), in_g_squared(system), _is_diagonal(system), signs,
                          agree, len(report["off_pairing"]), len(report["missing"]), dim_actual,
                          N - s.tau)
