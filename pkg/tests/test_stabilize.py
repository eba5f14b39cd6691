import dataclasses
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eqsing.errors import DomainError, NormalizationError, UnsupportedBaseError, WrongShapeError
from eqsing.linalg import determinant
from eqsing.localsing import SingularitySpec, monomials_upto
from eqsing.polyring import ParamPolynomial, Polynomial, jet, param_name, pc_truncate
from eqsing.stabilize import (SuspensionSpec, blocks_separated, check_curve_2dminus4, check_h1_tau_preserved,
                              choose_split, combined_quadratic_rank, derive_suspended_system,
                              eliminate_mixed_terms, generic_suspended_family, minor_columns,
                              principal_part, quadratic_rank_report, restricted_minor_block,
                              suspended_h1_oracle, witness_reduced_component)


def S(alpha, d=None):
    return SingularitySpec.make(alpha, d)


@pytest.fixture(scope="module")
def x6y5_m1():
    return derive_suspended_system(SuspensionSpec.make(S((6, 5)), 1))


@pytest.fixture(scope="module")
def x6y5_m2():
    return derive_suspended_system(SuspensionSpec.make(S((6, 5)), 2))


def _lift(p: Polynomial) -> ParamPolynomial:
    return ParamPolynomial.lift(p, cap=None)


def test_eliminate_identity_without_linear_terms():
    F = _lift(Polynomial(3, {(6, 0, 0): 1, (0, 5, 0): 1, (0, 0, 2): 1, (2, 2, 0): 3, (1, 1, 2): 1}))
    out, mapping = eliminate_mixed_terms(F, 2, degree_bound=8)
    assert out == F
    assert mapping[param_name((2, 2, 0))] == {(): 3}


def test_single_mixed_term_gives_quarter_square():
    # x3^2 + a x1 x2^2 x3 -> x-only gains -1/4 a^2 x1^2 x2^4
    F = ParamPolynomial(3, {(6, 0, 0): 1, (0, 5, 0): 1, (0, 0, 2): 1, (1, 2, 1): {("a[1,2,1]",): 1}}, cap=None)
    out, mapping = eliminate_mixed_terms(F, 2)
    assert mapping[param_name((2, 4, 0))] == {("a[1,2,1]", "a[1,2,1]"): Fraction(-1, 4)}
    assert not any(e[2] == 1 for e in out.terms)


@settings(max_examples=40)
@given(st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)).filter(lambda e: sum(e) >= 1),
                       st.integers(-3, 3), max_size=4),
       st.dictionaries(st.tuples(st.integers(0, 4), st.integers(0, 4)), st.integers(-3, 3), max_size=4))
def test_completing_square_closed_form(A_terms, B_terms):
    """f + y^2 + y A + B becomes (y + A/2)^2 + f + B - A^2/4, read off to the degree bound."""
    bound = 8
    A = Polynomial(2, A_terms)
    B = Polynomial(2, B_terms) + Polynomial(2, {(6, 0): 1, (0, 5): 1})
    y_terms = {e + (1,): c for e, c in A.terms.items()}
    F = Polynomial(3, {e + (0,): c for e, c in B.terms.items()}) + Polynomial(3, y_terms)
    F = F + Polynomial.monomial((0, 0, 2))
    out, _ = eliminate_mixed_terms(_lift(F), 2, degree_bound=bound)
    x_only = Polynomial(2, {e[:2]: c for e, c in out.specialize({}).terms.items() if e[2] == 0})
    want = jet(B - A * A * Fraction(1, 4), bound)
    assert x_only == want


def test_generic_map_matches_closed_form_to_order_two():
    """a'_{K,0} = a_{K,0} - 1/4 sum_{J+J'=K} a_{J,1} a_{J',1} up to cubic terms."""
    spec = SuspensionSpec.make(S((3, 3), 3), 1)
    F = generic_suspended_family(spec)
    _, mapping = eliminate_mixed_terms(F, 2, degree_bound=6)
    base = spec.base_polynomial()
    lin = [J for J in monomials_upto(2, 2) if sum(J) >= 1]
    for K in monomials_upto(2, 6):
        want = {(): Fraction(base.terms[K])} if K in base.terms else {}
        if sum(K) <= 3:
            want[(param_name(K + (0,)),)] = Fraction(1)
        for J in lin:
            J2 = tuple(k - j for k, j in zip(K, J))
            if min(J2) < 0 or J2 not in lin:
                continue
            key = tuple(sorted((param_name(J + (1,)), param_name(J2 + (1,)))))
            want[key] = want.get(key, 0) - Fraction(1, 4)
        got = pc_truncate(mapping.get(param_name(K + (0,)), {}), 2)
        assert got == {k: v for k, v in want.items() if v}, K


def test_elimination_is_idempotent():
    F = generic_suspended_family(SuspensionSpec.make(S((3, 3), 3), 1))
    once, _ = eliminate_mixed_terms(F, 2, degree_bound=6)
    twice, _ = eliminate_mixed_terms(once, 2, degree_bound=6)
    assert twice == once


def test_square_must_be_normalized():
    F = _lift(Polynomial(3, {(3, 0, 0): 1, (0, 3, 0): 1, (0, 0, 2): 2}))
    with pytest.raises(NormalizationError):
        eliminate_mixed_terms(F, 2)


def test_x6y5_single_square_system(x6y5_m1):
    assert len(x6y5_m1.equations) == 20
    assert len(x6y5_m1.linear_rows) == 19 and x6y5_m1.linear_rank() == 19
    assert [x6y5_m1.specials[i] for i in x6y5_m1.obstructed] == [(4, 3)]
    assert blocks_separated(x6y5_m1)
    rep = quadratic_rank_report(x6y5_m1)
    assert (rep.combined, rep.w0, rep.per_square) == (15, 1, (14,))


def test_two_squares_block_structure(x6y5_m2):
    rep = quadratic_rank_report(x6y5_m2)
    assert rep.per_square[0] == rep.per_square[1] == 14
    assert rep.combined == rep.block_sum == 29
    assert blocks_separated(x6y5_m2)
    assert combined_quadratic_rank(x6y5_m2) == 29


def test_synthetic_thresholds():
    base = S((4, 4, 3), 4)
    r1 = combined_quadratic_rank(derive_suspended_system(SuspensionSpec.make(base, 1)))
    r2 = combined_quadratic_rank(derive_suspended_system(SuspensionSpec.make(base, 2)))
    assert r1 == 13 and r2 == 23


def test_choose_split():
    assert choose_split((4, 3), 6) == ((0, 2), (4, 1))
    J, K = choose_split((2, 2, 1), 4)
    assert sum(J) == 2 and sum(K) <= 3 and tuple(a + b for a, b in zip(J, K)) == (2, 2, 1)


def test_witness_and_minor_factorization(x6y5_m2):
    w = witness_reduced_component(x6y5_m2, seed=0)
    assert w.minor == Fraction(-7, 2) and w.jacobian_rank == w.tau == 20
    assert w.diagonal_on_A
    # block triangular: linear rows never see the a_{J,e_i} columns
    cols, splits = minor_columns(x6y5_m2)
    nlin = len(x6y5_m2.linear_rows)
    lin = [[principal_part(x6y5_m2, i).get((v,), 0) for v in cols[:nlin]] for i in x6y5_m2.linear_rows]
    block = restricted_minor_block(x6y5_m2, [s[3] for s in splits])
    diag = [sum(c * w.point[m[0]] for m, c in block[a][a].items()) for a in range(len(block))]
    prod_diag = Fraction(1)
    for x in diag:
        prod_diag *= x
    assert w.minor == determinant(lin) * prod_diag


def test_witness_needs_enough_squares(x6y5_m1):
    with pytest.raises(DomainError):
        witness_reduced_component(x6y5_m1)


@pytest.mark.parametrize("alpha,d,m,want", [
    ((6, 5), 6, 1, (1, 20)),
    ((6, 5), 6, 2, (1, 20)),
    ((4, 4, 3), 4, 1, (1, 18)),
    ((3, 3, 3, 3), 3, 1, (1, 16)),
    ((6, 5), 6, 0, (1, 20)),
])
def test_h1_tau_preserved(alpha, d, m, want):
    assert check_h1_tau_preserved(SuspensionSpec.make(S(alpha, d), m)) == want


def test_h1_oracle_sees_degree():
    assert suspended_h1_oracle(SuspensionSpec.make(S((6, 5)), 1, d=7)) == (0, 20)


def test_curve_check():
    for alpha in [(2, 2), (5, 5), (6, 5), (9, 3), (12, 7)]:
        assert check_curve_2dminus4(alpha)
    with pytest.raises(DomainError):
        check_curve_2dminus4((3, 3, 3))


def test_combined_rank_needs_one_obstruction(x6y5_m1):
    with pytest.raises(WrongShapeError):
        combined_quadratic_rank(dataclasses.replace(x6y5_m1, obstructed=[]))


def test_base_form_only_at_base_degree():
    with pytest.raises(UnsupportedBaseError):
        derive_suspended_system(SuspensionSpec.make(S((6, 5)), 1, d=5))


def test_unisingular_family_adds_power():
    spec = SuspensionSpec.make(S((3, 3), 3), 1, unisingular=True)
    F = generic_suspended_family(spec)
    assert F.terms[(0, 0, 3)].get((), 0) == 1


def test_witness_deterministic(x6y5_m2):
    a = witness_reduced_component(x6y5_m2, seed=random.Random(5).randint(0, 99))
    b = witness_reduced_component(x6y5_m2, seed=random.Random(5).randint(0, 99))
    assert a.point == b.point and a.minor == b.minor
