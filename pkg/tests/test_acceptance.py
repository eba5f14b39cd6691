"""End-to-end acceptance criteria; each prints one PASS/FAIL line."""

import random
import time

import pytest

from eqsing.lattice import canonical_alphas, davis_check, davis_profile, h1
from eqsing.lattice import lattice_regions, squares_d_holds
from eqsing.localsing import SingularitySpec, canonical_polynomial, tjurina_number
from eqsing.reduction import red_nf_buchberger
from eqsing.stabilize import (SuspensionSpec, check_h1_tau_preserved, combined_quadratic_rank,
                              derive_suspended_system, suspended_h1_oracle, witness_reduced_component)
from eqsing.stratum import classify_stratum, derive_case1

from .test_lattice import cast_properties, enum_h1
from .test_reduction import commutation_instance, linear_algebra_membership, random_instance


@pytest.fixture
def report(capsys):
    def _report(number: int, title: str, ok: bool, seconds: float, budget: float):
        ok = ok and seconds < budget
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number:2d}: {title} ({seconds:.2f}s, budget {budget:g}s)")
        assert ok
    return _report


def _timed(fn):
    t = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t


def test_01_x6y5_invariants(report):
    def body():
        s = SingularitySpec.make((6, 5), 6)
        tau = tjurina_number(canonical_polynomial(s))
        return tau == 20 == 4 * 6 - 4 and h1(s, 6) == 1 and h1(s, 7) == 0
    ok, dt = _timed(body)
    report(1, "(6,5)/d=6: tau = 20, h1(6) = 1, h1(7) = 0", ok, dt, 1)


@pytest.mark.parametrize("alpha,d,want", [
    ((6, 5), 6, lambda r: r == 1),
    ((7, 5), 7, lambda r: r == 2),
    ((6, 6), 7, lambda r: r == 2),
    ((8, 5), 8, lambda r: r >= 3),
    ((7, 6), 8, lambda r: r >= 3),
])
def test_02_plane_curve_ladder(report, alpha, d, want):
    verdicts = {1: "NonReducedDouble", 2: "TwoSmoothComponents"}

    def body():
        s = SingularitySpec.make(alpha, d)
        system = derive_case1(s)
        cls = classify_stratum(s, system=system)
        r = cls.quadratic_rank
        return want(r) and cls.verdict == verdicts.get(r, "ReducedIrreducibleA1"), r
    (ok, r), dt = _timed(body)
    report(2, f"ladder {alpha}/d={d}: quadratic rank {r}", ok, dt, 60)


def test_03_fermat_cubic(report):
    def body():
        s = SingularitySpec.make((3, 3, 3, 3), 3)
        cls = classify_stratum(s)
        return (not lattice_regions(s).E and cls.verdict == "SmoothNonExpectedDim"
                and (cls.dim_actual, cls.dim_expected) == (19, 18))
    ok, dt = _timed(body)
    report(3, "(3,3,3,3)/d=3 smooth of dimension 19 vs 18", ok, dt, 1)


def test_04_quartic_threefold(report):
    def body():
        cls = classify_stratum(SingularitySpec.make((4, 4, 4), 5))
        return (cls.ambient_linear_rank == cls.tau - 1 == 26 and cls.pairing_rank >= 3
                and cls.off_pairing == 0 and cls.missing_pairs == 0 and cls.derivatives_in_g)
    ok, dt = _timed(body)
    report(4, "(4,4,4)/d=5 rank 26, pairing form rank >= 3, partials in the g-ideal", ok, dt, 300)


def _ci_hilbert(d, k, i):
    """Independent count: monomials x^a y^b of degree i with a < d, b < k."""
    return sum(1 for a in range(d) for b in range(k) if a + b == i)


def test_05_davis(report):
    def body():
        for d in range(2, 9):
            for k in range(2, d + 1):
                prof = davis_profile(d, k)
                if not davis_check(d, k):
                    return False
                if any(prof[i] != _ci_hilbert(d, k, i) for i in range(0, d + k + 2)):
                    return False
                if any(prof[d + k - j] != j - 1 for j in range(1, k + 2)):
                    return False
                if any(prof[i] > k for i in range(0, d + k + 2)):
                    return False
        return True
    ok, dt = _timed(body)
    report(5, "Davis profile for 2 <= k <= d <= 8", ok, dt, 1)


def test_06_cast_suite(report):
    def body():
        alphas = list(canonical_alphas(4, 20))
        return all(cast_properties(a) for a in alphas), len(alphas)
    (ok, count), dt = _timed(body)
    report(6, f"Castelnuovo properties (a),(d),(e),(f) on {count} specs", ok, dt, 10)


def test_07_squares_a(report):
    def body():
        base = SingularitySpec.make((6, 5), 6)
        out = []
        for m in (1, 2):
            spec = SuspensionSpec.make(base, m)
            out.append(check_h1_tau_preserved(spec) == (1, 20) and suspended_h1_oracle(spec) == (1, 20))
        return all(out)
    ok, dt = _timed(body)
    report(7, "suspension of (6,5)/d=6 keeps (h1, tau) = (1, 20) for m = 1, 2", ok, dt, 300)


def test_08_squares_e(report):
    def body():
        gur = combined_quadratic_rank(derive_suspended_system(SuspensionSpec.make(SingularitySpec.make((6, 5), 6), 1)))
        syn = SingularitySpec.make((4, 4, 3), 4)
        assert h1(syn, 4) == 1
        r1 = combined_quadratic_rank(derive_suspended_system(SuspensionSpec.make(syn, 1)))
        r2 = combined_quadratic_rank(derive_suspended_system(SuspensionSpec.make(syn, 2)))
        return gur >= 3 and r1 >= 2 and r2 >= 3, (gur, r1, r2)
    (ok, ranks), dt = _timed(body)
    report(8, f"combined ranks (6,5) m=1, (4,4,3) m=1,2: {ranks}", ok, dt, 600)


def test_09_witness(report):
    def body():
        system = derive_suspended_system(SuspensionSpec.make(SingularitySpec.make((6, 5), 6), 2))
        w = witness_reduced_component(system, seed=0)
        return w.minor != 0 and w.jacobian_rank == w.tau == 20, w.minor
    (ok, minor), dt = _timed(body)
    report(9, f"reduced component witness for (6,5)/d=6, m = 2 (minor {minor})", ok, dt, 600)


def test_10_oracles(report):
    def body():
        agree = 0
        for seed in range(200):
            f, G = random_instance(random.Random(seed))
            if f.nvars > 3 or (not f.is_zero() and f.degree() > 8):
                return False
            agree += red_nf_buchberger(f, G).is_zero() == linear_algebra_membership(f, G)
        stats: dict = {}
        commuting = sum(commutation_instance(s, stats) for s in range(50))
        return agree == 200 and commuting == 50 and stats.get("nontrivial", 0) >= 40
    ok, dt = _timed(body)
    report(10, "membership oracle on 200 instances, substitution commutes on 50", ok, dt, 300)


def test_11_squares_d(report):
    def body():
        count = 0
        for alpha in canonical_alphas(4, 24):
            top = sum(a - 2 for a in alpha) + 2
            for d in range(max(alpha), top + 1):
                count += 1
                # the library check and a direct enumeration must both hold
                direct = enum_h1(alpha, d) >= d - 1 or enum_h1(alpha, 2 * d - 2) == 0
                if not (direct and squares_d_holds(alpha, d)):
                    return False, count
        return True, count
    (ok, count), dt = _timed(body)
    report(11, f"h1(d) < d - 1 implies h1(2d - 2) = 0 on {count} (alpha, d) pairs", ok, dt, 30)
