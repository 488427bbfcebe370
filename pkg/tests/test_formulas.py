import pytest
from hypothesis import given
from hypothesis import strategies as st

from modcurve.families import FAMILIES, NonsplitAlgebra, SubgroupSpec, is_inert
from modcurve.formulas import (InconsistentInvariants, InvariantSet, genus_from_invariants,
                               invariants_arith1, invariants_formula, invariants_ns,
                               invariants_ns_plus, invariants_ns_star, invariants_s4,
                               invariants_sp, invariants_sp_plus, invariants_sp_star,
                               invariants_x0, invariants_x1, invariants_xfull, ns_sharp_S,
                               ns_sharp_s_enumerate, ns_sharp_s_inclusion_exclusion,
                               s4_table_row, sp_plus_eps2_prime_power)
from modcurve.matgrp import invariants_bruteforce

# (i, eps2, eps3, eps_inf, genus) recorded from the brute-force engine and the
# predicate oracle in tests/_naive.py
X0 = [(1, 1, 1, 1, 0), (3, 1, 0, 2, 0), (4, 0, 1, 2, 0), (6, 0, 0, 3, 0), (6, 2, 0, 2, 0),
      (12, 0, 0, 4, 0), (8, 0, 2, 2, 0), (12, 0, 0, 4, 0), (12, 0, 0, 4, 0), (18, 2, 0, 4, 0),
      (12, 0, 0, 2, 1), (24, 0, 0, 6, 0)]
X1 = [(1, 1, 1, 1, 0), (3, 1, 0, 2, 0), (4, 0, 1, 2, 0), (6, 0, 0, 3, 0), (12, 0, 0, 4, 0),
      (12, 0, 0, 4, 0), (24, 0, 0, 6, 0), (24, 0, 0, 6, 0), (36, 0, 0, 8, 0), (36, 0, 0, 8, 0),
      (60, 0, 0, 10, 1), (48, 0, 0, 10, 0)]
OTHER = {
    ("xfull", 7): (168, 0, 0, 24, 3),
    ("xfull", 40): (23040, 0, 0, 576, 1633),
    ("sp", 5): (30, 2, 0, 6, 0),
    ("sp", 39): (2184, 0, 0, 56, 155),
    ("sp+", 2): (3, 1, 0, 2, 0),
    ("sp+", 5): (15, 3, 0, 3, 0),
    ("sp*", 6): (18, 2, 0, 4, 0),
    ("ns+", 2): (1, 1, 1, 1, 0),
    ("ns+", 7): (21, 5, 0, 3, 0),
    ("ns+", 13): (78, 6, 0, 6, 3),
    ("ns+", 39): (468, 24, 0, 12, 28),
    ("ns+", 40): (320, 16, 2, 8, 19),
    ("ns*", 6): (3, 3, 0, 1, 0),
    ("ns*", 39): (234, 18, 0, 6, 13),
    ("ns*", 40): (160, 8, 1, 4, 10),
    ("x0", 39): (56, 0, 2, 4, 3),
    ("x0", 40): (72, 0, 0, 8, 3),
    ("s4", 5): (5, 1, 2, 1, 0),
    ("s4", 7): (7, 3, 1, 1, 0),
    ("s4", 11): (55, 3, 4, 5, 1),
    ("s4", 13): (91, 3, 4, 7, 3),
    ("s4", 17): (102, 6, 3, 6, 4),
}


@pytest.mark.parametrize("n", range(1, 13))
def test_x0_and_x1_tables(n):
    assert invariants_x0(n).values == X0[n - 1]
    assert invariants_x1(n).values == X1[n - 1]


@pytest.mark.parametrize("key", sorted(OTHER))
def test_recorded_values(key):
    family, n = key
    assert invariants_formula(SubgroupSpec(family, n)).values == OTHER[key]


def test_worked_examples_at_39():
    assert invariants_ns_plus(39).values == (468, 24, 0, 12, 28)
    assert invariants_ns_star(39).values == (234, 18, 0, 6, 13)


def test_arith_special_cases():
    assert invariants_arith1(1, 2).values == (3, 1, 0, 2, 0)
    # M=2, N=1 is X(2): no elliptic points and three cusps
    assert invariants_arith1(2, 1).values == (6, 0, 0, 3, 0)
    assert invariants_arith1(2, 2).values == (12, 0, 0, 4, 0)
    assert invariants_arith1(1, 4).values == (6, 0, 0, 3, 0)
    assert invariants_arith1(1, 11).same_as(invariants_x1(11))


def test_x1_at_4_has_index_6():
    assert invariants_x1(4).values == (6, 0, 0, 3, 0)
    assert invariants_bruteforce(SubgroupSpec("x1", 4)).values == (6, 0, 0, 3, 0)


def test_level_one_is_the_j_line():
    for fam in FAMILIES:
        if fam == "s4":
            continue
        spec = SubgroupSpec(fam, 1, 1 if fam.startswith("arith") else None)
        assert invariants_formula(spec).values == (1, 1, 1, 1, 0)


def test_genus_from_invariants():
    assert genus_from_invariants(1, 1, 1, 1) == 0
    assert genus_from_invariants(468, 24, 0, 12) == 28
    assert genus_from_invariants(12, 0, 0, 2) == 1
    with pytest.raises(InconsistentInvariants):
        genus_from_invariants(6, 1, 0, 3)  # 12 + 6 - 3 - 18 = -3
    with pytest.raises(InconsistentInvariants):
        genus_from_invariants(7, 0, 0, 1)  # not divisible by 12
    with pytest.raises(InconsistentInvariants):
        genus_from_invariants(0, 0, 0, 0)
    with pytest.raises(InconsistentInvariants):
        InvariantSet(12, 0, 0, 2, 0)


@given(st.integers(1, 10**4), st.integers(0, 50), st.integers(0, 50), st.integers(0, 500))
def test_genus_assembly_matches_rational_formula(i, e2, e3, einf):
    from fractions import Fraction
    g = 1 + Fraction(i, 12) - Fraction(e2, 4) - Fraction(e3, 3) - Fraction(einf, 2)
    if g.denominator == 1 and g >= 0:
        assert genus_from_invariants(i, e2, e3, einf) == g
    else:
        with pytest.raises(InconsistentInvariants):
            genus_from_invariants(i, e2, e3, einf)


# -- S4 --------------------------------------------------------------------


@pytest.mark.parametrize("p", [5, 11, 13, 19, 29])
def test_s4_table_row_where_s4_leaves_psl2(p):
    assert invariants_s4(p).values[:4] == s4_table_row(p)
    assert invariants_bruteforce(SubgroupSpec("s4", p)).values[:4] == s4_table_row(p)


@pytest.mark.parametrize("p", [7, 17, 23])
def test_s4_table_row_fails_where_s4_sits_in_psl2(p):
    # for p = +-1 mod 8 the tabulated counts are not those of X_H
    brute = invariants_bruteforce(SubgroupSpec("s4", p)).values[:4]
    assert brute != s4_table_row(p)
    assert brute == invariants_s4(p).values[:4]
    assert 2 * brute[0] == s4_table_row(p)[0]


def test_s4_rejects_bad_primes():
    for p in (2, 3, 4, 9):
        with pytest.raises(ValueError):
            invariants_s4(p)


# -- #S --------------------------------------------------------------------


def test_sharp_s_examples():
    assert ns_sharp_S(7) == 0
    assert ns_sharp_S(5) == 1
    assert ns_sharp_S(39) == 4
    assert ns_sharp_S(2) == 1
    with pytest.raises(ValueError):
        ns_sharp_S(1)


@pytest.mark.parametrize("n", [5, 13, 15, 39, 65])
def test_sharp_s_does_not_depend_on_the_algebra(n):
    want = ns_sharp_s_inclusion_exclusion(n)
    for v in range(1, 12):
        for u in range(0, 12):
            if is_inert(u, v, n):
                assert ns_sharp_s_enumerate(n, NonsplitAlgebra(u, v, n)) == want


# -- structural properties ---------------------------------------------------

levels = st.integers(2, 400)


@given(levels)
def test_covering_degrees(n):
    sp, spp = invariants_sp(n), invariants_sp_plus(n)
    assert sp.i == 2 * spp.i
    if n >= 3:
        assert sp.eps_inf == 2 * spp.eps_inf
    assert sp.eps3 == 2 * spp.eps3
    ns, nsp = invariants_ns(n), invariants_ns_plus(n)
    if n > 2:
        assert ns.eps3 == 2 * nsp.eps3
        assert ns.i == 2 * nsp.i


@given(levels)
def test_star_index_is_cartan_index_over_two_to_omega(n):
    from modcurve.arith import omega
    assert invariants_sp(n).i == 2 ** omega(n) * invariants_sp_star(n).i
    assert invariants_ns(n).i == 2 ** omega(n) * invariants_ns_star(n).i


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13, 17, 19])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_sp_plus_eps2_prime_power_display(p, r):
    assert invariants_sp_plus(p**r).eps2 == sp_plus_eps2_prime_power(p, r)


@given(st.integers(1, 2000))
def test_every_family_assembles(n):
    for fam in FAMILIES:
        if fam == "s4":
            continue
        m = 1 if fam.startswith("arith") else None
        inv = invariants_formula(SubgroupSpec(fam, n, m))
        assert inv.genus >= 0


@given(st.integers(1, 30), st.integers(1, 30))
def test_arith_index_divides_full_level_index(m, n):
    # Gamma(MN) sits in Gamma_arith,1(M, MN) with index N once the level exceeds 2
    if m * n > 2:
        assert invariants_xfull(m * n).i == n * invariants_arith1(m, n).i
