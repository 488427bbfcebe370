"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import time

import pytest

from modcurve.arith import is_prime
from modcurve.cli import main
from modcurve.families import FAMILIES, SubgroupSpec
from modcurve.formulas import (invariants_formula, invariants_sp_plus, ns_sharp_s_enumerate,
                               ns_sharp_s_inclusion_exclusion, sp_plus_eps2_prime_power)
from modcurve.matgrp import invariants_bruteforce
from modcurve.verify import (MULTIPLICATIVE, admissible_specs, multiplicativity_check,
                             prime_power_collapse_check, run_checks, specialization_check,
                             transversal_check)


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\nACCEPTANCE {number} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_worked_examples(verdict, capsys):
    problems = []
    want = {"ns+": (468, 28), "ns*": (234, 13)}
    for fam, (index, genus) in want.items():
        spec = SubgroupSpec(fam, 39)
        f = invariants_formula(spec)
        start = time.perf_counter()
        b = invariants_bruteforce(spec)
        elapsed = time.perf_counter() - start
        for label, inv in (("formula", f), ("bruteforce", b)):
            if (inv.i, inv.genus) != (index, genus):
                problems.append(f"{fam} {label} gave i={inv.i} g={inv.genus}")
        if elapsed >= 5:
            problems.append(f"{fam} brute force took {elapsed:.2f}s")
    for fam, (index, genus) in want.items():
        code = main(["invariants", fam, "39"])
        out = capsys.readouterr().out
        if code or f"i={index}" not in out or f"genus={genus}" not in out:
            problems.append(f"CLI output for {fam}: {out.strip()}")
    verdict(1, not problems, "; ".join(problems) or
            "ns+(39): i=468 g=28, ns*(39): i=234 g=13, formula and brute force")


def test_criterion_2_oracle_sweep(verdict):
    start = time.perf_counter()
    specs = admissible_specs(["x0", "x1", "xfull", "sp", "sp+", "sp*", "ns", "ns+", "ns*"], 40)
    specs += admissible_specs(["arith1"], 36, arith_max_modulus=36)
    specs += admissible_specs(["s4"], 13)
    report = run_checks(specs)
    elapsed = time.perf_counter() - start
    bad = [e.spec.label for e in report.failures]
    ok = not bad and elapsed < 300
    verdict(2, ok, f"{report.summary['matched']}/{len(specs)} specs agree in {elapsed:.1f}s"
            + (f"; failing: {bad[:10]}" if bad else ""))


def test_criterion_3_genus_integrality(verdict):
    failures = []
    count = 0
    for spec in admissible_specs(FAMILIES, 200, arith_max_modulus=200):
        try:
            inv = invariants_formula(spec)
            ok = inv.genus >= 0
        except Exception as exc:  # noqa: BLE001
            ok = False
            inv = exc
        count += 1
        if not ok:
            failures.append(f"{spec.label}: {inv}")
    verdict(3, not failures, f"{count} specs up to level 200 assemble to integral genus"
            + (f"; failures {failures[:5]}" if failures else ""))


PRIME_POWERS = [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1),
                (2, 4), (5, 2), (3, 3), (7, 2)]


def test_criterion_4_prime_power_collapse(verdict):
    bad = []
    for p, r in PRIME_POWERS:
        q = p**r
        if not prime_power_collapse_check(q):
            bad.append(f"collapse {q}")
        if invariants_sp_plus(q).eps2 != sp_plus_eps2_prime_power(p, r):
            bad.append(f"eps2+ {q}")
    verdict(4, not bad, bad or f"sp*=sp+, ns*=ns+ and the eps2+ case split hold at "
            f"{[p**r for p, r in PRIME_POWERS]}")


def test_criterion_5_multiplicativity(verdict):
    bad = [(f, n) for f in MULTIPLICATIVE for n in range(2, 101)
           if not multiplicativity_check(f, n)]
    verdict(5, not bad, bad or "sp, ns, sp*, ns* multiplicative for 2 <= N <= 100")


def test_criterion_6_transversals(verdict):
    split = [p**r for p, r in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2),
                                (5, 2), (3, 3), (7, 2)]]
    nonsplit = [2, 3, 5, 7, 9, 11, 13, 15]
    bad = [f"split {q}" for q in split if not transversal_check("split", q)]
    bad += [f"nonsplit {n}" for n in nonsplit if not transversal_check("nonsplit", n)]
    verdict(6, not bad, bad or f"split {split} and nonsplit {nonsplit} are exact transversals")


def test_criterion_7_specializations(verdict):
    bad = [n for n in range(1, 61) if not specialization_check(n)]
    verdict(7, not bad, bad or "arith1(1,N) = X1(N) and arith1(M,1) = X(M) for M, N <= 60")


def test_criterion_8_sharp_s_dual(verdict):
    bad = [n for n in range(2, 61)
           if ns_sharp_s_inclusion_exclusion(n) != ns_sharp_s_enumerate(n)]
    verdict(8, not bad, bad or "inclusion-exclusion and enumeration of #S agree for N <= 60")


def test_criterion_9_level_two_edge_cases(verdict):
    sp_f = invariants_formula(SubgroupSpec("sp+", 2))
    sp_b = invariants_bruteforce(SubgroupSpec("sp+", 2))
    ns_f = invariants_formula(SubgroupSpec("ns+", 2))
    ns_b = invariants_bruteforce(SubgroupSpec("ns+", 2))
    ok = sp_f.eps_inf == sp_b.eps_inf == 2 and ns_f.eps_inf == ns_b.eps_inf == 1
    verdict(9, ok, f"sp+(2) cusps {sp_f.eps_inf}/{sp_b.eps_inf}, "
            f"ns+(2) cusps {ns_f.eps_inf}/{ns_b.eps_inf} (formula/brute force)")


def test_s4_primes_in_sweep_are_the_expected_ones():
    assert [s.level for s in admissible_specs(["s4"], 13)] == [p for p in range(5, 14)
                                                              if is_prime(p)]
