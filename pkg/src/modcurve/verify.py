"""Cross-validation of the closed forms against the brute-force engine."""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from math import prod

from . import _kernels
from .arith import factorize, is_prime, prime_power_parts
from .families import (FAMILIES, TWO_PARAMETER, SubgroupSpec, find_nonsplit_algebra,
                       gl2_closure, nonsplit_transversal, realize,
                       split_transversal_primepower)
from .formulas import InvariantSet, invariants_formula
from .matgrp import Mat2, coset_space, count_fixed, invariants_bruteforce, sl2_order


@dataclass(frozen=True)
class ReportEntry:
    spec: SubgroupSpec
    formula: InvariantSet | None
    bruteforce: InvariantSet | None
    match: bool
    error: str | None = None
    seconds: float = 0.0

    def to_dict(self, timings: bool = False) -> dict:
        def counts(inv):
            return None if inv is None else dict(zip(
                ("psl2_index", "nu2", "nu3", "cusps", "genus"), inv.values))

        out = {
            "family": self.spec.family,
            "level": self.spec.level,
            "m": self.spec.m or 0,
            "formula": counts(self.formula),
            "bruteforce": counts(self.bruteforce),
            "match": self.match,
            "error": self.error,
        }
        if timings:
            out["seconds"] = round(self.seconds, 6)
        return out


@dataclass(frozen=True)
class VerificationReport:
    entries: tuple[ReportEntry, ...] = field(default_factory=tuple)

    @property
    def summary(self) -> dict[str, int]:
        errors = sum(e.error is not None for e in self.entries)
        matched = sum(e.match for e in self.entries)
        return {
            "total": len(self.entries),
            "matched": matched,
            "mismatched": len(self.entries) - matched - errors,
            "errors": errors,
        }

    @property
    def ok(self) -> bool:
        return all(e.match for e in self.entries)

    @property
    def failures(self) -> list[ReportEntry]:
        return [e for e in self.entries if not e.match]

    def to_dict(self, timings: bool = False) -> dict:
        return {"summary": self.summary,
                "entries": [e.to_dict(timings) for e in self.entries]}

    def to_json(self, timings: bool = False) -> str:
        """Without timings the output is byte-identical across runs."""
        return json.dumps(self.to_dict(timings), indent=2) + "\n"


def cross_check(spec: SubgroupSpec, cap: int | None = None,
                backend: str | None = None) -> ReportEntry:
    """Formula vs brute force for one spec; failures are recorded, not raised."""
    start = time.perf_counter()
    formula = brute = None
    try:
        formula = invariants_formula(spec)
        brute = invariants_bruteforce(spec, cap=cap, backend=backend)
    except Exception as exc:  # noqa: BLE001 - the report is the error channel
        return ReportEntry(spec, formula, brute, False, f"{type(exc).__name__}: {exc}",
                           time.perf_counter() - start)
    return ReportEntry(spec, formula, brute, formula.same_as(brute),
                       seconds=time.perf_counter() - start)


def admissible_specs(families, max_level: int, min_level: int = 1,
                     arith_max_modulus: int | None = None,
                     s4_max_prime: int | None = None) -> list[SubgroupSpec]:
    """Every (family, level[, m]) in range, in catalog order, then level, then m.

    Two-parameter families range over N in [min_level, max_level] and every
    M >= 1 with M*N <= ``arith_max_modulus``; s4 over primes 5 <= p <= ``s4_max_prime``.
    Both bounds default to ``max_level``.
    """
    wanted = set(families)
    unknown = wanted - set(FAMILIES)
    if unknown:
        raise ValueError(f"unknown families: {', '.join(sorted(unknown))}")
    arith_max = max_level if arith_max_modulus is None else arith_max_modulus
    s4_max = max_level if s4_max_prime is None else s4_max_prime
    specs = []
    for fam in FAMILIES:
        if fam not in wanted:
            continue
        if fam in TWO_PARAMETER:
            for n in range(min_level, max_level + 1):
                specs.extend(SubgroupSpec(fam, n, m) for m in range(1, arith_max // n + 1))
        elif fam == "s4":
            specs.extend(SubgroupSpec(fam, p) for p in range(max(min_level, 5), s4_max + 1)
                         if is_prime(p))
        else:
            specs.extend(SubgroupSpec(fam, n) for n in range(min_level, max_level + 1))
    return specs


def run_checks(specs, cap: int | None = None, backend: str | None = None,
               workers: int = 1) -> VerificationReport:
    be = _kernels.get_backend(backend).name
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            entries = list(pool.map(lambda s: cross_check(s, cap, be), specs))
    else:
        entries = [cross_check(s, cap, be) for s in specs]
    return VerificationReport(tuple(entries))


def sweep(families=FAMILIES, max_level: int = 12, *, arith_max_modulus: int | None = None,
          s4_max_prime: int | None = None, cap: int | None = None,
          backend: str | None = None, workers: int = 1) -> VerificationReport:
    if max_level < 1:
        raise ValueError(f"max_level must be >= 1, got {max_level}")
    specs = admissible_specs(families, max_level, arith_max_modulus=arith_max_modulus,
                             s4_max_prime=s4_max_prime)
    return run_checks(specs, cap, backend, workers)


# -- transversals ----------------------------------------------------------


def _right_coset_keys(reps: list[Mat2], group_codes, n: int, backend=None) -> set[int]:
    """Least element of each coset ``C g``; equal keys mean equal cosets."""
    be = _kernels.get_backend(backend)
    return {int(be.mul_right(group_codes, g.entries, n).min()) for g in reps}


def transversal_check(kind: str, modulus: int, backend: str | None = None) -> bool:
    """Do the explicit representatives hit every right coset of the Cartan exactly once?

    ``split``: GL2(Z/p^r) modulo the diagonal group; ``nonsplit``: SL2(Z/N)
    modulo the norm-one units of (Z/N)[alpha].
    """
    if kind == "split":
        parts = factorize(modulus)
        if len(parts) != 1:
            raise ValueError(f"split transversal needs a prime power, got {modulus}")
        (p, r), = parts
        reps = split_transversal_primepower(p, r)
        group = gl2_closure(SubgroupSpec("sp", modulus))
        gl2 = sl2_order(modulus) * (modulus - modulus // p)
        index = gl2 // group.size
    elif kind == "nonsplit":
        reps = nonsplit_transversal(modulus, find_nonsplit_algebra(modulus))
        if any(g.det != 1 % modulus for g in reps):
            return False
        group = realize(SubgroupSpec("ns", modulus)).codes
        index = sl2_order(modulus) // group.size
    else:
        raise ValueError(f"kind must be 'split' or 'nonsplit', got {kind!r}")
    return len(reps) == index and len(_right_coset_keys(reps, group, modulus, backend)) == index


# -- structural checks -----------------------------------------------------


MULTIPLICATIVE = ("sp", "ns", "sp*", "ns*")


def multiplicativity_check(family: str, n: int) -> bool:
    """Each of i, eps2, eps3, eps_inf at n is the product over prime-power parts."""
    if family not in MULTIPLICATIVE:
        raise ValueError(f"multiplicativity applies to {MULTIPLICATIVE}, not {family!r}")
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    whole = invariants_formula(SubgroupSpec(family, n)).values[:4]
    local = [invariants_formula(SubgroupSpec(family, q)).values[:4]
             for q in prime_power_parts(n)]
    return all(whole[k] == prod(v[k] for v in local) for k in range(4))


def specialization_check(n: int) -> bool:
    """arith1(1, n) is X1(n) and arith1(n, 1) is X(n)."""
    f = invariants_formula
    return (f(SubgroupSpec("arith1", n, 1)).same_as(f(SubgroupSpec("x1", n)))
            and f(SubgroupSpec("arith1", 1, n)).same_as(f(SubgroupSpec("xfull", n))))


def prime_power_collapse_check(q: int) -> bool:
    """At a prime power the star and plus variants coincide."""
    f = invariants_formula
    return (f(SubgroupSpec("sp*", q)).same_as(f(SubgroupSpec("sp+", q)))
            and f(SubgroupSpec("ns*", q)).same_as(f(SubgroupSpec("ns+", q))))


def order3_generator_agreement(spec: SubgroupSpec, cap: int | None = None,
                               backend: str | None = None) -> bool:
    """Fixed cosets of (0 -1; 1 -1) and of the order-6 matrix (0 -1; 1 1) agree."""
    cs = coset_space(realize(spec, backend), cap, backend)
    n = spec.modulus
    return count_fixed(cs, Mat2(n, 0, -1, 1, -1)) == count_fixed(cs, Mat2(n, 0, -1, 1, 1))
