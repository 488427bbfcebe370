"""Explicit generators for the subgroups H <= GL2(Z/NZ) behind each family.

Each family is identified by a lowercase tag (``x0``, ``sp+``, ``ns*``, ...).
Besides generators this module builds the explicit coset transversals for the
split and nonsplit Cartan subgroups, used as an extra cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from math import gcd, prod

import numpy as np

from .arith import (crt_lift, euler_phi, factorize, is_prime, multiplicative_order,
                    prime_power_parts, unit_generators, units)
from .matgrp import (GeneratedSubgroup, Mat2, _isin_sorted, close_subgroup,
                     closure_codes, determinants)

FAMILIES = ("x0", "x1", "xpm1", "xfull", "xarith", "arith1", "arithpm1",
            "sp", "sp+", "sp*", "ns", "ns+", "ns*", "s4")
TWO_PARAMETER = frozenset({"arith1", "arithpm1"})
NONSPLIT = frozenset({"ns", "ns+", "ns*"})


class FamilyError(ValueError):
    """Bad family tag or parameters."""


@dataclass(frozen=True)
class NonsplitAlgebra:
    """(Z/nZ)[alpha] with alpha^2 = u*alpha - v, inert at every p | n.

    Elements ``a + b*alpha`` are ``(a, b)`` pairs reduced mod n.
    """

    u: int
    v: int
    n: int

    def __post_init__(self):
        if not is_inert(self.u, self.v, self.n):
            raise FamilyError(f"x^2 - {self.u}x + {self.v} is not inert at every prime "
                              f"dividing {self.n}")

    def mul(self, x, y):
        (a, b), (c, d) = x, y
        n = self.n
        return ((a * c - b * d * self.v) % n,
                (a * d + b * c + b * d * self.u) % n)

    def conj(self, x):
        a, b = x
        return (a + b * self.u) % self.n, -b % self.n

    def norm(self, x):
        a, b = x
        return (a * a + a * b * self.u + b * b * self.v) % self.n

    def inverse(self, x):
        ninv = pow(self.norm(x), -1, self.n) if self.n > 1 else 0
        a, b = self.conj(x)
        return a * ninv % self.n, b * ninv % self.n

    def units(self):
        n = self.n
        return [(a, b) for a in range(n) for b in range(n)
                if gcd(self.norm((a, b)), n) == 1]

    def matrix(self, y) -> Mat2:
        """Multiplication by ``y`` in the basis {1, alpha}."""
        a, b = y
        return Mat2(self.n, a, -b * self.v, b, a + b * self.u)

    def linear_map(self, image_of_one, image_of_alpha) -> Mat2:
        (a, c), (b, d) = image_of_one, image_of_alpha
        return Mat2(self.n, a, b, c, d)

    @property
    def alpha(self) -> Mat2:
        return self.matrix((0, 1))

    @property
    def involution(self) -> Mat2:
        """alpha -> u - alpha."""
        return self.linear_map((1, 0), (self.u, -1))


def is_inert(u: int, v: int, n: int) -> bool:
    if gcd(u * u - 4 * v, n) != 1:
        return False
    return all(all((x * x - u * x + v) % p for x in range(p)) for p, _ in factorize(n))


def find_nonsplit_algebra(n: int) -> NonsplitAlgebra:
    """Least (v, u) with x^2 - u x + v inert at every p | n."""
    if n < 2:
        raise FamilyError(f"a nonsplit algebra needs n >= 2, got {n}")
    for v in range(1, 4 * n + 1):
        for u in range(0, 4 * n + 1):
            if is_inert(u, v, n):
                return NonsplitAlgebra(u, v, n)
    raise RuntimeError(f"no inert quadratic found for n = {n}")


@dataclass(frozen=True)
class SubgroupSpec:
    """A family tag plus its parameters.

    ``level`` is N (the prime p for ``s4``); the two-parameter families also
    carry ``m`` = M and live at modulus M*N.
    """

    family: str
    level: int
    m: int | None = None
    algebra: NonsplitAlgebra | None = None

    def __post_init__(self):
        fam, n, m = self.family, self.level, self.m
        if fam not in FAMILIES:
            raise FamilyError(f"unknown family {fam!r}; expected one of {', '.join(FAMILIES)}")
        if not isinstance(n, int) or n < 1:
            raise FamilyError(f"level must be a positive integer, got {n!r}")
        if fam in TWO_PARAMETER:
            if not isinstance(m, int) or m < 1:
                raise FamilyError(f"{fam} needs a positive integer m, got {m!r}")
        elif m not in (None, 0):
            raise FamilyError(f"{fam} takes no m parameter")
        if fam == "s4" and not (n >= 5 and is_prime(n)):
            raise FamilyError(f"s4 needs a prime p >= 5, got {n}")
        if self.algebra is not None:
            if fam not in NONSPLIT:
                raise FamilyError(f"{fam} takes no nonsplit algebra")
            if self.algebra.n != n:
                raise FamilyError("algebra modulus differs from the level")

    @property
    def modulus(self) -> int:
        return self.level * self.m if self.family in TWO_PARAMETER else self.level

    @property
    def label(self) -> str:
        if self.family in TWO_PARAMETER:
            return f"{self.family}(M={self.m},N={self.level})"
        return f"{self.family}({self.level})"


def _diag(n, a, d):
    return Mat2(n, a, 0, 0, d)


def _crt_matrix(parts: list[tuple[Mat2, int]]) -> Mat2:
    """Entrywise CRT lift of matrices given modulo coprime moduli."""
    entries = [crt_lift([(g.entries[k], q) for g, q in parts]) for k in range(4)]
    return Mat2(entries[0][1], *(e[0] for e in entries))


def _per_prime_lifts(n: int, local) -> list[Mat2]:
    """For each p^e || n, ``local(p^e)`` mod p^e and the identity elsewhere."""
    out = []
    for q in prime_power_parts(n):
        rest = n // q
        parts = [(local(q), q)]
        if rest > 1:
            parts.append((Mat2.identity(rest), rest))
        out.append(_crt_matrix(parts))
    return out


def nonsplit_cartan_generators(alg: NonsplitAlgebra) -> list[Mat2]:
    """Multiplication matrices generating (Z/nZ)[alpha]^x.

    Starts from alpha and the scalars; elements are appended in (a, b) order
    until the closure reaches the full unit group.
    """
    n = alg.n
    target = prod(p ** (2 * e - 2) * (p * p - 1) for p, e in factorize(n))
    gens = [alg.alpha] + [_diag(n, g, g) for g in unit_generators(n)]
    have = closure_codes(n, gens)
    for y in alg.units():
        if have.size >= target:
            break
        mat = alg.matrix(y)
        if not _isin_sorted(np.asarray([mat.code]), have)[0]:
            gens.append(mat)
            have = closure_codes(n, gens)
    if have.size != target:
        raise RuntimeError(f"nonsplit Cartan closure has order {have.size}, want {target}")
    return gens


def subgroup_generators(spec: SubgroupSpec) -> list[Mat2]:
    fam, n = spec.family, spec.modulus
    ug = unit_generators(n)
    if fam == "x0":
        return ([Mat2(n, 1, 1, 0, 1)] + [_diag(n, g, 1) for g in ug]
                + [_diag(n, 1, g) for g in ug])
    if fam in ("x1", "xpm1"):
        gens = [Mat2(n, 1, 1, 0, 1)] + [_diag(n, 1, g) for g in ug]
        return gens + [_diag(n, -1, -1)] if fam == "xpm1" else gens
    if fam in ("xfull", "xarith"):
        return [_diag(n, 1, g) for g in ug]
    if fam in TWO_PARAMETER:
        gens = [Mat2(n, 1, spec.m, 0, 1)] + [_diag(n, 1, g) for g in ug]
        return gens + [_diag(n, -1, -1)] if fam == "arithpm1" else gens
    if fam in ("sp", "sp+", "sp*"):
        gens = [_diag(n, g, 1) for g in ug] + [_diag(n, 1, g) for g in ug]
        if fam == "sp+":
            gens.append(Mat2(n, 0, 1, 1, 0))
        elif fam == "sp*":
            gens += _per_prime_lifts(n, lambda q: Mat2(q, 0, 1, 1, 0))
        return gens
    if fam in NONSPLIT:
        if n == 1:
            return []
        alg = spec.algebra or find_nonsplit_algebra(n)
        gens = nonsplit_cartan_generators(alg)
        if fam == "ns+":
            gens.append(alg.involution)
        elif fam == "ns*":
            gens += _per_prime_lifts(
                n, lambda q: Mat2(q, 1, alg.u, 0, -1))
        return gens
    if fam == "s4":
        return s4_subgroup(n)
    raise FamilyError(fam)  # pragma: no cover


def realize(spec: SubgroupSpec, backend: str | None = None) -> GeneratedSubgroup:
    """``±(H ∩ SL2)`` for the family."""
    return close_subgroup(spec.modulus, subgroup_generators(spec), backend=backend)


def gl2_closure(spec: SubgroupSpec) -> np.ndarray:
    """Sorted codes of H itself inside GL2(Z/modZ)."""
    return closure_codes(spec.modulus, subgroup_generators(spec))


def det_image_surjective(spec: SubgroupSpec) -> bool:
    n = spec.modulus
    dets = set(np.unique(determinants(gl2_closure(spec), n)).tolist())
    return dets == set(units(n))


# -- transversals ----------------------------------------------------------


def split_alpha(u: int, v: int, q: int) -> Mat2:
    return Mat2(q, 1 + u * v, u, v, 1)


def split_beta(u: int, v: int, p: int, q: int) -> Mat2:
    return Mat2(q, u, -1, 1, p * v)


def split_transversal_primepower(p: int, r: int) -> list[Mat2]:
    """Representatives of GL2(Z/p^r)/C_sp(p^r): all alpha(u, v) then beta(u, v).

    ``beta(u, v)`` only depends on v mod p^(r-1), so v runs over that range.
    """
    if not is_prime(p) or r < 1:
        raise FamilyError(f"need a prime power, got {p}^{r}")
    q = p**r
    alphas = [split_alpha(u, v, q) for u, v in product(range(q), repeat=2)]
    betas = [split_beta(u, v, p, q) for u in range(q) for v in range(q // p)]
    return alphas + betas


def norm_representatives(alg: NonsplitAlgebra) -> dict[int, tuple[int, int]]:
    """For every unit a, the least (a0, b0) of norm a; norm 1 is represented by 1."""
    reps: dict[int, tuple[int, int]] = {1 % alg.n: (1 % alg.n, 0)}
    for y in alg.units():
        reps.setdefault(alg.norm(y), y)
    missing = set(units(alg.n)) - set(reps)
    if missing:
        raise RuntimeError(f"norm map misses {sorted(missing)}")
    return reps


def nonsplit_transversal(n: int, alg: NonsplitAlgebra | None = None) -> list[Mat2]:
    """Representatives of SL2(Z/n)/C_ns'(n): 1 -> y^-1, alpha -> conj(y)(alpha + x).

    One ``y`` of each unit norm, ``x`` over Z/nZ; n*phi(n) maps in all.
    """
    if n < 2:
        raise FamilyError(f"need n >= 2, got {n}")
    alg = alg or find_nonsplit_algebra(n)
    reps = norm_representatives(alg)
    out = []
    for a in units(n):
        y = reps[a]
        yinv, ybar = alg.inverse(y), alg.conj(y)
        for x in range(n):
            out.append(alg.linear_map(yinv, alg.mul(ybar, (x, 1))))
    assert len(out) == n * euler_phi(n)
    return out


# -- exceptional S4 --------------------------------------------------------


def _pgl_normalize(m, p):
    a, b, c, d = m
    lead = next(x for x in m if x)
    inv = pow(lead, -1, p)
    return a * inv % p, b * inv % p, c * inv % p, d * inv % p


def _pmul(x, y, p):
    a, b, c, d = x
    e, f, g, h = y
    return ((a * e + b * g) % p, (a * f + b * h) % p,
            (c * e + d * g) % p, (c * f + d * h) % p)


def _is_scalar(m):
    return m[1] == 0 and m[2] == 0 and m[0] == m[3]


def _pgl_elements(p):
    """Normalized representatives of PGL2(F_p) in lexicographic order."""
    for c in range(1, p):
        for d in range(p):
            yield 0, 1, c, d
    for b, c, d in product(range(p), repeat=3):
        if (d - b * c) % p:
            yield 1, b, c, d


def _projective_closure_size(gens, p, limit):
    seen = {_pgl_normalize((1, 0, 0, 1), p)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _pgl_normalize(_pmul(x, g, p), p)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        return len(seen)
        frontier = nxt
    return len(seen)


def s4_subgroup(p: int) -> list[Mat2]:
    """Generators of the preimage in GL2(F_p) of an S4 inside PGL2(F_p).

    Takes the lexicographically first pair (g, h) of projective orders 4 and 3
    generating a projective group of order 24, plus a primitive scalar.
    """
    if not (is_prime(p) and p >= 5):
        raise FamilyError(f"s4 needs a prime p >= 5, got {p}")
    elems = list(_pgl_elements(p))

    def order_is(m, k):
        powers = [m]
        for _ in range(k - 1):
            powers.append(_pmul(powers[-1], m, p))
        return _is_scalar(powers[-1]) and not any(
            _is_scalar(powers[j - 1]) for j in range(1, k) if k % j == 0)

    fours = [m for m in elems if order_is(m, 4)]
    threes = [m for m in elems if order_is(m, 3)]
    for g in fours:
        for h in threes:
            if _projective_closure_size([g, h], p, 24) == 24:
                z = next(a for a in range(2, p) if multiplicative_order(a, p) == p - 1)
                return [Mat2(p, *g), Mat2(p, *h), _diag(p, z, z)]
    raise RuntimeError(f"no S4 found in PGL2(F_{p})")  # pragma: no cover
