"""Brute-force group engine over SL2(Z/NZ).

Subgroups are held as sorted int64 code arrays (see ``_kernels``), always
symmetrized by -I.  Right cosets ``H x`` are enumerated exhaustively and the
elliptic and cuspidal counts are read off the induced permutation actions of
S, R and T.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, prod

import numpy as np

from . import _kernels
from .arith import factorize

DEFAULT_MAX_SL2 = 10**7


class CapExceeded(ValueError):
    """SL2(Z/NZ) is larger than the configured enumeration cap."""


def max_sl2_elements() -> int:
    raw = os.environ.get("MODCURVE_MAX_SL2")
    return int(raw) if raw else DEFAULT_MAX_SL2


@dataclass(frozen=True, order=True)
class Mat2:
    """A 2x2 matrix over Z/nZ with entries reduced into [0, n)."""

    n: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"modulus must be >= 1, got {self.n}")
        for name in "abcd":
            object.__setattr__(self, name, getattr(self, name) % self.n)

    @classmethod
    def of(cls, n: int, rows) -> "Mat2":
        (a, b), (c, d) = rows
        return cls(n, a, b, c, d)

    @classmethod
    def from_code(cls, code: int, n: int) -> "Mat2":
        code = int(code)
        code, d = divmod(code, n)
        code, c = divmod(code, n)
        a, b = divmod(code, n)
        return cls(n, a, b, c, d)

    @classmethod
    def identity(cls, n: int) -> "Mat2":
        return cls(n, 1, 0, 0, 1)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    @property
    def code(self) -> int:
        n = self.n
        return ((self.a * n + self.b) * n + self.c) * n + self.d

    @property
    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.n

    def __mul__(self, other: "Mat2") -> "Mat2":
        if self.n != other.n:
            raise ValueError("moduli differ")
        a, b, c, d = self.entries
        e, f, g, h = other.entries
        return Mat2(self.n, a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def __neg__(self) -> "Mat2":
        return Mat2(self.n, -self.a, -self.b, -self.c, -self.d)

    def __pow__(self, k: int) -> "Mat2":
        if k < 0:
            return self.inverse() ** -k
        out, base = Mat2.identity(self.n), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def inverse(self) -> "Mat2":
        det = self.det
        if gcd(det, self.n) != 1:
            raise ValueError(f"{self} is not invertible")
        inv = pow(det, -1, self.n) if self.n > 1 else 0
        return Mat2(self.n, inv * self.d, -inv * self.b, -inv * self.c, inv * self.a)

    def __repr__(self) -> str:
        return f"Mat2({self.n}, [[{self.a}, {self.b}], [{self.c}, {self.d}]])"


def standard_generators(n: int) -> dict[str, Mat2]:
    """T, S and R reduced mod n."""
    return {
        "T": Mat2(n, 1, 1, 0, 1),
        "S": Mat2(n, 0, -1, 1, 0),
        "R": Mat2(n, 0, -1, 1, -1),
    }


def sl2_order(n: int) -> int:
    return prod(p ** (3 * e - 2) * (p * p - 1) for p, e in factorize(n))


def _check_cap(n: int, cap: int | None) -> None:
    if n < 1:
        raise ValueError(f"modulus must be >= 1, got {n}")
    cap = max_sl2_elements() if cap is None else cap
    size = sl2_order(n)
    if size > cap:
        raise CapExceeded(f"|SL2(Z/{n}Z)| = {size} exceeds the cap {cap}")


@lru_cache(maxsize=32)
def _sl2_cached(n: int, backend: str) -> np.ndarray:
    codes = _kernels.get_backend(backend).sl2_codes(n)
    codes.setflags(write=False)
    return codes


def sl2_codes(n: int, cap: int | None = None, backend: str | None = None) -> np.ndarray:
    """Sorted codes of SL2(Z/nZ) (read-only, cached)."""
    _check_cap(n, cap)
    return _sl2_cached(n, _kernels.get_backend(backend).name)


def sl2_enumerate(n: int, cap: int | None = None) -> list[Mat2]:
    return [Mat2.from_code(c, n) for c in sl2_codes(n, cap).tolist()]


def closure_codes(n: int, gens, seed=None, backend: str | None = None) -> np.ndarray:
    """Sorted codes of the monoid generated by ``gens`` acting on ``seed``.

    For invertible generators over a finite ring this is the group
    ``seed * <gens>``.  The default seed is the identity.
    """
    be = _kernels.get_backend(backend)
    gens = [g.entries for g in gens]
    elems = np.unique(np.asarray(
        [Mat2.identity(n).code] if seed is None else [s.code for s in seed], np.int64))
    frontier = elems
    while frontier.size and gens:
        new = np.unique(np.concatenate([be.mul_right(frontier, g, n) for g in gens]))
        new = new[~_isin_sorted(new, elems)]
        elems = np.union1d(elems, new)
        frontier = new
    return elems


def _isin_sorted(x: np.ndarray, sorted_set: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(sorted_set, x)
    pos[pos == sorted_set.size] = 0
    return sorted_set[pos] == x if sorted_set.size else np.zeros(x.size, bool)


def determinants(codes: np.ndarray, n: int) -> np.ndarray:
    a, b, c, d = _kernels.decode(codes, n)
    return (a * d - b * c) % n


@dataclass(frozen=True, eq=False)
class GeneratedSubgroup:
    """``±(H ∩ SL2(Z/nZ))`` as a sorted, read-only code array."""

    n: int
    codes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.codes.setflags(write=False)

    def __len__(self) -> int:
        return int(self.codes.size)

    def __contains__(self, g: Mat2) -> bool:
        return g.n == self.n and bool(_isin_sorted(np.asarray([g.code]), self.codes)[0])

    def __eq__(self, other) -> bool:
        return (isinstance(other, GeneratedSubgroup) and self.n == other.n
                and np.array_equal(self.codes, other.codes))

    __hash__ = None

    @property
    def contains_minus_identity(self) -> bool:
        return (-Mat2.identity(self.n)) in self

    @property
    def elements(self) -> list[Mat2]:
        return [Mat2.from_code(c, self.n) for c in self.codes.tolist()]

    def conjugate(self, g: Mat2, backend: str | None = None) -> "GeneratedSubgroup":
        """``g^-1 H g``."""
        be = _kernels.get_backend(backend)
        codes = be.mul_right(be.mul_left(g.inverse().entries, self.codes, self.n),
                             g.entries, self.n)
        return GeneratedSubgroup(self.n, np.sort(codes))


def close_subgroup(n: int, gens, backend: str | None = None) -> GeneratedSubgroup:
    """``±<gens> ∩ SL2``, by breadth-first closure inside GL2(Z/nZ)."""
    for g in gens:
        if g.n != n:
            raise ValueError(f"generator {g} is not over Z/{n}Z")
        if gcd(g.det, n) != 1:
            raise ValueError(f"generator {g} has non-unit determinant {g.det}")
    one = Mat2.identity(n)
    codes = closure_codes(n, gens, seed=[one, -one], backend=backend)
    return GeneratedSubgroup(n, codes[determinants(codes, n) == 1 % n])


@dataclass(frozen=True, eq=False)
class CosetSpace:
    """Right cosets ``H x`` of a subgroup in SL2(Z/nZ).

    ``labels[k]`` is the coset number of the k-th element of ``sl2`` and
    ``rep_index[j]`` the position in ``sl2`` of coset j's least element.
    """

    subgroup: GeneratedSubgroup
    sl2: np.ndarray = field(repr=False)
    labels: np.ndarray = field(repr=False)
    rep_index: np.ndarray = field(repr=False)
    backend: str = "numpy"

    @property
    def n(self) -> int:
        return self.subgroup.n

    def __len__(self) -> int:
        return int(self.rep_index.size)

    @property
    def rep_codes(self) -> np.ndarray:
        return self.sl2[self.rep_index]

    @property
    def reps(self) -> list[Mat2]:
        return [Mat2.from_code(c, self.n) for c in self.rep_codes.tolist()]

    def lookup(self, g: Mat2) -> int:
        """Coset number of an element of SL2."""
        if g.n != self.n or g.det != 1 % self.n:
            raise ValueError(f"{g} is not in SL2(Z/{self.n}Z)")
        return int(self.labels[np.searchsorted(self.sl2, g.code)])

    def action(self, g: Mat2) -> np.ndarray:
        """The permutation ``j -> coset of (rep_j g)``."""
        if g.det != 1 % self.n:
            raise ValueError(f"{g} is not in SL2(Z/{self.n}Z)")
        be = _kernels.get_backend(self.backend)
        return be.coset_action(self.sl2, self.labels, self.rep_index, g.entries, self.n)


def coset_space(sub: GeneratedSubgroup, cap: int | None = None,
                backend: str | None = None) -> CosetSpace:
    be = _kernels.get_backend(backend)
    sl2 = sl2_codes(sub.n, cap, be.name)
    labels, reps = be.coset_labels(sl2, sub.codes, sub.n)
    if reps.size * sub.codes.size != sl2.size:
        raise RuntimeError("coset partition is inconsistent; subgroup not closed?")
    return CosetSpace(sub, sl2, labels, reps, be.name)


def psl2_index(sub: GeneratedSubgroup) -> int:
    if not sub.contains_minus_identity:
        raise ValueError("psl2_index needs a subgroup containing -I")
    return sl2_order(sub.n) // len(sub)


def count_fixed(cs: CosetSpace, g: Mat2) -> int:
    perm = cs.action(g)
    return int(np.count_nonzero(perm == np.arange(perm.size)))


def count_orbits(cs: CosetSpace, g: Mat2) -> int:
    return _kernels.get_backend(cs.backend).count_cycles(cs.action(g))


def invariants_bruteforce(spec, cap: int | None = None, backend: str | None = None):
    """Count index, elliptic points and cusps of ``spec`` by enumeration."""
    from .families import realize
    from .formulas import InvariantSet

    _check_cap(spec.modulus, cap)
    sub = realize(spec, backend=backend)
    cs = coset_space(sub, cap, backend)
    gens = standard_generators(sub.n)
    return InvariantSet.assemble(
        psl2_index(sub),
        count_fixed(cs, gens["S"]),
        count_fixed(cs, gens["R"]),
        count_orbits(cs, gens["T"]),
        method="bruteforce",
    )
