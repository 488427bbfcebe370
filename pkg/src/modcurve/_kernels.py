"""Hot loops of the group engine, in two interchangeable flavours.

A 2x2 matrix ``(a, b; c, d)`` over Z/nZ is packed into one int64
``((a*n + b)*n + c)*n + d``, so ascending codes are row-major lexicographic
order.  Every routine exists as a numba ``@njit`` kernel and as a plain numpy
implementation with the same signature and output.

``MODCURVE_BACKEND=numpy`` forces the fallback; the default is numba when it
imports, numpy otherwise.
"""

from __future__ import annotations

import os
from math import gcd
from types import SimpleNamespace

import numpy as np

# -- numpy -----------------------------------------------------------------


def decode(codes, n):
    codes = np.asarray(codes, dtype=np.int64)
    d = codes % n
    r = codes // n
    c = r % n
    r //= n
    b = r % n
    a = r // n
    return a, b, c, d


def encode(a, b, c, d, n):
    return ((np.asarray(a, np.int64) * n + b) * n + c) * n + d


def np_mul_right(codes, g, n):
    """``x @ g`` for every packed ``x``; ``g`` is an (a, b, c, d) tuple."""
    a, b, c, d = decode(codes, n)
    ga, gb, gc, gd = g
    return encode((a * ga + b * gc) % n, (a * gb + b * gd) % n,
                  (c * ga + d * gc) % n, (c * gb + d * gd) % n, n)


def np_mul_left(g, codes, n):
    """``g @ x`` for every packed ``x``."""
    a, b, c, d = decode(codes, n)
    ga, gb, gc, gd = g
    return encode((ga * a + gb * c) % n, (ga * b + gb * d) % n,
                  (gc * a + gd * c) % n, (gc * b + gd * d) % n, n)


def np_sl2_codes(n):
    if n == 1:
        return np.zeros(1, np.int64)
    bb, cc = np.meshgrid(np.arange(n, dtype=np.int64), np.arange(n, dtype=np.int64),
                         indexing="ij")
    bb = bb.ravel()
    cc = cc.ravel()
    rhs = (1 + bb * cc) % n
    chunks = []
    for a in range(n):
        g = gcd(a, n)
        m = n // g
        ok = rhs % g == 0
        if not ok.any():
            continue
        inv = pow(a // g, -1, m) if m > 1 else 0
        d0 = ((rhs[ok] // g) * inv) % m if m > 1 else np.zeros(int(ok.sum()), np.int64)
        dd = (d0[:, None] + m * np.arange(g, dtype=np.int64)[None, :]).ravel()
        rep = np.repeat(np.arange(ok.size)[ok], g)
        chunks.append(encode(a, bb[rep], cc[rep], dd, n))
    return np.concatenate(chunks)


_SMALL_SUBGROUP = 64


def np_coset_labels(sl2, sub, n):
    """Right cosets ``H x`` of the sorted code set ``sub`` inside sorted ``sl2``.

    Returns ``(labels, reps)``: the coset number of every element of ``sl2``
    and, per coset, the position in ``sl2`` of its least element.  Cosets are
    numbered in increasing order of that least element.
    """
    m = sl2.size
    sa, sb, sc, sd = decode(sub, n)
    if sub.size <= _SMALL_SUBGROUP:
        best = np.full(m, np.iinfo(np.int64).max, np.int64)
        for h in zip(sa.tolist(), sb.tolist(), sc.tolist(), sd.tolist()):
            np.minimum(best, np_mul_left(h, sl2, n), out=best)
        rep_codes, labels = np.unique(best, return_inverse=True)
        return labels.astype(np.int64), np.searchsorted(sl2, rep_codes)
    labels = np.full(m, -1, np.int64)
    reps = []
    ptr = 0
    while True:
        while ptr < m and labels[ptr] >= 0:
            ptr += 1
        if ptr == m:
            break
        xa, xb, xc, xd = (int(v) for v in decode(sl2[ptr], n))
        orbit = encode((sa * xa + sb * xc) % n, (sa * xb + sb * xd) % n,
                       (sc * xa + sd * xc) % n, (sc * xb + sd * xd) % n, n)
        labels[np.searchsorted(sl2, orbit)] = len(reps)
        reps.append(ptr)
    return labels, np.asarray(reps, np.int64)


def np_coset_action(sl2, labels, reps, g, n):
    """Coset number of ``rep @ g`` for every coset representative."""
    return labels[np.searchsorted(sl2, np_mul_right(sl2[reps], g, n))]


def np_count_cycles(perm):
    perm = np.asarray(perm, np.int64)
    low = np.arange(perm.size, dtype=np.int64)
    step = perm.copy()
    # after k rounds low[i] = min over the first 2**k iterates of i
    span = 1
    while span < perm.size:
        np.minimum(low, low[step], out=low)
        step = step[step]
        span *= 2
    return int(np.count_nonzero(low == np.arange(perm.size)))


NUMPY = SimpleNamespace(
    name="numpy",
    mul_right=np_mul_right,
    mul_left=np_mul_left,
    sl2_codes=np_sl2_codes,
    coset_labels=np_coset_labels,
    coset_action=np_coset_action,
    count_cycles=np_count_cycles,
)

# -- numba -----------------------------------------------------------------

try:
    from numba import njit
except ImportError:  # pragma: no cover - exercised only without numba
    NUMBA = None
else:

    @njit(cache=True)
    def _nb_mul_right(codes, ga, gb, gc, gd, n):
        out = np.empty_like(codes)
        for i in range(codes.size):
            x = codes[i]
            d = x % n
            x //= n
            c = x % n
            x //= n
            b = x % n
            a = x // n
            out[i] = ((((a * ga + b * gc) % n) * n + (a * gb + b * gd) % n) * n
                      + (c * ga + d * gc) % n) * n + (c * gb + d * gd) % n
        return out

    @njit(cache=True)
    def _nb_mul_left(ga, gb, gc, gd, codes, n):
        out = np.empty_like(codes)
        for i in range(codes.size):
            x = codes[i]
            d = x % n
            x //= n
            c = x % n
            x //= n
            b = x % n
            a = x // n
            out[i] = ((((ga * a + gb * c) % n) * n + (ga * b + gb * d) % n) * n
                      + (gc * a + gd * c) % n) * n + (gc * b + gd * d) % n
        return out

    @njit(cache=True)
    def _nb_gcd(a, b):
        while b:
            a, b = b, a % b
        return a

    @njit(cache=True)
    def _nb_inv(a, m):
        # extended Euclid; a is a unit mod m
        r0, r1 = m, a % m
        s0, s1 = 0, 1
        while r1:
            q = r0 // r1
            r0, r1 = r1, r0 - q * r1
            s0, s1 = s1, s0 - q * s1
        return s0 % m

    @njit(cache=True)
    def _nb_sl2_codes(n, size):
        out = np.empty(size, np.int64)
        if n == 1:
            out[0] = 0
            return out
        k = 0
        for a in range(n):
            g = _nb_gcd(a, n)
            m = n // g
            inv = _nb_inv(a // g, m) if m > 1 else 0
            for b in range(n):
                for c in range(n):
                    r = (1 + b * c) % n
                    if r % g:
                        continue
                    d0 = ((r // g) * inv) % m if m > 1 else 0
                    for t in range(g):
                        out[k] = ((a * n + b) * n + c) * n + d0 + t * m
                        k += 1
        return out[:k]

    @njit(cache=True)
    def _nb_coset_labels(sl2, sub, n):
        m = sl2.size
        h = sub.size
        sa = np.empty(h, np.int64)
        sb = np.empty(h, np.int64)
        sc = np.empty(h, np.int64)
        sd = np.empty(h, np.int64)
        for j in range(h):
            x = sub[j]
            sd[j] = x % n
            x //= n
            sc[j] = x % n
            x //= n
            sb[j] = x % n
            sa[j] = x // n
        labels = np.full(m, -1, np.int64)
        reps = np.empty(m // h + 1, np.int64)
        k = 0
        for i in range(m):
            if labels[i] >= 0:
                continue
            x = sl2[i]
            d = x % n
            x //= n
            c = x % n
            x //= n
            b = x % n
            a = x // n
            for j in range(h):
                y = ((((sa[j] * a + sb[j] * c) % n) * n + (sa[j] * b + sb[j] * d) % n) * n
                     + (sc[j] * a + sd[j] * c) % n) * n + (sc[j] * b + sd[j] * d) % n
                labels[np.searchsorted(sl2, y)] = k
            reps[k] = i
            k += 1
        return labels, reps[:k]

    @njit(cache=True)
    def _nb_coset_action(sl2, labels, reps, ga, gb, gc, gd, n):
        out = np.empty(reps.size, np.int64)
        for i in range(reps.size):
            x = sl2[reps[i]]
            d = x % n
            x //= n
            c = x % n
            x //= n
            b = x % n
            a = x // n
            y = ((((a * ga + b * gc) % n) * n + (a * gb + b * gd) % n) * n
                 + (c * ga + d * gc) % n) * n + (c * gb + d * gd) % n
            out[i] = labels[np.searchsorted(sl2, y)]
        return out

    @njit(cache=True)
    def _nb_count_cycles(perm):
        seen = np.zeros(perm.size, np.bool_)
        cycles = 0
        for i in range(perm.size):
            if seen[i]:
                continue
            cycles += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
        return cycles

    def _sl2_size(n):
        from .arith import factorize

        size = n**3
        for p, _ in factorize(n):
            size = size // (p * p) * (p * p - 1)
        return size

    NUMBA = SimpleNamespace(
        name="numba",
        mul_right=lambda codes, g, n: _nb_mul_right(np.asarray(codes, np.int64), *g, n),
        mul_left=lambda g, codes, n: _nb_mul_left(*g, np.asarray(codes, np.int64), n),
        sl2_codes=lambda n: _nb_sl2_codes(n, _sl2_size(n)),
        coset_labels=_nb_coset_labels,
        coset_action=lambda sl2, labels, reps, g, n: _nb_coset_action(
            sl2, labels, reps, *g, n),
        count_cycles=lambda perm: int(_nb_count_cycles(np.asarray(perm, np.int64))),
    )

BACKENDS = {"numpy": NUMPY}
if NUMBA is not None:
    BACKENDS["numba"] = NUMBA


def get_backend(name: str | None = None) -> SimpleNamespace:
    """Resolve a backend by name, or from ``MODCURVE_BACKEND``."""
    if name is None:
        name = os.environ.get("MODCURVE_BACKEND", "").strip().lower() or (
            "numba" if NUMBA is not None else "numpy")
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"unknown or unavailable backend {name!r}; "
                         f"have {sorted(BACKENDS)}") from None
