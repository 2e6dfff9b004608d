"""Constructions of standard small groups used as bases and in tests."""

from __future__ import annotations

import numpy as np

from . import loops
from .loops import LoopTable, SubloopSet


def trivial_loop() -> LoopTable:
    return loops.validate_loop([[1]])


def cyclic_group(n: int) -> LoopTable:
    i = np.arange(n)
    return LoopTable._from_t0((i[:, None] + i[None, :]) % n)


def elementary_abelian(p: int, d: int) -> LoopTable:
    """GF(p)^d with index i <-> digit vector of i in base p (digit 0 first)."""
    n = p**d
    i = np.arange(n)
    if p == 2:
        t = i[:, None] ^ i[None, :]
    else:
        t = np.zeros((n, n), dtype=np.int64)
        for k in range(d):
            dk = (i // p**k) % p
            t += ((dk[:, None] + dk[None, :]) % p) * p**k
    return LoopTable._from_t0(t)


def dihedral_group(m: int) -> LoopTable:
    """Dihedral group of order 2m: rotations 0..m-1, reflections m..2m-1."""
    n = 2 * m
    t = np.zeros((n, n), dtype=np.int64)
    a = np.arange(m)
    rot = (a[:, None] + a[None, :]) % m
    ref = (a[:, None] - a[None, :]) % m
    t[:m, :m] = rot
    t[:m, m:] = m + rot
    t[m:, :m] = m + ref
    t[m:, m:] = ref
    return LoopTable._from_t0(t)


def quaternion_group() -> LoopTable:
    """The quaternion group Q8 on e, i, j, k, -e, -i, -j, -k."""
    # unit products: units[u][v] = (sign, unit)
    units = {
        ("e", "e"): (1, "e"), ("e", "i"): (1, "i"), ("e", "j"): (1, "j"), ("e", "k"): (1, "k"),
        ("i", "e"): (1, "i"), ("i", "i"): (-1, "e"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "e"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "e"), ("j", "k"): (1, "i"),
        ("k", "e"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "e"),
    }
    names = ["e", "i", "j", "k"]
    elems = [(1, u) for u in names] + [(-1, u) for u in names]
    pos = {el: idx for idx, el in enumerate(elems)}
    t = np.zeros((8, 8), dtype=np.int64)
    for (s1, u1) in elems:
        for (s2, u2) in elems:
            s3, u3 = units[(u1, u2)]
            t[pos[(s1, u1)], pos[(s2, u2)]] = pos[(s1 * s2 * s3, u3)]
    return LoopTable._from_t0(t)


def symmetric_group(n: int) -> LoopTable:
    """Symmetric group on n letters as a loop table (identity first)."""
    from itertools import permutations

    elems = sorted(permutations(range(n)))
    assert elems[0] == tuple(range(n))
    pos = {p: idx for idx, p in enumerate(elems)}
    size = len(elems)
    t = np.zeros((size, size), dtype=np.int64)
    for a in elems:
        for b in elems:
            c = tuple(a[b[i]] for i in range(n))  # apply b, then a
            t[pos[a], pos[b]] = pos[c]
    return LoopTable._from_t0(t)


def central_product(a: LoopTable, b: LoopTable, za: int, zb: int) -> LoopTable:
    """(a x b) / <(za, zb)> for central elements of order 2 (1-based)."""
    for q, z in ((a, za), (b, zb)):
        assert q.element_orders[z - 1] == 2
        assert q.center_mask[z - 1]
    prod = loops.direct_product(a, b)
    ident = 1
    glued = (za - 1) * b.n + (zb - 1) + 1
    sub = SubloopSet({ident, glued}, prod.n)
    quotient, _ = loops.quotient_loop(prod, sub)
    return quotient


def extraspecial_plus() -> LoopTable:
    """Extraspecial group of order 32, plus type (D4 central D4)."""
    d4 = dihedral_group(4)
    return central_product(d4, d4, 3, 3)


def extraspecial_minus() -> LoopTable:
    """Extraspecial group of order 32, minus type (D4 central Q8)."""
    return central_product(dihedral_group(4), quaternion_group(), 3, 5)
