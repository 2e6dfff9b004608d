"""Exact dense linear algebra over GF(2) and GF(3).

Vectors are bit-packed: a GF(2) vector of length n is a Python int whose
bit i is coordinate i, and a GF(3) vector is a pair of ints (lo, hi)
holding the two bit-planes of each coordinate (0 -> 00, 1 -> lo, 2 -> hi;
both planes set is illegal).  Arbitrary-precision ints make row operations
a constant number of word-wide bit ops regardless of width, which keeps
the cocycle systems (tens of thousands of rows over ~1000 columns) fast.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, List, Optional, Tuple

from .errors import NotInSum, NotSubspace

GF3Raw = Tuple[int, int]


def _lowbit(x: int) -> int:
    return (x & -x).bit_length() - 1


# GF(3) plane arithmetic.  Encoding per coordinate: 0=(0,0), 1=(1,0), 2=(0,1).

def gf3_add(a: GF3Raw, b: GF3Raw) -> GF3Raw:
    alo, ahi = a
    blo, bhi = b
    lo = ((alo ^ blo) & ~(ahi | bhi)) | (ahi & bhi)
    hi = ((ahi ^ bhi) & ~(alo | blo)) | (alo & blo)
    return lo, hi


def gf3_neg(a: GF3Raw) -> GF3Raw:
    return a[1], a[0]


def gf3_sub(a: GF3Raw, b: GF3Raw) -> GF3Raw:
    return gf3_add(a, (b[1], b[0]))


def gf3_scale(a: GF3Raw, c: int) -> GF3Raw:
    c %= 3
    if c == 0:
        return 0, 0
    if c == 1:
        return a
    return a[1], a[0]


def gf3_entry(a: GF3Raw, i: int) -> int:
    return ((a[0] >> i) & 1) + 2 * ((a[1] >> i) & 1)


def raw_zero(p: int):
    return 0 if p == 2 else (0, 0)


def raw_is_zero(p: int, v) -> bool:
    return v == 0 if p == 2 else (v[0] | v[1]) == 0


def raw_add(p: int, a, b):
    return a ^ b if p == 2 else gf3_add(a, b)


def raw_sub(p: int, a, b):
    return a ^ b if p == 2 else gf3_sub(a, b)


def raw_neg(p: int, a):
    return a if p == 2 else gf3_neg(a)


def raw_scale(p: int, a, c: int):
    if p == 2:
        return a if c % 2 else 0
    return gf3_scale(a, c)


def raw_entry(p: int, v, i: int) -> int:
    return (v >> i) & 1 if p == 2 else gf3_entry(v, i)


def raw_set_entry(p: int, v, i: int, c: int):
    """Return v with coordinate i replaced by c (building vectors only)."""
    c %= p
    if p == 2:
        return (v & ~(1 << i)) | (c << i)
    lo, hi = v
    lo &= ~(1 << i)
    hi &= ~(1 << i)
    if c == 1:
        lo |= 1 << i
    elif c == 2:
        hi |= 1 << i
    return lo, hi


def raw_support_mask(p: int, v) -> int:
    return v if p == 2 else (v[0] | v[1])


def raw_from_entries(p: int, entries: Iterable[int]):
    v = raw_zero(p)
    for i, c in enumerate(entries):
        if c % p:
            v = raw_set_entry(p, v, i, c)
    return v


def raw_to_entries(p: int, v, n: int) -> List[int]:
    return [raw_entry(p, v, i) for i in range(n)]


def support_indices(mask: int) -> List[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


@dataclass(frozen=True)
class FpVector:
    """Packed vector over GF(p), p in {2, 3}."""

    p: int
    n: int
    raw: object

    @classmethod
    def zero(cls, p: int, n: int) -> "FpVector":
        return cls(p, n, raw_zero(p))

    @classmethod
    def from_entries(cls, p: int, entries) -> "FpVector":
        entries = list(entries)
        return cls(p, len(entries), raw_from_entries(p, entries))

    def entry(self, i: int) -> int:
        return raw_entry(self.p, self.raw, i)

    def to_list(self) -> List[int]:
        return raw_to_entries(self.p, self.raw, self.n)

    def is_zero(self) -> bool:
        return raw_is_zero(self.p, self.raw)

    def support(self) -> List[int]:
        return support_indices(raw_support_mask(self.p, self.raw))

    def _like(self, raw) -> "FpVector":
        return FpVector(self.p, self.n, raw)

    def __add__(self, other: "FpVector") -> "FpVector":
        assert self.p == other.p and self.n == other.n
        return self._like(raw_add(self.p, self.raw, other.raw))

    def __sub__(self, other: "FpVector") -> "FpVector":
        assert self.p == other.p and self.n == other.n
        return self._like(raw_sub(self.p, self.raw, other.raw))

    def __neg__(self) -> "FpVector":
        return self._like(raw_neg(self.p, self.raw))

    def scale(self, c: int) -> "FpVector":
        return self._like(raw_scale(self.p, self.raw, c))


class FpMatrix:
    """Row-major matrix over GF(p) with packed rows."""

    def __init__(self, p: int, ncols: int, rows=()):
        self.p = p
        self.ncols = ncols
        self.rows = list(rows)

    @classmethod
    def from_entries(cls, p: int, entries) -> "FpMatrix":
        entries = [list(r) for r in entries]
        ncols = len(entries[0]) if entries else 0
        m = cls(p, ncols)
        for r in entries:
            assert len(r) == ncols
            m.rows.append(raw_from_entries(p, r))
        return m

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def mul_vector(self, v):
        """M v as a packed vector of length nrows (testing helper)."""
        p = self.p
        out = raw_zero(p)
        for i, row in enumerate(self.rows):
            acc = 0
            mask = raw_support_mask(p, row) & raw_support_mask(p, v)
            for j in support_indices(mask):
                acc += raw_entry(p, row, j) * raw_entry(p, v, j)
            out = raw_set_entry(p, out, i, acc % p)
        return out


class RowReducer:
    """Streaming Gaussian elimination keeping a reduced row echelon basis.

    Rows are fed one at a time; dependent rows are discarded immediately,
    so a system with many more rows than columns never lives in memory at
    once.  Pivot rows are kept mutually reduced (lead coefficient 1, no
    other pivot column in their support), which also makes coordinate
    extraction a per-pivot read-off.
    """

    def __init__(self, p: int, ncols: int):
        assert p in (2, 3)
        self.p = p
        self.ncols = ncols
        self.pivots = {}  # col -> packed row
        self.pivmask = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def copy(self) -> "RowReducer":
        c = RowReducer(self.p, self.ncols)
        c.pivots = dict(self.pivots)
        c.pivmask = self.pivmask
        return c

    def reduce(self, row):
        """Residual of row after eliminating all pivot columns."""
        if self.p == 2:
            pivots = self.pivots
            common = row & self.pivmask
            while common:
                j = (common & -common).bit_length() - 1
                row ^= pivots[j]
                common = row & self.pivmask
            return row
        pivots = self.pivots
        common = (row[0] | row[1]) & self.pivmask
        while common:
            j = (common & -common).bit_length() - 1
            c = gf3_entry(row, j)
            row = gf3_sub(row, gf3_scale(pivots[j], c))
            common = (row[0] | row[1]) & self.pivmask
        return row

    def add_row(self, row) -> bool:
        """Feed one row; return True if it increased the rank."""
        row = self.reduce(row)
        if raw_is_zero(self.p, row):
            return False
        if self.p == 2:
            j = _lowbit(row)
            for c, b in self.pivots.items():
                if (b >> j) & 1:
                    self.pivots[c] = b ^ row
        else:
            j = _lowbit(row[0] | row[1])
            if gf3_entry(row, j) == 2:
                row = gf3_scale(row, 2)
            for c, b in self.pivots.items():
                e = gf3_entry(b, j)
                if e:
                    self.pivots[c] = gf3_sub(b, gf3_scale(row, e))
        self.pivots[j] = row
        self.pivmask |= 1 << j
        return True

    def add_rows(self, rows) -> None:
        for r in rows:
            self.add_row(r)

    def basis_rows(self) -> List:
        return [self.pivots[c] for c in sorted(self.pivots)]

    def subspace(self, ambient: Optional[int] = None) -> "Subspace":
        n = self.ncols if ambient is None else ambient
        cols = sorted(self.pivots)
        return Subspace(self.p, n, tuple(self.pivots[c] for c in cols),
                        tuple(cols))

    def nullspace(self) -> "Subspace":
        """Basis of the right kernel of everything fed so far."""
        p = self.p
        pivots = self.pivots
        free = [c for c in range(self.ncols) if c not in pivots]
        piv_cols = sorted(pivots)
        rows = []
        for f in free:
            v = raw_set_entry(p, raw_zero(p), f, 1)
            for c in piv_cols:
                e = raw_entry(p, pivots[c], f)
                if e:
                    v = raw_set_entry(p, v, c, (p - e) % p)
            rows.append(v)
        return Subspace.from_rows(p, self.ncols, rows)


@dataclass(frozen=True)
class Subspace:
    """Subspace of GF(p)^ambient given by a reduced row echelon basis."""

    p: int
    ambient: int
    basis: tuple
    pivot_cols: tuple

    @classmethod
    def from_rows(cls, p: int, ambient: int, rows) -> "Subspace":
        red = RowReducer(p, ambient)
        red.add_rows(rows)
        return red.subspace(ambient)

    @classmethod
    def zero(cls, p: int, ambient: int) -> "Subspace":
        return cls(p, ambient, (), ())

    @property
    def dim(self) -> int:
        return len(self.basis)

    def _reducer(self) -> RowReducer:
        red = RowReducer(self.p, self.ambient)
        red.pivots = dict(zip(self.pivot_cols, self.basis))
        for c in self.pivot_cols:
            red.pivmask |= 1 << c
        return red

    def reduce_raw(self, raw):
        return self._reducer().reduce(raw)

    def contains_raw(self, raw) -> bool:
        return raw_is_zero(self.p, self.reduce_raw(raw))

    def contains(self, v: FpVector) -> bool:
        return self.contains_raw(v.raw)

    def coordinates_raw(self, raw) -> Optional[tuple]:
        """Coefficients of raw over the basis, or None if outside."""
        p = self.p
        coords = tuple(raw_entry(p, raw, c) for c in self.pivot_cols)
        check = raw
        for c, b in zip(coords, self.basis):
            if c:
                check = raw_sub(p, check, raw_scale(p, b, c))
        if not raw_is_zero(p, check):
            return None
        return coords

    def member_from_coords_raw(self, coords):
        p = self.p
        v = raw_zero(p)
        for c, b in zip(coords, self.basis):
            if c % p:
                v = raw_add(p, v, raw_scale(p, b, c))
        return v

    def vectors_raw(self):
        """All p^dim member vectors, in lexicographic coordinate order."""
        p = self.p
        d = self.dim
        for code in range(p ** d):
            coords = []
            c = code
            for _ in range(d):
                coords.append(c % p)
                c //= p
            yield self.member_from_coords_raw(coords)


def rank(m: FpMatrix) -> int:
    red = RowReducer(m.p, m.ncols)
    red.add_rows(m.rows)
    return red.rank


def nullspace(m: FpMatrix) -> Subspace:
    red = RowReducer(m.p, m.ncols)
    red.add_rows(m.rows)
    return red.nullspace()


def complement(sub: Subspace, whole: Subspace) -> Subspace:
    """Deterministic direct complement of sub inside whole.

    Extends sub's echelon basis greedily by whole's basis vectors.
    """
    assert sub.p == whole.p and sub.ambient == whole.ambient
    for row in sub.basis:
        if not whole.contains_raw(row):
            raise NotSubspace("first argument is not contained in the second")
    red = RowReducer(sub.p, sub.ambient)
    for row in sub.basis:
        red.add_row(row)
    chosen = [row for row in whole.basis if red.add_row(row)]
    comp = Subspace.from_rows(sub.p, sub.ambient, chosen)
    assert comp.dim == whole.dim - sub.dim
    return comp


def decompose(v: FpVector, a_space: Subspace, b_space: Subspace):
    """Split v = a + b with a in a_space, b in b_space.

    Requires the two spaces to intersect trivially; raises NotInSum when v
    lies outside their direct sum.
    """
    p = v.p
    n = v.n
    assert a_space.p == p and b_space.p == p
    assert a_space.ambient == n and b_space.ambient == n
    da, db = a_space.dim, b_space.dim
    width = n + da + db
    red = RowReducer(p, width)
    for i, row in enumerate(a_space.basis):
        red.add_row(raw_set_entry(p, row, n + i, 1))
    for j, row in enumerate(b_space.basis):
        red.add_row(raw_set_entry(p, row, n + da + j, 1))
    main_rank = sum(1 for c in red.pivots if c < n)
    if main_rank != da + db:
        raise ValueError("summand subspaces intersect nontrivially")
    residual = red.reduce(v.raw)
    mask = raw_support_mask(p, residual)
    if mask & ((1 << n) - 1):
        raise NotInSum("vector outside the direct sum")
    a_raw = raw_zero(p)
    for i, row in enumerate(a_space.basis):
        lam = (p - raw_entry(p, residual, n + i)) % p
        if lam:
            a_raw = raw_add(p, a_raw, raw_scale(p, row, lam))
    b_raw = raw_zero(p)
    for j, row in enumerate(b_space.basis):
        lam = (p - raw_entry(p, residual, n + da + j)) % p
        if lam:
            b_raw = raw_add(p, b_raw, raw_scale(p, row, lam))
    assert raw_add(p, a_raw, b_raw) == v.raw
    return FpVector(p, n, a_raw), FpVector(p, n, b_raw)


def solve(p: int, ncols: int, rows_with_rhs) -> Optional[object]:
    """Particular solution of a linear system streamed as (row, rhs) pairs.

    Returns a packed vector with free variables set to zero, or None when
    the system is inconsistent.
    """
    red = RowReducer(p, ncols + 1)
    for row, rhs in rows_with_rhs:
        red.add_row(raw_set_entry(p, row, ncols, rhs))
    if ncols in red.pivots:
        return None
    x = raw_zero(p)
    for c, row in red.pivots.items():
        e = raw_entry(p, row, ncols)
        if e:
            x = raw_set_entry(p, x, c, e)
    return x
