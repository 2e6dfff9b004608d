"""Finite loops as multiplication tables, and the algebraic queries on them.

Elements are 1-based in every public interface, with element 1 the neutral
element.  Internally tables are 0-based numpy arrays; `LoopTable.t0` is the
0-based table and `LoopTable.table` the 1-based view.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np

from .arith import prime_power
from .errors import (
    NoNeutral,
    NotNormal,
    NotPowerAssociative,
    NotQuasigroup,
)


class LoopTable:
    """Immutable multiplication table of a finite loop.

    Construct through `validate_loop`; all derived data (divisions,
    associator cube, element orders, ...) is cached lazily, so tables are
    cheap to pass around and safe to share.
    """

    def __init__(self, t0: np.ndarray):
        self.t0 = t0
        self.t0.setflags(write=False)
        self.n = int(t0.shape[0])

    @classmethod
    def _from_t0(cls, t0) -> "LoopTable":
        return cls(np.ascontiguousarray(np.asarray(t0, dtype=np.int16)))

    @property
    def table(self) -> np.ndarray:
        return self.t0 + 1

    def mul(self, x: int, y: int) -> int:
        """Product of 1-based elements."""
        return int(self.t0[x - 1, y - 1]) + 1

    def __eq__(self, other) -> bool:
        return isinstance(other, LoopTable) and np.array_equal(self.t0, other.t0)

    def __repr__(self):
        return f"LoopTable(n={self.n})"

    @cached_property
    def rows(self):
        """0-based table as nested lists, for tight Python loops."""
        return self.t0.tolist()

    @cached_property
    def left_div(self) -> np.ndarray:
        """ld[a, b] = the unique c with a*c = b (0-based)."""
        n = self.n
        ld = np.empty((n, n), dtype=np.int16)
        ld[np.arange(n)[:, None], self.t0] = np.arange(n, dtype=np.int16)[None, :]
        return ld

    @cached_property
    def right_div(self) -> np.ndarray:
        """rd[b, a] = the unique c with c*a = b (0-based)."""
        n = self.n
        rd = np.empty((n, n), dtype=np.int16)
        rd[self.t0, np.arange(n)[None, :]] = np.arange(n, dtype=np.int16)[:, None]
        return rd

    @cached_property
    def assoc_ok(self) -> np.ndarray:
        """Boolean cube: assoc_ok[x, y, z] iff (xy)z = x(yz)."""
        t0 = self.t0
        left = t0[t0, :]
        right = t0[:, t0]
        return left == right

    @cached_property
    def is_associative(self) -> bool:
        return bool(self.assoc_ok.all())

    @cached_property
    def is_commutative(self) -> bool:
        return bool((self.t0 == self.t0.T).all())

    @cached_property
    def is_moufang(self) -> bool:
        """Whether (xy)(zx) = x((yz)x) holds for all x, y, z."""
        t0 = self.t0
        n = self.n
        left = t0[t0[:, :, None], t0.T[:, None, :]]
        inner = np.transpose(t0[t0, :], (2, 0, 1))
        right = t0[np.arange(n)[:, None, None], inner]
        return bool((left == right).all())

    @cached_property
    def center_mask(self) -> np.ndarray:
        commutes = (self.t0 == self.t0.T).all(axis=1)
        ok = self.assoc_ok
        return (
            commutes
            & ok.all(axis=(1, 2))
            & ok.all(axis=(0, 2))
            & ok.all(axis=(0, 1))
        )

    @cached_property
    def element_orders(self) -> tuple:
        """Order of each element (position i holds element i+1).

        Raises NotPowerAssociative when left-to-right and right-to-left
        powers of some element disagree before its order is reached.
        """
        n = self.n
        t0 = self.t0
        idx = np.arange(n)
        cur_l = idx.copy()
        cur_r = idx.copy()
        orders = np.zeros(n, dtype=np.int64)
        orders[0] = 1
        k = 1
        while (orders == 0).any():
            if k > n:
                raise NotPowerAssociative("some element has no power order")
            k += 1
            cur_l = t0[cur_l, idx]
            cur_r = t0[idx, cur_r]
            if (cur_l != cur_r).any():
                bad = int(np.nonzero(cur_l != cur_r)[0][0]) + 1
                raise NotPowerAssociative(
                    f"left and right powers of element {bad} disagree"
                )
            orders[(orders == 0) & (cur_l == 0)] = k
        return tuple(int(o) for o in orders)

    @cached_property
    def exponent_prime(self):
        """(p, k) if the loop order is p**k, else None."""
        return prime_power(self.n)


class SubloopSet:
    """A subset of 1..n known to be closed under the parent multiplication."""

    __slots__ = ("members", "loop_order")

    def __init__(self, members, loop_order: int):
        self.members = frozenset(int(m) for m in members)
        self.loop_order = loop_order
        assert 1 in self.members

    @property
    def indices0(self) -> np.ndarray:
        return np.array(sorted(m - 1 for m in self.members), dtype=np.int64)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(sorted(self.members))

    def __contains__(self, x):
        return x in self.members

    def __eq__(self, other):
        return (
            isinstance(other, SubloopSet)
            and self.members == other.members
            and self.loop_order == other.loop_order
        )

    def __repr__(self):
        return f"SubloopSet({sorted(self.members)})"


def validate_loop(table) -> LoopTable:
    """Check the loop axioms and wrap the table.

    The input is 1-based: an n x n array with entries in 1..n, rows and
    columns permutations, and element 1 two-sided neutral.
    """
    arr = np.asarray(table, dtype=np.int64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise NotQuasigroup("table is not a nonempty square array")
    n = arr.shape[0]
    if arr.min() < 1 or arr.max() > n:
        raise NotQuasigroup(f"entries must lie in 1..{n}")
    ident = np.arange(1, n + 1)
    if not (np.sort(arr, axis=1) == ident[None, :]).all():
        raise NotQuasigroup("some row is not a permutation of 1..n")
    if not (np.sort(arr, axis=0) == ident[:, None]).all():
        raise NotQuasigroup("some column is not a permutation of 1..n")
    if not (arr[0] == ident).all() or not (arr[:, 0] == ident).all():
        raise NoNeutral("element 1 is not two-sided neutral")
    return LoopTable._from_t0(arr - 1)


def is_moufang(q: LoopTable) -> bool:
    return q.is_moufang


def is_associative(q: LoopTable) -> bool:
    return q.is_associative


def center(q: LoopTable) -> SubloopSet:
    """Elements commuting and associating with everything."""
    members = np.nonzero(q.center_mask)[0] + 1
    return SubloopSet(members.tolist(), q.n)


def _closure_pairs(rows, mask: int, elems: list, first_new: int):
    """Close elems (0-based, prefix already closed) under products."""
    i = first_new
    while i < len(elems):
        x = elems[i]
        rx = rows[x]
        for j in range(i + 1):
            y = elems[j]
            for z in (rx[y], rows[y][x]):
                if not (mask >> z) & 1:
                    mask |= 1 << z
                    elems.append(z)
        i += 1
    return mask, elems


def subloop_closure(q: LoopTable, seed) -> SubloopSet:
    """Smallest subloop containing the 1-based seed elements."""
    rows = q.rows
    mask = 1
    elems = [0]
    for s in seed:
        s0 = int(s) - 1
        if not 0 <= s0 < q.n:
            raise ValueError(f"seed element {s} out of range")
        if not (mask >> s0) & 1:
            mask |= 1 << s0
            elems.append(s0)
    mask, elems = _closure_pairs(rows, mask, elems, 0)
    return SubloopSet([e + 1 for e in elems], q.n)


def is_subloop(q: LoopTable, members) -> bool:
    s0 = np.array(sorted(int(m) - 1 for m in members), dtype=np.int64)
    if len(s0) == 0 or s0[0] != 0:
        return False
    inside = np.zeros(q.n, dtype=bool)
    inside[s0] = True
    return bool(inside[q.t0[np.ix_(s0, s0)]].all())


def min_generators(q: LoopTable) -> int:
    """Size of a smallest generating set, by exact depth-first search.

    Candidates extending a partial set are restricted to elements outside
    the closure so far, with indices increasing; a minimum-size generating
    set is irredundant, hence reachable under both restrictions.
    """
    n = q.n
    if n == 1:
        return 0
    rows = q.rows
    full = (1 << n) - 1

    def extend(mask, elems, start, depth_left):
        if mask == full:
            return True
        if depth_left == 0:
            return False
        for g in range(start, n):
            if (mask >> g) & 1:
                continue
            m2 = mask | (1 << g)
            e2 = elems + [g]
            m2, e2 = _closure_pairs(rows, m2, e2, len(e2) - 1)
            if extend(m2, e2, g + 1, depth_left - 1):
                return True
        return False

    for k in range(1, n + 1):
        if extend(1, [0], 1, k):
            return k
    raise AssertionError("unreachable: the full element set generates")


def is_normal(q: LoopTable, s: SubloopSet) -> bool:
    """Invariance of s under all inner mappings."""
    if not is_subloop(q, s.members):
        raise ValueError("argument is not a subloop")
    t0 = q.t0
    ld = q.left_div
    rd = q.right_div
    n = q.n
    s0 = s.indices0
    inside = np.zeros(n, dtype=bool)
    inside[s0] = True
    ys = np.arange(n)
    for x in range(n):
        sx = t0[s0, x]  # R_x(s)
        sxy = t0[sx[:, None], ys[None, :]]  # R_y R_x (s)
        img = rd[sxy, t0[x, ys][None, :]]  # R_{xy}^{-1} R_y R_x
        if not inside[img].all():
            return False
        xs = t0[x, s0]  # L_x(s)
        yxs = t0[ys[:, None], xs[None, :]]  # L_y L_x (s)
        img = ld[t0[ys, x][:, None], yxs]  # L_{yx}^{-1} L_y L_x
        if not inside[img].all():
            return False
        img = ld[x, t0[s0, x]]  # L_x^{-1} R_x
        if not inside[img].all():
            return False
    return True


def quotient_loop(q: LoopTable, s: SubloopSet):
    """Coset loop q/s together with the element -> coset map (1-based).

    Cosets are numbered by their minimal member, so the coset of the
    neutral element is element 1 of the quotient.
    """
    if not is_normal(q, s):
        raise NotNormal("subloop is not normal")
    n = q.n
    t0 = q.t0
    s0 = s.indices0
    k = len(s0)
    cid = np.full(n, -1, dtype=np.int64)
    reps = []
    for x in range(n):
        if cid[x] >= 0:
            continue
        coset = t0[x, s0]
        if len(set(coset.tolist())) != k or (cid[coset] >= 0).any():
            raise NotNormal("cosets do not partition the loop")
        cid[coset] = len(reps)
        reps.append(x)
    reps = np.array(reps, dtype=np.int64)
    tq = cid[t0[np.ix_(reps, reps)]]
    if not (cid[t0] == tq[cid[:, None], cid[None, :]]).all():
        raise NotNormal("products are not constant on cosets")
    quotient = validate_loop(tq + 1)
    coset_map = tuple(int(c) + 1 for c in cid)
    return quotient, coset_map


def element_orders(q: LoopTable) -> list:
    """Order of each element, position i holding element i+1."""
    return list(q.element_orders)


def direct_product(a: LoopTable, b: LoopTable) -> LoopTable:
    """Componentwise product on pairs, (x, y) -> x*|b| + y (0-based)."""
    nb = b.n
    ta = a.t0[:, None, :, None].astype(np.int64)
    tb = b.t0[None, :, None, :].astype(np.int64)
    t = (ta * nb + tb).reshape(a.n * nb, a.n * nb)
    return LoopTable._from_t0(t)


def apply_relabeling(q: LoopTable, perm) -> LoopTable:
    """Relabel elements by a 0-based permutation fixing 0."""
    perm = np.asarray(perm, dtype=np.int64)
    assert perm[0] == 0
    inv = np.empty_like(perm)
    inv[perm] = np.arange(q.n)
    t = perm[q.t0[inv[:, None], inv[None, :]]]
    return LoopTable._from_t0(t)
