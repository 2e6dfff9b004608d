"""Cocycle, Moufang-cocycle and coboundary spaces of a loop over GF(p).

A cocycle f : K x K -> GF(p) with f(1,x) = f(x,1) = 0 is stored as a packed
vector of length |K|^2 under the fixed pair bijection b(x,y) = (x-1)|K| + y
(1-based), i.e. row-major order of the multiplication table.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import linalg
from .errors import CoboundaryNotMoufang, NotCentral, TauNotNormalized, WrongOrder
from .linalg import RowReducer, Subspace
from .loops import LoopTable, SubloopSet, quotient_loop


@dataclass(frozen=True)
class PairIndexer:
    """The fixed bijection K x K -> 1..n^2, b(x,y) = (x-1)n + y."""

    n: int

    def index(self, x: int, y: int) -> int:
        """1-based pair index of 1-based elements."""
        return (x - 1) * self.n + y

    def index0(self, x0: int, y0: int) -> int:
        return x0 * self.n + y0

    def pair0(self, pos: int):
        return divmod(pos, self.n)


@dataclass(frozen=True)
class Cocycle:
    """A GF(p)-valued cocycle on a loop of the given order."""

    p: int
    loop_order: int
    raw: object

    @classmethod
    def zero(cls, p: int, loop_order: int) -> "Cocycle":
        return cls(p, loop_order, linalg.raw_zero(p))

    @classmethod
    def from_matrix(cls, p: int, mat) -> "Cocycle":
        mat = np.asarray(mat, dtype=np.int64) % p
        n = mat.shape[0]
        flat = mat.reshape(-1)
        if p == 2:
            raw = _pack_bits(flat)
        else:
            raw = (_pack_bits(flat == 1), _pack_bits(flat == 2))
        return cls(p, n, raw)

    def as_matrix(self) -> np.ndarray:
        n = self.loop_order
        if self.p == 2:
            flat = _unpack_bits(self.raw, n * n)
        else:
            flat = _unpack_bits(self.raw[0], n * n) + 2 * _unpack_bits(self.raw[1], n * n)
        return flat.reshape(n, n)

    def entry(self, x: int, y: int) -> int:
        """Value at 1-based elements x, y."""
        return linalg.raw_entry(self.p, self.raw, (x - 1) * self.loop_order + (y - 1))

    def is_zero(self) -> bool:
        return linalg.raw_is_zero(self.p, self.raw)

    def is_normalized(self) -> bool:
        """f(1,x) = f(x,1) = 0 for all x."""
        n = self.loop_order
        for x in range(n):
            if linalg.raw_entry(self.p, self.raw, x):
                return False
            if linalg.raw_entry(self.p, self.raw, x * n):
                return False
        return True

    def __add__(self, other: "Cocycle") -> "Cocycle":
        assert self.p == other.p and self.loop_order == other.loop_order
        return Cocycle(self.p, self.loop_order, linalg.raw_add(self.p, self.raw, other.raw))

    def __sub__(self, other: "Cocycle") -> "Cocycle":
        assert self.p == other.p and self.loop_order == other.loop_order
        return Cocycle(self.p, self.loop_order, linalg.raw_sub(self.p, self.raw, other.raw))


def _pack_bits(flat) -> int:
    data = np.packbits(np.asarray(flat, dtype=np.uint8), bitorder="little").tobytes()
    return int.from_bytes(data, "little")


def _unpack_bits(raw: int, length: int) -> np.ndarray:
    nbytes = (length + 7) // 8
    data = np.frombuffer(raw.to_bytes(nbytes, "little"), dtype=np.uint8)
    return np.unpackbits(data, bitorder="little")[:length].astype(np.int64)


@dataclass(frozen=True)
class CocycleSpaces:
    """Moufang cocycles, coboundaries, and a chosen direct complement."""

    p: int
    loop_order: int
    moufang: Subspace
    coboundaries: Subspace
    complement: Subspace


def coboundary_of(k: LoopTable, p: int, tau) -> Cocycle:
    """The coboundary of tau : K -> GF(p), tau given per 1-based element."""
    tau = np.asarray(list(tau), dtype=np.int64) % p
    assert len(tau) == k.n
    if tau[0] % p != 0:
        raise TauNotNormalized("tau must vanish on the neutral element")
    mat = (tau[k.t0] - tau[:, None] - tau[None, :]) % p
    return Cocycle.from_matrix(p, mat)


def coboundary_space(k: LoopTable, p: int) -> Subspace:
    """Echelon basis of the span of the point-indicator coboundaries."""
    n = k.n
    red = RowReducer(p, n * n)
    tau = np.zeros(n, dtype=np.int64)
    for x in range(1, n):
        tau[x] = 1
        red.add_row(coboundary_of(k, p, tau).raw)
        tau[x] = 0
    return red.subspace()


def _system1_rows(p: int, n: int):
    """Unit rows forcing f(1,x) = f(x,1) = 0; there are 2n - 1 of them."""
    zero = linalg.raw_zero(p)
    for x in range(n):
        yield linalg.raw_set_entry(p, zero, x, 1)
        if x:
            yield linalg.raw_set_entry(p, zero, x * n, 1)


def _moufang_row_positions(k: LoopTable):
    """Six flat pair positions of the Moufang identity, per triple (x,y,z).

    Signs: the first three positions carry +1, the last three -1.
    """
    t0 = k.t0.astype(np.int64)
    n = k.n
    x, y, z = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    xy = t0[x, y]
    zx = t0[z, x]
    yz = t0[y, z]
    yzx = t0[yz, x]
    pos = np.stack(
        [
            xy * n + zx,  # f(xy, zx)
            x * n + y,  # f(x, y)
            z * n + x,  # f(z, x)
            x * n + yzx,  # f(x, (yz)x)
            yz * n + x,  # f(yz, x)
            y * n + z,  # f(y, z)
        ],
        axis=-1,
    )
    return pos.reshape(-1, 6)


def iter_moufang_rows(k: LoopTable, p: int):
    """Stream the |K|^3 linear constraints of the Moufang cocycle identity.

    Rows are generated on the fly; nothing of cubic size is ever stored.
    """
    positions = _moufang_row_positions(k)
    if p == 2:
        for row in positions.tolist():
            a, b, c, d, e, f = row
            yield (1 << a) ^ (1 << b) ^ (1 << c) ^ (1 << d) ^ (1 << e) ^ (1 << f)
    else:
        for row in positions.tolist():
            coeffs = {}
            for pos in row[:3]:
                coeffs[pos] = (coeffs.get(pos, 0) + 1) % 3
            for pos in row[3:]:
                coeffs[pos] = (coeffs.get(pos, 0) + 2) % 3
            lo = hi = 0
            for pos, c in coeffs.items():
                if c == 1:
                    lo |= 1 << pos
                elif c == 2:
                    hi |= 1 << pos
            yield (lo, hi)


def moufang_cocycle_space(k: LoopTable, p: int) -> Subspace:
    """Solution space of the normalization plus Moufang identities."""
    if not k.is_moufang:
        raise ValueError("base loop is not Moufang")
    n = k.n
    red = RowReducer(p, n * n)
    red.add_rows(_system1_rows(p, n))
    red.add_rows(iter_moufang_rows(k, p))
    return red.nullspace()


def group_cocycle_space(k: LoopTable, p: int) -> Subspace:
    """Solution space of the group cocycle identity (plus normalization)."""
    n = k.n
    t0 = k.t0.astype(np.int64)
    red = RowReducer(p, n * n)
    red.add_rows(_system1_rows(p, n))
    x, y, z = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    pos = np.stack(
        [
            t0[x, y] * n + z,  # f(xy, z)
            x * n + y,  # f(x, y)
            x * n + t0[y, z],  # f(x, yz)
            y * n + z,  # f(y, z)
        ],
        axis=-1,
    ).reshape(-1, 4)
    if p == 2:
        for a, b, c, d in pos.tolist():
            red.add_row((1 << a) ^ (1 << b) ^ (1 << c) ^ (1 << d))
    else:
        for a, b, c, d in pos.tolist():
            coeffs = {}
            coeffs[a] = (coeffs.get(a, 0) + 1) % 3
            coeffs[b] = (coeffs.get(b, 0) + 1) % 3
            coeffs[c] = (coeffs.get(c, 0) + 2) % 3
            coeffs[d] = (coeffs.get(d, 0) + 2) % 3
            lo = hi = 0
            for q, cc in coeffs.items():
                if cc == 1:
                    lo |= 1 << q
                elif cc == 2:
                    hi |= 1 << q
            red.add_row((lo, hi))
    return red.nullspace()


def is_group_cocycle(k: LoopTable, f: Cocycle) -> bool:
    """Whether f(xy,z) + f(x,y) = f(x,yz) + f(y,z) for all triples."""
    p = f.p
    t0 = k.t0
    mat = f.as_matrix()
    lhs = mat[t0, :] + mat[:, :, None]
    rhs = mat[:, t0] + mat[None, :, :]
    return bool(((lhs - rhs) % p == 0).all())


def is_moufang_cocycle(k: LoopTable, f: Cocycle) -> bool:
    """Direct check of the Moufang cocycle identity on all triples."""
    p = f.p
    t0 = k.t0
    n = k.n
    mat = f.as_matrix()
    yzx = np.transpose(t0[t0, :], (2, 0, 1))  # (x,y,z) -> (yz)x
    lhs = (
        mat[t0[:, :, None], t0.T[:, None, :]]
        + mat[:, :, None]
        + mat.T[:, None, :]
    )
    rhs = (
        mat[np.arange(n)[:, None, None], yzx]
        + np.transpose(mat[t0, :], (2, 0, 1))
        + mat[None, :, :]
    )
    return bool(((lhs - rhs) % p == 0).all())


def build_spaces(k: LoopTable, p: int) -> CocycleSpaces:
    """Moufang cocycles, coboundaries, and a deterministic complement."""
    mcoc = moufang_cocycle_space(k, p)
    cob = coboundary_space(k, p)
    for row in cob.basis:
        if not mcoc.contains_raw(row):
            raise CoboundaryNotMoufang(
                "a coboundary fails the Moufang identity; "
                "the base loop data is inconsistent"
            )
    comp = linalg.complement(cob, mcoc)
    return CocycleSpaces(p, k.n, mcoc, cob, comp)


def cocycle_from_extension(q: LoopTable, z: SubloopSet):
    """Recover (K, f) from a central extension q with fiber z.

    The fiber must be central of prime order p in {2, 3}.  The section
    picks the least element of each coset, and the fiber is identified
    with GF(p) through its least non-neutral element.
    """
    p = len(z)
    if p not in (2, 3):
        raise WrongOrder(f"fiber must have order 2 or 3, got {p}")
    zmask = q.center_mask
    for m in z.members:
        if not zmask[m - 1]:
            raise NotCentral(f"element {m} of the fiber is not central")
    k, coset_map = quotient_loop(q, z)
    n = k.n
    # least preimage per coset
    sigma = np.full(n, -1, dtype=np.int64)
    for elem0 in range(q.n):
        c0 = coset_map[elem0] - 1
        if sigma[c0] < 0:
            sigma[c0] = elem0
    gen0 = sorted(m - 1 for m in z.members if m != 1)[0]
    label = {0: 0}
    cur = gen0
    a = 1
    while cur != 0:
        label[cur] = a
        cur = int(q.t0[cur, gen0])
        a += 1
    if len(label) != p:
        raise WrongOrder("fiber is not cyclic of prime order")
    sx = q.t0[sigma[:, None], sigma[None, :]]  # sigma(x) sigma(y)
    u = q.left_div[sigma[k.t0], sx]  # sigma(xy) \ (sigma(x) sigma(y))
    lab = np.zeros(q.n, dtype=np.int64)
    for e0, v in label.items():
        lab[e0] = v
    members0 = {m - 1 for m in z.members}
    if not all(int(e) in members0 for e in np.unique(u)):
        raise NotCentral("section defect left the fiber; extension is not central")
    f = Cocycle.from_matrix(p, lab[u])
    return k, f
