"""Central extensions E(K, GF(p), f) as explicit loop tables."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cocycles import Cocycle, coboundary_space
from .linalg import Subspace
from .loops import LoopTable, SubloopSet, min_generators


@dataclass(frozen=True)
class ExtensionSpec:
    """Base loop, prime, and cocycle describing one central extension."""

    base: LoopTable
    p: int
    f: Cocycle

    def __post_init__(self):
        assert self.p in (2, 3)
        assert self.f.p == self.p and self.f.loop_order == self.base.n
        assert self.f.is_normalized(), "cocycle must vanish on (1,x) and (x,1)"


def central_extension(spec: ExtensionSpec) -> LoopTable:
    """Loop on pairs (x, a) with (x,a)(y,b) = (xy, a+b+f(x,y)).

    Pairs are numbered (x, a) -> (x-1)p + a + 1, so (1, 0) is element 1 and
    the fiber {(1, a)} occupies elements 1..p.
    """
    k = spec.base
    p = spec.p
    n = k.n
    fmat = spec.f.as_matrix()
    a = np.arange(p)
    pair_base = k.t0.astype(np.int64)[:, None, :, None] * p
    pair_f = (a[None, :, None, None] + a[None, None, None, :] + fmat[:, None, :, None]) % p
    table = (pair_base + pair_f).reshape(n * p, n * p)
    return LoopTable._from_t0(table)


def central_fiber(spec: ExtensionSpec) -> SubloopSet:
    """The central subloop {(1, a)} of the extension, elements 1..p."""
    return SubloopSet(range(1, spec.p + 1), spec.base.n * spec.p)


def equivalent_extension_check(
    k: LoopTable, p: int, f: Cocycle, g: Cocycle, cob: Subspace | None = None
) -> bool:
    """True iff g - f is a coboundary, which forces isomorphic extensions.

    The converse direction is not assumed: a False answer does not certify
    non-isomorphic extensions.
    """
    if cob is None:
        cob = coboundary_space(k, p)
    return cob.contains_raw((g - f).raw)


def is_prunable_base(k: LoopTable) -> bool:
    """Bases generated by at most 2 elements only yield groups."""
    return min_generators(k) <= 2
