"""Isomorphisms, automorphism groups, and the cocycle orbit reduction.

Isomorphism testing uses cheap invariant fingerprints (including an
iterated refinement of per-element colors) to filter, then a backtracking
search over images of a small generating sequence with closure
propagation.  Fingerprints are only ever used to separate loops; equality
of loops is always certified by an explicit isomorphism.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from . import linalg
from .cocycles import Cocycle, CocycleSpaces
from .errors import ExplodedBudget
from .linalg import FpVector
from .loops import LoopTable


# ---------------------------------------------------------------------------
# permutations and Schreier-Sims


def perm_inverse(p):
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def perm_compose(a, b):
    """Apply b first, then a."""
    return tuple(a[j] for j in b)


class PermGroup:
    """Permutation group with a deterministic Schreier-Sims chain.

    Supports incremental generator insertion; `add` reports whether the
    group grew, which doubles as a membership test for sifting a stream of
    permutations down to a small strong generating set.
    """

    def __init__(self, degree: int):
        self.degree = degree
        self.identity = tuple(range(degree))
        self.bases = []
        self.gen_levels = []  # gen_levels[i]: generators fixing bases[:i]
        self.transversals = []  # transversals[i]: point -> coset rep

    def order(self) -> int:
        out = 1
        for t in self.transversals:
            out *= len(t)
        return out

    def _orbit(self, level: int) -> None:
        b = self.bases[level]
        gens = self.gen_levels[level]
        t = {b: self.identity}
        frontier = [b]
        while frontier:
            x = frontier.pop()
            rep = t[x]
            for g in gens:
                y = g[x]
                if y not in t:
                    t[y] = perm_compose(g, rep)
                    frontier.append(y)
        self.transversals[level] = t

    def _sift(self, g, level: int):
        """Reduce g through levels >= level; return (residue, stuck_level)."""
        for i in range(level, len(self.bases)):
            x = g[self.bases[i]]
            t = self.transversals[i]
            if x not in t:
                return g, i
            g = perm_compose(perm_inverse(t[x]), g)
        return g, len(self.bases)

    def contains(self, g) -> bool:
        res, _ = self._sift(tuple(g), 0)
        return res == self.identity

    def add(self, g) -> bool:
        """Insert a permutation; return True if the group grew."""
        g = tuple(g)
        res, level = self._sift(g, 0)
        if res == self.identity:
            return False
        self._insert(res, level)
        return True

    def _insert(self, g, level: int) -> None:
        if level == len(self.bases):
            moved = min(i for i in range(self.degree) if g[i] != i)
            self.bases.append(moved)
            self.gen_levels.append([])
            self.transversals.append({moved: self.identity})
        self.gen_levels[level].append(g)
        self._orbit(level)
        # close under Schreier generators below this level
        t = self.transversals[level]
        for x, rep in list(t.items()):
            for s in self.gen_levels[level]:
                rep2 = t[s[x]]
                schreier = perm_compose(perm_inverse(rep2), perm_compose(s, rep))
                res, lvl = self._sift(schreier, level + 1)
                if res != self.identity:
                    self._insert(res, lvl)


# ---------------------------------------------------------------------------
# invariant colors and fingerprints


def _initial_colors(q: LoopTable):
    n = q.n
    orders = np.array(q.element_orders, dtype=np.int64)
    sq_orders = orders[q.t0[np.arange(n), np.arange(n)]]
    comm = (q.t0 != q.t0.T).sum(axis=1)
    bad = ~q.assoc_ok
    av1 = bad.sum(axis=(1, 2))
    av2 = bad.sum(axis=(0, 2))
    av3 = bad.sum(axis=(0, 1))
    central = q.center_mask.astype(np.int64)
    content = list(zip(orders.tolist(), sq_orders.tolist(), comm.tolist(),
                       av1.tolist(), av2.tolist(), av3.tolist(), central.tolist()))
    return content


def _rank(contents):
    ranks = {c: i for i, c in enumerate(sorted(set(contents)))}
    return np.array([ranks[c] for c in contents], dtype=np.int64)


def refine_colors(q: LoopTable):
    """Canonical per-element colors, stable under isomorphism.

    Colors are rank-compressed by sorted content, so two isomorphic loops
    are assigned identical color arrays up to the isomorphism; the
    per-round histograms are isomorphism invariants.
    """
    n = q.n
    rows = q.rows
    colors = _rank(_initial_colors(q))
    histories = [tuple(sorted(Counter(colors.tolist()).items()))]
    while True:
        c = colors.tolist()
        contents = []
        for x in range(n):
            rx = rows[x]
            prof = sorted((c[y], c[rx[y]], c[rows[y][x]]) for y in range(n))
            contents.append((c[x], tuple(prof)))
        new = _rank(contents)
        histories.append(tuple(sorted(Counter(new.tolist()).items())))
        if len(set(new.tolist())) == len(set(colors.tolist())):
            return new, tuple(histories)
        colors = new


def fingerprint(q: LoopTable):
    """Cheap isomorphism-invariant tuple, usable as a dedup bucket key."""
    if not hasattr(q, "_fingerprint"):
        colors, histories = refine_colors(q)
        q._colors = colors
        q._fingerprint = (
            q.n,
            int(q.is_associative),
            int(q.is_commutative),
            int(q.center_mask.sum()),
            tuple(sorted(q.element_orders)),
            histories,
        )
    return q._fingerprint


def element_colors(q: LoopTable):
    fingerprint(q)
    return q._colors


# ---------------------------------------------------------------------------
# generating chain for backtracking


@dataclass
class _Chain:
    gens: list  # chosen generator elements (0-based)
    elems: list  # closure discovery order; elems[0] == 0
    derivs: list  # aligned with elems: None, ("gen", k), or (a_pos, b_pos)
    level_sizes: list  # |S_k| after each generator


def _chain(q: LoopTable) -> _Chain:
    if hasattr(q, "_gen_chain"):
        return q._gen_chain
    n = q.n
    rows = q.rows
    colors = element_colors(q).tolist()
    class_size = Counter(colors)
    elems = [0]
    derivs = [None]
    pos = {0: 0}
    mask = 1
    gens = []
    level_sizes = []

    def close(first_new):
        nonlocal mask
        i = first_new
        while i < len(elems):
            x = elems[i]
            rx = rows[x]
            for j in range(i + 1):
                y = elems[j]
                for z, d in ((rx[y], (i, j)), (rows[y][x], (j, i))):
                    if not (mask >> z) & 1:
                        mask |= 1 << z
                        pos[z] = len(elems)
                        elems.append(z)
                        derivs.append(d)
            i += 1

    while len(elems) < n:
        cand = min(
            (x for x in range(n) if not (mask >> x) & 1),
            key=lambda x: (class_size[colors[x]], x),
        )
        gens.append(cand)
        mask |= 1 << cand
        pos[cand] = len(elems)
        elems.append(cand)
        derivs.append(("gen", len(gens) - 1))
        close(len(elems) - 1)
        level_sizes.append(len(elems))
    q._gen_chain = _Chain(gens, elems, derivs, level_sizes)
    return q._gen_chain


def _search(q1: LoopTable, q2: LoopTable, find_all: bool):
    """Backtracking over generator images; returns 0-based image arrays."""
    n = q1.n
    if q2.n != n:
        return []
    if fingerprint(q1) != fingerprint(q2):
        return []
    chain = _chain(q1)
    c1 = element_colors(q1).tolist()
    c2 = element_colors(q2).tolist()
    classes2 = {}
    for x, c in enumerate(c2):
        classes2.setdefault(c, []).append(x)
    t1 = q1.t0
    t2 = q2.t0
    rows2 = q2.rows
    elems = chain.elems
    derivs = chain.derivs
    phi = np.full(n, -1, dtype=np.int64)
    phi[0] = 0
    used = bytearray(n)
    used[0] = 1
    solutions = []
    level_starts = [1] + chain.level_sizes

    def level_ok(size):
        idx = np.array(elems[:size], dtype=np.int64)
        im = phi[idx]
        return bool((phi[t1[np.ix_(idx, idx)]] == t2[np.ix_(im, im)]).all())

    def rec(level):
        if level == len(chain.gens):
            solutions.append(phi.copy())
            return not find_all
        start, end = level_starts[level], level_starts[level + 1]
        gen_elem = elems[start]
        for cand in classes2.get(c1[gen_elem], ()):
            if used[cand]:
                continue
            assigned = []
            ok = True
            for k in range(start, end):
                d = derivs[k]
                if isinstance(d[0], str):
                    v = cand
                else:
                    a, b = d
                    v = rows2[phi[elems[a]]][phi[elems[b]]]
                e = elems[k]
                if used[v] or c2[v] != c1[e]:
                    ok = False
                    break
                phi[e] = v
                used[v] = 1
                assigned.append((e, v))
            if ok and level_ok(end) and rec(level + 1):
                return True
            for e, v in assigned:
                phi[e] = -1
                used[v] = 0
        return False

    rec(0)
    return solutions


def are_isomorphic(q1: LoopTable, q2: LoopTable):
    """An explicit isomorphism as a 1-based tuple, or None.

    The returned map phi satisfies phi(xy) = phi(x)phi(y) on every pair;
    this is re-verified on the full table before returning.
    """
    sols = _search(q1, q2, find_all=False)
    if not sols:
        return None
    phi = sols[0]
    assert (phi[q1.t0] == q2.t0[phi[:, None], phi[None, :]]).all()
    assert len(set(phi.tolist())) == q1.n
    return tuple(int(v) + 1 for v in phi)


def automorphisms(q: LoopTable):
    """Every automorphism, as 0-based tuples, in deterministic order."""
    return [tuple(int(v) for v in s) for s in _search(q, q, find_all=True)]


@dataclass(frozen=True)
class AutGroup:
    """Automorphism group given by generators (0-based perms) and order."""

    degree: int
    generators: tuple
    order: int


def _ea_structure(q: LoopTable):
    """(p, d, emb) for an elementary abelian loop; emb[code] = element."""
    pp = q.exponent_prime
    assert pp is not None
    p, d = pp
    rows = q.rows
    emb = [0]
    seen = {0}
    k = 0
    for x in range(1, q.n):
        if x in seen:
            continue
        # new basis vector: extend all existing codes by digit k
        block = list(emb)
        cur = block
        for _ in range(1, p):
            cur = [rows[e][x] for e in cur]
            emb.extend(cur)
            seen.update(cur)
        k += 1
    assert len(emb) == q.n == p**d
    return p, d, emb


def _is_elementary_abelian(q: LoopTable) -> bool:
    pp = q.exponent_prime
    if pp is None or not q.is_associative or not q.is_commutative:
        return False
    p = pp[0]
    return all(o in (1, p) for o in q.element_orders)


def _gl_generator_matrices(p: int, d: int):
    """Transvections plus one scaling; generates GL(d, p) for p in {2, 3}."""
    mats = []
    for a in range(d):
        for b in range(d):
            if a == b:
                continue
            m = np.eye(d, dtype=np.int64)
            m[a, b] = 1
            mats.append(m)
    if p == 3 and d >= 1:
        m = np.eye(d, dtype=np.int64)
        m[0, 0] = 2
        mats.append(m)
    return mats


def _vec_of_code(code, p, d):
    v = []
    for _ in range(d):
        v.append(code % p)
        code //= p
    return np.array(v, dtype=np.int64)


def _code_of_vec(v, p):
    code = 0
    for i in range(len(v) - 1, -1, -1):
        code = code * p + int(v[i]) % p
    return code


def general_linear_order(p: int, d: int) -> int:
    out = 1
    for i in range(d):
        out *= p**d - p**i
    return out


def automorphism_group(q: LoopTable) -> AutGroup:
    """Generators and order of Aut(q).

    Elementary abelian loops get GL(d, p) generators directly (GL(5, 2)
    is far too large to enumerate); everything else is enumerated by
    backtracking, with the order double-checked by a Schreier-Sims chain
    over a sifted generating subset.
    """
    n = q.n
    if n == 1:
        return AutGroup(1, (), 1)
    if _is_elementary_abelian(q):
        p, d, emb = _ea_structure(q)
        inv_emb = [0] * n
        for code, e in enumerate(emb):
            inv_emb[e] = code
        gens = []
        for m in _gl_generator_matrices(p, d):
            perm = [0] * n
            for e in range(n):
                v = _vec_of_code(inv_emb[e], p, d)
                w = (m @ v) % p
                perm[e] = emb[_code_of_vec(w, p)]
            gens.append(tuple(perm))
        group = PermGroup(n)
        for g in gens:
            group.add(g)
        order = general_linear_order(p, d)
        assert group.order() == order, "GL generators failed to generate"
        return AutGroup(n, tuple(gens), order)
    sols = automorphisms(q)
    group = PermGroup(n)
    strong = [s for s in sols if group.add(s)]
    assert group.order() == len(sols)
    return AutGroup(n, tuple(strong), len(sols))


# ---------------------------------------------------------------------------
# action on cocycles and the orbit reduction


def act_on_cocycle(f: Cocycle, alpha) -> Cocycle:
    """Pullback f^alpha(x, y) = f(alpha(x), alpha(y))."""
    n = f.loop_order
    p = f.p
    beta = perm_inverse(tuple(alpha))
    if p == 2:
        out = 0
        for j in linalg.support_indices(f.raw):
            u, v = divmod(j, n)
            out |= 1 << (beta[u] * n + beta[v])
        return Cocycle(p, n, out)
    lo = hi = 0
    for j in linalg.support_indices(f.raw[0]):
        u, v = divmod(j, n)
        lo |= 1 << (beta[u] * n + beta[v])
    for j in linalg.support_indices(f.raw[1]):
        u, v = divmod(j, n)
        hi |= 1 << (beta[u] * n + beta[v])
    return Cocycle(p, n, (lo, hi))


def _complement_action_tables(k: LoopTable, spaces: CocycleSpaces, aut: AutGroup):
    """Per-generator action on encoded complement coordinates.

    Pulling back by an automorphism and projecting back onto the
    complement along the coboundaries is linear and invertible, so the
    generators induce a group action on coordinate codes.
    """
    p = spaces.p
    comp = spaces.complement
    cob = spaces.coboundaries
    c = comp.dim
    size = p**c
    tables = []
    for g in aut.generators:
        cols = []
        for row in comp.basis:
            w = act_on_cocycle(Cocycle(p, k.n, row), g)
            _, comp_part = linalg.decompose(
                FpVector(p, k.n * k.n, w.raw), cob, comp
            )
            coords = comp.coordinates_raw(comp_part.raw)
            cols.append(_code_of_vec(np.array(coords), p))
        tbl = np.zeros(size, dtype=np.int64)
        if p == 2:
            for v in range(1, size):
                low = v & -v
                tbl[v] = tbl[v ^ low] ^ cols[low.bit_length() - 1]
        else:
            pw = [p**i for i in range(c)]
            for v in range(1, size):
                digit_pos = 0
                vv = v
                while vv % p == 0:
                    vv //= p
                    digit_pos += 1
                a = vv % p
                prev = v - a * pw[digit_pos]
                col = cols[digit_pos]
                step = col
                if a == 2:
                    step = _code_add(p, c, col, col)
                tbl[v] = _code_add(p, c, int(tbl[prev]), step)
        tables.append(tbl)
    return tables


def _code_add(p, c, u, v):
    out = 0
    mul = 1
    for _ in range(c):
        out += ((u + v) % p) * mul
        u //= p
        v //= p
        mul *= p
    return out


def representative_cocycles(
    k: LoopTable,
    p: int,
    spaces: CocycleSpaces,
    aut: AutGroup,
    budget: int = 2**20,
):
    """One cocycle per orbit of Aut(k) on the complement.

    Sweeps coordinate codes in increasing order: the least unvisited code
    starts a new orbit, the orbit is closed under the induced generator
    actions and marked, and its least member is kept.  Every extension of
    k arises, up to isomorphism, from one of the returned cocycles.
    """
    c = spaces.complement.dim
    if p**c > budget:
        raise ExplodedBudget(
            f"complement has {p}^{c} cocycles, over budget {budget}"
        )
    tables = _complement_action_tables(k, spaces, aut)
    size = p**c
    visited = bytearray(size)
    reps = []
    for v in range(size):
        if visited[v]:
            continue
        reps.append(v)
        visited[v] = 1
        stack = [v]
        while stack:
            u = stack.pop()
            for tbl in tables:
                w = int(tbl[u])
                if not visited[w]:
                    visited[w] = 1
                    stack.append(w)
    comp = spaces.complement
    out = []
    for code in reps:
        coords = _vec_of_code(code, p, c)
        out.append(Cocycle(p, k.n, comp.member_from_coords_raw(coords.tolist())))
    return out


# ---------------------------------------------------------------------------
# isotopy


def principal_isotope(q: LoopTable, a: int, b: int) -> LoopTable:
    """Principal isotope x . y = (x / b) * (a \\ y), relabeled so 1 is neutral.

    a and b are 1-based; the isotope's neutral element a*b is swapped into
    slot 1.
    """
    a0, b0 = a - 1, b - 1
    t0 = q.t0
    iso = t0[np.ix_(q.right_div[:, b0], q.left_div[a0, :])]
    e = int(t0[a0, b0])
    if e != 0:
        perm = np.arange(q.n)
        perm[0], perm[e] = e, 0
        iso = perm[iso[perm[:, None], perm[None, :]]]
    return LoopTable._from_t0(iso)


def are_isotopic(q1: LoopTable, q2: LoopTable) -> bool:
    """Whether some principal isotope of q1 is isomorphic to q2.

    Every loop isotope is isomorphic to a principal one, so the n^2 sweep
    is exhaustive.
    """
    if q1.n != q2.n:
        return False
    if are_isomorphic(q1, q2) is not None:
        return True
    symmetric_target = q2.is_commutative
    for a in range(1, q1.n + 1):
        for b in range(1, q1.n + 1):
            iso = principal_isotope(q1, a, b)
            if symmetric_target and not iso.is_commutative:
                continue
            if are_isomorphic(iso, q2) is not None:
                return True
    return False
