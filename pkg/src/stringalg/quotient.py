"""Finite models of RQ/(I + pi^N RQ).

Construction
------------
Paths are ordered longest first (then left to right by arrow declaration), and
the ideal is saturated into a reduction system over that order, up to a word
length bound ``W = L + slack``.  A row whose leading coefficient is a unit
makes its leading path a *tip*; every path containing a tip reduces, so only
the minimal tips are stored.  The remaining rows lead with ``pi^v`` (v > 0) on
a normal path and record torsion.  Saturation adds, until nothing new appears:

* the generators,
* for overlapping tips ``u = p s`` and ``u' = s q``, the difference of the
  two reductions of ``p s q``,
* arrow multiples on both sides of the torsion rows, and the pi-shifts that
  keep them in Howell form.

Only normal paths are ever enumerated.  The model is accepted when

* no path of length ``L + 1`` is normal (every longer path then reduces into
  degree <= L), and
* raising the bound by two does not change the system in degrees <= L + 1.

Otherwise ``L`` doubles, up to ``4 * N * (max generator degree)``.

Coordinates
-----------
Normal forms are sparse vectors keyed by column key (see :class:`_PathIndex`).
The torsion rows are supported on the normal-form basis and present the
algebra as an R-module: ``Lambda = R^basis / span(torsion rows)``.  Submodules
of the algebra are stored as Howell forms containing the torsion rows.
"""

from __future__ import annotations

from functools import cached_property
from typing import Iterable, Optional, Sequence

from .chainring import ChainRing
from .freealg import AlgElem, Presentation
from .quiver import Path, Quiver
from .trunclin import (Howell, RowModule, SparseRow, axpy, elementary_valuations,
                       howell_of, scale, sparse_intersection, torsion_exponents)


class NotFiniteAtPrecision(RuntimeError):
    def __init__(self, message: str, path: Optional[str] = None):
        super().__init__(message)
        self.path = path


class EmptyQuiver(ValueError):
    pass


class _NotClosed(Exception):
    def __init__(self, reason: str, path: Optional[Path] = None):
        super().__init__(reason)
        self.reason = reason
        self.path = path


Vec = dict  # column key -> ring code


class _PathIndex:
    """Integer column keys for paths, decreasing along the canonical order.

    Length-n paths occupy a block of ``max(#arrows, 1)**n`` keys (the vertices
    for n = 0) and are numbered by their arrow word in base ``#arrows``, so
    keys are computed, not enumerated.
    """

    def __init__(self, quiver: Quiver):
        self.Q = quiver
        self.base = max(quiver.num_arrows, 1)
        self._offsets = [0]
        self._paths: dict[int, Path] = {}

    def _offset(self, n: int) -> int:
        while len(self._offsets) <= n:
            k = len(self._offsets) - 1
            self._offsets.append(self._offsets[-1] + (self.Q.num_vertices if k == 0 else self.base ** k))
        return self._offsets[n]

    def key(self, p: Path) -> int:
        if p.arrows:
            code = 0
            for a in p.arrows:
                code = code * self.base + a
        else:
            code = p.head
        k = -(self._offset(len(p)) + code)
        self._paths[k] = p
        return k

    def path(self, key: int) -> Path:
        p = self._paths.get(key)
        if p is not None:
            return p
        r = -key
        n = 0
        while self._offset(n + 1) <= r:
            n += 1
        code = r - self._offset(n)
        if n == 0:
            p = self.Q.trivial(code)
        else:
            digits = []
            for _ in range(n):
                code, d = divmod(code, self.base)
                digits.append(d)
            p = self.Q.path(reversed(digits))
        self._paths[key] = p
        return p

    def min_key(self, n: int) -> int:
        """Smallest key of a path of length <= n."""
        return -(self._offset(n + 1) - 1)


def _normalise(R: ChainRing, row: SparseRow, col) -> tuple[SparseRow, int]:
    x = row[col]
    v = int(R.valuation(x))
    row = scale(R, row, R.inv(R.shift_down(x, v)))
    row[col] = R.pi_power(v)
    return row, v


class _Rewriter:
    """The reduction system of I + pi^N RQ up to a word length bound.

    ``rows`` maps a leading column to its row, normalised to lead with
    ``pi**v``; ``vals`` holds v.  Rows with v = 0 are the tips.
    """

    def __init__(self, pres: Presentation, index: _PathIndex):
        self.pres = pres
        self.R: ChainRing = pres.ring
        self.Q: Quiver = pres.quiver
        self.idx = index
        self.rows: dict[int, SparseRow] = {}
        self.vals: dict[int, int] = {}
        self.tips: dict[tuple[int, ...], int] = {}
        self.tip_lengths: list[int] = []
        self.dead_vertices: set[int] = set()  # v with e_v a tip
        self.bound = -1
        self._pending: list[tuple[int, SparseRow, int]] = []

    # -- tips ---------------------------------------------------------------------

    def _visits_dead(self, p: Path) -> bool:
        dead = self.dead_vertices
        if not dead:
            return False
        if p.tail in dead:
            return True
        arrows = self.Q.arrows
        return any(arrows[a].head in dead for a in p.arrows)

    def _find_tip(self, p: Path) -> Optional[tuple[int, int, int]]:
        """(start, length, key) of the leftmost shortest tip inside p."""
        arr = p.arrows
        n = len(arr)
        for i in range(n):
            for ln in self.tip_lengths:
                if i + ln > n:
                    break
                k = self.tips.get(arr[i:i + ln])
                if k is not None:
                    return i, ln, k
        return None

    def is_normal(self, p: Path) -> bool:
        return not self._visits_dead(p) and self._find_tip(p) is None

    def _pivot(self, c: int) -> Optional[tuple[SparseRow, int]]:
        """(row, valuation) leading at column c, stored or derived from a tip."""
        r = self.rows.get(c)
        if r is not None:
            return r, self.vals[c]
        p = self.idx.path(c)
        if self._visits_dead(p):
            return {c: 1}, 0
        t = self._find_tip(p)
        if t is None:
            return None
        i, ln, k = t
        left, right = p.arrows[:i], p.arrows[i + ln:]
        key, path = self.idx.key, self.idx.path
        row = {key(Path(left + path(q).arrows + right, p.head, p.tail)): x
               for q, x in self.rows[k].items()}
        return row, 0

    def pivot_valuation(self, c: int) -> Optional[int]:
        piv = self._pivot(c)
        return None if piv is None else piv[1]

    @property
    def pivots(self) -> dict[int, SparseRow]:
        return self.rows

    # -- reduction ----------------------------------------------------------------

    def reduce(self, row: SparseRow) -> SparseRow:
        """Canonical remainder of a row."""
        R = self.R
        r = {k: x for k, x in row.items() if x}
        done = {}
        while r:
            c = min(r)
            piv = self._pivot(c)
            if piv is None:
                done[c] = r.pop(c)
                continue
            prow, w = piv
            f = R.shift_down(r[c], w)
            if f:
                r = axpy(R, r, f, prow)
            x = r.pop(c, 0)
            if x:
                done[c] = x
        return done

    def _store(self, c: int, r: SparseRow, v: int, stack: list) -> None:
        self.rows[c] = r
        self.vals[c] = v
        self._pending.append((c, r, -1))
        if v:
            return
        p = self.idx.path(c)
        if p.arrows:
            self.tips[p.arrows] = c
            self.tip_lengths = sorted(set(self.tip_lengths) | {len(p)})
        else:
            self.dead_vertices.add(p.head)
        # rows leading on a path that now contains a tip are re-reduced
        for k in list(self.rows):
            if k == c:
                continue
            q = self.idx.path(k)
            if p.arrows:
                hit = any(q.arrows[i:i + len(p)] == p.arrows for i in range(len(q) - len(p) + 1))
            else:
                hit = self._visits_dead(q)
            if hit:
                if self.vals[k] == 0 and q.arrows:
                    del self.tips[q.arrows]
                stack.append(self.rows.pop(k))
                del self.vals[k]

    def insert(self, row: SparseRow) -> None:
        R = self.R
        stack = [{k: x for k, x in row.items() if x}]
        while stack:
            r = stack.pop()
            while r:
                c = min(r)
                x = r[c]
                v = int(R.valuation(x))
                piv = self._pivot(c)
                if piv is None:
                    r, v = _normalise(R, r, c)
                    self._store(c, r, v, stack)
                    if v > 0:
                        stack.append(scale(R, r, R.pi_power(R.N - v)))
                    break
                prow, w = piv
                if v >= w:
                    r = axpy(R, r, R.shift_down(x, w), prow)
                else:
                    r, v = _normalise(R, r, c)
                    self._store(c, r, v, stack)
                    stack.append(scale(R, r, R.pi_power(R.N - v)))
                    r = axpy(R, prow, R.pi_power(w - v), r)

    # -- saturation ----------------------------------------------------------------

    def _times(self, row: SparseRow, left: tuple, right: tuple, head: int, tail: int) -> SparseRow:
        key, path = self.idx.key, self.idx.path
        return {key(Path(left + path(q).arrows + right, head, tail)): x for q, x in row.items()}

    def _consequences(self, c: int, r: SparseRow, lo: int) -> Iterable[SparseRow]:
        """New ideal elements from one row, with words of length in (lo, bound]."""
        Q, R = self.Q, self.R
        p = self.idx.path(c)
        n = len(p)
        if self.vals[c] > 0:
            if lo < n + 1 <= self.bound:
                for x in Q.arrows_with_tail(p.head):
                    yield self._times(r, (x,), (), Q.arrows[x].head, p.tail)
                for x in Q.arrows_with_head(p.tail):
                    yield self._times(r, (), (x,), p.head, Q.arrows[x].tail)
            return
        if not p.arrows:
            return
        for t, k in list(self.tips.items()):
            yield from self._overlaps(p.arrows, r, t, self.rows[k], lo)
            if k != c:
                yield from self._overlaps(t, self.rows[k], p.arrows, r, lo)

    def _overlaps(self, u, ru, w, rw, lo) -> Iterable[SparseRow]:
        """For u = a s and w = s b, the row ru*b - a*rw."""
        Q, R = self.Q, self.R
        for k in range(1, min(len(u), len(w))):
            total = len(u) + len(w) - k
            if total > self.bound or total <= lo:
                continue
            if u[len(u) - k:] != w[:k]:
                continue
            a, b = u[:len(u) - k], w[k:]
            head, tail = Q.arrows[u[0]].head, Q.arrows[w[-1]].tail
            s = self._times(ru, (), b, head, tail)
            yield axpy(R, s, 1, self._times(rw, a, (), head, tail))

    def saturate(self, bound: int) -> None:
        lo, self.bound = self.bound, bound
        key = self.idx.key
        for g in self.pres.generators:
            if lo < g.degree_window()[1] <= bound:
                self.insert({key(p): x for p, x in g.terms.items()})
        if lo >= 0:
            self._pending.extend((c, r, lo) for c, r in self.rows.items())
        while self._pending:
            c, r, since = self._pending.pop()
            if self.rows.get(c) is not r:
                continue
            for s in list(self._consequences(c, r, since)):
                self.insert(s)
        for c in sorted(self.rows):
            r = self.rows[c]
            rest = self.reduce({k: x for k, x in r.items() if k != c})
            rest[c] = r[c]
            self.rows[c] = rest

    def restricted_key(self, lim: int) -> tuple:
        return tuple((c, tuple(sorted(self.rows[c].items()))) for c in sorted(self.rows) if c >= lim)

    def first_normal_path(self, n: int) -> Optional[Path]:
        """The first normal path of length n in canonical order, by depth-first
        search (a subword of a normal path is normal)."""
        Q = self.Q
        dead = self.dead_vertices
        if n == 0:
            return next((Q.trivial(v) for v in range(Q.num_vertices) if v not in dead), None)
        by_head = [[i for i, a in enumerate(Q.arrows) if a.head == v] for v in range(Q.num_vertices)]
        tips, lengths = self.tips, self.tip_lengths

        def extend(arr: tuple) -> Optional[tuple]:
            if len(arr) == n:
                return arr
            nxt = by_head[Q.arrows[arr[-1]].tail] if arr else range(Q.num_arrows)
            for x in nxt:
                a = Q.arrows[x]
                if a.head in dead or a.tail in dead:
                    continue
                w = arr + (x,)
                if any(w[len(w) - ln:] in tips for ln in lengths if ln <= len(w)):
                    continue
                found = extend(w)
                if found:
                    return found
            return None

        arr = extend(())
        return None if arr is None else Q.path(arr)

    def normal_paths(self, n: int) -> list[Path]:
        """Normal paths of length <= n in canonical order."""
        Q = self.Q
        dead = self.dead_vertices
        level = [Q.trivial(v) for v in range(Q.num_vertices) if v not in dead]
        out = list(level)
        for k in range(1, n + 1):
            nxt = []
            for w in level:
                for x in Q.arrows_with_tail(w.head):
                    if Q.arrows[x].head in dead:
                        continue
                    arr = (x,) + w.arrows
                    if any(arr[:ln] in self.tips for ln in self.tip_lengths if ln <= k):
                        continue
                    nxt.append(Path(arr, Q.arrows[x].head, w.tail))
            nxt.sort(key=Path.sort_key)
            level = nxt
            out += level
        return out


class _Elimination:
    """The plain construction: every p*g*q with support length <= bound is a
    row over all paths, eliminated in a single Howell form.

    Same interface as :class:`_Rewriter`; exponential in the bound on wide
    quivers, kept as an independent second route.
    """

    def __init__(self, pres: Presentation, index: _PathIndex):
        self.pres = pres
        self.Q: Quiver = pres.quiver
        self.idx = index
        self.h = Howell(pres.ring)
        self.bound = -1

    def _rows(self, lo: int, hi: int) -> Iterable[SparseRow]:
        Q, key = self.Q, self.idx.key
        by_tail: dict[int, list[Path]] = {}
        by_head: dict[int, list[Path]] = {}
        for p in Q.paths(hi):
            by_tail.setdefault(p.tail, []).append(p)
            by_head.setdefault(p.head, []).append(p)
        for g in self.pres.generators:
            terms = list(g.terms.items())
            h, t = terms[0][0].head, terms[0][0].tail
            d = g.degree_window()[1]
            for p in by_tail.get(h, []):
                if len(p) + d > hi:
                    break
                for q in by_head.get(t, []):
                    top = len(p) + len(q) + d
                    if top > hi:
                        break
                    if top <= lo:
                        continue
                    yield {key(Q.compose(Q.compose(p, w), q)): c for w, c in terms}

    def saturate(self, bound: int) -> None:
        lo, self.bound = self.bound, bound
        self.h.extend(self._rows(lo, bound))
        self.h.reduce_above()

    def reduce(self, row: SparseRow) -> SparseRow:
        return self.h.reduce(row)[0]

    def pivot_valuation(self, c: int) -> Optional[int]:
        return self.h.pivot_valuation(c)

    @property
    def pivots(self) -> dict[int, SparseRow]:
        return self.h.pivots

    def restricted_key(self, lim: int) -> tuple:
        h = self.h
        return tuple((c, tuple(sorted(h.pivots[c].items()))) for c in sorted(h.pivots) if c >= lim)

    def first_normal_path(self, n: int) -> Optional[Path]:
        return next((p for p in self.Q.paths_of_length(n)
                     if self.h.pivot_valuation(self.idx.key(p)) != 0), None)

    def normal_paths(self, n: int) -> list[Path]:
        return [p for p in self.Q.paths(n) if self.h.pivot_valuation(self.idx.key(p)) != 0]


ENGINES = {"rewrite": _Rewriter, "eliminate": _Elimination}


class TruncatedAlgebra:
    """The algebra Lambda/pi^N Lambda with certified degree window ``L``.

    Use :func:`build` to construct one.
    """

    def __init__(self, pres: Presentation, L: int, W: int, system, index: _PathIndex,
                 stable: bool, closed: bool, engine: str = "rewrite"):
        self.presentation = pres
        self.ring: ChainRing = pres.ring
        self.quiver: Quiver = pres.quiver
        self.N = self.ring.precision
        self.L = L
        self.W = W
        self._sys = system
        self._idx = index
        self.engine = engine
        self.stable = stable
        self.closed = closed
        self._cache: dict = {}
        R = self.ring
        lim = index.min_key(L)
        basis, exps, torsion = [], {}, []
        for p in system.normal_paths(L):
            k = index.key(p)
            v = system.pivot_valuation(k)
            if v is None:
                basis.append(p)
                exps[p] = self.N
            elif v > 0:
                basis.append(p)
                exps[p] = v
                torsion.append(system.pivots[k])
        self.nf_basis: list[Path] = basis
        self.torsion_exponents: dict[Path, int] = exps
        self.basis_keys: list[int] = [index.key(p) for p in basis]
        self._basis_set = set(self.basis_keys)
        self.torsion_rows: list[SparseRow] = torsion
        self._zero_module = howell_of(R, torsion)
        assert all(min(r) >= lim for r in torsion)

    # -- descriptors -------------------------------------------------------------------

    @property
    def closure_certificate(self) -> bool:
        return self.stable and self.closed

    def certification(self) -> dict:
        return {"precision": self.N, "window": self.L, "elimination_bound": self.W,
                "ring": self.ring.describe()}

    def key(self, p: Path) -> int:
        return self._idx.key(p)

    def path_of(self, key: int) -> Path:
        return self._idx.path(key)

    def basis_index(self) -> dict[int, int]:
        return {k: i for i, k in enumerate(self.basis_keys)}

    def rank_profile(self) -> list[int]:
        """Exponents d_i with Lambda isomorphic to the sum of R/pi^d_i."""
        vals = elementary_valuations(self.ring, self.torsion_rows)
        n_free = len(self.nf_basis) - len(vals)
        exps = [v for v in vals if v > 0] + [self.N] * n_free
        return sorted(exps, reverse=True)

    def length(self) -> int:
        """Composition length of Lambda, i.e. its dimension over the residue field."""
        return sum(self.rank_profile())

    def free_rank(self) -> int:
        return sum(1 for d in self.rank_profile() if d == self.N)

    # -- reduction ---------------------------------------------------------------------

    def reduce(self, vec: Vec) -> Vec:
        """Canonical representative of a vector supported in degree <= L + 1."""
        return self._sys.reduce(vec)

    def _nf_short_path(self, p: Path) -> Vec:
        c = self._cache.setdefault("nfp", {})
        v = c.get(p)
        if v is None:
            v = self.reduce({self.key(p): 1})
            c[p] = v
        return v

    @cached_property
    def _left_table(self) -> list[dict[int, Vec]]:
        Q = self.quiver
        out = []
        for i in range(Q.num_arrows):
            a = Q.arrow_path(i)
            row = {}
            for b in self.nf_basis:
                ab = Q.compose(a, b)
                if ab is not None:
                    row[self.key(b)] = self._nf_short_path(ab)
            out.append(row)
        return out

    @cached_property
    def _right_table(self) -> list[dict[int, Vec]]:
        Q = self.quiver
        out = []
        for i in range(Q.num_arrows):
            a = Q.arrow_path(i)
            row = {}
            for b in self.nf_basis:
                ba = Q.compose(b, a)
                if ba is not None:
                    row[self.key(b)] = self._nf_short_path(ba)
            out.append(row)
        return out

    def _combine(self, parts: Iterable[tuple[int, Vec]]) -> Vec:
        R = self.ring
        acc: Vec = {}
        for c, v in parts:
            if c == 0:
                continue
            for k, x in v.items():
                z = R.add(acc.get(k, 0), R.mul(c, x))
                if z:
                    acc[k] = z
                else:
                    acc.pop(k, None)
        return self.reduce(acc)

    def left_arrow_action(self, arrow: int, vec: Vec) -> Vec:
        tab = self._left_table[arrow]
        return self._combine((c, tab[k]) for k, c in vec.items() if k in tab)

    def right_arrow_action(self, vec: Vec, arrow: int) -> Vec:
        tab = self._right_table[arrow]
        return self._combine((c, tab[k]) for k, c in vec.items() if k in tab)

    def _vertex_left(self, v: int, vec: Vec) -> Vec:
        return {k: c for k, c in vec.items() if self.path_of(k).head == v}

    def _vertex_right(self, vec: Vec, v: int) -> Vec:
        return {k: c for k, c in vec.items() if self.path_of(k).tail == v}

    def path_times(self, p: Path, vec: Vec) -> Vec:
        """Normal form of p * vec."""
        out = self._vertex_left(p.tail, vec)
        for a in reversed(p.arrows):
            if not out:
                break
            out = self.left_arrow_action(a, out)
        return out

    def times_path(self, vec: Vec, p: Path) -> Vec:
        """Normal form of vec * p."""
        out = self._vertex_right(vec, p.head)
        for a in p.arrows:
            if not out:
                break
            out = self.right_arrow_action(out, a)
        return out

    def nf_path(self, p: Path) -> Vec:
        if len(p) <= self.L + 1:
            return self._nf_short_path(p)
        c = self._cache.setdefault("nfp", {})
        v = c.get(p)
        if v is None:
            head, tail = p.arrows[:-(self.L)], p.arrows[-(self.L):]
            v = self._nf_short_path(self.quiver.path(tail))
            for a in reversed(head):
                v = self.left_arrow_action(a, v)
            c[p] = v
        return v

    def vec_of(self, x: AlgElem) -> Vec:
        """Normal form vector of an element of RQ."""
        return self._combine((c, self.nf_path(p)) for p, c in x.terms.items())

    def elem_of(self, vec: Vec) -> AlgElem:
        return AlgElem(self.ring, self.quiver, {self.path_of(k): c for k, c in vec.items()})

    def mul(self, x: Vec, y: Vec) -> Vec:
        return self._combine((c, self.path_times(self.path_of(k), y)) for k, c in x.items())

    def add(self, x: Vec, y: Vec) -> Vec:
        return self._combine([(1, x), (1, y)])

    def scale(self, r: int, x: Vec) -> Vec:
        return self._combine([(r, x)])

    def basis_vec(self, p: Path) -> Vec:
        return self.nf_path(p)

    def pi_vec(self) -> Vec:
        return self._combine((self.ring.pi, self.nf_path(self.quiver.trivial(v)))
                             for v in range(self.quiver.num_vertices))

    def one_vec(self) -> Vec:
        return self._combine((1, self.nf_path(self.quiver.trivial(v)))
                             for v in range(self.quiver.num_vertices))

    # -- the public queries ------------------------------------------------------------

    def normal_form(self, x: AlgElem) -> AlgElem:
        return self.elem_of(self.vec_of(x))

    def is_member(self, x: AlgElem) -> bool:
        return not self.vec_of(x)

    def path_is_zero(self, p: Path) -> bool:
        return not self.nf_path(p)

    # -- submodules --------------------------------------------------------------------

    def span(self, vecs: Iterable[Vec]) -> "Submodule":
        """R-submodule spanned by the given elements."""
        return Submodule(self, vecs)

    def zero_module(self) -> "Submodule":
        return Submodule(self, [])

    def whole(self) -> "Submodule":
        return self.span(self.nf_path(b) for b in self.nf_basis)

    def left_ideal(self, gens: Sequence[Vec]) -> "Submodule":
        return self.span(self.mul(self.nf_path(b), g) for g in gens for b in self.nf_basis)

    def right_ideal(self, gens: Sequence[Vec]) -> "Submodule":
        return self.span(self.mul(g, self.nf_path(b)) for g in gens for b in self.nf_basis)

    def two_sided_ideal(self, gens: Sequence[Vec]) -> "Submodule":
        left = [self.mul(self.nf_path(b), g) for g in gens for b in self.nf_basis]
        return self.span(self.mul(x, self.nf_path(c)) for x in left for c in self.nf_basis)

    def submodule(self, side: str, gens: Sequence[AlgElem]) -> "Submodule":
        """Left (``Lambda g``) or right (``g Lambda``) submodule generated by gens.

        Right submodules are computed in the opposite algebra, so the result
        lives in that algebra's coordinates.
        """
        if side == "left":
            return self.left_ideal([self.vec_of(g) for g in gens])
        if side == "right":
            op = self.opposite_algebra()
            Qop = op.quiver
            return op.left_ideal([op.vec_of(g.reversed(Qop)) for g in gens])
        raise ValueError("side must be 'left' or 'right'")

    def left_module(self, paths: Sequence[Path]) -> "Submodule":
        return self.left_ideal([self.nf_path(p) for p in paths])

    def product(self, a: "Submodule", b: "Submodule") -> "Submodule":
        """R-span of all products x*y."""
        ra, rb = a.generators(), b.generators()
        return self.span(self.mul(x, y) for x in ra for y in rb)

    # -- radical candidate -------------------------------------------------------------

    @cached_property
    def radical_candidate(self) -> "Submodule":
        """The two-sided ideal J0 generated by the arrows and pi."""
        R, Q = self.ring, self.quiver
        gens = [self.scale(R.pi, self.nf_path(b)) for b in self.nf_basis]
        for i in range(Q.num_arrows):
            a = Q.arrow_path(i)
            for c in self.nf_basis:
                ac = Q.compose(a, c)
                if ac is None:
                    continue
                v = self.nf_path(ac)
                for b in self.nf_basis:
                    if b.tail == a.head:
                        gens.append(self.path_times(b, v))
        return self.span(gens)

    def radical_power(self, k: int) -> "Submodule":
        c = self._cache.setdefault("jpow", {})
        if k in c:
            return c[k]
        if k <= 0:
            m = self.whole()
        elif k == 1:
            m = self.radical_candidate
        else:
            m = self.product(self.radical_power(k - 1), self.radical_candidate)
        c[k] = m
        return m

    @cached_property
    def nilpotency_index(self) -> Optional[int]:
        """First k with J0^k = 0, or None when the powers stabilise above zero."""
        prev = None
        k = 1
        while True:
            m = self.radical_power(k)
            if m.is_zero():
                return k
            if prev is not None and m == prev:
                return None
            prev = m
            k += 1

    # -- opposite and lifts ------------------------------------------------------------

    def opposite_algebra(self) -> "TruncatedAlgebra":
        op = self._cache.get("op")
        if op is None:
            op = build(opposite(self.presentation), engine=self.engine)
            self._cache["op"] = op
        return op

    def lifted(self, extra: Optional[int] = None) -> "TruncatedAlgebra":
        """The same presentation built at precision N + extra (default L + 1).

        A path outside the ideal at a higher precision lies outside the ideal
        over the untruncated ring; this is how admissibility is certified.
        """
        if self.ring.kind == "field":
            return self
        extra = self.L + 1 if extra is None else extra
        n = self.N + extra
        c = self._cache.setdefault("lift", {})
        if n not in c:
            try:
                c[n] = build(self.presentation.with_precision(n), engine=self.engine)
            except NotFiniteAtPrecision:
                c[n] = self
        return c[n]

    def is_admissible(self, p: Path, extra: Optional[int] = None) -> bool:
        """``p`` is not in I, certified by a precision lift."""
        if extra is None and len(p) > self.L + 1:
            extra = len(p) + 1
        return not self.lifted(extra).path_is_zero(p)


class Submodule:
    """An R-submodule of a truncated algebra, stored with the torsion rows."""

    def __init__(self, algebra: TruncatedAlgebra, vecs: Iterable[Vec]):
        self.algebra = algebra
        h = algebra._zero_module.copy()
        for v in vecs:
            if v:
                h.insert(v)
        h.reduce_above()
        self._h = h
        self._key = h.key()

    def __eq__(self, other) -> bool:
        return isinstance(other, Submodule) and other.algebra is self.algebra and self._key == other._key

    def __hash__(self) -> int:
        return hash(self._key)

    def generators(self) -> list[Vec]:
        return self._h.rows()

    def is_zero(self) -> bool:
        return self._key == self.algebra._zero_module.key()

    def contains_vec(self, v: Vec) -> bool:
        return self._h.contains(v)

    def contains(self, other: "Submodule") -> bool:
        return all(self._h.contains(r) for r in other.generators())

    def __le__(self, other: "Submodule") -> bool:
        return other.contains(self)

    def __lt__(self, other: "Submodule") -> bool:
        return other.contains(self) and self != other

    def __add__(self, other: "Submodule") -> "Submodule":
        return Submodule(self.algebra, self.generators() + other.generators())

    def intersect(self, other: "Submodule") -> "Submodule":
        rows = sparse_intersection(self.algebra.ring, self.generators(), other.generators())
        return Submodule(self.algebra, rows)

    def length(self) -> int:
        """Composition length of this submodule of Lambda."""
        R = self.algebra.ring
        return sum(torsion_exponents(R, self.generators())) - \
            sum(torsion_exponents(R, self.algebra.torsion_rows))

    def project(self, head: int, tail: int) -> "Submodule":
        """The piece e_head * M * e_tail (meaningful for sub-bimodules)."""
        A = self.algebra
        rows = []
        for r in self.generators():
            rows.append({k: c for k, c in r.items()
                         if A.path_of(k).head == head and A.path_of(k).tail == tail})
        return Submodule(A, rows)

    def nonzero_witness(self) -> Optional[Vec]:
        """Some element outside the torsion rows, or None for the zero module."""
        z = self.algebra._zero_module
        for r in self.generators():
            rem, _ = z.reduce(r)
            if rem:
                return rem
        return None

    def as_rowmodule(self) -> RowModule:
        """The lifted module as a RowModule over the normal-form basis coordinates."""
        idx = self.algebra.basis_index()
        rows = [{idx[k]: x for k, x in r.items()} for r in self.generators()]
        return RowModule.from_sparse(self.algebra.ring, len(idx), rows)


# -- construction ----------------------------------------------------------------------


def _attempt(pres: Presentation, L: int, slack: int, engine: str) -> TruncatedAlgebra:
    idx = _PathIndex(pres.quiver)
    W = L + slack
    system = ENGINES[engine](pres, idx)
    system.saturate(W)
    still_normal = system.first_normal_path(L + 1)
    if still_normal is not None:
        raise _NotClosed("open", still_normal)
    lim = idx.min_key(L + 1)
    before = system.restricted_key(lim)
    system.saturate(W + 2)
    if system.restricted_key(lim) != before:
        raise _NotClosed("unstable")
    return TruncatedAlgebra(pres, L, W + 2, system, idx, True, True, engine)


def build(pres: Presentation, max_L: Optional[int] = None, slack: int = 2,
          L: Optional[int] = None, engine: str = "rewrite") -> TruncatedAlgebra:
    """Build the truncated model of ``pres``.

    ``engine`` is ``"rewrite"`` (the reduction system, default) or
    ``"eliminate"`` (one Howell form over all paths up to the bound); both
    certify the same way and give identical models.

    Raises:
        NotFiniteAtPrecision: when no window up to ``max_L`` both closes and
            stabilises; the message names the first path that does not reduce.
    """
    if pres.quiver.num_vertices == 0:
        raise EmptyQuiver("the quiver has no vertices")
    if engine not in ENGINES:
        raise ValueError(f"unknown engine {engine!r}")
    d = pres.max_degree()
    cur = L if L is not None else 2 * d
    cap = max_L if max_L is not None else max(4 * pres.ring.precision * d, cur)
    cur = min(cur, cap)
    while True:
        try:
            return _attempt(pres, cur, slack, engine)
        except _NotClosed as exc:
            if cur >= cap:
                where = pres.quiver.render_path(exc.path) if exc.path is not None else None
                if exc.reason == "open":
                    msg = (f"path {where} does not reduce below length {cur + 1} "
                           f"at precision {pres.ring.precision} (window cap {cap})")
                else:
                    msg = f"ideal does not stabilise within window {cur} (cap {cap})"
                raise NotFiniteAtPrecision(msg, where) from None
            cur = min(2 * cur, cap)


def opposite(pres: Presentation) -> Presentation:
    return pres.opposite()


def normal_form(A: TruncatedAlgebra, x: AlgElem) -> AlgElem:
    return A.normal_form(x)


def is_member(A: TruncatedAlgebra, x: AlgElem) -> bool:
    return A.is_member(x)


def submodule(A: TruncatedAlgebra, side: str, generators: Sequence[AlgElem]) -> Submodule:
    return A.submodule(side, generators)


def radical_candidate(A: TruncatedAlgebra) -> tuple[Submodule, Optional[int]]:
    return A.radical_candidate, A.nilpotency_index
