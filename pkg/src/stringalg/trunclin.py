"""Linear algebra over finite chain rings.

Submodules of R^n (R a chain ring) are kept in Howell form: an echelon basis
whose pivots are powers of pi, closed under the "pi-shift" rows that make
membership testing work over rings with zero divisors, and with entries above
each pivot reduced to canonical residues.  Two generating sets span the same
module exactly when their Howell forms coincide.

The engine works on sparse rows (``dict`` from column key to ring code); the
column keys only need to be orderable, and the leading column of a row is its
smallest key.  :class:`RowModule` is the dense public wrapper.
"""

from __future__ import annotations

import heapq
from typing import Hashable, Iterable, Optional, Sequence

from .chainring import INF, ChainRing


class DimensionMismatch(ValueError):
    pass


SparseRow = dict


def axpy(ring: ChainRing, row: SparseRow, f: int, other: SparseRow) -> SparseRow:
    """Return row - f * other."""
    if f == 0:
        return row
    out = dict(row)
    mul, sub = ring.mul, ring.sub
    for k, y in other.items():
        z = sub(out.get(k, 0), mul(f, y))
        if z:
            out[k] = z
        else:
            out.pop(k, None)
    return out


def scale(ring: ChainRing, row: SparseRow, f: int) -> SparseRow:
    out = {}
    for k, y in row.items():
        z = ring.mul(f, y)
        if z:
            out[k] = z
    return out


def add_rows(ring: ChainRing, row: SparseRow, other: SparseRow, f: int = 1) -> SparseRow:
    """Return row + f * other."""
    return axpy(ring, row, ring.neg(f), other)


class Howell:
    """Incremental Howell form over a chain ring.

    ``pivots`` maps a leading column to the unique basis row leading there.
    Rows are normalised so that the leading entry is exactly ``pi**v``.
    """

    def __init__(self, ring: ChainRing):
        self.ring = ring
        self.pivots: dict[Hashable, SparseRow] = {}
        self._reduced = True

    def copy(self) -> "Howell":
        h = Howell(self.ring)
        h.pivots = {k: dict(r) for k, r in self.pivots.items()}
        h._reduced = self._reduced
        return h

    def pivot_valuation(self, col) -> Optional[int]:
        r = self.pivots.get(col)
        return None if r is None else int(self.ring.valuation(r[col]))

    def _normalise(self, row: SparseRow, col) -> tuple[SparseRow, int]:
        R = self.ring
        x = row[col]
        v = int(R.valuation(x))
        row = scale(R, row, R.inv(R.shift_down(x, v)))
        row[col] = R.pi_power(v)
        return row, v

    def insert(self, row: SparseRow) -> bool:
        """Add a row to the span; return True when the span grew."""
        R = self.ring
        grew = False
        stack = [{k: x for k, x in row.items() if x}]
        while stack:
            r = stack.pop()
            while r:
                c = min(r)
                x = r[c]
                piv = self.pivots.get(c)
                v = int(R.valuation(x))
                if piv is None:
                    r, v = self._normalise(r, c)
                    self.pivots[c] = r
                    grew = True
                    self._reduced = False
                    if v > 0:
                        stack.append(scale(R, r, R.pi_power(R.N - v)))
                    break
                w = int(R.valuation(piv[c]))
                if v >= w:
                    r = axpy(R, r, R.shift_down(x, w), piv)
                else:
                    r, v = self._normalise(r, c)
                    self.pivots[c] = r
                    grew = True
                    self._reduced = False
                    stack.append(scale(R, r, R.pi_power(R.N - v)))
                    r = axpy(R, piv, R.pi_power(w - v), r)
        return grew

    def extend(self, rows: Iterable[SparseRow]) -> bool:
        grew = False
        for r in rows:
            grew |= self.insert(r)
        return grew

    def reduce_above(self) -> None:
        """Reduce every entry sitting above a pivot to its canonical residue."""
        if self._reduced:
            return
        R = self.ring
        piv = self.pivots
        vals = {c: int(R.valuation(r[c])) for c, r in piv.items()}
        for c2 in sorted(piv):
            r = piv[c2]
            todo = sorted(c for c in r if c != c2 and c in piv)
            if not todo:
                continue
            heapq.heapify(todo)
            seen = set(todo)
            while todo:
                c = heapq.heappop(todo)
                x = r.get(c)
                if not x:
                    continue
                f = R.shift_down(x, vals[c])
                if not f:
                    continue
                r = axpy(R, r, f, piv[c])
                for k in piv[c]:
                    if k > c and k in piv and k not in seen:
                        seen.add(k)
                        heapq.heappush(todo, k)
            piv[c2] = r
        self._reduced = True

    def rows(self) -> list[SparseRow]:
        self.reduce_above()
        return [self.pivots[c] for c in sorted(self.pivots)]

    def reduce(self, row: SparseRow) -> tuple[SparseRow, dict]:
        """Reduce a row against the form.

        Returns ``(remainder, coefficients)`` where ``row = remainder +
        sum coefficients[c] * pivots[c]``.  The remainder is canonical: equal
        cosets give equal remainders once :meth:`reduce_above` has run.
        """
        R = self.ring
        r = {k: x for k, x in row.items() if x}
        coeffs = {}
        done = {}
        while r:
            c = min(r)
            x = r[c]
            piv = self.pivots.get(c)
            if piv is None:
                done[c] = r.pop(c)
                continue
            w = int(R.valuation(piv[c]))
            f = R.shift_down(x, w)
            if f:
                r = axpy(R, r, f, piv)
                coeffs[c] = R.add(coeffs.get(c, 0), f)
            x = r.pop(c, 0)
            if x:
                done[c] = x
        return done, coeffs

    def contains(self, row: SparseRow) -> bool:
        rem, _ = self.reduce(row)
        return not rem

    def contains_all(self, other: "Howell") -> bool:
        return all(self.contains(r) for r in other.pivots.values())

    def key(self) -> tuple:
        """Hashable canonical fingerprint of the module."""
        return tuple((c, tuple(sorted(r.items()))) for c, r in
                     ((c, self.pivots[c]) for c in sorted(self.pivots)))

    def canonical_key(self) -> tuple:
        self.reduce_above()
        return self.key()


def howell_of(ring: ChainRing, rows: Iterable[SparseRow]) -> Howell:
    h = Howell(ring)
    h.extend(rows)
    h.reduce_above()
    return h


def elementary_valuations(ring: ChainRing, rows: Iterable[SparseRow]) -> list[int]:
    """Valuations of the Smith diagonal of a sparse matrix (zeros omitted).

    Row and column operations over a chain ring bring any matrix to a diagonal
    of powers of pi; the row span is then isomorphic to the sum of R/pi^(N-v).
    """
    R = ring
    work = [dict(r) for r in rows if r]
    out = []
    while True:
        work = [r for r in work if r]
        if not work:
            break
        best = None
        for i, r in enumerate(work):
            for c, x in r.items():
                v = R.valuation(x)
                if best is None or v < best[0]:
                    best = (v, i, c)
                    if v == 0:
                        break
            if best is not None and best[0] == 0:
                break
        v, i, c = best
        v = int(v)
        piv = work.pop(i)
        piv = scale(R, piv, R.inv(R.shift_down(piv[c], v)))
        piv[c] = R.pi_power(v)
        nxt = []
        for r in work:
            x = r.get(c)
            if x:
                r = axpy(R, r, R.shift_down(x, v), piv)
            # the column operations clearing the rest of the pivot row only
            # touch the pivot row, so dropping it here is enough
            nxt.append(r)
        work = nxt
        out.append(v)
    return sorted(out)


def torsion_exponents(ring: ChainRing, rows: Iterable[SparseRow]) -> list[int]:
    """Exponents d_i (descending) with span(rows) isomorphic to sum R/pi^d_i."""
    return sorted((ring.N - v for v in elementary_valuations(ring, rows)), reverse=True)


def module_length(ring: ChainRing, rows: Iterable[SparseRow]) -> int:
    """Composition length of the row span (its dimension over the residue field)."""
    return sum(torsion_exponents(ring, rows))


def sparse_kernel(ring: ChainRing, rows: Sequence[SparseRow]) -> list[SparseRow]:
    """Howell rows of {x : sum x_i rows[i] = 0}, with x indexed by row position."""
    aug = []
    for i, r in enumerate(rows):
        row = {(0, k): x for k, x in r.items()}
        row[(1, i)] = 1
        aug.append(row)
    h = howell_of(ring, aug)
    out = []
    for r in h.rows():
        if min(r)[0] == 1:
            out.append({k[1]: x for k, x in r.items()})
    return out


def sparse_intersection(ring: ChainRing, a: Sequence[SparseRow], b: Sequence[SparseRow]) -> list[SparseRow]:
    """Howell rows of span(a) meet span(b)."""
    aug = []
    for r in a:
        row = {(0, k): x for k, x in r.items()}
        row.update({(1, k): x for k, x in r.items()})
        aug.append(row)
    for r in b:
        aug.append({(0, k): x for k, x in r.items()})
    h = howell_of(ring, aug)
    out = []
    for r in h.rows():
        if min(r)[0] == 1:
            out.append({k[1]: x for k, x in r.items()})
    return howell_of(ring, out).rows()


# -- dense public API ---------------------------------------------------------------


def _to_sparse(ring: ChainRing, row: Sequence[int], n: int) -> SparseRow:
    if len(row) != n:
        raise DimensionMismatch(f"expected length {n}, got {len(row)}")
    return {i: ring.from_int(x) if ring.kind == "padic" else x
            for i, x in enumerate(row) if x}


def _to_dense(row: SparseRow, n: int) -> tuple[int, ...]:
    out = [0] * n
    for k, x in row.items():
        out[k] = x
    return tuple(out)


class RowModule:
    """A submodule of R^n stored in Howell form.

    Attributes:
        ring: coefficient ring.
        n: ambient dimension.
        rows: canonical basis rows (dense tuples of ring codes).
        pivots: ``(column, valuation)`` for each row.
    """

    def __init__(self, ring: ChainRing, n: int, howell: Howell):
        self.ring = ring
        self.n = n
        self._h = howell
        sparse = howell.rows()
        self.rows: tuple[tuple[int, ...], ...] = tuple(_to_dense(r, n) for r in sparse)
        self.pivots: tuple[tuple[int, int], ...] = tuple(
            (min(r), int(ring.valuation(r[min(r)]))) for r in sparse)

    @classmethod
    def from_rows(cls, ring: ChainRing, rows: Iterable[Sequence[int]], n: Optional[int] = None) -> "RowModule":
        rows = [tuple(r) for r in rows]
        if n is None:
            if not rows:
                raise DimensionMismatch("ambient dimension needed for an empty generating set")
            n = len(rows[0])
        sparse = [_to_sparse(ring, r, n) for r in rows]
        return cls(ring, n, howell_of(ring, sparse))

    @classmethod
    def from_sparse(cls, ring: ChainRing, n: int, rows: Iterable[SparseRow]) -> "RowModule":
        return cls(ring, n, howell_of(ring, rows))

    def sparse_rows(self) -> list[SparseRow]:
        return self._h.rows()

    def __eq__(self, other) -> bool:
        return (isinstance(other, RowModule) and self.ring == other.ring
                and self.n == other.n and self.rows == other.rows)

    def __hash__(self) -> int:
        return hash((self.n, self.rows))

    def __repr__(self) -> str:
        return f"RowModule(n={self.n}, rows={list(self.rows)})"

    def is_zero(self) -> bool:
        return not self.rows

    def member(self, v: Sequence[int]) -> tuple[bool, Optional[tuple[int, ...]]]:
        """Membership test with a witness: coefficients on ``rows`` when true."""
        sv = _to_sparse(self.ring, v, self.n)
        rem, coeffs = self._h.reduce(sv)
        if rem:
            return False, None
        order = [c for c, _ in self.pivots]
        return True, tuple(coeffs.get(c, 0) for c in order)

    def __contains__(self, v) -> bool:
        return self.member(v)[0]

    def contains(self, other: "RowModule") -> bool:
        self._check(other)
        return all(self._h.contains(r) for r in other.sparse_rows())

    def _check(self, other: "RowModule") -> None:
        if other.n != self.n:
            raise DimensionMismatch(f"ambient dimensions {self.n} and {other.n}")

    def rank_profile(self) -> list[int]:
        return torsion_exponents(self.ring, self.sparse_rows())

    def length(self) -> int:
        return sum(self.rank_profile())

    def __add__(self, other: "RowModule") -> "RowModule":
        self._check(other)
        return RowModule.from_sparse(self.ring, self.n, self.sparse_rows() + other.sparse_rows())


def canonical_form(ring: ChainRing, rows: Iterable[Sequence[int]], n: Optional[int] = None) -> RowModule:
    return RowModule.from_rows(ring, rows, n)


def member(m: RowModule, v: Sequence[int]) -> tuple[bool, Optional[tuple[int, ...]]]:
    return m.member(v)


def kernel(ring: ChainRing, matrix: Sequence[Sequence[int]], ncols: Optional[int] = None) -> RowModule:
    """Left kernel {x : x M = 0} of an m-by-n matrix."""
    matrix = [tuple(r) for r in matrix]
    m = len(matrix)
    if m == 0:
        return RowModule.from_rows(ring, [], 0)
    n = len(matrix[0]) if ncols is None else ncols
    sparse = [_to_sparse(ring, r, n) for r in matrix]
    return RowModule.from_sparse(ring, m, sparse_kernel(ring, sparse))


def intersect(m1: RowModule, m2: RowModule) -> RowModule:
    m1._check(m2)
    return RowModule.from_sparse(m1.ring, m1.n,
                                 sparse_intersection(m1.ring, m1.sparse_rows(), m2.sparse_rows()))


def rank_profile(m: RowModule) -> list[int]:
    return m.rank_profile()
