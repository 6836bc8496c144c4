"""Pattern matrix orders and homomorphisms from a truncated algebra into them.

An order is a product of blocks.  A block of size n has an exponent matrix e
and consists of the matrices (r_ij) with r_ij divisible by pi^e_ij.  Elements
are stored in pattern coordinates s_ij, where r_ij = pi^e_ij * s_ij, so that
Gamma / pi^N Gamma is exactly the free module on the coordinates over R/pi^N.
Block kinds: "H" (e_ij = 1 above the diagonal, 0 elsewhere), "M" (all 0) and
"pattern" (explicit exponents).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .axioms import FAILS, HOLDS, Verdict
from .chainring import ChainRing
from .freealg import AlgElem, ElementSyntaxError, Presentation, parse_pi_polynomial
from .quiver import Path, Quiver
from .quotient import TruncatedAlgebra
from .trunclin import RowModule, sparse_kernel

Mat = list  # dense list of ring codes over all pattern coordinates


class OrderError(ValueError):
    pass


class UnsupportedPattern(OrderError):
    pass


class PatternViolation(OrderError):
    pass


class IncompleteAssignment(OrderError):
    pass


class GeneratorNotInKernel(OrderError):
    def __init__(self, message: str, witness: str):
        super().__init__(message)
        self.witness = witness


class RankDeficit(OrderError):
    def __init__(self, message: str, witness: str):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class Block:
    kind: str
    size: int
    exponents: tuple[tuple[int, ...], ...]

    @classmethod
    def make(cls, kind: str, size: int, exponents: Optional[Sequence[Sequence[int]]] = None) -> "Block":
        if size < 1:
            raise OrderError("block size must be positive")
        if kind == "H":
            ex = tuple(tuple(1 if i < j else 0 for j in range(size)) for i in range(size))
        elif kind == "M":
            ex = tuple(tuple(0 for _ in range(size)) for _ in range(size))
        elif kind == "pattern":
            if exponents is None:
                raise OrderError("a pattern block needs an exponent matrix")
            ex = tuple(tuple(int(x) for x in row) for row in exponents)
            if len(ex) != size or any(len(r) != size for r in ex):
                raise OrderError("exponent matrix does not match the block size")
        else:
            raise OrderError(f"unknown block type {kind!r}")
        return cls(kind, size, ex)


class OrderPattern:
    """A product of pattern blocks over a chain ring, with optional congruences.

    The congruences ``entry(left) - entry(right) in pi^k`` (in pattern
    coordinates) describe a subring; the blocks alone describe the ambient
    order.
    """

    def __init__(self, ring: ChainRing, blocks: Sequence[Block],
                 congruences: Sequence[tuple[tuple[int, int, int], tuple[int, int, int], int]] = ()):
        self.ring = ring
        self.blocks = list(blocks)
        self.offsets = []
        off = 0
        for b in self.blocks:
            self.offsets.append(off)
            off += b.size * b.size
        self.dim = off
        self.source: Optional[dict] = None
        self.congruences = []
        for left, right, k in congruences:
            self.congruences.append((self.coord(*left), self.coord(*right), int(k)))
        bad = self.closure_violation()
        if bad:
            raise OrderError(bad)

    # -- coordinates --------------------------------------------------------------------

    def coord(self, block: int, i: int, j: int) -> int:
        """Coordinate index of entry (i, j) of a block, all 0-based."""
        if not 0 <= block < len(self.blocks):
            raise OrderError(f"no block {block + 1}")
        n = self.blocks[block].size
        if not (0 <= i < n and 0 <= j < n):
            raise OrderError(f"entry ({i + 1}, {j + 1}) outside block {block + 1}")
        return self.offsets[block] + i * n + j

    def locate(self, k: int) -> tuple[int, int, int]:
        for b in range(len(self.blocks) - 1, -1, -1):
            if k >= self.offsets[b]:
                n = self.blocks[b].size
                r = k - self.offsets[b]
                return b, r // n, r % n
        raise IndexError(k)

    def exponent(self, k: int) -> int:
        b, i, j = self.locate(k)
        return self.blocks[b].exponents[i][j]

    def closure_violation(self) -> Optional[str]:
        for bi, b in enumerate(self.blocks):
            e = b.exponents
            n = b.size
            for i in range(n):
                if e[i][i] != 0:
                    return f"block {bi + 1}: diagonal exponent must be 0 to contain the identity"
                for k in range(n):
                    for j in range(n):
                        if e[i][k] > e[i][j] + e[j][k]:
                            return f"block {bi + 1}: not closed under multiplication at ({i + 1}, {k + 1})"
        return None

    # -- arithmetic ---------------------------------------------------------------------

    def zero(self) -> Mat:
        return [0] * self.dim

    def identity(self) -> Mat:
        out = self.zero()
        for b, blk in enumerate(self.blocks):
            for i in range(blk.size):
                out[self.coord(b, i, i)] = 1
        return out

    def add(self, x: Mat, y: Mat) -> Mat:
        R = self.ring
        return [R.add(a, b) for a, b in zip(x, y)]

    def scale(self, c: int, x: Mat) -> Mat:
        R = self.ring
        return [R.mul(c, a) for a in x]

    def mul(self, x: Mat, y: Mat) -> Mat:
        """(xy)_ik = sum_j pi^(e_ij + e_jk - e_ik) x_ij y_jk, blockwise."""
        R = self.ring
        out = self.zero()
        for b, blk in enumerate(self.blocks):
            n, e, o = blk.size, blk.exponents, self.offsets[b]
            for i in range(n):
                for j in range(n):
                    xij = x[o + i * n + j]
                    if not xij:
                        continue
                    for k in range(n):
                        yjk = y[o + j * n + k]
                        if not yjk:
                            continue
                        t = R.mul(xij, yjk)
                        shift = e[i][j] + e[j][k] - e[i][k]
                        if shift:
                            t = R.times_pi_power(t, shift)
                        out[o + i * n + k] = R.add(out[o + i * n + k], t)
        return out

    # -- entries ------------------------------------------------------------------------

    def pattern_entry(self, value, k: int) -> int:
        """Convert an entry r (int or pi-polynomial text) to its pattern coordinate."""
        R = self.ring
        e = self.exponent(k)
        poly = parse_pi_polynomial(value)
        s = 0
        for power, c in poly.items():
            if power < e:
                b, i, j = self.locate(k)
                raise PatternViolation(f"entry {value!r} at block {b + 1}, ({i + 1}, {j + 1}) "
                                       f"is not divisible by pi^{e}")
            s = R.add(s, R.mul(R.from_int(c), R.pi_power(power - e)))
        return s

    def matrix_from_blocks(self, blocks: Sequence) -> Mat:
        if len(blocks) != len(self.blocks):
            raise OrderError(f"expected {len(self.blocks)} blocks, got {len(blocks)}")
        out = self.zero()
        for b, (blk, m) in enumerate(zip(self.blocks, blocks)):
            if len(m) != blk.size or any(len(row) != blk.size for row in m):
                raise OrderError(f"block {b + 1} must be {blk.size}x{blk.size}")
            for i in range(blk.size):
                for j in range(blk.size):
                    k = self.coord(b, i, j)
                    out[k] = self.pattern_entry(m[i][j], k)
        return out

    def entries(self, x: Mat) -> list[list[list[str]]]:
        """Actual matrix entries r = pi^e * s, rendered; r is defined modulo pi^(N+e)."""
        out = []
        for b, blk in enumerate(self.blocks):
            rows = []
            for i in range(blk.size):
                row = []
                for j in range(blk.size):
                    e = blk.exponents[i][j]
                    big = self.ring.with_precision(self.ring.N + e)
                    s = x[self.coord(b, i, j)]
                    row.append(big.render(big.mul(big.pi_power(e), s)))
                rows.append(row)
            out.append(rows)
        return out

    # -- submodules ----------------------------------------------------------------------

    def sparse(self, x: Mat) -> dict:
        return {k: c for k, c in enumerate(x) if c}

    def module(self, mats: Iterable[Mat]) -> RowModule:
        return RowModule.from_sparse(self.ring, self.dim, [self.sparse(m) for m in mats])

    def full(self) -> RowModule:
        return self.module(self._unit(k) for k in range(self.dim))

    def _unit(self, k: int) -> Mat:
        m = self.zero()
        m[k] = 1
        return m

    def description(self) -> RowModule:
        """The subring cut out by the congruences."""
        R = self.ring
        if not self.congruences:
            return self.full()
        rows = []
        for k in range(self.dim):
            row = {}
            for c, (l, r, ex) in enumerate(self.congruences):
                f = R.pi_power(max(R.N - ex, 0))
                if k == l:
                    row[c] = R.add(row.get(c, 0), f)
                if k == r:
                    row[c] = R.sub(row.get(c, 0), f)
            rows.append({c: v for c, v in row.items() if v})
        return RowModule.from_sparse(R, self.dim, sparse_kernel(R, rows))

    def radical(self) -> RowModule:
        """Jacobson radical of a product of H and M blocks."""
        R = self.ring
        gens = []
        for b, blk in enumerate(self.blocks):
            if blk.kind not in ("H", "M"):
                raise UnsupportedPattern(f"block {b + 1}: the radical is only known for H and M blocks")
            for i in range(blk.size):
                for j in range(blk.size):
                    k = self.coord(b, i, j)
                    # in M blocks every entry, and in H blocks the diagonal, lies in pi
                    c = R.pi if (blk.kind == "M" or i == j) else 1
                    gens.append(self.scale(c, self._unit(k)))
        return self.module(gens)

    @classmethod
    def from_dict(cls, data: dict, ring: ChainRing) -> "OrderPattern":
        blocks = []
        for b in data.get("blocks", []):
            blocks.append(Block.make(b.get("type", "H"), int(b["size"]), b.get("exponents")))
        cong = []
        for c in data.get("congruences", []):
            left = tuple(int(x) - 1 for x in c["left"])
            right = tuple(int(x) - 1 for x in c["right"])
            cong.append((left, right, int(c.get("exponent", 1))))
        out = cls(ring, blocks, cong)
        out.source = data
        return out


def pattern_radical(P: OrderPattern) -> RowModule:
    return P.radical()


# -- homomorphisms -----------------------------------------------------------------------


@dataclass
class HomAssignment:
    pattern: OrderPattern
    quiver: Quiver
    vertices: list[Mat]
    arrows: list[Mat]
    source: Optional[dict] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @classmethod
    def from_presentation(cls, pres: Presentation) -> "HomAssignment":
        if not pres.order or not pres.hom:
            raise IncompleteAssignment("the presentation has no [order] and [hom] sections")
        P = OrderPattern.from_dict(pres.order, pres.ring)
        return cls.from_dict(pres.hom, P, pres.quiver)

    @classmethod
    def from_dict(cls, hom: dict, P: OrderPattern, Q: Quiver) -> "HomAssignment":
        verts = hom.get("vertices", {})
        arrs = hom.get("arrows", {})
        missing = [v for v in Q.vertices if v not in verts] + \
                  [a.name for a in Q.arrows if a.name not in arrs]
        if missing:
            raise IncompleteAssignment("no image given for " + ", ".join(missing))
        extra = [k for k in verts if k not in Q.vertices] + \
                [k for k in arrs if not Q.has_arrow(k)]
        if extra:
            raise IncompleteAssignment("images given for unknown names " + ", ".join(extra))
        try:
            vm = [P.matrix_from_blocks(verts[v]) for v in Q.vertices]
            am = [P.matrix_from_blocks(arrs[a.name]) for a in Q.arrows]
        except ElementSyntaxError as exc:
            raise OrderError(f"bad matrix entry: {exc}") from exc
        return cls(P, Q, vm, am, hom)

    def at_precision(self, ring: ChainRing) -> "HomAssignment":
        """The same assignment read over another truncation of the ring."""
        if ring == self.pattern.ring:
            return self
        if self.source is None or self.pattern.source is None:
            raise OrderError("the assignment was not built from data and cannot be re-read")
        return HomAssignment.from_dict(self.source, OrderPattern.from_dict(self.pattern.source, ring),
                                       self.quiver)

    def of_path(self, p: Path) -> Mat:
        if p in self._cache:
            return self._cache[p]
        if p.is_trivial:
            out = self.vertices[p.head]
        else:
            out = self.arrows[p.arrows[0]]
            for a in p.arrows[1:]:
                out = self.pattern.mul(out, self.arrows[a])
        self._cache[p] = out
        return out

    def of_elem(self, x: AlgElem) -> Mat:
        P = self.pattern
        out = P.zero()
        for p, c in x.terms.items():
            out = P.add(out, P.scale(c, self.of_path(p)))
        return out

    def of_vec(self, A: TruncatedAlgebra, vec: dict) -> Mat:
        P = self.pattern
        out = P.zero()
        for k, c in vec.items():
            out = P.add(out, P.scale(c, self.of_path(A.path_of(k))))
        return out

    def image(self, A: TruncatedAlgebra) -> RowModule:
        return self.pattern.module(self.of_path(b) for b in A.nf_basis)


def theta(h: HomAssignment, x) -> Mat:
    """Image of a path or an algebra element."""
    if isinstance(x, Path):
        return h.of_path(x)
    return h.of_elem(x)


def _fail(witness: str, **details) -> Verdict:
    return Verdict(FAILS, witness, details)


def verify_unital_relations(h: HomAssignment, Q: Optional[Quiver] = None) -> Verdict:
    """Orthogonal idempotents summing to 1, and arrows supported between their vertices."""
    Q = Q or h.quiver
    P = h.pattern
    total = P.zero()
    for m in h.vertices:
        total = P.add(total, m)
    if total != P.identity():
        return _fail("the vertex images do not sum to the identity", relation="sum")
    for u in range(Q.num_vertices):
        for w in range(Q.num_vertices):
            prod = P.mul(h.vertices[u], h.vertices[w])
            want = h.vertices[u] if u == w else P.zero()
            if prod != want:
                rel = "idempotent" if u == w else "orthogonal"
                return _fail(f"e_{Q.vertices[u]} * e_{Q.vertices[w]} has the wrong image",
                             relation=rel)
    for i, a in enumerate(Q.arrows):
        m = h.arrows[i]
        if P.mul(h.vertices[a.head], m) != m or P.mul(m, h.vertices[a.tail]) != m:
            return _fail(f"the image of arrow {a.name} is not supported between "
                         f"e_{Q.vertices[a.head]} and e_{Q.vertices[a.tail]}", relation="arrow")
    return Verdict(HOLDS)


def _lift(A: TruncatedAlgebra, h: HomAssignment, extra: Optional[int] = None):
    lift = A.lifted(extra)
    try:
        return lift, h.at_precision(lift.ring)
    except OrderError:
        return A, h


def certify_kernel_is_ideal(A: TruncatedAlgebra, h: HomAssignment, strict: bool = False,
                            extra: Optional[int] = None) -> Verdict:
    """Certify ker(theta) = I.

    Generators must map to zero.  Injectivity is a statement about lattices:
    Lambda is free of rank r when its truncation has r invariants all equal to
    N, and theta is injective when the image lattice also has rank r.  The
    truncated image at precision N can lose rank (an element of Lambda may land
    in pi^N * Gamma without lying in pi^N * Lambda), so the image rank is read
    off at a lifted precision N' as the number of nonzero invariants of the
    image of Lambda in Gamma / pi^N' Gamma.  The elementary divisors of the
    image lattice in Gamma are reported as N' minus those invariants.
    """
    for g, text in zip(A.presentation.generators, A.presentation.generator_texts):
        if any(h.of_elem(g)):
            if strict:
                raise GeneratorNotInKernel("generator not in the kernel", text)
            return _fail(f"generator {text} does not map to zero", error="GeneratorNotInKernel")
    prof = A.rank_profile()
    lift, hl = _lift(A, h, extra)
    lprof = hl.image(lift).rank_profile()
    details = {"rank_profile": prof,
               "image_rank_profile": h.image(A).rank_profile(),
               "free_rank": A.free_rank(),
               "certificate_precision": lift.N,
               "image_free_rank": len(lprof),
               "elementary_divisors": sorted(lift.N - d for d in lprof)}
    if any(d != A.N for d in prof):
        return Verdict(FAILS, "the truncated algebra has torsion, so it cannot embed in an order",
                       dict(details, error="RankDeficit"))
    if len(lprof) != len(prof):
        w = _kernel_witness(lift, hl)
        if strict:
            raise RankDeficit("theta is not injective", w)
        return Verdict(FAILS, f"nonzero kernel element {w}", dict(details, error="RankDeficit"))
    return Verdict(HOLDS, details=details)


def _kernel_witness(A: TruncatedAlgebra, h: HomAssignment) -> str:
    """Some element of Lambda outside I that theta kills, preferring unit coefficients."""
    P = h.pattern
    basis = A.nf_basis
    rows = [P.sparse(h.of_path(b)) for b in basis]
    found = []
    for x in sparse_kernel(A.ring, rows):
        vec = A.reduce({A.key(basis[i]): c for i, c in x.items()})
        if vec:
            found.append(vec)
    if not found:
        return "0"
    best = min(found, key=lambda v: min(A.ring.valuation(c) for c in v.values()))
    return A.elem_of(best).render()


def image_matches_description(A: TruncatedAlgebra, h: HomAssignment,
                              extra: Optional[int] = None) -> Verdict:
    """The image equals the subring cut out by the congruences (checked at the lift)."""
    lift, hl = _lift(A, h, extra)
    im = hl.image(lift)
    desc = hl.pattern.description()
    if im == desc:
        return Verdict(HOLDS, details={"precision": lift.N})
    if not desc.contains(im):
        return _fail("the image leaves the subring cut out by the congruences", precision=lift.N)
    return _fail("the image is a proper part of the subring cut out by the congruences",
                 precision=lift.N)


def backstrom_check(A: TruncatedAlgebra, h: HomAssignment, P: Optional[OrderPattern] = None,
                    extra: Optional[int] = None) -> Verdict:
    """rad(Gamma) lies in the image and equals the image of the radical candidate.

    Checked at precision N and at the lift.
    """
    for alg, hom in ((A, h), _lift(A, h, extra)):
        pat = hom.pattern if P is None or hom is not h else P
        rad = pat.radical()
        im = hom.image(alg)
        if not im.contains(rad):
            return _fail("the radical of the ambient order is not contained in the image",
                         precision=alg.N)
        tJ = pat.module(hom.of_vec(alg, j) for j in alg.radical_candidate.generators())
        if tJ != rad:
            return _fail("the image of the radical differs from the radical of the ambient order",
                         precision=alg.N)
    return Verdict(HOLDS)


@dataclass
class OrderReport:
    unital: Verdict
    kernel: Verdict
    image: Verdict
    backstrom: Verdict

    @property
    def all_hold(self) -> bool:
        return all(v.holds for v in (self.unital, self.kernel, self.image, self.backstrom))

    def to_dict(self) -> dict:
        return {"unital_relations": self.unital.to_dict(), "kernel_is_ideal": self.kernel.to_dict(),
                "image_description": self.image.to_dict(), "backstrom": self.backstrom.to_dict()}


def verify_order(A: TruncatedAlgebra, h: Optional[HomAssignment] = None) -> OrderReport:
    h = h or HomAssignment.from_presentation(A.presentation)
    na = Verdict("not-applicable", note="requires the previous step")
    unital = verify_unital_relations(h)
    if not unital.holds:
        return OrderReport(unital, na, na, na)
    kern = certify_kernel_is_ideal(A, h)
    image = image_matches_description(A, h)
    if not kern.holds:
        return OrderReport(unital, kern, image, na)
    try:
        back = backstrom_check(A, h)
    except UnsupportedPattern as exc:
        back = Verdict("not-applicable", note=str(exc))
    return OrderReport(unital, kern, image, back)
