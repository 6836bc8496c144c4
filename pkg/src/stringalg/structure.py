"""Admissible paths, uniserial chains, projective-cover kernels, Gabriel quiver."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .axioms import admissible_extensions, check_string, precision_tail
from .quiver import Path, Quiver
from .quotient import Submodule, TruncatedAlgebra
from .trunclin import sparse_kernel


class InadmissiblePath(ValueError):
    pass


class NotAStringAlgebra(ValueError):
    pass


def admissible_paths(A: TruncatedAlgebra, max_len: int) -> list[Path]:
    """Paths of length <= max_len outside the ideal, in canonical order."""
    lift = A.lifted(max(A.L + 1, max_len + 1))
    return [p for p in A.quiver.paths(max_len) if not lift.path_is_zero(p)]


def _check_generator(A: TruncatedAlgebra, p: Path) -> None:
    if p.is_trivial:
        raise InadmissiblePath("a nontrivial path is required")
    if not A.is_admissible(p):
        raise InadmissiblePath(f"{A.quiver.render_path(p)} lies in the ideal")


# -- uniserial chains -----------------------------------------------------------------


@dataclass
class UniserialChain:
    generator: Path
    chain: list[Path]
    terminal: str
    strict: bool
    exhaustive: bool
    side: str = "left"
    failures: list[str] = field(default_factory=list)

    def render(self, Q: Quiver) -> dict:
        return {"generator": Q.render_path(self.generator), "side": self.side,
                "chain": [Q.render_path(q) for q in self.chain], "terminal": self.terminal,
                "strict": self.strict, "exhaustive": self.exhaustive, "failures": self.failures}


def uniserial_chain(A: TruncatedAlgebra, p: Path, side: str = "left",
                    max_steps: Optional[int] = None) -> UniserialChain:
    """The chain p, xp, yxp, ... of admissible left extensions.

    ``strict`` records that consecutive modules strictly decrease, and
    ``exhaustive`` that every nonzero submodule of Lambda*p generated by a
    monomial (a basis path times a power of pi) is one of the chain modules.
    """
    if side == "right":
        op = A.opposite_algebra()
        ch = uniserial_chain(op, A.quiver.reverse_path(p), "left", max_steps)
        back = op.quiver.reverse_path
        return UniserialChain(back(ch.generator), [back(q) for q in ch.chain], ch.terminal,
                              ch.strict, ch.exhaustive, "right", ch.failures)
    if side != "left":
        raise ValueError("side must be 'left' or 'right'")
    _check_generator(A, p)
    Q = A.quiver
    steps = max_steps if max_steps is not None else (A.L + 2) * (A.N + 1)
    chain = [p]
    failures: list[str] = []
    terminal = "window"
    q = p
    for _ in range(steps):
        ext = admissible_extensions(A, q, "left")
        if not ext:
            terminal = "no-admissible-extension"
            break
        if len(ext) > 1:
            failures.append(f"{Q.render_path(q)} extends admissibly in {len(ext)} ways")
            terminal = "branching"
            break
        q = Q.compose(Q.arrow_path(ext[0]), q)
        if A.path_is_zero(q):
            terminal = "zero-at-precision"
            break
        chain.append(q)
    mods = [A.left_module([c]) for c in chain]
    strict = True
    for i in range(len(mods) - 1):
        if not mods[i + 1] < mods[i]:
            strict = False
            failures.append(f"not strict at {Q.render_path(chain[i + 1])}")
    if len(set(chain)) != len(chain):
        strict = False
        failures.append("repeated chain entry")
    exhaustive = not failures
    top = mods[0]
    R = A.ring
    for b in A.nf_basis:
        base = A.nf_path(b)
        for j in range(A.N):
            vec = A.scale(R.pi_power(j), base)
            if not vec or not top.contains_vec(vec):
                continue
            m = A.left_ideal([vec])
            if m.is_zero():
                continue
            if not any(m == x for x in mods):
                exhaustive = False
                failures.append(f"submodule generated by pi^{j}*{Q.render_path(b)} is not a chain entry")
    return UniserialChain(p, chain, terminal, strict, exhaustive, "left", failures)


# -- projective cover kernels --------------------------------------------------------------


@dataclass
class KernelReport:
    path: Path
    side: str
    source_vertex: int
    summands: list[tuple[str, Path]]
    case: int
    brute_force_agreement: bool
    direct: bool
    note: str = ""

    def render(self, Q: Quiver) -> dict:
        return {"path": Q.render_path(self.path), "side": self.side,
                "cover_vertex": Q.vertices[self.source_vertex],
                "summands": [{"kind": k, "generator": Q.render_path(q)} for k, q in self.summands],
                "case": self.case, "brute_force_agreement": self.brute_force_agreement,
                "direct_sum": self.direct, **({"note": self.note} if self.note else {})}


def brute_force_kernel(A: TruncatedAlgebra, p: Path) -> Submodule:
    """Kernel of right multiplication by p on Lambda*e_h(p), by linear algebra."""
    v = p.head
    dom = [b for b in A.nf_basis if b.tail == v]
    pv = A.nf_path(p)
    rows = [A.mul(A.nf_path(b), pv) for b in dom] + list(A.torsion_rows)
    ker = sparse_kernel(A.ring, rows)
    elems = []
    for x in ker:
        elems.append({A.key(dom[i]): c for i, c in x.items() if i < len(dom)})
    return A.span(elems)


def cover_kernel(A: TruncatedAlgebra, p: Path, side: str = "left") -> KernelReport:
    """Kernel of the projective cover Lambda*e_h(p) -> Lambda*p, from the combinatorics.

    The arrows at h(p) other than the unique admissible extension x of p each
    contribute Lambda*b; the shortest path q in the extension chain of x with
    qp in the ideal contributes Lambda*q.  The sum is compared with the
    linear-algebra kernel in a lifted model, modulo pi^N.
    """
    if side == "right":
        op = A.opposite_algebra()
        rep = cover_kernel(op, A.quiver.reverse_path(p), "left")
        back = op.quiver.reverse_path
        return KernelReport(back(rep.path), "right", rep.source_vertex,
                            [(k, back(q)) for k, q in rep.summands], rep.case,
                            rep.brute_force_agreement, rep.direct, rep.note)
    _check_generator(A, p)
    Q = A.quiver
    v = p.head
    ext = admissible_extensions(A, p, "left")
    note = ""
    if len(ext) > 1:
        note = "p extends admissibly in several ways; the ideal is not special"
    x = ext[0] if ext else None
    summands: list[tuple[str, Path]] = [("arrow", Q.arrow_path(b))
                                        for b in Q.arrows_with_tail(v) if b != x]
    case = 1
    if x is not None:
        q = Q.arrow_path(x)
        limit = A.L + 1
        while len(q) <= limit:
            nxt = admissible_extensions(A, q, "left")
            if not nxt:
                break
            q = Q.compose(Q.arrow_path(nxt[0]), q)
            if not A.is_admissible(Q.compose(q, p)):
                summands.append(("obstruction", q))
                case = 2
                break
        else:
            note = note or f"no obstructing path within length {limit}"
    # compare in a lift, modulo pi^N: the truncated map has extra kernel
    lift = A.lifted()
    pn = lift.ring.pi_power(A.N)
    tail = lift.span(lift.scale(pn, lift.nf_path(b)) for b in lift.nf_basis if b.tail == v)
    mods = [lift.left_module([g]) for _, g in summands]
    combined = tail
    for m in mods:
        combined = combined + m
    agree = combined == brute_force_kernel(lift, p) + tail
    direct = True
    for i in range(len(mods)):
        rest = lift.zero_module()
        for j in range(len(mods)):
            if j != i:
                rest = rest + mods[j]
        if not tail.contains(mods[i].intersect(rest)):
            direct = False
    return KernelReport(p, "left", v, summands, case, agree, direct, note)


def radical_syzygies(A: TruncatedAlgebra, require_string: bool = True) -> list[KernelReport]:
    """Cover kernels of the arrow summands of every radical, on both sides."""
    if require_string and not check_string(A, with_biserial=False).string_algebra:
        raise NotAStringAlgebra("the presentation does not define a string algebra")
    Q = A.quiver
    out = []
    for side in ("left", "right"):
        for v in range(Q.num_vertices):
            arrows = Q.arrows_with_tail(v) if side == "left" else Q.arrows_with_head(v)
            for a in arrows:
                out.append(cover_kernel(A, Q.arrow_path(a), side))
    return out


# -- inclusions around a path -------------------------------------------------------------


def path_inclusions(A: TruncatedAlgebra, p: Path) -> tuple[bool, bool]:
    """For p with left arrow b and right arrow a, test
    ``Jp meet b*Lambda <= pJ`` and ``pJ meet Lambda*a <= Jp``."""
    Q = A.quiver
    J = A.radical_candidate.generators()
    pv = A.nf_path(p)
    Jp = A.span(A.mul(j, pv) for j in J)
    pJ = A.span(A.mul(pv, j) for j in J)
    bv = A.nf_path(Q.arrow_path(p.left_arrow))
    av = A.nf_path(Q.arrow_path(p.right_arrow))
    basis = [A.nf_path(c) for c in A.nf_basis]
    bL = A.span(A.mul(bv, c) for c in basis)
    La = A.span(A.mul(c, av) for c in basis)
    return pJ.contains(Jp.intersect(bL)), Jp.contains(pJ.intersect(La))


# -- Gabriel quiver ------------------------------------------------------------------------


@dataclass
class GabrielQuiverReport:
    matrix: dict[tuple[str, str], int]
    reconstructed: Quiver
    match: bool
    top_length: int
    radical_layer_length: int

    def to_dict(self, Q: Quiver) -> dict:
        rows = [[self.matrix[(i, j)] for j in Q.vertices] for i in Q.vertices]
        return {"vertices": list(Q.vertices), "matrix": rows,
                "matrix_convention": "entry [i][j] counts arrows i -> j",
                "match": self.match, "top_length": self.top_length,
                "radical_layer_length": self.radical_layer_length}


def gabriel_quiver(A: TruncatedAlgebra) -> GabrielQuiverReport:
    """a(i, j) = length of e_j (J0 / J0^2) e_i over the residue field."""
    Q = A.quiver
    J = A.radical_candidate
    J2 = A.radical_power(2)
    matrix = {}
    arrows = []
    for i in range(Q.num_vertices):
        for j in range(Q.num_vertices):
            n = J.project(j, i).length() - J2.project(j, i).length()
            matrix[(Q.vertices[i], Q.vertices[j])] = n
            for k in range(n):
                arrows.append((f"x{i + 1}_{j + 1}_{k + 1}", Q.vertices[i], Q.vertices[j]))
    rec = Quiver(Q.vertices, arrows)
    counts = Q.arrow_counts
    match = all(matrix[(Q.vertices[i], Q.vertices[j])] == counts.get((i, j), 0)
                for i in range(Q.num_vertices) for j in range(Q.num_vertices))
    top = A.length() - J.length()
    layer = J.length() - J2.length()
    return GabrielQuiverReport(matrix, rec, match, top, layer)
