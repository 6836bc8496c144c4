"""Checkers for the string-algebra conditions.

Every verdict is a statement about the truncated model at its precision and
window.  Right-sided conditions are evaluated on the opposite algebra.
Admissibility of paths is decided in a lifted model (higher precision), see
:meth:`TruncatedAlgebra.is_admissible`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .quiver import Path
from .quotient import TruncatedAlgebra
from .trunclin import howell_of

HOLDS = "holds"
FAILS = "fails"
NA = "not-applicable"


@dataclass
class Verdict:
    status: str
    witness: Optional[str] = None
    details: dict = field(default_factory=dict)
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.status == HOLDS

    def to_dict(self) -> dict:
        out = {"verdict": self.status}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        if self.note:
            out["note"] = self.note
        return out


def _holds(**details) -> Verdict:
    return Verdict(HOLDS, details=details)


def _fails(witness: str, **details) -> Verdict:
    return Verdict(FAILS, witness, details)


def _sides(A: TruncatedAlgebra):
    """(side name, algebra, element renderer back to the original quiver)."""
    Q = A.quiver

    def left_render(vec, alg=A):
        return alg.elem_of(vec).render()

    def right_render(vec):
        op = A.opposite_algebra()
        return op.elem_of(vec).reversed(Q).render()

    return [("left", A, left_render), ("right", A.opposite_algebra(), right_render)]


# -- individual conditions ------------------------------------------------------------


def check_permissible(A: TruncatedAlgebra) -> Verdict:
    Q = A.quiver
    for i, a in enumerate(Q.arrows):
        if not A.is_admissible(Q.arrow_path(i)):
            return _fails(a.name, reason="arrow lies in the ideal")
    return _holds()


def admissible_extensions(A: TruncatedAlgebra, p: Path, side: str = "left") -> list[int]:
    """Arrows x with xp (left) or px (right) admissible."""
    Q = A.quiver
    out = []
    if side == "left":
        for i in Q.arrows_with_tail(p.head):
            if A.is_admissible(Q.compose(Q.arrow_path(i), p)):
                out.append(i)
    else:
        for i in Q.arrows_with_head(p.tail):
            if A.is_admissible(Q.compose(p, Q.arrow_path(i))):
                out.append(i)
    return out


def check_special(A: TruncatedAlgebra) -> Verdict:
    Q = A.quiver
    for i, b in enumerate(Q.arrows):
        bp = Q.arrow_path(i)
        for side, label in (("left", "SP1"), ("right", "SP2")):
            ext = admissible_extensions(A, bp, side)
            if len(ext) > 1:
                names = [Q.arrows[j].name for j in ext]
                return _fails(f"{label}: arrow {b.name} extends admissibly by {', '.join(names)}",
                              arrow=b.name, condition=label, extensions=names)
    return _holds()


def check_degree_le_2(A: TruncatedAlgebra) -> Verdict:
    Q = A.quiver
    for v, (din, dout) in enumerate(Q.vertex_degrees()):
        if din > 2 or dout > 2:
            return _fails(f"vertex {Q.vertices[v]} has in-degree {din}, out-degree {dout}",
                          vertex=Q.vertices[v])
    return _holds()


def precision_tail(alg: TruncatedAlgebra, n: int):
    """pi^n * alg, the part that vanishes at precision n."""
    pn = alg.ring.pi_power(n)
    return alg.span(alg.scale(pn, alg.nf_path(b)) for b in alg.nf_basis)


def _intersections(A: TruncatedAlgebra):
    """Yield (side, vertex, arrow, meet, radical of the arrow module, tail, render).

    The meet is computed in the lifted model; only its part outside
    pi^N of the lift is a genuine intersection at precision N.
    """
    Q = A.quiver
    lift = A.lifted()
    for side, alg in (("left", lift), ("right", lift.opposite_algebra())):
        J = alg.radical_candidate.generators()
        tail = precision_tail(alg, A.N)
        if side == "left":
            def render(vec, alg=alg):
                return alg.elem_of(vec).render()
        else:
            def render(vec, alg=alg):
                return alg.elem_of(vec).reversed(Q).render()
        for v in range(Q.num_vertices):
            arrows = alg.quiver.arrows_with_tail(v)
            if len(arrows) < 2:
                continue
            for a in arrows:
                Ma = alg.left_module([alg.quiver.arrow_path(a)])
                S = alg.left_module([alg.quiver.arrow_path(b) for b in arrows if b != a])
                X = Ma.intersect(S)
                rad = alg.span(alg.mul(j, alg.nf_path(alg.quiver.arrow_path(a))) for j in J)
                yield side, Q.vertices[v], Q.arrows[a].name, X, rad + tail, tail, render


def check_arrow_direct_and_distinct(A: TruncatedAlgebra) -> tuple[Verdict, Verdict]:
    direct: Optional[Verdict] = None
    distinct: Optional[Verdict] = None
    for side, v, name, X, rad, tail, render in _intersections(A):
        if direct is None and not tail.contains(X):
            w = next(r for r in X.generators() if not tail.contains_vec(r))
            direct = _fails(f"{side} side, arrow {name}: nonzero element {render(w)} "
                            f"of the intersection", side=side, arrow=name, vertex=v)
        if distinct is None and not rad.contains(X):
            w = next(r for r in X.generators() if not rad.contains_vec(r))
            distinct = _fails(f"{side} side, arrow {name}: {render(w)} is in the intersection "
                              f"but not in the radical of the arrow module",
                              side=side, arrow=name, vertex=v)
    direct = direct or _holds()
    distinct = distinct or _holds()
    # arrow-direct implies arrow-distinct; a violation would be a bug
    assert not (direct.holds and not distinct.holds), "arrow-direct without arrow-distinct"
    return direct, distinct


def check_arrow_direct(A: TruncatedAlgebra) -> Verdict:
    return check_arrow_direct_and_distinct(A)[0]


def check_arrow_distinct(A: TruncatedAlgebra) -> Verdict:
    return check_arrow_direct_and_distinct(A)[1]


def check_arrow_radical(A: TruncatedAlgebra) -> Verdict:
    """Sub-checks (i) pi*e_v in the arrow submodule, (ii) nilpotency, (iii) top of
    length one.  All of them are evaluated; the witness is the first failure and
    ``failed_subchecks`` lists every one that failed."""
    Q = A.quiver
    failures: list[tuple[str, dict]] = []
    if A.nilpotency_index is None:
        failures.append(("the ideal generated by the arrows and pi is not nilpotent",
                         {"subcheck": "(ii)"}))
    for side, alg, render in _sides(A):
        J = alg.radical_candidate.generators()
        for v in range(Q.num_vertices):
            name = Q.vertices[v]
            ev = alg.nf_path(alg.quiver.trivial(v))
            arrows = [alg.quiver.arrow_path(i) for i in alg.quiver.arrows_with_tail(v)]
            arrow_mod = alg.left_module(arrows)
            pi_ev = alg.scale(alg.ring.pi, ev)
            if not arrow_mod.contains_vec(pi_ev):
                failures.append((f"{side} side, vertex {name}: pi*e_{name} is not in the arrow submodule",
                                 {"side": side, "vertex": name, "subcheck": "(i)"}))
            whole = alg.left_ideal([ev])
            rad = alg.span(alg.mul(j, ev) for j in J)
            top = whole.length() - rad.length()
            if top != 1:
                failures.append((f"{side} side, vertex {name}: top has length {top}, expected 1",
                                 {"side": side, "vertex": name, "subcheck": "(iii)",
                                  "top_length": top}))
    if failures:
        witness, details = failures[0]
        details = dict(details, failed_subchecks=sorted({d["subcheck"] for _, d in failures}))
        return Verdict(FAILS, witness, details)
    return _holds(nilpotency_index=A.nilpotency_index)


def check_bounded(A: TruncatedAlgebra) -> Verdict:
    """Minimal m such that every path of length m reduces into m*Lambda."""
    Q, R = A.quiver, A.ring
    # the normal forms of the length-m paths span layer m; rows of its Howell
    # form are combinations of them and vice versa
    layer = [A.nf_path(Q.trivial(v)) for v in range(Q.num_vertices)]
    for m in range(1, A.L + 2):
        vecs = [A.left_arrow_action(i, x) for i in range(Q.num_arrows) for x in layer]
        layer = howell_of(R, [x for x in vecs if x]).rows()
        if all(R.valuation(c) >= 1 for x in layer for c in x.values()):
            return _holds(m=m)
    return _fails(f"some path of length {A.L + 1} has a unit coefficient in its normal form",
                  window=A.L)


# -- bundles --------------------------------------------------------------------------

AXIOM_ORDER = ["permissible", "special", "arrow_direct", "arrow_distinct", "arrow_radical",
               "bounded_below", "bounded_above", "degree_le_2", "string_algebra", "biserial"]

STRING_PARTS = ["arrow_radical", "arrow_direct", "permissible", "special", "degree_le_2",
                "bounded_below"]


@dataclass
class AxiomReport:
    axioms: dict
    certification: dict

    @property
    def string_algebra(self) -> bool:
        return self.axioms["string_algebra"].holds

    def __getitem__(self, name: str) -> Verdict:
        return self.axioms[name]

    def all_hold(self) -> bool:
        return all(v.holds for v in self.axioms.values())

    def to_dict(self) -> dict:
        return {"certification": self.certification,
                "axioms": {k: self.axioms[k].to_dict() for k in AXIOM_ORDER if k in self.axioms}}


def check_biserial(A: TruncatedAlgebra, direct: Optional[Verdict] = None) -> Verdict:
    from .structure import uniserial_chain

    Q = A.quiver
    if direct is None:
        direct = check_arrow_direct(A)
    if not direct.holds:
        return _fails("the arrow summands of a radical do not form a direct sum",
                      cause=direct.witness)
    for side, alg, render in _sides(A):
        for v in range(Q.num_vertices):
            arrows = alg.quiver.arrows_with_tail(v)
            if len(arrows) > 2:
                return _fails(f"{side} side, vertex {Q.vertices[v]}: {len(arrows)} arrow summands")
            for a in arrows:
                ch = uniserial_chain(A, A.quiver.arrow_path(a), side)
                if not (ch.strict and ch.exhaustive):
                    return _fails(f"{side} side: module generated by arrow {Q.arrows[a].name} is "
                                  f"not certified uniserial")
    return _holds()


def check_string(A: TruncatedAlgebra, with_biserial: bool = True) -> AxiomReport:
    ax: dict[str, Verdict] = {}
    ax["permissible"] = check_permissible(A)
    ax["special"] = check_special(A)
    ax["arrow_direct"], ax["arrow_distinct"] = check_arrow_direct_and_distinct(A)
    ax["arrow_radical"] = check_arrow_radical(A)
    ax["bounded_below"] = check_bounded(A)
    derived = all(ax[k].holds for k in ("arrow_distinct", "permissible", "arrow_radical"))
    ax["bounded_above"] = Verdict(HOLDS if derived else FAILS,
                                  None if derived else "permissible, arrow-distinct or arrow-radical fails",
                                  note="derived from permissible, arrow-distinct and arrow-radical")
    ax["degree_le_2"] = check_degree_le_2(A)
    failing = [k for k in STRING_PARTS if not ax[k].holds]
    ax["string_algebra"] = Verdict(HOLDS) if not failing else \
        Verdict(FAILS, ", ".join(failing) + (" does not hold" if len(failing) == 1 else " do not hold"))
    if with_biserial:
        ax["biserial"] = check_biserial(A, ax["arrow_direct"])
    cert = dict(A.certification())
    cert["admissibility_precision"] = A.lifted().N
    return AxiomReport(ax, cert)


def check_presentation(pres, with_biserial: bool = True) -> AxiomReport:
    """Build and check; a presentation that is not finite at its precision
    fails bounded_below and the remaining checks are not applicable."""
    from .quotient import NotFiniteAtPrecision, build

    try:
        A = build(pres)
    except NotFiniteAtPrecision as exc:
        na = Verdict(NA, note="no finite model at this precision")
        ax = {k: na for k in AXIOM_ORDER if with_biserial or k != "biserial"}
        ax["bounded_below"] = Verdict(FAILS, str(exc))
        ax["string_algebra"] = Verdict(FAILS, "bounded_below does not hold")
        return AxiomReport(ax, {"precision": pres.ring.N, "ring": pres.ring.describe()})
    return check_string(A, with_biserial)
