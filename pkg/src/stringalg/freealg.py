"""Elements of the path algebra RQ and presentations RQ/I.

The element syntax::

    element  := term (("+" | "-") term)*
    term     := [coeff "*"] pathexpr | coeff
    coeff    := int | "pi" ["^" int] | int "*" "pi" ["^" int]
    pathexpr := atom ("*" atom)*
    atom     := ARROWNAME | "e_" VERTEXNAME

``a*b`` is the path that traverses ``b`` first.  A bare coefficient stands for
that multiple of the identity, the sum of all trivial paths.
"""

from __future__ import annotations

import re
import sys
import warnings
from dataclasses import dataclass, field
from pathlib import Path as FsPath
from typing import Iterable, Mapping, Optional, Union

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .chainring import ChainRing, ChainRingError, RingMismatch, make_ring
from .quiver import Path, Quiver, QuiverError


class QuiverMismatch(ValueError):
    pass


class ZeroElement(ValueError):
    pass


class PresentationError(ValueError):
    """Problem with an input file; carries an optional location."""

    def __init__(self, message: str, where: Optional[str] = None):
        super().__init__(message if where is None else f"{where}: {message}")
        self.where = where


class ElementSyntaxError(PresentationError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        self.bare = message
        super().__init__(f"{message} at column {pos + 1}\n  {text}\n  {' ' * pos}^")


class UnknownName(ElementSyntaxError):
    pass


class IncomposableProductWarning(UserWarning):
    pass


class AlgElem:
    """A finitely supported R-linear combination of paths.

    ``terms`` maps :class:`Path` to a nonzero ring code.
    """

    __slots__ = ("ring", "quiver", "terms")

    def __init__(self, ring: ChainRing, quiver: Quiver, terms: Optional[Mapping[Path, int]] = None):
        self.ring = ring
        self.quiver = quiver
        self.terms: dict[Path, int] = {p: c for p, c in (terms or {}).items() if c}

    # -- constructors ------------------------------------------------------------

    @classmethod
    def zero(cls, ring: ChainRing, quiver: Quiver) -> "AlgElem":
        return cls(ring, quiver)

    @classmethod
    def monomial(cls, ring: ChainRing, quiver: Quiver, p: Path, coeff: int = 1) -> "AlgElem":
        return cls(ring, quiver, {p: coeff})

    @classmethod
    def identity(cls, ring: ChainRing, quiver: Quiver, coeff: int = 1) -> "AlgElem":
        return cls(ring, quiver, {quiver.trivial(v): coeff for v in range(quiver.num_vertices)})

    # -- comparisons -------------------------------------------------------------

    def _check(self, other: "AlgElem") -> None:
        if self.ring != other.ring:
            raise RingMismatch("elements over different rings")
        if self.quiver != other.quiver:
            raise QuiverMismatch("elements over different quivers")

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgElem):
            return NotImplemented
        return self.ring == other.ring and self.quiver == other.quiver and self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    # -- arithmetic --------------------------------------------------------------

    def __add__(self, other: "AlgElem") -> "AlgElem":
        self._check(other)
        R = self.ring
        out = dict(self.terms)
        for p, c in other.terms.items():
            out[p] = R.add(out.get(p, 0), c)
        return AlgElem(R, self.quiver, out)

    def __neg__(self) -> "AlgElem":
        return AlgElem(self.ring, self.quiver, {p: self.ring.neg(c) for p, c in self.terms.items()})

    def __sub__(self, other: "AlgElem") -> "AlgElem":
        return self + (-other)

    def scale(self, r: int) -> "AlgElem":
        """Multiply by a ring code."""
        R = self.ring
        return AlgElem(R, self.quiver, {p: R.mul(r, c) for p, c in self.terms.items()})

    def __mul__(self, other: "AlgElem") -> "AlgElem":
        if isinstance(other, int):
            return self.scale(self.ring.from_int(other))
        self._check(other)
        R, Q = self.ring, self.quiver
        out: dict[Path, int] = {}
        for p, c in self.terms.items():
            for q, d in other.terms.items():
                pq = Q.compose(p, q)
                if pq is not None:
                    out[pq] = R.add(out.get(pq, 0), R.mul(c, d))
        return AlgElem(R, Q, out)

    def __rmul__(self, r: int) -> "AlgElem":
        return self.scale(self.ring.from_int(r))

    # -- inspection --------------------------------------------------------------

    def support(self) -> list[Path]:
        return sorted(self.terms, key=Path.sort_key)

    def coeff(self, p: Path) -> int:
        return self.terms.get(p, 0)

    def degree_window(self) -> tuple[int, int]:
        if not self.terms:
            raise ZeroElement("the zero element has no degree window")
        lens = [len(p) for p in self.terms]
        return min(lens), max(lens)

    def is_uniform(self) -> bool:
        ends = {(p.head, p.tail) for p in self.terms}
        return len(ends) <= 1

    def uniform_parts(self) -> list["AlgElem"]:
        """Split into the pieces e_h * self * e_t, in vertex order."""
        groups: dict[tuple[int, int], dict[Path, int]] = {}
        for p, c in self.terms.items():
            groups.setdefault((p.head, p.tail), {})[p] = c
        return [AlgElem(self.ring, self.quiver, groups[k]) for k in sorted(groups)]

    def reversed(self, quiver_op: Quiver) -> "AlgElem":
        """The same element read in the opposite quiver."""
        return AlgElem(self.ring, quiver_op, {quiver_op.reverse_path(p): c for p, c in self.terms.items()})

    def render(self) -> str:
        return render_element(self)

    def __repr__(self) -> str:
        return f"AlgElem({render_element(self)!r})"

    __str__ = render


def elem_arith(op: str, x: AlgElem, y: Union[AlgElem, int]) -> AlgElem:
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "scale":
        return x.scale(y)
    raise ValueError(f"unknown operation {op!r}")


def degree_window(x: AlgElem) -> tuple[int, int]:
    return x.degree_window()


# -- rendering ----------------------------------------------------------------------


def _coeff_pieces(ring: ChainRing, c: int) -> list[str]:
    """Pieces ``k`` or ``k*pi^i`` summing to c (each a valid ``coeff``)."""
    if ring.kind == "padic" or ring.kind == "field":
        if ring.kind == "field" and ring.residue.d > 1:
            raise ValueError("rendering extension-field scalars is not supported")
        return [str(c)]
    if ring.residue.d > 1:
        raise ValueError("rendering extension-field scalars is not supported")
    out = []
    for i, d in enumerate(ring._digits(c)):
        if not d:
            continue
        if i == 0:
            out.append(str(d))
        else:
            pi = "pi" if i == 1 else f"pi^{i}"
            out.append(pi if d == 1 else f"{d}*{pi}")
    return out


def render_element(x: AlgElem) -> str:
    """Render in the element syntax, paths in canonical order."""
    if not x.terms:
        return "0"
    pieces = []
    for p in x.support():
        name = x.quiver.render_path(p)
        for c in _coeff_pieces(x.ring, x.terms[p]):
            pieces.append(name if c == "1" else f"{c}*{name}")
    return " + ".join(pieces)


# -- parser -------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[*+\-^]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ElementSyntaxError(f"unexpected character {text[bad]!r}", text, bad)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append((kind, m.group(kind), start))
        pos = m.end()
    toks.append(("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, quiver: Quiver, ring: ChainRing):
        self.text = text
        self.Q = quiver
        self.R = ring
        self.toks = _tokenize(text)
        self.i = 0
        self.warnings: list[str] = []

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg: str, tok=None, cls=ElementSyntaxError):
        tok = tok or self.peek()
        raise cls(msg, self.text, tok[2])

    def expect_int(self) -> int:
        t = self.take()
        if t[0] != "int":
            self.error("expected an integer", t)
        return int(t[1])

    def parse(self) -> AlgElem:
        R, Q = self.R, self.Q
        total = AlgElem.zero(R, Q)
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        while True:
            term = self.term()
            total = total + (term if sign == 1 else -term)
            t = self.peek()
            if t[0] == "end":
                return total
            if t[0] == "op" and t[1] in "+-":
                self.take()
                sign = -1 if t[1] == "-" else 1
                continue
            self.error("expected '+', '-' or end of input")

    def pi_power(self) -> int:
        self.take()  # "pi"
        k = 1
        if self.peek() == ("op", "^", self.peek()[2]):
            self.take()
            k = self.expect_int()
        return self.R.pi_power(k)

    def term(self) -> AlgElem:
        R, Q = self.R, self.Q
        coeff = None
        t = self.peek()
        if t[0] == "int":
            self.take()
            coeff = R.from_int(int(t[1]))
            if self._star_then_pi():
                self.take()
                coeff = R.mul(coeff, self.pi_power())
        elif t[0] == "name" and t[1] == "pi":
            coeff = self.pi_power()
        if coeff is not None:
            if not (self.peek()[0] == "op" and self.peek()[1] == "*"):
                return AlgElem.identity(R, Q, coeff)
            self.take()
        path = self.pathexpr()
        if path is None:
            return AlgElem.zero(R, Q)
        return AlgElem.monomial(R, Q, path, 1 if coeff is None else coeff)

    def _star_then_pi(self) -> bool:
        t, u = self.toks[self.i], self.toks[self.i + 1] if self.i + 1 < len(self.toks) else None
        return t[0] == "op" and t[1] == "*" and u is not None and u[0] == "name" and u[1] == "pi"

    def atom(self) -> Path:
        t = self.take()
        if t[0] != "name" or t[1] == "pi":
            self.error("expected an arrow name or e_<vertex>", t)
        name = t[1]
        if self.Q.has_arrow(name):
            return self.Q.arrow_path(self.Q.arrow_index(name))
        if name.startswith("e_") and self.Q.has_vertex(name[2:]):
            return self.Q.trivial(self.Q.vertex_index(name[2:]))
        self.error(f"unknown name {name!r}", t, UnknownName)

    def pathexpr(self) -> Optional[Path]:
        start = self.peek()
        p = self.atom()
        dead = False
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.take()
            q = self.atom()
            if not dead:
                pq = self.Q.compose(p, q)
                if pq is None:
                    dead = True
                else:
                    p = pq
        if dead:
            msg = f"incomposable product starting at column {start[2] + 1} is zero"
            self.warnings.append(msg)
            warnings.warn(msg, IncomposableProductWarning, stacklevel=4)
            return None
        return p


def parse_element(text: str, quiver: Quiver, ring: ChainRing) -> AlgElem:
    """Parse the element syntax; see the module docstring."""
    return _Parser(text, quiver, ring).parse()


def parse_with_diagnostics(text: str, quiver: Quiver, ring: ChainRing) -> tuple[AlgElem, list[str]]:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IncomposableProductWarning)
        p = _Parser(text, quiver, ring)
        return p.parse(), p.warnings


def parse_scalar(text: str, ring: ChainRing) -> int:
    """Parse a sum of coefficients (no paths) to a ring code."""
    tiny = Quiver(["*"])
    x = parse_element(str(text), tiny, ring)
    return x.coeff(tiny.trivial(0))


def parse_pi_polynomial(text: Union[str, int]) -> dict[int, int]:
    """Parse a scalar as an exact integer polynomial in pi: {power: int}.

    Used where an entry must later be divided by a power of pi.
    """
    if isinstance(text, int):
        return {0: text} if text else {}
    toks = _tokenize(str(text))
    out: dict[int, int] = {}
    i = 0
    sign = 1

    def err(msg, t):
        raise ElementSyntaxError(msg, str(text), t[2])

    if toks[0][0] == "op" and toks[0][1] in "+-":
        sign = -1 if toks[0][1] == "-" else 1
        i = 1
    while True:
        c, k = 1, 0
        t = toks[i]
        if t[0] == "int":
            c = int(t[1])
            i += 1
            if toks[i][0] == "op" and toks[i][1] == "*":
                i += 1
                t = toks[i]
                if not (t[0] == "name" and t[1] == "pi"):
                    err("expected 'pi'", t)
            else:
                t = None
        if t is not None:
            if not (t[0] == "name" and t[1] == "pi"):
                err("expected an integer or 'pi'", t)
            i += 1
            k = 1
            if toks[i][0] == "op" and toks[i][1] == "^":
                i += 1
                if toks[i][0] != "int":
                    err("expected an integer", toks[i])
                k = int(toks[i][1])
                i += 1
        out[k] = out.get(k, 0) + sign * c
        t = toks[i]
        if t[0] == "end":
            return {k: v for k, v in out.items() if v}
        if t[0] == "op" and t[1] in "+-":
            sign = -1 if t[1] == "-" else 1
            i += 1
            continue
        err("expected '+', '-' or end of input", t)


# -- presentations ------------------------------------------------------------------


@dataclass
class Presentation:
    """A quiver with ideal generators over a chain ring.

    ``order`` and ``hom`` hold the raw optional sections for the orders module.
    """

    ring: ChainRing
    quiver: Quiver
    generators: list[AlgElem]
    name: str = ""
    generator_texts: list[str] = field(default_factory=list)
    order: Optional[dict] = None
    hom: Optional[dict] = None
    diagnostics: list[str] = field(default_factory=list)

    def __post_init__(self):
        gens = []
        for g in self.generators:
            if g.ring != self.ring or g.quiver != self.quiver:
                raise PresentationError("generator over a different ring or quiver")
            gens.extend(part for part in g.uniform_parts() if part)
        self.generators = gens

    def max_degree(self) -> int:
        if not self.generators:
            return 1
        return max(1, max(g.degree_window()[1] for g in self.generators))

    def with_precision(self, n: int) -> "Presentation":
        """The same presentation over R/pi^n (generators re-parsed when possible)."""
        ring = self.ring.with_precision(n)
        if ring == self.ring:
            return self
        if self.generator_texts:
            gens = [parse_with_diagnostics(t, self.quiver, ring)[0] for t in self.generator_texts]
        else:
            gens = [_recode(g, ring) for g in self.generators]
        return Presentation(ring, self.quiver, gens, self.name, list(self.generator_texts),
                            self.order, self.hom)

    def opposite(self) -> "Presentation":
        Qop = self.quiver.opposite()
        gens = [g.reversed(Qop) for g in self.generators]
        texts = [render_element(g) for g in gens] if self.generator_texts else []
        return Presentation(self.ring, Qop, gens, self.name + "^op" if self.name else "", texts)

    def to_toml(self) -> str:
        return presentation_to_toml(self)


def _recode(g: AlgElem, ring: ChainRing) -> AlgElem:
    """Move an element to a ring of different precision via its rendering."""
    return parse_element(render_element(g), g.quiver, ring)


def _ring_from_table(tab: dict) -> ChainRing:
    kind = tab.get("kind")
    if kind not in ("padic", "series", "field"):
        raise PresentationError("kind must be one of padic, series, field", "[ring]")
    try:
        return make_ring(kind, p=tab.get("p"), q=tab.get("q"), precision=tab.get("precision", 1))
    except ChainRingError as exc:
        raise PresentationError(str(exc), "[ring]") from exc


def presentation_from_dict(data: dict, name: str = "") -> Presentation:
    for sec in ("ring", "quiver", "ideal"):
        if sec not in data:
            raise PresentationError(f"missing [{sec}] section")
    ring = _ring_from_table(data["ring"])
    qd = data["quiver"]
    try:
        arrows = [(a["name"], a["from"], a["to"]) for a in qd.get("arrows", [])]
        quiver = Quiver(qd["vertices"], arrows)
    except (KeyError, TypeError) as exc:
        raise PresentationError(f"malformed quiver: {exc}", "[quiver]") from exc
    except QuiverError as exc:
        raise PresentationError(str(exc), "[quiver]") from exc
    gens, texts, diags = [], [], []
    for i, text in enumerate(data["ideal"].get("generators", [])):
        try:
            g, w = parse_with_diagnostics(str(text), quiver, ring)
        except ElementSyntaxError as exc:
            raise PresentationError(str(exc), f"[ideal] generators[{i}]") from exc
        diags.extend(f"[ideal] generators[{i}]: {m}" for m in w)
        if g:
            gens.append(g)
            texts.append(str(text))
        else:
            diags.append(f"[ideal] generators[{i}]: generator is zero and was dropped")
    return Presentation(ring, quiver, gens, data.get("name", name), texts,
                        data.get("order"), data.get("hom"), diags)


def load_presentation(source: Union[str, FsPath], name: str = "") -> Presentation:
    """Load a presentation from TOML text or a file path."""
    if isinstance(source, FsPath) or (isinstance(source, str) and "\n" not in source
                                      and source.endswith(".toml")):
        path = FsPath(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise PresentationError(f"cannot read {path}: {exc.strerror}") from exc
        name = name or path.stem
    else:
        text = source
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise PresentationError(f"invalid TOML: {exc}") from exc
    return presentation_from_dict(data, name)


def presentation_to_toml(p: Presentation) -> str:
    R = p.ring
    lines = []
    if p.name:
        lines.append(f'name = "{p.name}"\n')
    lines.append("[ring]")
    lines.append(f'kind = "{R.kind}"')
    lines.append(f"{'p' if R.kind == 'padic' else 'q'} = {R.char}")
    lines.append(f"precision = {R.precision}\n")
    lines.append("[quiver]")
    lines.append("vertices = [" + ", ".join(f'"{v}"' for v in p.quiver.vertices) + "]")
    lines.append("arrows = [")
    for a in p.quiver.arrows:
        lines.append(f'  {{name = "{a.name}", from = "{p.quiver.vertices[a.tail]}", '
                     f'to = "{p.quiver.vertices[a.head]}"}},')
    lines.append("]\n")
    lines.append("[ideal]")
    gens = p.generator_texts or [render_element(g) for g in p.generators]
    lines.append("generators = [" + ", ".join(f'"{g}"' for g in gens) + "]")
    return "\n".join(lines) + "\n"
