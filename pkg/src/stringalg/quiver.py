"""Finite quivers and paths.

A path is written the way products are written: ``a*c*b`` (stored as the
arrow tuple ``(a, c, b)``) traverses ``b`` first and ``a`` last.  So the
*right arrow* is the last entry and the *left arrow* the first.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Optional, Sequence


class QuiverError(ValueError):
    pass


class TrivialPathHasNoArrows(QuiverError):
    pass


@dataclass(frozen=True)
class Arrow:
    name: str
    tail: int
    head: int


@dataclass(frozen=True, order=False)
class Path:
    """A path given by arrow indices in written order.

    Trivial paths have ``arrows == ()`` and ``head == tail``.
    """

    arrows: tuple[int, ...]
    head: int
    tail: int

    def __len__(self) -> int:
        return len(self.arrows)

    @property
    def length(self) -> int:
        return len(self.arrows)

    @property
    def is_trivial(self) -> bool:
        return not self.arrows

    def sort_key(self) -> tuple:
        """Degree first, then arrow declaration order read left to right."""
        if not self.arrows:
            return (0, (self.head,))
        return (len(self.arrows), self.arrows)

    def __lt__(self, other: "Path") -> bool:
        return self.sort_key() < other.sort_key()

    @property
    def right_arrow(self) -> int:
        if not self.arrows:
            raise TrivialPathHasNoArrows("a trivial path has no right arrow")
        return self.arrows[-1]

    @property
    def left_arrow(self) -> int:
        if not self.arrows:
            raise TrivialPathHasNoArrows("a trivial path has no left arrow")
        return self.arrows[0]


class Quiver:
    """A finite quiver with named vertices and arrows.

    Args:
        vertices: vertex names, in declaration order.
        arrows: triples ``(name, tail, head)`` with vertex names.
    """

    def __init__(self, vertices: Sequence[str], arrows: Iterable[tuple[str, str, str]] = ()):
        self.vertices: tuple[str, ...] = tuple(str(v) for v in vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise QuiverError("duplicate vertex name")
        self._vidx = {v: i for i, v in enumerate(self.vertices)}
        arr = []
        for name, tail, head in arrows:
            tail, head = str(tail), str(head)
            if tail not in self._vidx or head not in self._vidx:
                raise QuiverError(f"arrow {name!r} uses an undeclared vertex")
            arr.append(Arrow(str(name), self._vidx[tail], self._vidx[head]))
        self.arrows: tuple[Arrow, ...] = tuple(arr)
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise QuiverError("duplicate arrow name")
        if set(names) & set("e_" + v for v in self.vertices):
            raise QuiverError("arrow name clashes with a trivial path name")
        if "pi" in names:
            raise QuiverError("'pi' is reserved")
        self._aidx = {a.name: i for i, a in enumerate(self.arrows)}
        self._paths_cache: dict[int, list[Path]] = {}

    # -- identity ----------------------------------------------------------------

    def _key(self):
        return (self.vertices, tuple((a.name, a.tail, a.head) for a in self.arrows))

    def __eq__(self, other) -> bool:
        return isinstance(other, Quiver) and self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        arrs = ", ".join(f"{a.name}:{self.vertices[a.tail]}->{self.vertices[a.head]}"
                         for a in self.arrows)
        return f"Quiver({list(self.vertices)}, [{arrs}])"

    # -- lookup ------------------------------------------------------------------

    def vertex_index(self, name: str) -> int:
        return self._vidx[name]

    def arrow_index(self, name: str) -> int:
        return self._aidx[name]

    def has_vertex(self, name: str) -> bool:
        return name in self._vidx

    def has_arrow(self, name: str) -> bool:
        return name in self._aidx

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_arrows(self) -> int:
        return len(self.arrows)

    # -- paths -------------------------------------------------------------------

    def trivial(self, v: int) -> Path:
        return Path((), v, v)

    def arrow_path(self, i: int) -> Path:
        a = self.arrows[i]
        return Path((i,), a.head, a.tail)

    def path(self, arrows: Sequence[int]) -> Path:
        """Build a path from arrow indices in written order; raise if incomposable."""
        arrows = tuple(arrows)
        if not arrows:
            raise QuiverError("use trivial() for paths of length 0")
        for left, right in zip(arrows, arrows[1:]):
            if self.arrows[left].tail != self.arrows[right].head:
                raise QuiverError("arrows are not composable")
        return Path(arrows, self.arrows[arrows[0]].head, self.arrows[arrows[-1]].tail)

    def path_from_names(self, names: Sequence[str]) -> Path:
        return self.path([self._aidx[n] for n in names])

    def compose(self, p: Path, q: Path) -> Optional[Path]:
        """The product pq (q first, then p), or None when t(p) != h(q)."""
        if p.tail != q.head:
            return None
        if not p.arrows:
            return q
        if not q.arrows:
            return p
        return Path(p.arrows + q.arrows, p.head, q.tail)

    def reverse_path(self, p: Path) -> Path:
        """The same word read in the opposite quiver."""
        return Path(tuple(reversed(p.arrows)), p.tail, p.head)

    def paths_of_length(self, n: int) -> list[Path]:
        """All paths of length n in canonical order."""
        if n in self._paths_cache:
            return self._paths_cache[n]
        if n == 0:
            out = [self.trivial(v) for v in range(self.num_vertices)]
        elif n == 1:
            out = [self.arrow_path(i) for i in range(self.num_arrows)]
        else:
            out = []
            # extending on the right keeps the left-to-right lexicographic order
            for p in self.paths_of_length(n - 1):
                for i, a in enumerate(self.arrows):
                    if a.head == p.tail:
                        out.append(Path(p.arrows + (i,), p.head, a.tail))
        self._paths_cache[n] = out
        return out

    def paths(self, max_len: int) -> Iterator[Path]:
        for n in range(max_len + 1):
            yield from self.paths_of_length(n)

    def path_parts(self, p: Path) -> dict:
        if not p.arrows:
            raise TrivialPathHasNoArrows("a trivial path has no arrows")
        n = len(p.arrows)
        right = [self.path(p.arrows[i:]) for i in range(n - 1, -1, -1)]
        left = [self.path(p.arrows[:j]) for j in range(1, n + 1)]
        return {
            "right_arrow": p.arrows[-1],
            "left_arrow": p.arrows[0],
            "right_subpaths": right,
            "left_subpaths": left,
        }

    def subpaths(self, p: Path) -> Iterator[Path]:
        """All nontrivial contiguous subwords of p."""
        n = len(p.arrows)
        for i in range(n):
            for j in range(i + 1, n + 1):
                yield self.path(p.arrows[i:j])

    def vertex_degrees(self) -> list[tuple[int, int]]:
        """(in-degree, out-degree) per vertex; a loop counts once each way."""
        deg = [[0, 0] for _ in self.vertices]
        for a in self.arrows:
            deg[a.head][0] += 1
            deg[a.tail][1] += 1
        return [tuple(d) for d in deg]

    def arrows_with_tail(self, v: int) -> list[int]:
        return [i for i, a in enumerate(self.arrows) if a.tail == v]

    def arrows_with_head(self, v: int) -> list[int]:
        return [i for i, a in enumerate(self.arrows) if a.head == v]

    def opposite(self) -> "Quiver":
        return Quiver(self.vertices, [(a.name, self.vertices[a.head], self.vertices[a.tail])
                                      for a in self.arrows])

    # -- rendering ---------------------------------------------------------------

    def render_path(self, p: Path) -> str:
        if not p.arrows:
            return "e_" + self.vertices[p.head]
        return "*".join(self.arrows[i].name for i in p.arrows)

    def short_path(self, p: Path) -> str:
        """Compact rendering ``acb`` when all arrow names are single letters."""
        if not p.arrows:
            return "e_" + self.vertices[p.head]
        if all(len(self.arrows[i].name) == 1 for i in p.arrows):
            return "".join(self.arrows[i].name for i in p.arrows)
        return self.render_path(p)

    @cached_property
    def arrow_counts(self) -> dict[tuple[int, int], int]:
        """Number of arrows per (tail, head)."""
        out: dict[tuple[int, int], int] = {}
        for a in self.arrows:
            out[(a.tail, a.head)] = out.get((a.tail, a.head), 0) + 1
        return out
