import pytest
from hypothesis import given
from hypothesis import strategies as st

from stringalg.quiver import Quiver, QuiverError, TrivialPathHasNoArrows

FIELDS = Quiver(["1", "2"], [("a", "1", "1"), ("b", "1", "2"), ("c", "2", "1")])
LOOPS = Quiver(["u"], [("a", "u", "u"), ("b", "u", "u")])


def names(Q, ps):
    return [Q.render_path(p) for p in ps]


def brute_paths(Q, n):
    """Composable arrow words of length n, by filtering all words."""
    import itertools
    words = []
    for w in itertools.product(range(Q.num_arrows), repeat=n):
        if all(Q.arrows[w[i]].tail == Q.arrows[w[i + 1]].head for i in range(n - 1)):
            words.append(w)
    return words


def test_composition_follows_written_order():
    b, c = FIELDS.arrow_path(1), FIELDS.arrow_path(2)
    bc = FIELDS.compose(b, c)  # c first, then b
    assert FIELDS.render_path(bc) == "b*c"
    assert bc.tail == c.tail and bc.head == b.head
    assert FIELDS.compose(c, FIELDS.arrow_path(0)) is None


def test_trivial_paths_are_units():
    a = FIELDS.arrow_path(0)
    e1 = FIELDS.trivial(0)
    assert FIELDS.compose(e1, a) == a == FIELDS.compose(a, e1)
    assert FIELDS.compose(FIELDS.trivial(1), a) is None


def test_path_parts():
    p = LOOPS.path_from_names(["a", "b", "a"])
    parts = LOOPS.path_parts(p)
    assert names(LOOPS, parts["right_subpaths"]) == ["a", "b*a", "a*b*a"]
    assert names(LOOPS, parts["left_subpaths"]) == ["a", "a*b", "a*b*a"]
    with pytest.raises(TrivialPathHasNoArrows):
        LOOPS.path_parts(LOOPS.trivial(0))
    with pytest.raises(TrivialPathHasNoArrows):
        LOOPS.trivial(0).left_arrow


@pytest.mark.parametrize("Q", [FIELDS, LOOPS], ids=["fields", "loops"])
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_path_enumeration_against_brute_force(Q, n):
    got = sorted(p.arrows for p in Q.paths_of_length(n))
    assert got == sorted(brute_paths(Q, n))


def test_canonical_order():
    ps = list(FIELDS.paths(2))
    assert ps == sorted(ps, key=lambda p: p.sort_key())
    assert names(FIELDS, ps[:5]) == ["e_1", "e_2", "a", "b", "c"]


def test_degrees_count_loops_once_each_way():
    assert FIELDS.vertex_degrees() == [(2, 2), (1, 1)]
    assert LOOPS.vertex_degrees() == [(2, 2)]


def test_opposite_reverses():
    op = FIELDS.opposite()
    p = FIELDS.path_from_names(["a", "c", "b"])
    r = FIELDS.reverse_path(p)
    assert op.render_path(r) == "b*c*a"
    assert op.opposite() == FIELDS


@pytest.mark.parametrize("verts,arrows", [
    (["1", "1"], []),
    (["1"], [("a", "1", "2")]),
    (["1"], [("a", "1", "1"), ("a", "1", "1")]),
    (["1"], [("pi", "1", "1")]),
    (["1"], [("e_1", "1", "1")]),
])
def test_invalid_quivers(verts, arrows):
    with pytest.raises(QuiverError):
        Quiver(verts, arrows)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=6))
def test_subpaths_of_loop_words(word):
    p = LOOPS.path(word)
    subs = list(LOOPS.subpaths(p))
    n = len(word)
    assert len(subs) == n * (n + 1) // 2
    assert all(len(s) >= 1 for s in subs)
