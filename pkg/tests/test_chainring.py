import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stringalg.chainring import (INF, ChainRing, ChainRingError, InvalidCharacteristic,
                                 InvalidPrecision, NotAUnit, arith, invert_unit, make_ring,
                                 valuation)

RINGS = [make_ring("padic", p=2, precision=3), make_ring("padic", p=5, precision=2),
         make_ring("series", q=3, precision=3), make_ring("series", q=4, precision=2),
         make_ring("field", q=7), make_ring("field", q=9)]


def ring_and_elements(k):
    return st.sampled_from(RINGS).flatmap(
        lambda R: st.tuples(st.just(R), *[st.sampled_from(list(R.elements()))] * k))


def series_digits(R, x):
    # coefficient codes of t^i; valid for a prime residue field only
    return [(x // R.char ** i) % R.char for i in range(R.N)]


def series_mul_oracle(R, x, y):
    a, b = series_digits(R, x), series_digits(R, y)
    out = [0] * R.N
    for i, j in itertools.product(range(R.N), repeat=2):
        if i + j < R.N:
            out[i + j] = (out[i + j] + a[i] * b[j]) % R.char
    return sum(c * R.char ** i for i, c in enumerate(out))


class TestConstruction:
    def test_aliases(self):
        assert make_ring("padic-trunc", p=3, precision=2) == make_ring("padic", p=3, precision=2)
        assert make_ring("series-trunc", q=2, precision=2).kind == "series"
        assert make_ring("finite-field", q=5).N == 1

    @pytest.mark.parametrize("kwargs,exc", [
        (dict(kind="padic", p=4, precision=2), InvalidCharacteristic),
        (dict(kind="series", q=6, precision=2), InvalidCharacteristic),
        (dict(kind="field", q=5, precision=2), InvalidPrecision),
        (dict(kind="padic", p=3, precision=0), InvalidPrecision),
        (dict(kind="field"), InvalidCharacteristic),
    ])
    def test_rejects_bad_parameters(self, kwargs, exc):
        with pytest.raises(exc):
            make_ring(**kwargs)

    def test_unknown_kind(self):
        with pytest.raises(ChainRingError):
            ChainRing("adelic", 2, 1)

    def test_sizes(self):
        assert make_ring("padic", p=2, precision=3).size == 8
        assert make_ring("series", q=4, precision=2).size == 16
        assert make_ring("field", q=9).residue_size == 9

    def test_with_precision(self):
        R = make_ring("series", q=3, precision=2)
        assert R.with_precision(4) == make_ring("series", q=3, precision=4)


class TestArithmetic:
    @settings(max_examples=300)
    @given(ring_and_elements(3))
    def test_ring_axioms(self, args):
        R, x, y, z = args
        assert R.add(x, y) == R.add(y, x)
        assert R.mul(x, y) == R.mul(y, x)
        assert R.add(R.add(x, y), z) == R.add(x, R.add(y, z))
        assert R.mul(R.mul(x, y), z) == R.mul(x, R.mul(y, z))
        assert R.mul(x, R.add(y, z)) == R.add(R.mul(x, y), R.mul(x, z))
        assert R.add(x, R.neg(x)) == 0
        assert R.sub(x, y) == R.add(x, R.neg(y))
        assert R.mul(x, R.from_int(1)) == x

    @given(ring_and_elements(2))
    def test_valuation_is_additive(self, args):
        R, x, y = args
        v = R.valuation(x) + R.valuation(y)
        assert R.valuation(R.mul(x, y)) == (v if v < R.N else INF)

    @given(ring_and_elements(1))
    def test_units_invert(self, args):
        R, x = args
        if R.valuation(x) == 0:
            assert R.mul(x, R.inv(x)) == R.from_int(1)
        else:
            with pytest.raises(NotAUnit):
                R.inv(x)

    @given(ring_and_elements(1))
    def test_unit_part(self, args):
        R, x = args
        if x:
            v = int(R.valuation(x))
            u = R.unit_part(x)
            assert R.valuation(u) == 0
            assert R.mul(u, R.pi_power(v)) == x

    @given(ring_and_elements(1), st.integers(0, 3))
    def test_pi_shifts(self, args, v):
        R, x = args
        y = R.times_pi_power(x, v)
        assert y == R.mul(x, R.pi_power(v))
        if R.valuation(x) >= v:
            assert R.times_pi_power(R.shift_down(x, v), v) == x
        assert R.valuation(R.sub(x, R.mod_pi_power(x, v))) >= min(v, R.N)

    def test_padic_matches_integers(self):
        R = make_ring("padic", p=3, precision=2)
        for x, y in itertools.product(range(9), repeat=2):
            assert R.add(x, y) == (x + y) % 9
            assert R.mul(x, y) == (x * y) % 9

    def test_series_matches_polynomials(self):
        R = make_ring("series", q=3, precision=3)
        for x, y in itertools.product(R.elements(), repeat=2):
            assert R.mul(x, y) == series_mul_oracle(R, x, y)

    @pytest.mark.parametrize("q", [4, 8, 9, 25])
    def test_extension_field_is_a_field(self, q):
        R = make_ring("field", q=q)
        nonzero = [x for x in R.elements() if x]
        for x in nonzero:
            assert R.mul(x, R.inv(x)) == 1
            y = x
            for _ in range(q - 1):
                y = R.mul(y, x)
            assert y == x  # x^q = x
        assert len(nonzero) == q - 1

    def test_field_has_no_uniformizer(self):
        R = make_ring("field", q=5)
        assert R.pi == 0
        assert R.valuation(0) == INF


class TestElementWrapper:
    def test_operators(self):
        R = make_ring("padic", p=2, precision=3)
        x, y = R.elem(6), R.elem(3)
        assert (x + y).value == 1
        assert (x * y).value == 2
        assert arith("sub", x, y) == x - y
        assert valuation(x) == 1
        assert (invert_unit(y) * y).value == 1
        with pytest.raises(NotAUnit):
            invert_unit(x)

    def test_render_is_parseable_text(self):
        R = make_ring("series", q=3, precision=3)
        assert R.render(0) == "0"
        assert R.render(R.pi) == "pi"
        assert R.render(R.add(R.from_int(2), R.pi_power(2))) == "2 + pi^2"
