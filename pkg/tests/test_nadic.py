from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmfmeasures.cuntz import Word, all_words
from qmfmeasures.nadic import (
    MAX_LEVEL,
    Cylinder,
    IfsSystem,
    NadicInterval,
    base_ifs,
    cantor_ifs,
    children,
    cylinder_to_interval,
    interval,
    level_intervals,
    preimage,
    pullback,
    sigma_forward,
    sigma_map,
)


def span(J):
    return (J.left, J.right)


class TestInterval:
    def test_examples(self):
        assert span(interval(2, (1, 1))) == (F(3, 4), 1)
        assert span(interval(3, (0, 2))) == (F(2, 9), F(3, 9))
        assert span(interval(2, ())) == (0, 1)

    def test_exact_fields(self):
        J = interval(3, (0, 2))
        assert (J.numerator, J.denominator, J.width) == (2, 9, F(1, 9))
        assert J.to_json() == {"N": 3, "digits": [0, 2], "left": "2/9", "width": "1/9"}
        # unreduced canonical form
        assert interval(2, (1, 0)).to_json()["left"] == "2/4"

    def test_invalid(self):
        with pytest.raises(ValueError):
            interval(2, (2,))
        with pytest.raises(ValueError):
            interval(2, (0,) * (MAX_LEVEL + 1))

    def test_from_word(self):
        assert interval(3, Word(3, (1,))) == NadicInterval(3, (1,))
        with pytest.raises(ValueError):
            interval(2, Word(3, (1,)))

    def test_membership(self):
        J = interval(2, (0, 1))
        assert F(1, 4) in J and F(1, 2) not in J
        assert interval(2, (0,)).contains_interval(J)
        assert J.disjoint(interval(2, (1,)))

    def test_children(self):
        assert [span(c) for c in children(interval(2, ()))] == [(0, F(1, 2)), (F(1, 2), 1)]
        assert [span(c) for c in children(interval(3, (1,)))] == [
            (F(1, 3), F(4, 9)),
            (F(4, 9), F(5, 9)),
            (F(5, 9), F(2, 3)),
        ]

    def test_cylinders(self):
        assert span(cylinder_to_interval(Cylinder(2, (0,)))) == (0, F(1, 2))
        assert span(cylinder_to_interval(Cylinder(2, ()))) == (0, 1)
        assert span(cylinder_to_interval(Cylinder(3, (2, 2)))) == (F(8, 9), 1)
        assert Cylinder(2, (0, 1)).contains((0, 1, 1, 0))
        assert not Cylinder(2, (0, 1)).contains((1, 1))


class TestIfs:
    def test_base2(self):
        ifs = base_ifs(2)
        assert span(sigma_map(ifs, (1,))) == (F(1, 2), 1)
        assert sigma_map(ifs, (0, 1)) == interval(2, (0, 1))
        assert span(sigma_map(ifs, (0, 1))) == (F(1, 4), F(1, 2))

    def test_base3(self):
        assert sigma_map(base_ifs(3), (0, 2)) == interval(3, (0, 2))

    def test_cantor(self):
        ifs = cantor_ifs()
        assert span(sigma_map(ifs, (0,))) == (0, F(1, 3))
        assert span(sigma_map(ifs, (1,))) == (F(2, 3), 1)
        level2 = sorted(sigma_map(ifs, w).digits for w in all_words(2, 2))
        assert level2 == [(0, 0), (0, 2), (2, 0), (2, 2)]
        assert all(ifs.digit_predicate(sigma_map(ifs, w)) for w in all_words(2, 4))
        assert not ifs.digit_predicate(interval(3, (1,)))

    def test_sigma_forward(self):
        ifs = base_ifs(2)
        assert sigma_forward(ifs, F(3, 4)) == F(1, 2)
        assert sigma_forward(ifs, 0) == 0
        with pytest.raises(ValueError):
            sigma_forward(ifs, 1)
        with pytest.raises(ValueError):
            sigma_forward(ifs, F(-1, 3))

    def test_pullback(self):
        ifs = cantor_ifs()
        assert pullback(ifs, 1, interval(3, (2, 0))) == interval(3, (0,))
        assert pullback(ifs, 0, interval(3, (2, 0))) is None
        assert pullback(ifs, 0, interval(3, ())) == interval(3, ())

    def test_preimage_base2(self):
        J = interval(2, (1,))
        assert [c.digits for c in preimage(base_ifs(2), J)] == [(0, 1), (1, 1)]

    def test_bad_ifs(self):
        with pytest.raises(ValueError):
            IfsSystem(3, (0, 0))
        with pytest.raises(ValueError):
            IfsSystem(3, (0, 3))
        with pytest.raises(ValueError):
            sigma_map(base_ifs(2), (0,), interval(3, ()))
        with pytest.raises(ValueError):
            sigma_map(base_ifs(2), Word(3, (0,)))


@pytest.mark.parametrize("N,k", [(2, 0), (2, 5), (3, 4), (5, 2)])
def test_partition(N, k):
    cells = list(level_intervals(N, k))
    assert len(cells) == N**k
    assert cells[0].left == 0 and cells[-1].right == 1
    for a, b in zip(cells, cells[1:]):
        assert a.right == b.left
    assert all(c.width == F(1, N**k) for c in cells)


@given(st.integers(2, 5).flatmap(lambda N: st.tuples(st.just(N), st.lists(st.integers(0, N - 1), max_size=12))))
def test_affiliation(Nd):
    N, digits = Nd
    assert sigma_map(base_ifs(N), digits) == interval(N, digits)


@given(
    st.integers(2, 4).flatmap(
        lambda N: st.tuples(
            st.just(N),
            st.lists(st.integers(0, N - 1), max_size=6),
            st.lists(st.integers(0, N - 1), max_size=6),
        )
    )
)
def test_concatenation(args):
    N, a, b = args
    assert sigma_map(base_ifs(N), a, interval(N, b)) == interval(N, tuple(a) + tuple(b))


@given(st.integers(2, 5), st.fractions(min_value=0, max_value=1, max_denominator=10**6).filter(lambda x: x < 1))
def test_forward_inverts_branches(N, x):
    ifs = base_ifs(N)
    for i in range(N):
        assert sigma_forward(ifs, ifs.branch(i, x)) == x


@given(st.integers(2, 4).flatmap(lambda N: st.tuples(st.just(N), st.lists(st.integers(0, N - 1), max_size=6))))
def test_preimage_is_union_of_branch_images(Nd):
    N, digits = Nd
    J = interval(N, digits)
    ifs = base_ifs(N)
    pieces = preimage(ifs, J)
    # every piece maps onto J under the forward map and they are disjoint
    for piece in pieces:
        assert sigma_forward(ifs, piece.left) == J.left
        assert piece.width * N == J.width
    for a, b in zip(pieces, pieces[1:]):
        assert a.disjoint(b)
    # the forward map preserves Lebesgue measure
    assert sum(p.width for p in pieces) == J.width
