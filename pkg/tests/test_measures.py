import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from strategies import filter_systems, laurent_polys, nonzero_polys, system_and_word, unit_polys

from qmfmeasures.cuntz import Monomial, Word, all_words, projection
from qmfmeasures.filterbank import FilterSystem, builtin, cantor3, daubechies4, haar, permutative_shift
from qmfmeasures.laurent import LaurentPoly, inner
from qmfmeasures.measures import (
    MAX_TABLE_CELLS,
    MeasureTable,
    ProductSpec,
    build_isometry_apply,
    check_covariance,
    check_product,
    check_state_invariance,
    covariance_defects,
    cyclic_span_dim,
    density_stats,
    eigen_detect,
    engine_cross_defect,
    greedy_decompose,
    isometry_defect,
    measure_table,
    mu_basis,
    mu_operator,
    mu_spectral,
    product_check,
    product_measure,
    product_table,
    self_similarity_defect,
    state_invariance_defect,
    tv_distance,
)
from qmfmeasures.nadic import cantor_ifs

e = LaurentPoly.basis
R2 = 1 / math.sqrt(2)


class TestSingleCell:
    def test_haar_lebesgue(self):
        for k in range(5):
            for a in all_words(2, k):
                assert mu_operator(haar(), e(0), a) == pytest.approx(2.0**-k, abs=1e-15)

    def test_permutative_dirac(self):
        fs = permutative_shift(2)
        for a in all_words(2, 4):
            assert mu_operator(fs, e(0), a) == (1.0 if a.digits == (0, 0, 0, 0) else 0.0)

    def test_cantor_values(self):
        assert mu_operator(cantor3(), e(0), (0, 2)) == pytest.approx(0.25, abs=1e-15)
        assert mu_operator(cantor3(), e(0), (0, 1)) == 0.0
        assert mu_operator(cantor3(), e(0), (1, 2)) == 0.0

    def test_spectral_examples(self):
        assert mu_spectral(haar(), e(0), (0,)) == pytest.approx(0.5, abs=1e-15)
        for fs in (haar(), cantor3(), daubechies4()):
            assert mu_spectral(fs, e(0), ()) == pytest.approx(1.0)

    def test_basis_examples(self):
        assert mu_basis(haar(), 0, (1,)) == pytest.approx(0.5, abs=1e-15)
        assert mu_basis(daubechies4(), 3, (0, 1)) == pytest.approx(mu_spectral(daubechies4(), e(3), (0, 1)), abs=1e-14)

    def test_operator_matches_quadratic_form(self):
        f = LaurentPoly({-2: 1.0, 0: 0.5j, 3: -0.25})
        fs = daubechies4()
        for a in all_words(2, 3):
            assert mu_operator(fs, f, a) == pytest.approx(inner(f, projection(fs, a, f)).real, abs=1e-12)


@settings(max_examples=120, deadline=None)
@given(system_and_word(5), laurent_polys(-16, 16))
def test_engine_equivalence(sw, f):
    fs, a = sw
    assert abs(mu_operator(fs, f, a) - mu_spectral(fs, f, a)) <= 1e-9 * max(1.0, f.norm2())


@settings(max_examples=60, deadline=None)
@given(system_and_word(5), laurent_polys())
def test_additivity(sw, f):
    fs, a = sw
    children = math.fsum(mu_operator(fs, f, a + (i,)) for i in range(fs.N))
    assert children == pytest.approx(mu_operator(fs, f, a), abs=1e-9)


@pytest.mark.parametrize("name", ["haar", "daubechies4", "cantor3", "permutative3"])
def test_basis_periodicity_and_column_sums(name):
    fs = builtin(name)
    kmax = 5 if fs.N == 2 else 4
    for k in range(kmax + 1):
        P = fs.N**k
        for a in all_words(fs.N, k):
            col = [mu_basis(fs, p, a) for p in range(P)]
            assert math.fsum(col) == pytest.approx(1.0, abs=1e-9)
            for p in (0, P - 1):
                assert mu_basis(fs, p + P, a) == pytest.approx(col[p], abs=1e-12)
                assert mu_basis(fs, p - 3 * P, a) == pytest.approx(col[p], abs=1e-12)


class TestTables:
    def test_haar_level3(self):
        t = measure_table(haar(), e(0), 3)
        assert np.allclose(t.values, 0.125, atol=1e-15)
        assert t.engine == "operator"

    def test_cantor_level2(self):
        t = measure_table(cantor3(), e(0), 2, "spectral")
        expected = [0.25 if 1 not in w.digits else 0.0 for w in all_words(3, 2)]
        assert np.allclose(t.values, expected, atol=1e-15)

    def test_refinement(self):
        f = LaurentPoly({-1: 0.3, 2: 1.0j, 5: -0.7})
        for name in ("daubechies4", "cantor3"):
            fs = builtin(name)
            fine = measure_table(fs, f, 4)
            coarse = measure_table(fs, f, 3)
            assert np.allclose(fine.coarsen().values, coarse.values, atol=1e-9)
            assert fine.coarsen(4).values[0] == pytest.approx(f.norm2())

    def test_total_and_value(self):
        f = LaurentPoly({0: 3.0, 1: 4.0})
        t = measure_table(daubechies4(), f, 5)
        assert t.total() == pytest.approx(25.0, abs=1e-9)
        assert t.value((0, 1, 1, 0, 1)) == t.values[0b01101]
        with pytest.raises(ValueError):
            t.value((0, 1))

    def test_level_cap(self):
        with pytest.raises(ValueError, match="cap"):
            measure_table(haar(), e(0), 25)
        assert 2**24 == MAX_TABLE_CELLS

    def test_unknown_engine(self):
        with pytest.raises(ValueError):
            measure_table(haar(), e(0), 2, "packet")

    def test_non_unitary_rejected(self):
        bad = FilterSystem(2, (haar()[0], haar()[0]))
        with pytest.raises(ValueError, match="unitary"):
            measure_table(bad, e(0) + e(1), 2)

    def test_clipping(self):
        t = MeasureTable(2, 1, [0.5 + 1e-13, -5e-13])
        assert t.values[1] == 0.0
        with pytest.raises(ValueError):
            MeasureTable(2, 1, [1.0, -1e-9])
        with pytest.raises(ValueError):
            MeasureTable(2, 2, [1.0, 0.0])

    def test_serialization(self):
        t = measure_table(cantor3(), e(0), 1)
        lines = t.to_csv().splitlines()
        assert lines[0] == "word,left,value"
        assert lines[1] == "0,0/3,0.5"
        assert lines[2] == "1,1/3,0"
        doc = json.loads(t.dumps("json"))
        assert doc["cells"][2] == {"N": 3, "digits": [2], "left": "2/3", "width": "1/3", "value": pytest.approx(0.5)}
        assert t.to_csv(nonzero_only=True).count("\n") == 3

    def test_cdf(self):
        t = measure_table(haar(), e(0), 2)
        xs, ys = zip(*t.cdf())
        assert [str(x) for x in xs] == ["1/4", "1/2", "3/4", "1"]
        assert np.allclose(ys, [0.25, 0.5, 0.75, 1.0])

    def test_self_similarity(self):
        for k in range(1, 7):
            assert self_similarity_defect(cantor3(), e(0), cantor_ifs(), (0.5, 0.5), k) <= 1e-12
        # base-3 maps cannot act on a base-2 table
        with pytest.raises(ValueError):
            self_similarity_defect(haar(), e(0), cantor_ifs(), (0.5, 0.5), 2)


@settings(max_examples=40, deadline=None)
@given(filter_systems, laurent_polys(max_terms=8), st.integers(0, 4))
def test_table_invariants(fs, f, k):
    k = min(k, 3 if fs.N == 3 else 4)
    op = measure_table(fs, f, k)
    sp = measure_table(fs, f, k, "spectral")
    assert engine_cross_defect(op, sp) <= 1e-9 * max(1.0, f.norm2())
    assert op.total() == pytest.approx(f.norm2(), abs=1e-9 * max(1.0, f.norm2()))
    assert (op.values >= 0).all()
    if k:
        assert np.allclose(op.coarsen().values, measure_table(fs, f, k - 1).values, atol=1e-9 * max(1.0, f.norm2()))


class TestEigen:
    def test_haar(self):
        d = eigen_detect(haar(), e(0))
        assert d.is_eigen
        assert np.allclose(d.lambdas, [R2, R2], atol=1e-15)

    def test_cantor(self):
        d = eigen_detect(cantor3(), e(0))
        assert d.is_eigen
        assert np.allclose(d.lambdas, [R2, 0, R2], atol=1e-15)
        assert np.allclose(d.probabilities, [0.5, 0, 0.5])

    def test_haar_not_eigen(self):
        # S_0^* f = e_0 and S_1^* f = 0 for f = (e_0 + e_1)/sqrt(2), so
        # lambda = (1/sqrt(2), 0) and the first residual is ||(e_0 - e_1)/2||
        d = eigen_detect(haar(), (e(0) + e(1)) * R2)
        assert not d.is_eigen
        assert np.allclose(d.lambdas, [R2, 0], atol=1e-15)
        assert d.residuals[0] == pytest.approx(R2, abs=1e-15)
        assert d.residuals[1] == pytest.approx(0.0, abs=1e-15)

    def test_errors(self):
        with pytest.raises(ValueError):
            eigen_detect(haar(), LaurentPoly())
        with pytest.raises(ValueError):
            eigen_detect(haar(), e(0, 2.0))


class TestProduct:
    def test_product_measure(self):
        for a in all_words(2, 4):
            assert product_measure(ProductSpec((0.5, 0.5)), a) == 2.0**-4
        assert product_measure(ProductSpec((1, 0)), (0, 0, 0)) == 1
        assert product_measure(ProductSpec((0.5, 0, 0.5)), (0, 2)) == 0.25

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            ProductSpec((0.5, 0.6))
        with pytest.raises(ValueError):
            ProductSpec((1.5, -0.5))

    def test_product_table_matches_pointwise(self):
        spec = ProductSpec((0.2, 0.3, 0.5))
        t = product_table(spec, 3)
        for a in all_words(3, 3):
            assert t.value(a) == pytest.approx(product_measure(spec, a), abs=1e-15)

    @pytest.mark.parametrize(
        "name,p", [("haar", (0.5, 0.5)), ("permutative2", (1, 0)), ("cantor3", (0.5, 0, 0.5))]
    )
    def test_check_product(self, name, p):
        res = product_check(builtin(name), e(0), 6)
        assert res.passed and check_product(builtin(name), e(0), 6)
        assert np.allclose(res.spec.probabilities, p, atol=1e-12)
        assert res.max_defect <= 1e-9

    def test_check_product_fails_for_e1(self):
        assert not check_product(haar(), e(1), 4)

    def test_tv(self):
        a = product_table(ProductSpec((1, 0)), 6)
        b = product_table(ProductSpec((0.5, 0.5)), 6)
        assert tv_distance(a, a) == 0
        # brute force: only the all-zero cell differs in sign
        brute = 0.5 * sum(abs(x - y) for x, y in zip(a.values, b.values))
        assert tv_distance(a, b) == pytest.approx(brute, abs=1e-15)
        assert tv_distance(a, b) == pytest.approx(1 - 2.0**-6, abs=1e-15)
        with pytest.raises(ValueError):
            tv_distance(a, product_table(ProductSpec((1, 0)), 5))

    def test_tv_grows(self):
        p, q = ProductSpec((0.9, 0.1)), ProductSpec((0.5, 0.5))
        tvs = [tv_distance(product_table(p, k), product_table(q, k)) for k in range(1, 11)]
        assert all(x < y for x, y in zip(tvs, tvs[1:]))
        assert tvs[7] > tvs[3]


@settings(max_examples=30, deadline=None)
@given(unit_polys(max_terms=4), st.integers(2, 5))
def test_eigen_implies_product(f, k):
    fs = haar()
    res = product_check(fs, f, k)
    if res.eigen.is_eigen:
        assert res.passed


class TestCovariance:
    def test_examples(self):
        assert check_covariance(haar(), (0,), (1,), e(0))
        assert check_covariance(haar(), (), (1, 0), e(3))
        assert check_covariance(cantor3(), (2,), (0,), e(0))

    def test_haar_values(self):
        d1, d2 = covariance_defects(haar(), (0,), (1,), e(0))
        assert d1 <= 1e-15 and d2 <= 1e-15


@settings(max_examples=100, deadline=None)
@given(system_and_word(3), st.lists(st.integers(0, 2), max_size=3), laurent_polys(max_terms=8))
def test_covariance_random(sw, b, f):
    fs, a = sw
    b = tuple(x % fs.N for x in b)
    d1, d2 = covariance_defects(fs, a, b, f)
    assert max(d1, d2) <= 1e-10 * max(1.0, f.norm2())


def monomials(N, maxlen):
    words = [w for k in range(maxlen + 1) for w in all_words(N, k)]
    for left in words:
        for right in words:
            yield Monomial(left, right)


class TestStateInvariance:
    def test_examples(self):
        fs = haar()
        assert check_state_invariance(fs, e(0), Monomial.identity(2))
        m = Monomial(Word(2, (0,)), Word(2, (0,)))
        assert check_state_invariance(fs, e(0), m)
        m01 = Monomial(Word(2, (0,)), Word(2, (1,)))
        assert inner(e(0), projection(fs, (0,), e(0))) == pytest.approx(0.5)
        assert state_invariance_defect(fs, e(0), m01) <= 1e-15

    @pytest.mark.parametrize("name", ["haar", "permutative2", "cantor3"])
    def test_all_short_monomials(self, name):
        fs = builtin(name)
        worst = max(state_invariance_defect(fs, e(0), m) for m in monomials(fs.N, 2))
        assert worst <= 1e-10

    def test_fails_off_eigenvectors(self):
        m = Monomial(Word(2, (0,)), Word(2, (0,)))
        assert not check_state_invariance(haar(), (e(0) + e(1)) * R2, m)


class TestIsometry:
    def test_single(self):
        fs = daubechies4()
        a = (1, 0)
        g = build_isometry_apply(fs, e(0), [(a, 1.0)])
        assert g.allclose(projection(fs, a, e(0)), 1e-15)
        assert g.norm2() == pytest.approx(mu_operator(fs, e(0), a))

    def test_resolution(self):
        g = build_isometry_apply(haar(), e(0), [(a, 1.0) for a in all_words(2, 4)])
        assert g.allclose(e(0), 1e-12)

    def test_hand_example(self):
        g = build_isometry_apply(haar(), e(0), [((0,), 1.0), ((1,), -1.0)])
        assert g.allclose(e(1), 1e-15)
        assert g.norm2() == pytest.approx(1.0)

    def test_errors(self):
        with pytest.raises(ValueError, match="duplicate"):
            build_isometry_apply(haar(), e(0), [((0,), 1.0), ((0,), 2.0)])
        with pytest.raises(ValueError, match="length"):
            build_isometry_apply(haar(), e(0), [((0,), 1.0), ((0, 1), 2.0)])


@settings(max_examples=40, deadline=None)
@given(
    filter_systems,
    st.integers(0, 3),
    st.lists(st.tuples(st.floats(-2, 2), st.floats(-2, 2)), min_size=27, max_size=27),
    laurent_polys(max_terms=6),
)
def test_isometry_random(fs, k, coeffs, f):
    k = min(k, 3 if fs.N == 2 else 2)
    step = [(a, complex(*c)) for a, c in zip(all_words(fs.N, k), coeffs)]
    assert isometry_defect(fs, f, step) <= 1e-9 * max(1.0, f.norm2())


class TestCyclic:
    @pytest.mark.parametrize("k", range(0, 9))
    def test_haar(self, k):
        assert cyclic_span_dim(haar(), e(0), k) == 2**k

    def test_permutative(self):
        for k in range(5):
            assert cyclic_span_dim(permutative_shift(2), e(0), k) == 1

    def test_level_zero(self):
        assert cyclic_span_dim(daubechies4(), LaurentPoly({0: 1.0, 5: 2.0}), 0) == 1

    def test_cap(self):
        with pytest.raises(ValueError):
            cyclic_span_dim(haar(), e(0), 13)

    def test_greedy(self):
        out = greedy_decompose(haar(), [e(0)], 3)
        assert len(out) == 1
        assert np.allclose(out[0].table.values, 1 / 8)

        assert len(greedy_decompose(haar(), [e(0), e(0)], 3)) == 1

        out = greedy_decompose(permutative_shift(2), [e(0), e(1)], 3)
        assert len(out) == 2
        s0 = set(np.flatnonzero(out[0].table.values))
        s1 = set(np.flatnonzero(out[1].table.values))
        assert s0 == {0} and s1 == {4} and not s0 & s1

    def test_greedy_rejects_zero(self):
        with pytest.raises(ValueError):
            greedy_decompose(haar(), [LaurentPoly()], 2)


@settings(max_examples=20, deadline=None)
@given(st.lists(nonzero_polys(-4, 4, 4), min_size=1, max_size=4))
def test_greedy_outputs_unit_vectors(seeds):
    for s in greedy_decompose(daubechies4(), seeds, 2):
        assert s.vector.norm() == pytest.approx(1.0)
        assert s.table.total() == pytest.approx(1.0, abs=1e-9)


def test_density_stats():
    st_ = density_stats(measure_table(haar(), e(0), 5))
    assert st_.max_density == pytest.approx(1.0) and st_.min_density == pytest.approx(1.0)
    assert st_.support_fraction == 1.0
    c = density_stats(measure_table(cantor3(), e(0), 4))
    assert c.max_density == pytest.approx((3 / 2) ** 4)
    assert c.support_fraction == pytest.approx(16 / 81)
