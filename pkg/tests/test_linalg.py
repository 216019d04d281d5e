from fractions import Fraction

from hypothesis import given, strategies as st

from conformal_lab.linalg import EchelonBasis, combine, independent_subset, nullspace, rank, span_intersection_dim

vecs = st.lists(
    st.dictionaries(st.integers(0, 4), st.fractions(-4, 4, max_denominator=3), max_size=4),
    max_size=6,
)


@given(vecs)
def test_nullspace_vectors_annihilate(columns):
    for c in nullspace(columns):
        total = combine(c, columns)
        assert all(v == 0 for v in total.values())


@given(vecs)
def test_rank_nullity(columns):
    assert rank(columns) + len(nullspace(columns)) == len(columns)


@given(vecs)
def test_independent_subset_has_full_rank(columns):
    idx = independent_subset(columns)
    assert len(idx) == rank(columns)
    assert rank([columns[i] for i in idx]) == len(idx)


def test_echelon_membership():
    eb = EchelonBasis()
    assert eb.add({0: 1, 1: 2})
    assert not eb.add({0: 2, 1: 4})
    assert eb.contains({0: Fraction(1, 2), 1: 1})
    assert not eb.contains({1: 1})
    assert len(eb) == 1


def test_span_intersection_dim():
    # span{e0 + e1, e2} meets the coordinate plane of keys {0, 2} in span{e2}
    vs = [{0: 1, 1: 1}, {2: 1}]
    assert span_intersection_dim(vs, lambda k: k != 1) == 1
