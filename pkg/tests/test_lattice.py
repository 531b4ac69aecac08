import numpy as np
from hypothesis import given, strategies as st

from cpodpo import lattice

mats = st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4)


def test_smith_examples():
    assert lattice.smith_diagonal([[2, 0], [0, 2]]) == [2, 2]
    assert lattice.smith_diagonal([[2, 4], [6, 8]]) == [2, 4]
    assert lattice.smith_diagonal([[0, 0]]) == []


def test_span():
    assert lattice.spans_full_lattice([(1, 0), (0, 1)], 2)
    assert not lattice.spans_full_lattice([(2, 0), (0, 1)], 2)
    assert lattice.spans_full_lattice([(2, 1), (3, 2)], 2)


@given(mats)
def test_smith_product_is_gcd_of_minors(rows):
    diag = lattice.smith_diagonal(rows)
    A = np.array(rows)
    assert len(diag) == np.linalg.matrix_rank(A)
    for a, b in zip(diag, diag[1:]):
        assert b % a == 0
    if len(rows) == 3 and len(diag) == 3:
        assert abs(lattice.integer_det(rows)) == diag[0] * diag[1] * diag[2]


@given(mats)
def test_hermite_row_space(rows):
    H = lattice.hermite_rows(rows)
    assert lattice.rank(rows) == len(H)
    # the Hermite rows span the same lattice: stacking them changes nothing
    assert lattice.smith_diagonal(H) == lattice.smith_diagonal(rows)
    assert lattice.smith_diagonal(H + [list(r) for r in rows]) == lattice.smith_diagonal(rows)


@given(st.lists(st.integers(-5, 5), min_size=3, max_size=3), st.lists(st.integers(-5, 5), min_size=3, max_size=3))
def test_kernel_vector(a, b):
    if lattice.rank([a, b]) < 2:
        return
    w = lattice.integer_kernel_vector([a, b], 3)
    assert np.dot(w, a) == 0 and np.dot(w, b) == 0
    assert lattice.primitive(w) == w
