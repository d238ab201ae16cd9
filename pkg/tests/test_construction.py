import math

import numpy as np
import pytest

from gkpldpc.construction import (
    ACYCLIC,
    BaseMatrix,
    STEANE_MATRIX,
    TANNER_BASE,
    builtin_base,
    builtin_code,
    builtin_names,
    conjugate_transpose,
    cpm_expand,
    girth,
    lift,
    lifted_product,
    make_css_code,
)
from gkpldpc.gf2 import BinaryMatrix, mat_mul

# rows of the construction tables: name -> (n, k, rate to 3 decimals, L, girth)
TABLE_PARAMS = {
    "LP04-175": (175, 19, 0.109, 7, 6),
    "LP04-225": (225, 21, 0.093, 9, 6),
    "LP04-425": (425, 29, 0.068, 17, 8),
    "LP04-475": (475, 31, 0.065, 19, 8),
    "LP118-544": (544, 80, 0.147, 16, 8),
    "LP118-714": (714, 100, 0.140, 21, 8),
    # The printed base matrix contains the zero-sum pattern
    # b[1][1] - b[2][1] + b[2][3] = 2 - 16 + 14, which closes a six-cycle for
    # any lift size, so the measured girth is 6 (the table's 8 cannot hold
    # for this matrix).
    "LP118-1020": (1020, 136, 0.133, 30, 6),
}


# -- circulant permutation matrices -------------------------------------------


def test_cpm_zero_shift_is_identity():
    assert cpm_expand(0, 3) == BinaryMatrix.identity(3)


def test_cpm_shift_one():
    assert np.array_equal(
        cpm_expand(1, 3).to_dense(), [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    )


def test_cpm_negative_is_zero_block():
    assert cpm_expand(-1, 4).is_zero()


def test_cpm_invalid_shift():
    with pytest.raises(ValueError):
        cpm_expand(5, 5)
    with pytest.raises(ValueError):
        cpm_expand(-2, 5)


def test_cpm_exponents_add():
    assert mat_mul(cpm_expand(2, 5), cpm_expand(4, 5)) == cpm_expand(1, 5)


def test_cpm_exponents_add_exhaustive():
    for size in range(1, 9):
        for a in range(size):
            for b in range(size):
                assert mat_mul(cpm_expand(a, size), cpm_expand(b, size)) == cpm_expand(
                    (a + b) % size, size
                )


# -- lifting -------------------------------------------------------------------


def test_lift_tanner_matrix():
    h = lift(TANNER_BASE)
    assert h.shape == (93, 155)
    assert set(h.row_weights()) == {5}
    assert set(h.col_weights()) == {3}


def test_lift_trivial_base():
    assert lift(BaseMatrix([[0]], 4)) == BinaryMatrix.identity(4)


def test_lift_lp04_base():
    h = lift(builtin_base("LP04-175"))
    assert h.shape == (21, 28)
    assert set(h.col_weights()) == {3}
    assert set(h.row_weights()) == {4}


def test_base_matrix_validation():
    with pytest.raises(ValueError):
        BaseMatrix([[0, 7]], 7)
    with pytest.raises(ValueError):
        BaseMatrix([[0, -2]], 7)
    with pytest.raises(ValueError):
        BaseMatrix([[0, 1]], 0)


# -- conjugate transpose -------------------------------------------------------


def test_conjugate_transpose_tanner():
    expected = [
        [30, 26, 6],
        [29, 21, 12],
        [27, 11, 24],
        [23, 22, 17],
        [15, 13, 3],
    ]
    assert np.array_equal(conjugate_transpose(TANNER_BASE).shifts, expected)


def test_conjugate_transpose_zero_shifts():
    base = BaseMatrix([[0, 0], [0, 0], [0, 0]], 5)
    assert np.array_equal(conjugate_transpose(base).shifts, np.zeros((2, 3), int))


def test_conjugate_transpose_is_binary_transpose():
    base = builtin_base("LP04-225")  # L = 9
    assert lift(conjugate_transpose(base)) == lift(base).transpose()


# -- lifted product ------------------------------------------------------------


def test_lifted_product_tanner():
    code = lifted_product(TANNER_BASE, name="tanner-lp")
    assert (code.n, code.k) == (1054, 140)


@pytest.mark.parametrize("name", sorted(TABLE_PARAMS))
def test_builtin_codes_match_tables(name):
    n, k, rate, lift_size, expected_girth = TABLE_PARAMS[name]
    code = builtin_code(name)
    base = builtin_base(name)
    assert (code.n, code.k) == (n, k)
    assert round(code.rate, 3) == rate
    assert base.lift_size == lift_size
    assert code.girth_x == expected_girth
    assert code.girth_z == expected_girth
    assert code.n == lift_size * (base.nb**2 + base.mb**2)
    assert code.k >= lift_size * (base.nb - base.mb) ** 2


@pytest.mark.parametrize("name", builtin_names())
def test_builtin_codes_css_condition(name):
    code = builtin_code(name)
    assert mat_mul(code.hx, code.hz.transpose()).is_zero()


@pytest.mark.parametrize("name", sorted(TABLE_PARAMS))
def test_lifted_row_weights(name):
    code = builtin_code(name)
    base = builtin_base(name)
    expected = base.nb + base.mb
    assert set(code.hx.row_weights()) == {expected}
    assert set(code.hz.row_weights()) == {expected}


def test_steane_builtin():
    code = builtin_code("STEANE")
    assert (code.n, code.k) == (7, 1)
    assert code.hx == STEANE_MATRIX
    assert code.hz == STEANE_MATRIX
    assert code.girth == 4


def test_unknown_code_rejected():
    with pytest.raises(KeyError):
        builtin_code("LP04-999")


def test_make_css_code_rejects_noncommuting():
    hx = BinaryMatrix.from_dense([[1, 1, 0]])
    hz = BinaryMatrix.from_dense([[1, 0, 0]])
    with pytest.raises(ValueError):
        make_css_code(hx, hz)


# -- girth ----------------------------------------------------------------------


def test_girth_lp04_175_is_6():
    assert builtin_code("LP04-175").girth_x == 6


def test_girth_lp04_425_is_8():
    assert builtin_code("LP04-425").girth_x == 8


def test_girth_smallest_cycle():
    assert girth(BinaryMatrix.from_dense([[1, 1], [1, 1]])) == 4


def test_girth_shared_pair_gives_4():
    rng = np.random.default_rng(11)
    for _ in range(10):
        dense = (rng.random((6, 12)) < 0.3).astype(np.uint8)
        dense[2, :2] = 1
        dense[4, :2] = 1  # two rows sharing two columns
        assert girth(BinaryMatrix.from_dense(dense)) == 4


def test_girth_acyclic():
    dense = np.zeros((2, 3), np.uint8)
    dense[0, 0] = dense[0, 1] = dense[1, 2] = 1  # a tree
    assert girth(BinaryMatrix.from_dense(dense)) == ACYCLIC
    assert math.isinf(ACYCLIC)


def test_girth_matches_networkx():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(12)
    for _ in range(8):
        dense = (rng.random((8, 14)) < 0.25).astype(np.uint8)
        g = nx.Graph()
        g.add_nodes_from(("v", j) for j in range(14))
        g.add_nodes_from(("c", i) for i in range(8))
        for i, j in zip(*np.nonzero(dense)):
            g.add_edge(("c", int(i)), ("v", int(j)))
        expected = nx.girth(g)
        got = girth(BinaryMatrix.from_dense(dense))
        assert got == expected
