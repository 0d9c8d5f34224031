import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isofno.errors import ShapeError
from isofno.grid import D4, GroupElement, apply_group, compose, inverse, pointwise_affine, relu, translate

G = GroupElement
X = np.array([[1, 2], [3, 4]])


def test_flip_x_reverses_rows():
    np.testing.assert_array_equal(apply_group(G.FLIP_X, X), [[3, 4], [1, 2]])


def test_flip_y_reverses_columns():
    np.testing.assert_array_equal(apply_group(G.FLIP_Y, X), [[2, 1], [4, 3]])


def test_transpose():
    np.testing.assert_array_equal(apply_group(G.TRANSPOSE, X), [[1, 3], [2, 4]])


@pytest.mark.parametrize("k, g", [(1, G.ROT90), (2, G.ROT180), (3, G.ROT270)])
def test_rotations_match_numpy(k, g):
    x = np.arange(25).reshape(5, 5)
    np.testing.assert_array_equal(apply_group(g, x), np.rot90(x, k))


def test_anti_transpose():
    x = np.arange(9).reshape(3, 3)
    np.testing.assert_array_equal(apply_group(G.ANTI_TRANSPOSE, x), np.rot90(x, 2).T)


@pytest.mark.parametrize("g", [G.FLIP_X, G.FLIP_Y, G.TRANSPOSE, G.ROT180, G.ANTI_TRANSPOSE])
def test_involutions(g):
    x = np.random.default_rng(0).standard_normal((3, 6, 6))
    np.testing.assert_array_equal(apply_group(g, apply_group(g, x)), x)


def test_composition_table_matches_arrays():
    # all 64 pairs: composing the array actions agrees with the table
    x = np.random.default_rng(1).standard_normal((7, 7))
    for g in D4:
        for h in D4:
            np.testing.assert_array_equal(apply_group(compose(g, h), x), apply_group(g, apply_group(h, x)))


def test_group_axioms():
    assert len(set(D4)) == 8
    for g in D4:
        assert compose(g, inverse(g)) is G.IDENTITY
        assert compose(G.IDENTITY, g) is g
    assert compose(G.ROT90, G.ROT90) is G.ROT180
    assert compose(G.FLIP_X, G.FLIP_Y) is G.ROT180


def test_parse_tags():
    assert G.parse("none") is G.IDENTITY
    assert G.parse(None) is G.IDENTITY
    assert G.parse("flip-x") is G.FLIP_X
    with pytest.raises(ValueError):
        G.parse("rot45")


def test_axis_swap_needs_square_grid():
    x = np.zeros((4, 6))
    assert apply_group(G.FLIP_X, x).shape == (4, 6)
    with pytest.raises(ShapeError):
        apply_group(G.TRANSPOSE, x)
    with pytest.raises(ShapeError):
        apply_group(G.IDENTITY, np.zeros(3))


def test_translate_is_circular():
    x = np.arange(16).reshape(4, 4)
    y = translate(x, (1, 2))
    assert y[1, 2] == x[0, 0]
    np.testing.assert_array_equal(translate(y, (-1, -2)), x)


def test_pointwise_affine_examples():
    rng = np.random.default_rng(2)
    v = rng.standard_normal((3, 5, 5))
    np.testing.assert_array_equal(pointwise_affine(v, np.eye(3), np.zeros(3)), v)
    np.testing.assert_array_equal(pointwise_affine(v, np.zeros((2, 3)), np.array([1.5, -2.0]))[1], np.full((5, 5), -2.0))
    out = pointwise_affine(np.array([[[1.0]], [[2.0]]]), np.array([[1.0, 1.0]]), np.array([0.0]))
    np.testing.assert_array_equal(out, [[[3.0]]])


def test_pointwise_affine_shape_errors():
    with pytest.raises(ShapeError):
        pointwise_affine(np.zeros((2, 4, 4)), np.zeros((3, 3)), np.zeros(3))
    with pytest.raises(ShapeError):
        pointwise_affine(np.zeros((2, 4, 4)), np.zeros((3, 2)), np.zeros(2))
    with pytest.raises(ShapeError):
        pointwise_affine(np.zeros((4, 4)), np.eye(1), np.zeros(1))


def test_relu():
    np.testing.assert_array_equal(relu(np.array([[-1.0, 2.0]])), [[0.0, 2.0]])
    x = np.abs(np.random.default_rng(3).standard_normal(10))
    np.testing.assert_array_equal(relu(x), x)


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 7), st.integers(0, 10**6), st.integers(1, 4), st.integers(2, 9))
def test_group_action_commutes_with_pointwise_maps(gi, seed, c, n):
    g = D4[gi]
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((c, n, n))
    M, b = rng.standard_normal((2, c)), rng.standard_normal(2)
    lhs = apply_group(g, pointwise_affine(x, M, b))
    rhs = pointwise_affine(apply_group(g, x), M, b)
    np.testing.assert_allclose(lhs, rhs, rtol=0, atol=1e-12)
    np.testing.assert_array_equal(relu(apply_group(g, x)), apply_group(g, relu(x)))
    assert np.array_equal(relu(relu(x)), relu(x))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 7), st.integers(0, 7))
def test_inverse_undoes_action(gi, hi):
    x = np.random.default_rng(gi * 8 + hi).standard_normal((5, 5))
    g = D4[gi]
    np.testing.assert_array_equal(apply_group(inverse(g), apply_group(g, x)), x)
