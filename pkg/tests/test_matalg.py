import itertools

import numpy as np
import pytest

from piforge.coeffring import make_field
from piforge.errors import CharacteristicZero, MixedSizes, NotAField, NotPPower, SizeTooLarge
from piforge.matalg import (Matrix, char_poly, is_semisimple, left_regular, matrix_char_coeff,
                            minimal_polynomial, q_char_coeffs, symmetrized_char_coeffs)

import oracles

F2, F3, F5, F7, Z = (make_field(p) for p in (2, 3, 5, 7, 0))
GF4 = make_field(2, 2)


def M(F, rows):
    return Matrix.from_lists(F, rows)


def random_matrix(rng, F, n, lo=-3, hi=3):
    if F.p == 0:
        return M(F, rng.integers(lo, hi + 1, size=(n, n)).tolist())
    return M(F, rng.integers(0, F.order, size=(n, n)).tolist())


def test_charpoly_examples():
    assert char_poly(Matrix.identity(Z, 2)).full() == [1, -2, 1]
    assert char_poly(M(F2, [[0, 1], [1, 1]])).coeffs == (1, 1)
    assert char_poly(Matrix.diag(F5, [1, 2])).full() == [2, 2, 1]
    assert str(char_poly(M(F2, [[0, 1], [1, 1]]))) == "L^2 + L + 1"


def test_charpoly_size_cap():
    with pytest.raises(SizeTooLarge):
        char_poly(Matrix.identity(F2, 17))


def test_q_char_coeffs():
    a = M(F2, [[0, 1], [1, 1]])
    assert q_char_coeffs(a, 2).coeffs == (1, 1)
    assert char_poly(a ** 2).coeffs == (1, 1)
    assert q_char_coeffs(a, 1) == char_poly(a)
    with pytest.raises(NotPPower):
        q_char_coeffs(a, 3)
    with pytest.raises(CharacteristicZero):
        q_char_coeffs(Matrix.identity(Z, 2), 2)


@pytest.mark.parametrize("F", [F3, F5, F7])
def test_q_char_coeffs_diagonal_symmetric_oracle(F):
    R = oracles.Ring(F.p)
    for diag in itertools.product(range(F.p), repeat=3):
        e = oracles.elementary_symmetric(R, diag)
        cp = q_char_coeffs(Matrix.diag(F, diag), F.p)
        assert [cp.signed(k) for k in range(1, 4)] == [pow(e[k], F.p, F.p) for k in range(1, 4)]


def test_left_regular_examples():
    assert left_regular(Matrix.identity(F2, 2)) == Matrix.identity(F2, 4)
    a = Matrix.diag(F5, [1, 2])
    assert char_poly(left_regular(a)) == char_poly(a).power(2)


def test_left_regular_acts_by_left_multiplication():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a, x = random_matrix(rng, F3, 3), random_matrix(rng, F3, 3)
        vec = [v for row in x.rows for v in row]
        img = [sum(c * v for c, v in zip(row, vec)) % 3 for row in left_regular(a).rows]
        assert img == [v for row in (a * x).rows for v in row]


def test_matrix_char_coeff():
    assert matrix_char_coeff(M(Z, [[1, 2], [3, 4]]), 1) == Matrix.scalar(Z, 2, 5)
    assert matrix_char_coeff(Matrix.unit(F3, 2, 0, 1), 1).is_zero()
    rng = np.random.default_rng(1)
    for _ in range(20):
        a = random_matrix(rng, F5, 3)
        assert matrix_char_coeff(a, 1) == Matrix.scalar(F5, 3, a.trace())
    with pytest.raises(SizeTooLarge):
        matrix_char_coeff(Matrix.identity(F2, 4), 1)


def test_symmetrized():
    mats = [Matrix.diag(F7, [1, 1]), Matrix.diag(F7, [1, 2])]
    assert symmetrized_char_coeffs(mats, 1, 1) == 5
    assert symmetrized_char_coeffs(mats, 1, 2) == 6
    a = M(F7, [[1, 2], [3, 4]])
    assert symmetrized_char_coeffs([a], 2, 1) == char_poly(a).signed(2)
    with pytest.raises(MixedSizes):
        symmetrized_char_coeffs([Matrix.identity(F7, 2), Matrix.identity(F7, 3)], 1, 1)


def test_semisimple():
    assert not is_semisimple(Matrix.unit(F2, 2, 0, 1))
    assert is_semisimple(Matrix.identity(F2, 2))
    assert minimal_polynomial(Matrix.unit(F2, 2, 0, 1)) == [0, 0, 1]
    with pytest.raises(NotAField):
        is_semisimple(Matrix.identity(Z, 2))


def test_matrix_json_roundtrip():
    a = M(GF4, [[0, 1], [2, 3]])
    assert Matrix.from_json(a.to_json()) == a
    assert str(M(F2, [[0, 1], [1, 1]])) == "[0 1; 1 1]"


@pytest.mark.parametrize("F", [Z, F2, F3, F5, GF4])
def test_charpoly_matches_cofactor_and_leibniz(F):
    rng = np.random.default_rng(100 + F.order)
    R = oracles.Ring(F.p, F.m)
    for trial in range(60):
        n = 1 + trial % 4
        a = random_matrix(rng, F, n)
        rows = [list(r) for r in a.rows]
        cp = char_poly(a)
        assert cp.full() == oracles.charpoly_cofactor(R, rows)
        det = oracles.det_leibniz(R, rows)
        assert cp.signed(n) == det
        assert cp.evaluate(a).is_zero()
