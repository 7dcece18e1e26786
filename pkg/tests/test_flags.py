from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from qesforms.exactpoly import DiffOp, Polynomial
from qesforms.flags import (
    basis_dimension,
    enumerate_basis,
    flag_preserved,
    matrix_of,
    weighted_degree,
)
from qesforms.models import ModelParams, get_model

F = Fraction
t = Polynomial.variable(1, 0)
weights = st.lists(st.integers(1, 4), min_size=1, max_size=4)


def brute_force_count(f, n):
    import itertools

    ranges = [range(n // w + 1) for w in f]
    return sum(1 for p in itertools.product(*ranges) if weighted_degree(p, f) <= n)


class TestEnumeration:
    @pytest.mark.parametrize(
        "d, f, n, size",
        [(2, (1, 1), 2, 6), (2, (1, 2), 4, 9), (4, (1, 5, 8, 12), 12, 30), (3, (1, 2, 3), 6, 23)],
    )
    def test_sizes(self, d, f, n, size):
        assert len(enumerate_basis(d, f, n)) == size
        assert basis_dimension(d, f, n) == size

    def test_constants_only(self):
        for d in range(1, 5):
            assert basis_dimension(d, (3,) * d, 0) == 1

    def test_tie_break_last_variable_most_significant(self):
        basis = enumerate_basis(2, (1, 1), 2)
        assert basis.monomials == ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2))

    def test_bad_weights(self):
        with pytest.raises(ValueError):
            enumerate_basis(2, (1, 0), 3)
        with pytest.raises(ValueError):
            enumerate_basis(2, (1, 1), -1)

    @pytest.mark.parametrize("d", range(1, 7))
    def test_dimension_law(self, d):
        for n in range(13):
            assert basis_dimension(d, (1,) * d, n) == comb(n + d, d)

    @given(weights, st.integers(0, 12))
    def test_counts_lattice_points(self, f, n):
        assert basis_dimension(len(f), f, n) == brute_force_count(f, n)

    @given(weights, st.integers(0, 10))
    def test_order_and_index(self, f, n):
        basis = enumerate_basis(len(f), f, n)
        degs = [weighted_degree(m, f) for m in basis.monomials]
        assert degs == sorted(degs)
        assert len(set(basis.monomials)) == len(basis)
        for i in range(len(basis)):
            assert basis.index_of(basis.monomial_at(i)) == i


class TestWeightedDegree:
    def test_examples(self):
        assert weighted_degree((0, 0, 0), (1, 2, 3)) == 0
        assert weighted_degree((1, 1, 0), (1, 2, 3)) == 3
        assert weighted_degree((0, 0, 0, 1), (1, 5, 8, 12)) == 12


class TestMatrix:
    def test_laguerre_columns(self):
        w, c = F(3), F(5)
        L = DiffOp(1, [(t * -2, (2,)), (t * (2 * w) - c, (1,))])
        M = matrix_of(L, enumerate_basis(1, (1,), 2))
        assert M.is_closed()
        # L(1) = 0, L(t) = 2wt - c, L(t^2) = -4t + 4wt^2 - 2ct
        assert M.dense() == [[0, -c, 0], [0, 2 * w, -4 - 2 * c], [0, 0, 4 * w]]

    def test_degree_raising_remainder(self):
        M = matrix_of(DiffOp.term(t * t, (1,)), enumerate_basis(1, (1,), 1))
        assert M.remainder == {1: t * t}

    def test_g2_closed(self):
        h = get_model("g2", ModelParams(omega=1, nu=F(1, 3), mu=F(1, 5))).operator
        assert matrix_of(h, enumerate_basis(2, (1, 2), 3)).is_closed()


class TestFlagPreserved:
    def test_calogero(self):
        h = get_model("calogero", ModelParams(omega=1, nu=F(1, 3), N=3)).operator
        assert flag_preserved(h, (1, 1), 8).preserved

    def test_h4(self):
        m = get_model("h4", ModelParams(omega=1, nu=F(1, 3)))
        assert flag_preserved(m.operator, m.f, 24).preserved

    def test_witness(self):
        rep = flag_preserved(DiffOp.term(t * t, (1,)), (1,), 3)
        assert not rep.preserved
        assert rep.to_json()["witness"] == {"monomial": "t1", "image_term": "t1^2"}

    @pytest.mark.parametrize("name", ["calogero", "bcn", "g2", "h3"])
    def test_block_lower_triangular(self, name):
        m = get_model(name, ModelParams(omega=2, nu=F(1, 3), nu2=F(1, 2), mu=F(1, 4), N=3))
        basis = enumerate_basis(m.d, m.f, 6)
        M = matrix_of(m.operator, basis)
        assert M.is_closed()
        for j, col in enumerate(M.columns):
            for i in col:
                assert basis.degree_of(i) <= basis.degree_of(j)
        assert M.is_block_triangular()
