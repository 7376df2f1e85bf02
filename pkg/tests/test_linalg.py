import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from mell.couplings import all_ones, random_scheme
from mell.hamiltonian import build_h
from mell.linalg import (
    Echelon,
    StructuralViolation,
    certified_nullity,
    complement,
    induced_quotient_map,
    kernel_basis,
    modular_prime,
    rank,
    rational_reconstruction,
    span_rank,
)
from mell.matrix import SparseRationalMatrix, block
from mell.state_space import ChainSpec
from mell.supercharge import q_block

small = st.integers(-3, 3)


@st.composite
def matrices(draw, max_dim=7, density=0.5):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    rows = []
    for _ in range(r):
        rows.append([draw(small) if draw(st.floats(0, 1)) < density else 0 for _ in range(c)])
    if r == 0:
        return SparseRationalMatrix(0, c)
    return SparseRationalMatrix.from_dense(rows) if c else SparseRationalMatrix(r, 0)


class TestMatrix:
    def test_entries_sorted_without_zeros(self):
        m = SparseRationalMatrix.from_entries(3, 3, [(2, 0, 1), (0, 2, Fraction(1, 2)), (1, 1, 0)])
        assert m.entries == [(0, 2, Fraction(1, 2)), (2, 0, 1)]
        assert m.nnz == 2

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            SparseRationalMatrix.from_entries(2, 2, [(2, 0, 1)])

    def test_products_and_sums(self):
        a = SparseRationalMatrix.from_dense([[1, 2], [0, 1]])
        b = SparseRationalMatrix.from_dense([[0, 1], [1, 0]])
        assert (a @ b).to_dense() == [[2, 1], [1, 0]]
        assert (a + b - a) == b
        assert (-a).to_dense() == [[-1, -2], [0, -1]]
        assert a.T.T == a
        assert a @ [1, 1] == [3, 1]

    def test_block_assembly(self):
        a = SparseRationalMatrix.from_dense([[1]])
        m = block([[a, None], [None, a]], [1, 1], [1, 1])
        assert m.to_dense() == [[1, 0], [0, 1]]

    def test_coo_json_round_trip(self):
        m = SparseRationalMatrix.from_entries(2, 3, [(0, 1, Fraction(-2, 3)), (1, 2, 4)])
        assert SparseRationalMatrix.from_json(m.to_json(grade=1)) == m
        assert m.to_coo() == [[0, 1, -2, 3], [1, 2, 4, 1]]


class TestRank:
    def test_zero_matrix(self):
        assert rank(SparseRationalMatrix(4, 5)) == 0
        assert rank(SparseRationalMatrix(0, 3)) == 0

    def test_ring_of_three(self):
        spec = ChainSpec.periodic(3, 1)
        assert q_block(spec, all_ones(1), 1).shape == (0, 3)
        q0 = q_block(spec, all_ones(1), 0)
        assert q0.shape == (3, 1) and rank(q0) == 1

    @settings(max_examples=80, deadline=None)
    @given(matrices())
    def test_matches_sympy(self, m):
        assert rank(m) == oracles.dense_rank(m)

    @settings(max_examples=60, deadline=None)
    @given(matrices(), st.randoms(use_true_random=False))
    def test_transpose_and_permutation_invariant(self, m, rnd):
        r = rank(m)
        assert rank(m.T) == r
        rows = list(range(m.n_rows))
        cols = list(range(m.n_cols))
        rnd.shuffle(rows)
        rnd.shuffle(cols)
        assert rank(m.submatrix(rows, cols)) == r

    def test_deterministic_across_runs(self):
        q = q_block(ChainSpec.periodic(10, 2), all_ones(2), 4)
        assert len({rank(q) for _ in range(100)}) == 1

    def test_modular_is_lower_bound_and_certified(self):
        rng = random.Random(3)
        for n in (8, 9, 10):
            spec = ChainSpec.free(n, 2)
            scheme = random_scheme(2, rng)
            for f in range(4):
                q = q_block(spec, scheme, f)
                exact = rank(q)
                for seed in range(5):
                    assert rank(q, method="modular", seed=seed) <= exact
                assert rank(q, method="modular", certify=True, seed=1) == exact

    def test_prime_is_large_and_seeded(self):
        p = modular_prime(11)
        assert p > 2**30 and p == modular_prime(11)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            rank(SparseRationalMatrix.from_dense([[1]]), method="float")


class TestKernel:
    def test_full_rank(self):
        assert kernel_basis(SparseRationalMatrix.identity(4)) == []

    def test_ring_ground_states(self):
        h = build_h(ChainSpec.periodic(3, 1), all_ones(1), 1)
        basis = kernel_basis(h)
        assert len(basis) == 2
        assert all(not any(h @ v) for v in basis)

    @settings(max_examples=60, deadline=None)
    @given(matrices())
    def test_kernel_vectors(self, m):
        basis = kernel_basis(m)
        assert len(basis) == m.n_cols - rank(m)
        assert all(not any(m @ v) for v in basis)
        assert span_rank(basis) == len(basis)

    @settings(max_examples=40, deadline=None)
    @given(matrices(max_dim=8))
    def test_certified_nullity(self, m):
        assert certified_nullity(m, seed=5) == m.n_cols - rank(m)

    def test_certified_nullity_needs_several_primes(self):
        # entries near 2**100 defeat reconstruction from a single 61-bit prime
        big = 2**100 + 277
        m = SparseRationalMatrix.from_dense([[1, big, 0], [0, 1, -big]])
        assert certified_nullity(m, seed=2) == 1

    def test_rational_reconstruction(self):
        p = 2**61 - 1
        x = Fraction(-355, 113)
        a = x.numerator * pow(x.denominator, -1, p) % p
        assert rational_reconstruction(a, p) == x


class TestSubquotients:
    def test_echelon_express(self):
        e = Echelon()
        assert e.add([1, 0, 1], label=0)
        assert e.add([0, 1, 1], label=1)
        assert not e.add([1, 1, 2])
        assert e.express([2, 3, 5]) == {0: 2, 1: 3}
        assert e.express([0, 0, 1]) is None

    def test_complement(self):
        ker = [[1, 0, 0], [0, 1, 0]]
        assert complement(ker, [[1, 1, 0]]) == [[1, 0, 0]]
        with pytest.raises(ValueError):
            complement(ker, [[0, 0, 1]])

    def test_collapsed_quotient(self):
        ker = [[1, 0], [0, 1]]
        m = induced_quotient_map(SparseRationalMatrix.identity(2), ker, ker, ker, ker)
        assert m.shape == (0, 0)

    def test_single_site(self):
        # one site that may be empty or occupied: ker Q = im Q on the occupied state
        q = SparseRationalMatrix.from_dense([[1]])
        assert kernel_basis(q) == []
        ker_top = kernel_basis(SparseRationalMatrix(0, 1))
        quotient = complement(ker_top, [[1]])
        assert quotient == []

    def test_induced_map_squares_to_zero(self):
        # d: C0 -> C1 -> C2 with trivial "first" differential; the induced maps compose to zero
        d0 = SparseRationalMatrix.from_dense([[1], [1]])
        d1 = SparseRationalMatrix.from_dense([[1, -1]])
        e0 = [[1]]
        e1 = [[1, 0], [0, 1]]
        e2 = [[1]]
        a = induced_quotient_map(d0, e0, [], e1, [])
        b = induced_quotient_map(d1, e1, [], e2, [])
        assert (b @ a).is_zero()

    def test_ill_defined_map_reported(self):
        src_ker = [[1, 0]]
        tgt_ker = [[1, 0]]
        swap = SparseRationalMatrix.from_dense([[0, 1], [1, 0]])
        with pytest.raises(StructuralViolation):
            induced_quotient_map(swap, src_ker, [], tgt_ker, [])
