from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tspqaoa.formulation import (
    BinaryPolynomial,
    PauliPolynomial,
    dumps_polynomial,
    energy_table,
    evaluation_matrix,
    gate_count,
    loads_polynomial,
    mobius_pair_coefficients,
    pauli_expand,
    solve_pair_coefficients,
    subset_order,
)
from tspqaoa.formulation.polynomial import mobius_transform, solve_triangular

F = Fraction


def random_poly(rng, nvars, nterms, scale=100.0):
    terms = {int(rng.integers(1 << nvars)): float(rng.normal(0, scale)) for _ in range(nterms)}
    return BinaryPolynomial(nvars, terms)


def brute_value(terms, z):
    """Exact polynomial value by checking every term's support."""
    return sum((F(c) for m, c in terms.items() if m & z == m), F(0))


polys = st.integers(1, 8).flatmap(
    lambda n: st.builds(
        BinaryPolynomial,
        st.just(n),
        st.dictionaries(
            st.integers(0, (1 << n) - 1),
            st.floats(-1e6, 1e6, allow_nan=False) | st.integers(-100, 100),
            max_size=20,
        ),
    )
)


class TestAlgebra:
    def test_idempotent_variables(self):
        x = BinaryPolynomial.variable(3, 1)
        assert x * x == x
        assert (1 - x) ** 2 == 1 - x

    def test_zero_terms_dropped(self):
        p = BinaryPolynomial(2, {1: 2.5})
        p.add_term(1, -2.5)
        assert len(p) == 0

    def test_embed(self):
        p = BinaryPolynomial(2, {0b11: 3, 0b01: 1})
        q = p.embed(6, [4, 2])
        assert q.terms == {0b010100: 3, 0b010000: 1}

    def test_mask_range_checked(self):
        with pytest.raises(ValueError):
            BinaryPolynomial(2, {0b100: 1})

    @settings(max_examples=60, deadline=None)
    @given(polys, polys)
    def test_product_matches_pointwise(self, p, q):
        if p.num_vars != q.num_vars:
            q = BinaryPolynomial(p.num_vars, {m & ((1 << p.num_vars) - 1): c for m, c in q.terms.items()})
        r = p * q + p
        for z in range(1 << p.num_vars):
            assert r.evaluate(z) == p.evaluate(z) * q.evaluate(z) + p.evaluate(z)

    def test_evaluate_accepts_bit_sequence(self):
        p = BinaryPolynomial(3, {0b101: 2, 0: 1})
        assert p.evaluate([1, 0, 1]) == 3
        assert p.evaluate(0b101) == 3
        with pytest.raises(ValueError):
            p.evaluate([1, 0])


class TestPairSolvers:
    def test_k1_by_hand(self):
        P, W12, W21 = 17.0, 2.5, 2.5
        rhs = {(0, 0): P, (0, 1): W12, (1, 0): W21, (1, 1): P}
        poly = solve_pair_coefficients(rhs, 1)
        # bit 0 is the earlier step, bit 1 the later one
        assert poly.coefficient(0b00) == P
        assert poly.coefficient(0b01) == W21 - P
        assert poly.coefficient(0b10) == W12 - P
        assert poly.coefficient(0b11) == 2 * P - W12 - W21

    def test_k1_asymmetric_values(self):
        rhs = {(0, 0): 5, (0, 1): 1, (1, 0): 2, (1, 1): 7}
        poly = solve_pair_coefficients(rhs, 1)
        assert poly.terms == {0: 5, 1: -3, 2: -4, 3: 9}

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_constant(self, k):
        poly = solve_pair_coefficients([3.25] * (1 << 2 * k), k)
        assert poly.terms == {0: F(3.25)}

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_round_trip_random(self, k, rng):
        for _ in range(5):
            rhs = rng.normal(0, 50, size=1 << 2 * k)
            poly = solve_pair_coefficients(list(rhs), k)
            assert len(poly) <= 1 << 2 * k
            for y, v in enumerate(rhs):
                assert brute_value(poly.terms, y) == F(float(v))

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_mobius_equals_triangular(self, k, rng):
        for _ in range(5):
            rhs = list(rng.normal(0, 1e3, size=1 << 2 * k))
            assert mobius_pair_coefficients(rhs, k) == solve_pair_coefficients(rhs, k)

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_indicator_of_all_ones(self, k):
        size = 1 << 2 * k
        rhs = [0] * size
        rhs[-1] = 1
        tri = solve_pair_coefficients(rhs, k)
        assert tri.terms == {size - 1: 1}
        assert mobius_pair_coefficients(rhs, k) == tri

    def test_zero_rhs(self):
        assert len(mobius_pair_coefficients([0.0] * 16, 2)) == 0

    def test_incomplete_rhs(self):
        with pytest.raises(ValueError, match="incomplete"):
            solve_pair_coefficients({(0, 0): 1.0}, 1)
        with pytest.raises(ValueError, match="incomplete"):
            mobius_pair_coefficients([1.0, 2.0], 1)

    def test_big_integers_stay_exact(self):
        rhs = [F(1, 3), 1e300, -1e300, F(2 ** 200)]
        a, b = solve_triangular(rhs, 2), mobius_transform(rhs, 2)
        assert a == b
        assert [a.evaluate(z) for z in range(4)] == [F(1, 3), F(1e300), F(-1e300), F(2 ** 200)]


class TestEvaluationMatrix:
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_lower_unit_triangular(self, k):
        E = evaluation_matrix(2 * k)
        assert E.shape == (1 << 2 * k,) * 2
        assert np.all(np.triu(E, 1) == 0)
        assert np.all(np.diag(E) == 1)
        assert round(np.linalg.det(E.astype(float))) == 1

    def test_order_is_by_subset_size(self):
        order = subset_order(3)
        assert order == [0, 1, 2, 4, 3, 5, 6, 7]

    def test_entries_are_monomials(self):
        E = evaluation_matrix(4)
        order = subset_order(4)
        for r, row in enumerate(order):
            for c, col in enumerate(order):
                assert E[r, c] == int(all(row >> i & 1 for i in range(4) if col >> i & 1))


class TestEnergyTable:
    def test_constant(self):
        t = energy_table(BinaryPolynomial.constant(3, 2.5), 3)
        assert list(t.energies) == [2.5] * 8

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            energy_table(BinaryPolynomial(3), 4)

    def test_guard(self):
        with pytest.raises(ValueError):
            energy_table(BinaryPolynomial(27))

    @pytest.mark.parametrize("nvars", [1, 4, 7, 10])
    def test_zeta_matches_direct(self, nvars, rng):
        p = random_poly(rng, nvars, 3 * nvars)
        assert energy_table(p, method="zeta") == energy_table(p, method="direct")

    @pytest.mark.parametrize(
        "make",
        [
            lambda rng, m: int(rng.integers(-1000, 1000)) / 8,  # fits int64
            lambda rng, m: float(rng.normal()) * (1.0 if m % 3 else 1e-3),  # two limbs
            lambda rng, m: float(rng.normal()) * (2.0 ** 500 if m % 3 == 0 else 1e-3),  # big ints
        ],
        ids=["int64", "limbs", "bigint"],
    )
    def test_correct_rounding_all_paths(self, make, rng):
        terms = {m: make(rng, m) for m in range(64)}
        t = energy_table(BinaryPolynomial(6, terms))
        for z in range(64):
            assert t[z] == float(brute_value(terms, z))

    def test_rational_denominators(self):
        p = BinaryPolynomial(2, {0: F(1, 3), 1: F(1, 3), 3: F(1, 7)})
        assert list(energy_table(p).energies) == [
            float(F(1, 3)), float(F(2, 3)), float(F(1, 3)), float(F(2, 3) + F(1, 7))
        ]


class TestPauli:
    def test_single_variable(self):
        pp = pauli_expand(BinaryPolynomial.variable(1, 0))
        assert pp.terms == {0: F(1, 2), 1: F(-1, 2)}

    def test_product(self):
        pp = pauli_expand(BinaryPolynomial(2, {0b11: 1}))
        assert pp.terms == {0: F(1, 4), 1: F(-1, 4), 2: F(-1, 4), 3: F(1, 4)}

    @settings(max_examples=60, deadline=None)
    @given(polys)
    def test_spectrum_preserved(self, p):
        pp = pauli_expand(p)
        assert pp.spectrum() == energy_table(p)
        for z in range(1 << p.num_vars):
            assert pp.evaluate(z) == p.evaluate(z)

    def test_spectrum_random_ten_qubits(self, rng):
        p = random_poly(rng, 10, 60)
        assert pauli_expand(p).spectrum() == energy_table(p)

    def test_gate_count_zz(self):
        c = gate_count(PauliPolynomial(3, {0b011: F(1)}))
        assert (c.rotations, c.two_qubit) == (1, 2)
        assert c.weight_histogram == {2: 1}

    def test_gate_count_ignores_identity(self):
        c = gate_count(PauliPolynomial(3, {0: F(5), 0b111: F(1), 0b100: F(2)}))
        assert (c.rotations, c.two_qubit) == (2, 4)

    def test_gate_count_by_enumeration(self, rng):
        p = random_poly(rng, 8, 40)
        pp = pauli_expand(p)
        # independent tally straight from the Z-string supports
        total = 0
        for T, c in pp.terms.items():
            w = sum(1 for i in range(8) if T >> i & 1)
            if c != 0 and w >= 1:
                total += 2 * (w - 1)
        assert gate_count(pp).two_qubit == total


class TestTextFormat:
    @settings(max_examples=40, deadline=None)
    @given(polys)
    def test_binary_round_trip(self, p):
        assert loads_polynomial(dumps_polynomial(p)) == p

    def test_pauli_round_trip(self, rng):
        pp = pauli_expand(random_poly(rng, 5, 10))
        back = loads_polynomial(dumps_polynomial(pp))
        assert isinstance(back, PauliPolynomial)
        assert back.terms == pp.terms

    def test_layout(self):
        text = dumps_polynomial(BinaryPolynomial(4, {0: 1.5, 0b1010: -2, 0b0001: F(1, 3)}))
        assert text.splitlines() == [
            "# binary-polynomial num_vars=4",
            "- 1.5",
            "0 1/3",
            "1,3 -2.0",
        ]

    @pytest.mark.parametrize(
        "text",
        ["", "- 1.0\n", "# binary-polynomial num_vars=2\n0,0 1.0\n",
         "# binary-polynomial num_vars=2\n5 1.0\n", "# binary-polynomial num_vars=2\n0\n",
         "# mystery num_vars=2\n"],
    )
    def test_malformed(self, text):
        with pytest.raises(ValueError):
            loads_polynomial(text)

