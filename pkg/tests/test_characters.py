import math

import numpy as np
import pytest

from nonvanish.characters import (
    batch_twisted_sum,
    enumerate_characters,
    even_orthogonality_rhs,
    even_primitive_pair_sum_exact,
    gauss_root,
    gauss_sums_all,
    unit_group_generators,
)
from nonvanish.errors import CapacityError, SpecValidationError
from nonvanish.sieves import euler_phi, phi_star


def test_counts_match_phi_and_phi_star():
    for q in range(3, 200):
        t = enumerate_characters(q)
        assert t.size == euler_phi(q)
        assert int(t.is_primitive.sum()) == phi_star(q)


@pytest.mark.parametrize(
    "q,expected", [(5, 1), (3, 0), (7, 2), (8, 1), (12, 1), (101, 49)]
)
def test_even_primitive_counts(q, expected):
    t = enumerate_characters(q)
    assert len(t.even_primitive_indices()) == expected


def test_prime_modulus_group_is_cyclic():
    t = enumerate_characters(101)
    assert len(t.generators) == 1
    assert t.generators[0][1] == 100
    assert t.is_prime_modulus()


def test_principal_character_even_conductor_one():
    for q in (5, 8, 12, 60):
        t = enumerate_characters(q)
        assert bool(t.parity_even[0])
        assert t.conductor[0] == 1
        assert np.all(t.exponents[0] == 0)


def test_bad_modulus():
    with pytest.raises(SpecValidationError):
        enumerate_characters(2)
    with pytest.raises(CapacityError):
        enumerate_characters(200_001)


def test_parity_matches_value_at_minus_one():
    for q in (5, 8, 16, 21, 45):
        t = enumerate_characters(q)
        vals = t.values_at(q - 1)
        for i in range(t.size):
            expected = 1.0 if t.parity_even[i] else -1.0
            assert abs(vals[i] - expected) < 1e-12


def test_values_multiplicative_and_periodic():
    t = enumerate_characters(21)
    for m, n in [(2, 5), (4, 11), (8, 13)]:
        lhs = t.values_at((m * n) % 21)
        rhs = t.values_at(m) * t.values_at(n)
        assert np.max(np.abs(lhs - rhs)) < 1e-12
    assert np.all(t.values_at(7) == 0)  # gcd(7, 21) > 1


def _conductor_by_full_induction(t, i):
    # slow reference: smallest divisor f with chi trivial on a == 1 mod f
    q = t.q
    E = t.exponent_lcm
    for f in sorted(d for d in range(1, q + 1) if q % d == 0):
        ok = True
        for a in range(1, q):
            if a % f == 1 % f and math.gcd(a, q) == 1:
                j = t.residue_to_index[a]
                if (t.exponents[i] @ t.scaled_dlogs[j]) % E != 0:
                    ok = False
                    break
        if ok:
            return f
    return q


def test_conductors_against_full_induction_sweep():
    for q in (5, 8, 12, 16, 24, 36, 45, 60):
        t = enumerate_characters(q)
        for i in range(t.size):
            assert t.conductor[i] == _conductor_by_full_induction(t, i)


def test_conjugate_indices():
    t = enumerate_characters(35)
    conj = t.conjugate_indices()
    for m in (2, 3, 4):
        vals = t.values_at(m)
        assert np.max(np.abs(vals[conj] - np.conj(vals))) < 1e-12


# -- batch engine ----------------------------------------------------------


def test_batch_orthogonality_over_complete_system():
    for q in (7, 12, 101):
        t = enumerate_characters(q)
        s = batch_twisted_sum(np.ones(q - 1), t)
        assert abs(s[0] - euler_phi(q)) < 1e-9
        assert np.max(np.abs(s[1:])) < 1e-9


def test_batch_ignores_noncoprime_support():
    q = 15
    t = enumerate_characters(q)
    c = np.zeros(45)
    c[q - 1] = 3.0  # m = q
    c[2 * q - 1] = -1.5  # m = 2q
    assert np.max(np.abs(batch_twisted_sum(c, t))) == 0.0


def test_batch_empty_coefficients():
    t = enumerate_characters(7)
    assert np.all(batch_twisted_sum(np.array([]), t) == 0)


def _naive_twisted(c, t):
    out = np.zeros(t.size, dtype=complex)
    for i, cm in enumerate(c):
        m = i + 1
        if math.gcd(m, t.q) == 1:
            out += cm * t.values_at(m)
    return out


@pytest.mark.parametrize("q", [101, 103])
def test_batch_fft_path_matches_naive(q):
    rng = np.random.default_rng(7)
    c = rng.normal(size=350) + 1j * rng.normal(size=350)
    t = enumerate_characters(q)
    got = batch_twisted_sum(c, t)
    want = _naive_twisted(c, t)
    assert np.max(np.abs(got - want)) <= 1e-9 * np.max(np.abs(want))


@pytest.mark.parametrize("q", [12, 35, 16])
def test_batch_matrix_path_matches_naive(q):
    rng = np.random.default_rng(11)
    c = rng.normal(size=90) + 1j * rng.normal(size=90)
    t = enumerate_characters(q)
    got = batch_twisted_sum(c, t)
    want = _naive_twisted(c, t)
    assert np.max(np.abs(got - want)) <= 1e-10 + 1e-9 * np.max(np.abs(want))


def test_batch_linearity():
    q = 101
    t = enumerate_characters(q)
    rng = np.random.default_rng(3)
    c1 = rng.normal(size=50)
    c2 = rng.normal(size=50)
    lhs = batch_twisted_sum(c1 + c2, t)
    rhs = batch_twisted_sum(c1, t) + batch_twisted_sum(c2, t)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_batch_conjugation_for_real_coefficients():
    q = 13
    t = enumerate_characters(q)
    c = np.arange(1, 30, dtype=float) ** -0.5
    s = batch_twisted_sum(c, t)
    conj = t.conjugate_indices()
    assert np.max(np.abs(s[conj] - np.conj(s))) < 1e-12


# -- Gauss sums --------------------------------------------------------------


def test_gauss_sum_quadratic_mod5_is_sqrt5():
    t = enumerate_characters(5)
    i = int(t.even_primitive_indices()[0])
    g = gauss_root(i, t)
    assert abs(g.tau - math.sqrt(5)) < 1e-12  # real and positive
    assert abs(abs(g.epsilon) - 1) < 1e-12


def test_gauss_sum_mod8_real_sqrt8():
    t = enumerate_characters(8)
    i = int(t.even_primitive_indices()[0])
    g = gauss_root(i, t)
    assert abs(g.tau.imag) < 1e-12
    assert abs(abs(g.tau) - math.sqrt(8)) < 1e-12


def test_gauss_root_rejects_non_primitive():
    t = enumerate_characters(5)
    with pytest.raises(SpecValidationError):
        gauss_root(0, t)  # principal


def test_root_numbers_unimodular_small_moduli():
    for q in (5, 8, 13, 37, 101, 160):
        t = enumerate_characters(q)
        idx = t.even_primitive_indices()
        taus = gauss_sums_all(t)[idx]
        assert np.max(np.abs(np.abs(taus) - math.sqrt(q))) < 1e-10 if len(idx) else True


# -- orthogonality closed form ----------------------------------------------


def test_orthogonality_examples():
    assert even_orthogonality_rhs(1, 1, 5) == 1
    assert even_orthogonality_rhs(2, 1, 5) == -1
    t8 = enumerate_characters(8)
    assert even_orthogonality_rhs(3, 3, 8) == even_primitive_pair_sum_exact(3, 3, t8)


def test_orthogonality_precondition():
    with pytest.raises(SpecValidationError):
        even_orthogonality_rhs(5, 1, 5)


@pytest.mark.parametrize("q", [5, 7, 8, 12])
def test_orthogonality_exact_for_all_coprime_pairs(q):
    t = enumerate_characters(q)
    for m in range(1, q):
        for n in range(1, q):
            if math.gcd(m * n, q) > 1:
                continue
            brute = even_primitive_pair_sum_exact(m, n, t)
            assert brute == even_orthogonality_rhs(m, n, q), (q, m, n)


def test_orthogonality_sampled_sweep_to_200():
    import random

    rng = random.Random(17)
    for q in range(3, 201):
        t = enumerate_characters(q)
        for _ in range(8):
            while True:
                m, n = rng.randrange(1, q), rng.randrange(1, q)
                if math.gcd(m * n, q) == 1:
                    break
            assert even_primitive_pair_sum_exact(m, n, t) == even_orthogonality_rhs(
                m, n, q
            ), (q, m, n)


def test_unit_group_generators_orders():
    for q in (8, 16, 21, 100):
        gens = unit_group_generators(q)
        prod = 1
        for g, o in gens:
            assert pow(g, o, q) == 1
            prod *= o
        assert prod == euler_phi(q)
