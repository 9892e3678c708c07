import random
from fractions import Fraction

import pytest

from nonvanish.errors import DegenerateMollifierError, SpecValidationError
from nonvanish.moments import (
    first_moment_main,
    nonvanishing_proportion,
    second_moment_main,
)
from nonvanish.optimize import (
    build_forms,
    degree_scan,
    is_positive_semidefinite,
    maximize_proportion,
    scan_csv,
    solve_exact,
    spec_from_vector,
)

HALF = Fraction(1, 2)


def test_linear_form_entries():
    model = build_forms(2, 1, HALF, HALF)
    # P:x basis vector has first moment P(1) = 1
    assert model.c[0] == 1
    assert model.basis == ("P:x^1", "P:x^2", "Q:x^1")


def test_diagonal_entry_matches_second_moment():
    model = build_forms(1, 0, HALF, HALF)
    assert model.M[0][0] == 3  # second moment of P = x at theta1 = 1/2


def test_matrix_symmetry_exact():
    model = build_forms(3, 2, HALF, Fraction(1, 3))
    for i in range(model.dim):
        for j in range(model.dim):
            assert model.M[i][j] == model.M[j][i]


def test_model_reproduces_moments_on_random_vectors():
    rng = random.Random(4)
    model = build_forms(3, 2, Fraction(2, 5), Fraction(1, 4))
    for _ in range(20):
        a = [Fraction(rng.randint(-5, 5)) for _ in range(model.dim)]
        if all(x == 0 for x in a):
            a[0] = Fraction(1)
        spec = spec_from_vector(a, 3, 2, model.theta1, model.theta2)
        assert model.first_moment(a) == first_moment_main(spec)
        assert model.second_moment(a) == second_moment_main(spec)


def test_positive_definiteness_spot_checks():
    rng = random.Random(9)
    model = build_forms(3, 2, HALF, HALF)
    assert is_positive_semidefinite(model.M)
    for _ in range(50):
        a = [Fraction(rng.randint(-7, 7)) for _ in range(model.dim)]
        if all(x == 0 for x in a):
            continue
        assert model.second_moment(a) > 0


def test_baseline_optimum_is_one_third():
    res = maximize_proportion(build_forms(1, 0, HALF, HALF))
    assert res.proportion == Fraction(1, 3)
    # optimizer coefficients proportional to P = x
    assert len(res.coeffs_p) == 1 and res.coeffs_p[0] != 0
    assert res.coeffs_q == ()


def test_degree21_contains_headline_point():
    res = maximize_proportion(build_forms(2, 1, HALF, HALF))
    assert res.proportion >= Fraction(23763, 69665)


def test_optimum_recomputes_exactly():
    res = maximize_proportion(build_forms(2, 1, HALF, HALF))
    assert nonvanishing_proportion(res.spec()) == res.proportion


def test_scale_invariance():
    model = build_forms(2, 1, HALF, HALF)
    res = maximize_proportion(model)
    a = list(res.coeffs_p) + list(res.coeffs_q)
    doubled = [2 * x for x in a]
    lhs = model.first_moment(doubled) ** 2 / model.second_moment(doubled)
    assert lhs == res.proportion


def test_degree_scan_monotone():
    rows = degree_scan(4, 3, HALF, HALF)
    by_deg = {(r.dP, r.dQ): r.proportion for r in rows}
    assert by_deg[(1, 0)] == Fraction(1, 3)
    for (dp, dq), prop in by_deg.items():
        if (dp - 1, dq) in by_deg:
            assert by_deg[(dp - 1, dq)] <= prop
        if (dp, dq - 1) in by_deg:
            assert by_deg[(dp, dq - 1)] <= prop
    assert by_deg[(2, 1)] >= Fraction(23763, 69665)


def test_scan_csv_shape():
    rows = degree_scan(2, 1, HALF, HALF)
    csv = scan_csv(rows)
    lines = csv.strip().splitlines()
    assert lines[0] == "dP,dQ,proportion_exact,proportion_decimal,coeffs"
    assert len(lines) == 1 + len(rows)
    assert lines[1].startswith("1,0,1/3,")


def test_solve_exact_regular_system():
    M = ((Fraction(2), Fraction(1)), (Fraction(1), Fraction(2)))
    c = (Fraction(1), Fraction(0))
    a, singular = solve_exact(M, c)
    assert not singular
    assert a == [Fraction(2, 3), Fraction(-1, 3)]


def test_solve_exact_singular_consistent():
    M = ((Fraction(1), Fraction(1)), (Fraction(1), Fraction(1)))
    c = (Fraction(2), Fraction(2))
    a, singular = solve_exact(M, c)
    assert singular
    assert a[0] + a[1] == 2


def test_solve_exact_singular_inconsistent():
    M = ((Fraction(1), Fraction(1)), (Fraction(1), Fraction(1)))
    c = (Fraction(1), Fraction(0))
    with pytest.raises(DegenerateMollifierError):
        solve_exact(M, c)


def test_is_positive_semidefinite_edge_cases():
    psd = ((Fraction(1), Fraction(1)), (Fraction(1), Fraction(1)))
    assert is_positive_semidefinite(psd)
    indef = ((Fraction(0), Fraction(1)), (Fraction(1), Fraction(0)))
    assert not is_positive_semidefinite(indef)
    neg = ((Fraction(-1),),)
    assert not is_positive_semidefinite(neg)


def test_build_forms_preconditions():
    with pytest.raises(SpecValidationError):
        build_forms(0, 1, HALF, HALF)
    with pytest.raises(SpecValidationError):
        degree_scan(13, 1, HALF, HALF)
