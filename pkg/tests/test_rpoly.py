from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nonvanish.errors import SpecValidationError
from nonvanish.rpoly import (
    MollifierSpec,
    RationalPoly,
    SECOND_MOMENT_RANGE_WARNING,
    affine_compose,
    antiderivative,
    frac_str,
    integrate_unit,
    preset_spec,
)

fracs = st.fractions(
    min_value=Fraction(-10), max_value=Fraction(10), max_denominator=20
)
polys = st.lists(fracs, max_size=6).map(RationalPoly.from_coeffs)


def P(*coeffs) -> RationalPoly:
    return RationalPoly.from_coeffs(coeffs)


def test_normalization_strips_trailing_zeros():
    assert P(1, 2, 0, 0).coeffs == (Fraction(1), Fraction(2))
    assert P(0, 0).is_zero()
    assert P().degree == -1


def test_antiderivative_examples():
    # Q(x) = 9/10 x -> 9/20 x^2
    assert antiderivative(P(0, "9/10")) == P(0, 0, "9/20")
    assert antiderivative(RationalPoly.zero()).is_zero()
    assert antiderivative(P(0, 0, 1)) == P(0, 0, 0, "1/3")


@given(polys)
def test_derivative_undoes_antiderivative(p):
    assert antiderivative(p).derivative() == p


def test_integrate_unit_examples():
    assert integrate_unit(P(0, 1)) == Fraction(1, 2)
    # (21/20 - x/10)^2 integrates to 1201/1200
    d = P("21/20", "-1/10")
    assert integrate_unit(d * d) == Fraction(1201, 1200)
    assert integrate_unit(P(1)) == 1


@given(polys, polys, polys)
@settings(max_examples=50)
def test_integrate_unit_bilinear(p, q, r):
    assert integrate_unit((p + q) * r) == integrate_unit(p * r) + integrate_unit(q * r)


def test_affine_compose_examples():
    assert affine_compose(P(0, 0, 1), 2, 1) == P(1, 4, 4)
    p = P(3, "-1/2", 7)
    assert affine_compose(p, 1, 0) == p


def test_affine_compose_collapses_at_equal_thetas():
    # P(1 - t2(1-x)/t1) = P(x) when t1 = t2
    p = P(0, "21/20", "-1/20")
    assert affine_compose(p, 1, 0) == p


@given(polys, polys, fracs, fracs)
@settings(max_examples=50)
def test_affine_compose_is_ring_hom(p, q, s, t):
    lhs = affine_compose(p * q, s, t)
    rhs = affine_compose(p, s, t) * affine_compose(q, s, t)
    assert lhs == rhs


def test_eval_exact_and_float():
    p = P("1/3", 0, 2)
    assert p(Fraction(1, 2)) == Fraction(1, 3) + Fraction(1, 2)
    assert abs(p.eval_float(0.5) - float(p(Fraction(1, 2)))) < 1e-15


def test_frac_str_always_carries_denominator():
    assert frac_str(Fraction(3)) == "3/1"
    assert frac_str(Fraction(9, 80)) == "9/80"


def test_spec_rejects_nonzero_constant_term():
    with pytest.raises(SpecValidationError):
        MollifierSpec(Fraction(1, 2), Fraction(1, 2), P(1, 1), RationalPoly.zero())


def test_spec_rejects_bad_theta_order():
    with pytest.raises(SpecValidationError):
        MollifierSpec.make("1/4", "1/2", ["1"], [])
    with pytest.raises(SpecValidationError):
        MollifierSpec.make("1/2", "0", ["1"], [])
    with pytest.raises(SpecValidationError):
        MollifierSpec.make("1", "1/2", ["1"], [])


def test_spec_warns_on_hypothesis_boundary():
    spec = preset_spec("paper")
    assert SECOND_MOMENT_RANGE_WARNING in spec.warnings
    ok = MollifierSpec.make("2/5", "1/4", ["1"], ["1"])
    assert ok.warnings == ()


def test_preset_contents():
    spec = preset_spec("paper")
    assert spec.theta1 == spec.theta2 == Fraction(1, 2)
    assert spec.P == P(0, "21/20", "-1/20")
    assert spec.Q == P(0, "9/10")
    base = preset_spec("is-baseline")
    assert base.P == P(0, 1) and base.Q.is_zero()
    with pytest.raises(SpecValidationError):
        preset_spec("nope")


def test_spec_serialization_roundtrip():
    spec = preset_spec("paper")
    d = spec.to_dict()
    again = MollifierSpec.make(
        d["theta1"], d["theta2"], d["P"][1:], d["Q"][1:], d["q_for_lengths"]
    )
    assert again.P == spec.P and again.Q == spec.Q
    assert again.theta1 == spec.theta1


def test_realized_lengths():
    spec = MollifierSpec.make("1/4", "1/4", ["1"], [], q_for_lengths=101)
    assert spec.realized_lengths() == (3, 3)
    assert spec.realized_lengths(10007) == (10, 10)
    with pytest.raises(SpecValidationError):
        MollifierSpec.make("1/4", "1/4", ["1"], []).realized_lengths()
