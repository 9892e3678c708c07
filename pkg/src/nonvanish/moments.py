"""Main terms of the mollified moments, exact and shifted.

Exact layer (rational arithmetic end to end):
    first_moment_main        P(1) + (theta2/2) Q1(1)
    second_moment_main       the nine-term quadratic main term of the
                             mollified second moment
    nonvanishing_proportion  first^2 / second (Cauchy-Schwarz lower bound)
    mollifier_piece_terms    the three unshifted pieces: first moment of the
                             Lambda-piece, the cross term, and the square of
                             the Lambda-piece
    single_mollifier_moments first/second moments of the mu-piece alone

Shifted layer (floats): the shifted first moment of the Lambda-piece in
closed exponential-polynomial form, and the shifted cross / square moments
as d^2/da db of brace integrals at a = b = 0.  The mixed derivative is
taken by forward-mode jet arithmetic in the ring R[a,b]/(a^2, b^2)
(`Jet11`), with tensor Gauss-Legendre quadrature over the unit cube;
central finite differences with Richardson extrapolation are kept as an
independent differentiation oracle (`method="fd"`).

Both shifted brace integrands are evaluated by one builder per moment with
the (a, b) variables supplied as seed jets, so the jet and oracle paths
share every formula.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import AccuracyError, SpecValidationError
from .rpoly import MollifierSpec, RationalPoly, frac_str


# -- exact main terms --------------------------------------------------------


def first_moment_main(spec: MollifierSpec) -> Fraction:
    """Exact P(1) + (theta2/2) Q1(1)."""
    return spec.P(1) + spec.theta2 / 2 * spec.Q1(1)


def _composed(spec: MollifierSpec, p: RationalPoly) -> RationalPoly:
    # p(1 - theta2 (1-x)/theta1) = p((theta2/theta1) x + 1 - theta2/theta1)
    r = spec.theta2 / spec.theta1
    return p.compose_affine(r, 1 - r)


def second_moment_main(spec: MollifierSpec) -> Fraction:
    """Exact nine-term main term of the mollified second moment."""
    P, Q, Q1 = spec.P, spec.Q, spec.Q1
    th1, th2 = spec.theta1, spec.theta2
    Pp = P.derivative()
    Qp = Q.derivative()
    one_minus_x = RationalPoly.from_coeffs([1, -1])
    terms = [
        P(1) ** 2,
        Fraction(1) / th1 * (Pp * Pp).integrate_unit(),
        -th2 * P(1) * Q1(1),
        2 * th2 * (_composed(spec, P) * Q).integrate_unit(),
        th2 / th1 * (_composed(spec, Pp) * Q).integrate_unit(),
        th2**2 * (one_minus_x * Q * Q).integrate_unit(),
        th2 / 2 * (one_minus_x * one_minus_x * Qp * Qp).integrate_unit(),
        -(th2**2) / 4 * Q1(1) ** 2,
        th2 / 4 * (Q * Q).integrate_unit(),
    ]
    return sum(terms, Fraction(0))


class PieceTerms(NamedTuple):
    """Unshifted main terms of the Lambda-piece interactions."""

    psi2_first: Fraction   # first moment of the Lambda-piece
    cross: Fraction        # cross term of the two pieces in the second moment
    psi2_square: Fraction  # second moment of the Lambda-piece alone


def mollifier_piece_terms(spec: MollifierSpec) -> PieceTerms:
    P, Q, Q1 = spec.P, spec.Q, spec.Q1
    th1, th2 = spec.theta1, spec.theta2
    one_minus_x = RationalPoly.from_coeffs([1, -1])
    psi2_first = th2 / 2 * Q1(1)
    cross = (
        -th2 / 2 * P(1) * Q1(1)
        + th2 * (_composed(spec, P) * Q).integrate_unit()
        + th2 / (2 * th1) * (_composed(spec, P.derivative()) * Q).integrate_unit()
    )
    Qp = Q.derivative()
    psi2_square = (
        th2**2 * (one_minus_x * Q * Q).integrate_unit()
        + th2 / 2 * (one_minus_x * one_minus_x * Qp * Qp).integrate_unit()
        - (th2**2) / 4 * Q1(1) ** 2
        + th2 / 4 * (Q * Q).integrate_unit()
    )
    return PieceTerms(psi2_first, cross, psi2_square)


def single_mollifier_moments(P: RationalPoly, theta1: Fraction) -> tuple[Fraction, Fraction]:
    """(first, second) moment main terms of the mu-piece mollifier alone.

    first = P(1); second = P(1)^2 + (1/theta1) int_0^1 P'(x)^2 dx.  Outside
    0 < theta1 < 1/2 the second-moment formula is out of its proven range;
    that is reported as a warning, never an error (the boundary point 1/2
    is the headline evaluation point).
    """
    if not P.is_zero() and P.coeffs[0] != 0:
        raise SpecValidationError("P(0) != 0")
    if not 0 < theta1 < 1:
        raise SpecValidationError(f"theta1 out of (0,1): {theta1}")
    if not theta1 < Fraction(1, 2):
        warnings.warn(
            "single-mollifier second moment outside its range theta1 < 1/2",
            RuntimeWarning,
            stacklevel=2,
        )
    Pp = P.derivative()
    return P(1), P(1) ** 2 + Fraction(1) / theta1 * (Pp * Pp).integrate_unit()


def nonvanishing_proportion(spec: MollifierSpec) -> Fraction:
    """Exact first^2 / second; the Cauchy-Schwarz non-vanishing bound."""
    lam = second_moment_main(spec)
    if lam == 0:
        from .errors import DegenerateMollifierError

        raise DegenerateMollifierError("second moment vanishes; proportion undefined")
    s1 = first_moment_main(spec)
    return s1 * s1 / lam


# -- jets ---------------------------------------------------------------------


@dataclass
class Jet11:
    """Element of R[a,b]/(a^2, b^2): value and the three mixed derivatives.

    Fields may be floats or broadcastable numpy arrays.  Multiplication
    implements the (1,1)-truncated product rule; exp() the chain rule.
    """

    f: object
    fa: object = 0.0
    fb: object = 0.0
    fab: object = 0.0

    # keep numpy from absorbing jets into object arrays: ndarray <op> Jet11
    # must dispatch to the reflected operators below
    __array_ufunc__ = None

    def __add__(self, other):
        if isinstance(other, Jet11):
            return Jet11(self.f + other.f, self.fa + other.fa,
                         self.fb + other.fb, self.fab + other.fab)
        return Jet11(self.f + other, self.fa, self.fb, self.fab)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * other

    def __rsub__(self, other):
        return (-1) * self + other

    def __mul__(self, other):
        if isinstance(other, Jet11):
            return Jet11(
                self.f * other.f,
                self.fa * other.f + self.f * other.fa,
                self.fb * other.f + self.f * other.fb,
                self.fab * other.f + self.fa * other.fb
                + self.fb * other.fa + self.f * other.fab,
            )
        return Jet11(self.f * other, self.fa * other,
                     self.fb * other, self.fab * other)

    __rmul__ = __mul__

    def exp(self) -> "Jet11":
        e = np.exp(self.f)
        return Jet11(e, e * self.fa, e * self.fb,
                     e * (self.fab + self.fa * self.fb))


def jet_poly(coeffs: list[float], arg: Jet11) -> Jet11:
    """Polynomial with float coefficients (ascending powers) at a jet."""
    acc = Jet11(0.0)
    for c in reversed(coeffs):
        acc = acc * arg + c
    return acc


# -- shifted first moment of the Lambda-piece ---------------------------------


def _exp_poly_integral(c: float, k: int) -> float:
    """int_0^1 e^{-c(1-x)} x^k dx, stable for any c.

    Small |c|: I_k(c) = k! sum_j (-c)^j / (k+j+1)!  (entire series).
    Otherwise the by-parts recurrence I_k = (1 - k I_{k-1}) / c.
    """
    if abs(c) < 0.5:
        term = math.factorial(k) / math.factorial(k + 1)
        total = term
        j = 1
        while True:
            term *= -c / (k + j + 1)
            total += term
            if abs(term) < 1e-18 * max(abs(total), 1e-18):
                return total
            j += 1
    val = -math.expm1(-c) / c
    for kk in range(1, k + 1):
        val = (1 - kk * val) / c
    return val


def shifted_psi2_first_moment(spec: MollifierSpec, alpha_log_y2: float) -> float:
    """theta2 int_0^1 e^{-(alpha log y2)(1-x)} Q(x) dx - (theta2/2) Q1(1).

    The shift enters only through the dimensionless product alpha * log y2.
    Exact in the exponential-polynomial ring, emitted as a float.
    """
    th2 = float(spec.theta2)
    total = 0.0
    for k, qk in enumerate(spec.Q.coeffs):
        if k == 0 or qk == 0:
            continue
        total += float(qk) * _exp_poly_integral(alpha_log_y2, k)
    return th2 * total - th2 / 2 * float(spec.Q1(1))


# -- shifted cross / square moments -------------------------------------------


@dataclass(frozen=True)
class ShiftedMomentResult:
    """Shifted moment main term normalized by the even-primitive count."""

    value: float
    alpha: float
    beta: float
    method: str           # "jet" or "fd"
    nodes: tuple[int, int]  # (nodes per axis for >=3D, for <=2D)
    convergence: float    # |value - value at halved nodes|


@lru_cache(maxsize=32)
def _gl01(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = leggauss(n)
    return (x + 1) / 2, w / 2


class _SpecFloats(NamedTuple):
    th1: float
    th2: float
    p: tuple[float, ...]
    q: tuple[float, ...]
    q1: tuple[float, ...]


def _floats(spec: MollifierSpec) -> _SpecFloats:
    return _SpecFloats(
        float(spec.theta1),
        float(spec.theta2),
        tuple(map(float, spec.P.coeffs)),
        tuple(map(float, spec.Q.coeffs)),
        tuple(map(float, spec.Q1.coeffs)),
    )


def _integrate_jet(fn, n_axes: int, n: int) -> Jet11:
    """Tensor Gauss-Legendre over [0,1]^n_axes of a Jet11-valued integrand.

    fn receives broadcastable coordinate arrays (axis 0 looped when
    n_axes >= 3 to bound memory).
    """
    x, w = _gl01(n)
    if n_axes == 1:
        jet = fn(x)
        return Jet11(*(np.sum(np.asarray(c) * w) for c in
                       (jet.f, jet.fa, jet.fb, jet.fab)))
    if n_axes == 2:
        a = x[:, None]
        b = x[None, :]
        W = w[:, None] * w[None, :]
        jet = fn(a, b)
        return Jet11(*(np.sum(np.broadcast_to(np.asarray(c), W.shape) * W)
                       for c in (jet.f, jet.fa, jet.fb, jet.fab)))
    # n_axes >= 3: loop the first axis
    shapes = [
        x.reshape((n,) + (1,) * (n_axes - 2 - i)) for i in range(n_axes - 1)
    ]
    Wgrid = np.ones((1,) * (n_axes - 1))
    for i, _ in enumerate(shapes):
        Wgrid = Wgrid * w.reshape((n,) + (1,) * (n_axes - 2 - i))
    acc = [0.0, 0.0, 0.0, 0.0]
    for i0 in range(n):
        jet = fn(x[i0], *shapes)
        for k, c in enumerate((jet.f, jet.fa, jet.fb, jet.fab)):
            acc[k] += w[i0] * np.sum(np.broadcast_to(np.asarray(c), Wgrid.shape) * Wgrid)
    return Jet11(*acc)


def _brace_cross(
    sf: _SpecFloats, q: int, alpha: float, beta: float,
    A: Jet11, B: Jet11, n3: int, n2: int,
) -> Jet11:
    """The two-term brace of the shifted cross moment, integrated, as a jet.

    Axes: first term (t, u', x) with u = x u'; second term (t, x).
    """
    lnq = math.log(q)
    L1, L2 = sf.th1 * lnq, sf.th2 * lnq
    sab = alpha + beta

    def term1(t, up, x):
        u = x * up
        expo = (
            Jet11(-beta * u * L2 - sab * t * (lnq - u * L2))
            + (beta * L1 - sab * t * L1) * A
            + (alpha * L2 - sab * t * L2) * B
        )
        X = 1 - sf.th2 * (1 - x) / sf.th1
        affine = 1 + sf.th1 * A + sf.th2 * (B + (-u))
        Pj = jet_poly(sf.p, A + X)
        Qj = jet_poly(sf.q, B + (x - u))
        return expo.exp() * affine * Pj * Qj * x  # x = du Jacobian

    def term2(t, x):
        expo = (
            Jet11(-sab * t * lnq)
            + (beta * L1 - sab * t * L1) * A
            + (alpha * L2 - sab * t * L2) * B
        )
        X = 1 - sf.th2 * (1 - x) / sf.th1
        affine = 1 + sf.th1 * A + sf.th2 * B
        Pj = jet_poly(sf.p, A + X)
        Q1j = jet_poly(sf.q1, B + x)
        return expo.exp() * affine * Pj * Q1j

    r = sf.th2 / sf.th1
    return (r * _integrate_jet(term1, 3, n3)) - (r / 2 * _integrate_jet(term2, 2, n2))


def _brace_square(
    sf: _SpecFloats, q: int, alpha: float, beta: float,
    A: Jet11, B: Jet11, n4: int, n3: int, n2: int,
) -> Jet11:
    """The five-term brace of the shifted square moment, integrated.

    Axes: (t, x), (t, u', v', x), (t, u', x) twice (the fourth term is the
    shift/variable mirror of the third), (t, x).  u = x u', v = x v'.
    """
    lnq = math.log(q)
    L2 = sf.th2 * lnq
    sab = alpha + beta
    th2 = sf.th2

    def b1(t, x):
        expo = (
            Jet11(-sab * t * lnq)
            + (beta * L2 - sab * t * L2) * A
            + (alpha * L2 - sab * t * L2) * B
        )
        affine = 1 + th2 * (A + B)
        Qa = jet_poly(sf.q, A + x)
        Qb = jet_poly(sf.q, B + x)
        return expo.exp() * affine * Qa * Qb * (1 - x) ** 2

    def b2(t, up, vp, x):
        u = x * up
        v = x * vp
        expo = (
            Jet11(-alpha * u * L2 - beta * v * L2 - sab * t * (lnq - (u + v) * L2))
            + (beta * L2 - sab * t * L2) * A
            + (alpha * L2 - sab * t * L2) * B
        )
        affine = 1 - th2 * (u + v) + th2 * (A + B)
        Qa = jet_poly(sf.q, A + (x - u))
        Qb = jet_poly(sf.q, B + (x - v))
        return expo.exp() * affine * Qa * Qb * x * x

    def b3(t, up, x):
        u = x * up
        expo = (
            Jet11(-alpha * u * L2 - sab * t * (lnq - u * L2))
            + (beta * L2 - sab * t * L2) * A
            + (alpha * L2 - sab * t * L2) * B
        )
        affine = 1 - th2 * u + th2 * (A + B)
        Qa = jet_poly(sf.q, A + (x - u))
        Q1b = jet_poly(sf.q1, B + x)
        return expo.exp() * affine * Qa * Q1b * x

    def b4(t, up, x):
        # (alpha,a) <-> (beta,b) mirror of b3: same a/b exponent attachment,
        # the u-decay moves to beta and the profiles swap their jet variable
        u = x * up
        expo = (
            Jet11(-beta * u * L2 - sab * t * (lnq - u * L2))
            + (beta * L2 - sab * t * L2) * A
            + (alpha * L2 - sab * t * L2) * B
        )
        affine = 1 - th2 * u + th2 * (A + B)
        Qb = jet_poly(sf.q, B + (x - u))
        Q1a = jet_poly(sf.q1, A + x)
        return expo.exp() * affine * Qb * Q1a * x

    def b5(t, x):
        expo = (
            Jet11(-sab * t * lnq)
            + (beta * L2 - sab * t * L2) * A
            + (alpha * L2 - sab * t * L2) * B
        )
        affine = 1 + th2 * (A + B)
        Q1a = jet_poly(sf.q1, A + x)
        Q1b = jet_poly(sf.q1, B + x)
        return expo.exp() * affine * Q1a * Q1b

    return (
        (th2 / 2) * _integrate_jet(b1, 2, n2)
        + th2 * _integrate_jet(b2, 4, n4)
        + (-th2 / 2) * _integrate_jet(b3, 3, n3)
        + (-th2 / 2) * _integrate_jet(b4, 3, n3)
        + (th2 / 4) * _integrate_jet(b5, 2, n2)
    )


def _mixed_derivative_fd(brace_value, h: float = 1e-3) -> float:
    """Richardson-extrapolated central mixed difference of F(a, b) at 0."""

    def d(hh: float) -> float:
        return (
            brace_value(hh, hh) - brace_value(hh, -hh)
            - brace_value(-hh, hh) + brace_value(-hh, -hh)
        ) / (4 * hh * hh)

    return (4 * d(h / 2) - d(h)) / 3


def _shifted_moment(
    brace, spec, q, alpha, beta, method, check, n_hi, n_lo
) -> ShiftedMomentResult:
    if abs(alpha) > 10.0 / math.log(q) or abs(beta) > 10.0 / math.log(q):
        raise SpecValidationError("shifts must satisfy |shift| <= 10 / log q")
    sf = _floats(spec)

    def value_at(nh: int, nl: int) -> float:
        if method == "jet":
            A = Jet11(0.0, 1.0, 0.0, 0.0)
            B = Jet11(0.0, 0.0, 1.0, 0.0)
            return float(brace(sf, q, alpha, beta, A, B, nh, nl).fab)
        if method == "fd":
            def F(a: float, b: float) -> float:
                return float(
                    brace(sf, q, alpha, beta, Jet11(a), Jet11(b), nh, nl).f
                )
            return _mixed_derivative_fd(F)
        raise SpecValidationError(f"unknown method {method!r}")

    coarse = value_at(n_hi, n_lo)
    fine = value_at(2 * n_hi, 2 * n_lo)
    conv = abs(fine - coarse)
    if check and conv > 1e-8:
        raise AccuracyError(
            f"quadrature not converged: node doubling moved the value by {conv:.2e}"
        )
    return ShiftedMomentResult(fine, alpha, beta, method, (2 * n_hi, 2 * n_lo), conv)


def shifted_cross_moment(
    spec: MollifierSpec, q: int, alpha: float, beta: float,
    method: str = "jet", check: bool = True, n_multi: int = 32, n_pair: int = 64,
) -> ShiftedMomentResult:
    """Shifted main term of the cross moment of the two mollifier pieces.

    d^2/da db of the two-term brace at a = b = 0; reduces to the unshifted
    cross term at alpha = beta = 0.
    """

    def brace(sf, q_, a_, b_, A, B, nh, nl):
        return _brace_cross(sf, q_, a_, b_, A, B, nh, nl)

    return _shifted_moment(brace, spec, q, alpha, beta, method, check, n_multi, n_pair)


def shifted_psi2_square_moment(
    spec: MollifierSpec, q: int, alpha: float, beta: float,
    method: str = "jet", check: bool = True, n_multi: int = 32, n_pair: int = 64,
) -> ShiftedMomentResult:
    """Shifted main term of the squared Lambda-piece moment.

    d^2/da db of the five-term brace at a = b = 0; symmetric under
    (alpha, beta) swap and reduces to the unshifted square term at 0.
    """

    def brace(sf, q_, a_, b_, A, B, nh, nl):
        return _brace_square(sf, q_, a_, b_, A, B, nh, nh, nl)

    return _shifted_moment(brace, spec, q, alpha, beta, method, check, n_multi, n_pair)


def t_weight_quadrature(z: float, c: float, n: int = 64) -> float:
    """Gauss-Legendre value of (log z) int_0^1 z^{-c t} dt.

    Pins the t-axis implementation of the shifted braces; equals
    (1 - z^{-c})/c identically.
    """
    t, w = _gl01(n)
    return float(math.log(z) * np.sum(np.exp(-c * t * math.log(z)) * w))


# -- reporting ----------------------------------------------------------------


def moments_report(
    spec: MollifierSpec,
    q: int | None = None,
    shifts: list[tuple[float, float]] | None = None,
) -> dict:
    """JSON-ready report with exact rationals as num/den strings."""
    s1 = first_moment_main(spec)
    lam = second_moment_main(spec)
    prop = nonvanishing_proportion(spec)
    pieces = mollifier_piece_terms(spec)
    base1, base2 = single_mollifier_moments(spec.P, spec.theta1)
    report = {
        "spec": spec.to_dict(),
        "s1_main": frac_str(s1),
        "lambda": frac_str(lam),
        "proportion": frac_str(prop),
        "pieces": {
            "psi2_first": frac_str(pieces.psi2_first),
            "cross": frac_str(pieces.cross),
            "psi2_square": frac_str(pieces.psi2_square),
        },
        "baseline": {"first": frac_str(base1), "second": frac_str(base2)},
        "decimals": {
            "s1_main": float(s1),
            "lambda": float(lam),
            "proportion": float(prop),
        },
        "shifted": [],
    }
    if shifts:
        if q is None:
            raise SpecValidationError("shifted moments need a modulus q")
        lny2 = float(spec.theta2) * math.log(q)
        for alpha, beta in shifts:
            report["shifted"].append(
                {
                    "alpha": alpha,
                    "beta": beta,
                    "I": shifted_psi2_first_moment(spec, alpha * lny2),
                    "J1": shifted_cross_moment(spec, q, alpha, beta).value,
                    "J2": shifted_psi2_square_moment(spec, q, alpha, beta).value,
                }
            )
    return report
