"""Exact rational polynomial algebra.

Dense polynomials over `fractions.Fraction`, the carrier for the mollifier
profile polynomials and for every closed-form integral in the moment main
terms.  Everything here is exact; floats appear only through `eval_float`,
which callers use at reporting / numerical boundaries.

Coefficient lists are indexed by power and kept normalized (no trailing
zeros); the zero polynomial is the empty tuple.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import SpecValidationError

RationalLike = Fraction | int | str


def _frac(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise SpecValidationError(f"not an exact rational: {x!r}")


def frac_str(x: Fraction) -> str:
    """Serialize as "numerator/denominator" (denominator always present)."""
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RationalPoly:
    """Polynomial with exact rational coefficients, index = power."""

    coeffs: tuple[Fraction, ...]

    @staticmethod
    def from_coeffs(coeffs: Iterable[RationalLike]) -> "RationalPoly":
        c = [_frac(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        return RationalPoly(tuple(c))

    @staticmethod
    def zero() -> "RationalPoly":
        return RationalPoly(())

    @staticmethod
    def x() -> "RationalPoly":
        return RationalPoly((Fraction(0), Fraction(1)))

    @property
    def degree(self) -> int:
        # degree of the zero polynomial reported as -1
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __add__(self, other: "RationalPoly") -> "RationalPoly":
        n = max(len(self.coeffs), len(other.coeffs))
        c = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            c[i] += a
        for i, b in enumerate(other.coeffs):
            c[i] += b
        return RationalPoly.from_coeffs(c)

    def __sub__(self, other: "RationalPoly") -> "RationalPoly":
        return self + (-1) * other

    def __mul__(self, other):
        if isinstance(other, RationalPoly):
            if self.is_zero() or other.is_zero():
                return RationalPoly.zero()
            c = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    c[i + j] += a * b
            return RationalPoly.from_coeffs(c)
        s = _frac(other)
        return RationalPoly.from_coeffs(a * s for a in self.coeffs)

    __rmul__ = __mul__

    def __call__(self, x: RationalLike) -> Fraction:
        x = _frac(x)
        acc = Fraction(0)
        for a in reversed(self.coeffs):
            acc = acc * x + a
        return acc

    def eval_float(self, x: float) -> float:
        acc = 0.0
        for a in reversed(self.coeffs):
            acc = acc * x + float(a)
        return acc

    def derivative(self) -> "RationalPoly":
        return RationalPoly.from_coeffs(
            i * a for i, a in enumerate(self.coeffs) if i >= 1
        )

    def antiderivative(self) -> "RationalPoly":
        """Exact antiderivative with zero constant term."""
        if self.is_zero():
            return RationalPoly.zero()
        c = [Fraction(0)] + [a / (i + 1) for i, a in enumerate(self.coeffs)]
        return RationalPoly.from_coeffs(c)

    def integrate_unit(self) -> Fraction:
        """Exact integral over [0, 1]."""
        return sum(
            (a / (i + 1) for i, a in enumerate(self.coeffs)), Fraction(0)
        )

    def compose_affine(self, s: RationalLike, t: RationalLike) -> "RationalPoly":
        """Exact p(s*x + t) via Horner in the polynomial ring."""
        s, t = _frac(s), _frac(t)
        arg = RationalPoly.from_coeffs([t, s])
        acc = RationalPoly.zero()
        for a in reversed(self.coeffs):
            acc = acc * arg + RationalPoly.from_coeffs([a])
        return acc

    def coeff_strings(self) -> list[str]:
        return [frac_str(a) for a in self.coeffs]


def antiderivative(p: RationalPoly) -> RationalPoly:
    return p.antiderivative()


def integrate_unit(p: RationalPoly) -> Fraction:
    return p.integrate_unit()


def affine_compose(p: RationalPoly, s: RationalLike, t: RationalLike) -> RationalPoly:
    return p.compose_affine(s, t)


# Hypothesis range of the second-moment main-term formula.  The headline
# evaluation point theta1 = theta2 = 1/2 sits on the boundary, so being
# outside the range is a warning, never an error.
SECOND_MOMENT_RANGE_WARNING = (
    "outside second-moment hypothesis range theta2 < theta1 < 1/2"
)


@dataclass(frozen=True)
class MollifierSpec:
    """Two-piece mollifier: lengths q^theta1 / q^theta2 and profiles P, Q.

    P weights the mu(m)-piece, Q the (log*mu)(m)mu(n)-piece.  Both profiles
    must vanish at 0.  `q_for_lengths` optionally fixes the modulus used to
    realize the integer lengths y1 = floor(q^theta1), y2 = floor(q^theta2)
    in empirical runs.
    """

    theta1: Fraction
    theta2: Fraction
    P: RationalPoly
    Q: RationalPoly
    q_for_lengths: int | None = None
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not (0 < self.theta2 <= self.theta1 < 1):
            raise SpecValidationError(
                f"need 0 < theta2 <= theta1 < 1, got theta1={self.theta1}, "
                f"theta2={self.theta2}"
            )
        for name, p in (("P", self.P), ("Q", self.Q)):
            if not p.is_zero() and p.coeffs[0] != 0:
                raise SpecValidationError(f"{name}(0) != 0")
        if not (self.theta2 < self.theta1 < Fraction(1, 2)):
            object.__setattr__(
                self, "warnings", self.warnings + (SECOND_MOMENT_RANGE_WARNING,)
            )

    @staticmethod
    def make(
        theta1: RationalLike,
        theta2: RationalLike,
        p_coeffs: Sequence[RationalLike],
        q_coeffs: Sequence[RationalLike],
        q_for_lengths: int | None = None,
    ) -> "MollifierSpec":
        # profile coefficients are given for powers x^1, x^2, ... (constant
        # term is pinned to zero by definition)
        P = RationalPoly.from_coeffs([0, *p_coeffs])
        Q = RationalPoly.from_coeffs([0, *q_coeffs])
        return MollifierSpec(_frac(theta1), _frac(theta2), P, Q, q_for_lengths)

    @property
    def Q1(self) -> RationalPoly:
        """Antiderivative of Q with zero constant term."""
        return self.Q.antiderivative()

    def realized_lengths(self, q: int | None = None) -> tuple[int, int]:
        q = q if q is not None else self.q_for_lengths
        if q is None:
            raise SpecValidationError("no modulus given for realized lengths")
        y1 = int(float(q) ** float(self.theta1))
        y2 = int(float(q) ** float(self.theta2))
        return max(y1, 1), max(y2, 1)

    def to_dict(self) -> dict:
        return {
            "theta1": frac_str(self.theta1),
            "theta2": frac_str(self.theta2),
            "P": self.P.coeff_strings(),
            "Q": self.Q.coeff_strings(),
            "q_for_lengths": self.q_for_lengths,
            "warnings": list(self.warnings),
        }


# Profile choices behind the headline proportion: P(x) = 1.05x - 0.05x^2,
# Q(x) = 0.9x at theta1 = theta2 = 1/2.
PAPER_PRESET = dict(
    theta1=Fraction(1, 2),
    theta2=Fraction(1, 2),
    p_coeffs=(Fraction(21, 20), Fraction(-1, 20)),
    q_coeffs=(Fraction(9, 10),),
)

# Single-piece optimum P(x) = x at theta1 = 1/2 (proportion 1/3).
BASELINE_PRESET = dict(
    theta1=Fraction(1, 2),
    theta2=Fraction(1, 2),
    p_coeffs=(Fraction(1),),
    q_coeffs=(),
)

PRESETS = {"paper": PAPER_PRESET, "is-baseline": BASELINE_PRESET}


def preset_spec(name: str, q_for_lengths: int | None = None) -> MollifierSpec:
    if name not in PRESETS:
        raise SpecValidationError(f"unknown preset {name!r}")
    kw = PRESETS[name]
    return MollifierSpec.make(
        kw["theta1"], kw["theta2"], kw["p_coeffs"], kw["q_coeffs"], q_for_lengths
    )
