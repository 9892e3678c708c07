"""Exact optimization of the non-vanishing proportion.

The first-moment main term is linear and the second-moment main term is
quadratic in the joint coefficient vector of the two profile polynomials,
so over the basis x^1..x^dP (P-block) and x^1..x^dQ (Q-block):

    first(a)  = c . a,       second(a) = a^T M a

and maximizing  (c.a)^2 / (a^T M a)  is one exact linear solve:
the optimum is a = M^{-1} c (up to scale) with value c^T M^{-1} c.

Everything is Fraction arithmetic: assembly by polarization of the exact
second moment, the solve by Gaussian elimination with exact pivoting, and
positive-semidefiniteness by a pivoted LDL^T sweep.  The headline bound
therefore comes out as a rational inequality, free of conditioning doubt.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateMollifierError, SpecValidationError
from .moments import first_moment_main, second_moment_main
from .rpoly import MollifierSpec, RationalPoly, frac_str


def spec_from_vector(
    coeffs: list[Fraction], dP: int, dQ: int, theta1: Fraction, theta2: Fraction
) -> MollifierSpec:
    """Mollifier spec whose P/Q coefficients (powers x^1..) are `coeffs`."""
    if len(coeffs) != dP + dQ:
        raise SpecValidationError("coefficient vector length mismatch")
    return MollifierSpec(
        theta1,
        theta2,
        RationalPoly.from_coeffs([0, *coeffs[:dP]]),
        RationalPoly.from_coeffs([0, *coeffs[dP:]]),
    )


@dataclass(frozen=True)
class QuadraticModel:
    """Linear form c and symmetric matrix M over the profile-coefficient basis."""

    basis: tuple[str, ...]
    c: tuple[Fraction, ...]
    M: tuple[tuple[Fraction, ...], ...]
    theta1: Fraction
    theta2: Fraction
    dP: int
    dQ: int

    @property
    def dim(self) -> int:
        return len(self.basis)

    def first_moment(self, a: list[Fraction]) -> Fraction:
        return sum((ci * ai for ci, ai in zip(self.c, a)), Fraction(0))

    def second_moment(self, a: list[Fraction]) -> Fraction:
        return sum(
            (a[i] * self.M[i][j] * a[j]
             for i in range(self.dim) for j in range(self.dim)),
            Fraction(0),
        )

    def submodel(self, dP: int, dQ: int) -> "QuadraticModel":
        """Principal submodel on the nested basis x^1..x^dP, x^1..x^dQ."""
        if dP > self.dP or dQ > self.dQ:
            raise SpecValidationError("submodel degrees exceed the parent model")
        keep = list(range(dP)) + [self.dP + j for j in range(dQ)]
        return QuadraticModel(
            basis=tuple(self.basis[i] for i in keep),
            c=tuple(self.c[i] for i in keep),
            M=tuple(tuple(self.M[i][j] for j in keep) for i in keep),
            theta1=self.theta1,
            theta2=self.theta2,
            dP=dP,
            dQ=dQ,
        )


def build_forms(
    dP: int, dQ: int, theta1: Fraction, theta2: Fraction
) -> QuadraticModel:
    """Assemble c and M entrywise from the exact moment main terms.

    Diagonal entries are second moments of basis vectors; off-diagonal
    entries come from the polarization identity
    M_ij = (second(e_i + e_j) - second(e_i) - second(e_j)) / 2.
    """
    if dP < 1 or dQ < 0:
        raise SpecValidationError("need dP >= 1 and dQ >= 0")
    n = dP + dQ
    basis = tuple(
        [f"P:x^{i}" for i in range(1, dP + 1)]
        + [f"Q:x^{j}" for j in range(1, dQ + 1)]
    )

    def unit(i: int) -> list[Fraction]:
        v = [Fraction(0)] * n
        v[i] = Fraction(1)
        return v

    def lam(vec: list[Fraction]) -> Fraction:
        return second_moment_main(spec_from_vector(vec, dP, dQ, theta1, theta2))

    c = tuple(
        first_moment_main(spec_from_vector(unit(i), dP, dQ, theta1, theta2))
        for i in range(n)
    )
    diag = [lam(unit(i)) for i in range(n)]
    M = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        M[i][i] = diag[i]
        for j in range(i + 1, n):
            v = unit(i)
            v[j] = Fraction(1)
            M[i][j] = M[j][i] = (lam(v) - diag[i] - diag[j]) / 2
    return QuadraticModel(
        basis, c, tuple(tuple(row) for row in M), theta1, theta2, dP, dQ
    )


def solve_exact(
    M: tuple[tuple[Fraction, ...], ...], c: tuple[Fraction, ...]
) -> tuple[list[Fraction], bool]:
    """Solve M a = c over the rationals by Gaussian elimination.

    Returns (solution, singular_flag).  For singular M: a particular
    solution with free variables set to 0 when consistent, else raises.
    """
    n = len(c)
    A = [list(row) + [c[i]] for i, row in enumerate(M)]
    piv_col_of_row: list[int] = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, n) if A[r][col] != 0), None)
        if piv is None:
            continue
        A[row], A[piv] = A[piv], A[row]
        inv = 1 / A[row][col]
        A[row] = [x * inv for x in A[row]]
        for r in range(n):
            if r != row and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[row])]
        piv_col_of_row.append(col)
        row += 1
        if row == n:
            break
    singular = row < n
    for r in range(row, n):
        if A[r][n] != 0:
            raise DegenerateMollifierError(
                "singular second-moment form with the first moment outside its "
                "column space; the proportion is unbounded on this basis"
            )
    a = [Fraction(0)] * n
    for r, col in enumerate(piv_col_of_row):
        a[col] = A[r][n]
    return a, singular


def is_positive_semidefinite(M: tuple[tuple[Fraction, ...], ...]) -> bool:
    """Exact pivoted LDL^T: no negative pivot and no zero-pivot coupling."""
    n = len(M)
    A = [list(row) for row in M]
    active = list(range(n))
    while active:
        piv = max(active, key=lambda i: A[i][i])
        if A[piv][piv] < 0:
            return False
        if A[piv][piv] == 0:
            # all remaining diagonals are <= 0 hence 0; any nonzero
            # off-diagonal in the active block makes M indefinite
            return all(
                A[i][j] == 0 for i in active for j in active
            )
        d = A[piv][piv]
        active.remove(piv)
        for i in active:
            f = A[i][piv] / d
            if f == 0:
                continue
            for j in active:
                A[i][j] -= f * A[piv][j]
    return True


@dataclass(frozen=True)
class OptimizationResult:
    """Optimal proportion and one representative coefficient vector.

    Solutions are scale-invariant; the representative solves M a = c, for
    which first = second = proportion = c^T M^{-1} c.
    """

    dP: int
    dQ: int
    theta1: Fraction
    theta2: Fraction
    coeffs_p: tuple[Fraction, ...]
    coeffs_q: tuple[Fraction, ...]
    proportion: Fraction
    first_moment: Fraction
    second_moment: Fraction
    singular: bool = False

    def spec(self) -> MollifierSpec:
        return spec_from_vector(
            list(self.coeffs_p) + list(self.coeffs_q),
            self.dP, self.dQ, self.theta1, self.theta2,
        )

    def to_dict(self) -> dict:
        return {
            "dP": self.dP,
            "dQ": self.dQ,
            "theta1": frac_str(self.theta1),
            "theta2": frac_str(self.theta2),
            "coeffs_p": [frac_str(x) for x in self.coeffs_p],
            "coeffs_q": [frac_str(x) for x in self.coeffs_q],
            "proportion": frac_str(self.proportion),
            "proportion_decimal": float(self.proportion),
            "first_moment": frac_str(self.first_moment),
            "second_moment": frac_str(self.second_moment),
            "note": "scale-invariant; representative solves M a = c",
        }


def maximize_proportion(model: QuadraticModel) -> OptimizationResult:
    """Maximize (c.a)^2 / (a^T M a) exactly; optimum value c^T M^{-1} c."""
    a, singular = solve_exact(model.M, model.c)
    value = model.first_moment(a)
    if value == 0:
        raise DegenerateMollifierError("optimum has zero first moment")
    return OptimizationResult(
        dP=model.dP,
        dQ=model.dQ,
        theta1=model.theta1,
        theta2=model.theta2,
        coeffs_p=tuple(a[: model.dP]),
        coeffs_q=tuple(a[model.dP :]),
        proportion=value,
        first_moment=value,
        second_moment=value,
        singular=singular,
    )


def degree_scan(
    max_dP: int, max_dQ: int, theta1: Fraction, theta2: Fraction
) -> list[OptimizationResult]:
    """Optimal proportion for every degree pair (1..max_dP) x (0..max_dQ).

    One full model is assembled and nested submodels are re-solved, so the
    table is exactly monotone along both degree axes.
    """
    if max_dP > 12 or max_dQ > 12:
        raise SpecValidationError("degree scan capped at degree 12")
    full = build_forms(max_dP, max_dQ, theta1, theta2)
    out = []
    for dP in range(1, max_dP + 1):
        for dQ in range(0, max_dQ + 1):
            out.append(maximize_proportion(full.submodel(dP, dQ)))
    return out


def scan_csv(results: list[OptimizationResult]) -> str:
    lines = ["dP,dQ,proportion_exact,proportion_decimal,coeffs"]
    for r in results:
        coeffs = " ".join(
            [f"P:{frac_str(x)}" for x in r.coeffs_p]
            + [f"Q:{frac_str(x)}" for x in r.coeffs_q]
        )
        lines.append(
            f"{r.dP},{r.dQ},{frac_str(r.proportion)},{float(r.proportion)!r},{coeffs}"
        )
    return "\n".join(lines) + "\n"
