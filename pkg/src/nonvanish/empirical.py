"""Brute-force verification at small q.

Mollifier values per character, empirical moments against the predicted
main terms, the non-vanishing census, and oracle comparisons for the
orthogonality-based twisted first moment and the divisor-sum estimates.

The two mollifier pieces for an even primitive character chi:

    psi1(chi) = sum_{m <= y1} mu(m) chi(m) P[m] / sqrt(m)
    psi2(chi) = (1/log q) sum_{mn <= y2} Lambda(m) mu(n) conj(chi)(m) chi(n)
                                         Q[mn] / sqrt(mn)

with P[m] = P(log(y1/m)/log y1), Q likewise at y2, y_i = floor(q^theta_i).
The conj(chi)(m) chi(n) factor folds to chi(n m^{-1} mod q), so both pieces
are two batch twisted sums.  P[1] is taken as P(1) when y1 = 1 (the limit
convention; the m = 1 term always carries mu(1) = 1).

Empirical moments are reported raw: the main-term predictions carry
O(1/log q)-type errors with constants the theory does not pin down, so
tests assert trends and inequalities, not fixed tolerances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .central import CentralValueSet, central_values_smoothed
from .characters import (
    batch_twisted_sum,
    enumerate_characters,
    twisted_sums_from_folded,
)
from .errors import SpecValidationError, UnsupportedParameterError
from .kernels import KernelSpec, cached_grid
from .moments import first_moment_main, second_moment_main
from .rpoly import MollifierSpec, RationalPoly
from .sieves import build_tables, divisor_dk, phi_plus


@dataclass(frozen=True)
class MollifierValues:
    """Both mollifier pieces for every even primitive character mod q."""

    q: int
    spec: MollifierSpec
    char_indices: np.ndarray
    psi1: np.ndarray
    psi2: np.ndarray
    y1: int
    y2: int

    @property
    def psi(self) -> np.ndarray:
        return self.psi1 + self.psi2


def _profile_weights(poly: RationalPoly, y: int) -> np.ndarray:
    """P[m] = P(log(y/m)/log y) for m = 1..y; P[1] = P(1) when y = 1."""
    if y == 1:
        return np.array([float(poly(1))])
    m = np.arange(1, y + 1, dtype=np.float64)
    u = (math.log(y) - np.log(m)) / math.log(y)
    acc = np.zeros_like(u)
    for c in reversed(poly.coeffs):
        acc = acc * u + float(c)
    return acc


def mollifier_values(q: int, spec: MollifierSpec) -> MollifierValues:
    """Both pieces via two batch twisted sums."""
    table = enumerate_characters(q)
    idx = table.even_primitive_indices()
    y1, y2 = spec.realized_lengths(q)
    tabs = build_tables(max(y1, y2))

    pw = _profile_weights(spec.P, y1)
    m = np.arange(1, y1 + 1)
    c1 = tabs.mobius[m] * pw / np.sqrt(m)
    psi1 = batch_twisted_sum(c1, table)[idx]

    qw = _profile_weights(spec.Q, y2)
    folded = np.zeros(table.size, dtype=np.complex128)
    logq = math.log(q)
    for mm in range(2, y2 + 1):
        if tabs.vonmangoldt[mm] == 0.0 or math.gcd(mm, q) > 1:
            continue
        m_inv = pow(mm, -1, q)
        lam_m = tabs.vonmangoldt[mm]
        ns = np.arange(1, y2 // mm + 1)
        coeff = lam_m * tabs.mobius[ns] * qw[mm * ns - 1] / np.sqrt(mm * ns)
        # conj(chi)(m) chi(n) = chi(n * m^{-1} mod q)
        r = (ns * m_inv) % q
        ridx = table.residue_to_index[r]
        keep = ridx >= 0
        np.add.at(folded, ridx[keep], coeff[keep])
    psi2 = twisted_sums_from_folded(folded, table)[idx] / logq
    return MollifierValues(q, spec, idx, psi1, psi2, y1, y2)


def mollifier_values_naive(q: int, spec: MollifierSpec) -> MollifierValues:
    """Direct triple loop; the oracle for the batch path (q <= 50)."""
    if q > 200:
        raise SpecValidationError("naive mollifier oracle capped at q <= 200")
    table = enumerate_characters(q)
    idx = table.even_primitive_indices()
    y1, y2 = spec.realized_lengths(q)
    tabs = build_tables(max(y1, y2))
    pw = _profile_weights(spec.P, y1)
    qw = _profile_weights(spec.Q, y2)
    psi1 = np.zeros(len(idx), dtype=np.complex128)
    psi2 = np.zeros(len(idx), dtype=np.complex128)
    for pos, ci in enumerate(idx):
        chi = table.values_at
        for m in range(1, y1 + 1):
            psi1[pos] += tabs.mobius[m] * chi(m)[ci] * pw[m - 1] / math.sqrt(m)
        for m in range(1, y2 + 1):
            for n in range(1, y2 // m + 1):
                val = np.conj(chi(m)[ci]) * chi(n)[ci]
                psi2[pos] += (
                    tabs.vonmangoldt[m] * tabs.mobius[n] * val
                    * qw[m * n - 1] / math.sqrt(m * n)
                )
    return MollifierValues(q, spec, idx, psi1, psi2 / math.log(q), y1, y2)


@dataclass(frozen=True)
class CensusRecord:
    """Counts and empirical-vs-predicted moments for one modulus."""

    q: int
    total_even_primitive: int
    nonzero_count: int
    min_abs_L: float
    threshold: float
    s1_emp: float | None = None
    s1_pred: float | None = None
    s2_emp: float | None = None
    s2_pred: float | None = None
    dev1: float | None = None
    dev2: float | None = None
    p1_value: float | None = None

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "total": self.total_even_primitive,
            "nonzero": self.nonzero_count,
            "min_abs_L": self.min_abs_L,
            "threshold": self.threshold,
            "s1_emp": self.s1_emp,
            "s1_pred": self.s1_pred,
            "s2_emp": self.s2_emp,
            "s2_pred": self.s2_pred,
            "dev1": self.dev1,
            "dev2": self.dev2,
            "p1_value": self.p1_value,
        }


def nonvanishing_census(
    q: int, values: CentralValueSet, threshold: float = 1e-8
) -> CensusRecord:
    """Count characters with |L| above the (absolute) threshold."""
    if threshold <= 0:
        raise SpecValidationError("threshold must be positive")
    absL = np.abs(values.values)
    return CensusRecord(
        q=q,
        total_even_primitive=int(values.size),
        nonzero_count=int(np.sum(absL > threshold)),
        min_abs_L=float(absL.min()) if values.size else float("inf"),
        threshold=threshold,
    )


def empirical_moments(
    q: int,
    spec: MollifierSpec,
    values: CentralValueSet,
    threshold: float = 1e-8,
) -> CensusRecord:
    """Empirical first/second mollified moments against the predictions.

    s1_emp = Re sum+ L psi / phi+(q), s2_emp = sum+ |L psi|^2 / phi+(q);
    no tolerance is enforced here, deviations are recorded as data.
    """
    if values.q != q:
        raise SpecValidationError(
            f"central values are for q={values.q}, census asked for q={q}"
        )
    mv = mollifier_values(q, spec)
    if not np.array_equal(mv.char_indices, values.char_indices):
        raise SpecValidationError("character indexing mismatch between inputs")
    base = nonvanishing_census(q, values, threshold)
    phip = float(phi_plus(q))
    Lpsi = values.values * mv.psi
    s1_emp = float(np.sum(Lpsi).real / phip)
    s2_emp = float(np.sum(np.abs(Lpsi) ** 2) / phip)
    s1_pred = float(first_moment_main(spec))
    s2_pred = float(second_moment_main(spec))
    return CensusRecord(
        q=base.q,
        total_even_primitive=base.total_even_primitive,
        nonzero_count=base.nonzero_count,
        min_abs_L=base.min_abs_L,
        threshold=base.threshold,
        s1_emp=s1_emp,
        s1_pred=s1_pred,
        s2_emp=s2_emp,
        s2_pred=s2_pred,
        dev1=abs(s1_emp - s1_pred),
        dev2=abs(s2_emp - s2_pred),
        p1_value=float(spec.P(1)),
    )


CENSUS_CSV_HEADER = "q,total,nonzero,min_abs_L,s1_emp,s1_pred,s2_emp,s2_pred,dev1,dev2"


def census_csv(records: Sequence[CensusRecord]) -> str:
    def cell(x) -> str:
        return "" if x is None else repr(float(x))

    lines = [CENSUS_CSV_HEADER]
    for r in records:
        lines.append(
            ",".join(
                [
                    str(r.q),
                    str(r.total_even_primitive),
                    str(r.nonzero_count),
                    repr(r.min_abs_L),
                    cell(r.s1_emp),
                    cell(r.s1_pred),
                    cell(r.s2_emp),
                    cell(r.s2_pred),
                    cell(r.dev1),
                    cell(r.dev2),
                ]
            )
        )
    return "\n".join(lines) + "\n"


# -- oracles -------------------------------------------------------------------


def twisted_moment_check(
    h: int, k: int, q: int, alpha: float = 0.0,
    values: CentralValueSet | None = None,
) -> tuple[complex, complex]:
    """Twisted first moment sum+ L(1/2+alpha, chi) conj(chi)(h) chi(k).

    Returns (brute force over even primitive characters, diagonal main term
    phi+(q) m^{-1/2-alpha} V(m / q^{1.1}) with mk = h).  Their difference is
    off-diagonal noise whose size the theory bounds only on average.
    """
    if math.gcd(h * k, q) > 1:
        raise SpecValidationError("need gcd(hk, q) = 1")
    if q > 500 and values is None:
        raise SpecValidationError("twisted-moment oracle capped at q <= 500")
    table = enumerate_characters(q)
    if values is None:
        values = central_values_smoothed(q, alpha)
    idx = values.char_indices
    tw = np.conj(table.values_at(h)[idx]) * table.values_at(k)[idx]
    brute = complex(np.sum(values.values * tw))
    main = 0.0 + 0.0j
    if h % k == 0:
        m = h // k
        if math.gcd(m, q) == 1:
            grid = cached_grid(KernelSpec(kind="cutoff"), -13.0, 11.7)
            X = float(q) ** 1.1
            v = float(grid(np.array([m / X]))[0])
            main = complex(float(phi_plus(q)) * m ** (-0.5 - alpha) * v)
    return brute, main


def _as_profile(f) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(f, RationalPoly):
        coeffs = [float(c) for c in f.coeffs]

        def poly(x: np.ndarray) -> np.ndarray:
            acc = np.zeros_like(x)
            for c in reversed(coeffs):
                acc = acc * x + c
            return acc

        return poly
    if callable(f):
        return f
    raise SpecValidationError("profile must be a RationalPoly or a callable")


def divisor_sum_vs_integral(
    k: int, z: float, F1, F2, y1: float, y2: float
) -> tuple[float, float]:
    """Divisor-weighted sum against its main-term integral.

    LHS = sum_{n <= y2} d_k(n)/n (y2/n)^z F1(log(y1/n)/log y1)
                                          F2(log(y2/n)/log y2)
    RHS = (log y2)^k/(k-1)! int_0^1 y2^{zx} (1-x)^{k-1}
                       F1(1 - (1-x) log y2/log y1) F2(x) dx

    The gap is O((log y2)^{k-1}) with an unspecified constant.
    """
    if not 1 <= k <= 4:
        raise UnsupportedParameterError(f"divisor order k={k} not in 1..4")
    if y2 > y1:
        raise SpecValidationError("need y2 <= y1")
    if abs(z) > 1.0 / math.log(y1):
        raise SpecValidationError("need |z| <= 1/log(y1)")
    f1, f2 = _as_profile(F1), _as_profile(F2)
    N = int(y2)
    dk = divisor_dk(N, k)
    n = np.arange(1, N + 1, dtype=np.float64)
    lhs = float(
        np.sum(
            dk[1:] / n * (y2 / n) ** z
            * f1((math.log(y1) - np.log(n)) / math.log(y1))
            * f2((math.log(y2) - np.log(n)) / math.log(y2))
        )
    )
    x, w = leggauss(256)
    x = (x + 1) / 2
    w = w / 2
    ly1, ly2 = math.log(y1), math.log(y2)
    integrand = (
        np.exp(z * x * ly2) * (1 - x) ** (k - 1)
        * f1(1 - (1 - x) * ly2 / ly1) * f2(x)
    )
    rhs = float(ly2**k / math.factorial(k - 1) * np.sum(integrand * w))
    return lhs, rhs


def _divisor_tail_sum(k: int, sigma: float, y: float) -> float:
    N = int(y)
    dk = divisor_dk(N, k)
    n = np.arange(1, N + 1, dtype=np.float64)
    return float(np.sum(dk[1:] / n * (y / n) ** sigma))


def divisor_sum_bound(k: int, sigma: float, y: float) -> tuple[float, float]:
    """Divisor sum with y-power damping against its calibrated upper bound.

    LHS = sum_{n <= y} d_k(n)/n (y/n)^sigma for -1 <= sigma <= 0; the bound
    is C (log y)^{k-1} min(1/|sigma|, log y) with C calibrated once at
    k = 1 across a sigma sweep (5% headroom) so that LHS/bound <= 1.
    """
    if not -1 <= sigma <= 0:
        raise SpecValidationError("need -1 <= sigma <= 0")
    if not 1 <= k <= 4:
        raise UnsupportedParameterError(f"divisor order k={k} not in 1..4")
    ly = math.log(y)

    def min_term(s: float) -> float:
        return ly if s == 0 else min(1.0 / abs(s), ly)

    C = 1.05 * max(
        _divisor_tail_sum(1, s, y) / min_term(s)
        for s in (0.0, -0.01, -0.05, -0.2, -0.5, -1.0)
    )
    lhs = _divisor_tail_sum(k, sigma, y)
    bound = C * ly ** (k - 1) * min_term(sigma)
    return lhs, bound
