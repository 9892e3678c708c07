"""Central values L(1/2 + alpha, chi) for all even primitive characters mod q.

Three routes, cross-validated against each other:

  smoothed_afe   two-sided smoothed functional equation with normalized
                 upper-incomplete-gamma kernels; O(sqrt(q)) terms per sum.
                 The primary engine.
  v_kernel_sum   one-sided sum  sum_m chi(m) m^{-1/2-alpha} V(m / q^{1.1})
                 with the Gaussian cutoff kernel, plus the exactly computed
                 functional-equation remainder of that representation (a
                 short dual sum with a reflected kernel).  The raw one-sided
                 sum alone carries a remainder of order ~1e-2 at desk-scale
                 q -- its error term is asymptotic in q -- so the remainder
                 is evaluated, not neglected; both parts are reported.
  hurwitz        q^{-s} sum_a chi(a) zeta(s, a/q) with Euler-Maclaurin
                 Hurwitz zeta; the slow reference oracle.

Root numbers epsilon = tau(chi)/sqrt(q) come from batched Gauss sums.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc, gammaln

from .characters import (
    CharacterTable,
    batch_twisted_sum,
    enumerate_characters,
    fold_to_units,
    gauss_sums_all,
    twisted_sums_from_folded,
)
from .errors import AccuracyError, CapacityError, SpecValidationError
from .kernels import KernelSpec, cached_grid, reflected_cutoff_kernel

# fixed exponent in the one-sided cutoff scale q^{1+eps}
VKERNEL_EPSILON = 0.1
_METHODS = ("smoothed_afe", "v_kernel_sum", "hurwitz")


@dataclass(frozen=True)
class CentralValueSet:
    """Values, root numbers and indexing for one modulus / shift / method."""

    q: int
    alpha: float
    method: str
    char_indices: np.ndarray   # indices into enumerate_characters(q)
    values: np.ndarray         # complex, aligned with char_indices
    epsilon: np.ndarray        # complex root numbers, same alignment
    info: dict = field(default_factory=dict, compare=False)

    @property
    def size(self) -> int:
        return len(self.char_indices)

    def conjugate_positions(self) -> np.ndarray:
        """Position of the conjugate character within this set."""
        table = enumerate_characters(self.q)
        conj = table.conjugate_indices()
        pos_of_index = {int(ci): p for p, ci in enumerate(self.char_indices)}
        return np.array(
            [pos_of_index[int(conj[ci])] for ci in self.char_indices], dtype=np.int64
        )


def _validate_shift(q: int, alpha: float) -> None:
    if abs(alpha) > 10.0 / math.log(q):
        raise SpecValidationError(
            f"shift {alpha} exceeds 10/log(q) = {10.0 / math.log(q):.4f}"
        )
    if abs(alpha) >= 0.45:
        raise SpecValidationError(
            f"shift {alpha} too large for the gamma-kernel continuation (|alpha| < 0.45)"
        )


def _even_primitive_epsilons(table: CharacterTable) -> tuple[np.ndarray, np.ndarray]:
    idx = table.even_primitive_indices()
    taus = gauss_sums_all(table)[idx]
    sq = math.sqrt(table.q)
    if len(idx) and np.max(np.abs(np.abs(taus) - sq)) > 1e-8 * sq:
        raise AccuracyError(f"Gauss-sum modulus check failed at q={table.q}")
    return idx, taus / sq


def central_values_smoothed(q: int, alpha: float = 0.0) -> CentralValueSet:
    """Two-sided smoothed-functional-equation values for all even primitive chi.

    L(1/2+alpha, chi) = sum_n chi(n) n^{-1/2-alpha} Q((1/4+alpha/2), pi n^2/q)
      + eps_chi (q/pi)^{-alpha} Gamma(1/4-alpha/2)/Gamma(1/4+alpha/2)
        * sum_n conj(chi)(n) n^{-1/2+alpha} Q((1/4-alpha/2), pi n^2/q)

    with Q the regularized upper incomplete gamma; sums truncated when the
    kernel drops below 1e-15.
    """
    if q < 3:
        raise SpecValidationError(f"modulus must be >= 3, got {q}")
    table = enumerate_characters(q)
    if not table.is_prime_modulus() and q > 10_000:
        raise CapacityError(f"composite modulus {q} above smoothed-engine cap 10000")
    _validate_shift(q, alpha)
    idx, eps = _even_primitive_epsilons(table)
    if len(idx) == 0:
        return CentralValueSet(q, alpha, "smoothed_afe", idx,
                               np.zeros(0, np.complex128), eps)
    a_plus = 0.25 + alpha / 2
    a_minus = 0.25 - alpha / 2
    n_max = int(math.ceil(math.sqrt(40.0 * q / math.pi))) + 4
    n = np.arange(1, n_max + 1, dtype=np.float64)
    f_plus = gammaincc(a_plus, np.pi * n * n / q)
    f_minus = gammaincc(a_minus, np.pi * n * n / q)
    s_plus = batch_twisted_sum(n ** (-0.5 - alpha) * f_plus, table)[idx]
    s_minus = batch_twisted_sum(n ** (-0.5 + alpha) * f_minus, table)[idx]
    pref = (q / math.pi) ** (-alpha) * math.exp(gammaln(a_minus) - gammaln(a_plus))
    values = s_plus + eps * pref * np.conj(s_minus)
    return CentralValueSet(q, alpha, "smoothed_afe", idx, values, eps,
                           info={"n_max": n_max})


def central_values_vkernel(
    q: int, alpha: float = 0.0, log_tail: float = 10.0
) -> CentralValueSet:
    """One-sided cutoff-kernel representation, remainder included.

    The sum sum_m chi(m) m^{-1/2-alpha} V(m/X) with X = q^{1.1} equals
    L(1/2+alpha, chi) plus a contour remainder; reflecting that remainder
    through the functional equation turns it into the short dual sum

      -eps_chi (q/pi)^{-alpha} sum_n conj(chi)(n) n^{-1/2+alpha}
           Vr_alpha(pi X n / q)

    which is evaluated and subtracted.  info["remainder_scale"] records its
    size: the raw one-sided sum alone is only ~1e-2 accurate at small q.
    """
    if q > 2000:
        raise CapacityError(f"one-sided oracle capped at q <= 2000, got {q}")
    if q < 3:
        raise SpecValidationError(f"modulus must be >= 3, got {q}")
    table = enumerate_characters(q)
    _validate_shift(q, alpha)
    idx, eps = _even_primitive_epsilons(table)
    if len(idx) == 0:
        return CentralValueSet(q, alpha, "v_kernel_sum", idx,
                               np.zeros(0, np.complex128), eps)
    if not 8.0 <= log_tail <= 13.0:
        raise SpecValidationError("log_tail supported in [8, 13]")
    X = float(q) ** (1.0 + VKERNEL_EPSILON)
    m_max = int(X * math.exp(log_tail))
    grid = cached_grid(KernelSpec(kind="cutoff"), -13.0, 13.2)
    folded = None
    chunk = 4_000_000
    for lo in range(0, m_max, chunk):
        hi = min(lo + chunk, m_max)
        m = np.arange(lo + 1, hi + 1, dtype=np.float64)
        coeffs = m ** (-0.5 - alpha) * grid(m / X)
        folded = fold_to_units(coeffs, table, m_start=lo + 1, out=folded)
    one_sided = twisted_sums_from_folded(folded, table)[idx]

    n_dual = int(q * math.exp(log_tail) / (math.pi * X)) + 2
    ns = np.arange(1, n_dual + 1, dtype=np.float64)
    vr = np.array([reflected_cutoff_kernel(math.pi * X * nn / q, alpha) for nn in ns])
    dual_coeffs = ns ** (-0.5 + alpha) * vr
    # sum_n conj(chi)(n) c(n) = conj(sum_n chi(n) conj(c(n)))
    dual = np.conj(batch_twisted_sum(np.conj(dual_coeffs), table)[idx])
    remainder = -eps * (q / math.pi) ** (-alpha) * dual
    values = one_sided - remainder
    return CentralValueSet(
        q, alpha, "v_kernel_sum", idx, values, eps,
        info={
            "cutoff_scale": X,
            "m_max": m_max,
            "remainder_scale": float(np.max(np.abs(remainder))),
        },
    )


_BERNOULLI_2K = [
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
    -3617 / 510, 43867 / 798, -174611 / 330, 854513 / 138,
]


def hurwitz_zeta(s: complex, x: np.ndarray, n_direct: int = 24, k_tail: int = 11) -> np.ndarray:
    """Euler-Maclaurin Hurwitz zeta, vectorized over x in (0, 1].

    zeta(s, x) = sum_{n<N} (x+n)^{-s} + (x+N)^{1-s}/(s-1) + (x+N)^{-s}/2
                 + sum_k B_{2k}/(2k)! (s)_{2k-1} (x+N)^{-s-2k+1}

    Absolute error below 1e-12 for Re(s) >= 1/4, |s| <= 4 at the defaults.
    """
    s = complex(s)
    if s == 1:
        raise SpecValidationError("Hurwitz zeta pole at s = 1")
    x = np.asarray(x, dtype=np.float64)
    N = n_direct
    base = x[None, :] + np.arange(N)[:, None]
    out = np.sum(np.exp(-s * np.log(base)), axis=0)
    xn = x + N
    logxn = np.log(xn)
    out = out + np.exp((1 - s) * logxn) / (s - 1) + np.exp(-s * logxn) / 2
    poch = s  # (s)_1
    fact = 1.0
    for k in range(1, k_tail + 1):
        fact *= (2 * k - 1) * (2 * k)
        out = out + (_BERNOULLI_2K[k - 1] / fact) * poch * np.exp(
            (-s - 2 * k + 1) * logxn
        )
        poch = poch * (s + 2 * k - 1) * (s + 2 * k)
    return out


def central_values_hurwitz(q: int, s: complex) -> CentralValueSet:
    """Reference values via L(s, chi) = q^{-s} sum_a chi(a) zeta(s, a/q)."""
    if q > 2000:
        raise CapacityError(f"Hurwitz oracle capped at q <= 2000, got {q}")
    if q < 3:
        raise SpecValidationError(f"modulus must be >= 3, got {q}")
    s = complex(s)
    if s.real < 0.25:
        raise SpecValidationError(f"Hurwitz oracle needs Re(s) >= 1/4, got {s}")
    table = enumerate_characters(q)
    idx, eps = _even_primitive_epsilons(table)
    a = np.arange(1, q + 1, dtype=np.float64)
    coeffs = hurwitz_zeta(s, a / q) * q ** (-s)
    values = batch_twisted_sum(coeffs, table)[idx]
    return CentralValueSet(q, float(s.real - 0.5), "hurwitz", idx, values, eps,
                           info={"s": s})


def pair_product_afe(
    q: int, char_index: int, alpha: float = 0.0, beta: float = 0.0
) -> complex:
    """L(1/2+alpha, chi) L(1/2+beta, conj(chi)) via the pair-kernel identity.

    Two double sums over mn <= (q/pi) e^10 with the pair_plus / pair_minus
    kernels; the oracle counterpart of products of single central values.
    """
    if q > 500:
        raise CapacityError(f"pair-product oracle capped at q <= 500, got {q}")
    table = enumerate_characters(q)
    if not (table.is_primitive[char_index] and table.parity_even[char_index]):
        raise SpecValidationError("pair product needs an even primitive character")
    _validate_shift(q, alpha)
    _validate_shift(q, beta)
    E = table.exponent_lcm
    t = table.exponents[char_index] @ table.scaled_dlogs.T % E
    chiv = np.zeros(q, dtype=np.complex128)
    chiv[table.unit_residues] = np.exp(2j * np.pi * t / E)

    u_lo = math.log(math.pi / q) - 0.1
    grid_p = cached_grid(
        KernelSpec(kind="pair_plus", alpha=alpha, beta=beta), u_lo, 10.2, 4096
    )
    grid_m = cached_grid(
        KernelSpec(kind="pair_minus", alpha=alpha, beta=beta), u_lo, 10.2, 4096
    )
    K = int((q / math.pi) * math.exp(10.0))
    R = int(math.isqrt(K))

    s_plus = 0.0 + 0.0j
    s_minus = 0.0 + 0.0j

    def accumulate(m: int, n_arr: np.ndarray):
        nonlocal s_plus, s_minus
        cm = chiv[m % q]
        if cm == 0:
            return
        cn = chiv[n_arr % q]
        x = (math.pi * m / q) * n_arr.astype(np.float64)
        nf = n_arr.astype(np.float64)
        wp = grid_p(x)
        wm = grid_m(x)
        s_plus += cm * m ** (-0.5 - alpha) * np.sum(np.conj(cn) * nf ** (-0.5 - beta) * wp)
        s_minus += np.conj(cm) * m ** (-0.5 + alpha) * np.sum(cn * nf ** (-0.5 + beta) * wm)

    for m in range(1, R + 1):
        accumulate(m, np.arange(1, K // m + 1, dtype=np.int64))
    for n in range(1, R + 1):
        ms = np.arange(R + 1, K // n + 1, dtype=np.int64)
        if len(ms) == 0:
            continue
        # roles swapped: fixed n, vector over m
        cn = chiv[n % q]
        if cn == 0:
            continue
        cm = chiv[ms % q]
        x = (math.pi * n / q) * ms.astype(np.float64)
        mf = ms.astype(np.float64)
        wp = grid_p(x)
        wm = grid_m(x)
        s_plus += np.conj(cn) * n ** (-0.5 - beta) * np.sum(cm * mf ** (-0.5 - alpha) * wp)
        s_minus += cn * n ** (-0.5 + beta) * np.sum(np.conj(cm) * mf ** (-0.5 + alpha) * wm)

    return complex(s_plus + (q / math.pi) ** (-alpha - beta) * s_minus)


# -- binary cache ------------------------------------------------------------
# header: q (int64 LE), alpha (float64 LE), method (16 bytes, NUL padded),
# count (int64 LE); then per character 4 little-endian float64:
# Re L, Im L, Re eps, Im eps.

_HEADER = struct.Struct("<qd16sq")


def save_central_cache(path: str, cvs: CentralValueSet) -> None:
    method = cvs.method.encode()[:16].ljust(16, b"\0")
    body = np.empty((cvs.size, 4), dtype="<f8")
    body[:, 0] = cvs.values.real
    body[:, 1] = cvs.values.imag
    body[:, 2] = cvs.epsilon.real
    body[:, 3] = cvs.epsilon.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(cvs.q, cvs.alpha, method, cvs.size))
        fh.write(body.tobytes())


def load_central_cache(path: str) -> CentralValueSet:
    with open(path, "rb") as fh:
        q, alpha, method, count = _HEADER.unpack(fh.read(_HEADER.size))
        body = np.frombuffer(fh.read(count * 32), dtype="<f8").reshape(count, 4)
    method_s = method.rstrip(b"\0").decode()
    if method_s not in _METHODS:
        raise SpecValidationError(f"unknown method {method_s!r} in cache {path}")
    table = enumerate_characters(q)
    idx = table.even_primitive_indices()
    if len(idx) != count:
        raise SpecValidationError(
            f"cache {path} has {count} characters, table expects {len(idx)}"
        )
    values = body[:, 0] + 1j * body[:, 1]
    eps = body[:, 2] + 1j * body[:, 3]
    return CentralValueSet(q, alpha, method_s, idx, values, eps)
