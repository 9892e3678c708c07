"""Dirichlet character groups with parity/conductor metadata and batch sums.

Representation
--------------
The unit group (Z/qZ)* is decomposed into cyclic factors <g_1> x ... x <g_r>
(CRT over prime powers; the 2-power part contributes <-1> x <5>).  A
character is labeled by its exponent vector (e_1, ..., e_r):

    chi(g_i) = zeta_{o_i}^{e_i},   o_i = order of g_i.

All character values are exact roots of unity zeta_E^t with E = lcm(o_i)
and t an integer computed from a discrete-log table; they materialize to
complex floats only at summation boundaries.  Parity, conductor and
primitivity therefore involve no floating point at all.

Conductor: smallest divisor f of q such that chi is trivial on the kernel
of (Z/qZ)* -> (Z/fZ)*, found by testing each divisor in increasing order
(elements a == 1 mod f).  A short vectorized prefix test rejects almost
every (chi, f) pair immediately; survivors get the full check.

Batch engine: for prime q every sum  sum_m c(m) chi(m)  over all characters
at once is a length-(q-1) DFT after folding m by discrete log; composite q
falls back to a chunked character-value matrix product.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import CapacityError, SpecValidationError
from .sieves import _factorize, euler_phi, phi_star


def _q_cap() -> int:
    return int(os.environ.get("NONVANISH_MAX_Q", 100_000))


def _primitive_root_mod_p(p: int) -> int:
    if p == 2:
        return 1
    fac = [ell for ell, _ in _factorize(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // ell, p) != 1 for ell in fac):
            return g
    raise AssertionError(f"no primitive root mod prime {p}")


def _component_generators(p: int, e: int) -> list[tuple[int, int]]:
    """Generators (residue, order) of (Z/p^e)* as residues mod p^e."""
    if p == 2:
        if e == 1:
            return []
        if e == 2:
            return [(3, 2)]
        return [(2**e - 1, 2), (5, 2 ** (e - 2))]
    g = _primitive_root_mod_p(p)
    if e == 1:
        return [(g, p - 1)]
    # lift to a generator mod p^e
    if pow(g, p - 1, p * p) == 1:
        g += p
    return [(g, (p - 1) * p ** (e - 1))]


def _crt_lift(residue: int, modulus: int, q: int) -> int:
    """x == residue mod modulus, x == 1 mod q/modulus."""
    other = q // modulus
    if other == 1:
        return residue % q
    inv = pow(other, -1, modulus)
    return (1 + other * ((residue - 1) * inv % modulus)) % q


def unit_group_generators(q: int) -> list[tuple[int, int]]:
    gens = []
    for p, e in _factorize(q):
        qi = p**e
        for g, o in _component_generators(p, e):
            gens.append((_crt_lift(g, qi, q), o))
    return gens


def _divisors(q: int) -> list[int]:
    divs = [1]
    for p, e in _factorize(q):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def _mobius_int(n: int) -> int:
    mu = 1
    for _, e in _factorize(n):
        if e > 1:
            return 0
        mu = -mu
    return 1 if n == 1 else mu


@dataclass(frozen=True)
class CharacterTable:
    """All phi(q) characters mod q, ordered lexicographically by exponents."""

    q: int
    generators: tuple[tuple[int, int], ...]
    exponents: np.ndarray          # (phi(q), r) exponent vectors
    parity_even: np.ndarray        # (phi(q),) bool
    conductor: np.ndarray          # (phi(q),) int64
    is_primitive: np.ndarray       # (phi(q),) bool
    exponent_lcm: int              # E = lcm of generator orders
    scaled_exponents: np.ndarray   # exponents * (E // o_i), per column
    unit_residues: np.ndarray      # (phi(q),) residues in enumeration order
    residue_to_index: np.ndarray   # (q,) index into unit_residues, -1 if not a unit
    scaled_dlogs: np.ndarray       # (phi(q), r) dlogs of unit_residues * (E // o_i)

    @property
    def size(self) -> int:
        return len(self.exponents)

    def value_exponents(self, m: int) -> np.ndarray:
        """Integer t with chi(m) = zeta_E^t, for every character at once.

        Raises for m not coprime to q (chi(m) = 0 has no exponent).
        """
        j = self.residue_to_index[m % self.q]
        if j < 0:
            raise SpecValidationError(f"{m} not coprime to modulus {self.q}")
        dlog = self.scaled_dlogs[j]
        return (self.exponents @ dlog) % self.exponent_lcm

    def values_at(self, m: int) -> np.ndarray:
        """chi(m) for every character; zeros when gcd(m, q) > 1."""
        if self.residue_to_index[m % self.q] < 0:
            return np.zeros(self.size, dtype=np.complex128)
        t = self.value_exponents(m)
        return np.exp(2j * np.pi * t / self.exponent_lcm)

    def conjugate_indices(self) -> np.ndarray:
        """Index of the conjugate character for each character."""
        orders = np.array([o for _, o in self.generators], dtype=np.int64)
        conj = (-self.exponents) % orders if len(orders) else self.exponents
        radix = np.ones(len(orders), dtype=np.int64)
        for i in range(len(orders) - 2, -1, -1):
            radix[i] = radix[i + 1] * orders[i + 1]
        if len(orders) == 0:
            return np.zeros(1, dtype=np.int64)
        return conj @ radix

    def even_primitive_indices(self) -> np.ndarray:
        return np.nonzero(self.parity_even & self.is_primitive)[0]

    def is_prime_modulus(self) -> bool:
        return len(self.generators) == 1 and self.generators[0][1] == self.q - 1


def _build_dlog_enumeration(q: int, gens: list[tuple[int, int]]):
    """Enumerate units as products of generator powers, lexicographically.

    Returns (residues, scaled_dlogs, residue_to_index, E, scales) where
    residues[j] = prod g_i^{a_i(j)} and the tuples a(j) count in mixed radix
    with the last generator fastest.
    """
    E = 1
    for _, o in gens:
        E = E * o // math.gcd(E, o)
    residues = np.array([1], dtype=np.int64)
    dlogs = np.zeros((1, 0), dtype=np.int64)
    for g, o in gens:
        powers = np.empty(o, dtype=np.int64)
        v = 1
        for j in range(o):
            powers[j] = v
            v = (v * g) % q
        residues = (residues[:, None] * powers[None, :] % q).reshape(-1)
        left = np.repeat(dlogs, o, axis=0)
        right = np.tile(np.arange(o, dtype=np.int64), len(dlogs))[:, None]
        dlogs = np.concatenate([left, right], axis=1)
    scales = np.array([E // o for _, o in gens], dtype=np.int64)
    scaled = dlogs * scales[None, :] if len(gens) else dlogs
    res_to_idx = np.full(q, -1, dtype=np.int64)
    res_to_idx[residues] = np.arange(len(residues))
    return residues, scaled, res_to_idx, E, scales


def _conductors(
    q: int,
    exponents: np.ndarray,
    scaled_dlogs: np.ndarray,
    residue_to_index: np.ndarray,
    E: int,
) -> np.ndarray:
    """Conductor per character by induction testing from each divisor of q."""
    nchars = len(exponents)
    cond = np.zeros(nchars, dtype=np.int64)
    undecided = np.ones(nchars, dtype=bool)
    prefix = 96
    for f in _divisors(q):
        if not undecided.any():
            break
        if f == q:
            cond[undecided] = q
            break
        # units congruent to 1 mod f
        a_vals = np.arange(1, q, f, dtype=np.int64)
        idx = residue_to_index[a_vals]
        idx = idx[idx >= 0]
        if len(idx) == 0:
            continue
        rows = np.nonzero(undecided)[0]
        dl_head = scaled_dlogs[idx[:prefix]]
        ok = ~np.any(exponents[rows] @ dl_head.T % E, axis=1)
        if len(idx) > prefix and ok.any():
            dl_tail = scaled_dlogs[idx[prefix:]]
            sub = rows[ok]
            ok2 = ~np.any(exponents[sub] @ dl_tail.T % E, axis=1)
            passed = sub[ok2]
        else:
            passed = rows[ok]
        cond[passed] = f
        undecided[passed] = False
    return cond


@lru_cache(maxsize=128)
def enumerate_characters(q: int) -> CharacterTable:
    """Full character group mod q with parity, conductor, primitivity."""
    if q < 3:
        raise SpecValidationError(
            f"modulus must be >= 3 (no primitive even characters below), got {q}"
        )
    if q > _q_cap():
        raise CapacityError(
            f"modulus {q} exceeds cap {_q_cap()} (override with NONVANISH_MAX_Q)"
        )
    gens = unit_group_generators(q)
    residues, scaled_dlogs, res_to_idx, E, _scales = _build_dlog_enumeration(q, gens)
    orders = [o for _, o in gens]
    nchars = int(np.prod(orders)) if orders else 1
    assert nchars == euler_phi(q)
    # exponent vectors in the same mixed-radix order as the unit enumeration
    if orders:
        grids = np.indices(orders).reshape(len(orders), -1).T.astype(np.int64)
    else:
        grids = np.zeros((1, 0), dtype=np.int64)
    scales = np.array([E // o for o in orders], dtype=np.int64)
    scaled_exps = grids * scales[None, :] if orders else grids

    # parity: chi(-1) = 1 iff the scaled dlog of -1 pairs to 0 mod E
    j_minus1 = res_to_idx[q - 1]
    tm = grids @ scaled_dlogs[j_minus1] % E if orders else np.zeros(1, dtype=np.int64)
    parity_even = tm == 0

    cond = _conductors(q, grids, scaled_dlogs, res_to_idx, E)
    is_prim = cond == q
    assert int(is_prim.sum()) == phi_star(q)

    return CharacterTable(
        q=q,
        generators=tuple(gens),
        exponents=grids,
        parity_even=parity_even,
        conductor=cond,
        is_primitive=is_prim,
        exponent_lcm=E,
        scaled_exponents=scaled_exps,
        unit_residues=residues,
        residue_to_index=res_to_idx,
        scaled_dlogs=scaled_dlogs,
    )


def fold_to_units(
    coeffs, table: CharacterTable, m_start: int = 1, out: np.ndarray | None = None
) -> np.ndarray:
    """w[j] += sum of c(m) over m == unit_residues[j] (mod q), m from m_start.

    Coefficients at m with gcd(m, q) > 1 are dropped (chi(m) = 0).  Passing
    `out` accumulates into an existing fold, so long coefficient streams can
    be folded chunk by chunk.
    """
    q = table.q
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if out is None:
        out = np.zeros(table.size, dtype=np.complex128)
    if coeffs.size == 0:
        return out
    m = np.arange(m_start, m_start + len(coeffs), dtype=np.int64)
    idx = table.residue_to_index[m % q]
    keep = idx >= 0
    np.add.at(out, idx[keep], coeffs[keep])
    return out


def twisted_sums_from_folded(w: np.ndarray, table: CharacterTable) -> np.ndarray:
    """sum_j w[j] chi(unit_residues[j]) for every character."""
    if table.is_prime_modulus():
        # unit_residues[j] = g^j, chi_k(g) = e^{2 pi i k/(q-1)}:
        # S[k] = sum_j w[j] e^{+2 pi i jk/(q-1)} = (q-1) * ifft(w)[k]
        return np.fft.ifft(w) * table.size
    out = np.zeros(table.size, dtype=np.complex128)
    E = table.exponent_lcm
    chunk = max(1, 2_000_000 // max(table.size, 1))
    dl = table.scaled_dlogs
    for lo in range(0, table.size, chunk):
        t = table.exponents[lo : lo + chunk] @ dl.T % E
        out[lo : lo + chunk] = np.exp(2j * np.pi * t / E) @ w
    return out


def batch_twisted_sum(coeffs, table: CharacterTable, m_start: int = 1) -> np.ndarray:
    """sum_{m, (m,q)=1} c(m) chi(m) for every character in the table.

    `coeffs` is indexed from m = m_start (coeffs[0] = c(m_start)).  Prime
    moduli use a cyclic DFT over the discrete-log line; other moduli use a
    chunked value matrix.  Empty input gives all-zero sums.
    """
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    if coeffs.size == 0:
        return np.zeros(table.size, dtype=np.complex128)
    return twisted_sums_from_folded(fold_to_units(coeffs, table, m_start), table)


@dataclass(frozen=True)
class GaussData:
    """Gauss sum tau(chi) and root number epsilon (tau / sqrt(q))."""

    tau: complex
    epsilon: complex


def gauss_root(char_index: int, table: CharacterTable) -> GaussData:
    """Gauss sum and root number of an even primitive character.

    tau by direct summation; for even primitive chi, |tau| = sqrt(q) and
    epsilon = tau / sqrt(q) is unimodular.
    """
    if not (table.is_primitive[char_index] and table.parity_even[char_index]):
        raise SpecValidationError(
            "root number requested for a non-primitive or odd character"
        )
    q = table.q
    a = table.unit_residues.astype(np.float64)
    t = table.exponents[char_index] @ table.scaled_dlogs.T % table.exponent_lcm
    chi_vals = np.exp(2j * np.pi * t / table.exponent_lcm)
    tau = complex(np.sum(chi_vals * np.exp(2j * np.pi * a / q)))
    if abs(abs(tau) - math.sqrt(q)) > 1e-8 * math.sqrt(q):
        raise SpecValidationError(
            f"|tau| != sqrt(q) for character {char_index} mod {q}; not primitive?"
        )
    return GaussData(tau=tau, epsilon=tau / math.sqrt(q))


def gauss_sums_all(table: CharacterTable) -> np.ndarray:
    """tau(chi) for every character via one batch twisted sum."""
    q = table.q
    a = np.arange(1, q, dtype=np.float64)
    return batch_twisted_sum(np.exp(2j * np.pi * a / q), table)


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (ascending coefficients)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = num[i + len(den) - 1]
        if c % den[-1]:
            raise AssertionError("inexact polynomial division")
        c //= den[-1]
        out[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    if any(num[: len(den) - 1]):
        raise AssertionError("nonzero remainder in polynomial division")
    return out


@lru_cache(maxsize=256)
def _cyclotomic_poly(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial, ascending."""
    poly = [-1] + [0] * (n - 1) + [1]  # x^n - 1
    for d in range(1, n):
        if n % d == 0:
            poly = _poly_div_exact(poly, list(_cyclotomic_poly(d)))
    return tuple(poly)


@lru_cache(maxsize=64)
def _root_power_reduction(E: int) -> np.ndarray:
    """Matrix R with R[t] = coefficients of x^t reduced mod the E-th
    cyclotomic polynomial; exact integers."""
    phi = _cyclotomic_poly(E)
    deg = len(phi) - 1
    R = np.zeros((E, deg), dtype=np.int64)
    row = np.zeros(deg, dtype=np.int64)
    row[0] = 1
    R[0] = row
    for t in range(1, E):
        shifted = np.zeros(deg + 1, dtype=np.int64)
        shifted[1:] = row
        if shifted[deg]:
            lead = shifted[deg]
            for j in range(deg + 1):
                shifted[j] -= lead * phi[j]
        row = shifted[:deg].copy()
        R[t] = row
    return R


def even_primitive_pair_sum_exact(m: int, n: int, table: CharacterTable) -> Fraction:
    """Brute-force sum+ chi(m) conj(chi)(n) over even primitive characters,
    evaluated exactly.

    Each summand is a root of unity zeta_E^t; the total is reduced mod the
    E-th cyclotomic polynomial in integer arithmetic.  The reduced form must
    be constant (the sum is Galois-stable, hence rational); that constant is
    returned.  Fully independent of the divisor-sum closed form.
    """
    if math.gcd(m * n, table.q) > 1:
        raise SpecValidationError("need gcd(mn, q) = 1")
    E = table.exponent_lcm
    sel = table.parity_even & table.is_primitive
    if not sel.any():
        return Fraction(0)
    t = (table.value_exponents(m) - table.value_exponents(n))[sel] % E
    counts = np.bincount(t.astype(np.int64), minlength=E)
    reduced = counts @ _root_power_reduction(E)
    if np.any(reduced[1:]):
        raise AssertionError("character pair sum is not rational")
    return Fraction(int(reduced[0]))


def even_orthogonality_rhs(m: int, n: int, q: int) -> Fraction:
    """Closed form for the even-primitive character sum sum+ chi(m) conj(chi(n)).

    Equals (1/2) sum_{q = d r} mu(d) phi(r) (1[r | m-n] + 1[r | m+n]); both
    indicators count when they hold simultaneously.  Calibrated against
    brute-force sums over the even primitive characters (see tests); the
    value may be half-integral only transiently -- the total is an integer
    whenever phi*(q) is even, but is returned exact regardless.
    """
    if math.gcd(m * n, q) > 1:
        raise SpecValidationError(f"gcd(mn, q) > 1 for m={m}, n={n}, q={q}")
    total = Fraction(0)
    for r in _divisors(q):
        d = q // r
        mu_d = _mobius_int(d)
        if mu_d == 0:
            continue
        hits = int((m - n) % r == 0) + int((m + n) % r == 0)
        if hits:
            total += Fraction(mu_d * euler_phi(r) * hits, 2)
    return total
