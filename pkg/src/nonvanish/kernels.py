"""Contour-integral smoothing kernels and the power/log Mellin profile.

Three kernels, all of the form (1/2pi i) int_(sigma) F(s) x^{-s} ds/s:

    cutoff:      F(s) = e^{s^2}                       (smooth 1 -> 0 cutoff)
    pair_plus /  F(s) = e^{s^2} p(s) g_{a,b}^{+-}(s)  (kernels of the
    pair_minus                                         product functional
                                                       equation for a pair
                                                       of shifted L-values)

with p(s) = ((a+b)^2 - 4 s^2)/(a+b)^2 normalized so p(0) = 1 and vanishing
at s = +-(a+b)/2; at a+b = 0 the factor is taken in the limit p == 1 (the
zero is only needed to cancel a zeta pole downstream).  g^{+-} are ratios
of Gamma((1/2 +- shift + s)/2) factors against the unshifted denominators.

Numerics
--------
Quadrature is composite Gauss-Legendre on panels that refine geometrically
toward t = 0 (the 1/s factor has poles at +-i sigma near the real axis).
For x < 1 the direct line Re(s) = sigma0 > 0 loses all precision to
cancellation (the integrand has size e^{sigma^2} x^{-sigma} against an O(1)
result), so the evaluation shifts the contour left across the simple pole
at s = 0 (residue 1) and integrates on a negative line: any line for the
cutoff kernel, Re(s) = -0.2 for the pair kernels (their Gamma factors have
poles from s = -1/2 + |shift| leftward).  The returned value is still the
requested contour integral: the integrand is analytic between the lines.

The small-x limit of the pair kernels is 1, approached like
sqrt(x) log(1/x) because of the Gamma poles at s ~ -1/2; the cutoff kernel
reaches 1 faster than any power of x.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import loggamma, gammaln

from .errors import AccuracyError, SpecValidationError

_KINDS = ("cutoff", "pair_plus", "pair_minus")

# direct evaluation is allowed while e^{sigma^2} x^{-sigma} <= e^12
_DIRECT_BUDGET = 12.0


@dataclass(frozen=True)
class KernelSpec:
    """Kernel kind, shifts, and contour/quadrature parameters."""

    kind: str = "cutoff"
    alpha: float = 0.0
    beta: float = 0.0
    contour_re: float = 2.0
    truncation_T: float = 10.0
    node_count: int = 768

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise SpecValidationError(f"unknown kernel kind {self.kind!r}")
        if not self.contour_re > 0:
            raise SpecValidationError("contour_re must be > 0")
        if self.truncation_T < 8:
            raise SpecValidationError("truncation_T must be >= 8")
        if self.node_count < 200:
            raise SpecValidationError("node_count must be >= 200")
        if self.kind != "cutoff" and max(abs(self.alpha), abs(self.beta)) >= 0.25:
            raise SpecValidationError("pair-kernel shifts must satisfy |shift| < 1/4")


@lru_cache(maxsize=32)
def _panel_nodes(T: float, node_count: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric panels on [-T, T], geometrically refined toward 0."""
    edges = [0.0, 0.125]
    while edges[-1] < T:
        edges.append(min(edges[-1] * 2, T))
    n_per = max(16, node_count // (2 * (len(edges) - 1)))
    x0, w0 = leggauss(n_per)
    ts, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = (a + b) / 2, (b - a) / 2
        ts.append(mid + half * x0)
        ws.append(half * w0)
    t = np.concatenate(ts)
    w = np.concatenate(ws)
    return np.concatenate([-t[::-1], t]), np.concatenate([w[::-1], w])


def _pair_log_factor(s: np.ndarray, alpha: float, beta: float, sign: int) -> np.ndarray:
    a = alpha if sign > 0 else -alpha
    b = beta if sign > 0 else -beta
    den = gammaln((0.5 + alpha) / 2) + gammaln((0.5 + beta) / 2)
    return loggamma((0.5 + a + s) / 2) + loggamma((0.5 + b + s) / 2) - den


def _line_quadrature(
    logx: float, sigma: float, spec: KernelSpec, with_pair: bool
) -> tuple[complex, float]:
    """Returns (integral, absolute integrand mass).

    The mass sets the scale of quadrature/cancellation noise: the pair
    kernels with tiny alpha+beta legitimately reach O(1/(alpha+beta)^2)."""
    t, w = _panel_nodes(spec.truncation_T, spec.node_count)
    s = sigma + 1j * t
    expo = s * s - s * logx
    if with_pair:
        sign = +1 if spec.kind == "pair_plus" else -1
        expo = expo + _pair_log_factor(s, spec.alpha, spec.beta, sign)
    vals = np.exp(expo) / s
    if with_pair:
        ab = spec.alpha + spec.beta
        if ab != 0.0:
            vals = vals * ((ab * ab - 4 * s * s) / (ab * ab))
    weighted = vals * w
    return (
        complex(np.sum(weighted) / (2 * np.pi)),
        float(np.sum(np.abs(weighted)) / (2 * np.pi)),
    )


def _check_real(val: complex, mass: float, where: str) -> float:
    if abs(val.imag) > 1e-12 * max(1.0, abs(val.real)) + 1e-14 * mass:
        raise AccuracyError(f"{where}: imaginary residue {val.imag:.2e} too large")
    return val.real


def cutoff_kernel(x: float, spec: KernelSpec | None = None) -> float:
    """(1/2pi i) int e^{s^2} x^{-s} ds/s along Re(s) = spec.contour_re."""
    spec = spec or KernelSpec()
    if x <= 0:
        raise SpecValidationError(f"kernel argument must be positive, got {x}")
    logx = math.log(x)
    sigma = spec.contour_re
    if sigma * sigma - sigma * logx <= _DIRECT_BUDGET:
        val, mass = _line_quadrature(logx, sigma, spec, False)
        return _check_real(val, mass, "cutoff")
    # residue 1 at s = 0 plus a small integral on a left line near the
    # Gaussian saddle Re(s) = logx / 2
    shifted = max(logx / 2.0, -6.0)
    val, mass = _line_quadrature(logx, shifted, spec, False)
    return _check_real(1.0 + val, mass, "cutoff")


def pair_kernel(x: float, spec: KernelSpec) -> float:
    """Pair kernel along Re(s) = spec.contour_re for kind pair_plus/minus."""
    if spec.kind == "cutoff":
        raise SpecValidationError("pair_kernel needs a pair_plus/pair_minus spec")
    if x <= 0:
        raise SpecValidationError(f"kernel argument must be positive, got {x}")
    logx = math.log(x)
    ab = spec.alpha + spec.beta

    def budget(sigma: float) -> float:
        # log of integrand-mass vs O(1): cancellation noise is e^budget * eps.
        # A nonzero pole-cancelling factor inflates the mass by ~4|s|^2/ab^2.
        amp = 0.0 if ab == 0.0 else math.log(4 * (sigma * sigma + 16) / (ab * ab))
        return sigma * sigma - sigma * logx + amp

    if budget(spec.contour_re) <= _DIRECT_BUDGET:
        val, mass = _line_quadrature(logx, spec.contour_re, spec, True)
        return _check_real(val, mass, "pair")
    if logx > 0:
        saddle = min(max(logx / 2.0, 0.3), 8.0)
        if budget(saddle) <= _DIRECT_BUDGET:
            val, mass = _line_quadrature(logx, saddle, spec, True)
            return _check_real(val, mass, "pair")
    # shifted line must stay right of the Gamma poles at -1/2 + |shift|;
    # the residue at s = 0 is p(0) g(0) = g(0), which is 1 for the plus
    # kernel but a Gamma ratio for the minus kernel at nonzero shifts
    sign = +1 if spec.kind == "pair_plus" else -1
    residue = float(
        np.exp(_pair_log_factor(np.complex128(0.0), spec.alpha, spec.beta, sign)).real
    )
    val, mass = _line_quadrature(logx, -0.2, spec, True)
    return _check_real(residue + val, mass, "pair")


def kernel_by_spec(x: float, spec: KernelSpec) -> float:
    if spec.kind == "cutoff":
        return cutoff_kernel(x, spec)
    return pair_kernel(x, spec)


def reflected_cutoff_kernel(y: float, alpha: float, spec: KernelSpec | None = None) -> complex:
    """Kernel of the functional-equation remainder of the one-sided cutoff sum.

    (1/2pi i) int e^{z^2} Gamma(1/4 + (z-alpha)/2)/Gamma(1/4 + (alpha-z)/2)
    y^{-z} dz/z on Re(z) = 2; only queried at y > pi (dual-sum arguments),
    where the direct line is stable.
    """
    spec = spec or KernelSpec()
    if y <= 1:
        raise SpecValidationError("reflected kernel defined for y > 1")
    t, w = _panel_nodes(spec.truncation_T, spec.node_count)
    s = 2.0 + 1j * t
    expo = (
        s * s
        - s * math.log(y)
        + loggamma(0.25 + (s - alpha) / 2)
        - loggamma(0.25 + (alpha - s) / 2)
    )
    return complex(np.sum(np.exp(expo) / s * w) / (2 * np.pi))


class KernelGrid:
    """Spline-memoized kernel on a geometric x-grid.

    Values are precomputed at n nodes in log x on [u_lo, u_hi] and cubic-
    interpolated; budgeted interpolation error ~1e-10 at the default
    density.  Outside the grid the cutoff kernel returns its limits (1 on
    the left, 0 on the right); pair grids must cover their query range.
    Construction is cached; readers share the immutable spline.
    """

    def __init__(self, spec: KernelSpec, u_lo: float, u_hi: float, n: int = 8192):
        from scipy.interpolate import CubicSpline

        self.spec = spec
        self.u_lo = u_lo
        self.u_hi = u_hi
        us = np.linspace(u_lo, u_hi, n)
        vals = np.array([kernel_by_spec(math.exp(u), spec) for u in us])
        self._spline = CubicSpline(us, vals)
        self._left = 1.0 if spec.kind == "cutoff" else float(vals[0])
        self._right = 0.0

    def __call__(self, x: np.ndarray) -> np.ndarray:
        u = np.log(np.asarray(x, dtype=np.float64))
        out = np.empty_like(u)
        lo = u < self.u_lo
        hi = u > self.u_hi
        mid = ~(lo | hi)
        out[lo] = self._left
        out[hi] = self._right
        out[mid] = self._spline(u[mid])
        return out


@lru_cache(maxsize=16)
def cached_grid(spec: KernelSpec, u_lo: float, u_hi: float, n: int = 8192) -> KernelGrid:
    return KernelGrid(spec, u_lo, u_hi, n)


def power_log_profile(i: int, y: float, h: float) -> float:
    """(1/2pi i) int (y/h)^u u^{-(i+1)} du along a vertical line, by quadrature.

    Equals (log(y/h))^i / i! for h <= y and 0 for h > y: the Mellin profile
    that turns power-series coefficients into the log-ratio polynomial
    weights of the mollifier pieces.  h > y returns 0 with a warning.
    """
    if i < 1:
        raise SpecValidationError(f"profile order must be >= 1, got {i}")
    if h > y:
        warnings.warn("profile argument h exceeds y; integral is 0", RuntimeWarning)
        return 0.0
    logz = math.log(y) - math.log(h)
    if logz <= 0:
        return 0.0
    # bend the line into two rays at 135 degrees: (y/h)^u then decays like
    # e^{-t logz/sqrt(2)} along the rays and the integral converges fast
    sigma = 1.0 / logz
    phase = complex(-math.sqrt(0.5), math.sqrt(0.5))
    t_max = 60.0 / (logz * math.sqrt(0.5))
    edges = [0.0]
    step = sigma
    while edges[-1] < t_max:
        edges.append(min(edges[-1] + step, t_max))
        step *= 2
    x0, w0 = leggauss(32)
    total = 0.0 + 0.0j
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = (a + b) / 2, (b - a) / 2
        t = mid + half * x0
        u = sigma + t * phase
        vals = np.exp(u * logz - (i + 1) * np.log(u)) * phase
        total += np.sum(vals * w0) * half
    return float(total.imag / math.pi)
