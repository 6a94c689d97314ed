"""Odd Jacobi theta series and per-modulus cached data for the torus Green function.

The series theta1(z | tau) = 2 * sum_{n>=0} (-1)^n q^{(n+1/2)^2} sin((2n+1) pi z)
with nome q = exp(i pi tau) converges double-exponentially once |Im z| stays
below Im(tau)/2, which lattice-centered reduction of arguments guarantees.
The truncation length is fixed per tau so that the first dropped term is below
1e-15 of the leading one on that strip (never fewer than 8 terms).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

_MIN_TERMS = 8
_MAX_TERMS = 400


def _term_count(tau_im: float) -> int:
    # magnitude bound of term n on |Im z| <= 1.05 * Im tau (covers the whole
    # fundamental domain, not just the centered strip), relative to term 0
    imax = 1.05 * tau_im
    lead = -math.pi * tau_im * 0.25 + math.pi * imax
    n = 1
    while n < _MAX_TERMS:
        expo = -math.pi * tau_im * (n + 0.5) ** 2 + (2 * n + 1) * math.pi * imax
        if expo - lead < math.log(1e-15) and n >= _MIN_TERMS:
            break
        n += 1
    return n + 1


@dataclass(frozen=True)
class ThetaContext:
    """Truncated series data for one modulus tau."""

    tau: complex
    n_terms: int
    coeffs: tuple[complex, ...]      # (-1)^n q^{(n+1/2)^2}
    freqs: tuple[float, ...]         # (2n+1) pi
    d1_zero: complex                 # theta1'(0)
    d3_zero: complex                 # theta1'''(0)


@lru_cache(maxsize=None)
def theta_context(tau: complex) -> ThetaContext:
    tau = complex(tau)
    if not tau.imag > 0:
        raise ValueError("theta modulus must have Im(tau) > 0")
    n = _term_count(tau.imag)
    q = cmath.exp(1j * math.pi * tau)
    coeffs = []
    freqs = []
    for j in range(n):
        coeffs.append((-1) ** j * q ** ((j + 0.5) ** 2))
        freqs.append((2 * j + 1) * math.pi)
    d1 = 2.0 * sum(c * f for c, f in zip(coeffs, freqs))
    d3 = -2.0 * sum(c * f**3 for c, f in zip(coeffs, freqs))
    return ThetaContext(tau, n, tuple(coeffs), tuple(freqs), d1, d3)


def theta1(ctx: ThetaContext, z, n_terms: int | None = None):
    """theta1(z | tau); scalar complex in, scalar out; ndarray in, ndarray out."""
    n = ctx.n_terms if n_terms is None else min(n_terms, len(ctx.coeffs))
    if isinstance(z, np.ndarray):
        acc = np.zeros(z.shape, dtype=complex)
        for c, f in zip(ctx.coeffs[:n], ctx.freqs[:n]):
            acc += c * np.sin(f * z)
        return 2.0 * acc
    s = 0j
    for c, f in zip(ctx.coeffs[:n], ctx.freqs[:n]):
        s += c * cmath.sin(f * z)
    return 2.0 * s


def theta1_dz(ctx: ThetaContext, z, n_terms: int | None = None):
    """d theta1/dz."""
    n = ctx.n_terms if n_terms is None else min(n_terms, len(ctx.coeffs))
    if isinstance(z, np.ndarray):
        acc = np.zeros(z.shape, dtype=complex)
        for c, f in zip(ctx.coeffs[:n], ctx.freqs[:n]):
            acc += c * f * np.cos(f * z)
        return 2.0 * acc
    s = 0j
    for c, f in zip(ctx.coeffs[:n], ctx.freqs[:n]):
        s += c * f * cmath.cos(f * z)
    return 2.0 * s


# Green normalization constants, one per tau (single writer under the GIL,
# many readers). Computed by quadrature of the mean of the unnormalized
# potential over the fundamental domain.
_GREEN_CONST: dict[complex, float] = {}


def green_normalization_constant(tau: complex) -> float:
    """Additive constant making the torus Green function integrate to zero.

    Mean over the fundamental parallelogram (lattice coordinates s, t) of
    log|theta1(s + t*tau)| - pi * Im(tau) * t^2, divided by 2 pi.  The s
    integral of a fixed-t slice is a smooth periodic function, handled by the
    trapezoid rule with a t-dependent point count (the slice's Fourier decay
    degrades as t approaches the lattice points); the t integral uses
    Gauss-Legendre, whose interior nodes avoid the singular slices entirely.
    """
    tau = complex(tau)
    cached = _GREEN_CONST.get(tau)
    if cached is not None:
        return cached
    ctx = theta_context(tau)
    t2 = tau.imag
    nodes, weights = np.polynomial.legendre.leggauss(48)
    t_nodes = 0.5 * (nodes + 1.0)
    t_weights = 0.5 * weights
    total = 0.0
    for t, w in zip(t_nodes, t_weights):
        margin = min(t, 1.0 - t) * t2
        n_s = int(max(128, math.ceil(40.0 / (2.0 * math.pi * margin) * 2.0 * math.pi)))
        n_s = min(n_s, 1 << 17)
        s = (np.arange(n_s) + 0.5) / n_s
        z = s + t * tau
        slice_mean = float(np.mean(np.log(np.abs(theta1(ctx, z)))))
        total += w * (slice_mean - math.pi * t2 * t * t)
    const = total / (2.0 * math.pi)
    _GREEN_CONST[tau] = const
    return const
