"""One-point Green function, its Robin expansion data, and the two-point potential.

Sphere values come from the closed form
    G(z,a) = -(1/4pi) (log(|z-a|^2 / ((1+|z|^2)(1+|a|^2))) + 1),
a true function of the two points (chart-invariant).  Torus values come from
the odd theta series with a quadratic Im-correction restoring double
periodicity and an additive constant enforcing zero mean:
    G(z,a) = -(1/2pi) (log|theta1(z-a)| - pi Im(z-a)^2 / Im tau) + C(tau).
Correctness of the torus branch is pinned by the spectral Poisson oracle, not
by the formula itself.

The expansion of the regular part H(z,a) = 2 pi G + log|z-a| around the pole,
    H = h0 + Re(h1 (z-a)) + Re(h2 (z-a)^2) + h11 |z-a|^2 + O(|z-a|^3),
defines the chart-dependent Robin data (h0, h1, h2, h11); RobinData records
the chart it was evaluated in, since these coefficients glue as connections,
not functions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import theta
from .errors import SingularityError
from .surfaces import (
    SPHERE,
    Surface,
    SurfacePoint,
    conformal_factor,
    geodesic_distance,
    reduce_centered,
)

_COINCIDENCE_TOL = 1e-12


@dataclass(frozen=True)
class GreenEvaluation:
    """Green value and its holomorphic gradient in the chart of z."""

    value: float
    grad_z: complex
    at: tuple[SurfacePoint, SurfacePoint]


@dataclass(frozen=True)
class RobinData:
    """Taylor data of the regular part of G at a pole, in a stated chart."""

    h0: float
    h1: complex
    h2: complex
    h11: float
    at: SurfacePoint
    chart_id: int


def _require_separated(surface: Surface, z: SurfacePoint, a: SurfacePoint) -> None:
    if geodesic_distance(surface, z, a) <= _COINCIDENCE_TOL:
        raise SingularityError("Green function evaluated at coincident points")


def _sphere_pair_terms(z: SurfacePoint, a: SurfacePoint) -> tuple[float, complex]:
    """log of the invariant chordal ratio and the pole term of dG/dz at z.

    Same-chart pairs use |z-a|^2/((1+|z|^2)(1+|a|^2)) directly; cross-chart
    pairs use the equivalent |wz-1|^2/((1+|z|^2)(1+|w|^2)) with w the
    coordinate of `a` in the opposite chart, which stays stable for poles at
    or near the chart's point at infinity.
    """
    zc = z.coord
    ac = a.coord
    if z.chart_id == a.chart_id:
        num = abs(zc - ac) ** 2
        pole = 1.0 / (zc - ac)
    else:
        num = abs(ac * zc - 1.0) ** 2
        pole = ac / (ac * zc - 1.0)
    log_ratio = math.log(num) - math.log1p(abs(zc) ** 2) - math.log1p(abs(ac) ** 2)
    return log_ratio, pole


def green(surface: Surface, z: SurfacePoint, a: SurfacePoint) -> GreenEvaluation:
    """Green function G(z, a) with zero mean, and dG/dz in the chart of z."""
    surface.check_chart(z.chart_id)
    surface.check_chart(a.chart_id)
    _require_separated(surface, z, a)
    if surface.kind == SPHERE:
        log_ratio, pole = _sphere_pair_terms(z, a)
        value = -(log_ratio + 1.0) / (4.0 * math.pi)
        grad = -(pole - z.coord.conjugate() / (1.0 + abs(z.coord) ** 2)) / (4.0 * math.pi)
        return GreenEvaluation(value, grad, (z, a))
    tau = surface.tau
    ctx = theta.theta_context(tau)
    const = theta.green_normalization_constant(tau)
    u = reduce_centered(tau, z.coord - a.coord)
    th = theta.theta1(ctx, u)
    value = -(math.log(abs(th)) - math.pi * u.imag**2 / tau.imag) / (2.0 * math.pi) + const
    grad = -(0.5 * theta.theta1_dz(ctx, u) / th + 1j * math.pi * u.imag / tau.imag) / (2.0 * math.pi)
    return GreenEvaluation(value, grad, (z, a))


def torus_green_values(tau: complex, u) -> np.ndarray:
    """Vectorized torus G over an array of differences u = z - a (any branch)."""
    tau = complex(tau)
    ctx = theta.theta_context(tau)
    const = theta.green_normalization_constant(tau)
    u = np.asarray(u, dtype=complex)
    t = u.imag / tau.imag
    s = u.real - t * tau.real
    s -= np.floor(s + 0.5)
    t -= np.floor(t + 0.5)
    ur = s + t * tau
    th = theta.theta1(ctx, ur)
    return -(np.log(np.abs(th)) - math.pi * ur.imag**2 / tau.imag) / (2.0 * math.pi) + const


def sphere_green_values(pole: SurfacePoint, chart_id: int, zs) -> np.ndarray:
    """Vectorized sphere G(.; pole) over chart coordinates zs of one chart."""
    zs = np.asarray(zs, dtype=complex)
    ac = pole.coord
    if chart_id == pole.chart_id:
        num = np.abs(zs - ac) ** 2
    else:
        num = np.abs(ac * zs - 1.0) ** 2
    ratio = np.log(num) - np.log1p(np.abs(zs) ** 2) - math.log1p(abs(ac) ** 2)
    return -(ratio + 1.0) / (4.0 * math.pi)


def robin_data(surface: Surface, a: SurfacePoint) -> RobinData:
    """Robin coefficients of G(., a) in the chart of `a` as given."""
    surface.check_chart(a.chart_id)
    if surface.kind == SPHERE:
        ac = a.coord
        m2 = abs(ac) ** 2
        denom = 1.0 + m2
        return RobinData(
            h0=math.log1p(m2) - 0.5,
            h1=ac.conjugate() / denom,
            h2=-(ac.conjugate() ** 2) / (2.0 * denom * denom),
            h11=1.0 / (2.0 * denom * denom),
            at=a,
            chart_id=a.chart_id,
        )
    tau = surface.tau
    ctx = theta.theta_context(tau)
    const = theta.green_normalization_constant(tau)
    h0 = -math.log(abs(ctx.d1_zero)) + 2.0 * math.pi * const
    h2 = -ctx.d3_zero / (6.0 * ctx.d1_zero) - math.pi / (2.0 * tau.imag)
    return RobinData(
        h0=h0,
        h1=0.0j,
        h2=h2,
        h11=math.pi / (2.0 * surface.area),
        at=a,
        chart_id=a.chart_id,
    )


def robin_metric(surface: Surface, a: SurfacePoint) -> float:
    """Coefficient exp(-h0(a)) of the Robin metric in the chart of a."""
    return math.exp(-robin_data(surface, a).h0)


def renormalized_robin(surface: Surface, a: SurfacePoint) -> float:
    """R(a) = (h0(a) + log lambda(a)) / (2 pi); chart-invariant."""
    data = robin_data(surface, a)
    return (data.h0 + math.log(conformal_factor(surface, a))) / (2.0 * math.pi)


def fundamental_potential(surface: Surface, z: SurfacePoint, w: SurfacePoint,
                          a: SurfacePoint, b: SurfacePoint) -> float:
    """Two-point potential 2 pi (G(z,a) - G(z,b) - G(w,a) + G(w,b)).

    Metric-independent, with +-1 logarithmic poles at a and b (in z) and
    normalized to vanish at z = w.
    """
    for probe in (z, w):
        for pole in (a, b):
            if geodesic_distance(surface, probe, pole) <= _COINCIDENCE_TOL:
                raise SingularityError("fundamental potential evaluated at a pole")
    if z.chart_id == w.chart_id and z.coord == w.coord:
        return 0.0
    return 2.0 * math.pi * (
        green(surface, z, a).value
        - green(surface, z, b).value
        - green(surface, w, a).value
        + green(surface, w, b).value
    )
