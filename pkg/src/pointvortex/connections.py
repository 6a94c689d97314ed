"""Coordinate-change calculus for chart-indexed quantities.

A holomorphic change of chart w = phi(z) acts on the coefficient of an
order-k object through one of three nonlinear differential expressions of
the 3-jet of phi (log-derivative, its derivative, and the Schwarzian
derivative).  This module implements those brackets, the gluing rules for
connection coefficients of order 0, 1 and 2, the covariant derivatives they
induce, and the curvature map from order-1 to order-2 coefficients.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass

_TWO_PI = 2.0 * cmath.pi


@dataclass(frozen=True)
class TransitionJet:
    """First three derivatives (phi', phi'', phi''') of a chart change at a point."""

    phi1: complex
    phi2: complex
    phi3: complex

    def __post_init__(self):
        if self.phi1 == 0:
            raise ValueError("transition jet must have phi' != 0")

    @classmethod
    def identity(cls) -> "TransitionJet":
        return cls(1.0, 0.0, 0.0)

    def compose(self, inner: "TransitionJet") -> "TransitionJet":
        """Jet of f(g(.)) where self is the jet of f at g's image and `inner` is g's jet."""
        f1, f2, f3 = self.phi1, self.phi2, self.phi3
        g1, g2, g3 = inner.phi1, inner.phi2, inner.phi3
        return TransitionJet(
            f1 * g1,
            f2 * g1 * g1 + f1 * g2,
            f3 * g1**3 + 3.0 * f2 * g1 * g2 + f1 * g3,
        )

    def inverse(self) -> "TransitionJet":
        """Jet of the inverse map at the image point."""
        p1, p2, p3 = self.phi1, self.phi2, self.phi3
        i1 = 1.0 / p1
        i2 = -p2 / p1**3
        i3 = (3.0 * p2 * p2 - p1 * p3) / p1**5
        return TransitionJet(i1, i2, i3)


@dataclass(frozen=True)
class ConnectionValue:
    """Coefficient of an order-0/1/2 connection at a point, in some stated chart.

    Order-0 values carry an additive 2*pi*i indeterminacy in the imaginary
    part; only their exponential is fully well defined, and `close_to`
    compares accordingly.
    """

    order: int
    value: complex

    def __post_init__(self):
        if self.order not in (0, 1, 2):
            raise ValueError(f"connection order must be 0, 1 or 2, got {self.order}")

    def close_to(self, other: "ConnectionValue", tol: float = 1e-12) -> bool:
        if self.order != other.order:
            return False
        d = self.value - other.value
        if self.order == 0:
            d -= _TWO_PI * 1j * round(d.imag / _TWO_PI)
        return abs(d) <= tol


def bracket(jet: TransitionJet, k: int) -> complex:
    """The order-k change-of-coordinate expression of a 3-jet.

    k=0: log phi' (principal branch); k=1: phi''/phi';
    k=2: phi'''/phi' - (3/2)(phi''/phi')^2, the Schwarzian derivative.
    """
    if k == 0:
        return cmath.log(jet.phi1)
    r = jet.phi2 / jet.phi1
    if k == 1:
        return r
    if k == 2:
        return jet.phi3 / jet.phi1 - 1.5 * r * r
    raise ValueError(f"bracket order must be 0, 1 or 2, got {k}")


def transform_connection(c: ConnectionValue, jet: TransitionJet) -> ConnectionValue:
    """Push a connection coefficient through the chart change with the given jet.

    Order 0: p~ = p - {w,z}_0.  Order 1: r~ = (r - {w,z}_1)/phi'.
    Order 2: q~ = (q - {w,z}_2)/phi'^2.
    """
    b = bracket(jet, c.order)
    if c.order == 0:
        return ConnectionValue(0, c.value - b)
    if c.order == 1:
        return ConnectionValue(1, (c.value - b) / jet.phi1)
    return ConnectionValue(2, (c.value - b) / (jet.phi1 * jet.phi1))


def chain_check(jet_a: TransitionJet, jet_b: TransitionJet,
                jet_ab: TransitionJet, k: int) -> float:
    """Residual of the order-k chain rule for a composed chart change.

    `jet_b` is the jet of u(w) at w0, `jet_a` the jet of z(u) at u0 = u(w0),
    and `jet_ab` the jet of the composition z(u(w)) at w0.  The chain rule
    states {z,w}_k = {z,u}_k * (u'(w0))^k + {u,w}_k in the w-chart; the
    absolute residual is returned (order-0 residual taken modulo 2*pi*i).
    """
    lhs = bracket(jet_ab, k)
    rhs = bracket(jet_a, k) * jet_b.phi1**k + bracket(jet_b, k)
    d = lhs - rhs
    if k == 0:
        d -= _TWO_PI * 1j * round(d.imag / _TWO_PI)
    return abs(d)


def curvature(r: ConnectionValue, dr_dz: complex) -> ConnectionValue:
    """Order-2 coefficient q = dr/dz - r^2/2 induced by an order-1 coefficient.

    `dr_dz` is the holomorphic (Wirtinger) z-derivative of the order-1
    coefficient at the point, supplied by the caller analytically or by
    finite differences.
    """
    if r.order != 1:
        raise ValueError("curvature expects an order-1 connection value")
    return ConnectionValue(2, dr_dz - 0.5 * r.value * r.value)


def covariant_derivative(phi: complex, dphi_dz: complex, k: float, r: ConnectionValue) -> complex:
    """nabla_k phi = dphi/dz - k*r*phi, taking order-k to order-(k+1) differentials."""
    if r.order != 1:
        raise ValueError("covariant derivative expects an order-1 connection value")
    return dphi_dz - k * r.value * phi


def lambda2_operator(phi: complex, d2phi_dz2: complex, q: ConnectionValue) -> complex:
    """Second covariant operator d^2 phi/dz^2 + q*phi/2 on order -1/2 differentials."""
    if q.order != 2:
        raise ValueError("lambda2 expects an order-2 connection value")
    return d2phi_dz2 + 0.5 * q.value * phi
