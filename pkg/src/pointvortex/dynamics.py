"""Point-vortex dynamics: stream-expansion coefficients, the connection-based
velocity law, the renormalized Hamiltonian, and time integration.

The velocity of vortex k in its chart is

    dz_k/dt = Gamma_k / (2 pi i lambda(z_k)^2) * (conj(c1(z_k)) + d(log lambda)/dzbar),

where c1 collects the Robin coefficient h1, the holomorphic Green gradients of
the other vortices, and the gradient of the conjugate circulation potential.
The Hamiltonian couples the Green/Robin quadratic form in the strengths with
the circulation quadratic form; differentiating it numerically gives an
independent velocity route used for cross-validation.

Torus trajectories are integrated in universal-cover coordinates so the
multivalued circulation potentials stay on one continuous branch; doubly
periodic quantities only ever see lattice-reduced differences, so cover
coordinates cost nothing.  Emitted records hold canonical positions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import CollisionError, StepRejectionError
from .green import green, renormalized_robin, robin_data
from .periods import (
    CirculationField,
    CirculationState,
    PeriodBasis,
    build_basis,
    circulation_energy,
    circulation_form,
    circulation_state,
    cycle_potential,
)
from .surfaces import (
    SPHERE,
    Surface,
    SurfacePoint,
    conformal_factor,
    dlog_lambda_dzbar,
    geodesic_distance,
    wrap_counts,
)

_TWO_PI = 2.0 * math.pi
_FOUR_PI = 4.0 * math.pi

DEFAULT_COLLISION_THRESHOLD = 1e-3


@dataclass(frozen=True)
class VortexState:
    """Vortex positions, signed strengths, and the fixed base circulations."""

    surface: Surface
    positions: tuple[SurfacePoint, ...]
    strengths: tuple[float, ...]
    base_a: tuple[float, ...] = ()
    base_b: tuple[float, ...] = ()
    collision_threshold: float = DEFAULT_COLLISION_THRESHOLD

    def __post_init__(self):
        n = len(self.positions)
        if n < 2:
            raise ValueError("a vortex state needs at least two vortices")
        if len(self.strengths) != n:
            raise ValueError("positions and strengths must have equal length")
        if any(g == 0.0 for g in self.strengths):
            raise ValueError("vortex strengths must all be nonzero")
        if abs(sum(self.strengths)) > 1e-12:
            raise ValueError(
                f"vortex strengths must sum to zero (got {sum(self.strengths):.3e})"
            )
        g = self.surface.genus
        if len(self.base_a) != g or len(self.base_b) != g:
            raise ValueError(f"base circulations must have length {g}")
        object.__setattr__(
            self, "positions",
            tuple(self.surface.canonical_point(p) for p in self.positions),
        )
        object.__setattr__(self, "strengths", tuple(float(g) for g in self.strengths))
        object.__setattr__(self, "base_a", tuple(float(v) for v in self.base_a))
        object.__setattr__(self, "base_b", tuple(float(v) for v in self.base_b))
        sep = min_separation(self.surface, self.positions)
        if sep <= self.collision_threshold:
            raise ValueError(
                f"initial pairwise separation {sep:.3e} is below the collision "
                f"threshold {self.collision_threshold:.3e}"
            )

    @property
    def n(self) -> int:
        return len(self.positions)


@dataclass(frozen=True)
class TrajectoryRecord:
    time: float
    positions: tuple[SurfacePoint, ...]
    hamiltonian: float
    circ_a: tuple[float, ...]
    circ_b: tuple[float, ...]
    min_separation: float


def min_separation(surface: Surface, positions) -> float:
    best = math.inf
    pts = list(positions)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            best = min(best, geodesic_distance(surface, pts[i], pts[j]))
    return best


# ---------------------------------------------------------------------------
# raw evaluation layer: chart lists + complex coordinates, no reduction


def _pair_green_grad(surface: Surface, chart_z: int, z: complex,
                     chart_a: int, a: complex) -> complex:
    """dG(z, a)/dz in z's chart, valid for non-canonical representatives."""
    if surface.kind == SPHERE:
        if chart_z == chart_a:
            pole = 1.0 / (z - a)
        else:
            pole = a / (a * z - 1.0)
        return -(pole - z.conjugate() / (1.0 + abs(z) ** 2)) / _FOUR_PI
    ev = green(surface, SurfacePoint(0, z), SurfacePoint(0, a))
    return ev.grad_z


def _circulation(basis: PeriodBasis, coords, strengths,
                 base_a, base_b) -> CirculationState:
    return circulation_state(basis, coords, strengths, base_a, base_b)


def _c1_raw(surface: Surface, basis: PeriodBasis, charts, coords, strengths,
            field_: CirculationField, k: int) -> complex:
    zk = coords[k]
    gk = strengths[k]
    total = robin_data(surface, SurfacePoint(charts[k], zk)).h1
    for j in range(len(coords)):
        if j == k:
            continue
        grad = _pair_green_grad(surface, charts[k], zk, charts[j], coords[j])
        total += (_FOUR_PI * strengths[j] / gk) * grad
    if basis.genus:
        total += (_FOUR_PI / gk) * field_.u_star_grad
    return total


def _velocity_raw(surface: Surface, basis: PeriodBasis, charts, coords,
                  strengths, base_a, base_b) -> list[complex]:
    circ = _circulation(basis, coords, strengths, base_a, base_b)
    field_ = circulation_form(basis, circ)
    out = []
    for k in range(len(coords)):
        p = SurfacePoint(charts[k], coords[k])
        lam2 = conformal_factor(surface, p) ** 2
        c1 = _c1_raw(surface, basis, charts, coords, strengths, field_, k)
        out.append(
            strengths[k] / (2j * math.pi * lam2)
            * (c1.conjugate() + dlog_lambda_dzbar(surface, p))
        )
    return out


def _hamiltonian_raw(surface: Surface, basis: PeriodBasis, charts, coords,
                     strengths, base_a, base_b) -> float:
    twice_h = 0.0
    n = len(coords)
    for k in range(n):
        twice_h += strengths[k] ** 2 * renormalized_robin(
            surface, SurfacePoint(charts[k], coords[k])
        )
    for k in range(n):
        for j in range(k + 1, n):
            gv = green(
                surface, SurfacePoint(charts[k], coords[k]),
                SurfacePoint(charts[j], coords[j]),
            ).value
            twice_h += 2.0 * strengths[k] * strengths[j] * gv
    if basis.genus:
        circ = _circulation(basis, coords, strengths, base_a, base_b)
        twice_h += circulation_energy(basis, circ)
    return 0.5 * twice_h


def _check_separation(surface: Surface, charts, coords, threshold: float,
                      time: float) -> float:
    pts = [SurfacePoint(c, z) for c, z in zip(charts, coords)]
    best = math.inf
    pair = (0, 1)
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            d = geodesic_distance(surface, pts[i], pts[j])
            if d < best:
                best = d
                pair = (i, j)
    if best < threshold:
        raise CollisionError(time, pair, best)
    return best


# ---------------------------------------------------------------------------
# public operations on states


def _unpack(state: VortexState):
    charts = [p.chart_id for p in state.positions]
    coords = [p.coord for p in state.positions]
    basis = build_basis(state.surface)
    return charts, coords, basis


def c1_coefficient(state: VortexState, k: int) -> complex:
    """First stream-expansion coefficient at vortex k, in its canonical chart."""
    charts, coords, basis = _unpack(state)
    _check_separation(state.surface, charts, coords, state.collision_threshold, 0.0)
    circ = _circulation(basis, coords, state.strengths, state.base_a, state.base_b)
    field_ = circulation_form(basis, circ)
    return _c1_raw(state.surface, basis, charts, coords, state.strengths, field_, k)


def c0_coefficient(state: VortexState, k: int) -> float:
    """Constant stream-expansion coefficient at vortex k (diagnostic only)."""
    charts, coords, basis = _unpack(state)
    _check_separation(state.surface, charts, coords, state.collision_threshold, 0.0)
    zk = state.positions[k]
    gk = state.strengths[k]
    total = robin_data(state.surface, zk).h0
    for j in range(state.n):
        if j == k:
            continue
        total += (_TWO_PI * state.strengths[j] / gk) * green(
            state.surface, zk, state.positions[j]
        ).value
    if basis.genus:
        circ = _circulation(basis, coords, state.strengths, state.base_a, state.base_b)
        field_ = circulation_form(basis, circ)
        total += (_TWO_PI / gk) * field_.u_star(zk)
    return total


def vortex_velocity(state: VortexState, k: int) -> complex:
    """Velocity dz_k/dt from the connection-based law, in the canonical chart."""
    charts, coords, basis = _unpack(state)
    _check_separation(state.surface, charts, coords, state.collision_threshold, 0.0)
    return _velocity_raw(
        state.surface, basis, charts, coords, state.strengths,
        state.base_a, state.base_b,
    )[k]


def hamiltonian(state: VortexState) -> float:
    """Renormalized energy of the configuration."""
    charts, coords, basis = _unpack(state)
    _check_separation(state.surface, charts, coords, state.collision_threshold, 0.0)
    return _hamiltonian_raw(
        state.surface, basis, charts, coords, state.strengths,
        state.base_a, state.base_b,
    )


def hamiltonian_velocity(state: VortexState, k: int, step: float = 1e-5) -> complex:
    """Velocity of vortex k from central finite differences of the Hamiltonian.

    One Richardson level on the Wirtinger derivative; the circulation
    coefficients are recomputed inside every perturbed energy evaluation, so
    this route shares no assembled terms with the direct law.
    """
    charts, coords, basis = _unpack(state)
    _check_separation(state.surface, charts, coords, state.collision_threshold, 0.0)

    def energy(dz: complex) -> float:
        pert = list(coords)
        pert[k] = pert[k] + dz
        return _hamiltonian_raw(
            state.surface, basis, charts, pert, state.strengths,
            state.base_a, state.base_b,
        )

    def dzbar(h: float) -> complex:
        hx = (energy(h) - energy(-h)) / (2.0 * h)
        hy = (energy(1j * h) - energy(-1j * h)) / (2.0 * h)
        return 0.5 * (hx + 1j * hy)

    d = (4.0 * dzbar(step / 2.0) - dzbar(step)) / 3.0
    lam2 = conformal_factor(state.surface, state.positions[k]) ** 2
    return -2j * d / (state.strengths[k] * lam2)


def canonical_state(state: VortexState, charts, coords) -> VortexState:
    """Canonicalize raw coordinates, compensating base circulations for wraps.

    Reducing a torus position by m + n*tau shifts the branch values of the
    cycle potentials, so the fixed circulations absorb a += Gamma*n and
    b -= Gamma*m to leave the assembled flow unchanged.
    """
    surface = state.surface
    if surface.genus == 0:
        pts = tuple(
            surface.canonical_point(SurfacePoint(c, z)) for c, z in zip(charts, coords)
        )
        return replace(state, positions=pts)
    tau = surface.tau
    new_a = list(state.base_a)
    new_b = list(state.base_b)
    pts = []
    for z, gamma in zip(coords, state.strengths):
        m, n = wrap_counts(tau, z)
        pts.append(surface.canonical_point(SurfacePoint(0, z)))
        new_a[0] += gamma * n
        new_b[0] -= gamma * m
    return replace(
        state, positions=tuple(pts), base_a=tuple(new_a), base_b=tuple(new_b)
    )


# ---------------------------------------------------------------------------
# time integration

# Fehlberg 4(5) tableau (stage times are irrelevant: the field is autonomous)
_RKF_A = (
    (),
    (0.25,),
    (3.0 / 32.0, 9.0 / 32.0),
    (1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0),
    (439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0),
    (-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0),
)
_RKF_B5 = (16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0)
_RKF_ERR = (1.0 / 360.0, 0.0, -128.0 / 4275.0, -2197.0 / 75240.0, 1.0 / 50.0, 2.0 / 55.0)


@dataclass
class _Trajectory:
    surface: Surface
    basis: PeriodBasis
    strengths: tuple[float, ...]
    base_a: tuple[float, ...]
    base_b: tuple[float, ...]
    charts: list[int]
    coords: list[complex]
    threshold: float
    handover: float
    rejections: int = 0

    def velocity(self, coords) -> list[complex]:
        return _velocity_raw(
            self.surface, self.basis, self.charts, coords, self.strengths,
            self.base_a, self.base_b,
        )

    def handover_step(self) -> None:
        if self.surface.kind != SPHERE:
            return
        for i, z in enumerate(self.coords):
            if abs(z) > self.handover:
                self.charts[i] = 1 - self.charts[i]
                self.coords[i] = 1.0 / z

    def record(self, t: float) -> TrajectoryRecord:
        pts = [
            self.surface.canonical_point(SurfacePoint(c, z))
            for c, z in zip(self.charts, self.coords)
        ]
        h = _hamiltonian_raw(
            self.surface, self.basis, self.charts, self.coords, self.strengths,
            self.base_a, self.base_b,
        )
        if self.basis.genus:
            circ = _circulation(
                self.basis, self.coords, self.strengths, self.base_a, self.base_b
            )
            rec_a = tuple(
                circ.A[k]
                - sum(
                    g * cycle_potential(self.basis, k, "alpha", z).value
                    for z, g in zip(self.coords, self.strengths)
                )
                for k in range(self.basis.genus)
            )
            rec_b = tuple(
                circ.B[k]
                - sum(
                    g * cycle_potential(self.basis, k, "beta", z).value
                    for z, g in zip(self.coords, self.strengths)
                )
                for k in range(self.basis.genus)
            )
        else:
            rec_a = ()
            rec_b = ()
        sep = min_separation(self.surface, pts)
        return TrajectoryRecord(t, tuple(pts), h, rec_a, rec_b, sep)


def _rk4_step(traj: _Trajectory, dt: float) -> None:
    y0 = list(traj.coords)
    k1 = traj.velocity(y0)
    k2 = traj.velocity([y + 0.5 * dt * v for y, v in zip(y0, k1)])
    k3 = traj.velocity([y + 0.5 * dt * v for y, v in zip(y0, k2)])
    k4 = traj.velocity([y + dt * v for y, v in zip(y0, k3)])
    traj.coords = [
        y + dt * (a + 2.0 * b + 2.0 * c + d) / 6.0
        for y, a, b, c, d in zip(y0, k1, k2, k3, k4)
    ]


def _rkf45_advance(traj: _Trajectory, t: float, t_end: float, dt0: float,
                   rtol: float, atol: float, max_rejects: int = 60) -> float:
    """Advance to t_end with embedded 4(5) steps; returns the final trial dt."""
    dt = dt0
    consecutive = 0
    while t < t_end - 1e-15 * max(1.0, abs(t_end)):
        dt = min(dt, t_end - t)
        y0 = list(traj.coords)
        ks = []
        for i in range(6):
            yi = list(y0)
            for j, a in enumerate(_RKF_A[i]):
                for m in range(len(yi)):
                    yi[m] += dt * a * ks[j][m]
            ks.append(traj.velocity(yi))
        y1 = list(y0)
        err = 0.0
        for m in range(len(y0)):
            for i, b in enumerate(_RKF_B5):
                y1[m] += dt * b * ks[i][m]
            e = sum(dt * c * ks[i][m] for i, c in enumerate(_RKF_ERR))
            err = max(err, abs(e))
        tol = atol + rtol * max(1.0, max(abs(y) for y in y0))
        if err <= tol:
            traj.coords = y1
            t += dt
            traj.handover_step()
            _check_separation(traj.surface, traj.charts, traj.coords,
                              traj.threshold, t)
            consecutive = 0
        else:
            traj.rejections += 1
            consecutive += 1
            if consecutive > max_rejects:
                raise StepRejectionError(
                    f"adaptive step rejected {consecutive} times in a row at t={t:.6g}"
                )
        factor = 0.9 * (tol / err) ** 0.2 if err > 0 else 5.0
        dt *= min(5.0, max(0.2, factor))
    return dt


def integrate(state: VortexState, dt: float, steps: int, method: str = "rk4",
              record_every: int = 1, handover_threshold: float = 1.0,
              rtol: float = 1e-9, atol: float = 1e-12,
              stats_out: dict | None = None) -> list[TrajectoryRecord]:
    """Advance the state for `steps` steps of size `dt` under the velocity law.

    `method` is "rk4" (fixed step) or "rk45-adaptive" (embedded 4(5) pair with
    step control between record times).  Records are emitted at t=0, every
    `record_every`-th step, and at the end; each carries the energy, the
    Kelvin-reconstructed base circulations and the minimum separation.
    Raises CollisionError when two vortices approach below the state's
    collision threshold, and StepRejectionError if adaptive control stalls.
    `stats_out`, when given, receives the rejection count and, on a collision
    abort, the records produced so far under "partial_records".
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    if method not in ("rk4", "rk45-adaptive"):
        raise ValueError(f"unknown integration method {method!r}")
    charts, coords, basis = _unpack(state)
    traj = _Trajectory(
        surface=state.surface, basis=basis, strengths=state.strengths,
        base_a=state.base_a, base_b=state.base_b, charts=charts,
        coords=coords, threshold=state.collision_threshold,
        handover=handover_threshold,
    )
    records = [traj.record(0.0)]
    try:
        if method == "rk4":
            for i in range(1, steps + 1):
                _rk4_step(traj, dt)
                t = i * dt
                traj.handover_step()
                _check_separation(traj.surface, traj.charts, traj.coords,
                                  traj.threshold, t)
                if i % record_every == 0 or i == steps:
                    records.append(traj.record(t))
        else:
            trial_dt = dt
            t = 0.0
            for i in range(record_every, steps + 1, record_every):
                t_target = i * dt
                trial_dt = _rkf45_advance(traj, t, t_target, trial_dt, rtol, atol)
                t = t_target
                records.append(traj.record(t))
            if steps % record_every:
                _rkf45_advance(traj, t, steps * dt, trial_dt, rtol, atol)
                records.append(traj.record(steps * dt))
    except CollisionError:
        if stats_out is not None:
            stats_out["step_rejections"] = traj.rejections
            stats_out["partial_records"] = records
        raise
    if stats_out is not None:
        stats_out["step_rejections"] = traj.rejections
    return records
