"""Cross-validation battery behind `pointvortex verify`.

Every check compares two independent routes to the same quantity (closed form
vs series, analytic assembly vs finite-differenced energy, analytic periods vs
numerical contour integration, spectral solve vs theta series) and reports the
measured residual against its tolerance.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import theta
from .config import ScenarioConfig
from .connections import TransitionJet, bracket
from .dynamics import (
    VortexState,
    hamiltonian,
    hamiltonian_velocity,
    integrate,
    min_separation,
    vortex_velocity,
)
from .green import green, robin_data, sphere_green_values, torus_green_values
from .oracles import (
    contour_integral,
    delta_probe_points,
    loop_path,
    min_image_distance_grid,
    mollified_delta,
    sphere_quadrature,
    star_gradient_form,
    torus_grid,
    torus_poisson_oracle,
)
from .periods import build_basis
from .surfaces import (
    Surface,
    SurfacePoint,
    dlog_lambda_dzbar,
    lattice_split,
    transition,
)

_SPHERE = Surface.sphere()


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    elapsed: float


def random_state(surface: Surface, n: int, rng: np.random.Generator,
                 circulations: bool = False, min_sep: float = 0.15) -> VortexState:
    """Random admissible vortex state: uniform positions, balanced strengths."""
    while True:
        pts = delta_probe_points(surface, rng, n)
        if min_separation(surface, pts) > min_sep:
            break
    while True:
        g = rng.uniform(0.4, 1.6, n) * rng.choice([-1.0, 1.0], n)
        g -= g.mean()
        if np.abs(g).min() > 0.25:
            break
    genus = surface.genus
    if circulations and genus:
        a = tuple(rng.uniform(-1.0, 1.0, genus))
        b = tuple(rng.uniform(-1.0, 1.0, genus))
    else:
        a = (0.0,) * genus
        b = (0.0,) * genus
    return VortexState(surface, tuple(pts), tuple(g), a, b)


# ---------------------------------------------------------------------------
# individual checks; each returns the measured residual


def sphere_robin_closed_forms(rng: np.random.Generator, count: int = 200) -> float:
    worst = 0.0
    for p in delta_probe_points(_SPHERE, rng, count):
        a = p.coord
        m2 = abs(a) ** 2
        d = robin_data(_SPHERE, p)
        worst = max(
            worst,
            abs(d.h0 - (math.log(1.0 + m2) - 0.5)),
            abs(d.h1 - a.conjugate() / (1.0 + m2)),
            abs(d.h2 + a.conjugate() ** 2 / (2.0 * (1.0 + m2) ** 2)),
            abs(d.h11 - 1.0 / (2.0 * (1.0 + m2) ** 2)),
        )
    return worst


def sphere_green_closed_form(rng: np.random.Generator, count: int = 200) -> float:
    worst = 0.0
    for _ in range(count):
        z = complex(*rng.uniform(-0.95, 0.95, 2))
        a = complex(*rng.uniform(-0.95, 0.95, 2))
        if abs(z - a) < 1e-3:
            continue
        expected = -(
            math.log(abs(z - a) ** 2 / ((1.0 + abs(z) ** 2) * (1.0 + abs(a) ** 2))) + 1.0
        ) / (4.0 * math.pi)
        got = green(_SPHERE, SurfacePoint(0, z), SurfacePoint(0, a)).value
        worst = max(worst, abs(got - expected))
    return worst


def green_symmetry(surface: Surface, rng: np.random.Generator,
                   count: int = 200) -> float:
    worst = 0.0
    pts = delta_probe_points(surface, rng, 2 * count)
    for i in range(count):
        p, q = pts[2 * i], pts[2 * i + 1]
        if min_separation(surface, (p, q)) < 1e-3:
            continue
        worst = max(
            worst, abs(green(surface, p, q).value - green(surface, q, p).value)
        )
    return worst


def sphere_green_normalization(poles=None) -> float:
    if poles is None:
        poles = (SurfacePoint(0, 0.4 + 0.3j), SurfacePoint(1, -0.2 + 0.6j))
    worst = 0.0
    for pole in poles:
        def integrand(chart, z, pole=pole):
            return sphere_green_values(pole, chart, z)

        worst = max(worst, abs(sphere_quadrature(integrand, abs_tol=2e-8)))
    return worst


def torus_green_vs_poisson(tau: complex, grid_n: int = 256,
                           pole: complex | None = None) -> float:
    """Relative disagreement (mean-matched) between the spectral solve and the
    theta-series Green function, away from the mollified pole."""
    surface = Surface.flat_torus(tau)
    if pole is None:
        pole = 0.31 + 0.47 * tau
    source = mollified_delta(tau, grid_n, pole, sigma_cells=2.0)
    solved = torus_poisson_oracle(tau, grid_n, source)
    z = torus_grid(tau, grid_n)
    exact = torus_green_values(tau, z - pole)
    dist = min_image_distance_grid(tau, grid_n, pole)
    mask = dist > 12.0 * max(1.0, abs(tau)) / grid_n
    diff = solved[mask] - exact[mask]
    diff -= diff.mean()
    return float(np.abs(diff).max() / np.abs(exact[mask]).max())


def period_relation_residual(tau: complex, n_points: int = 512) -> float:
    """The four canonical period identities, by numerical contour integration."""
    surface = Surface.flat_torus(tau)
    basis = build_basis(surface)
    da, db = basis.dU_alpha[0], basis.dU_beta[0]
    loops = {
        "alpha": loop_path(0.11 + 0.13 * tau, 1.0),
        "beta": loop_path(0.17 + 0.0j, tau),
    }

    def const_form(f):
        return lambda z: (np.full(np.shape(z), f.cx), np.full(np.shape(z), f.cy))

    res = [
        contour_integral(const_form(db), loops["alpha"], n_points) + 1.0,  # loop(-dU_b)=1
        contour_integral(const_form(db), loops["beta"], n_points) - 0.0,
        contour_integral(const_form(da), loops["alpha"], n_points) - 0.0,
        contour_integral(const_form(da), loops["beta"], n_points) - 1.0,
    ]
    return max(abs(complex(r)) for r in res)


def period_matrix_residual(tau: complex) -> float:
    basis = build_basis(Surface.flat_torus(tau))
    m = basis.period_matrix
    asym = float(np.abs(m - m.T).max())
    mineig = float(np.linalg.eigvalsh(m).min())
    return asym if mineig > 0 else math.inf


def conjugate_period_residual(surface: Surface, rng: np.random.Generator,
                              pairs: int = 20) -> float:
    """Conjugate periods of the two-point potential vs potential differences."""
    tau = surface.tau
    t2 = tau.imag
    ctx = theta.theta_context(tau)

    def star_dv(a, b):
        def grad(z):
            out = np.zeros(np.shape(z), dtype=complex)
            for pole, sign in ((a, 1.0), (b, -1.0)):
                u = np.asarray(z) - pole
                t = u.imag / t2
                s = u.real - t * tau.real
                s -= np.round(s)
                t -= np.round(t)
                ur = s + t * tau
                th = theta.theta1(ctx, ur)
                out += sign * (
                    -(0.5 * theta.theta1_dz(ctx, ur) / th + 1j * math.pi * ur.imag / t2)
                    / (2.0 * math.pi)
                )
            return out

        return star_gradient_form(grad)

    worst = 0.0
    done = 0
    while done < pairs:
        a = complex(rng.uniform(0.1, 0.9) + rng.uniform(0.05, 0.40) * tau)
        b = complex(rng.uniform(0.1, 0.9) + rng.uniform(0.05, 0.40) * tau)
        sa, _ = lattice_split(tau, a)
        sb, _ = lattice_split(tau, b)
        if abs(a - b) < 0.1 or abs(sa - sb) > 0.6:
            continue
        form = star_dv(a, b)
        # alpha-homologous loop at lattice height t0=0.7: the poles sit at
        # t in (0.05, 0.40), so neither the loop nor the straight b->a path
        # meets it
        lhs_a = complex(contour_integral(form, loop_path(0.7 * tau, 1.0), 1024)).real
        rhs_a = (a.imag - b.imag) / t2
        # beta-homologous loop on the midline of the complementary s-arc
        lo, hi = min(sa, sb), max(sa, sb)
        s0 = (hi + lo + 1.0) / 2.0 % 1.0
        lhs_b = complex(contour_integral(form, loop_path(complex(s0, 0.0), tau), 1024)).real
        rhs_b = -(a.real - b.real) + (tau.real / t2) * (a.imag - b.imag)
        worst = max(worst, abs(lhs_a - rhs_a), abs(lhs_b - rhs_b))
        done += 1
    return worst


def robin_transformation_laws(rng: np.random.Generator, count: int = 100) -> float:
    """Chart-handover laws for (h0, h1, h11) and the h2 combination on the sphere."""
    worst = 0.0
    done = 0
    while done < count:
        a = complex(*rng.uniform(-1.5, 1.5, 2))
        if not 0.5 < abs(a) < 2.0:
            continue
        p = SurfacePoint(0, a)
        q, jet = transition(_SPHERE, p, 1)
        d0 = robin_data(_SPHERE, p)
        d1 = robin_data(_SPHERE, q)
        worst = max(
            worst,
            abs(d1.h0 - d0.h0 - math.log(abs(jet.phi1))),
            abs(d1.h1 * jet.phi1 - d0.h1 - 0.5 * jet.phi2 / jet.phi1),
            abs(d1.h11 * abs(jet.phi1) ** 2 - d0.h11),
        )

        def dh1_da(point: SurfacePoint, h: float = 1e-5) -> complex:
            def h1_at(c: complex) -> complex:
                return robin_data(_SPHERE, SurfacePoint(point.chart_id, c)).h1

            z = point.coord
            fx = (h1_at(z + h) - h1_at(z - h)) / (2.0 * h)
            fy = (h1_at(z + 1j * h) - h1_at(z - 1j * h)) / (2.0 * h)
            return 0.5 * (fx - 1j * fy)

        lhs = (dh1_da(q) - 2.0 * d1.h2) * jet.phi1**2
        rhs = dh1_da(p) - 2.0 * d0.h2 + bracket(jet, 2) / 6.0
        worst = max(worst, abs(lhs - rhs))
        done += 1
    return worst


def _random_jet(rng: np.random.Generator) -> TransitionJet:
    c = rng.normal(size=3) + 1j * rng.normal(size=3)
    while abs(c[0]) < 0.3:
        c[0] = rng.normal() + 1j * rng.normal()
    return TransitionJet(c[0], c[1], c[2])


def bracket_chain_rules(rng: np.random.Generator, count: int = 200) -> float:
    from .connections import chain_check

    worst = 0.0
    for _ in range(count):
        jb = _random_jet(rng)
        ja = _random_jet(rng)
        jab = ja.compose(jb)
        for k in (0, 1, 2):
            worst = max(worst, chain_check(ja, jb, jab, k))
    return worst


def mobius_schwarzian(rng: np.random.Generator, count: int = 500) -> float:
    worst = 0.0
    for _ in range(count):
        a, b, c, d = rng.normal(size=4) + 1j * rng.normal(size=4)
        det = a * d - b * c
        if abs(det) < 1e-2:
            continue
        z = complex(*rng.normal(size=2))
        den = c * z + d
        if abs(den) < 0.3:
            continue
        jet = TransitionJet(
            det / den**2, -2.0 * c * det / den**3, 6.0 * c**2 * det / den**4
        )
        worst = max(worst, abs(bracket(jet, 2)))
    return worst


def self_term_residual(rng: np.random.Generator, count: int = 200) -> float:
    """A lone vortex's velocity contribution: conj(h1) + dlog(lambda)/dzbar."""
    worst = 0.0
    for p in delta_probe_points(_SPHERE, rng, count):
        h1 = robin_data(_SPHERE, p).h1
        worst = max(worst, abs(h1.conjugate() + dlog_lambda_dzbar(_SPHERE, p)))
    return worst


def velocity_equivalence(surface: Surface, rng: np.random.Generator,
                         states: int, sizes=(2, 4)) -> float:
    worst = 0.0
    for i in range(states):
        n = sizes[i % len(sizes)]
        st = random_state(surface, n, rng, circulations=surface.genus > 0)
        for k in range(n):
            v1 = vortex_velocity(st, k)
            v2 = hamiltonian_velocity(st, k)
            worst = max(worst, abs(v1 - v2) / max(abs(v1), 1e-12))
    return worst


def conservation_residuals(tau: complex, dt: float, steps: int) -> tuple[float, float]:
    """(relative energy drift, Kelvin reconstruction drift) on a 4-vortex run."""
    surface = Surface.flat_torus(tau)
    st = VortexState(
        surface,
        (
            SurfacePoint(0, 0.21 + 0.33 * tau),
            SurfacePoint(0, 0.68 + 0.41 * tau),
            SurfacePoint(0, 0.45 + 0.72 * tau),
            SurfacePoint(0, 0.82 + 0.15 * tau),
        ),
        (1.0, -0.6, 0.8, -1.2),
        (0.3,),
        (-0.2,),
    )
    recs = integrate(st, dt, steps, method="rk4", record_every=max(1, steps // 20))
    h0 = recs[0].hamiltonian
    drift = max(abs(r.hamiltonian - h0) for r in recs) / abs(h0)
    kelvin = 0.0
    for r in recs:
        kelvin = max(
            kelvin,
            max(abs(x - y) for x, y in zip(r.circ_a, st.base_a)),
            max(abs(x - y) for x, y in zip(r.circ_b, st.base_b)),
        )
    return drift, kelvin


# ---------------------------------------------------------------------------
# suite assembly


def run_suite(suite: str = "quick", seed: int = 7,
              overrides: dict[str, float] | None = None) -> list[CheckResult]:
    full = suite == "full"
    overrides = overrides or {}
    rng = np.random.default_rng(seed)
    torus = Surface.flat_torus(1j)
    torus_skew = Surface.flat_torus(0.5 + 1j)

    specs: list[tuple[str, float, object]] = [
        ("sphere_robin_closed_forms", 1e-12,
         lambda: sphere_robin_closed_forms(rng, 200)),
        ("sphere_green_closed_form", 1e-13,
         lambda: sphere_green_closed_form(rng, 200)),
        ("sphere_green_symmetry", 1e-12, lambda: green_symmetry(_SPHERE, rng, 200)),
        ("torus_green_symmetry", 1e-12, lambda: green_symmetry(torus_skew, rng, 100)),
        ("sphere_green_normalization", 1e-6, sphere_green_normalization),
        ("torus_green_vs_poisson", 1e-6,
         lambda: max(
             torus_green_vs_poisson(t, 256 if full else 128)
             for t in ((1j, 0.5 + 1j, 2j) if full else (1j,))
         )),
        ("period_relations", 1e-10,
         lambda: max(period_relation_residual(t) for t in (1j, 0.5 + 1j))),
        ("period_matrix_spd", 1e-12,
         lambda: max(period_matrix_residual(t) for t in (1j, 0.5 + 1j, 2j))),
        ("conjugate_periods", 1e-6,
         lambda: conjugate_period_residual(torus_skew, rng, 20 if full else 5)),
        ("robin_transformation_laws", 1e-8,
         lambda: robin_transformation_laws(rng, 100)),
        ("bracket_chain_rules", 1e-10, lambda: bracket_chain_rules(rng, 200)),
        ("mobius_schwarzian", 1e-10, lambda: mobius_schwarzian(rng, 500)),
        ("single_vortex_self_term", 1e-10, lambda: self_term_residual(rng, 200)),
        ("velocity_equivalence_sphere", 1e-6,
         lambda: velocity_equivalence(_SPHERE, rng, 50 if full else 8)),
        ("velocity_equivalence_torus", 1e-6,
         lambda: velocity_equivalence(torus_skew, rng, 50 if full else 8)),
        ("energy_drift_short", 1e-7,
         lambda: conservation_residuals(1j, 1e-3, 2000 if full else 500)[0]),
        ("kelvin_drift_short", 1e-8,
         lambda: conservation_residuals(1j, 1e-3, 500)[1]),
    ]

    results = []
    for name, tol, fn in specs:
        tol = float(overrides.get(name, tol))
        start = time.perf_counter()
        residual = float(fn())
        elapsed = time.perf_counter() - start
        results.append(CheckResult(name, residual, tol, residual < tol, elapsed))
    return results


def verify_scenario(cfg: ScenarioConfig) -> list[CheckResult]:
    """Per-vortex velocity-law cross-check for one configured scenario."""
    state = cfg.state()
    tol = float(cfg.tolerances.get("velocity_equivalence", 1e-6))
    direct = [vortex_velocity(state, k) for k in range(state.n)]
    # normalize by the configuration's speed scale so that stationary
    # configurations compare finite-difference noise against something sane
    scale = max(max(abs(v) for v in direct), 1e-4)
    results = []
    for k in range(state.n):
        start = time.perf_counter()
        v2 = hamiltonian_velocity(state, k)
        residual = abs(direct[k] - v2) / scale
        elapsed = time.perf_counter() - start
        results.append(
            CheckResult(f"velocity[{k}]", residual, tol, residual < tol, elapsed)
        )
    start = time.perf_counter()
    h = hamiltonian(state)
    results.append(
        CheckResult(
            "hamiltonian_finite", 0.0 if math.isfinite(h) else math.inf,
            1.0, math.isfinite(h), time.perf_counter() - start,
        )
    )
    return results


def format_report(results: list[CheckResult]) -> str:
    width = max(len(r.name) for r in results)
    lines = [f"{'check':<{width}}  {'residual':>12}  {'tolerance':>10}  status"]
    for r in results:
        status = "pass" if r.passed else "FAIL"
        lines.append(
            f"{r.name:<{width}}  {r.residual:>12.3e}  {r.tolerance:>10.1e}  {status}"
            f"  ({r.elapsed:.2f}s)"
        )
    n_fail = sum(not r.passed for r in results)
    lines.append(
        f"{len(results) - n_fail}/{len(results)} checks passed"
        + (f", {n_fail} FAILED" if n_fail else "")
    )
    return "\n".join(lines)
