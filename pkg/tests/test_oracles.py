import math

import numpy as np
import pytest

from pointvortex.errors import QuadratureError
from pointvortex.green import torus_green_values
from pointvortex.oracles import (
    circle_path,
    contour_integral,
    gradient_form,
    loop_path,
    min_image_distance_grid,
    mollified_delta,
    segment_path,
    sphere_quadrature,
    torus_grid,
    torus_poisson_oracle,
    wirtinger_fd,
)
from pointvortex.surfaces import sphere_embedding


class TestPoissonOracle:
    def test_zero_source_gives_zero_potential(self):
        u = torus_poisson_oracle(1j, 64, np.zeros((64, 64)))
        assert np.abs(u).max() == 0.0

    def test_rejects_nonzero_mean(self):
        with pytest.raises(ValueError):
            torus_poisson_oracle(1j, 64, np.ones((64, 64)))

    def test_rejects_bad_grid(self):
        with pytest.raises(ValueError):
            torus_poisson_oracle(1j, 48, np.zeros((48, 48)))

    def test_manufactured_solution(self):
        # u = cos(2 pi (2s - t)) has -Laplace(u) known in closed form
        tau = 0.5 + 1j
        n = 128
        t2 = tau.imag
        z = torus_grid(tau, n)
        t = z.imag / t2
        s = z.real - t * tau.real
        u_exact = np.cos(2 * math.pi * (2 * s - t))
        eig = 4 * math.pi**2 * (4.0 + (-1.0 - tau.real * 2.0) ** 2 / t2**2)
        source = eig * u_exact
        u = torus_poisson_oracle(tau, n, source)
        assert np.abs(u - u_exact).max() < 1e-11

    def test_convergence_against_green(self):
        tau = 1j
        pole = 0.31 + 0.47j
        errs = []
        for n in (128, 256):
            source = mollified_delta(tau, n, pole, sigma_cells=2.0)
            solved = torus_poisson_oracle(tau, n, source)
            exact = torus_green_values(tau, torus_grid(tau, n) - pole)
            mask = min_image_distance_grid(tau, n, pole) > 12.0 / n
            diff = solved[mask] - exact[mask]
            diff -= diff.mean()
            errs.append(np.abs(diff).max() / np.abs(exact[mask]).max())
        assert errs[0] < 1e-6
        assert errs[1] < errs[0]

    def test_two_point_source_matches_potential_difference(self):
        # +-delta pair source solves to G(., a) - G(., b) up to a constant
        tau = 1j
        n = 256
        a, b = 0.27 + 0.33j, 0.71 + 0.62j
        source = mollified_delta(tau, n, a) - mollified_delta(tau, n, b)
        solved = torus_poisson_oracle(tau, n, source)
        z = torus_grid(tau, n)
        exact = torus_green_values(tau, z - a) - torus_green_values(tau, z - b)
        mask = (min_image_distance_grid(tau, n, a) > 12.0 / n) & (
            min_image_distance_grid(tau, n, b) > 12.0 / n
        )
        diff = solved[mask] - exact[mask]
        diff -= diff.mean()
        assert np.abs(diff).max() / np.abs(exact[mask]).max() < 1e-6


class TestContourIntegral:
    def test_exact_form_integrates_to_zero_on_loops(self):
        # dF for F = x^2 y - y^3/3, fed in via its Wirtinger gradient
        form = gradient_form(lambda z: z.imag * z.real + 0.5j * (z.imag**2 - z.real**2))

        got = contour_integral(form, circle_path(0.3 + 0.2j, 0.8))
        assert abs(complex(got)) < 1e-12

    def test_segment_integral_of_exact_form_is_potential_difference(self):
        def form(z):
            x, y = z.real, z.imag
            return 2 * x * y, x**2 - y**2

        z0, z1 = 0.1 + 0.5j, -0.7 + 0.2j

        def F(z):
            return z.real**2 * z.imag - z.imag**3 / 3.0

        got = contour_integral(form, segment_path(z0, z1), n_points=32)
        assert abs(complex(got) - (F(z1) - F(z0))) < 1e-12

    def test_unit_alpha_period(self, torus_i):
        # loop along the first lattice direction sees -dU_beta = dx
        def form(z):
            return np.ones(np.shape(z)), np.zeros(np.shape(z))

        got = contour_integral(form, loop_path(0.2 + 0.4j, 1.0))
        assert abs(complex(got) - 1.0) < 1e-12

    def test_resolution_stability(self):
        def form(z):
            return np.cos(2 * math.pi * z.real), np.sin(2 * math.pi * z.imag)

        path = circle_path(0.1 - 0.1j, 0.55)
        a = complex(contour_integral(form, path, n_points=512))
        b = complex(contour_integral(form, path, n_points=1024))
        assert abs(a - b) < 1e-12


class TestSphereQuadrature:
    def test_total_area(self):
        got = sphere_quadrature(lambda chart, z: np.ones(np.shape(z)), abs_tol=1e-9)
        assert abs(got - 4.0 * math.pi) < 1e-9

    def test_odd_function_integrates_to_zero(self):
        def integrand(chart, z):
            x, _, _ = sphere_embedding(chart, z)
            return x

        assert abs(sphere_quadrature(integrand, abs_tol=1e-9)) < 1e-8

    def test_smooth_nonsymmetric_integrand(self):
        # int of x3^2 over the unit sphere = 4 pi / 3
        def integrand(chart, z):
            _, _, x3 = sphere_embedding(chart, z)
            return x3**2

        got = sphere_quadrature(integrand, abs_tol=1e-9)
        assert abs(got - 4.0 * math.pi / 3.0) < 1e-8

    def test_budget_exhaustion_raises(self):
        def nasty(chart, z):
            return np.sin(200.0 / (0.01 + np.abs(z - 0.5)))

        with pytest.raises(QuadratureError):
            sphere_quadrature(nasty, abs_tol=1e-14, max_cells=300)


def test_wirtinger_fd_on_polynomial():
    def f(z):
        return z**3 + 2.0 * z * z.conjugate()

    z0 = 0.3 - 0.7j
    dz, dzbar = wirtinger_fd(f, z0, h=1e-5)
    assert abs(dz - (3 * z0**2 + 2 * z0.conjugate())) < 1e-9
    assert abs(dzbar - 2 * z0) < 1e-9
