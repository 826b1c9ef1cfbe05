import math
import unittest

from scipy import integrate

from muskin.errors import CompatibilityError, ParameterDomainError
from muskin.geometry import SurfaceField, SurfaceMode
from muskin.scalar_tp import ScalarProblem, radial_integral, scalar_norms, solve_scalar
from muskin.analysis import surface_norm
from muskin.scalar_tp import uniform_sweep

from tests.fixtures import make_cylinders, make_spheres


def make_problem(g, a_minus: complex, amplitude: complex = 1.0) -> ScalarProblem:
    return ScalarProblem(a_plus=1.0, a_minus=a_minus, g=SurfaceField.cosine(g, amplitude))


class TestSolve(unittest.TestCase):
    def test_hand_matching(self):
        # phi- = A r, phi+ = C (1/r - r/4), c = 1/2 per mode:
        # A = 3C/4 and 10 A + 5C/4 = 9/2
        s = solve_scalar(make_problem(make_cylinders(), 10.0))
        self.assertEqual(len(s.modes), 2)
        for mode in s.modes:
            self.assertLess(abs(mode.outer - 4.5 / 8.75) / (4.5 / 8.75), 1e-12)
            self.assertLess(abs(mode.inner - 0.75 * 4.5 / 8.75) / (0.75 * 4.5 / 8.75), 1e-12)

    def test_no_contrast(self):
        s = solve_scalar(make_problem(make_cylinders(), 1.0))
        for mode in s.modes:
            self.assertEqual(mode.inner, 0)
            self.assertEqual(mode.outer, 0)
        norms = scalar_norms(s)
        self.assertEqual(norms.spectral, 0)
        self.assertEqual(norms.h1_minus, 0)
        self.assertEqual(norms.h1_plus, 0)

    def test_neumann_limit(self):
        # Inner coefficient tends to c R^(1-M) / M = 1/2, deviation -4 / (3 a)
        for a_minus in (1e3, 1e4, 1e6):
            s = solve_scalar(make_problem(make_cylinders(), a_minus))
            deviation = s.modes[1].inner - 0.5
            self.assertLess(abs(deviation * a_minus + 4 / 3), 1e-2, a_minus)

    def test_complex_contrast(self):
        s = solve_scalar(make_problem(make_spheres(), 1e3j))
        self.assertLess(max(s.flux_residuals()), 1e-12)

    def test_flux_residuals(self):
        for g in (make_cylinders(), make_spheres(), make_cylinders(0.5, 3.0)):
            for a_minus in (10.0, 1e6, -50.0 + 3j):
                s = solve_scalar(make_problem(g, a_minus))
                self.assertLess(max(s.flux_residuals()), 1e-12, (g.kind, a_minus))

    def test_gamma_trace(self):
        s = solve_scalar(make_problem(make_cylinders(), 10.0))
        self.assertAlmostEqual(s.gamma_trace(), 0, places=14)
        s = solve_scalar(make_problem(make_spheres(), 10.0))
        self.assertAlmostEqual(s.gamma_trace(), 0, places=14)

    def test_nonzero_mean(self):
        g = make_cylinders()
        data = SurfaceField(geometry=g, modes=[SurfaceMode(index=0, coefficient=1.0)])
        with self.assertRaises(CompatibilityError) as context:
            solve_scalar(ScalarProblem(a_plus=1.0, a_minus=10.0, g=data))
        self.assertEqual(
            str(context.exception),
            "Surface data must have zero mean, found mode-0 coefficient (1+0j)",
        )

    def test_zero_a_plus(self):
        with self.assertRaises(ParameterDomainError):
            solve_scalar(
                ScalarProblem(a_plus=0.0, a_minus=10.0, g=SurfaceField.cosine(make_cylinders()))
            )


class TestNorms(unittest.TestCase):
    def test_power_integral(self):
        for m in (1, 2, 5):
            closed = radial_integral([(1.0, float(m))], 1.0, 1.0, 2.0)
            reference, _ = integrate.quad(
                lambda r: r ** (2 * m + 1), 1.0, 2.0, epsabs=0, epsrel=1e-14
            )
            self.assertLess(abs(closed - reference) / reference, 1e-12, m)

    def test_log_case(self):
        # (1/r)^2 r with weight 1 integrates to log 2
        value = radial_integral([(1.0, -1.0)], 1.0, 1.0, 2.0)
        self.assertAlmostEqual(value, math.log(2), places=15)

    def test_gradient_against_quadrature(self):
        g = make_cylinders()
        s = solve_scalar(make_problem(g, 10.0))
        norms = scalar_norms(s)
        total = 0.0
        for mode in s.modes:
            c = mode.outer

            def density(r):
                value = c * (1 / r - r / 4)
                slope = c * (-1 / r**2 - 0.25)
                return (abs(slope) ** 2 + abs(value) ** 2 / r**2) * r

            part, _ = integrate.quad(density, 1.0, 2.0, epsabs=0, epsrel=1e-14)
            total += 2 * math.pi * part
        self.assertLess(abs(norms.grad_plus - math.sqrt(total)) / math.sqrt(total), 1e-12)

    def test_surface_norm(self):
        g = make_cylinders()
        unit = SurfaceField(geometry=g, modes=[SurfaceMode(index=3, coefficient=1.0)])
        self.assertAlmostEqual(surface_norm(unit, 0.0), math.sqrt(2 * math.pi), places=14)
        self.assertAlmostEqual(
            surface_norm(unit, 0.5), math.sqrt(2 * math.pi) * 10**0.25, places=13
        )
        self.assertEqual(surface_norm(SurfaceField(geometry=g, modes=[]), 1.5), 0)

    def test_cosine_norm(self):
        # ||cos||^2 = pi on the unit circle, 4 pi / 3 on the unit sphere
        self.assertAlmostEqual(
            surface_norm(SurfaceField.cosine(make_cylinders()), 0), math.sqrt(math.pi), places=14
        )
        self.assertAlmostEqual(
            surface_norm(SurfaceField.cosine(make_spheres()), 0),
            math.sqrt(4 * math.pi / 3),
            places=14,
        )

    def test_linear_in_data(self):
        g = make_spheres()
        one = scalar_norms(solve_scalar(make_problem(g, 100.0)))
        two = scalar_norms(solve_scalar(make_problem(g, 100.0, amplitude=2.0)))
        self.assertLess(abs(two.spectral - 2 * one.spectral) / one.spectral, 1e-14)
        self.assertLess(abs(two.h1_minus - 2 * one.h1_minus) / one.h1_minus, 1e-14)


class TestSweep(unittest.TestCase):
    def test_uniform(self):
        for g in (make_cylinders(), make_spheres()):
            sweep = uniform_sweep(g, [10.0, 1e3, 1e6, 1e3j])
            self.assertTrue(sweep.bounded())
            by_ratio = {row.ratio: row.quotient for row in sweep.rows}
            change = abs(by_ratio[1e6] - by_ratio[1e3]) / by_ratio[1e6]
            self.assertLess(change, 0.1, g.kind)
            self.assertEqual(sweep.rho0(), 10.0)

    def test_no_contrast_row(self):
        sweep = uniform_sweep(make_cylinders(), [1.0])
        self.assertEqual(sweep.rows[0].spectral, 0)
        self.assertEqual(sweep.rows[0].quotient, 0)

    def test_dataframe(self):
        df = uniform_sweep(make_cylinders(), [10.0, 1e3j]).to_dataframe()
        self.assertEqual(
            list(df.columns),
            ["ratio_re", "ratio_im", "h1_minus", "h1_plus", "spectral", "norm_g", "quotient"],
        )
        self.assertEqual(df["ratio_im"].tolist(), [0.0, 1e3])


if __name__ == "__main__":
    unittest.main()
