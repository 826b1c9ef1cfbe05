import cmath
import math
import unittest

import numpy as np
from scipy import special  # type: ignore[import]

from muskin.errors import ParameterDomainError, SingularArgumentError
from muskin.specfun import ScaledValue, cyl_bessel, riccati_bessel, sph_bessel

from tests.oracles import mp_cyl, mp_sph


def upper_half_plane(count: int) -> np.ndarray:
    """Deterministic arguments with |z| in [1e-2, 1e3] and arg z in [0.3, pi - 0.3]"""
    rng = np.random.default_rng(1234)
    radius = np.geomspace(1e-2, 1e3, count)
    angle = rng.uniform(0.3, math.pi - 0.3, count)
    return radius * np.exp(1j * angle)


def relative(a: complex, b: complex) -> float:
    """Relative error, absolute when the reference is zero"""
    scale = abs(b)
    return abs(a - b) / scale if scale > 0 else abs(a - b)


class TestScaledValue(unittest.TestCase):
    def test_renormalized_range(self):
        for value in (1e-200, 3.5, 7e150, -2e-5j):
            s = ScaledValue.renormalized(value, 0.0)
            self.assertGreaterEqual(abs(s.mantissa), 0.1)
            self.assertLessEqual(abs(s.mantissa), 10)
            self.assertLess(relative(s.value, value), 1e-15)

    def test_zero(self):
        s = ScaledValue.renormalized(0.0, 12.0)
        self.assertEqual(s.mantissa, 0)
        self.assertEqual(s.value, 0)

    def test_arithmetic(self):
        a = ScaledValue.renormalized(2.0, 700.0)
        b = ScaledValue.renormalized(3.0, 700.0)
        self.assertLess(relative((a + b).relative_to(700.0), 5.0), 1e-15)
        self.assertLess(relative((a * b).relative_to(1400.0), 6.0), 1e-15)
        self.assertLess(relative((a - b).relative_to(700.0), -1.0), 1e-15)
        self.assertLess(relative((a * 2j).relative_to(700.0), 4j), 1e-15)

    def test_arrays(self):
        s = ScaledValue.renormalized(np.array([1.0, 1e100, 0.0]), np.array([0.0, 5.0, 1.0]))
        self.assertEqual(s.mantissa.shape, (3,))
        self.assertEqual(s.log_scale[2], 0.0)
        self.assertLess(relative(s.relative_to(5.0)[1], 1e100), 1e-15)


class TestCylinder(unittest.TestCase):
    def test_j0_origin(self):
        value, deriv = cyl_bessel("J", 0, 0.0)
        self.assertEqual(value.value, 1.0)
        self.assertEqual(deriv.value, 0.0)

    def test_j1_origin_derivative(self):
        _, deriv = cyl_bessel("J", 1, 0.0)
        self.assertAlmostEqual(deriv.value, 0.5, places=15)

    def test_real_wronskian(self):
        z = 2.5
        for m in range(33):
            j, dj = cyl_bessel("J", m, z)
            y, dy = cyl_bessel("Y", m, z)
            w = (j * dy - dj * y).value
            self.assertLess(relative(w, 2 / (math.pi * z)), 1e-12, m)

    def test_complex_wronskian(self):
        z = upper_half_plane(200)
        for m in range(33):
            j, dj = cyl_bessel("J", m, z)
            h, dh = cyl_bessel("H1", m, z)
            w = (j * dh - dj * h).value
            err = np.abs(w - 2j / (math.pi * z)) / np.abs(2j / (math.pi * z))
            self.assertLess(err.max(), 1e-12, m)

    def test_against_series(self):
        for z in upper_half_plane(200)[::10]:
            if abs(z) > 60:
                continue
            for m in (0, 1, 5, 16, 32):
                for kind in ("J", "H1"):
                    value, deriv = cyl_bessel(kind, m, z)
                    ref_value, ref_deriv = mp_cyl(kind, m, z)
                    self.assertLess(relative(value.value, ref_value), 1e-12, (kind, m, z))
                    self.assertLess(relative(deriv.value, ref_deriv), 1e-12, (kind, m, z))

    def test_h1_imaginary(self):
        value, _ = cyl_bessel("H1", 0, 50j)
        self.assertTrue(np.isfinite(value.mantissa))
        self.assertLess(abs(value.log_scale + 50), 3)
        ref, _ = mp_cyl("H1", 0, 50j)
        self.assertLess(relative(value.value, ref), 1e-12)

    def test_imaginary_reference(self):
        for order in (0, 1, 3):
            for y in (5.0, 50.0):
                closed = 2 / (math.pi * 1j ** (order + 1)) * special.kv(order, y)
                ref, _ = mp_cyl("H1", order, 1j * y)
                self.assertLess(relative(ref, closed), 1e-13, (order, y))
        self.assertEqual(relative(1e-300, 0.0), 1e-300)

    def test_deep_contrast_no_overflow(self):
        z = np.array([3e5 + 1e6j, 1e6j, 10.0 + 1e6j])
        for kind in ("J", "Y", "H1"):
            value, deriv = cyl_bessel(kind, 3, z)
            for s in (value, deriv):
                self.assertTrue(np.all(np.isfinite(s.mantissa)))
                self.assertTrue(np.all(np.abs(s.mantissa) >= 0.1))
                self.assertTrue(np.all(np.abs(s.mantissa) <= 10))
        value, _ = cyl_bessel("J", 3, 1e6j)
        self.assertGreater(value.log_scale, 9e5)

    def test_singular(self):
        for kind in ("Y", "H1"):
            with self.assertRaises(SingularArgumentError) as context:
                cyl_bessel(kind, 0, 0.0)
            self.assertEqual(str(context.exception), f"{kind} is singular at z = 0")

    def test_order_range(self):
        for order in (-1, 65, 2.5):
            with self.assertRaises(ParameterDomainError):
                cyl_bessel("J", order, 1.0)


class TestSpherical(unittest.TestCase):
    def test_j0(self):
        value, _ = sph_bessel("j", 0, 1.0)
        self.assertAlmostEqual(value.value.real, 0.8414709848, places=10)
        self.assertLess(relative(value.value, math.sin(1.0)), 1e-14)

    def test_real_wronskian(self):
        x = 3.0
        for n in range(9):
            j, dj = sph_bessel("j", n, x)
            y, dy = sph_bessel("y", n, x)
            self.assertLess(relative((j * dy - dj * y).value, 1 / x**2), 1e-12, n)

    def test_complex_wronskian(self):
        z = upper_half_plane(200)
        for n in range(33):
            j, dj = sph_bessel("j", n, z)
            h, dh = sph_bessel("h1", n, z)
            w = (j * dh - dj * h).value
            err = np.abs(w - 1j / z**2) / np.abs(1j / z**2)
            self.assertLess(err.max(), 1e-12, n)

    def test_h1_closed_form(self):
        z = 2j
        value, _ = sph_bessel("h1", 0, z)
        self.assertLess(relative(value.value, -1j * cmath.exp(1j * z) / z), 1e-14)

    def test_against_series(self):
        for z in (0.7 + 0.2j, 4.0 + 3.0j, 12.0 + 20.0j):
            for n in (0, 1, 4, 10):
                for kind in ("j", "h1"):
                    value, deriv = sph_bessel(kind, n, z)
                    ref_value, ref_deriv = mp_sph(kind, n, z)
                    self.assertLess(relative(value.value, ref_value), 1e-12, (kind, n, z))
                    self.assertLess(relative(deriv.value, ref_deriv), 1e-12, (kind, n, z))

    def test_origin(self):
        value, deriv = sph_bessel("j", 0, 0.0)
        self.assertEqual(value.value, 1.0)
        self.assertEqual(deriv.value, 0.0)
        value, deriv = sph_bessel("j", 1, 0.0)
        self.assertEqual(value.value, 0.0)
        self.assertAlmostEqual(deriv.value, 1 / 3, places=15)

    def test_singular(self):
        with self.assertRaises(SingularArgumentError):
            sph_bessel("y", 2, 0.0)

    def test_riccati(self):
        z = 1.3
        value, deriv = riccati_bessel("j", 0, z)
        self.assertLess(relative(value.value, math.sin(z)), 1e-14)
        self.assertLess(relative(deriv.value, math.cos(z)), 1e-14)


if __name__ == "__main__":
    unittest.main()
