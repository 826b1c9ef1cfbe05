"""
Slow, independent reference implementations used as test oracles.

Nothing in here is imported by the library.
"""

import math
from typing import Callable, Tuple

import mpmath as mp
import numpy as np
from scipy.integrate import solve_ivp  # type: ignore[import]

mp.mp.dps = 40


def working_digits(z: complex) -> int:
    """
    Decimal digits for a reference value at ``z``

    Off the real axis ``H1 = J + i Y`` cancels terms of size ``exp(|Im z|)``
    down to ``exp(-|Im z|)``, so the precision grows with ``|Im z|``.
    """
    return max(mp.mp.dps, int(2 * abs(complex(z).imag) / math.log(10)) + 30)


def mp_cyl(kind: str, order: int, z: complex) -> Tuple[complex, complex]:
    """Cylinder function and derivative from the mpmath series"""
    with mp.workdps(working_digits(z)):
        zz = mp.mpc(z)
        value = f_order(kind, order, zz)
        if order == 0:
            deriv = -f_order(kind, 1, zz)
        else:
            deriv = (f_order(kind, order - 1, zz) - f_order(kind, order + 1, zz)) / 2
        return complex(value), complex(deriv)


def f_order(kind: str, order: int, zz: "mp.mpc") -> "mp.mpc":
    if kind == "J":
        return mp.besselj(order, zz)
    if kind == "Y":
        return mp.bessely(order, zz)
    return mp.hankel1(order, zz)


def mp_sph(kind: str, order: int, z: complex) -> Tuple[complex, complex]:
    """Spherical function and derivative from the mpmath half-integer series"""
    big = {"j": "J", "y": "Y", "h1": "H1"}[kind]
    with mp.workdps(working_digits(z)):
        zz = mp.mpc(z)

        def f(n: int) -> "mp.mpc":
            return mp.sqrt(mp.pi / (2 * zz)) * f_order(big, n + mp.mpf(1) / 2, zz)

        value = f(order)
        deriv = order / zz * value - f(order + 1)
        return complex(value), complex(deriv)


def integrate_radial(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    r0: float,
    r1: float,
    y0: np.ndarray,
    points: np.ndarray,
) -> np.ndarray:
    """Integrates a complex first-order radial system to high accuracy"""
    sol = solve_ivp(
        rhs,
        (r0, r1),
        np.asarray(y0, dtype=complex),
        method="DOP853",
        rtol=1e-12,
        atol=1e-300,
        t_eval=points,
        dense_output=False,
    )
    if not sol.success:
        raise RuntimeError(sol.message)
    return sol.y


def cylinder_helmholtz(k: complex, m: int) -> Callable[[float, np.ndarray], np.ndarray]:
    """``u'' + u'/r + (k^2 - m^2/r^2) u = 0`` as a first-order system"""

    def rhs(r: float, y: np.ndarray) -> np.ndarray:
        return np.array([y[1], -y[1] / r - (k**2 - m**2 / r**2) * y[0]])

    return rhs


def regular_start(k: complex, m: int, r0: float) -> np.ndarray:
    """Two-term series of the regular solution ``r^m (1 - (k r)^2 / (4 (m + 1)))``"""
    c = -(k**2) / (4 * (m + 1))
    value = r0**m * (1 + c * r0**2)
    deriv = m * r0 ** (m - 1) * (1 + c * r0**2) + r0**m * 2 * c * r0 if m else 2 * c * r0
    return np.array([value, deriv], dtype=complex)


def central_curl(
    field: Callable[[np.ndarray], np.ndarray], points: np.ndarray, h: float
) -> np.ndarray:
    """Second-order central-difference curl of a vector field sampled at ``points``"""
    grads = np.empty(points.shape + (3,), dtype=complex)
    for axis in range(3):
        shift = np.zeros(3)
        shift[axis] = h
        grads[..., axis] = (field(points + shift) - field(points - shift)) / (2 * h)
    # grads[p, component, axis]
    curl = np.empty(points.shape, dtype=complex)
    curl[:, 0] = grads[:, 2, 1] - grads[:, 1, 2]
    curl[:, 1] = grads[:, 0, 2] - grads[:, 2, 0]
    curl[:, 2] = grads[:, 1, 0] - grads[:, 0, 1]
    return curl


def central_divergence(
    field: Callable[[np.ndarray], np.ndarray], points: np.ndarray, h: float
) -> np.ndarray:
    div = np.zeros(points.shape[0], dtype=complex)
    for axis in range(3):
        shift = np.zeros(3)
        shift[axis] = h
        div += (field(points + shift)[:, axis] - field(points - shift)[:, axis]) / (2 * h)
    return div
