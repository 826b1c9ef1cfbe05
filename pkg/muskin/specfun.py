"""
Cylindrical and spherical Bessel and Hankel functions of complex argument
in exponentially scaled form.

Every value is returned as a :class:`ScaledValue`: a mantissa and a
natural-log exponent, such that the true value is
``mantissa * exp(log_scale)``. The interior wavenumber of the
high-permeability region grows like ``sqrt(mu_r)``, so unscaled values
overflow long before the contrasts of interest are reached.
"""

import logging
from typing import Any, Literal, Tuple, Union

import numpy as np
from pydantic import BaseModel
from scipy import special  # type: ignore[import]

from muskin.config import MAX_ORDER
from muskin.errors import ParameterDomainError, SingularArgumentError


logger = logging.getLogger(__name__)

ArrayLike = Union[complex, float, np.ndarray]
CylKind = Literal["J", "Y", "H1"]
SphKind = Literal["j", "y", "h1"]


class ScaledValue(BaseModel):
    """
    A complex number (or array of them) stored as ``mantissa * exp(log_scale)``

    After :meth:`renormalized`, every nonzero mantissa satisfies
    ``0.1 <= |mantissa| <= 10``. The exponent absorbs the rest.
    """

    mantissa: Any
    log_scale: Any

    @classmethod
    def renormalized(cls, mantissa: ArrayLike, log_scale: ArrayLike) -> "ScaledValue":
        mant = np.asarray(mantissa, dtype=complex)
        logs = np.asarray(log_scale, dtype=float) + np.zeros(mant.shape)
        mod = np.abs(mant)
        nonzero = mod > 0
        shift = np.where(nonzero, np.round(np.log(np.where(nonzero, mod, 1.0))), 0.0)
        mant = mant * np.exp(-shift)
        logs = np.where(nonzero, logs + shift, 0.0)
        if mant.ndim == 0:
            return cls(mantissa=complex(mant), log_scale=float(logs))
        return cls(mantissa=mant, log_scale=logs)

    @property
    def value(self) -> ArrayLike:
        """The true value; may overflow for extreme exponents"""
        return self.mantissa * np.exp(self.log_scale)

    def relative_to(self, reference: ArrayLike) -> ArrayLike:
        """The value multiplied by ``exp(-reference)``"""
        return self.mantissa * np.exp(self.log_scale - reference)

    def __mul__(self, other: Any) -> "ScaledValue":
        if isinstance(other, ScaledValue):
            return ScaledValue.renormalized(
                self.mantissa * other.mantissa, self.log_scale + other.log_scale
            )
        return ScaledValue.renormalized(self.mantissa * other, self.log_scale)

    __rmul__ = __mul__

    def __add__(self, other: "ScaledValue") -> "ScaledValue":
        top = np.maximum(self.log_scale, other.log_scale)
        return ScaledValue.renormalized(
            self.relative_to(top) + other.relative_to(top), top
        )

    def __neg__(self) -> "ScaledValue":
        return ScaledValue(mantissa=-self.mantissa, log_scale=self.log_scale)

    def __sub__(self, other: "ScaledValue") -> "ScaledValue":
        return self + (-other)

    class Config:
        arbitrary_types_allowed = True


def _check_order(order: int) -> None:
    if int(order) != order or order < 0 or order > MAX_ORDER:
        raise ParameterDomainError(
            f"Bessel order must be an integer in [0, {MAX_ORDER}], got {order}"
        )


def _raw_cyl(kind: str, order: float, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Scaled cylinder function of real order ``order`` and its exponent,
    taken directly from the exponentially scaled AMOS routines
    """
    if kind in ("J", "j"):
        return special.jve(order, z), np.abs(z.imag)
    if kind in ("Y", "y"):
        return special.yve(order, z), np.abs(z.imag)
    if kind in ("H1", "h1"):
        return special.hankel1e(order, z) * np.exp(1j * z.real), -z.imag
    raise NotImplementedError(f"Unknown Bessel kind {kind}")


def _check_argument(kind: str, z: np.ndarray) -> None:
    if kind not in ("J", "j") and np.any(z == 0):
        raise SingularArgumentError(f"{kind} is singular at z = 0")


def cyl_bessel(kind: CylKind, order: int, z: ArrayLike) -> Tuple[ScaledValue, ScaledValue]:
    """
    Cylinder function ``J_m``, ``Y_m`` or ``H1_m`` and its derivative

    Parameters
    ----------
    kind: str
        One of ``J``, ``Y``, ``H1``
    order: int
        Order ``m`` in ``[0, 64]``
    z: complex or numpy array of complex
        Argument(s)

    Returns
    -------
    tuple of :class:`ScaledValue`
        Value and ``d/dz``

    Raises
    ------
    ParameterDomainError
        If the order is out of range
    SingularArgumentError
        If ``z == 0`` for ``Y`` or ``H1``
    """
    _check_order(order)
    zz = np.asarray(z, dtype=complex)
    _check_argument(kind, zz)
    value, scale = _raw_cyl(kind, order, zz)
    if order == 0:
        deriv = -_raw_cyl(kind, 1, zz)[0]
    else:
        deriv = 0.5 * (_raw_cyl(kind, order - 1, zz)[0] - _raw_cyl(kind, order + 1, zz)[0])
    return ScaledValue.renormalized(value, scale), ScaledValue.renormalized(deriv, scale)


def sph_bessel(kind: SphKind, order: int, z: ArrayLike) -> Tuple[ScaledValue, ScaledValue]:
    """
    Spherical function ``j_n``, ``y_n`` or ``h1_n`` and its derivative

    Built from the half-integer cylinder functions,
    ``f_n(z) = sqrt(pi / (2 z)) F_{n+1/2}(z)``, with the derivative from
    ``f_n'(z) = (n / z) f_n(z) - f_{n+1}(z)``.

    Parameters
    ----------
    kind: str
        One of ``j``, ``y``, ``h1``
    order: int
        Order ``n`` in ``[0, 64]``
    z: complex or numpy array of complex
        Argument(s)

    Returns
    -------
    tuple of :class:`ScaledValue`
        Value and ``d/dz``

    Raises
    ------
    ParameterDomainError
        If the order is out of range
    SingularArgumentError
        If ``z == 0`` for ``y`` or ``h1``
    """
    _check_order(order)
    zz = np.asarray(z, dtype=complex)
    _check_argument(kind, zz)
    at_origin = zz == 0
    safe = np.where(at_origin, 1.0, zz)
    prefactor = np.sqrt(np.pi / 2) / np.sqrt(safe)
    value, scale = _raw_cyl(kind, order + 0.5, safe)
    upper = _raw_cyl(kind, order + 1.5, safe)[0]
    value = prefactor * value
    deriv = (order / safe) * value - prefactor * upper
    if np.any(at_origin):
        value = np.where(at_origin, 1.0 if order == 0 else 0.0, value)
        deriv = np.where(at_origin, 1.0 / 3.0 if order == 1 else 0.0, deriv)
        scale = np.where(at_origin, 0.0, scale)
    return ScaledValue.renormalized(value, scale), ScaledValue.renormalized(deriv, scale)


def riccati_bessel(kind: SphKind, order: int, z: ArrayLike) -> Tuple[ScaledValue, ScaledValue]:
    """
    Riccati form ``z f_n(z)`` of a spherical function and its derivative
    ``f_n(z) + z f_n'(z)``
    """
    value, deriv = sph_bessel(kind, order, z)
    zz = np.asarray(z, dtype=complex)
    if zz.ndim == 0:
        zz = complex(zz)
    return value * zz, value + deriv * zz
