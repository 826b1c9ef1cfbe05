"""
Separable geometries: concentric cylinders and concentric spheres.

The interface ``Sigma`` has radius ``r_sigma``, the outer boundary
``Gamma`` has radius ``r_gamma``. ``Omega_minus`` is the inner disk (ball),
``Omega_plus`` the annulus (shell) between them.

The unit normal ``n`` on ``Sigma`` points from ``Omega_plus`` into
``Omega_minus``, that is ``n = -e_r``. The normal depth is
``y3 = r_sigma - r`` and the signed curvature is ``+1 / r_sigma``.

Tangential fields on ``Sigma`` are stored in a fixed surface frame:
``(e_theta, e_z)`` on the cylinder and ``(Psi, Phi)`` on the sphere,
where ``Psi = r grad Y`` is the gradient-type and ``Phi = e_r x Psi``
the curl-type vector spherical harmonic of ``Y = Y_n^m``.
"""

import logging
import math
from typing import Any, List, Literal, Tuple

import numpy as np
from pydantic import BaseModel
from scipy import special  # type: ignore[import]

from muskin.config import CHART_FLOOR, CUTOFF_D0, CUTOFF_D1
from muskin.errors import ChartDomainError, ParameterDomainError


logger = logging.getLogger(__name__)

GeometryKind = Literal["cylinders", "spheres"]


class Geometry(BaseModel):
    """
    Concentric-interface descriptor

    Example
    -------
    ::

        g = Geometry(kind="cylinders", r_sigma=1.0, r_gamma=2.0)
        y_alpha, y3 = normal_coords(g, [0.7, 0.0, 0.0])

    """

    kind: GeometryKind
    """``cylinders`` (two-dimensional, per unit length) or ``spheres``"""

    r_sigma: float
    """Radius of the interface Sigma"""

    r_gamma: float
    """Radius of the outer boundary Gamma"""

    def __init__(self, **kwargs: Any) -> None:
        super().__init__(**kwargs)
        if not 0 < self.r_sigma < self.r_gamma:
            raise ParameterDomainError(
                f"Radii must satisfy 0 < r_sigma < r_gamma, got {self.r_sigma}, {self.r_gamma}"
            )

    @property
    def is_sphere(self) -> bool:
        return self.kind == "spheres"

    @property
    def chart_floor(self) -> float:
        return CHART_FLOOR * self.r_sigma

    def surface_measure(self) -> float:
        """Length (cylinder, per unit length) or area (sphere) of Sigma"""
        if self.is_sphere:
            return 4 * math.pi * self.r_sigma**2
        return 2 * math.pi * self.r_sigma

    class Config:
        frozen = True


class CurvatureData(BaseModel):
    """
    Curvature tensor ``b`` in the surface frame and the mean curvature
    ``mean_H = b^alpha_alpha / 2``
    """

    b: Tuple[Tuple[float, float], Tuple[float, float]]
    mean_H: float

    def shifted(self, j: "TangentialField") -> "TangentialField":
        """Applies ``(C - H)`` to a tangential field"""
        (b11, b12), (b21, b22) = self.b
        return TangentialField(
            first=(b11 - self.mean_H) * j.first + b12 * j.second,
            second=b21 * j.first + (b22 - self.mean_H) * j.second,
        )

    class Config:
        frozen = True


class TangentialField(BaseModel):
    """
    Modal coefficients of a tangential field on Sigma in the surface frame
    of the geometry: ``(e_theta, e_z)`` or ``(Psi, Phi)``
    """

    first: complex = 0j
    second: complex = 0j

    def __add__(self, other: "TangentialField") -> "TangentialField":
        return TangentialField(first=self.first + other.first, second=self.second + other.second)

    def __mul__(self, factor: complex) -> "TangentialField":
        return TangentialField(first=self.first * factor, second=self.second * factor)

    __rmul__ = __mul__

    def __neg__(self) -> "TangentialField":
        return self * -1

    def norm(self) -> float:
        return math.hypot(abs(self.first), abs(self.second))

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class Cutoff(BaseModel):
    """
    Boundary-layer cutoff ``chi(y3)``: 1 on ``[0, d0]``, 0 beyond ``d1``,
    quintic smoothstep in between (C2)
    """

    d0: float
    d1: float
    degree: int = 5

    def __init__(self, **kwargs: Any) -> None:
        super().__init__(**kwargs)
        if not 0 <= self.d0 < self.d1:
            raise ParameterDomainError(f"Cutoff needs 0 <= d0 < d1, got {self.d0}, {self.d1}")
        if self.degree != 5:
            raise NotImplementedError("Only the quintic smoothstep cutoff is available")

    @classmethod
    def default(cls, g: Geometry, d0: float = CUTOFF_D0, d1: float = CUTOFF_D1) -> "Cutoff":
        """Cutoff with knots given as fractions of ``r_sigma``"""
        return cls(d0=d0 * g.r_sigma, d1=d1 * g.r_sigma)

    def check(self, g: Geometry) -> None:
        if self.d1 >= g.r_sigma - g.chart_floor:
            raise ParameterDomainError(
                f"Cutoff support {self.d1} reaches into the coordinate core of radius "
                f"{g.chart_floor}"
            )

    class Config:
        frozen = True


def _as_points(x: Any) -> np.ndarray:
    points = np.asarray(x, dtype=float)
    return points.reshape(-1, 3)


def polar(g: Geometry, points: Any) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Radius and angles of Cartesian points

    Returns ``(r, theta, z)`` for cylinders and ``(r, theta, phi)`` for
    spheres, where ``theta`` is the polar angle.
    """
    p = _as_points(points)
    if g.is_sphere:
        r = np.linalg.norm(p, axis=1)
        safe = np.where(r > 0, r, 1.0)
        theta = np.arccos(np.clip(p[:, 2] / safe, -1.0, 1.0))
        phi = np.arctan2(p[:, 1], p[:, 0])
        return r, theta, phi
    r = np.hypot(p[:, 0], p[:, 1])
    return r, np.arctan2(p[:, 1], p[:, 0]), p[:, 2]


def frame(g: Geometry, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """
    Local orthonormal frames as an ``(N, 3, 3)`` array with rows
    ``(e_r, e_theta, e_z)`` or ``(e_r, e_theta, e_phi)`` in Cartesian components
    """
    out = np.zeros(a.shape + (3, 3))
    if g.is_sphere:
        st, ct, sp, cp = np.sin(a), np.cos(a), np.sin(b), np.cos(b)
        out[:, 0] = np.stack([st * cp, st * sp, ct], axis=1)
        out[:, 1] = np.stack([ct * cp, ct * sp, -st], axis=1)
        out[:, 2] = np.stack([-sp, cp, np.zeros_like(a)], axis=1)
    else:
        s, c = np.sin(a), np.cos(a)
        out[:, 0] = np.stack([c, s, np.zeros_like(a)], axis=1)
        out[:, 1] = np.stack([-s, c, np.zeros_like(a)], axis=1)
        out[:, 2, 2] = 1.0
    return out


def to_cartesian(frames: np.ndarray, local: np.ndarray) -> np.ndarray:
    """Maps ``(N, 3)`` local components to Cartesian components"""
    return np.einsum("nij,ni->nj", frames, local)


def normal_coords(g: Geometry, x: Any) -> Tuple[np.ndarray, np.ndarray]:
    """
    Normal coordinates ``(y_alpha, y3)`` of points of the closed inner region

    Parameters
    ----------
    g: :class:`Geometry`
    x: array-like
        A point or an ``(N, 3)`` array of points

    Returns
    -------
    tuple
        ``y_alpha`` as ``(N, 2)`` array (``(theta, z)`` or ``(theta, phi)``)
        and the depth ``y3 = r_sigma - |x|`` as ``(N,)`` array

    Raises
    ------
    ChartDomainError
        If a point lies outside the closed inner region or inside the
        coordinate core ``|x| < 0.1 r_sigma``
    """
    r, a, b = polar(g, x)
    tol = 1e-14 * g.r_sigma
    if np.any(r > g.r_sigma + tol) or np.any(r < g.chart_floor):
        raise ChartDomainError(
            f"Points must satisfy {g.chart_floor} <= |x| <= {g.r_sigma} for the normal chart"
        )
    return np.stack([a, b], axis=1), np.maximum(g.r_sigma - r, 0.0)


def from_normal_coords(g: Geometry, y_alpha: Any, y3: Any) -> np.ndarray:
    """Inverse of :func:`normal_coords`"""
    ya = np.asarray(y_alpha, dtype=float).reshape(-1, 2)
    r = g.r_sigma - np.asarray(y3, dtype=float).reshape(-1)
    if g.is_sphere:
        theta, phi = ya[:, 0], ya[:, 1]
        return np.stack(
            [r * np.sin(theta) * np.cos(phi), r * np.sin(theta) * np.sin(phi), r * np.cos(theta)],
            axis=1,
        )
    return np.stack([r * np.cos(ya[:, 0]), r * np.sin(ya[:, 0]), ya[:, 1]], axis=1)


def curvature(g: Geometry) -> CurvatureData:
    """
    Curvature tensor of Sigma in its surface frame, oriented by the
    normal pointing into the inner region

    Cylinder: ``b = diag(1 / r_sigma, 0)`` in ``(e_theta, e_z)``.
    Sphere: ``b = Id / r_sigma``, so ``C - H`` vanishes.
    """
    kappa = 1.0 / g.r_sigma
    if g.is_sphere:
        return CurvatureData(b=((kappa, 0.0), (0.0, kappa)), mean_H=kappa)
    return CurvatureData(b=((kappa, 0.0), (0.0, 0.0)), mean_H=0.5 * kappa)


def surface_divergence(g: Geometry, mode: int, j: TangentialField) -> complex:
    """
    Surface divergence of a single-mode tangential field

    Parameters
    ----------
    g: :class:`Geometry`
    mode: int
        Azimuthal index ``m`` on the cylinder, degree ``n`` on the sphere
    j: :class:`TangentialField`
        Coefficients in the surface frame

    Returns
    -------
    complex
        The coefficient of ``exp(i m theta)`` (cylinder) or ``Y_n^m`` (sphere)
    """
    if g.is_sphere:
        return -mode * (mode + 1) / g.r_sigma * j.first
    return 1j * mode / g.r_sigma * j.first


def cutoff_chi(c: Cutoff, y3: Any) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Value and first two derivatives (with respect to ``y3``) of the cutoff

    Raises
    ------
    ParameterDomainError
        If a depth is negative
    """
    y = np.asarray(y3, dtype=float)
    if np.any(y < 0):
        raise ParameterDomainError("Cutoff depth must be nonnegative")
    width = c.d1 - c.d0
    t = np.clip((y - c.d0) / width, 0.0, 1.0)
    step = t**3 * (10 - 15 * t + 6 * t**2)
    d_step = 30 * t**2 * (t - 1) ** 2
    dd_step = 60 * t * (2 * t - 1) * (t - 1)
    return 1.0 - step, -d_step / width, -dd_step / width**2


def _legendre(m: int, n: int, x: np.ndarray) -> np.ndarray:
    """``P_n^m(x)`` with the Condon-Shortley phase, zero outside ``0 <= m <= n``"""
    if n < 0 or not 0 <= m <= n:
        return np.zeros_like(x)
    return special.lpmv(m, n, x)


def harmonic(
    g: Geometry, mode: int, degree: int, a: np.ndarray, b: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Angular factors of a single mode at angles ``(a, b)``

    Returns ``(Y, dY/dtheta, i m Y / sin(theta))`` for the sphere, with
    ``Y`` the orthonormal harmonic of degree ``degree`` and order
    ``mode``. Both derivatives use the order recurrences of ``P_n^m`` and
    stay finite on the polar axis. For the cylinder
    returns ``(exp(i m theta), i m exp(i m theta), 0)``.
    """
    if not g.is_sphere:
        e = np.exp(1j * mode * a)
        return e, 1j * mode * e, np.zeros_like(e)
    n, m = degree, mode
    if not 0 <= m <= n or n < 1:
        raise ParameterDomainError(f"Sphere modes need 0 <= m <= n and n >= 1, got n={n}, m={m}")
    norm = math.sqrt((2 * n + 1) / (4 * math.pi)) * math.exp(
        0.5 * (special.gammaln(n - m + 1) - special.gammaln(n + m + 1))
    )
    x = np.cos(a)
    p = _legendre(m, n, x)
    e = np.exp(1j * m * b) * norm
    if m == 0:
        d_theta = _legendre(1, n, x)
        m_over_sin = np.zeros_like(x)
    else:
        d_theta = 0.5 * (_legendre(m + 1, n, x) - (n + m) * (n - m + 1) * _legendre(m - 1, n, x))
        m_over_sin = -0.5 * (
            _legendre(m + 1, n - 1, x) + (n + m - 1) * (n + m) * _legendre(m - 1, n - 1, x)
        )
    return p * e, d_theta * e, 1j * m_over_sin * e


class SurfaceMode(BaseModel):
    """One harmonic component of scalar surface data on Sigma"""

    index: int
    """``m`` on the cylinder, degree ``n`` on the sphere"""

    order: int = 0
    """Azimuthal order ``m`` of a spherical harmonic, unused on the cylinder"""

    coefficient: complex

    class Config:
        frozen = True


class SurfaceField(BaseModel):
    """
    Scalar surface data on Sigma as a finite sum of harmonics

    The basis is ``exp(i m theta)`` on the cylinder and the orthonormal
    ``Y_n^m`` on the sphere.
    """

    geometry: Geometry
    modes: List[SurfaceMode]

    @classmethod
    def cosine(cls, g: Geometry, amplitude: complex = 1.0) -> "SurfaceField":
        """``amplitude * cos(theta)``"""
        if g.is_sphere:
            coefficient = amplitude * math.sqrt(4 * math.pi / 3)
            return cls(geometry=g, modes=[SurfaceMode(index=1, coefficient=coefficient)])
        half = 0.5 * amplitude
        return cls(
            geometry=g,
            modes=[SurfaceMode(index=-1, coefficient=half), SurfaceMode(index=1, coefficient=half)],
        )

    def measure(self) -> float:
        """Squared norm of a unit basis function on Sigma"""
        if self.geometry.is_sphere:
            return self.geometry.r_sigma**2
        return 2 * math.pi * self.geometry.r_sigma

    def eigenvalue(self, mode: SurfaceMode) -> float:
        """``m**2`` on the cylinder, ``n (n + 1)`` on the sphere"""
        if self.geometry.is_sphere:
            return mode.index * (mode.index + 1)
        return mode.index**2

    def scaled(self, factor: complex) -> "SurfaceField":
        return SurfaceField(
            geometry=self.geometry,
            modes=[
                m.model_copy(update={"coefficient": m.coefficient * factor}) for m in self.modes
            ],
        )

    class Config:
        frozen = True
