"""
Exact per-mode solutions of the Maxwell transmission problem for the
magnetic field in concentric cylinders and spheres.

Each polarization reduces the vector problem to one radial function ``f``
per region:

* cylinder ``TM``: ``H = f(r) exp(i m theta) e_z``
* cylinder ``TE``: ``E = f(r) exp(i m theta) e_z``, ``H = curl E / (i omega mu)``
* sphere ``TM``: ``H = f(r) Phi_nm``
* sphere ``TE``: ``E = f(r) Phi_nm``, ``H = curl E / (i omega mu)``

``f`` is a Bessel function of ``k r`` with ``k`` the wavenumber of the
region: the regular family in the inner region, the two-family basis in
the outer region. Interface and boundary conditions are written in terms
of two functionals of ``f``: the tangential trace ``T`` of ``H`` and the
coefficient ``C`` of ``curl H x n``. Both point along the same tangent
direction for every polarization. The mode systems are assembled from
exponentially scaled values and balanced before solving.
"""

import logging
from typing import Any, List, Literal, Optional, Tuple

import numpy as np
from numpy.polynomial.legendre import leggauss
from pydantic import BaseModel
from scipy import linalg  # type: ignore[import]

from muskin import config
from muskin.errors import AccuracyError, ChartDomainError, ConditioningError
from muskin.errors import ParameterDomainError
from muskin.geometry import Geometry, TangentialField, frame, harmonic, polar, to_cartesian
from muskin.media import DerivedParams, MediaParams, Side
from muskin.specfun import ScaledValue, cyl_bessel, sph_bessel


logger = logging.getLogger(__name__)

DriveKind = Literal["BoundaryTrace", "ShellCurrent"]
Polarization = Literal["TM", "TE"]
Family = Literal["regular", "singular"]


class Drive(BaseModel):
    """
    Single-mode excitation of the transmission problem

    ``BoundaryTrace`` prescribes the tangential trace of ``H`` on Gamma
    (amplitude times the tangent direction of the polarization).
    ``ShellCurrent`` drives the problem with a volume current supported in
    ``support`` inside the outer region, with ``H x n = 0`` on Gamma.
    """

    kind: DriveKind
    polarization: Polarization = "TM"
    mode: int = 0
    """Azimuthal index ``m``"""

    degree: int = 1
    """Degree ``n`` of the spherical harmonic, ignored on the cylinder"""

    amplitude: complex = 1 + 0j
    support: Optional[Tuple[float, float]] = None
    """Radial support ``[a, b]`` of a shell current"""

    def scaled(self, factor: complex) -> "Drive":
        return self.model_copy(update={"amplitude": self.amplitude * factor})

    def label(self, g: Geometry) -> str:
        if g.is_sphere:
            return f"{self.polarization} n={self.degree} m={self.mode}"
        return f"{self.polarization} m={self.mode}"

    class Config:
        frozen = True
        arbitrary_types_allowed = True


def check_drive(g: Geometry, drive: Drive) -> None:
    """
    Raises
    ------
    ParameterDomainError
        If the mode is outside the order cap, or a shell support does not
        lie strictly inside the outer region
    NotImplementedError
        For ``TE`` shell currents
    """
    order = radial_order(g, drive)
    if order > config.MAX_ORDER:
        raise ParameterDomainError(f"Mode order {order} exceeds the cap {config.MAX_ORDER}")
    if g.is_sphere and not 0 <= drive.mode <= drive.degree:
        raise ParameterDomainError(
            f"Sphere modes need 0 <= m <= n, got n={drive.degree}, m={drive.mode}"
        )
    if g.is_sphere and drive.degree < 1:
        raise ParameterDomainError("Sphere modes need degree n >= 1")
    if drive.kind == "ShellCurrent":
        if drive.polarization != "TM":
            raise NotImplementedError("Shell currents are only available for TM modes")
        if drive.support is None:
            raise ParameterDomainError("A shell current needs a radial support")
        a, b = drive.support
        if not g.r_sigma < a < b < g.r_gamma:
            raise ParameterDomainError(
                f"Shell support [{a}, {b}] must lie inside ({g.r_sigma}, {g.r_gamma})"
            )


def radial_order(g: Geometry, drive: Drive) -> int:
    return drive.degree if g.is_sphere else abs(drive.mode)


def radial_basis(
    g: Geometry, family: Family, order: int, k: complex, r: Any
) -> Tuple[ScaledValue, ScaledValue]:
    """``Z(k r)`` and its ``r``-derivative for the regular or singular family"""
    z = k * np.asarray(r, dtype=complex)
    if g.is_sphere:
        value, deriv = sph_bessel("j" if family == "regular" else "y", order, z)
    else:
        value, deriv = cyl_bessel("J" if family == "regular" else "Y", order, z)
    return value, deriv * k


def trace_functionals(
    g: Geometry,
    d: DerivedParams,
    polarization: Polarization,
    side: Side,
    f: ScaledValue,
    df: ScaledValue,
    r: float,
) -> Tuple[ScaledValue, ScaledValue]:
    """
    Tangential trace ``T`` of ``H`` and coefficient ``C`` of ``curl H x n``
    on a sphere or cylinder of radius ``r`` for the radial function ``f``

    Both are coefficients of the same surface frame direction:
    ``e_z``/``e_theta`` on the cylinder, ``Phi``/``Psi`` on the sphere.
    """
    p = d.media
    k = d.wavenumber(side)
    iwmu = 1j * p.omega * p.mu(side)
    if g.is_sphere:
        flux = f + df * r
        if polarization == "TM":
            return f, flux * (-1.0 / r)
        return flux * (-1.0 / (r * iwmu)), f * (-(k**2) / iwmu)
    if polarization == "TM":
        return f, -df
    return df * (-1.0 / iwmu), f * (-(k**2) / iwmu)


def bump(support: Tuple[float, float], r: Any) -> np.ndarray:
    """Radial profile ``(4 (r - a) (b - r) / (b - a)^2)^3`` on ``[a, b]``, zero outside"""
    a, b = support
    rr = np.asarray(r, dtype=float)
    t = np.clip(4 * (rr - a) * (b - rr) / (b - a) ** 2, 0.0, None)
    return t**3


class ShellParticular(BaseModel):
    """
    Particular radial solution for a TM shell current, by variation of
    parameters over the homogeneous pair of the outer region

    ``f_p(r) = c [y2(r) I1(r) - y1(r) I2(r)]`` with
    ``I_i(r) = int_a^r w_i(s) g(s) ds`` and ``g = amplitude * bump``. The
    weights are ``s y_i'(s)`` (cylinder, ``c = pi / 2``) and
    ``s (s y_i)'`` (sphere, ``c = k``). ``f_p`` vanishes below ``a`` and is
    homogeneous above ``b``.
    """

    geometry: Geometry
    k: complex
    order: int
    amplitude: complex
    support: Tuple[float, float]
    nodes: int
    achieved: float

    @property
    def constant(self) -> complex:
        return self.k if self.geometry.is_sphere else np.pi / 2

    def _pair(self, s: np.ndarray) -> Tuple[np.ndarray, ...]:
        y1, dy1 = radial_basis(self.geometry, "regular", self.order, self.k, s)
        y2, dy2 = radial_basis(self.geometry, "singular", self.order, self.k, s)
        return y1.value, dy1.value, y2.value, dy2.value

    def _weights(self, s: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        y1, dy1, y2, dy2 = self._pair(s)
        if self.geometry.is_sphere:
            return s * (y1 + s * dy1), s * (y2 + s * dy2)
        return s * dy1, s * dy2

    def moments(self, upper: Any, nodes: Optional[int] = None) -> Tuple[np.ndarray, np.ndarray]:
        """``I1`` and ``I2`` from ``a`` up to ``min(upper, b)``"""
        a, b = self.support
        top = np.clip(np.asarray(upper, dtype=float).reshape(-1), a, b)
        t, w = leggauss(nodes or self.nodes)
        half = 0.5 * (top - a)
        s = a + half[:, None] * (t[None, :] + 1.0)
        g = self.amplitude * bump(self.support, s)
        w1, w2 = self._weights(s.reshape(-1))
        w1 = w1.reshape(s.shape)
        w2 = w2.reshape(s.shape)
        i1 = half * np.sum(w[None, :] * w1 * g, axis=1)
        i2 = half * np.sum(w[None, :] * w2 * g, axis=1)
        return i1, i2

    def evaluate(self, r: Any) -> Tuple[np.ndarray, np.ndarray]:
        """Value and ``r``-derivative of the particular solution"""
        rr = np.asarray(r, dtype=float).reshape(-1)
        i1, i2 = self.moments(rr)
        y1, dy1, y2, dy2 = self._pair(rr)
        c = self.constant
        g = self.amplitude * bump(self.support, rr)
        value = c * (y2 * i1 - y1 * i2)
        deriv = c * (dy2 * i1 - dy1 * i2) - g
        return value, deriv

    def source(self, r: Any) -> np.ndarray:
        """``(r g)' / r``, the right-hand side of the radial equation"""
        a, b = self.support
        rr = np.asarray(r, dtype=float).reshape(-1)
        t = np.clip(4 * (rr - a) * (b - rr) / (b - a) ** 2, 0.0, None)
        dt = np.where(t > 0, 4 * (a + b - 2 * rr) / (b - a) ** 2, 0.0)
        return self.amplitude * (t**3 + rr * 3 * t**2 * dt) / rr

    def helmholtz_residual(self, samples: int = 9) -> float:
        """
        Relative residual of ``f'' + (p / r) f' + (k^2 - l / r^2) f = -(r g)' / r``
        at interior points of the support, ``p = 1, l = m^2`` on the cylinder
        and ``p = 2, l = n (n + 1)`` on the sphere

        ``f''`` is the five-point central difference of the closed-form ``f'``.
        """
        a, b = self.support
        h = 2e-4 * (b - a)
        r = np.linspace(a, b, samples + 2)[1:-1]
        offsets = np.array([-2.0, -1.0, 1.0, 2.0]) * h
        _, shifted = self.evaluate((r[:, None] + offsets[None, :]).reshape(-1))
        shifted = shifted.reshape(r.size, offsets.size)
        ddf = (shifted[:, 0] - 8 * shifted[:, 1] + 8 * shifted[:, 2] - shifted[:, 3]) / (12 * h)
        f, df = self.evaluate(r)
        n = self.order
        p, ell = (2.0, n * (n + 1.0)) if self.geometry.is_sphere else (1.0, float(n * n))
        parts = (ddf, p / r * df, (self.k**2 - ell / r**2) * f, self.source(r))
        scale = max(float(np.abs(part).max()) for part in parts)
        residual = float(np.abs(sum(parts)).max())
        return residual / scale if scale > 0 else residual

    class Config:
        frozen = True
        arbitrary_types_allowed = True


def shell_source_particular(g: Geometry, d: DerivedParams, drive: Drive) -> ShellParticular:
    """
    Builds the particular radial solution of a shell current

    The Gauss-Legendre order of the moment integrals is doubled until the
    radial Helmholtz residual of the particular solution drops below
    ``config.SHELL_TOL``.

    Raises
    ------
    AccuracyError
        If the refinement cap is reached first
    """
    check_drive(g, drive)
    if drive.kind != "ShellCurrent":
        raise ParameterDomainError("A particular solution needs a ShellCurrent drive")
    particular = ShellParticular(
        geometry=g,
        k=d.k_plus,
        order=radial_order(g, drive),
        amplitude=drive.amplitude,
        support=drive.support,  # type: ignore[arg-type]
        nodes=config.SHELL_NODES,
        achieved=np.inf,
    )
    nodes = config.SHELL_NODES
    while nodes <= config.SHELL_MAX_NODES:
        candidate = particular.model_copy(update={"nodes": nodes})
        residual = candidate.helmholtz_residual()
        if residual < config.SHELL_TOL:
            logger.debug("Shell source converged with %d nodes (residual %.2e)", nodes, residual)
            return candidate.model_copy(update={"achieved": residual})
        nodes *= 2
    raise AccuracyError(
        f"Shell source quadrature did not converge, residual {residual:.3e}", achieved=residual
    )


class ModeSystem(BaseModel):
    """
    Balanced complex linear system of one mode

    The unknown ``x`` relates to the true coefficients through
    ``coefficient = x * exp(-column_scales)``.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    column_scales: np.ndarray
    condition: float
    label: str
    particular: Optional[ShellParticular] = None

    def solve(self) -> np.ndarray:
        return linalg.solve(self.matrix, self.rhs)

    class Config:
        arbitrary_types_allowed = True


def balance_rows(matrix: np.ndarray, rhs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Scales every row such that its largest entry has modulus 1"""
    top = np.max(np.abs(matrix), axis=1)
    if np.any(top == 0):
        raise ConditioningError("Mode system has an empty row")
    return matrix / top[:, None], rhs / top


def _finish_system(
    entries: List[List[Optional[ScaledValue]]],
    rhs: np.ndarray,
    label: str,
    particular: Optional[ShellParticular] = None,
) -> ModeSystem:
    rows, cols = len(entries), len(entries[0])
    scales = np.zeros(cols)
    for j in range(cols):
        logs = [
            entries[i][j].log_scale  # type: ignore[union-attr]
            for i in range(rows)
            if entries[i][j] is not None and entries[i][j].mantissa != 0  # type: ignore
        ]
        scales[j] = max(logs) if logs else 0.0
    matrix = np.zeros((rows, cols), dtype=complex)
    for i in range(rows):
        for j in range(cols):
            entry = entries[i][j]
            if entry is not None:
                matrix[i, j] = entry.relative_to(scales[j])
    matrix, rhs = balance_rows(matrix, np.asarray(rhs, dtype=complex))
    condition = float(np.linalg.cond(matrix))
    if not np.isfinite(condition) or condition > config.CONDITION_LIMIT:
        raise ConditioningError(
            f"Mode system {label} is ill-conditioned (condition {condition:.3e})",
            mode=label,
            condition=condition,
        )
    if condition > 1e-2 * config.CONDITION_LIMIT:
        logger.warning("Mode system %s is close to the conditioning guard: %.3e", label, condition)
    return ModeSystem(
        matrix=matrix,
        rhs=rhs,
        column_scales=scales,
        condition=condition,
        label=label,
        particular=particular,
    )


def _outer_functionals(
    g: Geometry, d: DerivedParams, polarization: Polarization, order: int, r: float
) -> List[Tuple[ScaledValue, ScaledValue]]:
    out = []
    for family in ("regular", "singular"):
        f, df = radial_basis(g, family, order, d.k_plus, r)  # type: ignore[arg-type]
        out.append(trace_functionals(g, d, polarization, "plus", f, df, r))
    return out


def assemble_mode_system(g: Geometry, d: DerivedParams, drive: Drive) -> ModeSystem:
    """
    Assembles the 3x3 system of one mode of the full transmission problem

    Unknowns: the regular coefficient in the inner region and the two
    outer coefficients. Rows: continuity of ``H x n`` on Sigma,
    continuity of ``alpha^-1 curl H x n`` on Sigma, and the condition on
    Gamma (prescribed trace or ``H x n = 0``).

    Raises
    ------
    ConditioningError
        If the balanced condition number exceeds ``config.CONDITION_LIMIT``
    """
    check_drive(g, drive)
    order = radial_order(g, drive)
    pol = drive.polarization
    rs, rg = g.r_sigma, g.r_gamma
    f, df = radial_basis(g, "regular", order, d.k_minus, rs)
    t_in, c_in = trace_functionals(g, d, pol, "minus", f, df, rs)
    at_sigma = _outer_functionals(g, d, pol, order, rs)
    at_gamma = _outer_functionals(g, d, pol, order, rg)
    a_in = 1.0 / d.alpha_minus
    a_out = 1.0 / d.alpha_plus
    entries: List[List[Optional[ScaledValue]]] = [
        [t_in, -at_sigma[0][0], -at_sigma[1][0]],
        [c_in * a_in, at_sigma[0][1] * -a_out, at_sigma[1][1] * -a_out],
        [None, at_gamma[0][0], at_gamma[1][0]],
    ]
    rhs = np.zeros(3, dtype=complex)
    particular = None
    if drive.kind == "BoundaryTrace":
        rhs[2] = drive.amplitude
    else:
        particular = shell_source_particular(g, d, drive)
        value, deriv = particular.evaluate(rg)
        fp = ScaledValue.renormalized(value[0], 0.0)
        dfp = ScaledValue.renormalized(deriv[0], 0.0)
        rhs[2] = -trace_functionals(g, d, pol, "plus", fp, dfp, rg)[0].value
    return _finish_system(entries, rhs, drive.label(g), particular)


class ModalSolution(BaseModel):
    """
    Coefficients of one solved mode

    ``inner`` multiplies the regular basis in the inner region, ``outer``
    the regular and singular bases in the outer region. ``region`` is
    ``plus`` for problems posed on the outer region only.
    """

    geometry: Geometry
    derived: DerivedParams
    drive: Drive
    inner: ScaledValue
    outer: Tuple[ScaledValue, ScaledValue]
    scaled_coefficients: np.ndarray
    condition: float
    region: Literal["full", "plus"] = "full"
    particular: Optional[ShellParticular] = None

    @property
    def media(self) -> MediaParams:
        return self.derived.media

    def radial(self, side: Side, r: Any) -> Tuple[np.ndarray, np.ndarray]:
        """Radial function ``f`` and ``f'`` of the solution in one region"""
        g, d = self.geometry, self.derived
        order = radial_order(g, self.drive)
        rr = np.asarray(r, dtype=float).reshape(-1)
        if side == "minus":
            f, df = radial_basis(g, "regular", order, d.k_minus, rr)
            return (f * self.inner).value, (df * self.inner).value
        value = np.zeros(rr.shape, dtype=complex)
        deriv = np.zeros(rr.shape, dtype=complex)
        for family, coefficient in zip(("regular", "singular"), self.outer):
            f, df = radial_basis(g, family, order, d.k_plus, rr)  # type: ignore[arg-type]
            value += (f * coefficient).value
            deriv += (df * coefficient).value
        if self.particular is not None:
            fp, dfp = self.particular.evaluate(rr)
            value += fp
            deriv += dfp
        return value, deriv

    def traces(self, side: Side, r: float) -> Tuple[complex, complex]:
        """``T`` and ``C`` functionals of the solution on radius ``r``"""
        f, df = self.radial(side, r)
        t, c = trace_functionals(
            self.geometry,
            self.derived,
            self.drive.polarization,
            side,
            ScaledValue.renormalized(f[0], 0.0),
            ScaledValue.renormalized(df[0], 0.0),
            r,
        )
        return complex(t.value), complex(c.value)

    def normal_coefficient(self, side: Side, r: float) -> complex:
        """Coefficient of ``H . e_r`` on radius ``r``"""
        if self.drive.polarization == "TM":
            return 0j
        f, _ = self.radial(side, r)
        p = self.media
        iwmu = 1j * p.omega * p.mu(side)
        if self.geometry.is_sphere:
            n = self.drive.degree
            return complex(-n * (n + 1) * f[0] / (r * iwmu))
        return complex(1j * self.drive.mode * f[0] / (r * iwmu))

    def curl_trace(self) -> TangentialField:
        """``curl H+ x n`` on Sigma as a tangential field in the surface frame"""
        _, c = self.traces("plus", self.geometry.r_sigma)
        return along_tangent(self.geometry, self.drive.polarization, c)

    class Config:
        arbitrary_types_allowed = True


def along_tangent(g: Geometry, polarization: Polarization, value: complex) -> TangentialField:
    """
    Places a coefficient along the tangent direction of a polarization:
    ``e_z`` (cylinder TM), ``e_theta`` (cylinder TE), ``Phi`` (sphere TM),
    ``Psi`` (sphere TE)
    """
    if polarization == "TM":
        return TangentialField(second=value)
    return TangentialField(first=value)


def tangent_component(g: Geometry, polarization: Polarization, j: TangentialField) -> complex:
    """Inverse of the placement in :func:`along_tangent`"""
    if polarization == "TM":
        return j.second
    return j.first


def _coefficients(system: ModeSystem) -> Tuple[np.ndarray, List[ScaledValue]]:
    x = system.solve()
    return x, [
        ScaledValue.renormalized(x[i], -system.column_scales[i]) for i in range(len(x))
    ]


def solve_exact(g: Geometry, media: MediaParams, drive: Drive) -> ModalSolution:
    """
    Solves one mode of the full transmission problem

    Parameters
    ----------
    g: :class:`muskin.geometry.Geometry`
    media: :class:`muskin.media.MediaParams`
    drive: :class:`Drive`

    Returns
    -------
    :class:`ModalSolution`

    Raises
    ------
    ConditioningError
        If the mode system is ill-conditioned
    """
    d = media.derived
    system = assemble_mode_system(g, d, drive)
    x, coefficients = _coefficients(system)
    logger.debug(
        "Solved %s for mu_r=%s (condition %.3e)", system.label, media.mu_r, system.condition
    )
    return ModalSolution(
        geometry=g,
        derived=d,
        drive=drive,
        inner=coefficients[0],
        outer=(coefficients[1], coefficients[2]),
        scaled_coefficients=x,
        condition=system.condition,
        particular=system.particular,
    )


def solve_outer(
    g: Geometry,
    d: DerivedParams,
    drive: Drive,
    trace_sigma: complex,
    trace_gamma: complex,
) -> ModalSolution:
    """
    Solves the homogeneous outer-region problem of one mode with
    prescribed tangential traces of ``H`` on Sigma and on Gamma

    ``drive`` only selects polarization and mode; its amplitude is unused.
    """
    check_drive(g, drive)
    order = radial_order(g, drive)
    pol = drive.polarization
    at_sigma = _outer_functionals(g, d, pol, order, g.r_sigma)
    at_gamma = _outer_functionals(g, d, pol, order, g.r_gamma)
    entries: List[List[Optional[ScaledValue]]] = [
        [at_sigma[0][0], at_sigma[1][0]],
        [at_gamma[0][0], at_gamma[1][0]],
    ]
    rhs = np.array([trace_sigma, trace_gamma], dtype=complex)
    system = _finish_system(entries, rhs, drive.label(g))
    x, coefficients = _coefficients(system)
    return ModalSolution(
        geometry=g,
        derived=d,
        drive=drive,
        inner=ScaledValue.renormalized(0.0, 0.0),
        outer=(coefficients[0], coefficients[1]),
        scaled_coefficients=x,
        condition=system.condition,
        region="plus",
    )


def interface_residuals(s: ModalSolution) -> Tuple[float, float, float]:
    """
    Relative residuals on Sigma of the continuity of ``H x n``, of
    ``alpha^-1 curl H x n`` and of ``eps^2 H+ . n = H- . n``
    """
    rs = s.geometry.r_sigma
    d = s.derived
    t_in, c_in = s.traces("minus", rs)
    t_out, c_out = s.traces("plus", rs)
    n_in = s.normal_coefficient("minus", rs)
    n_out = d.eps**2 * s.normal_coefficient("plus", rs)

    def rel(a: complex, b: complex) -> float:
        size = max(abs(a), abs(b))
        return abs(a - b) / size if size > 0 else 0.0

    return (
        rel(t_in, t_out),
        rel(c_in / d.alpha_minus, c_out / d.alpha_plus),
        rel(n_in, n_out),
    )


def _sides(s: ModalSolution, r: np.ndarray, side: Optional[Side]) -> np.ndarray:
    g = s.geometry
    tol = 1e-12 * g.r_gamma
    if np.any(r > g.r_gamma + tol) or np.any(r <= 0):
        raise ChartDomainError(f"Points must satisfy 0 < |x| <= {g.r_gamma}")
    if side is not None:
        inner = np.full(r.shape, side == "minus")
    else:
        inner = r < g.r_sigma
    if s.region == "plus" and np.any(inner & (r < g.r_sigma - tol)):
        raise ChartDomainError("Solution is only defined on the outer region")
    return inner


def _local_fields(
    s: ModalSolution, side: Side, r: np.ndarray, a: np.ndarray, b: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """``H`` and ``curl H`` in the local frame ``(e_r, e_theta, e_z|e_phi)``"""
    g, d, drive = s.geometry, s.derived, s.drive
    f, df = s.radial(side, r)
    y, y_theta, y_msin = harmonic(g, drive.mode, drive.degree, a, b)
    p = d.media
    iwmu = 1j * p.omega * p.mu(side)
    k2 = d.wavenumber(side) ** 2
    h = np.zeros(r.shape + (3,), dtype=complex)
    curl = np.zeros(r.shape + (3,), dtype=complex)
    if g.is_sphere:
        n = drive.degree
        radial_part = -n * (n + 1) * f / r * y
        tangential = -(f + r * df) / r
        psi = (y_theta, y_msin)
        phi = (-y_msin, y_theta)
        if drive.polarization == "TM":
            h[:, 1], h[:, 2] = f * phi[0], f * phi[1]
            curl[:, 0] = radial_part
            curl[:, 1], curl[:, 2] = tangential * psi[0], tangential * psi[1]
        else:
            h[:, 0] = radial_part / iwmu
            h[:, 1], h[:, 2] = tangential * psi[0] / iwmu, tangential * psi[1] / iwmu
            curl[:, 1], curl[:, 2] = k2 * f * phi[0] / iwmu, k2 * f * phi[1] / iwmu
        return h, curl
    m = drive.mode
    if drive.polarization == "TM":
        h[:, 2] = f * y
        curl[:, 0] = 1j * m / r * f * y
        curl[:, 1] = -df * y
    else:
        h[:, 0] = 1j * m / r * f * y / iwmu
        h[:, 1] = -df * y / iwmu
        curl[:, 2] = k2 * f * y / iwmu
    return h, curl


def eval_field(
    s: ModalSolution, points: Any, side: Optional[Side] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Samples ``H`` and ``curl H`` at Cartesian points

    Parameters
    ----------
    s: :class:`ModalSolution`
    points: array-like
        ``(N, 3)`` Cartesian points in the closed domain
    side: str, optional
        Force evaluation of the ``plus`` or ``minus`` representation, for
        instance on Sigma itself

    Returns
    -------
    tuple of numpy arrays
        ``H`` and ``curl H``, each ``(N, 3)`` complex Cartesian components

    Raises
    ------
    ChartDomainError
        For points outside the domain or at the origin
    """
    g = s.geometry
    r, a, b = polar(g, points)
    inner = _sides(s, r, side)
    h = np.zeros(r.shape + (3,), dtype=complex)
    curl = np.zeros(r.shape + (3,), dtype=complex)
    for region, mask in (("minus", inner), ("plus", ~inner)):
        if np.any(mask):
            local = _local_fields(s, region, r[mask], a[mask], b[mask])  # type: ignore
            h[mask], curl[mask] = local
    frames = frame(g, a, b)
    return to_cartesian(frames, h), to_cartesian(frames, curl)


def current(s: ModalSolution, points: Any) -> np.ndarray:
    """The source current ``j`` at Cartesian points, ``(N, 3)`` complex"""
    g, drive = s.geometry, s.drive
    r, a, b = polar(g, points)
    out = np.zeros(r.shape + (3,), dtype=complex)
    if drive.kind != "ShellCurrent":
        return out
    profile = drive.amplitude * bump(drive.support, r)  # type: ignore[arg-type]
    y, y_theta, y_msin = harmonic(g, drive.mode, drive.degree, a, b)
    if g.is_sphere:
        out[:, 1], out[:, 2] = profile * y_theta, profile * y_msin
    else:
        out[:, 1] = profile * y
    return to_cartesian(frame(g, a, b), out)


def recover_E(s: ModalSolution, points: Any, side: Optional[Side] = None) -> np.ndarray:
    """
    Electric field ``E = (i omega eps0 - sigma)^-1 (j - curl H)`` at
    Cartesian points, with the conductivity of the region of each point
    """
    g, d = s.geometry, s.derived
    r, _, _ = polar(g, points)
    inner = _sides(s, r, side)
    _, curl = eval_field(s, points, side)
    j = current(s, points)
    factor = np.where(inner, d.impedance_factor("minus"), d.impedance_factor("plus"))
    return factor[:, None] * (j - curl)
