"""
Asymptotic expansion of the transmission problem for large permeability
contrast: outer terms ``H+_j`` and boundary-layer profiles ``V_j``,
``j = 0, 1, 2``.

The outer terms solve homogeneous problems in the outer region with
tangential traces on Sigma taken from the profiles. The profiles are
closed forms in the stretched depth ``Y3 = y3 / eps``::

    V_0 = 0
    V_1 = -j0 exp(-lambda Y3)
    V_2 = [-j1 + (1 / lambda + Y3) (C - H) j0] exp(-lambda Y3)
    v_2 = -div(j0) / lambda * exp(-lambda Y3)

with ``j_k = (alpha_minus / alpha_plus) / lambda * (curl H+_k x n)`` on
Sigma. Tangential profile parts are covariant components in the surface
frame. Every quantity here is independent of ``mu_r``.
"""

import logging
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from muskin import config
from muskin.errors import ChartDomainError, ParameterDomainError
from muskin.geometry import CurvatureData, Cutoff, Geometry, TangentialField
from muskin.geometry import curvature, cutoff_chi, frame, harmonic, polar, surface_divergence
from muskin.geometry import to_cartesian
from muskin.media import DerivedParams
from muskin.modal import Drive, ModalSolution, Polarization, eval_field, solve_outer
from muskin.modal import along_tangent, tangent_component


logger = logging.getLogger(__name__)


class ExpansionTerm(BaseModel):
    """Outer term ``H+_order``, solved on the outer region only"""

    order: int
    solution: ModalSolution
    trace_sigma: complex
    """Tangential trace of ``H`` on Sigma along the polarization tangent"""

    trace_gamma: complex

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class ProfileData(BaseModel):
    """Surface data shared by the profiles of one mode"""

    geometry: Geometry
    polarization: Polarization
    mode: int
    degree: int
    j0: TangentialField
    j1: TangentialField = TangentialField()
    lambda_: complex
    curvature: CurvatureData
    div_j0: complex

    @property
    def mode_index(self) -> int:
        """Index entering the surface divergence: ``n`` on the sphere, ``m`` on the cylinder"""
        return self.degree if self.geometry.is_sphere else self.mode

    class Config:
        frozen = True
        arbitrary_types_allowed = True


class Profile(BaseModel):
    """
    Boundary-layer profile of order 0, 1 or 2

    The tangential part has the form ``(p + q Y3) exp(-lambda Y3)`` and the
    normal part ``c exp(-lambda Y3)``, with coefficients along the
    polarization tangent from :meth:`layer_coefficients`.
    """

    order: int
    data: ProfileData

    def layer_coefficients(self) -> Tuple[complex, complex, complex]:
        """``(p, q, c)`` of the tangential and normal closed forms"""
        data = self.data
        g, pol = data.geometry, data.polarization
        if self.order == 0:
            return 0j, 0j, 0j
        j0 = tangent_component(g, pol, data.j0)
        if self.order == 1:
            return -j0, 0j, 0j
        k = tangent_component(g, pol, data.curvature.shifted(data.j0))
        j1 = tangent_component(g, pol, data.j1)
        lam = data.lambda_
        return -j1 + k / lam, k, -data.div_j0 / lam

    def tangential(self, Y3: Any) -> np.ndarray:
        p, q, _ = self.layer_coefficients()
        y = np.asarray(Y3, dtype=float)
        return (p + q * y) * np.exp(-self.data.lambda_ * y)

    def tangential_dY(self, Y3: Any) -> np.ndarray:
        p, q, _ = self.layer_coefficients()
        y = np.asarray(Y3, dtype=float)
        lam = self.data.lambda_
        return (q - lam * (p + q * y)) * np.exp(-lam * y)

    def tangential_dY2(self, Y3: Any) -> np.ndarray:
        p, q, _ = self.layer_coefficients()
        y = np.asarray(Y3, dtype=float)
        lam = self.data.lambda_
        return (lam**2 * (p + q * y) - 2 * lam * q) * np.exp(-lam * y)

    def normal(self, Y3: Any) -> np.ndarray:
        _, _, c = self.layer_coefficients()
        y = np.asarray(Y3, dtype=float)
        return c * np.exp(-self.data.lambda_ * y)

    def surface_value(self) -> TangentialField:
        """The tangential profile at ``Y3 = 0`` as a surface field"""
        return along_tangent(self.data.geometry, self.data.polarization, self.tangential(0.0))

    class Config:
        frozen = True


def _check_order(order: int) -> None:
    if order not in (0, 1, 2):
        raise ParameterDomainError(f"Expansion orders 0, 1 and 2 are available, got {order}")


def _profile_of(profiles: Sequence[Profile], order: int) -> Profile:
    for profile in profiles:
        if profile.order == order:
            return profile
    raise ParameterDomainError(f"Profile of order {order} is needed to solve term {order}")


def solve_term(
    order: int,
    g: Geometry,
    d: DerivedParams,
    drive: Drive,
    prior_profiles: Sequence[Profile] = (),
) -> ExpansionTerm:
    """
    Solves the outer term ``H+_order``

    ``H+_0`` has zero tangential trace on Sigma and the drive trace on
    Gamma. ``H+_1`` and ``H+_2`` take the tangential trace of the profile
    of the same order on Sigma (``-j0`` and ``-j1 + (C - H) j0 / lambda``)
    and vanish on Gamma.

    Parameters
    ----------
    order: int
        0, 1 or 2
    g: :class:`muskin.geometry.Geometry`
    d: :class:`muskin.media.DerivedParams`
    drive: :class:`muskin.modal.Drive`
        Must be a ``BoundaryTrace`` drive
    prior_profiles: list of :class:`Profile`
        Must contain the profile of order ``order`` for ``order >= 1``

    Returns
    -------
    :class:`ExpansionTerm`

    Raises
    ------
    ConditioningError
        As in :func:`muskin.modal.solve_exact`
    """
    _check_order(order)
    if drive.kind != "BoundaryTrace":
        raise NotImplementedError("Expansion terms are built for BoundaryTrace drives")
    if order == 0:
        trace_sigma, trace_gamma = 0j, complex(drive.amplitude)
    else:
        profile = _profile_of(prior_profiles, order)
        trace_sigma = tangent_component(g, drive.polarization, profile.surface_value())
        trace_gamma = 0j
    solution = solve_outer(g, d, drive, trace_sigma, trace_gamma)
    logger.debug("Solved expansion term %d for %s", order, drive.label(g))
    return ExpansionTerm(
        order=order, solution=solution, trace_sigma=trace_sigma, trace_gamma=trace_gamma
    )


def trace_jk(term: ExpansionTerm, d: DerivedParams) -> TangentialField:
    """``j_k = (alpha_minus / alpha_plus) / lambda * (curl H+_k x n)`` on Sigma"""
    return term.solution.curl_trace() * (d.contrast / d.lambda_)


def build_profile(
    order: int, g: Geometry, d: DerivedParams, terms: Sequence[ExpansionTerm]
) -> Profile:
    """
    Profile of order ``order`` from the outer terms of lower order

    Raises
    ------
    ParameterDomainError
        If a needed term is missing
    """
    _check_order(order)
    if len(terms) < max(order, 1):
        raise ParameterDomainError(f"Profile {order} needs the outer terms below order {order}")
    drive = terms[0].solution.drive
    j0 = trace_jk(terms[0], d)
    j1 = trace_jk(terms[1], d) if order == 2 else TangentialField()
    index = drive.degree if g.is_sphere else drive.mode
    data = ProfileData(
        geometry=g,
        polarization=drive.polarization,
        mode=drive.mode,
        degree=drive.degree,
        j0=j0,
        j1=j1,
        lambda_=d.lambda_,
        curvature=curvature(g),
        div_j0=surface_divergence(g, index, j0),
    )
    return Profile(order=order, data=data)


def expand(
    g: Geometry, d: DerivedParams, drive: Drive, order: int = 2
) -> Tuple[List[ExpansionTerm], List[Profile]]:
    """
    Runs the induction up to ``order``: ``H+_0``, ``V_1``, ``H+_1``,
    ``V_2``, ``H+_2``

    Returns
    -------
    tuple
        Lists of terms and profiles, indexed by order
    """
    _check_order(order)
    terms = [solve_term(0, g, d, drive)]
    profiles = [build_profile(0, g, d, terms)]
    for j in range(1, order + 1):
        profiles.append(build_profile(j, g, d, terms))
        terms.append(solve_term(j, g, d, drive, profiles))
    return terms, profiles


def surface_patterns(
    g: Geometry, drive: Drive, a: np.ndarray, b: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Physical components of the surface frame vectors at angles ``(a, b)``

    Returns the ``(N, 2)`` components of the first and second frame vector
    in ``(e_theta, e_z)`` or ``(e_theta, e_phi)``, and the scalar pattern.
    """
    y, y_theta, y_msin = harmonic(g, drive.mode, drive.degree, a, b)
    zero = np.zeros_like(y)
    if g.is_sphere:
        return (
            np.stack([y_theta, y_msin], axis=1),
            np.stack([-y_msin, y_theta], axis=1),
            y,
        )
    return np.stack([y, zero], axis=1), np.stack([zero, y], axis=1), y


def profile_eval(p: Profile, y_alpha: Any, Y3: Any) -> Tuple[np.ndarray, np.ndarray]:
    """
    Samples a profile at surface angles ``y_alpha`` and stretched depths ``Y3``

    Returns
    -------
    tuple
        Tangential part as ``(N, 2)`` components in the surface frame at
        ``Y3 = 0`` and the normal part as ``(N,)`` array

    Raises
    ------
    ParameterDomainError
        If a depth is negative
    """
    y = np.asarray(Y3, dtype=float).reshape(-1)
    if np.any(y < 0):
        raise ParameterDomainError("Stretched depth must be nonnegative")
    ya = np.asarray(y_alpha, dtype=float).reshape(-1, 2)
    data = p.data
    drive = Drive(
        kind="BoundaryTrace", polarization=data.polarization, mode=data.mode, degree=data.degree
    )
    first, second, scalar = surface_patterns(data.geometry, drive, ya[:, 0], ya[:, 1])
    along = second if data.polarization == "TM" else first
    return p.tangential(y)[:, None] * along, p.normal(y) * scalar


class RecurrenceResiduals(BaseModel):
    """Relative residuals of the profile equations and trace conditions, per order"""

    interior: Tuple[float, float, float]
    normal: float
    trace: Tuple[float, float, float]
    decay: float

    def max(self) -> float:
        return max(*self.interior, self.normal, *self.trace, self.decay)


def _relative(residual: np.ndarray, scale: np.ndarray) -> float:
    size = float(np.max(np.abs(scale)))
    return float(np.max(np.abs(residual))) / size if size > 0 else float(np.max(np.abs(residual)))


def profile_recurrence_residual(
    profiles: Sequence[Profile],
    g: Geometry,
    d: DerivedParams,
    terms: Sequence[ExpansionTerm],
    angles: int = 32,
    depths: int = 64,
) -> RecurrenceResiduals:
    """
    Checks the closed-form profiles against the equations they solve on
    an ``angles x depths`` grid

    * ``d2 V_n - lambda^2 V_n = S_n`` with ``S_0 = S_1 = 0`` and
      ``S_2 = -2 (C - H) dV_1``
    * ``-lambda^2 v_2 = div(dV_1)``
    * ``dV_0(0) = 0`` and ``dV_n(0) = (alpha_minus / alpha_plus) curl H+_{n-1} x n``
    * decay of ``|V_n|`` like ``exp(-Re(lambda) Y3)`` up to the linear factor

    Derivatives are taken with respect to ``Y3``.
    """
    p = {profile.order: profile for profile in profiles}
    for order in (0, 1, 2):
        if order not in p:
            raise ParameterDomainError(f"Profile of order {order} is missing")
    drive = terms[0].solution.drive
    pol = drive.polarization
    lam = d.lambda_
    y = np.linspace(0.0, 8.0 / lam.real, depths)
    a = np.linspace(0.1, np.pi - 0.1, angles) if g.is_sphere else np.linspace(0, 2 * np.pi, angles)
    _, _, pattern = surface_patterns(g, drive, a, np.full(angles, 0.3))
    grid = np.abs(pattern)[:, None]

    k = tangent_component(g, pol, p[2].data.curvature.shifted(along_tangent(g, pol, 1.0)))
    sources = (np.zeros_like(y), np.zeros_like(y), -2 * k * p[1].tangential_dY(y))
    interior = tuple(
        _relative(
            grid * (p[n].tangential_dY2(y) - lam**2 * p[n].tangential(y) - sources[n]),
            grid * lam**2 * p[n].tangential(y),
        )
        for n in (0, 1, 2)
    )
    unit = along_tangent(g, pol, 1.0)
    div_dv1 = surface_divergence(g, p[1].data.mode_index, unit) * p[1].tangential_dY(y)
    normal = _relative(grid * (-(lam**2) * p[2].normal(y) - div_dv1), grid * div_dv1)

    trace = [abs(complex(p[0].tangential_dY(0.0)))]
    for n in (1, 2):
        expected = d.contrast * terms[n - 1].solution.traces("plus", g.r_sigma)[1]
        got = complex(p[n].tangential_dY(0.0))
        size = max(abs(expected), abs(got))
        trace.append(abs(got - expected) / size if size > 0 else 0.0)

    decay = 0.0
    for n in (1, 2):
        value = np.abs(p[n].tangential(y))
        _, q, _ = p[n].layer_coefficients()
        p0 = abs(complex(p[n].tangential(0.0)))
        bound = (p0 + abs(q) * y) * np.exp(-lam.real * y)
        excess = np.max(value - bound * (1 + 1e-12))
        decay = max(decay, float(excess) / p0 if p0 > 0 else 0.0, 0.0)
    return RecurrenceResiduals(
        interior=interior,  # type: ignore[arg-type]
        normal=normal,
        trace=tuple(trace),  # type: ignore[arg-type]
        decay=decay,
    )


def extra_condition_residual(profiles: Sequence[Profile], terms: Sequence[ExpansionTerm]) -> float:
    """
    Relative mismatch of ``v_2`` on Sigma against ``H+_0 . n`` on Sigma

    Vanishes identically for TM modes, where both are zero.
    """
    profile = _profile_of(profiles, 2)
    solution = terms[0].solution
    v2 = complex(profile.normal(0.0))
    h_dot_n = -solution.normal_coefficient("plus", solution.geometry.r_sigma)
    size = max(abs(v2), abs(h_dot_n))
    return abs(v2 - h_dot_n) / size if size > 0 else 0.0


def layer_breakpoints(eps: float, d: DerivedParams, cutoff: Cutoff) -> List[float]:
    """Depths ``c eps / Re(lambda)`` inside the cutoff support, for quadrature splitting"""
    points = [c * eps / d.lambda_.real for c in config.LAYER_BREAKPOINTS]
    return sorted(x for x in points if 0 < x < cutoff.d1)


class CompositeField(BaseModel):
    """
    Composite approximant of order ``order`` at contrast ``eps``

    Sum of ``eps^j H+_j`` in the outer region and of
    ``eps^j chi(y3) V_j(y_alpha, y3 / eps)`` in the inner region. Calling
    the instance samples ``H`` and ``curl H`` at Cartesian points, like
    :func:`muskin.modal.eval_field`. Inside the coordinate core the inner
    part is exactly zero.
    """

    order: int
    eps: float
    terms: List[ExpansionTerm]
    profiles: List[Profile]
    cutoff: Cutoff

    @property
    def geometry(self) -> Geometry:
        return self.terms[0].solution.geometry

    @property
    def drive(self) -> Drive:
        return self.terms[0].solution.drive

    def __call__(self, points: Any) -> Tuple[np.ndarray, np.ndarray]:
        g = self.geometry
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        r, a, b = polar(g, pts)
        if np.any(r > g.r_gamma * (1 + 1e-12)):
            raise ChartDomainError(f"Points must satisfy |x| <= {g.r_gamma}")
        h = np.zeros(pts.shape, dtype=complex)
        curl = np.zeros(pts.shape, dtype=complex)
        outer = r >= g.r_sigma
        if np.any(outer):
            for term in self.terms[: self.order + 1]:
                th, tc = eval_field(term.solution, pts[outer], side="plus")
                h[outer] += self.eps**term.order * th
                curl[outer] += self.eps**term.order * tc
        inner = ~outer & (r >= g.chart_floor)
        if np.any(inner):
            local_h, local_curl = self._inner_local(r[inner], a[inner], b[inner])
            frames = frame(g, a[inner], b[inner])
            h[inner] = to_cartesian(frames, local_h)
            curl[inner] = to_cartesian(frames, local_curl)
        return h, curl

    def _layer_sums(self, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Tangential sum ``S``, its ``r``-derivative and the normal sum ``N``"""
        g, eps = self.geometry, self.eps
        y3 = g.r_sigma - r
        big_y = y3 / eps
        chi, dchi, _ = cutoff_chi(self.cutoff, y3)
        s_sum = np.zeros(r.shape, dtype=complex)
        ds_sum = np.zeros(r.shape, dtype=complex)
        n_sum = np.zeros(r.shape, dtype=complex)
        for profile in self.profiles[1 : self.order + 1]:
            w = eps**profile.order
            s = profile.tangential(big_y)
            s_sum += w * chi * s
            ds_sum -= w * (dchi * s + chi * profile.tangential_dY(big_y) / eps)
            n_sum += w * chi * profile.normal(big_y)
        return s_sum, ds_sum, n_sum

    def _inner_local(
        self, r: np.ndarray, a: np.ndarray, b: np.ndarray
    ) -> Tuple[np.ndarray, np.ndarray]:
        g, drive = self.geometry, self.drive
        rs = g.r_sigma
        s, ds, nn = self._layer_sums(r)
        y, y_theta, y_msin = harmonic(g, drive.mode, drive.degree, a, b)
        h = np.zeros(r.shape + (3,), dtype=complex)
        curl = np.zeros(r.shape + (3,), dtype=complex)
        m = drive.mode
        if not g.is_sphere:
            if drive.polarization == "TM":
                h[:, 2] = s * y
                curl[:, 0] = 1j * m / r * s * y
                curl[:, 1] = -ds * y
            else:
                h[:, 0] = -nn * y
                h[:, 1] = rs / r * s * y
                curl[:, 2] = (rs * ds + 1j * m * nn) / r * y
            return h, curl
        n = drive.degree
        tangential = rs / r * s
        if drive.polarization == "TM":
            h[:, 1], h[:, 2] = -tangential * y_msin, tangential * y_theta
            curl[:, 0] = -n * (n + 1) * rs * s / r**2 * y
            curl[:, 1], curl[:, 2] = -(rs * ds / r) * y_theta, -(rs * ds / r) * y_msin
        else:
            h[:, 0] = -nn * y
            h[:, 1], h[:, 2] = tangential * y_theta, tangential * y_msin
            c = (rs * ds + nn) / r
            curl[:, 1], curl[:, 2] = -c * y_msin, c * y_theta
        return h, curl

    class Config:
        arbitrary_types_allowed = True


def composite_approx(
    order: int,
    eps: float,
    terms: Sequence[ExpansionTerm],
    profiles: Sequence[Profile],
    cutoff: Cutoff,
) -> CompositeField:
    """
    Builds the composite approximant of order ``order``

    Parameters
    ----------
    order: int
        0, 1 or 2
    eps: float
        Contrast parameter in ``(0, 1]``
    terms, profiles:
        As returned by :func:`expand`, at least up to ``order``
    cutoff: :class:`muskin.geometry.Cutoff`

    Returns
    -------
    :class:`CompositeField`
        Callable mapping ``(N, 3)`` points to ``(H, curl H)``
    """
    _check_order(order)
    if not 0 < eps <= 1:
        raise ParameterDomainError(f"eps must lie in (0, 1], got {eps}")
    if len(terms) <= order or len(profiles) <= order:
        raise ParameterDomainError(f"Terms and profiles up to order {order} are needed")
    g = terms[0].solution.geometry
    cutoff.check(g)
    return CompositeField(
        order=order, eps=eps, terms=list(terms), profiles=list(profiles), cutoff=cutoff
    )


def expansion_summary(terms: Sequence[ExpansionTerm], d: DerivedParams) -> Dict[str, complex]:
    """Surface currents ``j_k`` along the polarization tangent, keyed ``j0``, ``j1``, ``j2``"""
    out = {}
    for term in terms:
        g = term.solution.geometry
        pol = term.solution.drive.polarization
        out[f"j{term.order}"] = tangent_component(g, pol, trace_jk(term, d))
    return out
