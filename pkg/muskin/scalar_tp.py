"""
Scalar transmission problem with a surface source on Sigma.

Find ``phi`` with ``phi = 0`` on Gamma, harmonic in both regions,
continuous across Sigma, and with the flux jump::

    a_minus d_r phi_minus - a_plus d_r phi_plus = (a_minus - a_plus) g

on Sigma. ``g`` must have zero mean. Each surface harmonic of ``g``
gives a 2x2 system for the coefficients of ``r^M`` inside and of the
combination of ``r^-M`` and ``r^M`` (cylinder) or ``r^-(n+1)`` and ``r^n``
(sphere) outside that vanishes on Gamma.
"""

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from pydantic import BaseModel

from muskin import config
from muskin.analysis import surface_norm
from muskin.errors import CompatibilityError, ConditioningError, ParameterDomainError
from muskin.geometry import Geometry, SurfaceField, SurfaceMode


logger = logging.getLogger(__name__)

# (coefficient, power) pairs of a radial function
PowerSum = List[Tuple[float, float]]


class ScalarProblem(BaseModel):
    """
    Coefficients and surface source of one scalar transmission problem

    Example
    -------
    ::

        g = make_geometry()
        p = ScalarProblem(a_plus=1, a_minus=10, g=SurfaceField.cosine(g))
        s = solve_scalar(p)
        print(scalar_norms(s).spectral)

    """

    a_plus: complex
    a_minus: complex
    g: SurfaceField

    @property
    def geometry(self) -> Geometry:
        return self.g.geometry

    class Config:
        frozen = True


class ScalarMode(BaseModel):
    """Coefficients of one harmonic: ``inner * r^M`` and ``outer * h(r)``"""

    mode: SurfaceMode
    inner: complex
    outer: complex
    condition: float

    class Config:
        frozen = True


class ScalarSolution(BaseModel):
    problem: ScalarProblem
    modes: List[ScalarMode]

    @property
    def geometry(self) -> Geometry:
        return self.problem.geometry

    def radial_powers(self, mode: SurfaceMode) -> Tuple[PowerSum, PowerSum]:
        return _inner_powers(self.geometry, mode), _outer_powers(self.geometry, mode)

    def trace(self) -> SurfaceField:
        """``phi`` on Sigma as surface data"""
        g = self.geometry
        return SurfaceField(
            geometry=g,
            modes=[
                m.mode.model_copy(
                    update={"coefficient": m.inner * _evaluate(_inner_powers(g, m.mode), g.r_sigma)}
                )
                for m in self.modes
            ],
        )

    def flux_residuals(self) -> List[float]:
        """Relative residual of the continuity and flux-jump conditions, per mode"""
        p = self.problem
        g = self.geometry
        rs = g.r_sigma
        out = []
        for m in self.modes:
            inner, outer = self.radial_powers(m.mode)
            jump = m.inner * _evaluate(inner, rs) - m.outer * _evaluate(outer, rs)
            flux = (
                p.a_minus * m.inner * _evaluate(_derivative(inner), rs)
                - p.a_plus * m.outer * _evaluate(_derivative(outer), rs)
            )
            forcing = (p.a_minus - p.a_plus) * m.mode.coefficient
            size = max(abs(forcing), abs(p.a_minus * m.inner), abs(p.a_plus * m.outer), 1e-300)
            out.append((abs(jump) + abs(flux - forcing)) / size)
        return out

    def gamma_trace(self) -> float:
        """Largest modulus of ``phi`` on Gamma over all modes"""
        g = self.geometry
        return max(
            (abs(m.outer * _evaluate(_outer_powers(g, m.mode), g.r_gamma)) for m in self.modes),
            default=0.0,
        )

    class Config:
        frozen = True


def _inner_powers(g: Geometry, mode: SurfaceMode) -> PowerSum:
    return [(1.0, float(abs(mode.index)))]


def _outer_powers(g: Geometry, mode: SurfaceMode) -> PowerSum:
    """Decaying minus growing power, combined to vanish on Gamma"""
    rg = g.r_gamma
    if g.is_sphere:
        n = mode.index
        return [(1.0, -(n + 1.0)), (-(rg ** (-(2 * n + 1.0))), float(n))]
    m = abs(mode.index)
    return [(1.0, -float(m)), (-(rg ** (-2.0 * m)), float(m))]


def _evaluate(terms: PowerSum, r: float) -> float:
    return sum(c * r**q for c, q in terms)


def _derivative(terms: PowerSum) -> PowerSum:
    return [(c * q, q - 1) for c, q in terms if q != 0]


def _power_integral(q: float, r0: float, r1: float) -> float:
    """``int_r0^r1 r^q dr``"""
    if q == -1:
        return math.log(r1 / r0)
    return (r1 ** (q + 1) - r0 ** (q + 1)) / (q + 1)


def radial_integral(terms: PowerSum, weight: float, r0: float, r1: float) -> float:
    """``int_r0^r1 h(r)^2 r^weight dr`` for a real power sum ``h``"""
    return sum(
        ci * cj * _power_integral(qi + qj + weight, r0, r1) for ci, qi in terms for cj, qj in terms
    )


def check_compatibility(g: SurfaceField) -> None:
    """
    Raises
    ------
    CompatibilityError
        If the surface data has a nonzero mean
    """
    size = math.sqrt(sum(abs(m.coefficient) ** 2 for m in g.modes))
    for mode in g.modes:
        if mode.index == 0 and abs(mode.coefficient) > 1e-14 * max(size, 1.0):
            raise CompatibilityError(
                f"Surface data must have zero mean, found mode-0 coefficient {mode.coefficient}"
            )


def solve_scalar(p: ScalarProblem) -> ScalarSolution:
    """
    Solves the scalar transmission problem mode by mode

    Parameters
    ----------
    p: :class:`ScalarProblem`

    Returns
    -------
    :class:`ScalarSolution`

    Raises
    ------
    CompatibilityError
        If ``g`` has a nonzero mean
    ParameterDomainError
        If ``a_plus`` is zero
    ConditioningError
        If a modal system is singular
    """
    if p.a_plus == 0:
        raise ParameterDomainError("a_plus must be nonzero")
    check_compatibility(p.g)
    g = p.geometry
    rs = g.r_sigma
    modes = []
    for mode in p.g.modes:
        if mode.index == 0:
            continue
        inner = _inner_powers(g, mode)
        outer = _outer_powers(g, mode)
        matrix = np.array(
            [
                [_evaluate(inner, rs), -_evaluate(outer, rs)],
                [
                    p.a_minus * _evaluate(_derivative(inner), rs),
                    -p.a_plus * _evaluate(_derivative(outer), rs),
                ],
            ],
            dtype=complex,
        )
        rhs = np.array([0.0, (p.a_minus - p.a_plus) * mode.coefficient], dtype=complex)
        scale = np.max(np.abs(matrix), axis=1)
        matrix, rhs = matrix / scale[:, None], rhs / scale
        condition = float(np.linalg.cond(matrix))
        if not np.isfinite(condition) or condition > config.CONDITION_LIMIT:
            raise ConditioningError(
                f"Scalar system for mode {mode.index} is singular (condition {condition:.3e})",
                mode=mode.index,
                condition=condition,
            )
        x = np.linalg.solve(matrix, rhs)
        modes.append(ScalarMode(mode=mode, inner=x[0], outer=x[1], condition=condition))
    return ScalarSolution(problem=p, modes=modes)


class ScalarNorms(BaseModel):
    """
    Norms of a scalar solution

    ``spectral`` combines the ``s = 3/2`` spectral norm of the trace on
    Sigma with the exact piecewise ``H1`` seminorm. It is equivalent to,
    not equal to, the sum of the piecewise ``H^{3/2}`` norms.
    """

    l2_minus: float
    l2_plus: float
    grad_minus: float
    grad_plus: float
    trace: float
    source: float

    @property
    def h1_minus(self) -> float:
        return math.hypot(self.l2_minus, self.grad_minus)

    @property
    def h1_plus(self) -> float:
        return math.hypot(self.l2_plus, self.grad_plus)

    @property
    def spectral(self) -> float:
        return math.sqrt(self.trace**2 + self.grad_minus**2 + self.grad_plus**2)


def scalar_norms(s: ScalarSolution) -> ScalarNorms:
    """
    Closed-form L2 and H1 norms of a scalar solution in both regions,
    the spectral trace norm and ``||g||`` on Sigma
    """
    g = s.geometry
    rs, rg = g.r_sigma, g.r_gamma
    # r-weight of the volume element and angular measure of a unit harmonic
    weight, angular = (2.0, 1.0) if g.is_sphere else (1.0, 2 * math.pi)
    sums = np.zeros(4)
    for m in s.modes:
        inner, outer = s.radial_powers(m.mode)
        lam = s.problem.g.eigenvalue(m.mode)
        parts = (
            (abs(m.inner) ** 2, inner, 0.0, rs),
            (abs(m.outer) ** 2, outer, rs, rg),
        )
        for i, (size, terms, r0, r1) in enumerate(parts):
            value = radial_integral(terms, weight, r0, r1)
            grad = radial_integral(_derivative(terms), weight, r0, r1) + lam * radial_integral(
                terms, weight - 2, r0, r1
            )
            sums[i] += angular * size * value
            sums[2 + i] += angular * size * grad
    l2_minus, l2_plus, grad_minus, grad_plus = np.sqrt(np.maximum(sums, 0.0))
    return ScalarNorms(
        l2_minus=l2_minus,
        l2_plus=l2_plus,
        grad_minus=grad_minus,
        grad_plus=grad_plus,
        trace=surface_norm(s.trace(), 1.5),
        source=surface_norm(s.problem.g, 0.0),
    )


class ScalarSweepRow(BaseModel):
    ratio: complex
    h1_minus: float
    h1_plus: float
    spectral: float
    source: float
    max_condition: float

    @property
    def quotient(self) -> float:
        return (self.h1_minus + self.h1_plus) / self.source if self.source else 0.0


class ScalarSweep(BaseModel):
    """Norms of the scalar problem over a sweep of contrasts ``a_minus / a_plus``"""

    rows: List[ScalarSweepRow]
    saturation: float = 2.0
    """Allowed ratio of the largest quotient to the one at the largest contrast"""

    def bounded(self) -> bool:
        """
        Uniform boundedness verdict over contrasts with modulus at least 10:
        every quotient is finite and within ``saturation`` of the quotient
        at the largest contrast
        """
        rows = sorted((r for r in self.rows if abs(r.ratio) >= 10), key=lambda r: abs(r.ratio))
        if not rows:
            return True
        values = [r.quotient for r in rows]
        if not all(math.isfinite(v) for v in values):
            return False
        return max(values) <= self.saturation * values[-1]

    def rho0(self) -> float:
        """Smallest swept contrast modulus whose modal systems stayed well-conditioned"""
        good = [abs(r.ratio) for r in self.rows if r.max_condition <= config.CONDITION_LIMIT]
        return min(good) if good else math.inf

    def to_dataframe(self) -> pd.DataFrame:
        data: dict = {
            "ratio_re": [],
            "ratio_im": [],
            "h1_minus": [],
            "h1_plus": [],
            "spectral": [],
            "norm_g": [],
            "quotient": [],
        }
        for row in self.rows:
            data["ratio_re"].append(row.ratio.real)
            data["ratio_im"].append(row.ratio.imag)
            data["h1_minus"].append(row.h1_minus)
            data["h1_plus"].append(row.h1_plus)
            data["spectral"].append(row.spectral)
            data["norm_g"].append(row.source)
            data["quotient"].append(row.quotient)
        return pd.DataFrame(data)


def uniform_sweep(
    g: Geometry,
    ratios: Sequence[complex],
    data: Optional[SurfaceField] = None,
    a_plus: complex = 1.0,
) -> ScalarSweep:
    """
    Solves the scalar problem for every contrast ``a_minus / a_plus`` in
    ``ratios``

    Parameters
    ----------
    g: :class:`muskin.geometry.Geometry`
    ratios: list of complex
        Contrasts, complex values allowed
    data: :class:`muskin.geometry.SurfaceField`, default ``cos(theta)``
    a_plus: complex
        Outer coefficient

    Returns
    -------
    :class:`ScalarSweep`
    """
    source = data if data is not None else SurfaceField.cosine(g)
    rows = []
    for ratio in ratios:
        p = ScalarProblem(a_plus=a_plus, a_minus=a_plus * ratio, g=source)
        try:
            s = solve_scalar(p)
        except ConditioningError as err:
            logger.warning("Scalar problem at ratio %s is singular: %s", ratio, err)
            rows.append(
                ScalarSweepRow(
                    ratio=ratio,
                    h1_minus=math.inf,
                    h1_plus=math.inf,
                    spectral=math.inf,
                    source=surface_norm(source, 0.0),
                    max_condition=math.inf,
                )
            )
            continue
        norms = scalar_norms(s)
        rows.append(
            ScalarSweepRow(
                ratio=ratio,
                h1_minus=norms.h1_minus,
                h1_plus=norms.h1_plus,
                spectral=norms.spectral,
                source=norms.source,
                max_condition=max((m.condition for m in s.modes), default=1.0),
            )
        )
        logger.debug("Scalar ratio %s: spectral norm %.6e", ratio, norms.spectral)
    return ScalarSweep(rows=rows)
