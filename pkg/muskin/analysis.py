"""
Norms over the regions of the geometry, remainders of composite
approximants, convergence-rate fits and the energy checks of exact
solutions.

All volume integrals use a tensor-product rule: Gauss-Legendre in ``r``
on every segment between the radial splits, the periodic trapezoid rule
in the azimuth and, on the sphere, Gauss-Legendre in ``cos(theta)``.
Every integral is computed twice, the second time with all node counts
doubled, and the finer value is returned when both agree.
"""

import json
import logging
import math
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, computed_field
from scipy import stats

from muskin import config
from muskin.asymptotics import CompositeField, layer_breakpoints
from muskin.errors import AccuracyError, ParameterDomainError
from muskin.geometry import Geometry, SurfaceField
from muskin.media import MediaParams, Side, stability_constants
from muskin.modal import Drive, ModalSolution, current, eval_field, recover_E


logger = logging.getLogger(__name__)

FieldValues = Union[np.ndarray, Tuple[np.ndarray, np.ndarray]]
FieldEvaluator = Callable[[np.ndarray], FieldValues]


class QuadratureRule(BaseModel):
    """Node counts and refinement tolerance of the region quadrature"""

    radial_order: int = config.RADIAL_ORDER
    """Gauss-Legendre nodes per radial segment"""

    angular_min: int = config.ANGULAR_MIN
    """Smallest number of nodes per angular direction"""

    angular_per_mode: int = config.ANGULAR_PER_MODE
    """Nodes per unit of mode index in each angular direction"""

    tol: float = config.QUADRATURE_TOL
    """Largest accepted relative change between the two refinement levels"""

    def angular(self, index: int) -> int:
        return max(self.angular_min, self.angular_per_mode * abs(index))

    class Config:
        frozen = True


def region_bounds(g: Geometry, region: Side) -> Tuple[float, float]:
    if region == "minus":
        return 0.0, g.r_sigma
    return g.r_sigma, g.r_gamma


def region_grid(
    g: Geometry,
    region: Side,
    splits: Sequence[float] = (),
    rule: Optional[QuadratureRule] = None,
    mode: int = 0,
    degree: int = 0,
    refine: int = 1,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Quadrature points and weights of one region

    Parameters
    ----------
    g: :class:`muskin.geometry.Geometry`
    region: str
        ``minus`` (inside Sigma) or ``plus`` (between Sigma and Gamma)
    splits: list of float
        Radii where the integrand is not smooth. Radii outside the region
        are ignored.
    rule: :class:`QuadratureRule`
    mode: int
        Azimuthal index, sets the angular node count
    degree: int
        Degree of the spherical harmonic, sets the polar node count
    refine: int
        Multiplier of every node count

    Returns
    -------
    tuple of numpy arrays
        ``(N, 3)`` Cartesian points and ``(N,)`` weights. On the cylinder
        the weights integrate over the cross-section.
    """
    rule = rule or QuadratureRule()
    lo, hi = region_bounds(g, region)
    edges = sorted({lo, hi} | {float(x) for x in splits if lo < x < hi})
    x, w = np.polynomial.legendre.leggauss(rule.radial_order * refine)
    radii, radial_weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        radii.append(0.5 * (b - a) * x + 0.5 * (b + a))
        radial_weights.append(0.5 * (b - a) * w)
    r = np.concatenate(radii)
    wr = np.concatenate(radial_weights)

    n_phi = rule.angular(mode) * refine
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    w_phi = np.full(n_phi, 2 * math.pi / n_phi)

    if not g.is_sphere:
        rr, pp = np.meshgrid(r, phi, indexing="ij")
        weights = np.outer(wr * r, w_phi).ravel()
        points = np.stack(
            [(rr * np.cos(pp)).ravel(), (rr * np.sin(pp)).ravel(), np.zeros(rr.size)], axis=1
        )
        return points, weights

    cos_t, w_t = np.polynomial.legendre.leggauss(rule.angular(max(degree, mode)) * refine)
    sin_t = np.sqrt(1 - cos_t**2)
    rr, tt, pp = np.meshgrid(r, np.arange(cos_t.size), phi, indexing="ij")
    st, ct = sin_t[tt], cos_t[tt]
    points = np.stack(
        [(rr * st * np.cos(pp)).ravel(), (rr * st * np.sin(pp)).ravel(), (rr * ct).ravel()],
        axis=1,
    )
    weights = np.einsum("i,j,k->ijk", wr * r**2, w_t, w_phi).ravel()
    return points, weights


def region_integral(
    integrand: Callable[[np.ndarray], np.ndarray],
    g: Geometry,
    region: Side,
    splits: Sequence[float] = (),
    rule: Optional[QuadratureRule] = None,
    mode: int = 0,
    degree: int = 0,
) -> np.ndarray:
    """
    Integrates ``integrand`` over a region at two refinement levels

    ``integrand`` maps ``(N, 3)`` points to ``(N, k)`` values; the
    result has shape ``(k,)``.

    Raises
    ------
    AccuracyError
        If the two levels disagree by more than ``rule.tol`` relative
    """
    rule = rule or QuadratureRule()
    levels = []
    for refine in (1, 2):
        points, weights = region_grid(g, region, splits, rule, mode, degree, refine)
        values = np.asarray(integrand(points))
        values = values.reshape(len(points), -1)
        levels.append(weights @ values)
    coarse, fine = levels
    scale = np.maximum(np.abs(fine), np.finfo(float).tiny)
    change = float(np.max(np.abs(fine - coarse) / scale))
    if change > rule.tol:
        raise AccuracyError(
            f"Quadrature over the {region} region did not converge"
            f" (relative change {change:.3e})",
            achieved=change,
        )
    return fine


def _split_values(values: FieldValues) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    if isinstance(values, tuple):
        return values[0], values[1]
    return values, None


def region_norms(
    field: FieldEvaluator,
    g: Geometry,
    region: Side,
    splits: Sequence[float] = (),
    rule: Optional[QuadratureRule] = None,
    mode: int = 0,
    degree: int = 0,
) -> Tuple[float, float]:
    """
    ``L2`` norms of a field and of its curl over a region

    ``field`` maps points to ``(H, curl H)`` like
    :func:`muskin.modal.eval_field`. A field evaluator that returns a single
    array has a zero curl norm.
    """

    def squares(points: np.ndarray) -> np.ndarray:
        value, curl = _split_values(field(points))
        out = np.zeros((len(points), 2))
        out[:, 0] = np.sum(np.abs(value) ** 2, axis=1)
        if curl is not None:
            out[:, 1] = np.sum(np.abs(curl) ** 2, axis=1)
        return out

    integral = region_integral(squares, g, region, splits, rule, mode, degree)
    value, curl = np.sqrt(np.maximum(integral.real, 0.0))
    return float(value), float(curl)


def region_norm(
    field: FieldEvaluator,
    g: Geometry,
    region: Side,
    kind: str = "L2",
    splits: Sequence[float] = (),
    rule: Optional[QuadratureRule] = None,
    mode: int = 0,
    degree: int = 0,
) -> float:
    """
    ``L2`` norm (``kind="L2"``) or curl seminorm (``kind="curl"``) of a
    field over a region

    Parameters
    ----------
    field: callable
        Maps ``(N, 3)`` points to ``(H, curl H)`` or to a single array
    g: :class:`muskin.geometry.Geometry`
    region: str
        ``minus`` or ``plus``
    kind: str
        ``L2`` or ``curl``
    splits, rule, mode, degree:
        See :func:`region_grid`

    Returns
    -------
    float
    """
    if kind not in ("L2", "curl"):
        raise ParameterDomainError(f"Unknown norm kind {kind}")
    value, curl = region_norms(field, g, region, splits, rule, mode, degree)
    return value if kind == "L2" else curl


def surface_norm(field: SurfaceField, s: float) -> float:
    """
    Spectral Sobolev norm of order ``s`` of surface data on Sigma

    ``(sum (1 + lambda)^s |c|^2)^(1/2)`` over the harmonics, times the
    norm of a unit basis function (``sqrt(2 pi R)`` on the cylinder,
    ``R`` on the sphere).
    """
    total = sum((1 + field.eigenvalue(m)) ** s * abs(m.coefficient) ** 2 for m in field.modes)
    return math.sqrt(total * field.measure())


def solution_splits(s: ModalSolution) -> List[float]:
    """
    Radii where an exact solution is not smooth or changes on the
    boundary-layer scale: Sigma, the shell support and the depths
    ``c eps / Re(lambda)`` below Sigma
    """
    g, d = s.geometry, s.derived
    out = [g.r_sigma]
    if s.drive.support is not None:
        out.extend(s.drive.support)
    width = d.eps / d.lambda_.real
    out.extend(g.r_sigma - c * width for c in config.LAYER_BREAKPOINTS if c * width < g.r_sigma)
    return out


def _angular(drive: Drive) -> Dict[str, int]:
    return {"mode": drive.mode, "degree": drive.degree}


class RemainderRecord(BaseModel):
    """
    Norms of the remainder of a composite approximant

    ``combined`` is ``norm_plus + curl_plus + eps^-1/2 norm_minus +
    eps^1/2 curl_minus``.
    """

    order: int
    eps: float
    norm_plus: float
    curl_plus: float
    norm_minus: float
    curl_minus: float

    @computed_field  # type: ignore[misc]
    @property
    def combined(self) -> float:
        return (
            self.norm_plus
            + self.curl_plus
            + self.norm_minus / math.sqrt(self.eps)
            + math.sqrt(self.eps) * self.curl_minus
        )

    class Config:
        frozen = True


def remainder(
    exact: ModalSolution, approx: CompositeField, rule: Optional[QuadratureRule] = None
) -> RemainderRecord:
    """
    Remainder norms of ``approx`` against the exact solution

    Parameters
    ----------
    exact: :class:`muskin.modal.ModalSolution`
        Solved at ``mu_r = eps^-2``
    approx: :class:`muskin.asymptotics.CompositeField`
        Built from the same geometry, media and drive
    rule: :class:`QuadratureRule`

    Returns
    -------
    :class:`RemainderRecord`

    Raises
    ------
    ParameterDomainError
        If the exact solution does not belong to ``approx.eps``
    AccuracyError
        If the quadrature does not converge
    """
    eps = approx.eps
    if abs(exact.media.mu_r * eps**2 - 1) > 1e-12:
        raise ParameterDomainError(
            f"Exact solution has mu_r={exact.media.mu_r}, approximant eps={eps}"
        )
    g = exact.geometry
    rs = g.r_sigma
    cutoff = approx.cutoff

    def difference(points: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        h, curl = eval_field(exact, points)
        ah, acurl = approx(points)
        return h - ah, curl - acurl

    depths = [cutoff.d0, cutoff.d1] + layer_breakpoints(eps, exact.derived, cutoff)
    inner_splits = [rs - y for y in depths] + [g.chart_floor]
    angular = _angular(exact.drive)
    norm_plus, curl_plus = region_norms(
        difference, g, "plus", solution_splits(exact), rule, **angular
    )
    norm_minus, curl_minus = region_norms(difference, g, "minus", inner_splits, rule, **angular)
    record = RemainderRecord(
        order=approx.order,
        eps=eps,
        norm_plus=norm_plus,
        curl_plus=curl_plus,
        norm_minus=norm_minus,
        curl_minus=curl_minus,
    )
    logger.debug("Remainder order %d at eps=%s: %.6e", record.order, eps, record.combined)
    return record


class RateFit(BaseModel):
    """Least-squares line through ``(log x, log y)`` or ``(x, log y)``"""

    slope: float
    intercept: float
    residual: float
    """Largest absolute residual of the fitted line"""

    ci_low: float
    ci_high: float
    """95% confidence interval of the slope"""

    points: int

    def within(self, expected: float, tol: float) -> bool:
        return abs(self.slope - expected) <= tol

    class Config:
        frozen = True


def _line_fit(x: np.ndarray, y: np.ndarray) -> RateFit:
    fit = stats.linregress(x, y)
    residual = float(np.max(np.abs(y - (fit.intercept + fit.slope * x))))
    if len(x) > 2:
        half = float(stats.t.ppf(0.975, len(x) - 2) * fit.stderr)
    else:
        half = math.inf
    return RateFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        residual=residual,
        ci_low=float(fit.slope) - half,
        ci_high=float(fit.slope) + half,
        points=len(x),
    )


def fit_rate(eps_list: Sequence[float], values: Sequence[float]) -> RateFit:
    """
    Empirical convergence order: slope of ``log(value)`` against ``log(eps)``

    Parameters
    ----------
    eps_list: list of float
        At least three strictly decreasing positive values
    values: list of float
        Positive values, one per ``eps``

    Returns
    -------
    :class:`RateFit`

    Raises
    ------
    ParameterDomainError
        For fewer than three points, a non-decreasing ``eps`` sequence or
        nonpositive values
    """
    eps = np.asarray(eps_list, dtype=float)
    y = np.asarray(values, dtype=float)
    if eps.size < 3 or eps.size != y.size:
        raise ParameterDomainError("A rate fit needs at least three (eps, value) pairs")
    if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
        raise ParameterDomainError("eps values must be positive and strictly decreasing")
    if np.any(y <= 0) or not np.all(np.isfinite(y)):
        raise ParameterDomainError("Values of a rate fit must be positive")
    return _line_fit(np.log(eps), np.log(y))


def fit_decay(depths: Sequence[float], values: Sequence[complex]) -> RateFit:
    """
    Exponential decay fit: slope of ``log|value|`` against depth

    The decay rate is ``-slope``.
    """
    x = np.asarray(depths, dtype=float)
    y = np.abs(np.asarray(values))
    if x.size < 3 or x.size != y.size:
        raise ParameterDomainError("A decay fit needs at least three (depth, value) pairs")
    if np.any(y <= 0):
        raise ParameterDomainError("Values of a decay fit must be nonzero")
    return _line_fit(x, np.log(y))


class ConvergenceReport(BaseModel):
    """
    Remainder norms of one drive over an ``eps`` sweep, with a rate fit per
    approximation order

    Serializes to JSON with :meth:`to_json` and back with
    :meth:`from_json`.
    """

    geometry: Geometry
    media: MediaParams
    drive: Drive
    records: List[RemainderRecord]
    fits: Dict[int, RateFit]
    slope_tol: float = config.SLOPE_TOL

    def expected(self, order: int) -> float:
        return order + 1.0

    def passed(self, order: int) -> bool:
        return self.fits[order].within(self.expected(order), self.slope_tol)

    def verdicts(self) -> Dict[str, bool]:
        return {f"rate_m{order}": self.passed(order) for order in sorted(self.fits)}

    def to_dataframe(self) -> pd.DataFrame:
        data: Dict[str, list] = {
            "eps": [],
            "m": [],
            "norm_Rplus_L2": [],
            "norm_curlRplus_L2": [],
            "norm_Rminus_L2": [],
            "norm_curlRminus_L2": [],
            "combined": [],
        }
        for record in self.records:
            data["eps"].append(record.eps)
            data["m"].append(record.order)
            data["norm_Rplus_L2"].append(record.norm_plus)
            data["norm_curlRplus_L2"].append(record.curl_plus)
            data["norm_Rminus_L2"].append(record.norm_minus)
            data["norm_curlRminus_L2"].append(record.curl_minus)
            data["combined"].append(record.combined)
        return pd.DataFrame(data)

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "ConvergenceReport":
        return cls.model_validate_json(text)

    class Config:
        frozen = True


def convergence_report(
    geometry: Geometry,
    media: MediaParams,
    drive: Drive,
    records: Sequence[RemainderRecord],
    slope_tol: float = config.SLOPE_TOL,
    points: int = config.RATE_POINTS,
) -> ConvergenceReport:
    """
    Fits the rate of every order on its ``points`` smallest ``eps`` values

    Records are sorted by order and decreasing ``eps``.
    """
    ordered = sorted(records, key=lambda r: (r.order, -r.eps))
    fits = {}
    for order in sorted({r.order for r in ordered}):
        chosen = [r for r in ordered if r.order == order][-points:]
        fits[order] = fit_rate([r.eps for r in chosen], [r.combined for r in chosen])
        if not fits[order].within(order + 1.0, slope_tol):
            logger.warning(
                "Rate of order %d is %.3f, expected %d", order, fits[order].slope, order + 1
            )
    return ConvergenceReport(
        geometry=geometry,
        media=media,
        drive=drive,
        records=ordered,
        fits=fits,
        slope_tol=slope_tol,
    )


class FieldNorms(BaseModel):
    """Norms of an exact solution and its source over the whole domain"""

    norm_h: float
    norm_e: float
    norm_h_minus: float
    norm_curl: float
    norm_j: float

    class Config:
        frozen = True


def field_norms(s: ModalSolution, rule: Optional[QuadratureRule] = None) -> FieldNorms:
    """``||H||``, ``||E||``, ``||curl H||`` and ``||j||`` over the domain and ``||H||`` inside"""
    g = s.geometry
    angular = _angular(s.drive)
    splits = solution_splits(s)
    parts = {}
    for region in ("minus", "plus"):

        def squares(points: np.ndarray, side: Side = region) -> np.ndarray:  # type: ignore
            h, curl = eval_field(s, points, side)
            e = recover_E(s, points, side)
            j = current(s, points)
            return np.stack(
                [np.sum(np.abs(v) ** 2, axis=1) for v in (h, e, curl, j)],
                axis=1,
            )

        integral = region_integral(squares, g, region, splits, rule, **angular)  # type: ignore
        parts[region] = integral.real
    total = np.sqrt(np.maximum(parts["minus"] + parts["plus"], 0.0))
    return FieldNorms(
        norm_h=total[0],
        norm_e=total[1],
        norm_h_minus=math.sqrt(max(parts["minus"][0], 0.0)),
        norm_curl=total[2],
        norm_j=total[3],
    )


class StabilityBounds(BaseModel):
    """The uniform energy bounds of one exact solution, measured and predicted"""

    m: float
    c1: float
    c2: float
    norms: FieldNorms
    mu_minus: float

    @property
    def curl_ratio(self) -> float:
        """``||curl H|| / ||j||``, at most ``c1``"""
        return self.norms.norm_curl / self.norms.norm_j

    @property
    def interior_ratio(self) -> float:
        """``sqrt(mu_minus) ||H||_minus / ||j||``, at most ``c2``"""
        return math.sqrt(self.mu_minus) * self.norms.norm_h_minus / self.norms.norm_j

    def holds(self) -> bool:
        return self.curl_ratio <= self.c1 and self.interior_ratio <= self.c2

    class Config:
        frozen = True


def stability_bounds(s: ModalSolution, rule: Optional[QuadratureRule] = None) -> StabilityBounds:
    """
    Measures ``||curl H|| / ||j||`` and ``sqrt(mu_minus) ||H||_minus / ||j||``
    for a shell-current solution

    Raises
    ------
    ParameterDomainError
        If the drive carries no volume current
    """
    if s.drive.kind != "ShellCurrent":
        raise ParameterDomainError("Stability bounds need a ShellCurrent drive")
    m, c1, c2 = stability_constants(s.media)
    return StabilityBounds(
        m=m, c1=c1, c2=c2, norms=field_norms(s, rule), mu_minus=s.media.mu_minus
    )


def energy_balance(s: ModalSolution, rule: Optional[QuadratureRule] = None) -> float:
    """
    Relative mismatch of the energy identity of a shell-current solution::

        int a^-1 |curl H|^2 + i omega mu |H|^2 = int a^-1 j . conj(curl H)

    with ``a = i omega eps0 - sigma`` taken region by region.
    """
    g, d = s.geometry, s.derived
    p = d.media
    angular = _angular(s.drive)
    splits = solution_splits(s)
    lhs, rhs = 0j, 0j
    for region in ("minus", "plus"):
        factor = d.impedance_factor(region)  # type: ignore[arg-type]
        iwmu = 1j * p.omega * p.mu(region)  # type: ignore[arg-type]

        def integrand(points: np.ndarray, side: Side = region) -> np.ndarray:  # type: ignore
            h, curl = eval_field(s, points, side)
            j = current(s, points)
            energy = factor * np.sum(np.abs(curl) ** 2, axis=1) + iwmu * np.sum(
                np.abs(h) ** 2, axis=1
            )
            work = factor * np.sum(j * np.conj(curl), axis=1)
            return np.stack([energy, work], axis=1)

        left, right = region_integral(integrand, g, region, splits, rule, **angular)  # type: ignore
        lhs += left
        rhs += right
    size = max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) / size if size > 0 else 0.0


def divergence_residual(s: ModalSolution, points: np.ndarray, step: float = 1e-5) -> float:
    """
    Central-difference ``div(mu H)`` at sample points, relative to the
    largest ``|mu curl H|``

    Each point is differenced with the representation of its own region,
    so stencils may straddle Sigma.
    """
    g = s.geometry
    p = s.media
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    r = np.linalg.norm(pts[:, :2], axis=1) if not g.is_sphere else np.linalg.norm(pts, axis=1)
    div = np.zeros(len(pts), dtype=complex)
    scale = 0.0
    for side in ("minus", "plus"):
        mask = r < g.r_sigma if side == "minus" else r >= g.r_sigma
        if not np.any(mask):
            continue
        mu = p.mu(side)  # type: ignore[arg-type]
        base = pts[mask]
        _, curl = eval_field(s, base, side)  # type: ignore[arg-type]
        scale = max(scale, float(np.max(mu * np.linalg.norm(curl, axis=1))))
        total = np.zeros(len(base), dtype=complex)
        for axis in range(3):
            shift = np.zeros(3)
            shift[axis] = step
            ahead, _ = eval_field(s, base + shift, side)  # type: ignore[arg-type]
            behind, _ = eval_field(s, base - shift, side)  # type: ignore[arg-type]
            total += mu * (ahead[:, axis] - behind[:, axis]) / (2 * step)
        div[mask] = total
    return float(np.max(np.abs(div))) / scale if scale > 0 else 0.0
