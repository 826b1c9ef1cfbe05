import logging
import math
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from muskin.analysis import RemainderRecord, convergence_report, divergence_residual
from muskin.analysis import energy_balance, field_norms, fit_decay, region_norm, remainder
from muskin.analysis import solution_splits, stability_bounds
from muskin.asymptotics import composite_approx, expand, extra_condition_residual
from muskin.asymptotics import layer_breakpoints, profile_recurrence_residual
from muskin.errors import ConfigError
from muskin.experiments.base import ExperimentBase, ExperimentResult, _Experiments, run_tasks
from muskin.geometry import Geometry
from muskin.modal import eval_field, interface_residuals, recover_E, solve_exact
from muskin.parser.config import ExperimentConfig
from muskin.scalar_tp import uniform_sweep


logger = logging.getLogger(__name__)


def _direction(g: Geometry) -> np.ndarray:
    """Unit vector of the sampling ray, away from the sphere poles"""
    if g.is_sphere:
        polar = 1.0
        return np.array(
            [math.sin(polar) * math.cos(0.3), math.sin(polar) * math.sin(0.3), math.cos(polar)]
        )
    return np.array([math.cos(0.3), math.sin(0.3), 0.0])


def _spread(values: List[float]) -> float:
    return max(values) / min(values) if min(values) > 0 else math.inf


def _angular(cfg: ExperimentConfig) -> Dict[str, int]:
    return {"mode": cfg.drive.mode, "degree": cfg.drive.degree}


def _require_shell(cfg: ExperimentConfig, kind: str) -> None:
    if cfg.drive.kind != "ShellCurrent":
        raise ConfigError(f"drive.kind: the {kind} experiment needs a ShellCurrent drive")


def _rates_point(task: Tuple[ExperimentConfig, float]) -> Dict[str, Any]:
    cfg, eps = task
    g = cfg.geometry.build()
    base = cfg.media.build()
    drive = cfg.drive.build()
    rule = cfg.quadrature
    orders = cfg.sweep.orders
    terms, profiles = expand(g, base.derived, drive, order=max(max(orders), 1))
    exact = solve_exact(g, base.with_mu_r(eps**-2), drive)
    out: Dict[str, Any] = {"eps": eps}
    cutoffs = {"records": cfg.cutoff.build(g)}
    if cfg.cutoff.alternate is not None:
        cutoffs["alternate"] = cfg.cutoff.build(g, alternate=True)
    for key, cutoff in cutoffs.items():
        out[key] = [
            remainder(exact, composite_approx(m, eps, terms, profiles, cutoff), rule)
            for m in orders
        ]
    cutoff = cutoffs["records"]
    first = composite_approx(1, eps, terms, profiles, cutoff)
    depths = [cutoff.d0, cutoff.d1] + layer_breakpoints(eps, exact.derived, cutoff)
    splits = [g.r_sigma - y for y in depths] + [g.chart_floor]
    out["profile"] = region_norm(first, g, "minus", "L2", splits, rule, **_angular(cfg)) / eps
    out["interior"] = region_norm(
        lambda p: eval_field(exact, p), g, "minus", "L2", solution_splits(exact), rule,
        **_angular(cfg),
    )
    logger.debug("Rates point eps=%s done", eps)
    return out


class Rates(ExperimentBase):
    """
    Remainder norms of the composite approximants over an ``eps`` sweep,
    their convergence rates and the interior bounds of the first profile
    """

    def __call__(self, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
        eps_list = sorted(cfg.sweep.eps, reverse=True)
        if len(eps_list) < 3 or not all(0 < e <= 1 for e in eps_list):
            raise ConfigError("sweep.eps: need at least three values in (0, 1]")
        tol = cfg.tolerances
        points = run_tasks(_rates_point, [(cfg, eps) for eps in eps_list], threads)
        g, media, drive = cfg.geometry.build(), cfg.media.build(), cfg.drive.build()

        def report_of(key: str) -> Any:
            records: List[RemainderRecord] = [r for p in points for r in p[key]]
            return convergence_report(g, media, drive, records, tol.slope_tol, tol.rate_points)

        report = report_of("records")
        verdicts = report.verdicts()
        profile = [p["profile"] / math.sqrt(p["eps"]) for p in points]
        interior = [p["interior"] / p["eps"] ** 1.5 for p in points]
        verdicts["two_sided_bound"] = _spread(profile) < tol.bound_factor
        verdicts["interior_smallness"] = _spread(interior) < tol.interior_factor
        out: Dict[str, Any] = {
            "convergence": report.model_dump(mode="json"),
            "profile_ratio_spread": _spread(profile),
            "interior_ratio_spread": _spread(interior),
        }
        summary = [
            f"order {m}: slope {fit.slope:.4f} (95% CI {fit.ci_low:.4f} .. {fit.ci_high:.4f}),"
            f" expected {m + 1}"
            for m, fit in sorted(report.fits.items())
        ]
        if cfg.cutoff.alternate is not None:
            other = report_of("alternate")
            shifts = {m: abs(other.fits[m].slope - report.fits[m].slope) for m in report.fits}
            for m, shift in shifts.items():
                verdicts[f"cutoff_shift_m{m}"] = shift < tol.cutoff_shift
            out["cutoff_shift"] = {str(m): shift for m, shift in shifts.items()}
        bounds = pd.DataFrame(
            {
                "eps": [p["eps"] for p in points],
                "profile_ratio": profile,
                "interior_ratio": interior,
            }
        )
        return ExperimentResult(
            kind="rates",
            tables={"rates": report.to_dataframe(), "bounds": bounds},
            report=out,
            verdicts=verdicts,
            summary=summary,
        )


class Profiles(ExperimentBase):
    """
    Samples the boundary-layer profiles, checks their recurrence and the
    normal transmission condition, and fits the skin decay of an exact
    solution
    """

    def __call__(self, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
        g, base, drive = cfg.geometry.build(), cfg.media.build(), cfg.drive.build()
        tol = cfg.tolerances
        d = base.derived
        rate = d.lambda_.real
        terms, profiles = expand(g, d, drive)
        stretched = np.linspace(0.0, 10.0 / rate, cfg.output.profile_samples)
        data: Dict[str, list] = {
            "order": [],
            "Y3": [],
            "tangential_re": [],
            "tangential_im": [],
            "normal_re": [],
            "normal_im": [],
        }
        for profile in profiles[1:]:
            tangential = np.asarray(profile.tangential(stretched)) * np.ones(stretched.shape)
            normal = np.asarray(profile.normal(stretched)) * np.ones(stretched.shape)
            data["order"].extend([profile.order] * stretched.size)
            data["Y3"].extend(stretched.tolist())
            data["tangential_re"].extend(tangential.real.tolist())
            data["tangential_im"].extend(tangential.imag.tolist())
            data["normal_re"].extend(normal.real.tolist())
            data["normal_im"].extend(normal.imag.tolist())

        residuals = profile_recurrence_residual(profiles, g, d, terms)
        extra = extra_condition_residual(profiles, terms)
        checks: Dict[str, float] = {}
        for name, value in residuals.model_dump().items():
            if isinstance(value, (tuple, list)):
                checks.update({f"{name}_{i}": float(v) for i, v in enumerate(value)})
            else:
                checks[name] = float(value)
        checks["extra_condition"] = extra

        eps = cfg.sweep.decay_eps
        exact = solve_exact(g, base.with_mu_r(eps**-2), drive)
        depths = np.linspace(0.0, 3 * eps / rate, 16)
        points = (g.r_sigma - depths)[:, None] * _direction(g)[None, :]
        h, _ = eval_field(exact, points, side="minus")
        magnitude = np.linalg.norm(h, axis=1)
        measured = -fit_decay(depths, magnitude).slope
        expected = rate / eps

        verdicts = {
            "recurrence": residuals.max() < tol.recurrence_tol,
            "extra_condition": extra < tol.recurrence_tol,
            "skin_decay": abs(measured / expected - 1) < tol.decay_tol,
        }
        return ExperimentResult(
            kind="profiles",
            tables={
                "profiles": pd.DataFrame(data),
                "residuals": pd.DataFrame(
                    {"check": sorted(checks), "value": [checks[k] for k in sorted(checks)]}
                ),
                "decay": pd.DataFrame({"depth": depths, "abs_H": magnitude}),
            },
            report={
                "residuals": checks,
                "decay": {"eps": eps, "measured": measured, "expected": expected},
                "lambda": [d.lambda_.real, d.lambda_.imag],
            },
            verdicts=verdicts,
            summary=[
                f"largest recurrence residual {residuals.max():.3e}",
                f"skin decay rate {measured:.6e}, expected {expected:.6e}",
            ],
        )


class Scalar(ExperimentBase):
    """Uniform bound of the scalar transmission problem over coefficient ratios"""

    def __call__(self, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
        g = cfg.geometry.build()
        ratios = cfg.sweep.ratios
        if len(ratios) < 2:
            raise ConfigError("sweep.ratios: need at least two ratios")
        sweep = uniform_sweep(g, ratios)
        largest = sorted(sweep.rows, key=lambda row: abs(row.ratio))[-2:]
        reference = largest[1].quotient
        variation = abs(largest[0].quotient - reference) / reference if reference else math.inf
        rho0 = sweep.rho0()
        return ExperimentResult(
            kind="scalar",
            tables={"scalar": sweep.to_dataframe()},
            report={
                "rho0": rho0 if math.isfinite(rho0) else None,
                "variation": variation,
            },
            verdicts={
                "uniform_bound": sweep.bounded(),
                "saturation": variation < cfg.tolerances.scalar_variation,
            },
            summary=[f"relative change between the two largest ratios {variation:.3e}"],
        )


def _stability_point(task: Tuple[ExperimentConfig, float]) -> Dict[str, float]:
    cfg, mu_r = task
    s = solve_exact(cfg.geometry.build(), cfg.media.build(mu_r), cfg.drive.build())
    norms = field_norms(s, cfg.quadrature)
    scaled = math.sqrt(mu_r) * norms.norm_h_minus
    return {
        "mu_r": mu_r,
        "norm_H": norms.norm_h,
        "norm_E": norms.norm_e,
        "sqrt_mur_normHminus": scaled,
        "norm_j": norms.norm_j,
        "quotient": (norms.norm_h + norms.norm_e + scaled) / norms.norm_j,
        "energy_mismatch": energy_balance(s, cfg.quadrature),
    }


class Stability(ExperimentBase):
    """Uniform stability quotient of shell-current solutions over ``mu_r``"""

    def __call__(self, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
        _require_shell(cfg, "stability")
        tol = cfg.tolerances
        values = sorted(cfg.sweep.mu_r)
        rows = run_tasks(_stability_point, [(cfg, mu_r) for mu_r in values], threads)
        table = pd.DataFrame(rows)
        quotients = table["quotient"].tolist()
        interior = table["sqrt_mur_normHminus"].tolist()
        verdicts = {
            "uniform_quotient": _spread(quotients) < tol.stability_factor,
            "interior_nonincreasing": all(b <= a for a, b in zip(interior, interior[1:])),
            "energy_identity": max(table["energy_mismatch"]) < tol.energy_tol,
        }
        return ExperimentResult(
            kind="stability",
            tables={"stability": table},
            report={"quotient_spread": _spread(quotients), "rows": rows},
            verdicts=verdicts,
            summary=[f"quotient spread {_spread(quotients):.4f} over mu_r {values}"],
        )


def _sample_points(g: Geometry) -> np.ndarray:
    radii = [0.5 * g.r_sigma, 0.9 * g.r_sigma, 0.5 * (g.r_sigma + g.r_gamma)]
    angles = np.linspace(0.3, 5.8, 6)
    points = []
    for r in radii:
        for a in angles:
            if g.is_sphere:
                polar = 0.4 + 0.3 * (a % 7)
                points.append(
                    [r * math.sin(polar) * math.cos(a), r * math.sin(polar) * math.sin(a),
                     r * math.cos(polar)]
                )
            else:
                points.append([r * math.cos(a), r * math.sin(a), 0.0])
    return np.array(points)


class Constants(ExperimentBase):
    """The stability constants of the media and the measured energy bounds"""

    def __call__(self, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
        _require_shell(cfg, "constants")
        g = cfg.geometry.build()
        s = solve_exact(g, cfg.media.build(), cfg.drive.build())
        bounds = stability_bounds(s, cfg.quadrature)
        residual = divergence_residual(s, _sample_points(g))
        row = {
            "m": bounds.m,
            "C1": bounds.c1,
            "C2": bounds.c2,
            "curl_ratio": bounds.curl_ratio,
            "interior_ratio": bounds.interior_ratio,
            "div_residual": residual,
        }
        return ExperimentResult(
            kind="constants",
            tables={"constants": pd.DataFrame([row])},
            report=row,
            verdicts={
                "curl_bound": bounds.curl_ratio <= bounds.c1,
                "interior_bound": bounds.interior_ratio <= bounds.c2,
                "divergence": residual < cfg.tolerances.divergence_tol,
            },
            summary=[f"m={bounds.m:.12g} C1={bounds.c1:.12g} C2={bounds.c2:.12g}"],
        )


def _default_points(g: Geometry) -> np.ndarray:
    radii = np.linspace(0.2 * g.r_sigma, g.r_gamma, 17)
    return radii[:, None] * _direction(g)[None, :]


class Exact(ExperimentBase):
    """Samples ``H`` and ``E`` of the exact solution on a grid"""

    def __call__(self, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
        g = cfg.geometry.build()
        s = solve_exact(g, cfg.media.build(), cfg.drive.build())
        points: Optional[np.ndarray] = None
        if cfg.output.points:
            points = np.array(cfg.output.points, dtype=float)
        else:
            points = _default_points(g)
        h, _ = eval_field(s, points)
        e = recover_E(s, points)
        data: Dict[str, Any] = {"x": points[:, 0], "y": points[:, 1], "z": points[:, 2]}
        for name, values in (("H", h), ("E", e)):
            for i, axis in enumerate("xyz"):
                data[f"{name}{axis}_re"] = values[:, i].real
                data[f"{name}{axis}_im"] = values[:, i].imag
        tangential, curl, normal = interface_residuals(s)
        limit = cfg.tolerances.interface_tol
        return ExperimentResult(
            kind="exact",
            tables={"exact": pd.DataFrame(data)},
            report={
                "condition": s.condition,
                "interface_residuals": {"tangential": tangential, "curl": curl, "normal": normal},
            },
            verdicts={
                "tangential_continuity": tangential < limit,
                "curl_continuity": curl < limit,
                "normal_condition": normal < limit,
            },
            summary=[f"condition number {s.condition:.3e}"],
        )


def register_defaults(experiments: _Experiments) -> None:
    experiments.register("rates", Rates)
    experiments.register("profiles", Profiles)
    experiments.register("scalar", Scalar)
    experiments.register("stability", Stability)
    experiments.register("constants", Constants)
    experiments.register("exact", Exact)
