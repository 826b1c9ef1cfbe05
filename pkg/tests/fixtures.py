"""
Factories for the parameter sets, geometries and drives used across the
test suite
"""

from typing import Any, Dict

from muskin.media import MediaParams
from muskin.geometry import Geometry, Cutoff
from muskin.modal import Drive


SKIN_MEDIA: Dict[str, float] = dict(
    omega=1.0, eps0=1.0, mu_plus=1.0, sigma_plus=1.0, sigma_minus=800.0
)
"""A strongly conducting core: Re(lambda) is close to 20"""

LAYER_MEDIA: Dict[str, float] = dict(
    omega=1.0, eps0=1.0, mu_plus=1.0, sigma_plus=1.0, sigma_minus=10.0
)
"""
A moderately conducting core: Re(lambda) is close to 2.1, and the eps
ladder ``0.2 .. 0.025`` already shows the asymptotic convergence rates
"""


def make_unit_media(**kwargs: Any) -> MediaParams:
    """omega = eps0 = mu_plus = sigma_plus = sigma_minus = 1"""
    params = dict(
        omega=1.0, eps0=1.0, mu_plus=1.0, mu_r=1.0, sigma_plus=1.0, sigma_minus=1.0
    )
    params.update(kwargs)
    return MediaParams(**params)


def make_skin_media(**kwargs: Any) -> MediaParams:
    """
    A thin boundary layer compared to the interface radius, for the
    solver and profile tests
    """
    params: Dict[str, Any] = dict(SKIN_MEDIA, mu_r=1e4)
    params.update(kwargs)
    return MediaParams(**params)


def make_layer_media(**kwargs: Any) -> MediaParams:
    """Media of the convergence-rate tests"""
    params: Dict[str, Any] = dict(LAYER_MEDIA, mu_r=1e4)
    params.update(kwargs)
    return MediaParams(**params)


def make_cylinders(r_sigma: float = 1.0, r_gamma: float = 2.0) -> Geometry:
    return Geometry(kind="cylinders", r_sigma=r_sigma, r_gamma=r_gamma)


def make_spheres(r_sigma: float = 1.0, r_gamma: float = 2.0) -> Geometry:
    return Geometry(kind="spheres", r_sigma=r_sigma, r_gamma=r_gamma)


def make_cutoff(geometry: Geometry, d0: float = 0.3, d1: float = 0.6) -> Cutoff:
    return Cutoff(d0=d0 * geometry.r_sigma, d1=d1 * geometry.r_sigma)


def make_trace_drive(
    mode: int = 0, polarization: str = "TM", amplitude: complex = 1.0, degree: int = 1
) -> Drive:
    """Boundary-trace drive; ``degree`` is only used on the sphere"""
    return Drive(
        kind="BoundaryTrace",
        polarization=polarization,
        mode=mode,
        degree=degree,
        amplitude=amplitude,
    )


def make_shell_drive(
    mode: int = 0,
    amplitude: complex = 1.0,
    support: tuple = (1.3, 1.6),
    degree: int = 1,
) -> Drive:
    return Drive(
        kind="ShellCurrent",
        polarization="TM",
        mode=mode,
        degree=degree,
        amplitude=amplitude,
        support=support,
    )


def make_config(**blocks: Any) -> Dict[str, Any]:
    """
    Minimal experiment configuration as a JSON-ready dict: the cylinder
    pair with :data:`LAYER_MEDIA` and a TM ``m=0`` boundary trace. Keyword arguments
    replace whole blocks.
    """
    cfg: Dict[str, Any] = {
        "schema_version": 1,
        "geometry": {"kind": "cylinders", "r_sigma": 1.0, "r_gamma": 2.0},
        "media": dict(LAYER_MEDIA),
        "drive": {"kind": "BoundaryTrace", "polarization": "TM", "mode": 0},
    }
    cfg.update(blocks)
    return cfg
