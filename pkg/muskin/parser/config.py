"""
Experiment configuration files

A configuration is a JSON document with nested blocks::

    {
      "schema_version": 1,
      "geometry": {"kind": "cylinders", "r_sigma": 1.0, "r_gamma": 2.0},
      "media": {"omega": 1.0, "eps0": 1.0, "mu_plus": 1.0,
                "sigma_plus": 1.0, "sigma_minus": 10.0},
      "sweep": {"eps": [0.2, 0.1, 0.05, 0.025]},
      "drive": {"kind": "BoundaryTrace", "polarization": "TM", "mode": 0}
    }

Every block except ``geometry`` and ``media`` is optional.
"""

import json
import logging
from typing import Any, List, Literal, Optional, Tuple

from pydantic import BaseModel, ValidationError

from muskin import config
from muskin.analysis import QuadratureRule
from muskin.errors import ConfigError, MuSkinError
from muskin.geometry import Cutoff, Geometry
from muskin.media import MediaParams
from muskin.modal import Drive, check_drive


logger = logging.getLogger(__name__)

ExperimentKind = Literal["rates", "profiles", "scalar", "stability", "constants", "exact"]


class _Block(BaseModel):
    class Config:
        extra = "forbid"
        frozen = True


class GeometryBlock(_Block):
    kind: Literal["cylinders", "spheres"]
    r_sigma: float
    r_gamma: float

    def build(self) -> Geometry:
        return Geometry(kind=self.kind, r_sigma=self.r_sigma, r_gamma=self.r_gamma)


class MediaBlock(_Block):
    omega: float
    eps0: float
    mu_plus: float
    sigma_plus: float
    sigma_minus: float
    mu_r: float = 1.0
    """Relative permeability for experiments without a ``mu_r`` or ``eps`` sweep"""

    def build(self, mu_r: Optional[float] = None) -> MediaParams:
        params = self.model_dump()
        if mu_r is not None:
            params["mu_r"] = mu_r
        return MediaParams(**params)


class SweepBlock(_Block):
    mu_r: List[float] = [1e2, 1e4, 1e6]
    """Relative permeabilities of the ``stability`` experiment"""

    eps: List[float] = [0.2, 0.1, 0.05, 0.025]
    """Contrast parameters of the ``rates`` experiment"""

    orders: List[int] = [0, 1, 2]
    """Approximation orders of the ``rates`` experiment"""

    ratios: List[complex] = [10, 1e3, 1e6, 1e3j]
    """Coefficient ratios ``a_minus / a_plus`` of the ``scalar`` experiment"""

    decay_eps: float = 0.05
    """Contrast parameter of the skin-decay fit in the ``profiles`` experiment"""


class DriveBlock(_Block):
    kind: Literal["BoundaryTrace", "ShellCurrent"] = "BoundaryTrace"
    polarization: Literal["TM", "TE"] = "TM"
    mode: int = 0
    degree: int = 1
    amplitude: complex = 1.0
    support: Optional[Tuple[float, float]] = None

    def build(self) -> Drive:
        return Drive(**self.model_dump())


class CutoffBlock(_Block):
    """Cutoff knots as fractions of ``r_sigma``"""

    d0: float = config.CUTOFF_D0
    d1: float = config.CUTOFF_D1
    alternate: Optional[Tuple[float, float]] = None
    """Second ``(d0, d1)`` pair for the cutoff-insensitivity check of ``rates``"""

    def build(self, g: Geometry, alternate: bool = False) -> Cutoff:
        d0, d1 = self.alternate if alternate and self.alternate else (self.d0, self.d1)
        return Cutoff.default(g, d0, d1)


class TolerancesBlock(_Block):
    slope_tol: float = config.SLOPE_TOL
    rate_points: int = config.RATE_POINTS
    bound_factor: float = 1.5
    """Largest ratio between extremes of ``||chi V1|| / sqrt(eps)``"""

    interior_factor: float = 2.0
    """Largest ratio between extremes of ``||H-|| / eps^1.5``"""

    stability_factor: float = 2.0
    decay_tol: float = 0.05
    cutoff_shift: float = 0.1
    scalar_variation: float = 0.1
    interface_tol: float = config.INTERFACE_TOL
    recurrence_tol: float = 1e-10
    energy_tol: float = 1e-7
    divergence_tol: float = 1e-8


class OutputBlock(_Block):
    directory: str = "results"
    points: List[Tuple[float, float, float]] = []
    """Sample points of the ``exact`` experiment, a ray through Omega by default"""

    profile_samples: int = 64
    """Number of stretched depths sampled per profile"""


class ExperimentConfig(_Block):
    """
    One validated experiment configuration

    Example
    -------
    ::

        cfg = load_config("rates.json")
        g = cfg.geometry.build()
        media = cfg.media.build(mu_r=1e4)

    """

    schema_version: int = config.SCHEMA_VERSION
    experiment: Optional[ExperimentKind] = None
    """Experiment kind; the command line kind must agree when both are given"""

    threads: Optional[int] = None
    geometry: GeometryBlock
    media: MediaBlock
    sweep: SweepBlock = SweepBlock()
    drive: DriveBlock = DriveBlock()
    quadrature: QuadratureRule = QuadratureRule()
    tolerances: TolerancesBlock = TolerancesBlock()
    cutoff: CutoffBlock = CutoffBlock()
    output: OutputBlock = OutputBlock()


def _location(loc: Tuple[Any, ...]) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def check_config(cfg: ExperimentConfig) -> None:
    """
    Builds every domain object once so that invalid values surface with
    the name of their block

    Raises
    ------
    ConfigError
    """
    if cfg.schema_version != config.SCHEMA_VERSION:
        raise ConfigError(
            f"schema_version: expected {config.SCHEMA_VERSION}, got {cfg.schema_version}"
        )
    if cfg.threads is not None and cfg.threads < 1:
        raise ConfigError(f"threads: must be at least 1, got {cfg.threads}")
    steps = (
        ("geometry", lambda: cfg.geometry.build()),
        ("media", lambda: cfg.media.build().derived),
        ("drive", lambda: check_drive(cfg.geometry.build(), cfg.drive.build())),
        ("cutoff", lambda: cfg.cutoff.build(cfg.geometry.build()).check(cfg.geometry.build())),
        (
            "cutoff.alternate",
            lambda: cfg.cutoff.build(cfg.geometry.build(), True).check(cfg.geometry.build()),
        ),
    )
    for block, step in steps:
        try:
            step()
        except (MuSkinError, NotImplementedError) as err:
            raise ConfigError(f"{block}: {err}") from err


def parse_config(text: str, source: str = "<string>") -> ExperimentConfig:
    """
    Parses and validates the text of a configuration file

    Parameters
    ----------
    text: str
        JSON document
    source: str
        Name used in error messages

    Returns
    -------
    :class:`ExperimentConfig`

    Raises
    ------
    ConfigError
        With line and column for JSON syntax errors and with the field
        path for invalid or unknown fields
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError(f"{source}:{err.lineno}:{err.colno}: {err.msg}") from err
    try:
        cfg = ExperimentConfig.model_validate(data)
    except ValidationError as err:
        details = "; ".join(f"{_location(e['loc'])}: {e['msg']}" for e in err.errors())
        raise ConfigError(f"{source}: {details}") from err
    check_config(cfg)
    logger.debug("Loaded configuration from %s", source)
    return cfg


def load_config(path: str) -> ExperimentConfig:
    """
    Reads and validates a configuration file

    Raises
    ------
    ConfigError
        If the file cannot be read or is invalid
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as err:
        raise ConfigError(f"Cannot read configuration {path}: {err.strerror}") from err
    return parse_config(text, source=path)
