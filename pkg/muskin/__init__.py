# -*- coding: utf-8 -*-

"""mu-skin: Maxwell transmission through high-permeability skin layers"""

from muskin import config
from muskin.errors import MuSkinError
from muskin.media import MediaParams, DerivedParams, stability_constants
from muskin.geometry import Geometry, Cutoff, SurfaceField
from muskin.modal import Drive, ModalSolution, solve_exact, eval_field, recover_E
from muskin.asymptotics import expand, composite_approx
from muskin.scalar_tp import ScalarProblem, solve_scalar, uniform_sweep

# The following info will be used by setup.py and sphinx documentation
__author__ = "Jonas Marcello"
__version__ = "1.0.1"

__all__ = (
    "MediaParams",
    "DerivedParams",
    "stability_constants",
    "Geometry",
    "Cutoff",
    "SurfaceField",
    "Drive",
    "ModalSolution",
    "solve_exact",
    "eval_field",
    "recover_E",
    "expand",
    "composite_approx",
    "ScalarProblem",
    "solve_scalar",
    "uniform_sweep",
    "MuSkinError",
    "config",
)
