from muskin.experiments.base import Experiments, ExperimentResult
from muskin.experiments.defaults import register_defaults


register_defaults(Experiments)


__all__ = ("Experiments", "ExperimentResult")
