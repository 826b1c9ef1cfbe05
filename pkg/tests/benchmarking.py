# PYTHONPATH=./ python tests/benchmarking.py
import cProfile

from muskin.experiments import Experiments
from muskin.modal import solve_exact
from muskin.parser import ExperimentConfig
from tests.fixtures import make_config, make_cylinders, make_skin_media, make_trace_drive


def solve_modes():
    g = make_cylinders()
    for mode in range(16):
        _ = solve_exact(g, make_skin_media(mu_r=1e6), make_trace_drive(mode=mode))


def rates_run():
    cfg = ExperimentConfig.model_validate(make_config(experiment="rates"))
    return Experiments("rates", cfg, threads=1)


print("===== SOLVING 16 CYLINDER MODES ======")
cProfile.run("solve_modes()")

print("===== RATES RUN, CYLINDER TM m=0 ======")
cProfile.run("rates_run()")
