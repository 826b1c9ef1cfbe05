import logging
import multiprocessing
from typing import Any, Callable, Dict, List, Sequence, Type

import pandas as pd
from pydantic import BaseModel, field_validator

from muskin.parser.config import ExperimentConfig


logger = logging.getLogger(__name__)


class ExperimentResult(BaseModel):
    """
    Everything one experiment produces

    ``tables`` are written as CSV files named after their key, ``report``
    as ``report.json`` and ``summary`` as ``summary.txt``.
    """

    kind: str
    tables: Dict[str, pd.DataFrame] = {}
    report: Dict[str, Any] = {}
    verdicts: Dict[str, bool] = {}
    summary: List[str] = []

    @field_validator("verdicts", mode="before")
    @classmethod
    def _plain_bools(cls, value: Dict[str, Any]) -> Dict[str, bool]:
        return {name: bool(flag) for name, flag in value.items()}

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def summary_text(self) -> str:
        lines = [f"mu-skin {self.kind}"]
        lines.extend(self.summary)
        for name in sorted(self.verdicts):
            lines.append(f"{'PASS' if self.verdicts[name] else 'FAIL'} {name}")
        lines.append("PASSED" if self.passed else "FAILED")
        return "\n".join(lines) + "\n"

    class Config:
        arbitrary_types_allowed = True


def run_tasks(worker: Callable[[Any], Any], items: Sequence[Any], threads: int) -> List[Any]:
    """
    Applies ``worker`` to every item, in a process pool when ``threads > 1``

    ``worker`` must be a module-level function. Results keep the order of
    ``items``.
    """
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [worker(item) for item in items]
    with multiprocessing.Pool(min(threads, len(items))) as pool:
        return pool.map(worker, items)


class _Experiments(BaseModel):
    dispatch: Dict[str, "ExperimentBase"] = {}

    def __call__(self, kind: str, cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
        try:
            experiment = self.dispatch[kind]
        except KeyError as err:
            raise RuntimeError(f"Unknown experiment kind {kind}") from err
        logger.info("Running %s with %d thread(s)", kind, threads)
        return experiment(cfg, threads)

    def register(self, name: str, experiment_class: Type["ExperimentBase"]) -> None:
        self.dispatch[name] = experiment_class()

    def kinds(self) -> List[str]:
        return sorted(self.dispatch)


class ExperimentBase(BaseModel):
    """
    Base class of experiment kinds

    Custom experiments inherit from
    :class:`muskin.experiments.base.ExperimentBase`, implement
    ``__call__`` and are added with
    :func:`muskin.experiments.Experiments.register`.
    """

    def __call__(self, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
        """
        Runs the experiment

        Parameters
        ----------
        cfg:
            The validated configuration
        threads:
            Number of worker processes for sweeps

        Returns
        -------
        :class:`ExperimentResult`
        """
        raise NotImplementedError("An experiment class requires a __call__ function")


Experiments = _Experiments()
