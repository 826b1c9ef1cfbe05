import json
import math
import unittest
from unittest.mock import MagicMock, patch

import numpy as np
import pandas as pd

from muskin.errors import ConfigError
from muskin.experiments import Experiments, ExperimentResult, base
from muskin.parser import parse_config
from tests.fixtures import SKIN_MEDIA, make_config


def _square(x):
    return x * x


def unit_shell_config(**blocks):
    data = make_config(
        media={"omega": 1.0, "eps0": 1.0, "mu_plus": 1.0, "sigma_plus": 1.0, "sigma_minus": 1.0},
        drive={"kind": "ShellCurrent", "polarization": "TM", "mode": 0, "support": [1.3, 1.6]},
    )
    data.update(blocks)
    return parse_config(json.dumps(data))


class TestRegistry(unittest.TestCase):
    def setUp(self):
        self.experiments = base._Experiments()

    def test_defaults(self):
        assert Experiments.kinds() == [
            "constants",
            "exact",
            "profiles",
            "rates",
            "scalar",
            "stability",
        ]

    def test_unknown_kind(self):
        with self.assertRaises(RuntimeError) as err:
            self.experiments("plots", cfg=None)
        assert str(err.exception) == "Unknown experiment kind plots"

    def test_register(self):
        result = ExperimentResult(kind="custom", verdicts={"ok": True})
        experiment = MagicMock(return_value=result)
        self.experiments.register("custom", MagicMock(return_value=experiment))
        assert self.experiments("custom", cfg="cfg", threads=3) is result
        experiment.assert_called_once_with("cfg", 3)

    def test_base_class(self):
        with self.assertRaises(NotImplementedError):
            base.ExperimentBase()(cfg=None, threads=1)


class TestResult(unittest.TestCase):
    def test_numpy_verdicts(self):
        result = ExperimentResult(kind="x", verdicts={"a": np.float64(1.0) < 2.0})
        assert result.verdicts["a"] is True
        assert result.passed

    def test_summary(self):
        result = ExperimentResult(
            kind="rates", verdicts={"b": False, "a": True}, summary=["slope 1.0"]
        )
        assert not result.passed
        assert result.summary_text() == "mu-skin rates\nslope 1.0\nPASS a\nFAIL b\nFAILED\n"

    def test_empty_passes(self):
        assert ExperimentResult(kind="x").passed


class TestRunTasks(unittest.TestCase):
    def test_serial(self):
        assert base.run_tasks(_square, [1, 2, 3], 1) == [1, 4, 9]

    @patch("muskin.experiments.base.multiprocessing.Pool")
    def test_pool(self, mock_pool):
        pool = mock_pool.return_value.__enter__.return_value
        pool.map.return_value = [1, 4, 9]
        assert base.run_tasks(_square, [1, 2, 3], 8) == [1, 4, 9]
        mock_pool.assert_called_once_with(3)
        pool.map.assert_called_once_with(_square, [1, 2, 3])

    @patch("muskin.experiments.base.multiprocessing.Pool")
    def test_single_item_in_process(self, mock_pool):
        assert base.run_tasks(_square, [5], 4) == [25]
        mock_pool.assert_not_called()


class TestScalarExperiment(unittest.TestCase):
    def test_run(self):
        cfg = parse_config(json.dumps(make_config()))
        result = Experiments("scalar", cfg)
        table = result.tables["scalar"]
        assert isinstance(table, pd.DataFrame)
        assert len(table) == 4
        assert result.verdicts == {"saturation": True, "uniform_bound": True}
        assert result.report["rho0"] == 10
        assert result.report["variation"] < 0.1

    def test_too_few_ratios(self):
        cfg = parse_config(json.dumps(make_config(sweep={"ratios": [10]})))
        with self.assertRaises(ConfigError) as err:
            Experiments("scalar", cfg)
        assert str(err.exception) == "sweep.ratios: need at least two ratios"


class TestConstantsExperiment(unittest.TestCase):
    def test_unit_media(self):
        result = Experiments("constants", unit_shell_config())
        row = result.tables["constants"].iloc[0]
        for name in ("m", "C1", "C2"):
            self.assertAlmostEqual(row[name], math.sqrt(2), places=12)
        assert row["curl_ratio"] <= row["C1"]
        assert result.passed

    def test_trace_drive_rejected(self):
        cfg = parse_config(json.dumps(make_config()))
        with self.assertRaises(ConfigError) as err:
            Experiments("constants", cfg)
        assert str(err.exception) == (
            "drive.kind: the constants experiment needs a ShellCurrent drive"
        )


class TestStabilityExperiment(unittest.TestCase):
    def test_trace_drive_rejected(self):
        cfg = parse_config(json.dumps(make_config()))
        with self.assertRaises(ConfigError):
            Experiments("stability", cfg)

    def test_columns(self):
        data = make_config(
            media=dict(SKIN_MEDIA),
            drive={"kind": "ShellCurrent", "mode": 1, "support": [1.3, 1.6]},
            sweep={"mu_r": [1e2, 1e4]},
        )
        cfg = parse_config(json.dumps(data))
        result = Experiments("stability", cfg)
        table = result.tables["stability"]
        assert list(table.columns) == [
            "mu_r",
            "norm_H",
            "norm_E",
            "sqrt_mur_normHminus",
            "norm_j",
            "quotient",
            "energy_mismatch",
        ]
        assert table["mu_r"].tolist() == [1e2, 1e4]
        assert result.verdicts["interior_nonincreasing"]


class TestExactExperiment(unittest.TestCase):
    def test_default_ray(self):
        result = Experiments("exact", parse_config(json.dumps(make_config())))
        table = result.tables["exact"]
        assert len(table) == 17
        assert list(table.columns[:3]) == ["x", "y", "z"]
        assert "Hz_re" in table.columns
        assert "Ey_im" in table.columns
        assert result.passed

    def test_user_points(self):
        data = make_config(output={"points": [[0.5, 0.0, 0.0], [0.0, 1.5, 0.0]]})
        result = Experiments("exact", parse_config(json.dumps(data)))
        table = result.tables["exact"]
        assert table["x"].tolist() == [0.5, 0.0]
        assert table["y"].tolist() == [0.0, 1.5]


class TestProfilesExperiment(unittest.TestCase):
    def test_run(self):
        data = make_config(
            drive={"kind": "BoundaryTrace", "polarization": "TM", "mode": 1},
            output={"profile_samples": 8},
        )
        result = Experiments("profiles", parse_config(json.dumps(data)))
        table = result.tables["profiles"]
        assert list(table.columns) == [
            "order",
            "Y3",
            "tangential_re",
            "tangential_im",
            "normal_re",
            "normal_im",
        ]
        assert table["order"].tolist() == [1] * 8 + [2] * 8
        assert table["Y3"][0] == 0.0
        assert "extra_condition" in result.tables["residuals"]["check"].tolist()
        decay = result.report["decay"]
        self.assertAlmostEqual(decay["measured"] / decay["expected"], 1.0, delta=0.05)
        assert result.passed


class TestRatesExperiment(unittest.TestCase):
    def test_run(self):
        result = Experiments("rates", parse_config(json.dumps(make_config(experiment="rates"))))
        table = result.tables["rates"]
        assert list(table.columns) == [
            "eps",
            "m",
            "norm_Rplus_L2",
            "norm_curlRplus_L2",
            "norm_Rminus_L2",
            "norm_curlRminus_L2",
            "combined",
        ]
        assert table["eps"].tolist() == [e for e in (0.2, 0.1, 0.05, 0.025) for _ in range(3)]
        assert table["m"].tolist() == [0, 1, 2] * 4
        assert result.tables["bounds"]["eps"].tolist() == [0.2, 0.1, 0.05, 0.025]
        assert sorted(result.verdicts) == [
            "interior_smallness",
            "rate_m0",
            "rate_m1",
            "rate_m2",
            "two_sided_bound",
        ]
        assert result.passed, result.summary_text()
        for m in (0, 1, 2):
            slope = result.report["convergence"]["fits"][str(m)]["slope"]
            self.assertAlmostEqual(slope, m + 1, delta=0.3)

    def test_too_few_eps(self):
        cfg = parse_config(json.dumps(make_config(sweep={"eps": [0.1, 0.05]})))
        with self.assertRaises(ConfigError) as err:
            Experiments("rates", cfg)
        assert str(err.exception) == "sweep.eps: need at least three values in (0, 1]"


if __name__ == "__main__":
    unittest.main()
