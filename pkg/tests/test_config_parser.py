import json
import os
import tempfile
import unittest

from muskin.errors import ConfigError
from muskin.parser import load_config, parse_config
from tests.fixtures import make_config


class TestParseConfig(unittest.TestCase):
    def test_minimal(self):
        cfg = parse_config(json.dumps(make_config()))
        assert cfg.schema_version == 1
        assert cfg.experiment is None
        assert cfg.sweep.eps == [0.2, 0.1, 0.05, 0.025]
        assert cfg.sweep.orders == [0, 1, 2]
        assert cfg.cutoff.d0 == 0.3
        assert cfg.cutoff.d1 == 0.6
        g = cfg.geometry.build()
        assert g.kind == "cylinders"
        media = cfg.media.build(mu_r=1e4)
        assert media.mu_r == 1e4
        assert media.sigma_minus == 10.0
        assert cfg.media.build().mu_r == 1.0

    def test_complex_ratios(self):
        cfg = parse_config(json.dumps(make_config(sweep={"ratios": [10, "1000j"]})))
        assert cfg.sweep.ratios == [10, 1000j]

    def test_overrides(self):
        data = make_config(
            quadrature={"radial_order": 32},
            tolerances={"slope_tol": 0.2},
            cutoff={"d0": 0.2, "d1": 0.5},
        )
        cfg = parse_config(json.dumps(data))
        assert cfg.quadrature.radial_order == 32
        assert cfg.tolerances.slope_tol == 0.2
        cutoff = cfg.cutoff.build(cfg.geometry.build())
        self.assertAlmostEqual(cutoff.d0, 0.2)
        self.assertAlmostEqual(cutoff.d1, 0.5)

    def test_alternate_cutoff(self):
        data = make_config(cutoff={"alternate": [0.2, 0.5]})
        cfg = parse_config(json.dumps(data))
        g = cfg.geometry.build()
        self.assertAlmostEqual(cfg.cutoff.build(g).d0, 0.3)
        self.assertAlmostEqual(cfg.cutoff.build(g, alternate=True).d0, 0.2)


class TestConfigErrors(unittest.TestCase):
    def test_syntax_error_position(self):
        text = '{\n  "geometry": ,\n}'
        with self.assertRaises(ConfigError) as err:
            parse_config(text, source="cfg.json")
        assert str(err.exception).startswith("cfg.json:2:15: Expecting value")

    def test_field_path(self):
        data = make_config()
        data["media"]["omega"] = "fast"
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(data))
        assert "media.omega:" in str(err.exception)

    def test_unknown_field(self):
        data = make_config()
        data["geometry"]["colour"] = "red"
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(data))
        assert "geometry.colour: Extra inputs are not permitted" in str(err.exception)

    def test_missing_block(self):
        data = make_config()
        del data["media"]
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(data))
        assert "media: Field required" in str(err.exception)

    def test_schema_version(self):
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(make_config(schema_version=2)))
        assert str(err.exception) == "schema_version: expected 1, got 2"

    def test_threads(self):
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(make_config(threads=0)))
        assert str(err.exception) == "threads: must be at least 1, got 0"

    def test_media_domain(self):
        data = make_config()
        data["media"]["sigma_minus"] = -1.0
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(data))
        assert str(err.exception) == (
            "media: sigma_minus must be positive and finite, got -1.0"
        )

    def test_geometry_radii(self):
        data = make_config(geometry={"kind": "spheres", "r_sigma": 2.0, "r_gamma": 1.0})
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(data))
        assert str(err.exception).startswith("geometry: Radii must satisfy")

    def test_te_shell(self):
        data = make_config(
            drive={"kind": "ShellCurrent", "polarization": "TE", "support": [1.3, 1.6]}
        )
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(data))
        assert str(err.exception) == "drive: Shell currents are only available for TM modes"

    def test_cutoff_reaching_core(self):
        data = make_config(cutoff={"d0": 0.3, "d1": 0.99})
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(data))
        assert str(err.exception).startswith("cutoff: Cutoff support")

    def test_unknown_experiment(self):
        with self.assertRaises(ConfigError) as err:
            parse_config(json.dumps(make_config(experiment="plots")))
        assert "experiment:" in str(err.exception)


class TestLoadConfig(unittest.TestCase):
    def test_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "rates.json")
            with open(path, "w") as fh:
                json.dump(make_config(experiment="rates"), fh)
            cfg = load_config(path)
        assert cfg.experiment == "rates"

    def test_missing_file(self):
        with self.assertRaises(ConfigError) as err:
            load_config("/nonexistent/mu-skin.json")
        assert str(err.exception).startswith("Cannot read configuration /nonexistent/mu-skin.json")


if __name__ == "__main__":
    unittest.main()
