"""Tests for configuration management."""

import os
import tempfile
import unittest
from pathlib import Path

from kcenter_global.config import Config
from kcenter_global.exceptions import ConfigurationError
from kcenter_global.search import SolverConfig


class TestConfig(unittest.TestCase):
    """Test cases for Config class."""

    def test_default_config(self):
        """Test loading default configuration."""
        config = Config()

        # Test app config
        self.assertEqual(config.get("app.name"), "K-Center Global Solver")
        self.assertEqual(config.get("app.version"), "1.0.0")

        # Test solver config
        self.assertEqual(config.get("solver.epsilon_rel"), 0.001)
        self.assertEqual(config.get("solver.i_sr"), 10)
        self.assertEqual(config.get("solver.ball_threshold"), 50)
        self.assertTrue(config.get("solver.bounds_tightening"))

        # Test oracle config
        self.assertEqual(config.get("oracle.limit"), 5_000_000)

    def test_config_get_set(self):
        """Test getting and setting configuration values."""
        config = Config()

        config.set("test.key", "test_value")
        self.assertEqual(config.get("test.key"), "test_value")

        self.assertEqual(config.get("nonexistent.key", "default"), "default")

    def test_config_file_loading(self):
        """Test loading configuration from file."""
        config_data = """
app:
  name: "Test App"
solver:
  i_sr: 5
  symmetry_breaking: false
"""

        with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
            f.write(config_data)
            temp_file = f.name

        try:
            config = Config(temp_file)

            self.assertEqual(config.get("app.name"), "Test App")
            self.assertEqual(config.get("solver.i_sr"), 5)
            self.assertFalse(config.get("solver.symmetry_breaking"))

            # Defaults survive the merge
            self.assertEqual(config.get("solver.ball_threshold"), 50)
            self.assertEqual(config.get("app.version"), "1.0.0")
        finally:
            Path(temp_file).unlink()

    def test_malformed_file_falls_back_to_defaults(self):
        """Test that an unparsable YAML file yields the built-in defaults."""
        with tempfile.NamedTemporaryFile(mode="w", suffix=".yaml", delete=False) as f:
            f.write("solver: [unclosed\n")
            temp_file = f.name

        try:
            with self.assertLogs("kcenter_global.config", level="WARNING"):
                config = Config(temp_file)
            self.assertEqual(config.get("solver.i_sr"), 10)
        finally:
            Path(temp_file).unlink()

    def test_save_round_trip(self):
        """Test that a saved configuration loads back."""
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "nested", "saved.yaml")
            config = Config()
            config.set("solver.workers", 4)
            config.save(path)

            reloaded = Config(path)
            self.assertEqual(reloaded.get("solver.workers"), 4)

    def test_section_is_a_copy(self):
        """Test that section() does not expose internal state."""
        config = Config()
        section = config.section("solver")
        section["i_sr"] = 99
        self.assertEqual(config.get("solver.i_sr"), 10)
        self.assertEqual(config.section("missing"), {})


class TestSolverConfig(unittest.TestCase):
    """Test cases for the typed solver configuration."""

    def test_from_config_defaults(self):
        """Test that defaults mirror the solver section."""
        cfg = SolverConfig.from_config(Config())
        self.assertEqual(cfg, SolverConfig())

    def test_overrides(self):
        """Test that non-None overrides replace config values."""
        cfg = SolverConfig.from_config(
            Config(), epsilon_rel=0.0, workers=None, sample_reduction=False
        )
        self.assertEqual(cfg.epsilon_rel, 0.0)
        self.assertEqual(cfg.workers, 1)
        self.assertFalse(cfg.sample_reduction)

    def test_unknown_override(self):
        """Test that unknown settings are rejected."""
        with self.assertRaises(ConfigurationError):
            SolverConfig.from_config(Config(), not_a_setting=3)

    def test_validation(self):
        """Test range validation of numeric settings."""
        invalid = [
            {"epsilon_rel": -0.1},
            {"time_limit": 0.0},
            {"i_sr": 0},
            {"workers": 0},
            {"max_open_nodes": 0},
        ]
        for kwargs in invalid:
            with self.subTest(**kwargs):
                with self.assertRaises(ConfigurationError):
                    SolverConfig(**kwargs)


if __name__ == "__main__":
    unittest.main()
