#!/usr/bin/env python3
"""
Unit tests for settings loading.
YAML defaults, fallback on broken files and TORSYM_* overrides.
"""

import os
import shutil
import sys
import tempfile
import unittest
from unittest.mock import patch

# Add the project root to the path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../../")))

from src.torsym.settings import TorsymSettings, load_settings, setup_environment  # noqa: E402


class TestLoadSettings(unittest.TestCase):
    """Test case for load_settings"""

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def write(self, text):
        path = os.path.join(self.temp_dir, "settings.yaml")
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_packaged_defaults(self):
        settings = load_settings()
        self.assertEqual(settings.size_guard, 12)
        self.assertEqual(settings.report_schema, "torsym-report/1")
        self.assertEqual(settings.exceptional_prefix, "E")

    def test_custom_file(self):
        settings = load_settings(self.write("size_guard: 5\nexceptional_prefix: X\n"))
        self.assertEqual(settings.size_guard, 5)
        self.assertEqual(settings.exceptional_prefix, "X")
        self.assertEqual(settings.log_level, "WARNING")

    def test_missing_file_falls_back(self):
        with self.assertLogs("torsym.settings", level="WARNING") as logs:
            settings = load_settings(os.path.join(self.temp_dir, "absent.yaml"))
        self.assertEqual(settings, TorsymSettings())
        self.assertTrue(any("Using default settings" in line for line in logs.output))

    def test_broken_yaml_falls_back(self):
        settings = load_settings(self.write("size_guard: [unclosed\n"))
        self.assertEqual(settings, TorsymSettings())

    def test_invalid_values_fall_back(self):
        settings = load_settings(self.write("size_guard: 0\n"))
        self.assertEqual(settings.size_guard, 12)

    def test_non_mapping_falls_back(self):
        settings = load_settings(self.write("- just\n- a list\n"))
        self.assertEqual(settings, TorsymSettings())

    def test_environment_overrides(self):
        settings = load_settings(environment={"size_guard": "20", "log_level": "debug"})
        self.assertEqual(settings.size_guard, 20)
        self.assertEqual(settings.log_level, "DEBUG")

    def test_exceptional_prefix_override(self):
        settings = load_settings(environment={"exceptional_prefix": "X"})
        self.assertEqual(settings.exceptional_prefix, "X")

    def test_bad_overrides_are_ignored(self):
        with self.assertLogs("torsym.settings", level="WARNING"):
            settings = load_settings(environment={"size_guard": "many", "log_level": "loud"})
        self.assertEqual(settings.size_guard, 12)
        self.assertEqual(settings.log_level, "WARNING")


class TestSetupEnvironment(unittest.TestCase):
    """Test case for setup_environment"""

    @patch.dict(os.environ, {"TORSYM_SIZE_GUARD": "7", "TORSYM_LOG_LEVEL": "INFO", "TORSYM_EXCEPTIONAL_PREFIX": "X"})
    def test_reads_torsym_variables(self):
        environment = setup_environment()
        self.assertEqual(environment, {"size_guard": "7", "log_level": "INFO", "exceptional_prefix": "X"})

    @patch.dict(os.environ, {}, clear=True)
    @patch("dotenv.load_dotenv")
    def test_loads_dotenv(self, mock_load_dotenv):
        environment = setup_environment()
        mock_load_dotenv.assert_called_once()
        self.assertEqual(environment, {"size_guard": None, "log_level": None, "exceptional_prefix": None})


if __name__ == "__main__":
    unittest.main()
