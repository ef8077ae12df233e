"""
Test module for settings and run configuration
"""

import json
import os
import shutil
import sys
import tempfile
import unittest
from fractions import Fraction
from unittest.mock import patch

from pydantic import ValidationError

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))

from src.config import RunConfig, Settings, load_settings


class TestSettings(unittest.TestCase):
    """Test cases for layered Settings"""

    def setUp(self):
        """Set up test fixtures"""
        self.temp_dir = tempfile.mkdtemp()
        self.config_path = os.path.join(self.temp_dir, 'mll.json')

    def tearDown(self):
        """Clean up test fixtures"""
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def _write_config(self, values):
        with open(self.config_path, 'w') as f:
            json.dump(values, f)

    @patch.dict(os.environ, {}, clear=True)
    def test_defaults(self):
        """Test default values"""
        settings = Settings()
        self.assertIsNone(settings.workers)
        self.assertEqual(settings.quad_order, 40)
        self.assertEqual(settings.rtol, 1e-14)
        self.assertEqual(settings.enumeration_vertex_cap, 10)
        self.assertGreaterEqual(settings.effective_workers, 1)

    @patch.dict(os.environ, {'MLL_WORKERS': '3', 'MLL_QUAD_ORDER': '24'}, clear=True)
    def test_environment_overrides(self):
        """Test MLL_* environment variables"""
        settings = Settings()
        self.assertEqual(settings.workers, 3)
        self.assertEqual(settings.effective_workers, 3)
        self.assertEqual(settings.quad_order, 24)

    @patch.dict(os.environ, {}, clear=True)
    def test_config_file(self):
        """Test values loaded from a JSON file"""
        self._write_config({'quad_order': 20, 'budget_seconds': 5})
        settings = load_settings(self.config_path)
        self.assertEqual(settings.quad_order, 20)
        self.assertEqual(settings.budget_seconds, 5)

    @patch.dict(os.environ, {'MLL_WORKERS': '2'}, clear=True)
    def test_environment_wins_over_file(self):
        """Test the defaults <- file <- environment layering"""
        self._write_config({'workers': 7, 'quad_order': 20})
        settings = load_settings(self.config_path)
        self.assertEqual(settings.workers, 2)
        self.assertEqual(settings.quad_order, 20)

    def test_missing_config_file(self):
        """Test that a missing file raises"""
        with self.assertRaises(FileNotFoundError):
            load_settings(os.path.join(self.temp_dir, 'absent.json'))

    @patch.dict(os.environ, {'MLL_WORKERS': '0'}, clear=True)
    def test_invalid_environment_value(self):
        """Test that out-of-range values are rejected"""
        with self.assertRaises(ValidationError):
            Settings()


class TestRunConfig(unittest.TestCase):
    """Test cases for RunConfig validation"""

    def test_comma_lists(self):
        """Test parsing of comma-separated integers and reals"""
        config = RunConfig(subcommand='moments-verify', r=2, alpha='-0.5,1.3', x='0,0.7', n='2,1')
        self.assertEqual(config.n, [2, 1])
        self.assertEqual(config.alpha, [Fraction(-1, 2), Fraction(13, 10)])
        self.assertEqual(config.x, [Fraction(0), Fraction(7, 10)])

    def test_multi_index(self):
        """Test conversion to MultiIndex"""
        config = RunConfig(subcommand='eval', r=2, n='1,1')
        self.assertEqual(config.multi_index('n').parts, (1, 1))
        with self.assertRaises(ValueError):
            RunConfig(subcommand='eval').multi_index('n')

    def test_length_mismatch(self):
        """Test that list lengths must match r"""
        with self.assertRaises(ValidationError):
            RunConfig(subcommand='eval', r=2, n='1')
        with self.assertRaises(ValidationError):
            RunConfig(subcommand='moments-verify', r=1, alpha='0,1')

    def test_precondition_violations(self):
        """Test alpha <= -1, negative x, zero k and bad formats"""
        with self.assertRaises(ValidationError):
            RunConfig(subcommand='moments-verify', alpha='-1')
        with self.assertRaises(ValidationError):
            RunConfig(subcommand='moments-verify', alpha='0', x='-0.5')
        with self.assertRaises(ValidationError):
            RunConfig(subcommand='hankel-verify', k='0,0', N=3)
        with self.assertRaises(ValidationError):
            RunConfig(subcommand='hankel-verify', k='1', N=3, max_minor_order=4)
        with self.assertRaises(ValidationError):
            RunConfig(subcommand='eval', n='1,x')
        with self.assertRaises(ValidationError):
            RunConfig(subcommand='eval', n='1', format='xml')

    def test_arities(self):
        """Test --r versus --r-max"""
        self.assertEqual(RunConfig(subcommand='combi-verify', r=3).arities(), [3])
        self.assertEqual(RunConfig(subcommand='combi-verify', r_max=2).arities(), [1, 2])
        with self.assertRaises(ValueError):
            RunConfig(subcommand='combi-verify').arities()


if __name__ == '__main__':
    unittest.main()
