"""
Test initialization module for the tests package
"""

import os
import sys

# Make ``src`` importable as a package when tests run from any directory
repo_root = os.path.join(os.path.dirname(__file__), '..')
if repo_root not in sys.path:
    sys.path.insert(0, repo_root)

# Full-size runs (full preset table, r = 4 sweeps) are opt-in
RUN_SLOW = os.environ.get('MLL_RUN_SLOW') == '1'
