"""Command-line front end: scenario files, output writers and the entry point."""

from .main import main
from .scenario import Scenario, load_scenario, parse_scenario

__all__ = ["main", "Scenario", "load_scenario", "parse_scenario"]
