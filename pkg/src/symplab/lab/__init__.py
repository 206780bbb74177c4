"""Scenarios, random fields, verification suites and the command line."""
from .report import Check, Record, Report, SuiteReport, emit_report
from .scenario import Scenario, dump_scenario, load_scenario, scenario_from_dict, SUITES
from .suites import run_suite

__all__ = ["Check", "Record", "Report", "SuiteReport", "emit_report", "Scenario",
           "dump_scenario", "load_scenario", "scenario_from_dict", "SUITES", "run_suite"]
