"""memforge: a workbench for P systems with active membranes."""

from .engine import EngineOptions, StepEvents, seeded_step, step_successors
from .explorer import LanguageSample, Limits, RunReport, explore, random_run
from .grammars import MatrixGrammar, parse_mg, serialize_mg
from .machines import RegisterMachine, parse_rm, serialize_rm
from .model import Configuration, Membrane, Multiset, PSystem, build, canonical_key, lop_signature
from .psys import ValidationReport, parse_psystem, serialize_psystem, validate_psystem

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "EngineOptions",
    "LanguageSample",
    "Limits",
    "MatrixGrammar",
    "Membrane",
    "Multiset",
    "PSystem",
    "RegisterMachine",
    "RunReport",
    "StepEvents",
    "ValidationReport",
    "build",
    "canonical_key",
    "explore",
    "lop_signature",
    "parse_mg",
    "parse_psystem",
    "parse_rm",
    "random_run",
    "seeded_step",
    "serialize_mg",
    "serialize_psystem",
    "serialize_rm",
    "step_successors",
    "validate_psystem",
]
