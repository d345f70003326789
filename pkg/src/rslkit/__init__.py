"""Parse, validate, transform and compose RSL-style requirement specifications."""

__version__ = "0.1.0"

from .diagnostics import Diagnostic, RslError, SourceSpan
from .model import (
    Actor, DataAttribute, DataEntity, GlossaryTerm, Goal, ImportDecl, QualifiedName,
    QualityRequirement, Scenario, SpecificationModel, Step, TestCase, UseCase, UserStory,
    add_element, canonicalize, new_model, resolve, structural_eq,
)
from .parser import ParseResult, parse, parse_file
from .formatter import format_model
from .patterns import LinguisticPattern, LinguisticStyle, pattern_for
from .config import CheckConfig
from .validator import ValidationReport, check_all, check_ambiguity, check_completeness, check_consistency
