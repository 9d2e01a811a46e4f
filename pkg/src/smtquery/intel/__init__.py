"""Per-node intelligence computed bottom-up over the expression trees."""

from smtquery.intel.core import IntelSpec, annotate, compute_intel, script_value
from smtquery.intel.probes import (
    BUILTIN_SPECS, HIGHER_ORDER, KINDS, REGEX_SHAPE, UPPER_BOUNDS, VAR_COUNTS, WEQ_FORMS,
    KindFlags, RegexShapeValue, constraint_kinds, is_linear_length_constraint,
    is_word_equation, regex_classification, regex_max_length, upper_bounds,
    variable_counts, word_equation_forms,
)

__all__ = [
    "IntelSpec", "annotate", "compute_intel", "script_value", "BUILTIN_SPECS",
    "HIGHER_ORDER", "KINDS", "REGEX_SHAPE", "UPPER_BOUNDS", "VAR_COUNTS", "WEQ_FORMS",
    "KindFlags", "RegexShapeValue", "constraint_kinds", "is_linear_length_constraint",
    "is_word_equation", "regex_classification", "regex_max_length", "upper_bounds",
    "variable_counts", "word_equation_forms",
]
