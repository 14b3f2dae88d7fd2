"""smforge: rewriting machines over group alphabets, their presentations and diagrams."""

from .core import (
    AdmissibleWord,
    Computation,
    FailsAtStep,
    Hardware,
    Machine,
    MachineError,
    NotAdmissible,
    NotNormalizable,
    Part,
    RawRule,
    Rule,
    RulePart,
    apply_rule,
    applicable_elements,
    canonical_step_history,
    is_theta_admissible,
    normalize_raw_rule,
    normalize_rules,
    parse_admissible,
    project_to_input,
    run,
    step_history,
)
from .words import Word, inv, mul, nth_root, parse_word, power

__version__ = "0.1.0"
