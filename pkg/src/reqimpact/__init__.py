"""Rule-driven change propagation for requirements models with architecture impact."""

from .changes import Change, ChangeType, Rationale, apply_change, change_from_dict, check_change_wellformed
from .impact import (
    CandidateElement,
    ImpactResult,
    Outcome,
    candidates_from,
    impact,
    impact_of_added_requirement,
    impact_report,
    session_impact,
    traverse,
)
from .model import (
    ArchElement,
    ArchitectureModel,
    Direction,
    Relation,
    RelationKind,
    Requirement,
    RequirementsModel,
    Trace,
    TraceKind,
    TraceModel,
    neighbors,
    validate_requirements_model,
    validate_trace_model,
)
from .propagation import (
    NodeStatus,
    PropagationPath,
    Session,
    choose,
    is_complete,
    path,
    pending_decisions,
    replay,
    session_from_dict,
    session_to_dict,
    start_session,
)
from .rules import AtomicEdit, RuleSet, default_rules, load_rules, lookup_alternatives, validate_rules

__version__ = "1.0.0"
