from .base import (
    FeedbackClassError,
    InfoClass,
    PayoffFeedback,
    PlayerContext,
    Rule,
    RuleError,
    UncoupledFeedback,
    sample_box_simplex,
)
from .fictitious import FictitiousPlay
from .pure import SimplePure, TwoRecall
from .regret_matching import (
    ModifiedRegretMatching,
    RegretMatching,
    modified_rm_probs,
    regret_matching_probs,
)
from .regret_testing import (
    TRIGGERS,
    Alert,
    AlertSchedule,
    ExperimentalRegretTesting,
    PayoffAlert,
    alert_decision,
    ert_decision,
)
from .spec import REGISTRY, parse_rule, parse_rules, split_rule_list
from .trial_error import MOODS, PhiFunction, TrialAndError, te_transition

__all__ = [
    "MOODS", "REGISTRY", "TRIGGERS",
    "Alert", "AlertSchedule", "ExperimentalRegretTesting", "FeedbackClassError", "FictitiousPlay",
    "InfoClass", "ModifiedRegretMatching", "PayoffAlert", "PayoffFeedback", "PhiFunction",
    "PlayerContext", "RegretMatching", "Rule", "RuleError", "SimplePure", "TrialAndError",
    "TwoRecall", "UncoupledFeedback",
    "alert_decision", "ert_decision", "modified_rm_probs", "parse_rule", "parse_rules",
    "regret_matching_probs", "sample_box_simplex", "split_rule_list", "te_transition",
]
