"""Reachability, production and universal reachability for chemical reaction
networks: classification, polynomial-time solvers for the tractable classes,
a bounded explicit-state oracle, certificates and reduction generators."""

from .classify import ClassificationProfile, Monotonicity, classify, feed_forward_order, leaf_rules, root_rules
from .core import REACH, UNIVERSAL, Crn, Instance, Problem, ProblemKind, Rule, apply_once, apply_run, rule_traits, volume
from .errors import CrnError, IllegalRun, NotApplicable, ParseError, PreconditionViolated
from .search import (
    Bound,
    Limits,
    OrderedCertificate,
    Verdict,
    decide_oracle,
    decide_production_oracle,
    decide_reach_oracle,
    decide_universal_oracle,
    explore,
    search_certificate,
    verify_certificate,
)
from .solvers import Decision, dispatch, run_method

__version__ = "0.1.0"

__all__ = [
    "REACH",
    "UNIVERSAL",
    "Bound",
    "ClassificationProfile",
    "Crn",
    "CrnError",
    "Decision",
    "IllegalRun",
    "Instance",
    "Limits",
    "Monotonicity",
    "NotApplicable",
    "OrderedCertificate",
    "ParseError",
    "PreconditionViolated",
    "Problem",
    "ProblemKind",
    "Rule",
    "Verdict",
    "apply_once",
    "apply_run",
    "classify",
    "decide_oracle",
    "decide_production_oracle",
    "decide_reach_oracle",
    "decide_universal_oracle",
    "dispatch",
    "explore",
    "feed_forward_order",
    "leaf_rules",
    "root_rules",
    "rule_traits",
    "run_method",
    "search_certificate",
    "verify_certificate",
    "volume",
]
