"""Session trees: build them from search logs, merge them, mine common patterns."""

__version__ = "0.1.0"

from .analysis import ThresholdCurve, TreeMetrics, prune_threshold, threshold_curve, tree_metrics
from .errors import (
    CombinatorialBudgetExceeded,
    EmptyTree,
    InvariantViolation,
    MalformedLine,
    NonPositiveLogArgument,
    ParseError,
)
from .export import DotOptions, export_dot, load_tree, save_tree
from .merge import merge_all, merge_pair
from .session import SessionRecord, build_session_tree, parse_session_line, read_session_log
from .stats import TestResult, compare_groups, mann_whitney_u
from .tree import TreeNode, canonical_sort, make_node
from .weights import WeightConfig, subtree_weight
