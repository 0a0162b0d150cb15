"""Recursive log-weighted subtree mass.

For a node ``p`` with incoming edge weight ``w(p)`` and children ``C_p``::

    leaf:      W(p) = log_b(2 * w(p))
    literal:   W(p) = log_b(sum(w(q) * W(q) for q in C_p))
    stabilized W(p) = log_b(2 * sum(w(q) * W(q) for q in C_p))

The literal form hits log(0) on a unit-weight chain of three nodes, so the
stabilized form (leaf factor 2 applied at every level) is the default.  With
base 2 and integer weights >= 1 it keeps every W >= 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

from .errors import NonPositiveLogArgument

LITERAL = "literal"
STABILIZED = "stabilized"
MODES = (LITERAL, STABILIZED)


@dataclass(frozen=True)
class WeightConfig:
    mode: str = STABILIZED
    log_base: float = 2.0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not self.log_base > 1:
            raise ValueError(f"log_base must be > 1, got {self.log_base!r}")

    def as_meta(self) -> dict:
        return {"mode": self.mode, "log_base": self.log_base}

    def log(self, x: float) -> float:
        if self.log_base == 2:
            return math.log2(x)
        if self.log_base == 10:
            return math.log10(x)
        return math.log(x, self.log_base)


DEFAULT_CONFIG = WeightConfig()


def leaf_weight(weight: int, config: WeightConfig = DEFAULT_CONFIG) -> float:
    return config.log(2 * weight)


def internal_weight(
    child_terms: Iterable[tuple[int, float]],
    config: WeightConfig = DEFAULT_CONFIG,
    path=(),
) -> float:
    """W of an internal node from ``(edge weight, W)`` pairs of its children."""
    arg = math.fsum(w * W for w, W in child_terms)
    if config.mode == STABILIZED:
        arg *= 2
    if arg <= 0:
        raise NonPositiveLogArgument(path, arg)
    return config.log(arg)


def subtree_weight(node, config: WeightConfig = DEFAULT_CONFIG, *, root: bool = True) -> float:
    """W of the subtree rooted at ``node``; the empty tree (``None``) weighs 0.

    With ``root=True`` the node is treated as a tree root and its incoming edge
    weight is taken as 1 regardless of the stored value.

    Raises :class:`NonPositiveLogArgument` when a logarithm argument is <= 0.
    In stabilized mode this can only happen with a base above 2.
    """
    if node is None:
        return 0.0
    return _weight(node, config, (), 1 if root else node.weight)


def _weight(node, config, path, weight) -> float:
    if not node.children:
        return leaf_weight(weight, config)
    terms = [
        (child.weight, _weight(child, config, path + (i,), child.weight))
        for i, child in enumerate(node.children)
    ]
    return internal_weight(terms, config, path)


def weight_map(tree, config: WeightConfig = DEFAULT_CONFIG) -> dict[int, float]:
    """W for every node, keyed by ``id(node)``; the tree root uses weight 1."""
    out: dict[int, float] = {}

    def visit(node, path, weight):
        if not node.children:
            value = leaf_weight(weight, config)
        else:
            terms = []
            for i, child in enumerate(node.children):
                terms.append((child.weight, visit(child, path + (i,), child.weight)))
            value = internal_weight(terms, config, path)
        out[id(node)] = value
        return value

    if tree is not None:
        visit(tree, (), 1)
    return out


def root_weight(tree: Optional[object], config: WeightConfig = DEFAULT_CONFIG) -> float:
    return subtree_weight(tree, config)
