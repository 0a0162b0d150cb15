"""Threshold subtrees, threshold curves and structural metrics of combined trees."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

from .errors import EmptyTree
from .tree import TreeNode, max_edge_weight
from .weights import DEFAULT_CONFIG, WeightConfig, subtree_weight


def prune_threshold(tree: Optional[TreeNode], threshold: int) -> Optional[TreeNode]:
    """Drop every edge lighter than ``threshold`` together with the subtree below it.

    The root always survives.  Child order is kept as is, so a canonical
    tree stays canonical only up to re-sorting; call ``canonical_sort`` if the
    pruned tree is merged again.
    """
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    if tree is None:
        return None

    def keep(node):
        kids = tuple(keep(c) for c in node.children if c.weight >= threshold)
        if len(kids) == len(node.children) and all(a is b for a, b in zip(kids, node.children)):
            return node
        return TreeNode(node.weight, kids, node.label)

    return keep(tree)


@dataclass(frozen=True)
class ThresholdCurve:
    points: tuple[tuple[int, int], ...]

    def to_csv(self) -> str:
        lines = ["threshold,nodes"]
        lines += [f"{t},{n}" for t, n in self.points]
        return "\n".join(lines) + "\n"


def threshold_curve(tree: Optional[TreeNode]) -> ThresholdCurve:
    """Nodes remaining after pruning at every threshold from 1 to max weight + 1."""
    if tree is None:
        return ThresholdCurve(())
    # a node survives threshold t iff every edge on its root path weighs >= t
    counts: dict[int, int] = {}
    top = max_edge_weight(tree)
    stack = [(tree, top + 1)]
    while stack:
        node, bottleneck = stack.pop()
        counts[bottleneck] = counts.get(bottleneck, 0) + 1
        for child in node.children:
            stack.append((child, min(bottleneck, child.weight)))
    points = []
    remaining = sum(counts.values())
    for t in range(1, top + 2):
        points.append((t, remaining))
        remaining -= counts.get(t, 0)
    return ThresholdCurve(tuple(points))


def threshold_for_fraction(fraction: float, n_sessions: int) -> int:
    """Smallest edge weight covering ``fraction`` of ``n_sessions`` (at least 1)."""
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    return max(1, math.ceil(fraction * n_sessions - 1e-12))


@dataclass
class TreeMetrics:
    node_count: int
    root_degree: int
    depth: int
    diameter: int
    per_level_breadth: list[int]
    leaf_count: int
    root_subtree_weight: float
    mode: str = "stabilized"
    log_base: float = 2.0

    def to_dict(self) -> dict:
        return asdict(self)


def _height_and_diameter(node: TreeNode) -> tuple[int, int]:
    if not node.children:
        return 0, 0
    heights = []
    diameter = 0
    for child in node.children:
        h, d = _height_and_diameter(child)
        heights.append(h + 1)
        diameter = max(diameter, d)
    heights.sort(reverse=True)
    through = heights[0] + (heights[1] if len(heights) > 1 else 0)
    return heights[0], max(diameter, through)


def tree_metrics(tree: Optional[TreeNode], config: WeightConfig = DEFAULT_CONFIG) -> TreeMetrics:
    if tree is None:
        raise EmptyTree("metrics of an empty tree are undefined")
    breadth: list[int] = []
    leaves = 0
    level = [tree]
    while level:
        breadth.append(len(level))
        leaves += sum(1 for n in level if not n.children)
        level = [c for n in level for c in n.children]
    height, diameter = _height_and_diameter(tree)
    return TreeMetrics(
        node_count=tree.size,
        root_degree=len(tree.children),
        depth=height,
        diameter=diameter,
        per_level_breadth=breadth,
        leaf_count=leaves,
        root_subtree_weight=subtree_weight(tree, config),
        mode=config.mode,
        log_base=config.log_base,
    )
