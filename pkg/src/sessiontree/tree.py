"""Immutable rooted ordered trees with edge weights.

A tree is a :class:`TreeNode` (its root) or ``None`` for the empty tree.
Every node stores the weight of the edge leading into it; the root's weight
is fixed at 1.  Labels ride along for debugging and never influence any
algorithm except as the very last deterministic tie-break between siblings
that are otherwise identical.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, Optional


@dataclass(frozen=True)
class TreeNode:
    weight: int = 1
    children: tuple["TreeNode", ...] = ()
    label: Optional[str] = None

    @cached_property
    def size(self) -> int:
        """Number of nodes in the subtree rooted here."""
        return 1 + sum(c.size for c in self.children)

    @cached_property
    def shape(self) -> str:
        """Label-free serialization: weight followed by the children's shapes."""
        if not self.children:
            return str(self.weight)
        return f"{self.weight}({','.join(c.shape for c in self.children)})"

    @cached_property
    def signature(self) -> str:
        """Like :attr:`shape` but including labels."""
        head = f"{self.weight}{json.dumps(self.label)}"
        if not self.children:
            return head
        return f"{head}({','.join(c.signature for c in self.children)})"

    @cached_property
    def sort_weight(self) -> float:
        # stabilized subtree weight with base 2; used only for sibling order
        if not self.children:
            return math.log2(2 * self.weight)
        return math.log2(2 * sum(c.weight * c.sort_weight for c in self.children))

    @cached_property
    def sort_key(self) -> tuple:
        return (-self.size, -round(self.sort_weight, 9), self.shape, self.signature)

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def walk(self) -> Iterator["TreeNode"]:
        """Pre-order traversal."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def edges(self) -> Iterator[tuple["TreeNode", "TreeNode"]]:
        for node in self.walk():
            for child in node.children:
                yield node, child

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "weight": self.weight,
            "children": [c.to_dict() for c in self.children],
        }


def make_node(weight: int, children=(), label: Optional[str] = None) -> TreeNode:
    """Build a node whose (already canonical) children are put in canonical order."""
    return TreeNode(weight, tuple(sorted(children, key=_key)), label)


def _key(node: TreeNode) -> tuple:
    return node.sort_key


def canonical_sort(tree: Optional[TreeNode]) -> Optional[TreeNode]:
    """Reorder children everywhere: larger subtrees first, then heavier, then by serialization.

    Idempotent.  Returns the input object itself when it is already canonical.
    """
    if tree is None:
        return None
    children = tuple(canonical_sort(c) for c in tree.children)
    ordered = tuple(sorted(children, key=_key))
    if all(a is b for a, b in zip(ordered, tree.children)):
        return tree
    return TreeNode(tree.weight, ordered, tree.label)


def tree_from_dict(data: dict) -> TreeNode:
    """Inverse of :meth:`TreeNode.to_dict`; performs no validation or sorting."""
    children = tuple(tree_from_dict(c) for c in data.get("children", ()))
    return TreeNode(data["weight"], children, data.get("label"))


def size(tree: Optional[TreeNode]) -> int:
    return 0 if tree is None else tree.size


def total_edge_weight(tree: Optional[TreeNode]) -> int:
    if tree is None:
        return 0
    return sum(child.weight for _, child in tree.edges())


def max_edge_weight(tree: Optional[TreeNode]) -> int:
    if tree is None:
        return 0
    return max((child.weight for _, child in tree.edges()), default=0)


def depth(tree: Optional[TreeNode]) -> int:
    """Largest root distance in edges (0 for a single node)."""
    if tree is None or not tree.children:
        return 0
    return 1 + max(depth(c) for c in tree.children)


def is_path_monotone(tree: Optional[TreeNode]) -> bool:
    """True when edge weights never increase going away from the root."""
    if tree is None:
        return True
    for parent, child in tree.edges():
        for grandchild in child.children:
            if grandchild.weight > child.weight:
                return False
    return True


def serialize(tree: Optional[TreeNode], meta: Optional[dict] = None) -> str:
    """Deterministic JSON text for a tree, optionally wrapped with metadata."""
    body = None if tree is None else tree.to_dict()
    if meta is not None:
        body = {"meta": meta, "tree": body}
    return json.dumps(body, sort_keys=True, separators=(",", ":"))
