"""Tree JSON files and Graphviz DOT rendering."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import EmptyTree, InvariantViolation, MonotonicityWarning, ParseError
from .tree import TreeNode, is_path_monotone, max_edge_weight, serialize


def _from_json(obj, path=()) -> TreeNode:
    if not isinstance(obj, dict):
        raise ParseError(f"tree node at {list(path)} is not an object")
    weight = obj.get("weight")
    if isinstance(weight, bool) or not isinstance(weight, int):
        raise InvariantViolation(f"weight at {list(path)} must be an integer, got {weight!r}")
    if weight < 1:
        raise InvariantViolation(f"weight at {list(path)} must be >= 1, got {weight}")
    label = obj.get("label")
    if label is not None and not isinstance(label, str):
        raise ParseError(f"label at {list(path)} must be a string or null")
    children = obj.get("children", [])
    if not isinstance(children, list):
        raise ParseError(f"children at {list(path)} must be a list")
    kids = tuple(_from_json(c, path + (i,)) for i, c in enumerate(children))
    return TreeNode(weight, kids, label)


def loads_tree(text: str) -> tuple[Optional[TreeNode], dict]:
    """Parse tree JSON (bare node or ``{"meta": ..., "tree": ...}``); returns tree and meta."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    meta = {}
    if isinstance(data, dict) and "tree" in data and "weight" not in data:
        meta = data.get("meta") or {}
        data = data["tree"]
    if data is None:
        return None, meta
    tree = _from_json(data)
    if tree.weight != 1:
        raise InvariantViolation(f"root weight must be 1, got {tree.weight}")
    if not is_path_monotone(tree):
        warnings.warn("edge weights increase along a root-to-leaf path", MonotonicityWarning, stacklevel=2)
    return tree, meta


def load_tree(path) -> Optional[TreeNode]:
    return load_tree_with_meta(path)[0]


def load_tree_with_meta(path) -> tuple[Optional[TreeNode], dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from None
    return loads_tree(text)


def save_tree(tree: Optional[TreeNode], path, meta: Optional[dict] = None) -> None:
    Path(path).write_text(serialize(tree, meta) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class DotOptions:
    min_penwidth: float = 1.0
    max_penwidth: float = 8.0
    show_labels: bool = False

    def __post_init__(self):
        if not 0 < self.min_penwidth <= self.max_penwidth:
            raise ValueError("need 0 < min_penwidth <= max_penwidth")


def penwidth(weight: int, max_weight: int, options: DotOptions = DotOptions()) -> float:
    if max_weight <= 1:
        return options.min_penwidth
    span = options.max_penwidth - options.min_penwidth
    return options.min_penwidth + span * (weight - 1) / (max_weight - 1)


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(tree: Optional[TreeNode], options: DotOptions = DotOptions()) -> str:
    """DOT digraph with node ids in pre-order and edge thickness from the weight."""
    if tree is None:
        raise EmptyTree("cannot render an empty tree")
    top = max_edge_weight(tree)
    node_lines = []
    edge_lines = []
    stack = [(tree, None)]
    while stack:
        node, parent_id = stack.pop()
        node_id = f"n{len(node_lines)}"
        label = _quote(node.label or "") if options.show_labels else '""'
        node_lines.append(f"  {node_id} [label={label}];")
        if parent_id is not None:
            pw = penwidth(node.weight, top, options)
            edge_lines.append(
                f"  {parent_id} -> {node_id} "
                f'[penwidth={pw!r}, weight={node.weight}, tooltip="{node.weight}"];'
            )
        stack.extend((c, node_id) for c in reversed(node.children))
    lines = ["digraph session_tree {", "  node [shape=circle, width=0.2, fixedsize=true];"]
    lines += node_lines + edge_lines
    lines.append("}")
    return "\n".join(lines) + "\n"
