"""Optimal pairwise merge of weighted trees and the sorted merge fold.

Two trees are merged from their roots down.  At every pair of merged nodes
the children of both sides are matched; matched children are merged
recursively (their edge weights add up) and unmatched children are carried
over.  Among all partial matchings the one giving

1. the fewest nodes in the merged subtree, then
2. the largest subtree weight ``W`` of the merged node, then
3. the smallest label-free canonical serialization

is chosen.  Labels never take part in the search; when several optimal
matchings give the same shape, the first one in canonical child order wins.

Because a matched pair always saves at least one node, only
matchings of maximum cardinality can satisfy (1), and both the node count
and the argument of ``W`` decompose into a sum over matched pairs.  The
search below is therefore a depth-first enumeration of maximum matchings
with an admissible per-row upper bound, which returns exactly what full
enumeration over all partial matchings would.
"""

from __future__ import annotations

import logging
from typing import Iterable, Optional, Sequence

from .errors import CombinatorialBudgetExceeded
from .tree import TreeNode, canonical_sort, make_node
from .weights import DEFAULT_CONFIG, WeightConfig, leaf_weight, internal_weight, subtree_weight

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 10**7
# relative tolerance under which two W values count as tied
W_TOLERANCE = 1e-9


def merge_labels(x: Optional[str], y: Optional[str]) -> Optional[str]:
    parts = set()
    for label in (x, y):
        if label:
            parts.update(label.split("|"))
    return "|".join(sorted(parts)) or None


class _Merger:
    def __init__(self, config: WeightConfig, budget: int, greedy_fallback: bool):
        self.config = config
        self.budget = budget
        self.greedy_fallback = greedy_fallback
        self.greedy = False
        self.evaluated = 0
        self._memo: dict = {}
        self._w: dict = {}

    def weight_of(self, node: TreeNode) -> float:
        """W of a non-root node, using its own incoming edge weight."""
        hit = self._w.get(id(node))
        if hit is not None:
            return hit[1]
        if not node.children:
            value = leaf_weight(node.weight, self.config)
        else:
            value = internal_weight(
                [(c.weight, self.weight_of(c)) for c in node.children], self.config
            )
        self._w[id(node)] = (node, value)
        return value

    def merge(self, a: TreeNode, b: TreeNode, weight: int) -> TreeNode:
        key = (id(a), id(b), weight)
        hit = self._memo.get(key)
        if hit is not None:
            return hit[2]
        label = merge_labels(a.label, b.label)
        if not a.children or not b.children:
            node = make_node(weight, a.children + b.children, label)
        else:
            node = self._merge_children(a.children, b.children, weight, label)
        self._memo[key] = (a, b, node)
        return node

    def _merge_children(self, A, B, weight, label) -> TreeNode:
        if self.greedy:
            return self._greedy(A, B, weight, label)

        table = [[self.merge(x, y, x.weight + y.weight) for y in B] for x in A]
        score = []
        for i, x in enumerate(A):
            wx = x.weight * self.weight_of(x)
            row = []
            for j, y in enumerate(B):
                m = table[i][j]
                saved = x.size + y.size - m.size
                gain = m.weight * self.weight_of(m) - wx - y.weight * self.weight_of(y)
                row.append((saved, gain))
            score.append(row)

        flipped = len(A) > len(B)
        if flipped:
            rows, cols = B, A
            score = [list(col) for col in zip(*score)]
        else:
            rows, cols = A, B

        try:
            assignments = self._search(rows, cols, score)
        except CombinatorialBudgetExceeded:
            if not self.greedy_fallback:
                raise
            log.warning("matching budget %d exhausted; switching to greedy pairing", self.budget)
            self.greedy = True
            return self._greedy(A, B, weight, label)

        best = None
        for assignment in assignments:
            pairs = [(c, r) if flipped else (r, c) for r, c in enumerate(assignment)]
            node = self._assemble(A, B, pairs, table, weight, label)
            # equal shapes keep the first assignment found, which is fixed by the
            # canonical child order
            if best is None or node.shape < best.shape:
                best = node
        return best

    def _assemble(self, A, B, pairs, table, weight, label) -> TreeNode:
        used_a = {i for i, _ in pairs}
        used_b = {j for _, j in pairs}
        children = [table[i][j] for i, j in pairs]
        children += [x for i, x in enumerate(A) if i not in used_a]
        children += [y for j, y in enumerate(B) if j not in used_b]
        return make_node(weight, children, label)

    def _greedy(self, A, B, weight, label) -> TreeNode:
        # children are in canonical order, so this pairs largest with largest
        k = min(len(A), len(B))
        children = [self.merge(A[i], B[i], A[i].weight + B[i].weight) for i in range(k)]
        children += list(A[k:]) + list(B[k:])
        return make_node(weight, children, label)

    def _search(self, rows, cols, score) -> list[tuple[int, ...]]:
        """All optimal row->column assignments (every row matched), up to ties in W."""
        n_rows, n_cols = len(rows), len(cols)
        row_same_as_prev = [
            r > 0 and rows[r].shape == rows[r - 1].shape for r in range(n_rows)
        ]
        col_class = {}
        col_cls = [col_class.setdefault(c.shape, len(col_class)) for c in cols]

        used = [False] * n_cols
        chosen = [0] * n_rows
        best = [None, None]  # saved, gain
        ties: list[tuple[tuple[int, int], float]] = []

        def tol(g):
            return W_TOLERANCE * max(1.0, abs(g))

        def bound(r):
            bs, bg = 0, 0.0
            for rr in range(r, n_rows):
                top = None
                for c in range(n_cols):
                    if not used[c]:
                        s = score[rr][c]
                        if top is None or s > top:
                            top = s
                bs += top[0]
                bg += top[1]
            return bs, bg

        def dfs(r, saved, gain):
            self.evaluated += 1
            if self.evaluated > self.budget:
                raise CombinatorialBudgetExceeded(self.budget)
            if r == n_rows:
                if best[0] is None or saved > best[0] or (
                    saved == best[0] and gain > best[1] + tol(best[1])
                ):
                    best[0], best[1] = saved, gain
                    ties.clear()
                    ties.append((tuple(chosen), gain))
                elif saved == best[0] and gain >= best[1] - tol(best[1]):
                    best[1] = max(best[1], gain)
                    ties.append((tuple(chosen), gain))
                return
            if best[0] is not None:
                bs, bg = bound(r)
                if saved + bs < best[0] or (
                    saved + bs == best[0] and gain + bg < best[1] - tol(best[1])
                ):
                    return
            tried = set()
            start = chosen[r - 1] + 1 if row_same_as_prev[r] else 0
            for c in range(start, n_cols):
                if used[c] or col_cls[c] in tried:
                    continue
                tried.add(col_cls[c])
                used[c] = True
                chosen[r] = c
                s, g = score[r][c]
                dfs(r + 1, saved + s, gain + g)
                used[c] = False

        dfs(0, 0, 0.0)
        cutoff = best[1] - tol(best[1])
        return [a for a, g in ties if g >= cutoff]


def merge_pair(
    a: Optional[TreeNode],
    b: Optional[TreeNode],
    config: WeightConfig = DEFAULT_CONFIG,
    *,
    budget: int = DEFAULT_BUDGET,
    greedy_fallback: bool = False,
) -> Optional[TreeNode]:
    """Merge two trees into one combined tree.

    Either side may be ``None`` (the empty tree), which is the identity.
    Raises :class:`CombinatorialBudgetExceeded` once more than ``budget``
    partial matchings have been evaluated, unless ``greedy_fallback`` is set,
    in which case the remaining node pairs are matched largest-first.
    """
    merger = _Merger(config, budget, greedy_fallback)
    return _merge_pair(merger, a, b)


def _merge_pair(merger, a, b):
    if a is None or b is None:
        tree = canonical_sort(a if b is None else b)
        if tree is not None and tree.weight != 1:
            tree = TreeNode(1, tree.children, tree.label)
        return tree
    return merger.merge(canonical_sort(a), canonical_sort(b), 1)


def merge_order(trees: Iterable[Optional[TreeNode]], config: WeightConfig = DEFAULT_CONFIG) -> list[TreeNode]:
    """Non-empty trees in ascending order of root subtree weight.

    Ties fall back to the canonical serialization, so the order depends only
    on the multiset of trees.
    """
    items = [canonical_sort(t) for t in trees if t is not None]
    keyed = [((subtree_weight(t, config), t.shape, t.signature), t) for t in items]
    keyed.sort(key=lambda kv: kv[0])
    return [t for _, t in keyed]


def merge_all(
    trees: Sequence[Optional[TreeNode]],
    config: WeightConfig = DEFAULT_CONFIG,
    *,
    budget: int = DEFAULT_BUDGET,
    greedy_fallback: bool = False,
) -> Optional[TreeNode]:
    """Fold :func:`merge_pair` over the trees, lightest first, starting from the empty tree."""
    result = None
    for tree in merge_order(trees, config):
        result = merge_pair(result, tree, config, budget=budget, greedy_fallback=greedy_fallback)
    return result
