import pytest
from hypothesis import given, settings, strategies as st

from oracles import depth_bfs, diameter_allpairs, to_tuple
from sessiontree.analysis import (
    prune_threshold,
    threshold_curve,
    threshold_for_fraction,
    tree_metrics,
)
from sessiontree.errors import EmptyTree
from sessiontree.merge import merge_all, merge_pair
from sessiontree.tree import TreeNode, canonical_sort, max_edge_weight
from sessiontree.weights import WeightConfig

unit_trees = st.recursive(
    st.just(TreeNode(1)),
    lambda kids: st.lists(kids, min_size=1, max_size=4).map(lambda cs: canonical_sort(TreeNode(1, tuple(cs)))),
    max_leaves=10,
)
combined = st.lists(unit_trees, min_size=1, max_size=6).map(merge_all)
# arbitrary weights, monotone or not
any_weights = st.recursive(
    st.integers(1, 5).map(lambda w: TreeNode(w)),
    lambda kids: st.tuples(st.integers(1, 5), st.lists(kids, min_size=1, max_size=4)).map(
        lambda p: TreeNode(p[0], tuple(p[1]))
    ),
    max_leaves=12,
).map(lambda t: TreeNode(1, t.children))


def test_prune_identity_and_root_only(example_trees):
    merged = merge_all(example_trees)
    assert prune_threshold(merged, 1) is merged
    top = max_edge_weight(merged)
    assert prune_threshold(merged, top + 1) == TreeNode(1, (), merged.label)


def test_prune_merged_example_at_two(example_trees):
    merged = merge_all(example_trees)
    pruned = prune_threshold(merged, 2)
    # oracle merge is 1(3(3,2),1(1),3): the branch used by one session goes
    assert pruned.shape == "1(3(3,2),3)"
    assert all(c.weight >= 2 for _, c in pruned.edges())
    assert pruned.size == sum(1 for _, c in merged.edges() if c.weight >= 2) + 1


def test_prune_rejects_zero():
    with pytest.raises(ValueError):
        prune_threshold(TreeNode(1), 0)


def test_prune_cuts_whole_subtree_below_light_edge():
    t = TreeNode(1, (TreeNode(1, (TreeNode(5),)), TreeNode(3)))
    assert prune_threshold(t, 2) == TreeNode(1, (TreeNode(3),))


def test_curve_single_session(example_trees):
    s3 = example_trees[2]
    assert threshold_curve(s3).points == ((1, 7), (2, 1))
    assert threshold_curve(TreeNode(1)).points == ((1, 1),)
    assert threshold_curve(None).points == ()


def test_curve_merged_pair(example_trees):
    merged = merge_pair(example_trees[0], example_trees[1])
    assert threshold_curve(merged).points == ((1, 5), (2, 4), (3, 1))


def test_curve_csv(example_trees):
    merged = merge_pair(example_trees[0], example_trees[1])
    assert threshold_curve(merged).to_csv() == "threshold,nodes\n1,5\n2,4\n3,1\n"


@pytest.mark.parametrize("fraction,n,expected", [(0.5, 32, 16), (0.5, 33, 17), (0.75, 16, 12), (1.0, 3, 3), (0.01, 3, 1)])
def test_threshold_for_fraction(fraction, n, expected):
    assert threshold_for_fraction(fraction, n) == expected


def test_metrics_single_node():
    m = tree_metrics(TreeNode(1))
    assert (m.node_count, m.depth, m.diameter, m.root_degree, m.leaf_count) == (1, 0, 0, 0, 1)
    assert m.per_level_breadth == [1]


def test_metrics_session2(example_trees):
    m = tree_metrics(example_trees[1])
    assert (m.node_count, m.depth, m.diameter, m.root_degree) == (5, 2, 3, 2)
    assert m.per_level_breadth == [1, 2, 2]
    assert m.leaf_count == 3
    assert diameter_allpairs(to_tuple(example_trees[1])) == 3


@pytest.mark.parametrize("n", [1, 2, 5, 9])
def test_metrics_chain(n):
    node = TreeNode(1)
    for _ in range(n - 1):
        node = TreeNode(1, (node,))
    m = tree_metrics(node)
    assert m.depth == m.diameter == n - 1


def test_metrics_stamp_config(example_trees):
    m = tree_metrics(example_trees[0], WeightConfig("stabilized", 2.0))
    assert m.root_subtree_weight == 2.0
    d = m.to_dict()
    assert d["mode"] == "stabilized" and d["log_base"] == 2.0


def test_metrics_empty():
    with pytest.raises(EmptyTree):
        tree_metrics(None)


@settings(max_examples=150, deadline=None)
@given(combined)
def test_curve_matches_prune(tree):
    curve = threshold_curve(tree)
    for t, n in curve.points:
        assert prune_threshold(tree, t).size == n
    counts = [n for _, n in curve.points]
    assert counts == sorted(counts, reverse=True)
    assert counts[0] == tree.size and counts[-1] == 1


@settings(max_examples=150, deadline=None)
@given(any_weights)
def test_curve_matches_prune_without_monotonicity(tree):
    for t, n in threshold_curve(tree).points:
        assert prune_threshold(tree, t).size == n


@settings(max_examples=150, deadline=None)
@given(any_weights, st.integers(1, 7), st.integers(1, 7))
def test_prune_composes(tree, a, b):
    assert prune_threshold(prune_threshold(tree, a), b) == prune_threshold(tree, max(a, b))


@settings(max_examples=150, deadline=None)
@given(any_weights)
def test_metrics_against_bfs(tree):
    m = tree_metrics(tree)
    tup = to_tuple(tree)
    assert m.diameter == diameter_allpairs(tup)
    assert m.depth == depth_bfs(tup)
    assert m.depth <= m.diameter <= 2 * m.depth
    assert sum(m.per_level_breadth) == m.node_count
