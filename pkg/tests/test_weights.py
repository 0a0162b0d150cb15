import math

import pytest
from hypothesis import given, settings, strategies as st

from oracles import w_value, to_tuple
from sessiontree.errors import NonPositiveLogArgument
from sessiontree.tree import TreeNode
from sessiontree.weights import WeightConfig, subtree_weight, weight_map

LITERAL = WeightConfig("literal", 2.0)
STAB = WeightConfig()


def chain(n, weight=1):
    node = TreeNode(weight)
    for _ in range(n - 1):
        node = TreeNode(weight, (node,))
    return node


def star(k):
    return TreeNode(1, tuple(TreeNode(1) for _ in range(k)))


trees = st.recursive(
    st.integers(1, 4).map(lambda w: TreeNode(w)),
    lambda kids: st.tuples(st.integers(1, 4), st.lists(kids, min_size=1, max_size=4)).map(
        lambda p: TreeNode(p[0], tuple(p[1]))
    ),
    max_leaves=12,
)


def test_config_validation():
    with pytest.raises(ValueError):
        WeightConfig(log_base=1.0)
    with pytest.raises(ValueError):
        WeightConfig(mode="entropy")


@pytest.mark.parametrize("config", [LITERAL, STAB])
def test_unit_leaf(config):
    assert subtree_weight(TreeNode(1), config) == 1.0


def test_literal_chain_of_three_degenerates():
    with pytest.raises(NonPositiveLogArgument) as info:
        subtree_weight(chain(3), LITERAL)
    # W(a) = log2(1 * 1) = 0 so the root's argument is 1 * 0
    assert info.value.path == ()
    assert info.value.argument == 0.0


def test_literal_error_reports_nested_path():
    tree = TreeNode(1, (TreeNode(1), chain(4)))
    with pytest.raises(NonPositiveLogArgument) as info:
        subtree_weight(tree, LITERAL)
    assert info.value.path == (1, 0)


def test_literal_two_level_values():
    # leaf W = 1, parent W = log2(1 * 1) = 0
    assert subtree_weight(chain(2), LITERAL) == 0.0
    assert subtree_weight(star(4), LITERAL) == 2.0


def test_stabilized_star_of_two():
    assert subtree_weight(star(2), STAB) == 2.0


@pytest.mark.parametrize("k", range(1, 9))
def test_stabilized_star(k):
    assert subtree_weight(star(k), STAB) == pytest.approx(math.log2(2 * k), abs=1e-12)


@pytest.mark.parametrize("n", range(1, 12))
def test_stabilized_unit_chain_is_one_everywhere(n):
    tree = chain(n)
    assert all(v == 1.0 for v in weight_map(tree, STAB).values())


def test_root_weight_convention():
    assert subtree_weight(TreeNode(5), STAB) == 1.0
    assert subtree_weight(TreeNode(5), STAB, root=False) == pytest.approx(math.log2(10))
    assert subtree_weight(None, STAB) == 0.0


def test_base_changes_inner_recursion_not_just_scale():
    tree = TreeNode(1, (star(2), TreeNode(1)))
    b2 = subtree_weight(tree, WeightConfig(log_base=2))
    b10 = subtree_weight(tree, WeightConfig(log_base=10))
    assert b2 / b10 != pytest.approx(math.log2(10))


def test_stabilized_large_base_can_still_degenerate():
    with pytest.raises(NonPositiveLogArgument):
        subtree_weight(chain(6), WeightConfig(log_base=100))


@settings(max_examples=200, deadline=None)
@given(trees)
def test_stabilized_positive(tree):
    assert min(weight_map(tree, STAB).values()) >= 1.0 - 1e-12


@settings(max_examples=200, deadline=None)
@given(trees)
def test_matches_oracle(tree):
    assert subtree_weight(tree, STAB) == pytest.approx(w_value(to_tuple(tree), as_root=True), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_labels_do_not_matter(tree):
    def relabel(node, k=[0]):
        k[0] += 1
        return TreeNode(node.weight, tuple(relabel(c) for c in node.children), f"x{k[0]}")

    assert subtree_weight(relabel(tree), STAB) == subtree_weight(tree, STAB)


@settings(max_examples=200, deadline=None)
@given(trees)
def test_doubling_weights_increases_every_node(tree):
    def double(node):
        return TreeNode(2 * node.weight, tuple(double(c) for c in node.children))

    doubled = double(tree)
    before = [subtree_weight(n, STAB, root=False) for n in tree.walk()]
    after = [subtree_weight(n, STAB, root=False) for n in doubled.walk()]
    assert all(b2 > b1 for b1, b2 in zip(before, after))
