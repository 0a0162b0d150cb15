"""Random session generators shared by the test modules."""

import random

from sessiontree.session import SessionRecord


def random_session(rng: random.Random, sid="S", max_nodes=40, max_fanout=8, group="g") -> SessionRecord:
    """Random-walk session log whose tree has <= max_nodes nodes and fan-out <= max_fanout."""
    target = rng.randint(1, max_nodes)
    tokens = ["n0"]
    parent = {"n0": None}
    fanout = {"n0": 0}
    cursor = "n0"
    steps = 0
    while len(parent) < target and steps < 10 * max_nodes:
        steps += 1
        if fanout[cursor] < max_fanout and rng.random() < 0.6:
            tok = f"n{len(parent)}"
            parent[tok] = cursor
            fanout[cursor] += 1
            fanout[tok] = 0
            cursor = tok
        else:
            # jump back to an earlier object
            choices = [t for t in parent if t != cursor]
            if not choices:
                continue
            cursor = rng.choice(choices)
        if tokens[-1] != cursor:
            tokens.append(cursor)
    return SessionRecord(sid, group, tuple(tokens))


def random_sessions(rng, n, **kw):
    return [random_session(rng, sid=f"S{i:02d}", **kw) for i in range(n)]
