"""Session log parsing and session-tree construction.

Log format, one session per line::

    S01,student: doc_seed -> citation -> doc_1 -> citation -> doc_seed -> search

Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

from .errors import MalformedLine
from .tree import TreeNode, make_node

ARROW = "->"


@dataclass(frozen=True)
class SessionRecord:
    session_id: str
    group: str
    tokens: tuple[str, ...]

    def __post_init__(self):
        if not self.tokens:
            raise MalformedLine(f"session {self.session_id!r} has no tokens")
        for prev, cur in zip(self.tokens, self.tokens[1:]):
            if prev == cur:
                raise MalformedLine(
                    f"session {self.session_id!r}: self-transition on {cur!r}"
                )

    def to_line(self) -> str:
        return f"{self.session_id},{self.group}: {' -> '.join(self.tokens)}"


def _check_token(token: str, line: str, what: str) -> str:
    token = token.strip()
    if not token:
        raise MalformedLine(f"empty {what}", line)
    if any(ch in token for ch in ",:") or ARROW in token:
        raise MalformedLine(f"{what} {token!r} contains a reserved character", line)
    return token


def parse_session_line(line: str) -> SessionRecord:
    """Parse ``<id>,<group>: <token> -> <token> ...`` into a record."""
    head, sep, body = line.partition(":")
    if not sep:
        raise MalformedLine("missing ':' separator", line)
    sid, sep, group = head.partition(",")
    if not sep:
        raise MalformedLine("missing ',' between session id and group", line)
    sid = _check_token(sid, line, "session id")
    group = _check_token(group, line, "group")
    tokens = tuple(_check_token(t, line, "token") for t in body.split(ARROW))
    try:
        return SessionRecord(sid, group, tokens)
    except MalformedLine as exc:
        raise MalformedLine(str(exc), line) from None


def parse_session_lines(lines: Iterable[str]) -> Iterator[SessionRecord]:
    for lineno, line in enumerate(lines, start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        try:
            yield parse_session_line(stripped)
        except MalformedLine as exc:
            raise MalformedLine(str(exc), line, lineno) from None


def read_session_log(path) -> list[SessionRecord]:
    text = Path(path).read_text(encoding="utf-8")
    records = list(parse_session_lines(text.splitlines()))
    seen = set()
    for rec in records:
        if rec.session_id in seen:
            raise MalformedLine(f"duplicate session id {rec.session_id!r}")
        seen.add(rec.session_id)
    return records


def build_session_tree(record: SessionRecord) -> TreeNode:
    """Replay the token sequence into a canonically sorted session tree.

    The first token becomes the root.  A token seen before moves the cursor
    back to its node; a new token becomes a child of the cursor's node and
    the cursor moves onto it.
    """
    tokens = record.tokens
    children: dict[str, list[str]] = {tokens[0]: []}
    cursor = tokens[0]
    for token in tokens[1:]:
        if token not in children:
            children[cursor].append(token)
            children[token] = []
        cursor = token

    def build(token, weight):
        return make_node(weight, [build(c, 1) for c in children[token]], token)

    return build(tokens[0], 1)
