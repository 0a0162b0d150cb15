"""Two-sided Mann-Whitney U test and per-feature group comparison."""

from __future__ import annotations

import itertools
import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

log = logging.getLogger(__name__)

EXACT = "exact"
NORMAL = "normal_approx"
AUTO_EXACT_MAX_N = 20
# cap on label combinations enumerated for an exact test with ties
MAX_TIED_ENUMERATION = 2_000_000


@dataclass(frozen=True)
class TestResult:
    u_statistic: float
    n1: int
    n2: int
    p_value: float
    method: str
    alpha: float = 0.05
    degenerate: bool = False

    __test__ = False  # not a pytest class

    @property
    def significant(self) -> bool:
        return self.p_value <= self.alpha

    @property
    def u_other(self) -> float:
        return self.n1 * self.n2 - self.u_statistic


def midranks2(values: Sequence[float]) -> list[int]:
    """Twice the 1-based midrank of each value (integers even with ties)."""
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        # ranks i+1 .. j+1 averaged, doubled
        for k in range(i, j + 1):
            ranks[order[k]] = i + j + 2
        i = j + 1
    return ranks


def _u_count_distribution(n1: int, n2: int) -> list[int]:
    """Number of rank arrangements giving U = 0..n1*n2 (no ties)."""
    # f(m, n, u) = f(m - 1, n, u - n) + f(m, n - 1, u), built up over n
    prev = [[1] for _ in range(n1 + 1)]  # n = 0: only U = 0
    for n in range(1, n2 + 1):
        cur = [[1]]  # m = 0: only U = 0
        for m in range(1, n1 + 1):
            size = m * n + 1
            row = [0] * size
            for u, c in enumerate(prev[m]):
                row[u] += c
            for u, c in enumerate(cur[m - 1]):
                row[u + n] += c
            cur.append(row)
        prev = cur
    return prev[n1]


def _exact_p(a_ranks2: list[int], all_ranks2: list[int], n1: int, n2: int, ties: bool) -> float:
    # compare |2U - n1*n2| on the doubled scale; U = R1 - n1(n1+1)/2
    offset2 = n1 * (n1 + 1)
    observed = abs(sum(a_ranks2) - offset2 - n1 * n2)
    if not ties:
        dist = _u_count_distribution(n1, n2)
        hits = sum(c for u, c in enumerate(dist) if abs(2 * u - n1 * n2) >= observed)
        return min(1.0, hits / sum(dist))
    total = math.comb(n1 + n2, n1)
    if total > MAX_TIED_ENUMERATION:
        raise ValueError(
            f"exact test with ties needs {total} enumerations; use method='normal'"
        )
    hits = 0
    for combo in itertools.combinations(all_ranks2, n1):
        if abs(sum(combo) - offset2 - n1 * n2) >= observed:
            hits += 1
    return min(1.0, hits / total)


def _normal_p(u: float, n1: int, n2: int, tie_counts) -> float:
    n = n1 + n2
    mean = n1 * n2 / 2
    tie_term = sum(t**3 - t for t in tie_counts)
    var = n1 * n2 / 12 * ((n + 1) - tie_term / (n * (n - 1)))
    if var <= 0:
        return 1.0
    z = max(abs(u - mean) - 0.5, 0.0) / math.sqrt(var)
    return min(1.0, math.erfc(z / math.sqrt(2)))


def mann_whitney_u(a, b, method: str = "auto", alpha: float = 0.05) -> TestResult:
    """Two-sided Mann-Whitney U test; U is reported for the first sample.

    ``method`` is ``"auto"``, ``"exact"`` or ``"normal"``.  Auto uses the exact
    permutation distribution when n1 + n2 <= 20 and there are no ties, and the
    tie-corrected normal approximation with continuity correction otherwise.
    If every value is identical the result has ``p = 1`` and ``degenerate``
    set instead of raising.
    """
    a = [float(x) for x in a]
    b = [float(x) for x in b]
    n1, n2 = len(a), len(b)
    if n1 < 1 or n2 < 1:
        raise ValueError("both samples need at least one value")
    if method not in ("auto", "exact", "normal"):
        raise ValueError(f"unknown method {method!r}")
    pooled = a + b
    ranks2 = midranks2(pooled)
    u = sum(ranks2[:n1]) / 2 - n1 * (n1 + 1) / 2
    tie_counts = [c for c in Counter(pooled).values() if c > 1]
    ties = bool(tie_counts)

    if method == "auto":
        method = "exact" if (n1 + n2 <= AUTO_EXACT_MAX_N and not ties) else "normal"
    label = EXACT if method == "exact" else NORMAL

    if len(set(pooled)) == 1:
        return TestResult(u, n1, n2, 1.0, label, alpha, degenerate=True)
    if method == "exact":
        p = _exact_p(ranks2[:n1], ranks2, n1, n2, ties)
    else:
        p = _normal_p(u, n1, n2, tie_counts)
    return TestResult(u, n1, n2, p, label, alpha)


@dataclass(frozen=True)
class GroupComparison:
    feature: str
    result: Optional[TestResult]
    skipped: Optional[str] = None


def compare_groups(rows, method: str = "auto", alpha: float = 0.05) -> list[GroupComparison]:
    """Run one test per ``(feature, values_a, values_b)`` row, keeping input order.

    Rows with an empty side are reported as skipped rather than failing.
    """
    out = []
    for feature, values_a, values_b in rows:
        values_a, values_b = list(values_a), list(values_b)
        if not values_a or not values_b:
            side = "first" if not values_a else "second"
            log.info("skipping %s: %s group has no values", feature, side)
            out.append(GroupComparison(feature, None, f"{side} group empty"))
            continue
        out.append(GroupComparison(feature, mann_whitney_u(values_a, values_b, method, alpha)))
    return out


def comparison_table_csv(comparisons: list[GroupComparison]) -> str:
    lines = ["feature,U,n1,n2,p,method,significant"]
    for comp in comparisons:
        r = comp.result
        if r is None:
            lines.append(f"{comp.feature},-,-,-,-,skipped,-")
            continue
        lines.append(
            f"{comp.feature},{r.u_statistic:.2f},{r.n1},{r.n2},{r.p_value:.4g},"
            f"{r.method},{str(r.significant).lower()}"
        )
    return "\n".join(lines) + "\n"
