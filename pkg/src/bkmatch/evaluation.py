"""Alignment scoring: confusion counts, P/R/F1, paired significance, impact.

Significance between two system alignments uses the paired-decision
contingency counts over the union of proposals and the reference. Small
discordant totals get the exact binomial tail; larger ones the
continuity-corrected chi-square approximation.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Mapping, Sequence

from bkmatch.model import Alignment

# below this many discordant decisions the exact test replaces the
# chi-square approximation
SMALL_SAMPLE_LIMIT = 25


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def confusion(alignment: Alignment, reference: Alignment) -> ConfusionCounts:
    """Cell-level counts; identity is the (source, target, relation) key."""
    keys = alignment.keys()
    ref_keys = reference.keys()
    tp = len(keys & ref_keys)
    return ConfusionCounts(tp, len(keys) - tp, len(ref_keys) - tp)


def prf(counts: ConfusionCounts, empty_is_perfect: bool = False) -> tuple[float, float, float]:
    """Precision, recall, F1. 0/0 ratios are 0 by default.

    With empty_is_perfect, an empty alignment scored against an empty
    reference counts as a perfect run instead.
    """
    if empty_is_perfect and counts.tp == counts.fp == counts.fn == 0:
        return (1.0, 1.0, 1.0)
    precision = counts.tp / (counts.tp + counts.fp) if counts.tp + counts.fp else 0.0
    recall = counts.tp / (counts.tp + counts.fn) if counts.tp + counts.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return (precision, recall, f1)


class AggregateMode(Enum):
    MICRO = "micro"
    MACRO = "macro"


def aggregate(
    counts: Sequence[ConfusionCounts], mode: AggregateMode
) -> tuple[float, float, float]:
    """Micro sums counts before scoring; macro averages per-case scores."""
    if not counts:
        raise ValueError("aggregate needs at least one test case")
    if mode is AggregateMode.MICRO:
        total = ConfusionCounts()
        for c in counts:
            total = total + c
        return prf(total)
    scores = [prf(c) for c in counts]
    return (
        sum(s[0] for s in scores) / len(scores),
        sum(s[1] for s in scores) / len(scores),
        sum(s[2] for s in scores) / len(scores),
    )


@dataclass(frozen=True)
class ContingencyCounts:
    """Discordant decision counts between two systems against a reference.

    n01 counts decisions system 2 got right and system 1 got wrong;
    n10 the reverse.
    """

    n01: int
    n10: int

    def __post_init__(self) -> None:
        if self.n01 < 0 or self.n10 < 0:
            raise ValueError("contingency counts must be non-negative")

    @property
    def n(self) -> int:
        return self.n01 + self.n10


def mcnemar_counts(a1: Alignment, a2: Alignment, reference: Alignment) -> ContingencyCounts:
    k1, k2, kr = a1.keys(), a2.keys(), reference.keys()
    n01 = len((k2 & kr) - k1) + len(k1 - k2 - kr)
    n10 = len((k1 & kr) - k2) + len(k2 - k1 - kr)
    return ContingencyCounts(n01, n10)


class McNemarVariant(Enum):
    ASYMPTOTIC_CC = "asymptotic-cc"
    EXACT = "exact"


@dataclass(frozen=True)
class SignificanceResult:
    test_used: McNemarVariant
    statistic: float | None
    p_value: float
    significant: bool


def _chi_square_survival(statistic: float) -> float:
    # survival function of chi-square with one degree of freedom
    return math.erfc(math.sqrt(statistic / 2.0))


def _binomial_tail(start: int, n: int) -> float:
    # exact integer accumulation, one float division at the end
    total = sum(math.comb(n, x) for x in range(start, n + 1))
    return total / 2**n


def mcnemar_test(
    counts: ContingencyCounts, alpha: float = 0.05, *, two_sided: bool = False
) -> SignificanceResult:
    """Paired significance between two systems.

    The default exact tail sums from n01 upward (one-sided); two_sided
    doubles the tail anchored at the larger count, capped at 1. Zero
    discordant decisions give p = 1.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    n = counts.n
    if n >= SMALL_SAMPLE_LIMIT:
        statistic = (abs(counts.n01 - counts.n10) - 1) ** 2 / n
        p_value = _chi_square_survival(statistic)
        return SignificanceResult(
            McNemarVariant.ASYMPTOTIC_CC, statistic, p_value, p_value < alpha
        )
    if n == 0:
        p_value = 1.0
    elif two_sided:
        p_value = min(1.0, 2.0 * _binomial_tail(max(counts.n01, counts.n10), n))
    else:
        p_value = _binomial_tail(counts.n01, n)
    return SignificanceResult(McNemarVariant.EXACT, None, p_value, p_value < alpha)


@dataclass(frozen=True)
class SignificanceMatrix:
    names: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]


def significance_matrix(
    alignments: Mapping[str, Sequence[Alignment]],
    references: Sequence[Alignment],
    alpha: float = 0.05,
) -> SignificanceMatrix:
    """Pairwise count of test cases with a significant difference.

    Every configuration must supply one alignment per reference test
    case. Each unordered pair is evaluated once (first-listed system as
    system 1) and mirrored, so the matrix is symmetric with a zero
    diagonal.
    """
    names = tuple(alignments)
    for name in names:
        if len(alignments[name]) != len(references):
            raise ValueError(
                f"configuration {name!r} has {len(alignments[name])} alignments "
                f"for {len(references)} test cases"
            )
    size = len(names)
    cells = [[0] * size for _ in range(size)]
    for i in range(size):
        for j in range(i + 1, size):
            count = 0
            for case, reference in enumerate(references):
                counts = mcnemar_counts(
                    alignments[names[i]][case], alignments[names[j]][case], reference
                )
                if mcnemar_test(counts, alpha).significant:
                    count += 1
            cells[i][j] = cells[j][i] = count
    return SignificanceMatrix(names, tuple(tuple(row) for row in cells))


@dataclass(frozen=True)
class ImpactReport:
    impact_strategy: float
    std_strategy: float
    impact_source: float
    std_source: float


SigLookup = Callable[[tuple[str, str], tuple[str, str], str], bool]


def impact(
    sig_lookup: SigLookup,
    strategies: Sequence[str],
    sources: Sequence[str],
    testcases: Sequence[str],
    *,
    verbatim_source_denominator: bool = False,
) -> ImpactReport:
    """Share of significant pairwise differences attributable to each factor.

    sig_lookup((source, strategy), (source, strategy), testcase) decides
    significance of one ordered run pair. The strategy impact holds the
    source fixed and varies strategies; the source impact is symmetric.
    verbatim_source_denominator switches the source-impact denominator to
    |TC|*|BK|^2 - |BK|*|S|, kept for compatibility; it is not symmetric
    with the strategy form and can leave [0, 1].
    """
    strategies = list(strategies)
    sources = list(sources)
    testcases = list(testcases)
    if len(strategies) < 2 or len(sources) < 2:
        raise ValueError("impact needs at least two strategies and two sources")
    if not testcases:
        raise ValueError("impact needs at least one test case")

    strategy_shares = []
    denominator = len(testcases) * len(strategies) ** 2 - len(testcases) * len(strategies)
    for bk in sources:
        hits = sum(
            sig_lookup((bk, s1), (bk, s2), tc)
            for tc in testcases
            for s1 in strategies
            for s2 in strategies
            if s1 != s2
        )
        strategy_shares.append(hits / denominator)

    if verbatim_source_denominator:
        source_denominator = len(testcases) * len(sources) ** 2 - len(sources) * len(strategies)
        if source_denominator <= 0:
            raise ValueError("verbatim source denominator is not positive for these sizes")
    else:
        source_denominator = len(testcases) * len(sources) ** 2 - len(testcases) * len(sources)
    source_shares = []
    for s in strategies:
        hits = sum(
            sig_lookup((bk1, s), (bk2, s), tc)
            for tc in testcases
            for bk1 in sources
            for bk2 in sources
            if bk1 != bk2
        )
        source_shares.append(hits / source_denominator)

    report = ImpactReport(
        impact_strategy=statistics.fmean(strategy_shares),
        std_strategy=statistics.pstdev(strategy_shares),
        impact_source=statistics.fmean(source_shares),
        std_source=statistics.pstdev(source_shares),
    )
    if not verbatim_source_denominator:
        for value in (report.impact_strategy, report.impact_source):
            if not 0.0 <= value <= 1.0:
                raise AssertionError("impact share left [0, 1]")
    return report
