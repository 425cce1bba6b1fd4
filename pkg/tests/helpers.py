from __future__ import annotations
from collections import Counter
from functools import lru_cache
from typing import Tuple

import numpy as np
from hypothesis import strategies as st
from scipy import stats


@st.composite
def partition_strategy(draw, max_n=10):
    n = draw(st.integers(min_value=1, max_value=max_n))
    k = draw(st.integers(min_value=1, max_value=n))
    # drop n balls into k bins; the sorted nonzero counts form a partition of n
    bins = draw(st.lists(st.integers(min_value=0, max_value=k - 1), min_size=n, max_size=n))
    return tuple(sorted(Counter(bins).values(), reverse=True))


@lru_cache(maxsize=None)
def count_standard_tableaux(rows: Tuple[int, ...]) -> int:
    """f^λ by removing one corner at a time (branching rule)."""
    if not rows:
        return 1
    total = 0
    for i, r in enumerate(rows):
        if i + 1 == len(rows) or rows[i + 1] < r:
            smaller = list(rows)
            smaller[i] -= 1
            total += count_standard_tableaux(tuple(x for x in smaller if x > 0))
    return total


def longest_increasing(seq) -> int:
    best = [1] * len(seq)
    for i in range(len(seq)):
        for j in range(i):
            if seq[j] < seq[i]:
                best[i] = max(best[i], best[j] + 1)
    return max(best, default=0)


def pooled_chisquare(observed, expected, min_expected: float = 5.0):
    """Chi-square test after merging the cells with expected count below ``min_expected``."""
    observed = np.asarray(observed, dtype=np.float64)
    expected = np.asarray(expected, dtype=np.float64)
    big = expected >= min_expected
    obs = np.append(observed[big], observed[~big].sum())
    exp = np.append(expected[big], expected[~big].sum())
    if exp[-1] == 0:
        obs, exp = obs[:-1], exp[:-1]
    # the pooled cell can leave a rounding gap between the totals
    exp = exp * obs.sum() / exp.sum()
    return stats.chisquare(obs, exp)


def shape_counts(dist, rows_list):
    """(observed, expected) counts over the diagrams of ``dist`` for sampled row tuples."""
    index = {d.rows: i for i, d in enumerate(dist.diagrams)}
    observed = np.bincount([index[r] for r in rows_list], minlength=len(index))
    return observed, dist.probabilities * len(rows_list)
