"""
utils.py
Utility functions for the nilpotent quotient engine.
"""

import logging
import os
import resource
import tempfile
import time

import pandas as pd

from config import LOG_FORMAT, MEMORY_BUDGET_MB, TIME_BUDGET_SECONDS
from exceptions import BudgetExceeded


def setup_logging(level=logging.INFO):
    logging.basicConfig(level=level, format=LOG_FORMAT)


def atomic_write_text(path, text):
    """
    Write text to path through a temporary file in the same directory,
    then rename over the target.
    """
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=directory)
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise


def layer_table(layers):
    """
    Converts per-weight layer invariants into a DataFrame.
    layers: iterable of (weight, free_rank, torsion_divisors)
    """
    rows = [
        {"Weight": w, "Free Rank": f, "Torsion": " ".join(str(d) for d in t) or "-"}
        for w, f, t in layers
    ]
    return pd.DataFrame(rows, columns=["Weight", "Free Rank", "Torsion"])


def stats_table(stats):
    """Per-class statistics (list of dicts) as a DataFrame."""
    return pd.DataFrame(list(stats))


def frame_to_text(df):
    if df.empty:
        return "(empty)"
    return df.to_string(index=False)


def peak_memory_mb():
    # ru_maxrss is reported in kilobytes on Linux
    return resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024.0


class BudgetGuard:
    """
    Tracks wall-clock time and peak memory against the configured budgets.
    check() raises BudgetExceeded; the caller attaches the partial result.
    """

    def __init__(self, time_budget=None, memory_budget=None):
        self.time_budget = TIME_BUDGET_SECONDS if time_budget is None else time_budget
        self.memory_budget = MEMORY_BUDGET_MB if memory_budget is None else memory_budget
        self.started = time.monotonic()

    def elapsed(self):
        return time.monotonic() - self.started

    def check(self, partial=None):
        if self.time_budget and self.elapsed() > self.time_budget:
            raise BudgetExceeded(
                f"time budget of {self.time_budget:.0f}s exceeded", partial=partial)
        if self.memory_budget and peak_memory_mb() > self.memory_budget:
            raise BudgetExceeded(
                f"memory budget of {self.memory_budget:.0f} MB exceeded", partial=partial)
