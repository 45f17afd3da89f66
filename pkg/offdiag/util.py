# common numeric utilities

from dataclasses import dataclass
from typing import (
    Sequence,
    Tuple,
    List
)

import numpy as np
import scipy.stats

import offdiag.exceptions


def richardson_table(eps: np.ndarray, values: np.ndarray, order: int = 2) -> List[np.ndarray]:
    """
    Richardson table for samples :attr:`values` taken on a geometric ladder
    :attr:`eps` (strictly decreasing, constant ratio). Column p removes the
    eps**p term of the expansion; column 0 is the raw data.
    """
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values)
    if eps.size < 2:
        raise offdiag.exceptions.EvaluationError("Richardson extrapolation needs at least two samples")
    t = eps[0] / eps[1]
    columns = [values]
    for p in range(1, order + 1):
        prev = columns[-1]
        if prev.size < 2: break
        f = t ** p
        columns.append((f * prev[1:] - prev[:-1]) / (f - 1.0))
    return columns


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    stderr: float
    ci_low: float
    ci_high: float


def loglog_slope(x: Sequence[float], y: Sequence[float], confidence: float = 0.95) -> SlopeFit:
    """ Least-squares slope of log y against log x with a t-based confidence interval. """
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    fit = scipy.stats.linregress(lx, ly)
    dof = lx.size - 2
    if dof > 0 and np.isfinite(fit.stderr):
        half = scipy.stats.t.ppf(0.5 + confidence / 2, dof) * fit.stderr
    else: half = float('nan')
    return SlopeFit(float(fit.slope), float(fit.intercept), float(fit.stderr),
                    float(fit.slope - half), float(fit.slope + half))


def hull_scale(lo: float, hi: float) -> float:
    """ Width of [lo, hi]; degenerate hulls fall back to max(1, |lo|). """
    width = hi - lo
    if width > 0: return float(width)
    return float(max(1.0, abs(lo)))


def grows_geometrically(sequence: Sequence[float], factor: float, last: int = 3) -> bool:
    """ True iff the last :attr:`last` entries increase by at least :attr:`factor` each step. """
    seq = list(sequence)
    if len(seq) < last: return False
    tail = seq[-last:]
    for a, b in zip(tail[:-1], tail[1:]):
        if not np.isfinite(a): return False
        if not (b > a and b >= factor * a): return False
    return True
