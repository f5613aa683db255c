"""Correlation tables, the CHSH functional and finite-statistics estimates."""
from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import DataError, InsufficientDataError

NORMALIZATION_TOL = 1e-9
CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)
DEFAULT_K_SIGMA = 3.0

# CHSH signs for <R_x S_y>, inputs 1,2 mapped to bits 0,1.
CHSH_SIGNS = np.array([[1.0, 1.0], [1.0, -1.0]])


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """p(r, s | x, y) stored as ``probs[x, y, r, s]``.

    ``counts[x, y]`` holds the number of rounds behind each block; ``None``
    marks an exact (infinite-statistics) table.
    """

    probs: np.ndarray
    counts: np.ndarray = None

    def __post_init__(self):
        p = np.array(self.probs, dtype=float)
        if p.shape != (2, 2, 2, 2):
            raise DataError(f"correlation table must have shape (2, 2, 2, 2), got {p.shape}")
        if np.any(p < -NORMALIZATION_TOL) or np.any(p > 1 + NORMALIZATION_TOL):
            raise DataError("correlation table entries must lie in [0, 1]")
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        if self.counts is not None:
            c = np.array(self.counts, dtype=np.int64)
            if c.shape != (2, 2):
                raise DataError(f"counts must have shape (2, 2), got {c.shape}")
            c.setflags(write=False)
            object.__setattr__(self, "counts", c)

    @property
    def exact(self):
        return self.counts is None

    def __getitem__(self, key):
        return self.probs[key]

    def marginal_R(self, x, y):
        """p(r | x, y) as a length-2 array."""
        return self.probs[x, y].sum(axis=1)

    def marginal_S(self, x, y):
        return self.probs[x, y].sum(axis=0)


@dataclass(frozen=True)
class BellEstimate:
    value: float
    stderr: float
    n_rounds_used: int

    def __post_init__(self):
        if abs(self.value) > 4 + 1e-9:
            raise DataError(f"CHSH value {self.value} exceeds the algebraic maximum 4")
        if self.stderr < 0:
            raise DataError("stderr must be nonnegative")

    def to_dict(self):
        return {"value": self.value, "stderr": self.stderr, "n_rounds_used": self.n_rounds_used}


class BellClass(str, enum.Enum):
    QUANTUM_MAXIMAL = "QuantumMaximal"
    NONLOCAL_SUBMAXIMAL = "NonlocalSubMaximal"
    LOCAL_EXPLAINABLE = "LocalExplainable"


def _check_block(table, x, y):
    total = table.probs[x, y].sum()
    if abs(total - 1) > NORMALIZATION_TOL:
        raise DataError(f"block (x={x}, y={y}) sums to {total!r}, not 1")


def expectation(table, x, y):
    """<R_x S_y> = sum_{r,s} (-1)^(r+s) p(r, s | x, y)."""
    _check_block(table, x, y)
    b = table.probs[x, y]
    return float(b[0, 0] - b[0, 1] - b[1, 0] + b[1, 1])


def correlators(table):
    """2x2 array of <R_x S_y>."""
    return np.array([[expectation(table, x, y) for y in (0, 1)] for x in (0, 1)])


def chsh_value(table):
    """<R1 S1> + <R1 S2> + <R2 S1> - <R2 S2>."""
    return float(np.sum(CHSH_SIGNS * correlators(table)))


def no_signalling_deviation(table):
    """Largest change of either party's marginal under the other's input."""
    p = table.probs
    dev_R = np.abs(p[:, 0].sum(axis=2) - p[:, 1].sum(axis=2)).max()
    dev_S = np.abs(p[0].sum(axis=1) - p[1].sum(axis=1)).max()
    return float(max(dev_R, dev_S))


def no_signalling_zscores(table):
    """Per-marginal z-scores of the observed signalling for an empirical table.

    Each entry compares p(r=0|x, y=0) with p(r=0|x, y=1) (and symmetrically
    for S) using two-sample binomial standard errors.
    """
    if table.exact:
        raise DataError("z-scores need an empirical table with counts")
    p, n = table.probs, table.counts
    z = []
    for x in (0, 1):
        a, b = p[x, 0, 0].sum(), p[x, 1, 0].sum()
        se = math.sqrt(a * (1 - a) / n[x, 0] + b * (1 - b) / n[x, 1])
        z.append((a - b) / se if se > 0 else 0.0)
    for y in (0, 1):
        a, b = p[0, y, :, 0].sum(), p[1, y, :, 0].sum()
        se = math.sqrt(a * (1 - a) / n[0, y] + b * (1 - b) / n[1, y])
        z.append((a - b) / se if se > 0 else 0.0)
    return np.array(z)


def _round_columns(rounds):
    """Accept a transcript-like object with array columns or RoundRecords."""
    if hasattr(rounds, "columns"):
        cols = rounds.columns
        return cols["index"], cols["x"], cols["y"], cols["r"], cols["s"]
    recs = list(rounds)
    return tuple(np.array([getattr(rec, k) for rec in recs], dtype=np.int64)
                 for k in ("index", "x", "y", "r", "s"))


def estimate_table(rounds, exclude=()):
    """Empirical p(r, s | x, y) from round records, ignoring excluded indices."""
    index, x, y, r, s = _round_columns(rounds)
    keep = ~np.isin(index, np.fromiter(exclude, dtype=np.int64)) if len(exclude) else np.ones(len(index), bool)
    cells = 8 * x[keep] + 4 * y[keep] + 2 * r[keep] + s[keep]
    hist = np.bincount(cells, minlength=16).reshape(2, 2, 2, 2)
    counts = hist.sum(axis=(2, 3))
    for xx, yy in itertools.product((0, 1), repeat=2):
        if counts[xx, yy] == 0:
            raise InsufficientDataError(
                f"no retained rounds for setting (x={xx}, y={yy})", cell=(xx, yy))
    return CorrelationTable(hist / counts[:, :, None, None], counts)


def bell_from_table(table):
    """CHSH estimate with independent-binomial stderr per setting.

    For each setting the product (-1)^(r+s) is a +/-1 variable, so
    Var(<R_x S_y>) = (1 - E^2) / n; the four settings are independent.
    """
    E = correlators(table)
    value = float(np.sum(CHSH_SIGNS * E))
    if table.exact:
        return BellEstimate(value, 0.0, 0)
    var = np.sum((1 - E**2) / table.counts)
    return BellEstimate(value, float(math.sqrt(max(var, 0.0))), int(table.counts.sum()))


def bell_estimate(rounds, exclude=()):
    return bell_from_table(estimate_table(rounds, exclude))


def classify(est, k_sigma=DEFAULT_K_SIGMA):
    """Place an estimate against the classical and Tsirelson bounds.

    When both windows match (large stderr) the weaker class wins.
    """
    width = k_sigma * est.stderr
    if est.value <= CLASSICAL_BOUND + width:
        return BellClass.LOCAL_EXPLAINABLE
    if est.value >= TSIRELSON_BOUND - width:
        return BellClass.QUANTUM_MAXIMAL
    return BellClass.NONLOCAL_SUBMAXIMAL


def deterministic_chsh_values():
    """CHSH value of every local deterministic strategy.

    A strategy fixes r = a[x] and s = b[y]; there are 2^2 * 2^2 of them.
    """
    values = []
    for a0, a1, b0, b1 in itertools.product((0, 1), repeat=4):
        a, b = (a0, a1), (b0, b1)
        values.append(sum(CHSH_SIGNS[x, y] * (-1) ** (a[x] + b[y])
                          for x in (0, 1) for y in (0, 1)))
    return values


def local_bound_bruteforce():
    return max(deterministic_chsh_values())


def deterministic_table(a, b):
    """Table of the deterministic strategy r = a[x], s = b[y]."""
    p = np.zeros((2, 2, 2, 2))
    for x, y in itertools.product((0, 1), repeat=2):
        p[x, y, a[x], b[y]] = 1.0
    return CorrelationTable(p)
