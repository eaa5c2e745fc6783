"""Probability vectors, entropy scoring, uniform-mixture smoothing, and the
closed-form hitting-probability bounds.

All entropies are in nats. The bound formulas keep the printed 1/ln2 factor
so the reported quantities match the closed form verbatim.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import VacuousBoundError

PROB_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ProbVector:
    """A discrete distribution over k >= 2 classes.

    Entries must be non-negative and sum to 1 within PROB_SUM_TOL.
    """

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 2:
            raise ValueError(f"need at least 2 classes, got {len(vals)}")
        if any(not math.isfinite(v) for v in vals):
            raise ValueError(f"non-finite probability in {vals}")
        if any(v < 0 for v in vals):
            raise ValueError(f"negative probability in {vals}")
        total = math.fsum(vals)
        if abs(total - 1.0) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1 (tol {PROB_SUM_TOL})")

    @property
    def k(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=np.float64)


@dataclass(frozen=True)
class SmoothingConfig:
    """Floor parameter chi in (0, 1) for mixing with the uniform distribution."""

    chi: float

    def __post_init__(self):
        if not (0.0 < self.chi < 1.0):
            raise ValueError(f"chi must be in (0, 1), got {self.chi}")


def _coerce(p) -> ProbVector:
    if isinstance(p, ProbVector):
        return p
    return ProbVector(tuple(p))


def entropy(p: ProbVector | Sequence[float]) -> float:
    """Shannon entropy -sum p_i ln p_i in nats, with 0*ln(0) = 0.

    Validates the input as a ProbVector; result lies in [0, ln k].
    """
    v = _coerce(p).as_array()
    nz = v[v > 0.0]
    return float(-(nz * np.log(nz)).sum())


def smooth(r: ProbVector | Sequence[float], cfg: SmoothingConfig) -> ProbVector:
    """Uniform-mixture smoothing v = (1-chi)*r + (chi/k)*1.

    Guarantees min_i v_i >= chi/k while keeping v a valid distribution.
    """
    rv = _coerce(r)
    chi = cfg.chi
    floor = chi / rv.k
    return ProbVector(tuple((1.0 - chi) * x + floor for x in rv.values))


def entropy_ratio_bound(rho: float, k: int) -> float:
    """Entropy lower bound for distributions whose max/min ratio is <= rho.

    Returns ln k - (g - 1 - ln g)/ln 2 with g = rho*ln(rho)/(rho-1).
    The bound can be negative (vacuous) for small k; it is returned as-is.
    """
    if not (rho >= 1.0 and math.isfinite(rho)):
        raise ValueError(f"ratio must be finite and >= 1, got {rho}")
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if rho == 1.0:
        return math.log(k)  # g -> 1 and the correction vanishes
    g = rho * math.log(rho) / (rho - 1.0)
    return math.log(k) - (g - 1.0 - math.log(g)) / math.log(2.0)


def entropy_lower_bound(chi: float, k: int) -> float:
    """Entropy floor for distributions with min class probability >= chi.

    Equivalent to entropy_ratio_bound with rho = 1/chi; the intermediate
    eta = -ln(chi)/(1-chi) equals rho*ln(rho)/(rho-1).
    """
    if not (0.0 < chi < 1.0):
        raise ValueError(f"chi must be in (0, 1), got {chi}")
    return entropy_ratio_bound(1.0 / chi, k)


@dataclass(frozen=True)
class LemmaBoundInput:
    """Parameters of the hitting-probability bound.

    beta: pocket fraction of the pool, in (0, 1]
    chi: minimum class probability after smoothing, in (0, 1)
    k: class count, >= 2
    delta: failure probability, in (0, 1]; delta=1 asks for no guarantee
    """

    beta: float
    chi: float
    k: int
    delta: float

    def __post_init__(self):
        if not (0.0 < self.beta <= 1.0):
            raise ValueError(f"beta must be in (0, 1], got {self.beta}")
        if not (0.0 < self.chi < 1.0):
            raise ValueError(f"chi must be in (0, 1), got {self.chi}")
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if not (0.0 < self.delta <= 1.0):
            raise ValueError(f"delta must be in (0, 1], got {self.delta}")


@dataclass(frozen=True)
class LemmaBoundReport:
    """Closed-form quantities: eta, the entropy floor zeta, the per-draw
    hit probability lower bound p_s, and the required draw count n_s."""

    eta: float
    zeta: float
    p_s: float
    n_s: int


def lemma_bound(inp: LemmaBoundInput) -> LemmaBoundReport:
    """Draws needed to hit a weight-floored pocket with probability 1-delta.

    p_s = beta * (1 - (eta - 1 - ln eta)/(ln 2 * ln k)) = beta * zeta / ln k,
    n_s = ceil(ln delta / ln(1 - p_s)).

    Raises VacuousBoundError when p_s <= 0 (zeta < 0), which happens for
    small k; the error carries eta and zeta for diagnostics.
    """
    eta = -math.log(inp.chi) / (1.0 - inp.chi)
    zeta = entropy_lower_bound(inp.chi, inp.k)
    p_s = inp.beta * zeta / math.log(inp.k)
    if p_s <= 0.0:
        raise VacuousBoundError(eta, zeta, p_s)
    # delta=1 gives ln(1)=0 and therefore 0 draws; otherwise the ratio of two
    # negative logs is positive and ceil makes n_s >= 1.
    n_s = math.ceil(math.log(inp.delta) / math.log(1.0 - p_s))
    return LemmaBoundReport(eta=eta, zeta=zeta, p_s=p_s, n_s=int(n_s))
