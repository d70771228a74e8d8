"""Erasure channel models: memoryless BEC and the two-state burst channel.

The burst channel is a first-order Markov chain over a good state (never
erases) and an erasure state (always erases), parameterized by the average
erasure rate eps = b/(b+g) and the average burst length Delta = 1/g, where
b and g are the entry/exit transition probabilities of the erasure state.
Chains start from the stationary distribution, so eps is the marginal
erasure probability of every symbol.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

ErasurePattern = np.ndarray


def gec_params(epsilon: float, delta_burst: float) -> tuple[float, float]:
    """(b, g) from (eps, Delta); rejects infeasible pairs (b would exceed 1)."""
    if not 0.0 < epsilon < 1.0:
        raise ValueError("need 0 < epsilon < 1")
    if delta_burst < 1.0:
        raise ValueError("mean burst length must be >= 1")
    g = 1.0 / delta_burst
    b = epsilon * g / (1.0 - epsilon)
    if b > 1.0:
        raise ValueError(f"(eps={epsilon}, Delta={delta_burst}) infeasible: "
                         f"b = {b:.4g} > 1")
    return b, g


@dataclass(frozen=True)
class ChannelSpec:
    kind: str                      # "bec" | "gec"
    epsilon: float
    delta_burst: float | None = None

    def __post_init__(self):
        if self.kind not in ("bec", "gec"):
            raise ValueError("kind must be 'bec' or 'gec'")
        if not 0.0 <= self.epsilon < 1.0:
            raise ValueError("epsilon must be in [0, 1)")
        if self.kind == "gec":
            if self.delta_burst is None:
                raise ValueError("gec needs delta_burst")
            if self.epsilon > 0.0:
                gec_params(self.epsilon, self.delta_burst)  # feasibility
        elif self.delta_burst is not None:
            raise ValueError("bec takes no delta_burst")

    @property
    def bg(self) -> tuple[float, float]:
        if self.kind != "gec":
            raise ValueError("bg only defined for gec")
        return gec_params(self.epsilon, self.delta_burst)


@njit(cache=True)
def _markov_erasures(u, b, g, start_erased):
    out = np.empty(u.shape[0], dtype=np.bool_)
    s = start_erased
    for i in range(u.shape[0]):
        out[i] = s
        if s:
            s = not (u[i] < g)
        else:
            s = u[i] < b
    return out


def sample_pattern(spec: ChannelSpec, n: int,
                   rng: np.random.Generator) -> ErasurePattern:
    """Draw one erasure mask; deterministic given the generator state."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if spec.kind == "bec":
        return rng.random(n) < spec.epsilon
    if spec.epsilon == 0.0:
        rng.random(n + 1)  # keep stream consumption uniform across eps
        return np.zeros(n, dtype=bool)
    b, g = spec.bg
    start = rng.random() < spec.epsilon  # stationary start
    return _markov_erasures(rng.random(n), b, g, start)


def burst_lengths(pattern: ErasurePattern) -> np.ndarray:
    """Lengths of maximal erasure runs, for empirical burst statistics."""
    p = np.asarray(pattern, dtype=np.int8)
    d = np.diff(np.concatenate(([0], p, [0])))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return ends - starts
