"""Seeded samplers for the two data models the experiments use.

Equicorrelated normal vectors come from the one-factor representation
X_i = sqrt(rho) * Z0 + sqrt(1 - rho) * Z_i + mu_i, which is exact for a
common correlation rho, costs O(n) per draw, and makes the positive
dependence of the family explicit. Draw order is fixed so that a given
Seed always yields bit-identical output.
"""

from dataclasses import dataclass

import numpy as np

from ._validation import (
    check_correlation,
    check_nonnegative_int,
    check_positive_int,
    check_unit_interval,
)
from .exceptions import ParameterError

__all__ = ["Seed", "TruthAssignment", "MixtureDraw", "sample_equicorrelated", "sample_mixture"]


@dataclass(frozen=True)
class Seed:
    """Addresses one reproducible random substream.

    Identical (master_seed, stream_id) pairs reproduce identical draw
    sequences; distinct stream_ids give statistically independent streams.
    """

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        check_nonnegative_int(self.master_seed, "master_seed")
        check_nonnegative_int(self.stream_id, "stream_id")

    def with_stream(self, stream_id: int) -> "Seed":
        return Seed(self.master_seed, stream_id)

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.master_seed, spawn_key=(self.stream_id,))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass(frozen=True)
class TruthAssignment:
    """Fixed configuration of true nulls (zero shift) and false nulls (shift delta).

    n0 = 0 is permitted for harness completeness even though the theory
    assumes at least one true null; the realized FDP is then 0 by definition.
    """

    n: int
    null_indices: tuple
    alt_indices: tuple
    delta: float

    def __post_init__(self):
        check_positive_int(self.n, "n")
        nulls = tuple(int(i) for i in self.null_indices)
        alts = tuple(int(i) for i in self.alt_indices)
        object.__setattr__(self, "null_indices", nulls)
        object.__setattr__(self, "alt_indices", alts)
        if set(nulls) | set(alts) != set(range(self.n)) or set(nulls) & set(alts):
            raise ParameterError("null_indices and alt_indices must partition range(n)")
        if not self.delta >= 0.0:
            raise ParameterError(f"delta must be nonnegative, got {self.delta}")

    @classmethod
    def trailing_alternatives(cls, n: int, n0: int, delta: float) -> "TruthAssignment":
        """The reproducible convention used by the simulation grids: J1 = last n - n0 indices."""
        if not 0 <= n0 <= n:
            raise ParameterError(f"n0 must lie in [0, n], got n0={n0}, n={n}")
        return cls(n, tuple(range(n0)), tuple(range(n0, n)), delta)

    @property
    def n0(self) -> int:
        return len(self.null_indices)

    @property
    def n1(self) -> int:
        return len(self.alt_indices)

    def null_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[list(self.null_indices)] = True
        return mask

    def shifts(self) -> np.ndarray:
        mu = np.zeros(self.n)
        mu[list(self.alt_indices)] = self.delta
        return mu


@dataclass(frozen=True)
class MixtureDraw:
    """One draw from the mixture model: statistics x and truth indicators h (0 = true null)."""

    x: np.ndarray
    h: np.ndarray


def sample_equicorrelated(truth: TruthAssignment, rho: float, seed: Seed, shifts=None) -> np.ndarray:
    """One equicorrelated normal vector with means from ``truth`` (or explicit ``shifts``).

    ``shifts`` overrides the truth-derived means without touching the truth
    labels; the supremum experiments use this to move the data to a common
    parameter point while keeping the null/alternative bookkeeping fixed.
    """
    check_correlation(rho)
    mu = truth.shifts() if shifts is None else np.asarray(shifts, dtype=np.float64)
    if mu.shape != (truth.n,):
        raise ParameterError(f"shifts must have shape ({truth.n},)")
    g = seed.generator()
    z = g.standard_normal(truth.n + 1)
    return np.sqrt(rho) * z[0] + np.sqrt(1.0 - rho) * z[1:] + mu


def sample_mixture(n: int, pi0: float, delta: float, rho: float, seed: Seed) -> MixtureDraw:
    """One mixture-model draw: h_i = 0 with probability pi0, independently; then
    the same one-factor normal vector with mean h_i * delta."""
    check_positive_int(n, "n")
    check_unit_interval(pi0, "pi0")
    check_correlation(rho)
    if not delta >= 0.0:
        raise ParameterError(f"delta must be nonnegative, got {delta}")
    g = seed.generator()
    h = (g.random(n) >= pi0).astype(np.int8)
    z = g.standard_normal(n + 1)
    x = np.sqrt(rho) * z[0] + np.sqrt(1.0 - rho) * z[1:] + h * delta
    return MixtureDraw(x=x, h=h)
