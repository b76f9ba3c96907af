"""Ground-truth targets for simulated three-photon states.

A sample is positive when its post-selected state is maximally
entangled: every surviving amplitude has the same modulus and the
leading Schmidt rank is at least two. The Schmidt rank vector holds
the per-photon ranks sorted in non-increasing order; its leading entry
doubles as the clustering key for grouped cross validation, with 0
reserved for invalid states and 1 for product states.
"""

from __future__ import annotations

from dataclasses import dataclass

from .optics import SimResult
from .states import RANK_TOL, QuantumState, reduced_density_rank

# Relative tolerance when comparing amplitude moduli.
MODULUS_TOL = 1e-9


@dataclass(frozen=True, order=True)
class SrvLabel:
    """Per-photon Schmidt ranks, non-increasing."""

    n: int
    m: int
    k: int

    def __post_init__(self):
        if not self.n >= self.m >= self.k >= 1:
            raise ValueError(f"ranks must satisfy n >= m >= k >= 1, got {self}")

    def as_tuple(self) -> tuple:
        return (self.n, self.m, self.k)


@dataclass(frozen=True)
class SampleLabel:
    """Entanglement flag, rank vector (when defined) and cluster key."""

    y_e: bool
    srv: SrvLabel | None
    fold_rank: int


def schmidt_rank_vector(state: QuantumState, tol: float = RANK_TOL) -> SrvLabel:
    """Ranks of each photon against the other two, sorted non-increasingly."""
    ranks = sorted(
        (reduced_density_rank(state, i, tol) for i in range(3)), reverse=True)
    return SrvLabel(*ranks)


def is_maximally_entangled(state: QuantumState,
                           tol: float = MODULUS_TOL) -> bool:
    """All nonzero amplitudes share one modulus and the state is entangled."""
    moduli = [abs(a) for a in state.terms.values()]
    if not moduli:
        return False
    if max(moduli) - min(moduli) > tol * max(moduli):
        return False
    return schmidt_rank_vector(state).n >= 2


def label(result: SimResult) -> SampleLabel:
    """Label a simulation result.

    Invalid results get fold_rank 0, product states fold_rank 1; both
    are negatives without a rank vector. Everything else carries its
    SRV, its leading rank, and the maximal-entanglement flag.
    """
    if not result.valid:
        return SampleLabel(False, None, 0)
    srv = schmidt_rank_vector(result.state)
    if srv.n == 1:
        return SampleLabel(False, None, 1)
    return SampleLabel(is_maximally_entangled(result.state), srv, srv.n)
