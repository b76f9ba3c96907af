"""Sparse multi-photon quantum states over integer-labeled modes.

A state is a map from kets to complex amplitudes. A ket is a tuple with
one mode label per photon: ``(path, oam)`` pairs while photons are still
distributed over paths, bare OAM integers for post-selected three-photon
states. Amplitudes refer to orthonormal basis kets, so the squared norm
is the plain sum of squared moduli.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Amplitudes with modulus at or below this are dropped; element kernels
# carry 1/sqrt(2) factors, so exact-zero cancellation tests are unreliable.
AMP_PRUNE_EPS = 1e-12

# Singular values below RANK_TOL * s_max do not count towards the rank.
RANK_TOL = 1e-10


class StateError(ValueError):
    """Structural misuse: arity mismatch, bad particle index."""


class NormalizationError(ValueError):
    """Raised when a zero state is normalized."""


@dataclass(frozen=True)
class QuantumState:
    """Immutable sparse ket-amplitude map.

    ``terms`` maps ket tuples to complex amplitudes. All kets share the
    same arity. Instances are values: operations return new states and
    never mutate ``terms`` after construction.
    """

    terms: dict = field(default_factory=dict)

    @property
    def photon_count(self) -> int | None:
        """Arity of the kets, or None for the empty state."""
        for ket in self.terms:
            return len(ket)
        return None

    def norm_squared(self) -> float:
        return sum(abs(a) ** 2 for a in self.terms.values())

    def amplitude(self, ket) -> complex:
        return self.terms.get(tuple(ket), 0j)

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"QuantumState({render_state(self)})"


def _label_str(label) -> str:
    if isinstance(label, tuple):
        return f"{'abcd'[label[0]]}{label[1]}"
    return str(label)


def render_state(state: QuantumState, max_terms: int = 16) -> str:
    """Render as a sum of kets, e.g. ``0.50|0,0,0> + 0.50|1,0,1>``."""
    if not state.terms:
        return "0"
    parts = []
    for ket in sorted(state.terms):
        amp = state.terms[ket]
        if abs(amp.imag) <= 1e-12 * max(1.0, abs(amp.real)):
            amp_str = f"{amp.real:.2f}"
        else:
            amp_str = f"({amp.real:.2f}{amp.imag:+.2f}i)"
        parts.append(f"{amp_str}|{','.join(_label_str(l) for l in ket)}>")
    if len(parts) > max_terms:
        parts = parts[:max_terms] + [f"... ({len(state.terms)} terms)"]
    return " + ".join(parts)


def add_term(state: QuantumState, ket, amp: complex) -> QuantumState:
    """Return ``state`` with ``amp`` accumulated onto ``ket``.

    Terms whose total modulus falls at or below AMP_PRUNE_EPS are removed.
    """
    ket = tuple(ket)
    count = state.photon_count
    if count is not None and len(ket) != count:
        raise StateError(f"ket arity {len(ket)} != photon count {count}")
    terms = dict(state.terms)
    total = terms.get(ket, 0j) + complex(amp)
    if abs(total) <= AMP_PRUNE_EPS:
        terms.pop(ket, None)
    else:
        terms[ket] = total
    return QuantumState(terms)


def from_terms(pairs) -> QuantumState:
    """Build a state from an iterable of (ket, amplitude) pairs."""
    state = QuantumState()
    for ket, amp in pairs:
        state = add_term(state, ket, amp)
    return state


def normalize(state: QuantumState) -> QuantumState:
    """Scale so the squared moduli sum to one; relative phases kept."""
    norm = math.sqrt(state.norm_squared())
    if norm <= AMP_PRUNE_EPS:
        raise NormalizationError("cannot normalize a zero state")
    return QuantumState({ket: amp / norm for ket, amp in state.terms.items()})


def inner_product(a: QuantumState, b: QuantumState) -> complex:
    """<a|b> with conjugation on the left argument."""
    ca, cb = a.photon_count, b.photon_count
    if ca is not None and cb is not None and ca != cb:
        raise StateError(f"photon counts differ: {ca} vs {cb}")
    if len(b.terms) < len(a.terms):
        return sum(a.terms[k].conjugate() * amp
                   for k, amp in b.terms.items() if k in a.terms)
    return sum(amp.conjugate() * b.terms[k]
               for k, amp in a.terms.items() if k in b.terms)


def coefficient_matrix(state: QuantumState, particle: int) -> np.ndarray:
    """Amplitudes arranged as (modes of ``particle``) x (modes of the rest)."""
    count = state.photon_count
    if count is None:
        raise StateError("empty state has no particles")
    if not 0 <= particle < count:
        raise StateError(f"particle index {particle} out of range for {count} photons")
    rows: dict = {}
    cols: dict = {}
    entries = []
    for ket, amp in state.terms.items():
        mine = ket[particle]
        rest = ket[:particle] + ket[particle + 1:]
        r = rows.setdefault(mine, len(rows))
        c = cols.setdefault(rest, len(cols))
        entries.append((r, c, amp))
    mat = np.zeros((len(rows), len(cols)), dtype=complex)
    for r, c, amp in entries:
        mat[r, c] += amp
    return mat


def reduced_density_rank(state: QuantumState, particle: int,
                         tol: float = RANK_TOL) -> int:
    """Schmidt rank of ``particle`` against the remaining photons.

    Counts singular values of the coefficient matrix above ``tol``
    relative to the largest one; equals the rank of the reduced
    density matrix.
    """
    mat = coefficient_matrix(state, particle)
    svals = np.linalg.svd(mat, compute_uv=False)
    if svals.size == 0 or svals[0] == 0.0:
        return 0
    return int(np.count_nonzero(svals > tol * svals[0]))
