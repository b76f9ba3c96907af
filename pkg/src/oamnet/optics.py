"""Toolbox simulator: random element sequences acting on two photon pairs.

The initial state holds two anti-correlated OAM pairs on paths a/b and
c/d. Elements transform single-photon (path, oam) labels linearly;
states evolve by substituting those maps into each ket. Occupancy
bookkeeping keeps the evolution exactly unitary even when several
photons share a mode, so amplitudes always refer to orthonormal kets.

Post-selection keeps the coincidence pattern: one photon in each of
paths a, b, c and the trigger photon in path d with OAM 0. What
survives is a normalized three-photon state over bare OAM triples,
ordered by path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import AMP_PRUNE_EPS, QuantumState, normalize

PATH_NAMES = "abcd"
N_PATHS = 4

# Hologram shifts are limited so the token vocabulary stays finite.
L_SHIFT = 3

# Hard OAM cutoff during evolution; amplitudes pushed past it are dropped,
# counted, and the state is renormalized.
L_HARD = 12

DEFAULT_L_MAX = 2

MIN_SETUP_LEN = 6
MAX_SETUP_LEN = 15

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

# sqrt(n!) for occupancies up to four photons in one mode
_SQRT_FACT = (1.0, 1.0, math.sqrt(2.0), math.sqrt(6.0), math.sqrt(24.0))


class SetupError(ValueError):
    """Malformed element or setup token."""


@dataclass(frozen=True)
class Element:
    """One optical element.

    kind is one of "BS" (50/50 beam splitter on two paths), "HOLO"
    (OAM shift on one path), "DP" (dove prism: OAM flip plus parity
    phase), "REFL" (mirror: OAM flip).
    """

    kind: str
    paths: tuple
    shift: int = 0

    def token(self) -> str:
        names = [PATH_NAMES[p] for p in self.paths]
        if self.kind == "BS":
            return f"BS({names[0]},{names[1]})"
        if self.kind == "HOLO":
            return f"HOLO({names[0]},{self.shift:+d})"
        if self.kind == "DP":
            return f"DP({names[0]})"
        return f"REFL({names[0]})"


def beam_splitter(path_a: int, path_b: int) -> Element:
    if path_a == path_b:
        raise SetupError("beam splitter needs two distinct paths")
    lo, hi = sorted((path_a, path_b))
    return Element("BS", (lo, hi))


def hologram(path: int, shift: int) -> Element:
    if shift == 0 or abs(shift) > L_SHIFT:
        raise SetupError(f"hologram shift must be in +-1..{L_SHIFT}, got {shift}")
    return Element("HOLO", (path,), shift)


def dove_prism(path: int) -> Element:
    return Element("DP", (path,))


def mirror(path: int) -> Element:
    return Element("REFL", (path,))


def parse_token(token: str) -> Element:
    try:
        kind, rest = token.split("(", 1)
        args = rest.rstrip(")").split(",")
        if kind == "BS":
            return beam_splitter(PATH_NAMES.index(args[0]), PATH_NAMES.index(args[1]))
        if kind == "HOLO":
            return hologram(PATH_NAMES.index(args[0]), int(args[1]))
        if kind == "DP":
            return dove_prism(PATH_NAMES.index(args[0]))
        if kind == "REFL":
            return mirror(PATH_NAMES.index(args[0]))
    except (ValueError, IndexError) as exc:
        raise SetupError(f"bad element token {token!r}") from exc
    raise SetupError(f"unknown element kind in token {token!r}")


@dataclass(frozen=True)
class Setup:
    """Ordered element sequence; the model's input sentence."""

    elements: tuple

    def tokens(self) -> list:
        return [e.token() for e in self.elements]

    def token_string(self) -> str:
        return " ".join(self.tokens())

    def __len__(self) -> int:
        return len(self.elements)


def parse_setup(text: str) -> Setup:
    return Setup(tuple(parse_token(t) for t in text.split()))


@dataclass(frozen=True)
class SimResult:
    """Post-selected three-photon state, or None when nothing survives."""

    state: QuantumState | None
    postselect_prob: float
    clip_events: int = 0

    @property
    def valid(self) -> bool:
        return self.state is not None


def initial_state(l_max: int) -> QuantumState:
    """Two down-conversion pairs |l,-l>_ab x |l',-l'>_cd, |l|,|l'| <= l_max."""
    if l_max < 0:
        raise SetupError("l_max must be >= 0")
    amp = 1.0 / (2 * l_max + 1)
    terms = {}
    for l1 in range(-l_max, l_max + 1):
        for l2 in range(-l_max, l_max + 1):
            ket = ((0, l1), (1, -l1), (2, l2), (3, -l2))
            terms[ket] = complex(amp)
    return QuantumState(terms)


def _label_images(element: Element):
    """Single-photon map: (path, oam) -> [((path', oam'), factor), ...]."""
    kind = element.kind
    if kind == "BS":
        p, q = element.paths

        def images(path, oam):
            if path == p:
                return (((q, oam), _INV_SQRT2), ((p, -oam), 1j * _INV_SQRT2))
            if path == q:
                return (((p, oam), _INV_SQRT2), ((q, -oam), 1j * _INV_SQRT2))
            return (((path, oam), 1.0),)

        return images
    if kind == "HOLO":
        p = element.paths[0]
        shift = element.shift

        def images(path, oam):
            if path == p:
                return (((path, oam + shift), 1.0),)
            return (((path, oam), 1.0),)

        return images
    if kind == "DP":
        p = element.paths[0]

        def images(path, oam):
            if path == p:
                phase = 1.0 if oam % 2 == 0 else -1.0
                return (((path, -oam), phase),)
            return (((path, oam), 1.0),)

        return images
    p = element.paths[0]

    def images(path, oam):
        if path == p:
            return (((path, -oam), 1.0),)
        return (((path, oam), 1.0),)

    return images


def _occupancy_sqrt(ket) -> float:
    """sqrt of the product of mode occupancy factorials for a sorted ket."""
    out = 1.0
    run = 1
    for i in range(1, len(ket)):
        if ket[i] == ket[i - 1]:
            run += 1
        else:
            out *= _SQRT_FACT[run]
            run = 1
    return out * _SQRT_FACT[run]

def _apply_terms(terms: dict, element: Element, l_hard: int):
    """Evolve a ket->amplitude dict; returns (new terms, clip count)."""
    images = _label_images(element)
    out: dict = {}
    clipped = 0
    for ket, amp in terms.items():
        # orthonormal amplitude -> creation-operator coefficient
        coeff = amp / _occupancy_sqrt(ket)
        partial = [((), coeff)]
        for label in ket:
            opts = images(*label)
            if len(opts) == 1:
                (new_label, factor) = opts[0]
                if factor == 1.0:
                    partial = [(k + (new_label,), c) for k, c in partial]
                else:
                    partial = [(k + (new_label,), c * factor) for k, c in partial]
            else:
                partial = [
                    (k + (new_label,), c * factor)
                    for k, c in partial
                    for new_label, factor in opts
                ]
        for new_ket, c in partial:
            key = tuple(sorted(new_ket))
            out[key] = out.get(key, 0j) + c
    # back to orthonormal amplitudes, drop dust and out-of-range OAM
    result: dict = {}
    for ket, coeff in out.items():
        if any(abs(oam) > l_hard for _, oam in ket):
            clipped += 1
            continue
        amp = coeff * _occupancy_sqrt(ket)
        if abs(amp) > AMP_PRUNE_EPS:
            result[ket] = amp
    return result, clipped


def apply_element(state: QuantumState, element: Element,
                  l_hard: int = L_HARD) -> QuantumState:
    """Apply one element; renormalizes only if cutoff clipping occurred."""
    terms, clipped = _apply_terms(state.terms, element, l_hard)
    out = QuantumState(terms)
    if clipped and terms:
        out = normalize(out)
    return out


def run_setup(setup: Setup, l_max: int = DEFAULT_L_MAX,
              l_hard: int = L_HARD) -> SimResult:
    """Evolve the initial state through ``setup`` and post-select.

    Coincidence pattern: one photon in each of paths a, b, c and the
    trigger photon in path d with OAM 0. Returns the normalized
    three-photon OAM state and the post-selection probability, or an
    invalid result when the selected component vanishes.
    """
    terms = initial_state(l_max).terms
    clip_total = 0
    for element in setup.elements:
        terms, clipped = _apply_terms(terms, element, l_hard)
        clip_total += clipped
        if clipped and terms:
            norm = math.sqrt(sum(abs(a) ** 2 for a in terms.values()))
            terms = {k: a / norm for k, a in terms.items()}
        if not terms:
            return SimResult(None, 0.0, clip_total)

    selected = {}
    prob = 0.0
    for ket, amp in terms.items():
        # sorted kets with one photon per path satisfy ket[i][0] == i
        if (ket[0][0] == 0 and ket[1][0] == 1 and ket[2][0] == 2
                and ket[3] == (3, 0)):
            selected[(ket[0][1], ket[1][1], ket[2][1])] = amp
            prob += abs(amp) ** 2
    if not selected or prob <= AMP_PRUNE_EPS ** 2:
        return SimResult(None, 0.0, clip_total)
    return SimResult(normalize(QuantumState(selected)), prob, clip_total)


def random_setup(rng_seed, length_range=(MIN_SETUP_LEN, MAX_SETUP_LEN)) -> Setup:
    """Uniformly sampled setup; deterministic in ``rng_seed``.

    ``rng_seed`` is anything numpy's default_rng accepts (an int, a
    sequence of ints for stream splitting, or a Generator).
    """
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) \
        else np.random.default_rng(rng_seed)
    lo, hi = length_range
    n = int(rng.integers(lo, hi + 1))
    elements = []
    for _ in range(n):
        kind = int(rng.integers(0, 4))
        if kind == 0:
            p, q = rng.choice(N_PATHS, size=2, replace=False)
            elements.append(beam_splitter(int(p), int(q)))
        elif kind == 1:
            path = int(rng.integers(0, N_PATHS))
            mag = int(rng.integers(1, L_SHIFT + 1))
            sign = 1 if rng.integers(0, 2) else -1
            elements.append(hologram(path, sign * mag))
        elif kind == 2:
            elements.append(dove_prism(int(rng.integers(0, N_PATHS))))
        else:
            elements.append(mirror(int(rng.integers(0, N_PATHS))))
    return Setup(tuple(elements))


def all_tokens() -> list:
    """Every element token the generator can emit, in a fixed order."""
    tokens = []
    for a in range(N_PATHS):
        for b in range(a + 1, N_PATHS):
            tokens.append(beam_splitter(a, b).token())
    for p in range(N_PATHS):
        for s in range(-L_SHIFT, L_SHIFT + 1):
            if s != 0:
                tokens.append(hologram(p, s).token())
    for p in range(N_PATHS):
        tokens.append(dove_prism(p).token())
    for p in range(N_PATHS):
        tokens.append(mirror(p).token())
    return tokens
