"""Exact boson sampling at desk scale.

A linear network is an m x k column-orthonormal complex matrix acting on
k photons injected one per mode into the first k modes. The probability
of reading the occupation pattern S = (s_1, ..., s_m) is

    Pr(S) = |Per(A_S)|^2 / (s_1! ... s_m!)

where A_S stacks s_i copies of row i. The module enumerates all outcome
states, evaluates the full distribution, samples it by inverse CDF, and
embeds scaled sign matrices as the top block of an isometry so that the
all-singles outcome probability equals eps^{2k} * Per(M)^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .perm_core import IntMatrix, permanent_complex

# Fock states are plain occupation tuples, e.g. (1, 0, 2).
FockState = tuple[int, ...]

STATE_LIMIT = 10 ** 6
ORTHO_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class LinearNetwork:
    """Column-orthonormal m x k complex matrix (m modes, k photons)."""

    a: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=complex)
        object.__setattr__(self, "a", a)
        if a.ndim != 2:
            raise ValueError("network matrix must be 2-D")
        m, k = a.shape
        if m < k:
            raise ValueError(f"need at least as many modes as photons, got {m} x {k}")
        gram = a.conj().T @ a
        if not np.allclose(gram, np.eye(k), atol=1e-8):
            resid = float(np.max(np.abs(gram - np.eye(k))))
            raise ValueError(f"columns are not orthonormal (residual {resid:.3e})")

    @property
    def m(self) -> int:
        return self.a.shape[0]

    @property
    def k(self) -> int:
        return self.a.shape[1]


@dataclass(frozen=True, eq=False)
class BosonDistribution:
    """All outcome states of a network, in enumeration order, with probabilities."""

    network: LinearNetwork
    states: tuple[FockState, ...]
    probs: np.ndarray


def enumerate_states(m: int, n: int) -> list[FockState]:
    """All ways to place n photons in m modes, first mode varying slowest.

    The count is C(m+n-1, n) and the order is fixed (occupancy of mode 1
    descending, then recursively), which the sampler and the distribution
    rely on.
    """
    if m < 1:
        raise ValueError("need at least one mode")
    if n < 0:
        raise ValueError("photon count must be nonnegative")
    if m == 1:
        return [(n,)]
    out: list[FockState] = []
    for s1 in range(n, -1, -1):
        for rest in enumerate_states(m - 1, n - s1):
            out.append((s1,) + rest)
    return out


def state_submatrix(network: LinearNetwork, s: FockState) -> np.ndarray:
    """A_S: stack s_i copies of row i of the network matrix, in mode order."""
    if len(s) != network.m:
        raise ValueError(f"state has {len(s)} modes, network has {network.m}")
    if any(v < 0 for v in s):
        raise ValueError("occupations must be nonnegative")
    if sum(s) != network.k:
        raise ValueError(f"state holds {sum(s)} photons, network carries {network.k}")
    return np.repeat(network.a, s, axis=0)


def outcome_probability(network: LinearNetwork, s: FockState) -> float:
    """|Per(A_S)|^2 divided by the product of occupation factorials."""
    sub = state_submatrix(network, s)
    per = permanent_complex(sub)
    weight = math.prod(math.factorial(v) for v in s)
    return abs(per) ** 2 / weight


def full_distribution(network: LinearNetwork) -> BosonDistribution:
    """Probabilities of every outcome state, in enumeration order."""
    m, k = network.m, network.k
    count = math.comb(m + k - 1, k)
    if count > STATE_LIMIT:
        raise ValueError(f"{count} outcome states exceed the enumeration guard {STATE_LIMIT}")
    states = tuple(enumerate_states(m, k))
    probs = np.array([outcome_probability(network, s) for s in states])
    return BosonDistribution(network, states, probs)


def sample(dist: BosonDistribution, seed, count: int) -> list[FockState]:
    """Inverse-CDF sampling over the enumeration order; seeded, reproducible."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    cdf = np.cumsum(dist.probs)
    u = rng.random(count)
    idx = np.searchsorted(cdf, u, side="right")
    idx = np.minimum(idx, len(dist.states) - 1)
    return [dist.states[i] for i in idx]


def embed_scaled(m_int: IntMatrix, eps: float) -> LinearNetwork:
    """Embed eps*M as the top k x k block of a 2k x k isometry.

    M must have entries in {-1, 0, 1} and 0 < eps <= 1/k, which bounds the
    singular values of eps*M by 1 so that I - eps^2 M^T M is positive
    semidefinite. The bottom block is its principal square root, making
    the columns orthonormal, and the probability of the all-singles
    outcome (1,...,1,0,...,0) equals eps^{2k} * Per(M)^2.
    """
    k = m_int.n
    if k < 1:
        raise ValueError("embed_scaled needs a matrix of dimension >= 1")
    for row in m_int.entries:
        for v in row:
            if v not in (-1, 0, 1):
                raise ValueError(f"entry {v} outside {{-1, 0, 1}}")
    if not 0 < eps <= 1.0 / k + 1e-12:
        raise ValueError(f"eps must lie in (0, 1/{k}], got {eps}")
    b = eps * np.array(m_int.entries, dtype=float)
    gram = np.eye(k) - b.T @ b
    w, v = np.linalg.eigh(gram)
    if w.min() < -1e-9:
        raise ValueError(f"I - eps^2 M^T M has negative eigenvalue {w.min():.3e}")
    c = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return LinearNetwork(np.vstack([b, c]).astype(complex))


def all_singles_state(network: LinearNetwork) -> FockState:
    """The outcome with one photon in each of the first k modes."""
    return (1,) * network.k + (0,) * (network.m - network.k)


# ---------------------------------------------------------------------------
# network JSON format: {"m": ..., "k": ..., "entries": [[[re, im], ...], ...]}

def network_to_json(network: LinearNetwork) -> dict:
    entries = [[[float(z.real), float(z.imag)] for z in row] for row in network.a]
    return {"m": network.m, "k": network.k, "entries": entries}


def network_from_json(data: dict) -> LinearNetwork:
    try:
        m, k, entries = data["m"], data["k"], data["entries"]
    except (TypeError, KeyError) as exc:
        raise ValueError('network JSON needs keys "m", "k" and "entries"') from exc
    if len(entries) != m or any(len(row) != k for row in entries):
        raise ValueError(f"entries must form an {m} x {k} grid of [re, im] pairs")
    a = np.array([[complex(re, im) for re, im in row] for row in entries])
    return LinearNetwork(a)


def load_network(path) -> LinearNetwork:
    import json

    with open(path, "r", encoding="utf-8") as fh:
        return network_from_json(json.load(fh))


def save_network(network: LinearNetwork, path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        json.dump(network_to_json(network), fh)
        fh.write("\n")
