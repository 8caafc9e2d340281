"""Lazy query adversary for injective-vs-hidden-shift function families.

The adversary answers queries with fresh distinct values (injective so
far) and commits only afterwards: either to a random bijection agreeing
with the transcript, or to a hidden-shift (Simon) function whose mask
avoids every pairwise XOR of the queried points. The module also
evaluates the collision-probability expression driving the argument and
runs the matching sampling experiment against an exact pair-counting
ground truth.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .qsim import FunctionTable


@dataclass(frozen=True)
class QueryTranscript:
    """Ordered (x, y) pairs with all x distinct and all y distinct."""

    n: int
    pairs: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        size = 1 << self.n
        xs = [x for x, _ in self.pairs]
        ys = [y for _, y in self.pairs]
        if any(not 0 <= v < size for v in xs + ys):
            raise ValueError("transcript value out of range")
        if len(set(xs)) != len(xs):
            raise ValueError("transcript queries must be distinct")
        if len(set(ys)) != len(ys):
            raise ValueError("transcript answers must be distinct")

    @property
    def queried(self) -> dict[int, int]:
        return dict(self.pairs)


def _derived_rng(seed, *parts) -> random.Random:
    # string seeding hashes with sha512, so this is stable across runs
    return random.Random(":".join(str(p) for p in (seed, *parts)))


def lazy_query(transcript: QueryTranscript, x: int, seed=0) -> tuple[int, QueryTranscript]:
    """Answer x with a fresh value distinct from all prior answers.

    Repeating a query returns the recorded answer and leaves the
    transcript unchanged. The fresh value is uniform over the unused
    codomain and deterministic given the seed and the history.
    """
    size = 1 << transcript.n
    if not 0 <= x < size:
        raise ValueError(f"query {x} out of range for n={transcript.n}")
    recorded = transcript.queried
    if x in recorded:
        return recorded[x], transcript
    used = {y for _, y in transcript.pairs}
    available = [y for y in range(size) if y not in used]
    if not available:
        raise ValueError("codomain exhausted")
    rng = _derived_rng(seed, transcript.pairs, x)
    y = available[rng.randrange(len(available))]
    return y, QueryTranscript(transcript.n, transcript.pairs + ((x, y),))


def restricted_masks(transcript: QueryTranscript) -> set[int]:
    """Masks excluded by the transcript: every pairwise XOR of queried points.

    At most l(l-1)/2 values for l queries.
    """
    xs = [x for x, _ in transcript.pairs]
    return {xs[i] ^ xs[j] for i in range(len(xs)) for j in range(i + 1, len(xs))}


def commit_simon(transcript: QueryTranscript, seed=0) -> FunctionTable:
    """Complete the transcript to a hidden-shift table.

    The mask is drawn uniformly from the nonzero masks that are not a
    pairwise XOR of queried points; transcript answers are copied onto
    their partner inputs and the remaining pairs receive fresh distinct
    values. Raises if every nonzero mask is restricted.
    """
    n = transcript.n
    size = 1 << n
    blocked = restricted_masks(transcript)
    admissible = [s for s in range(1, size) if s not in blocked]
    if not admissible:
        raise ValueError(
            "no admissible mask: the transcript's pairwise XORs cover every nonzero value"
        )
    rng = _derived_rng(seed, "commit-simon", transcript.pairs)
    s = admissible[rng.randrange(len(admissible))]
    outputs: list[int | None] = [None] * size
    for x, y in transcript.pairs:
        outputs[x] = y
        outputs[x ^ s] = y
    used = {y for _, y in transcript.pairs}
    reps = [x for x in range(size) if x < x ^ s and outputs[x] is None]
    fresh = rng.sample([v for v in range(size) if v not in used], len(reps))
    for x, v in zip(reps, fresh):
        outputs[x] = outputs[x ^ s] = v
    return FunctionTable(n, tuple(outputs), "simon", mask=s)


def commit_injective(transcript: QueryTranscript, seed=0) -> FunctionTable:
    """Complete the transcript to a uniformly random agreeing bijection."""
    n = transcript.n
    size = 1 << n
    rng = _derived_rng(seed, "commit-injective", transcript.pairs)
    outputs: list[int | None] = [None] * size
    for x, y in transcript.pairs:
        outputs[x] = y
    used = {y for _, y in transcript.pairs}
    remaining = [v for v in range(size) if v not in used]
    rng.shuffle(remaining)
    it = iter(remaining)
    for x in range(size):
        if outputs[x] is None:
            outputs[x] = next(it)
    return FunctionTable(n, tuple(outputs), "injective")


def collision_probability(n: int, l: int) -> Fraction:
    """(l - 1) / (2^n - 1 - l(l-1)/2), exactly.

    This is the chance that the l-th query collides with an earlier one
    on a hidden-shift function, given that the first l-1 queries did not
    collide. Raises when the denominator is not positive (the regime
    where the bound is vacuous).
    """
    if l < 1:
        raise ValueError("need at least one query")
    denom = (1 << n) - 1 - l * (l - 1) // 2
    if denom <= 0:
        raise ValueError(f"denominator {denom} <= 0: the bound is vacuous for n={n}, l={l}")
    return Fraction(l - 1, denom)


def pair_collision_probability(n: int, l: int) -> Fraction:
    """Exact chance that l uniform distinct queries hit some hidden pair.

    The domain splits into 2^(n-1) partner pairs; counting selections
    that avoid completing a pair gives
    P(no collision) = prod_{i<l} (2^n - 2i) / (2^n - i).
    """
    size = 1 << n
    if not 0 <= l <= size:
        raise ValueError(f"cannot make {l} distinct queries on {size} points")
    none = Fraction(1)
    for i in range(l):
        none *= Fraction(size - 2 * i, size - i)
        if none == 0:
            break
    return 1 - none


@dataclass(frozen=True)
class CollisionExperiment:
    n: int
    l: int
    trials: int
    collisions: int
    rate: float
    stderr: float


def run_distinguishing_experiment(n: int, l: int, trials: int, seed=0) -> CollisionExperiment:
    """Empirical collision rate of l random distinct queries on random
    hidden-shift functions, with its binomial standard error.

    Whether two queries collide depends only on the mask (f(x) = f(x')
    iff x ^ x' = s), so each trial draws a uniform nonzero mask and l
    distinct queries without materialising the value table.
    """
    if n > 12:
        raise ValueError("table-scale experiments are capped at n = 12")
    if trials < 1:
        raise ValueError("need at least one trial")
    size = 1 << n
    rng = random.Random(seed)
    collisions = 0
    for _ in range(trials):
        s = rng.randrange(1, size)
        queries = rng.sample(range(size), l)
        qset = set(queries)
        if any((x ^ s) in qset for x in queries):
            collisions += 1
    rate = collisions / trials
    stderr = math.sqrt(rate * (1.0 - rate) / trials)
    return CollisionExperiment(n, l, trials, collisions, rate, stderr)
