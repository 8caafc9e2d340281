"""Recover exact permanents of sign matrices from a squared-permanent oracle.

The oracle answers queries X with a value within a multiplicative factor g
of Per(X)^2 and answers exactly 0 iff Per(X) = 0. Recovery walks down the
first column recursively and, at each level, searches a precomputed advice
table of bordered gadgets Z_i for the one whose overlap matrix W_i has
Per(W_i) = 0; the table stores the exact rational ratio f_i that then
yields Per(X) = -f_i * Per(X^{1,1}).

Advice tables are built by exhausting all sign matrices of the target
dimension and bordering each one, which provably covers every ratio
-Per(X)/Per(X^{1,1}) that the search can need. Tables are deduplicated by
ratio (first witness in enumeration order wins), sorted ascending, and
cached to disk.
"""

from __future__ import annotations

import math
import multiprocessing
import os
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .gadgets import build_w, build_z
from .perm_core import IntMatrix, minor, permanent_ryser, rotate_column_to_front


class MissingAdviceError(LookupError):
    """No advice table is available for a dimension the recursion reached."""


class AdviceSearchError(RuntimeError):
    """The advice search exhausted the table without finding Per(W) = 0.

    This signals an incomplete table or an oracle violating its contract;
    it is distinct from ``MissingAdviceError`` on purpose.
    """


class ApproxOracle:
    """Multiplicative approximation of the squared permanent.

    Contract: Per(X)^2 / g <= query(X) <= g * Per(X)^2 for every query,
    and the answer is 0 exactly when Per(X) = 0. ``query_count`` tallies
    every query issued to this instance.
    """

    g: float = 1.0

    def __init__(self):
        self.query_count = 0

    def query(self, x: IntMatrix):
        self.query_count += 1
        return self._answer(x)

    def _answer(self, x: IntMatrix):
        raise NotImplementedError


class ExactOracle(ApproxOracle):
    """g = 1: answers Per(X)^2 exactly."""

    def _answer(self, x: IntMatrix) -> int:
        return permanent_ryser(x) ** 2


class NoisyOracle(ApproxOracle):
    """Answers Per(X)^2 * u with u drawn uniformly from [1/g, g] per query.

    Zero answers stay exactly zero, so zero detection survives the noise.
    """

    def __init__(self, g: float, seed=0):
        if g < 1:
            raise ValueError(f"approximation factor must be >= 1, got {g}")
        super().__init__()
        self.g = float(g)
        self._rng = random.Random(seed)

    def _answer(self, x: IntMatrix) -> float:
        p2 = permanent_ryser(x) ** 2
        if p2 == 0:
            return 0.0
        return p2 * self._rng.uniform(1.0 / self.g, self.g)


class BosonOracle(ApproxOracle):
    """Squared permanent read off a boson sampler.

    The queried sign matrix M (k x k) is scaled by eps = 1/k and embedded
    as the top block of a 2k x k isometry; the probability p of the
    all-singles outcome then satisfies p = eps^{2k} * Per(M)^2, so the
    oracle answers p / eps^{2k}. Exact mode evaluates p directly (answers
    within about 1e-9 relative error, snapped to 0 below 0.5, which is
    sound because nonzero integer permanents have square >= 1). Empirical
    mode estimates p from seeded samples of the full distribution and is
    the desk-scale stand-in for an approximate-counting estimate.
    """

    EXACT_DIM_LIMIT = 7
    EMPIRICAL_DIM_LIMIT = 2

    def __init__(self, mode: str = "exact", samples: int = 10000, seed=0):
        if mode not in ("exact", "empirical"):
            raise ValueError(f"unknown boson oracle mode {mode!r}")
        super().__init__()
        self.mode = mode
        self.samples = int(samples)
        self._seed = seed

    def _answer(self, x: IntMatrix) -> float:
        from . import boson

        k = x.n
        if k == 0:
            return 1.0
        limit = self.EXACT_DIM_LIMIT if self.mode == "exact" else self.EMPIRICAL_DIM_LIMIT
        if k > limit:
            raise ValueError(f"dimension {k} too large for boson oracle mode {self.mode!r} (limit {limit})")
        eps = 1.0 / k
        network = boson.embed_scaled(x, eps)
        target = boson.all_singles_state(network)
        if self.mode == "exact":
            p = boson.outcome_probability(network, target)
        else:
            dist = boson.full_distribution(network)
            draws = boson.sample(dist, (self._seed, self.query_count), self.samples)
            p = sum(1 for s in draws if s == target) / self.samples
        answer = p * float(k) ** (2 * k)
        if self.mode == "exact" and answer < 0.5:
            return 0.0
        return answer


def make_exact_oracle() -> ExactOracle:
    return ExactOracle()


def make_noisy_oracle(g: float, seed=0) -> NoisyOracle:
    return NoisyOracle(g, seed)


def make_boson_oracle(mode: str = "exact", samples: int = 10000, seed=0) -> BosonOracle:
    return BosonOracle(mode, samples, seed)


# ---------------------------------------------------------------------------
# advice tables


@dataclass(frozen=True)
class AdviceEntry:
    """A bordered gadget Z with alpha = Per(Z^{k+2,k+2}) != 0 and
    ratio = Per(Z) / alpha as an exact rational."""

    z: IntMatrix
    alpha: int
    ratio: Fraction


@dataclass(frozen=True)
class AdviceTable:
    """Advice for recovering k x k sign matrices; ratios strictly ascending."""

    size_k: int
    entries: tuple[AdviceEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def ratios(self) -> list[Fraction]:
        return [e.ratio for e in self.entries]


def _candidate_matrix(k: int, index: int) -> IntMatrix:
    """The index-th matrix in the fixed enumeration of {-1,0,1}^{k x k}."""
    digits = []
    for _ in range(k * k):
        index, d = divmod(index, 3)
        digits.append(d - 1)
    rows = [tuple(digits[r * k:(r + 1) * k]) for r in range(k)]
    return IntMatrix(tuple(rows))


def _advice_chunk(args):
    k, start, stop = args
    found: dict[Fraction, tuple[int, IntMatrix, int]] = {}
    for index in range(start, stop):
        x = _candidate_matrix(k, index)
        z = build_z(x).matrix
        alpha = permanent_ryser(minor(z, k + 2, k + 2))
        if alpha == 0:
            continue
        ratio = Fraction(permanent_ryser(z), alpha)
        if ratio not in found:
            found[ratio] = (index, z, alpha)
    return found


def default_workers() -> int:
    cap = os.environ.get("PERMLAB_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(limit, os.cpu_count() or 1))


def generate_advice(k: int, workers: int | None = None) -> AdviceTable:
    """Exhaust {-1,0,1}^{k x k}, border every candidate, and tabulate ratios.

    Candidates whose top-left gadget minor has permanent 0 are discarded;
    the rest are deduplicated by ratio keeping the first witness in
    enumeration order, then sorted ascending. Because each X with
    Per(X^{1,1}) != 0 contributes its own ratio -Per(X)/Per(X^{1,1}), the
    table is complete for the recovery search by construction.
    """
    if k < 1:
        raise ValueError("advice dimension must be >= 1")
    total = 3 ** (k * k)
    workers = workers if workers is not None else default_workers()
    if workers <= 1 or total < 2000:
        merged = _advice_chunk((k, 0, total))
    else:
        chunks = max(workers * 8, 32)
        step = math.ceil(total / chunks)
        jobs = [(k, lo, min(lo + step, total)) for lo in range(0, total, step)]
        merged = {}
        with multiprocessing.Pool(workers) as pool:
            for part in pool.imap_unordered(_advice_chunk, jobs):
                for ratio, witness in part.items():
                    if ratio not in merged or witness[0] < merged[ratio][0]:
                        merged[ratio] = witness
    entries = tuple(
        AdviceEntry(z=z, alpha=alpha, ratio=ratio)
        for ratio, (_, z, alpha) in sorted(merged.items(), key=lambda kv: kv[0])
    )
    return AdviceTable(size_k=k, entries=entries)


# advice file format: header "k <dim> count <N>", then one line per entry
# holding the (k+2)^2 flattened Z entries, alpha, and the ratio as p/q.

def format_advice(table: AdviceTable) -> str:
    lines = [f"k {table.size_k} count {len(table.entries)}"]
    for e in table.entries:
        flat = " ".join(str(v) for row in e.z.entries for v in row)
        lines.append(f"{flat} {e.alpha} {e.ratio.numerator}/{e.ratio.denominator}")
    return "\n".join(lines) + "\n"


def parse_advice(text: str) -> AdviceTable:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("advice file is empty")
    head = lines[0].split()
    if len(head) != 4 or head[0] != "k" or head[2] != "count":
        raise ValueError(f"bad advice header {lines[0]!r}")
    k, count = int(head[1]), int(head[3])
    if len(lines) - 1 != count:
        raise ValueError(f"advice header promises {count} entries, file has {len(lines) - 1}")
    dim = k + 2
    entries = []
    for ln in lines[1:]:
        toks = ln.split()
        if len(toks) != dim * dim + 2:
            raise ValueError(f"advice entry has {len(toks)} fields, expected {dim * dim + 2}")
        vals = [int(t) for t in toks[: dim * dim]]
        alpha = int(toks[-2])
        num, _, den = toks[-1].partition("/")
        ratio = Fraction(int(num), int(den))
        z = IntMatrix(tuple(tuple(vals[r * dim:(r + 1) * dim]) for r in range(dim)))
        entries.append(AdviceEntry(z=z, alpha=alpha, ratio=ratio))
    return AdviceTable(size_k=k, entries=tuple(entries))


def save_advice(table: AdviceTable, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_advice(table), encoding="utf-8")


def load_advice(path) -> AdviceTable:
    return parse_advice(Path(path).read_text(encoding="utf-8"))


def default_cache_dir() -> Path:
    env = os.environ.get("PERMLAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "permlab"


def cached_advice(k: int, cache_dir=None, workers: int | None = None) -> AdviceTable:
    """Load the advice table for dimension k, generating and saving it once."""
    directory = Path(cache_dir) if cache_dir else default_cache_dir()
    path = directory / f"advice_k{k}.txt"
    if path.exists():
        return load_advice(path)
    table = generate_advice(k, workers=workers)
    save_advice(table, path)
    return table


def advice_for(n: int, cache_dir=None, workers: int | None = None) -> dict[int, AdviceTable]:
    """Advice tables for every dimension 1..n, from the cache."""
    return {k: cached_advice(k, cache_dir, workers) for k in range(1, n + 1)}


# ---------------------------------------------------------------------------
# recovery


def _search_zero(table: AdviceTable, x: IntMatrix, oracle: ApproxOracle) -> int:
    """Index i with oracle(W_i) = 0, where W_i overlaps Z_i with x.

    Runs the two-middle-points valley search on t(i) = sqrt(O(W_i))/|a_i|
    first; because t is valley shaped with a unique exact zero under an
    exact oracle, the search lands on it. Multiplicative noise can bend
    the comparisons, so the landing index is verified and a linear scan
    (still exact, more queries) finishes the job on a miss.
    """
    entries = table.entries
    if not entries:
        raise AdviceSearchError(f"advice table for k={table.size_k} is empty")

    def t_at(i: int) -> float:
        answer = oracle.query(build_w(entries[i].z, x))
        return math.sqrt(answer) / abs(entries[i].alpha)

    lo, hi = 0, len(entries) - 1
    while lo < hi:
        v = (lo + hi) // 2
        w = v + 1
        tv = t_at(v)
        if tv == 0:
            return v
        tw = t_at(w)
        if tw == 0:
            return w
        if tv < tw:
            hi = v
        else:
            lo = w
    if t_at(lo) == 0:
        return lo
    for i in range(len(entries)):
        if oracle.query(build_w(entries[i].z, x)) == 0:
            return i
    raise AdviceSearchError(
        f"no gadget in the k={table.size_k} table cancels the permanent: "
        "the table is incomplete or the oracle violates its contract"
    )


def recover_permanent(x: IntMatrix, oracle: ApproxOracle,
                      advice: dict[int, AdviceTable]) -> int:
    """Compute Per(X) exactly for X over {-1,0,1} using only oracle answers.

    Needs advice tables for every dimension 1..n. Recursion: 1x1 matrices
    are read off directly; a zero oracle answer on X or on all first-row
    minors means Per(X) = 0; otherwise a column with a nonzero minor is
    rotated to the front, Per(X^{1,1}) is recovered recursively, and the
    advice search supplies the exact ratio closing the level.
    """
    n = x.n
    if n == 0:
        return 1
    if n == 1:
        return x.entries[0][0]
    if oracle.query(x) == 0:
        return 0
    pivot = None
    for j in range(1, n + 1):
        if oracle.query(minor(x, 1, j)) != 0:
            pivot = j
            break
    if pivot is None:
        return 0
    xr = rotate_column_to_front(x, pivot)
    sub_value = recover_permanent(minor(xr, 1, 1), oracle, advice)
    table = advice.get(n)
    if table is None:
        raise MissingAdviceError(f"no advice table for dimension {n}")
    idx = _search_zero(table, xr, oracle)
    entry = table.entries[idx]
    value = -entry.ratio * sub_value
    if value.denominator != 1:
        raise AdviceSearchError(
            f"recovered a non-integer permanent {value}; the oracle violated its contract"
        )
    return int(value)
