"""Dense statevector simulator for a small universal gate set.

Supports X, Z, H, T (plus TDG so circuits can be inverted), CNOT, CCNOT,
SWAP, controlled-SWAP, and table-driven function oracles acting as
|x>|y> -> |x>|y XOR f(x)>. Qubit 0 is the most significant bit of the
basis index, so |b0 b1 ... > reads left to right. On top of the simulator
sit the SWAP test, Simon's decision procedure for hidden-shift function
tables, and the compute/CCNOT/uncompute circuit that queries a decider
and its complement's decider reversibly.

States are capped at 20 qubits; everything here is exact dense linear
algebra in double precision.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

MAX_QUBITS = 20
NORM_TOL = 1e-9

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
_T_PHASE = complex(math.cos(math.pi / 4), math.sin(math.pi / 4))

_GATE_ARITY = {
    "X": 1, "Z": 1, "H": 1, "T": 1, "TDG": 1,
    "CNOT": 2, "CCNOT": 3, "SWAP": 2, "CSWAP": 3,
}
_SELF_INVERSE = {"X", "Z", "H", "CNOT", "CCNOT", "SWAP", "CSWAP", "ORACLE"}


@dataclass(frozen=True)
class FunctionTable:
    """Explicit table of f: {0,1}^n -> {0,1}^n.

    kind 'injective' requires all outputs distinct; kind 'simon' requires
    a nonzero mask with f(x) = f(x ^ mask) everywhere and exactly 2^(n-1)
    distinct values; kind 'unconstrained' skips structural checks.
    """

    n: int
    outputs: tuple[int, ...]
    kind: str
    mask: int | None = None

    def __post_init__(self):
        size = 1 << self.n
        if len(self.outputs) != size:
            raise ValueError(f"table needs {size} outputs, got {len(self.outputs)}")
        if any(not 0 <= v < size for v in self.outputs):
            raise ValueError("table outputs out of range")
        if self.kind == "injective":
            if len(set(self.outputs)) != size:
                raise ValueError("injective table has repeated outputs")
        elif self.kind == "simon":
            s = self.mask
            if not s or not 0 < s < size:
                raise ValueError("simon table needs a nonzero mask")
            if any(self.outputs[x] != self.outputs[x ^ s] for x in range(size)):
                raise ValueError("outputs do not respect the mask pairing")
            if len(set(self.outputs)) != size // 2:
                raise ValueError("simon table must take exactly 2^(n-1) distinct values")
        elif self.kind != "unconstrained":
            raise ValueError(f"unknown table kind {self.kind!r}")


def _as_random(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def random_injective_table(n: int, seed=0) -> FunctionTable:
    rng = _as_random(seed)
    values = list(range(1 << n))
    rng.shuffle(values)
    return FunctionTable(n, tuple(values), "injective")


def random_simon_table(n: int, seed=0, mask: int | None = None) -> FunctionTable:
    rng = _as_random(seed)
    size = 1 << n
    s = mask if mask is not None else rng.randrange(1, size)
    if not 0 < s < size:
        raise ValueError("mask must be a nonzero n-bit value")
    values = rng.sample(range(size), size // 2)
    outputs = [0] * size
    vi = 0
    for x in range(size):
        if x < x ^ s:
            outputs[x] = outputs[x ^ s] = values[vi]
            vi += 1
    return FunctionTable(n, tuple(outputs), "simon", mask=s)


@dataclass(frozen=True)
class Op:
    gate: str
    qubits: tuple[int, ...]
    table: FunctionTable | None = None
    x_bits: int = 0  # oracle ops: how many leading qubits form the x register


def oracle_op(table: FunctionTable, x_qubits, y_qubits) -> Op:
    """|x>|y> -> |x>|y XOR f(x)> on the given registers (self-inverse)."""
    x_qubits, y_qubits = tuple(x_qubits), tuple(y_qubits)
    if len(x_qubits) != table.n or len(y_qubits) != table.n:
        raise ValueError(f"oracle registers must both have {table.n} qubits")
    return Op("ORACLE", x_qubits + y_qubits, table=table, x_bits=len(x_qubits))


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    ops: tuple[Op, ...] = ()
    output_qubit: int | None = None

    def __post_init__(self):
        if not 0 < self.num_qubits <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}")
        for op in self.ops:
            if op.gate != "ORACLE" and op.gate not in _GATE_ARITY:
                raise ValueError(f"unknown gate {op.gate!r}")
            if op.gate != "ORACLE" and len(op.qubits) != _GATE_ARITY[op.gate]:
                raise ValueError(f"{op.gate} takes {_GATE_ARITY[op.gate]} qubits")
            if len(set(op.qubits)) != len(op.qubits):
                raise ValueError(f"repeated qubit in {op}")
            if any(not 0 <= q < self.num_qubits for q in op.qubits):
                raise ValueError(f"qubit index out of range in {op}")
        if self.output_qubit is not None and not 0 <= self.output_qubit < self.num_qubits:
            raise ValueError("output qubit out of range")

    def inverse(self) -> "Circuit":
        inv = []
        for op in reversed(self.ops):
            if op.gate in _SELF_INVERSE:
                inv.append(op)
            elif op.gate == "T":
                inv.append(Op("TDG", op.qubits))
            elif op.gate == "TDG":
                inv.append(Op("T", op.qubits))
            else:  # pragma: no cover - gate table is closed
                raise ValueError(f"cannot invert {op.gate}")
        return Circuit(self.num_qubits, tuple(inv), self.output_qubit)

    def shifted(self, offset: int, num_qubits: int) -> "Circuit":
        ops = tuple(
            Op(op.gate, tuple(q + offset for q in op.qubits), op.table, op.x_bits)
            for op in self.ops
        )
        out = None if self.output_qubit is None else self.output_qubit + offset
        return Circuit(num_qubits, ops, out)


class StateVector:
    """2^q complex amplitudes with unit norm (within 1e-9)."""

    def __init__(self, amplitudes, num_qubits: int | None = None):
        amps = np.asarray(amplitudes, dtype=complex)
        q = int(np.log2(len(amps))) if num_qubits is None else num_qubits
        if len(amps) != 1 << q:
            raise ValueError(f"{len(amps)} amplitudes do not make a {q}-qubit state")
        if q > MAX_QUBITS:
            raise ValueError(f"qubit count {q} exceeds the {MAX_QUBITS}-qubit guard")
        norm = float(np.sum(np.abs(amps) ** 2))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"state norm {norm} is not 1")
        self.amplitudes = amps
        self.num_qubits = q

    @classmethod
    def zeros(cls, num_qubits: int) -> "StateVector":
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[0] = 1.0
        return cls(amps, num_qubits)

    @classmethod
    def basis(cls, num_qubits: int, bits) -> "StateVector":
        index = bits if isinstance(bits, int) else _bits_to_index(bits)
        amps = np.zeros(1 << num_qubits, dtype=complex)
        amps[index] = 1.0
        return cls(amps, num_qubits)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amplitudes) ** 2)))

    def inner(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))


def _bits_to_index(bits) -> int:
    index = 0
    for b in bits:
        index = (index << 1) | (b & 1)
    return index


def _shift(q: int, qubit: int) -> int:
    return q - 1 - qubit


def _apply_single(amps: np.ndarray, q: int, target: int, gate: str) -> np.ndarray:
    a = amps.reshape(1 << target, 2, -1)
    if gate == "X":
        return np.flip(a, axis=1).reshape(-1)
    out = a.copy()
    if gate == "Z":
        out[:, 1, :] *= -1
    elif gate == "T":
        out[:, 1, :] *= _T_PHASE
    elif gate == "TDG":
        out[:, 1, :] *= _T_PHASE.conjugate()
    elif gate == "H":
        a0, a1 = a[:, 0, :], a[:, 1, :]
        out[:, 0, :] = (a0 + a1) * _INV_SQRT2
        out[:, 1, :] = (a0 - a1) * _INV_SQRT2
    else:  # pragma: no cover
        raise ValueError(f"unknown single-qubit gate {gate}")
    return out.reshape(-1)


def _apply_permutation(amps: np.ndarray, q: int, op: Op) -> np.ndarray:
    idx = np.arange(len(amps))
    g, qs = op.gate, op.qubits
    if g == "CNOT":
        c, t = (_shift(q, v) for v in qs)
        mask = ((idx >> c) & 1) << t
    elif g == "CCNOT":
        c1, c2, t = (_shift(q, v) for v in qs)
        mask = (((idx >> c1) & (idx >> c2)) & 1) << t
    elif g in ("SWAP", "CSWAP"):
        if g == "CSWAP":
            c, a, b = (_shift(q, v) for v in qs)
            ctrl = (idx >> c) & 1
        else:
            a, b = (_shift(q, v) for v in qs)
            ctrl = 1
        diff = (((idx >> a) ^ (idx >> b)) & 1) & ctrl
        mask = (diff << a) | (diff << b)
    elif g == "ORACLE":
        table = op.table
        x_qubits = op.qubits[: op.x_bits]
        y_qubits = op.qubits[op.x_bits:]
        n = table.n
        xval = np.zeros(len(amps), dtype=np.int64)
        for k, xq in enumerate(x_qubits):
            xval |= ((idx >> _shift(q, xq)) & 1) << (n - 1 - k)
        fx = np.asarray(table.outputs, dtype=np.int64)[xval]
        mask = np.zeros(len(amps), dtype=np.int64)
        for k, yq in enumerate(y_qubits):
            mask |= ((fx >> (n - 1 - k)) & 1) << _shift(q, yq)
    else:  # pragma: no cover
        raise ValueError(f"unknown permutation gate {g}")
    # all of the above are involutions: new[i] = old[i ^ mask(i)]
    return amps[idx ^ mask]


def run(circuit: Circuit, initial: StateVector | None = None) -> StateVector:
    """Apply the circuit; unitarity keeps the norm within 1e-9."""
    state = initial if initial is not None else StateVector.zeros(circuit.num_qubits)
    if state.num_qubits != circuit.num_qubits:
        raise ValueError(
            f"state has {state.num_qubits} qubits, circuit needs {circuit.num_qubits}"
        )
    amps = state.amplitudes
    q = circuit.num_qubits
    for op in circuit.ops:
        if op.gate in ("X", "Z", "H", "T", "TDG"):
            amps = _apply_single(amps, q, op.qubits[0], op.gate)
        else:
            amps = _apply_permutation(amps, q, op)
    return StateVector(amps, q)


def _as_generator(rng) -> np.random.Generator:
    return rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)


def _register_values(state: StateVector, qubits) -> np.ndarray:
    idx = np.arange(len(state.amplitudes))
    out = np.zeros(len(idx), dtype=np.int64)
    for k, qb in enumerate(qubits):
        out |= ((idx >> _shift(state.num_qubits, qb)) & 1) << (len(qubits) - 1 - k)
    return out


def _register_probs(state: StateVector, qubits) -> np.ndarray:
    values = _register_values(state, qubits)
    weights = np.abs(state.amplitudes) ** 2
    return np.bincount(values, weights=weights, minlength=1 << len(qubits))


def measure(state: StateVector, qubits, rng=0) -> tuple[tuple[int, ...], StateVector]:
    """Measure the given qubits; outcomes follow the squared amplitudes.

    Returns the outcome bits (in the order the qubits were listed) and the
    collapsed, renormalised post-measurement state.
    """
    qubits = tuple(qubits)
    if any(not 0 <= qb < state.num_qubits for qb in qubits):
        raise IndexError("measured qubit out of range")
    gen = _as_generator(rng)
    probs = _register_probs(state, qubits)
    cdf = np.cumsum(probs)
    outcome = int(np.searchsorted(cdf, gen.random() * cdf[-1], side="right"))
    outcome = min(outcome, len(probs) - 1)
    values = _register_values(state, qubits)
    amps = np.where(values == outcome, state.amplitudes, 0.0)
    amps = amps / math.sqrt(probs[outcome])
    bits = tuple((outcome >> (len(qubits) - 1 - k)) & 1 for k in range(len(qubits)))
    return bits, StateVector(amps, state.num_qubits)


def sample_register(state: StateVector, qubits, rng, shots: int) -> list[int]:
    """Outcome values of repeated fresh measurements of the same state."""
    gen = _as_generator(rng)
    probs = _register_probs(state, qubits)
    cdf = np.cumsum(probs)
    u = gen.random(shots) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return [int(v) for v in np.minimum(idx, len(probs) - 1)]


# ---------------------------------------------------------------------------
# SWAP test


@dataclass(frozen=True)
class SwapTestResult:
    probability: float          # analytic acceptance probability
    outcomes: tuple[int, ...]   # sampled ancilla readings, if requested


def swap_test(psi: StateVector, phi: StateVector, shots: int = 0, seed=0) -> SwapTestResult:
    """Acceptance probability (1 + |<psi|phi>|^2) / 2 of the one-ancilla test.

    Builds the Hadamard / controlled-SWAP / Hadamard circuit explicitly and
    reads the ancilla-0 probability off the final state.
    """
    if psi.num_qubits != phi.num_qubits:
        raise ValueError("states must have the same number of qubits")
    q = psi.num_qubits
    total = 2 * q + 1
    amps = np.kron(np.array([1.0, 0.0], dtype=complex),
                   np.kron(psi.amplitudes, phi.amplitudes))
    ops = [Op("H", (0,))]
    ops += [Op("CSWAP", (0, 1 + i, 1 + q + i)) for i in range(q)]
    ops.append(Op("H", (0,)))
    final = run(Circuit(total, tuple(ops)), StateVector(amps, total))
    probability = float(np.sum(np.abs(final.amplitudes[: 1 << (total - 1)]) ** 2))
    outcomes = ()
    if shots:
        outcomes = tuple(sample_register(final, (0,), seed, shots))
    return SwapTestResult(probability, outcomes)


# ---------------------------------------------------------------------------
# Simon's decision procedure


class SimonRoundsExhausted(RuntimeError):
    """The round budget ran out before n-1 independent equations appeared."""


@dataclass(frozen=True)
class SimonDecision:
    kind: str                 # 'simon' or 'injective'
    mask: int | None
    rounds: int
    vectors: tuple[int, ...]  # every measured x-register value, in order


def _gf2_insert(basis: dict[int, int], vec: int) -> bool:
    # keep the basis fully reduced: every row's support is its own pivot
    # (the leading bit) plus non-pivot columns only
    v = vec
    while v:
        p = v.bit_length() - 1
        if p not in basis:
            break
        v ^= basis[p]
    if not v:
        return False
    p = v.bit_length() - 1
    for q in list(basis):
        if (v >> q) & 1:
            v ^= basis[q]
    for q in list(basis):
        if (basis[q] >> p) & 1:
            basis[q] ^= v
    basis[p] = v
    return True


def _null_vector(basis: dict[int, int], n: int) -> int:
    free = next(b for b in range(n) if b not in basis)
    s = 1 << free
    for p, row in basis.items():
        if (row >> free) & 1:
            s |= 1 << p
    return s


def simon_decide(table: FunctionTable, seed=0, max_rounds: int | None = None) -> SimonDecision:
    """Decide whether the table is injective or hides a nonzero XOR mask.

    Each round runs Hadamards, the function oracle, Hadamards, and measures
    the input register; the measured vector y always satisfies y . s = 0
    for a hidden mask s. Once n-1 independent vectors have accumulated,
    the unique nonzero candidate mask is solved for by GF(2) elimination
    and confirmed with two table lookups. The prepared pre-measurement
    state is identical every round, so it is built once and the rounds
    draw independent measurement samples from it.
    """
    n = table.n
    if table.kind not in ("injective", "simon"):
        raise ValueError("simon_decide expects an injective or simon table")
    if 2 * n > MAX_QUBITS:
        raise ValueError(f"needs {2 * n} qubits, exceeding the {MAX_QUBITS}-qubit guard")
    budget = max_rounds if max_rounds is not None else 10 * n
    x_reg = tuple(range(n))
    y_reg = tuple(range(n, 2 * n))
    ops = [Op("H", (i,)) for i in x_reg]
    ops.append(oracle_op(table, x_reg, y_reg))
    ops += [Op("H", (i,)) for i in x_reg]
    state = run(Circuit(2 * n, tuple(ops)))
    gen = _as_generator(seed)
    # the pre-measurement state never changes, so cache its register CDF
    # and let each round draw an independent measurement from it
    probs = _register_probs(state, x_reg)
    cdf = np.cumsum(probs)
    basis: dict[int, int] = {}
    vectors: list[int] = []
    rounds = 0
    while len(basis) < n - 1:
        if rounds >= budget:
            raise SimonRoundsExhausted(
                f"no n-1 independent equations after {budget} rounds"
            )
        u = gen.random() * cdf[-1]
        y = int(min(np.searchsorted(cdf, u, side="right"), len(probs) - 1))
        vectors.append(y)
        rounds += 1
        _gf2_insert(basis, y)
    candidate = _null_vector(basis, n) if n > 1 else 1
    if table.outputs[0] == table.outputs[candidate]:
        return SimonDecision("simon", candidate, rounds, tuple(vectors))
    return SimonDecision("injective", None, rounds, tuple(vectors))


# ---------------------------------------------------------------------------
# complement-pair query circuit


def build_simquery(q_l: Circuit, q_lc: Circuit) -> Circuit:
    """Compose a decider and its complement's decider into one reversible query.

    Both circuits act on t qubits and designate an output qubit. The result
    acts on 2t+1 qubits: it runs both deciders, X-conjugates the complement
    decider's output, CCNOTs both outputs onto the extra qubit, and then
    uncomputes both deciders. Where the first accepts and the second
    rejects deterministically, the final qubit flips and the 2t work
    qubits return to their inputs.
    """
    if q_l.num_qubits != q_lc.num_qubits:
        raise ValueError("both deciders must act on the same number of qubits")
    if q_l.output_qubit is None or q_lc.output_qubit is None:
        raise ValueError("both deciders must designate an output qubit")
    t = q_l.num_qubits
    total = 2 * t + 1
    left = q_l.shifted(0, total)
    right = q_lc.shifted(t, total)
    ops = list(left.ops) + list(right.ops)
    ops.append(Op("X", (right.output_qubit,)))
    ops.append(Op("CCNOT", (left.output_qubit, right.output_qubit, 2 * t)))
    ops.append(Op("X", (right.output_qubit,)))
    ops += list(left.inverse().ops)
    ops += list(right.inverse().ops)
    return Circuit(total, tuple(ops), output_qubit=2 * t)


def constant_decider(accept: bool, t: int = 1) -> Circuit:
    """Toy decider on t qubits: flips its output qubit iff it accepts."""
    ops = (Op("X", (0,)),) if accept else ()
    return Circuit(t, ops, output_qubit=0)


# acceptance error of the noisy toy decider: three ancillas biased to
# P(1) = (2 - sqrt(2))/4 by an H T H sandwich, ANDed onto the output
NOISY_DECIDER_ERROR = ((2.0 - math.sqrt(2.0)) / 4.0) ** 3


def noisy_decider(accept: bool) -> Circuit:
    """Toy decider with exact one-sided error below 0.01.

    Acts on 5 qubits: output 0, noise ancillas 1..3, work qubit 4. Each
    ancilla is rotated to hold 1 with probability (2 - sqrt(2))/4, and a
    CCNOT cascade flips the output when all three read 1, so the decider
    errs with probability ((2 - sqrt(2))/4)^3, about 3.1e-3.
    """
    ops: list[Op] = []
    for a in (1, 2, 3):
        ops += [Op("H", (a,)), Op("T", (a,)), Op("H", (a,))]
    if accept:
        ops.append(Op("X", (0,)))
    ops.append(Op("CCNOT", (1, 2, 4)))
    ops.append(Op("CCNOT", (4, 3, 0)))
    return Circuit(5, tuple(ops), output_qubit=0)


# ---------------------------------------------------------------------------
# circuit text format: one op per line, "GATE q ...", e.g. "H 0" / "CNOT 0 1"


def parse_circuit(text: str, num_qubits: int | None = None) -> Circuit:
    ops = []
    highest = -1
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        gate = toks[0].upper()
        if gate not in _GATE_ARITY:
            raise ValueError(f"unknown gate {gate!r} in circuit text")
        try:
            qubits = tuple(int(t) for t in toks[1:])
        except ValueError as exc:
            raise ValueError(f"bad qubit index in {line!r}") from exc
        if len(qubits) != _GATE_ARITY[gate]:
            raise ValueError(f"{gate} takes {_GATE_ARITY[gate]} qubits, got {len(qubits)}")
        highest = max(highest, *qubits)
        ops.append(Op(gate, qubits))
    q = num_qubits if num_qubits is not None else highest + 1
    if q < 1:
        raise ValueError("circuit text declares no qubits")
    return Circuit(q, tuple(ops))


def format_circuit(circuit: Circuit) -> str:
    lines = []
    for op in circuit.ops:
        if op.gate == "ORACLE":
            raise ValueError("oracle ops have no text form")
        lines.append(" ".join([op.gate, *map(str, op.qubits)]))
    return "\n".join(lines) + "\n"
