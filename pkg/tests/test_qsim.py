import math
import random

import numpy as np
import pytest

from permlab.qsim import (
    Circuit,
    FunctionTable,
    Op,
    SimonRoundsExhausted,
    StateVector,
    build_simquery,
    constant_decider,
    format_circuit,
    measure,
    noisy_decider,
    oracle_op,
    parse_circuit,
    random_injective_table,
    random_simon_table,
    run,
    sample_register,
    simon_decide,
    swap_test,
)


def random_state(q, gen):
    amps = gen.normal(size=1 << q) + 1j * gen.normal(size=1 << q)
    amps /= np.linalg.norm(amps)
    return StateVector(amps, q)


def random_circuit(q, rng, length=20):
    ops = []
    for _ in range(length):
        gate = rng.choice(("X", "Z", "H", "T", "CNOT", "SWAP", "CCNOT", "CSWAP"))
        arity = {"X": 1, "Z": 1, "H": 1, "T": 1, "CNOT": 2, "SWAP": 2,
                 "CCNOT": 3, "CSWAP": 3}[gate]
        ops.append(Op(gate, tuple(rng.sample(range(q), arity))))
    return Circuit(q, tuple(ops))


class TestGates:
    def test_x_flips(self):
        final = run(Circuit(1, (Op("X", (0,)),)))
        assert final.amplitudes[1] == pytest.approx(1.0)

    def test_z_phases_one(self):
        final = run(Circuit(1, (Op("Z", (0,)),)), StateVector.basis(1, 1))
        assert final.amplitudes[1] == pytest.approx(-1.0)

    def test_h_twice_is_identity(self):
        final = run(Circuit(1, (Op("H", (0,)), Op("H", (0,)))))
        assert final.amplitudes[0] == pytest.approx(1.0)

    def test_t_eighth_power_is_identity(self):
        ops = tuple(Op("T", (0,)) for _ in range(8))
        final = run(Circuit(1, ops), StateVector.basis(1, 1))
        assert final.amplitudes[1] == pytest.approx(1.0)

    def test_cnot_on_10(self):
        final = run(Circuit(2, (Op("CNOT", (0, 1)),)), StateVector.basis(2, (1, 0)))
        assert final.amplitudes[0b11] == pytest.approx(1.0)

    def test_cnot_leaves_00(self):
        final = run(Circuit(2, (Op("CNOT", (0, 1)),)))
        assert final.amplitudes[0] == pytest.approx(1.0)

    def test_ccnot_truth_table(self):
        for c1 in (0, 1):
            for c2 in (0, 1):
                start = StateVector.basis(3, (c1, c2, 0))
                final = run(Circuit(3, (Op("CCNOT", (0, 1, 2)),)), start)
                want = (c1 << 2) | (c2 << 1) | (c1 & c2)
                assert final.amplitudes[want] == pytest.approx(1.0)

    def test_swap(self):
        final = run(Circuit(2, (Op("SWAP", (0, 1)),)), StateVector.basis(2, (1, 0)))
        assert final.amplitudes[0b01] == pytest.approx(1.0)

    def test_cswap_controlled(self):
        final = run(Circuit(3, (Op("CSWAP", (0, 1, 2)),)), StateVector.basis(3, (0, 1, 0)))
        assert final.amplitudes[0b010] == pytest.approx(1.0)
        final = run(Circuit(3, (Op("CSWAP", (0, 1, 2)),)), StateVector.basis(3, (1, 1, 0)))
        assert final.amplitudes[0b101] == pytest.approx(1.0)

    def test_norm_preserved_on_random_circuits(self):
        rng = random.Random(51)
        gen = np.random.default_rng(51)
        for _ in range(10):
            circuit = random_circuit(5, rng)
            final = run(circuit, random_state(5, gen))
            assert abs(final.norm() - 1.0) < 1e-9

    def test_inverse_circuit_restores_state(self):
        rng = random.Random(52)
        gen = np.random.default_rng(52)
        for _ in range(10):
            circuit = random_circuit(4, rng, length=15)
            start = random_state(4, gen)
            forth = run(circuit, start)
            back = run(circuit.inverse(), forth)
            assert np.max(np.abs(back.amplitudes - start.amplitudes)) < 1e-9

    def test_circuit_validation(self):
        with pytest.raises(ValueError):
            Circuit(2, (Op("H", (5,)),))
        with pytest.raises(ValueError):
            Circuit(2, (Op("CNOT", (1, 1)),))
        with pytest.raises(ValueError):
            Circuit(21)
        with pytest.raises(ValueError):
            Circuit(2, (Op("WARP", (0,)),))


class TestMeasurement:
    def test_h_statistics(self):
        state = run(Circuit(1, (Op("H", (0,)),)))
        outcomes = sample_register(state, (0,), np.random.default_rng(53), 10000)
        freq = outcomes.count(0) / len(outcomes)
        assert abs(freq - 0.5) < 0.02

    def test_measure_collapses(self):
        state = run(Circuit(2, (Op("H", (0,)), Op("CNOT", (0, 1)))))
        bits, collapsed = measure(state, (0,), rng=3)
        again, _ = measure(collapsed, (0,), rng=99)
        assert bits == again
        # the Bell pair correlates the second qubit with the first
        other, _ = measure(collapsed, (1,), rng=4)
        assert other == bits

    def test_measure_bounds(self):
        with pytest.raises(IndexError):
            measure(StateVector.zeros(2), (5,))

    def test_state_norm_validation(self):
        with pytest.raises(ValueError):
            StateVector([1.0, 1.0], 1)


class TestOracle:
    def table(self):
        return FunctionTable(2, (2, 3, 0, 1), "injective")

    def test_maps_zero_register_to_fx(self):
        table = self.table()
        circuit = Circuit(4, (oracle_op(table, (0, 1), (2, 3)),))
        for x in range(4):
            final = run(circuit, StateVector.basis(4, (x << 2)))
            assert final.amplitudes[(x << 2) | table.outputs[x]] == pytest.approx(1.0)

    def test_self_inverse(self):
        table = self.table()
        op = oracle_op(table, (0, 1), (2, 3))
        gen = np.random.default_rng(54)
        start = random_state(4, gen)
        final = run(Circuit(4, (op, op)), start)
        assert np.max(np.abs(final.amplitudes - start.amplitudes)) < 1e-12

    def test_linearity_on_superposition(self):
        table = self.table()
        circuit = Circuit(4, (Op("H", (0,)), Op("H", (1,)),
                              oracle_op(table, (0, 1), (2, 3))))
        final = run(circuit)
        want = np.zeros(16, dtype=complex)
        for x in range(4):
            want[(x << 2) | table.outputs[x]] = 0.5
        assert np.max(np.abs(final.amplitudes - want)) < 1e-12

    def test_register_size_mismatch(self):
        with pytest.raises(ValueError):
            oracle_op(self.table(), (0,), (2, 3))

    def test_table_validation(self):
        with pytest.raises(ValueError):
            FunctionTable(2, (0, 0, 1, 1), "injective")
        with pytest.raises(ValueError):
            FunctionTable(2, (0, 1, 2, 3), "simon", mask=3)
        with pytest.raises(ValueError):
            FunctionTable(2, (0, 1, 2, 3), "simon", mask=0)
        # a valid hidden-shift table passes
        FunctionTable(2, (1, 2, 2, 1), "simon", mask=3)


class TestSwapTest:
    def test_equal_states(self):
        gen = np.random.default_rng(55)
        psi = random_state(3, gen)
        assert swap_test(psi, psi).probability == pytest.approx(1.0, abs=1e-9)

    def test_orthogonal_states(self):
        got = swap_test(StateVector.basis(2, 0), StateVector.basis(2, 3)).probability
        assert got == pytest.approx(0.5, abs=1e-9)

    def test_zero_vs_plus(self):
        plus = StateVector([1 / math.sqrt(2), 1 / math.sqrt(2)], 1)
        got = swap_test(StateVector.basis(1, 0), plus).probability
        assert got == pytest.approx(0.75, abs=1e-9)

    def test_random_pairs_match_formula(self):
        gen = np.random.default_rng(56)
        for _ in range(100):
            q = int(gen.integers(1, 5))
            psi, phi = random_state(q, gen), random_state(q, gen)
            want = (1.0 + abs(psi.inner(phi)) ** 2) / 2.0
            assert swap_test(psi, phi).probability == pytest.approx(want, abs=1e-9)

    def test_empirical_frequency_within_3_sigma(self):
        gen = np.random.default_rng(57)
        psi, phi = random_state(2, gen), random_state(2, gen)
        result = swap_test(psi, phi, shots=10000, seed=58)
        freq = result.outcomes.count(0) / len(result.outcomes)
        sigma = math.sqrt(result.probability * (1 - result.probability) / 10000)
        assert abs(freq - result.probability) <= 3 * sigma

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            swap_test(StateVector.zeros(1), StateVector.zeros(2))


class TestSimon:
    def test_identity_table_is_injective(self):
        table = FunctionTable(2, (0, 1, 2, 3), "injective")
        assert simon_decide(table, seed=1).kind == "injective"

    def test_handmade_mask_11(self):
        table = FunctionTable(2, (1, 2, 2, 1), "simon", mask=3)
        decision = simon_decide(table, seed=2)
        assert decision.kind == "simon"
        assert decision.mask == 3

    def test_random_instances(self):
        rng = random.Random(59)
        for i in range(30):
            n = rng.choice((3, 4, 5))
            if i % 2:
                table = random_simon_table(n, seed=i)
            else:
                table = random_injective_table(n, seed=i)
            decision = simon_decide(table, seed=1000 + i)
            assert decision.kind == table.kind
            if table.kind == "simon":
                assert decision.mask == table.mask

    def test_measured_vectors_orthogonal_to_mask(self):
        for i in range(10):
            table = random_simon_table(6, seed=i)
            decision = simon_decide(table, seed=70 + i)
            assert decision.vectors
            for y in decision.vectors:
                assert (y & table.mask).bit_count() % 2 == 0

    def test_round_budget_reported(self):
        table = random_simon_table(4, seed=8)
        with pytest.raises(SimonRoundsExhausted):
            simon_decide(table, seed=9, max_rounds=0)

    def test_rejects_unconstrained_tables(self):
        table = FunctionTable(2, (0, 0, 0, 0), "unconstrained")
        with pytest.raises(ValueError):
            simon_decide(table)


class TestSimQuery:
    def test_deterministic_truth_table(self):
        for accept_l in (False, True):
            for accept_lc in (False, True):
                circuit = build_simquery(constant_decider(accept_l),
                                         constant_decider(accept_lc))
                final = run(circuit)
                flip = accept_l and not accept_lc
                # X-only toys keep amplitudes exact: work restored, flag set
                assert final.amplitudes[1 if flip else 0] == 1.0 + 0.0j

    def test_work_registers_restored_with_wide_deciders(self):
        circuit = build_simquery(constant_decider(True, t=3), constant_decider(False, t=3))
        final = run(circuit)
        assert final.amplitudes[1] == 1.0 + 0.0j

    def test_noisy_flip_probability(self):
        circuit = build_simquery(noisy_decider(True), noisy_decider(False))
        final = run(circuit)
        idx = np.arange(len(final.amplitudes))
        flip = float(np.sum(np.abs(final.amplitudes[(idx & 1) == 1]) ** 2))
        assert flip >= 0.98

    def test_noisy_decider_error_as_designed(self):
        final = run(noisy_decider(False))
        # P(output flipped although the decider rejects) is the design error
        idx = np.arange(len(final.amplitudes))
        top = (idx >> 4) & 1  # output is qubit 0 of the 5-qubit decider
        wrong = float(np.sum(np.abs(final.amplitudes[top == 1]) ** 2))
        assert wrong == pytest.approx(((2 - math.sqrt(2)) / 4) ** 3, abs=1e-12)
        assert wrong <= 0.01

    def test_requires_matching_sizes(self):
        with pytest.raises(ValueError):
            build_simquery(constant_decider(True, t=1), constant_decider(False, t=2))

    def test_requires_output_qubits(self):
        anon = Circuit(1, (Op("X", (0,)),))
        with pytest.raises(ValueError):
            build_simquery(anon, constant_decider(False))


class TestCircuitText:
    def test_roundtrip(self):
        text = "H 0\nCNOT 0 1\nCCNOT 0 1 2\nT 2\n"
        circuit = parse_circuit(text)
        assert circuit.num_qubits == 3
        assert format_circuit(circuit) == text

    def test_comments_and_blanks(self):
        circuit = parse_circuit("# prep\nH 0\n\nX 1  # flip\n")
        assert [op.gate for op in circuit.ops] == ["H", "X"]

    def test_unknown_gate(self):
        with pytest.raises(ValueError):
            parse_circuit("FROB 0\n")

    def test_wrong_arity(self):
        with pytest.raises(ValueError):
            parse_circuit("CNOT 0\n")
