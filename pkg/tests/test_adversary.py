import itertools
import math
import random
from fractions import Fraction

import pytest

from permlab.adversary import (
    QueryTranscript,
    collision_probability,
    commit_injective,
    commit_simon,
    lazy_query,
    pair_collision_probability,
    restricted_masks,
    run_distinguishing_experiment,
)
from permlab.qsim import simon_decide


class TestTranscript:
    def test_rejects_duplicate_queries(self):
        with pytest.raises(ValueError):
            QueryTranscript(3, ((0, 1), (0, 2)))

    def test_rejects_duplicate_answers(self):
        with pytest.raises(ValueError):
            QueryTranscript(3, ((0, 1), (2, 1)))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            QueryTranscript(2, ((9, 1),))


class TestLazyQuery:
    def test_idempotent_requery(self):
        tr = QueryTranscript(4)
        y, tr = lazy_query(tr, 5, seed=1)
        y2, tr2 = lazy_query(tr, 5, seed=1)
        assert y2 == y and tr2 is tr

    def test_distinct_answers(self):
        tr = QueryTranscript(4)
        for x in range(10):
            _, tr = lazy_query(tr, x, seed=2)
        answers = [y for _, y in tr.pairs]
        assert len(set(answers)) == 10

    def test_deterministic_given_seed_and_history(self):
        def play(seed):
            tr = QueryTranscript(5)
            out = []
            for x in (3, 17, 8, 30):
                y, tr = lazy_query(tr, x, seed=seed)
                out.append(y)
            return out

        assert play(7) == play(7)
        assert play(7) != play(8)


class TestRestrictedMasks:
    def test_small_transcripts(self):
        assert restricted_masks(QueryTranscript(3)) == set()
        assert restricted_masks(QueryTranscript(3, ((4, 0),))) == set()

    def test_worked_example(self):
        tr = QueryTranscript(3, ((0b000, 1), (0b001, 2), (0b011, 3)))
        assert restricted_masks(tr) == {0b001, 0b011, 0b010}

    def test_pair_count_bound(self):
        rng = random.Random(61)
        for _ in range(20):
            l = rng.randint(0, 12)
            xs = rng.sample(range(64), l)
            tr = QueryTranscript(6, tuple((x, i) for i, x in enumerate(xs)))
            assert len(restricted_masks(tr)) <= l * (l - 1) // 2


class TestCommitSimon:
    def test_agrees_with_transcript(self):
        tr = QueryTranscript(3, ((0, 5), (1, 6)))
        table = commit_simon(tr, seed=3)
        assert table.outputs[0] == 5 and table.outputs[1] == 6
        assert table.mask != 0b001

    def test_kind_invariants_hold(self):
        rng = random.Random(62)
        for trial in range(50):
            xs = rng.sample(range(32), 4)
            tr = QueryTranscript(5)
            for x in xs:
                _, tr = lazy_query(tr, x, seed=trial)
            table = commit_simon(tr, seed=trial)
            # FunctionTable already validates; re-check the two key facts
            assert len(set(table.outputs)) == 16
            assert all(table.outputs[x] == table.outputs[x ^ table.mask] for x in range(32))
            assert table.mask not in restricted_masks(tr)

    def test_mask_uniform_over_admissible(self):
        tr = QueryTranscript(3, ((0, 0), (1, 1)))
        seen = {commit_simon(tr, seed=s).mask for s in range(200)}
        assert seen == set(range(2, 8))  # every nonzero mask except 001

    def test_no_admissible_mask(self):
        tr = QueryTranscript(2, ((0, 0), (1, 1), (2, 2), (3, 3)))
        with pytest.raises(ValueError):
            commit_simon(tr, seed=1)


class TestCommitInjective:
    def test_agrees_and_is_bijective(self):
        tr = QueryTranscript(4, ((3, 9), (7, 0)))
        table = commit_injective(tr, seed=4)
        assert table.outputs[3] == 9 and table.outputs[7] == 0
        assert sorted(table.outputs) == list(range(16))

    def test_empty_transcript_gives_random_permutation(self):
        t1 = commit_injective(QueryTranscript(3), seed=5)
        t2 = commit_injective(QueryTranscript(3), seed=6)
        assert sorted(t1.outputs) == sorted(t2.outputs) == list(range(8))
        assert t1.outputs != t2.outputs


class TestCollisionProbability:
    def test_worked_example(self):
        assert collision_probability(3, 2) == Fraction(1, 6)

    def test_single_query_cannot_collide(self):
        assert collision_probability(5, 1) == Fraction(0)

    def test_large_n_is_exponentially_small(self):
        assert collision_probability(20, 100) < Fraction(1, 2 ** 12)

    def test_monotone_in_l(self):
        values = [collision_probability(8, l) for l in range(1, 12)]
        assert all(a <= b for a, b in zip(values, values[1:]))

    def test_vacuous_regime_rejected(self):
        with pytest.raises(ValueError):
            collision_probability(3, 5)


class TestPairCollisionProbability:
    def test_matches_literal_enumeration(self):
        # brute force: average over all masks and all query sets
        for n, l in ((3, 2), (3, 3), (2, 2)):
            size = 1 << n
            total = Fraction(0)
            cases = 0
            for s in range(1, size):
                for queries in itertools.combinations(range(size), l):
                    qset = set(queries)
                    cases += 1
                    if any((x ^ s) in qset for x in queries):
                        total += 1
            assert pair_collision_probability(n, l) == Fraction(total, cases)

    def test_pigeonhole_saturates(self):
        assert pair_collision_probability(3, 5) == 1
        assert pair_collision_probability(3, 8) == 1

    def test_no_queries_no_collision(self):
        assert pair_collision_probability(4, 0) == 0
        assert pair_collision_probability(4, 1) == 0


class TestExperiment:
    def test_single_query_rate_zero(self):
        result = run_distinguishing_experiment(5, 1, 500, seed=7)
        assert result.rate == 0.0

    def test_full_domain_rate_one(self):
        result = run_distinguishing_experiment(3, 8, 500, seed=8)
        assert result.rate == 1.0

    def test_rate_matches_pair_count_oracle(self):
        exact = float(pair_collision_probability(6, 8))
        result = run_distinguishing_experiment(6, 8, 20000, seed=9)
        sigma = math.sqrt(exact * (1 - exact) / result.trials)
        assert abs(result.rate - exact) <= 5 * sigma

    def test_trial_guard(self):
        with pytest.raises(ValueError):
            run_distinguishing_experiment(4, 2, 0)
        with pytest.raises(ValueError):
            run_distinguishing_experiment(14, 2, 10)


class TestQuantumBridge:
    def test_simon_decide_distinguishes_committed_tables(self):
        rng = random.Random(63)
        for trial in range(10):
            tr = QueryTranscript(4)
            for x in rng.sample(range(16), 3):
                _, tr = lazy_query(tr, x, seed=trial)
            hidden = commit_simon(tr, seed=trial)
            flat = commit_injective(tr, seed=trial)
            d1 = simon_decide(hidden, seed=500 + trial)
            d2 = simon_decide(flat, seed=900 + trial)
            assert d1.kind == "simon" and d1.mask == hidden.mask
            assert d2.kind == "injective"
