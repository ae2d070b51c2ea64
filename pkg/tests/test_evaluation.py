import logging
import random

import pytest
from hypothesis import given, strategies as st

from teaindex.errors import DomainError, ParseError, ValidationError
from teaindex.evaluation import (RECALL_LEVELS, average_precision, curve_csv, load_qrels,
                                 load_run, macro_curve, mean_average_precision, pr_curve,
                                 write_run)


class TestAveragePrecision:
    def test_hand_case(self):
        assert average_precision(["r1", "n", "r2"], {"r1", "r2"}) == pytest.approx(5 / 6, abs=1e-12)

    def test_perfect_and_empty_ranking(self):
        assert average_precision(["a", "b", "c"], {"a", "b"}) == 1.0
        assert average_precision([], {"a"}) == 0.0

    def test_unretrieved_relevant_counts(self):
        assert average_precision(["a"], {"a", "b"}) == 0.5

    def test_empty_relevant(self):
        with pytest.raises(DomainError):
            average_precision(["a"], set())

    @given(st.permutations(list("abcdefgh")), st.sets(st.sampled_from("abcdefgh"), min_size=1))
    def test_bounds_and_best_order(self, ranking, relevant):
        ap = average_precision(ranking, relevant)
        assert 0.0 < ap <= 1.0
        best = sorted(ranking, key=lambda x: x not in relevant)
        assert average_precision(best, relevant) == 1.0

    def test_swapping_relevant_up_never_hurts(self):
        rng = random.Random(3)
        for _ in range(200):
            ranking = list("abcdefghij")
            rng.shuffle(ranking)
            relevant = set(rng.sample(ranking, rng.randint(1, 9)))
            for i in range(len(ranking) - 1):
                if ranking[i] not in relevant and ranking[i + 1] in relevant:
                    swapped = ranking[:]
                    swapped[i], swapped[i + 1] = swapped[i + 1], swapped[i]
                    assert average_precision(swapped, relevant) > average_precision(ranking, relevant)


class TestMAP:
    def test_two_queries(self):
        run = {"q1": ["a"], "q2": ["x", "b"]}
        assert mean_average_precision(run, {"q1": {"a"}, "q2": {"b"}}) == 0.75

    def test_single_query(self):
        assert mean_average_precision({"q": ["r1", "n", "r2"]}, {"q": {"r1", "r2"}}) == \
            average_precision(["r1", "n", "r2"], {"r1", "r2"})

    def test_missing_query_scores_zero(self, caplog):
        # APs 1.0 and 0.6 (3 of 5 relevant at the top), third query absent
        run = {"q1": ["a"], "q2": ["a", "b", "c", "x", "y"]}
        qrels = {"q1": {"a"}, "q2": {"a", "b", "c", "d", "e"}, "q3": {"z"}}
        assert average_precision(run["q2"], qrels["q2"]) == pytest.approx(0.6)
        with caplog.at_level(logging.WARNING):
            assert mean_average_precision(run, qrels) == pytest.approx(0.5333, abs=1e-4)
        assert "q3" in caplog.text

    def test_empty_qrels(self):
        with pytest.raises(DomainError):
            mean_average_precision({}, {})

    def test_query_order_irrelevant(self):
        run = {"q1": ["a", "b"], "q2": ["b", "a"], "q3": ["c"]}
        qrels = {"q1": {"b"}, "q2": {"b"}, "q3": {"c", "a"}}
        reversed_qrels = dict(reversed(list(qrels.items())))
        assert mean_average_precision(run, qrels) == mean_average_precision(run, reversed_qrels)


def brute_interpolation(points):
    out = []
    for level in RECALL_LEVELS:
        best = 0.0
        for r, p in points:
            if r >= level - 1e-12 and p > best:
                best = p
        out.append(best)
    return out


class TestCurves:
    def test_raw_curve(self):
        assert pr_curve(["r1", "n", "r2"], {"r1", "r2"}) == [(0.5, 1.0), (0.5, 0.5), (1.0, 2 / 3)]

    def test_interpolated_example(self):
        curve = pr_curve(["r1", "n", "r2"], {"r1", "r2"}, interpolated=True)
        assert [r for r, _ in curve] == list(RECALL_LEVELS)
        assert [p for _, p in curve] == [1.0] * 6 + [2 / 3] * 5

    def test_recall_non_decreasing(self):
        rng = random.Random(5)
        ranking = [str(i) for i in range(30)]
        rng.shuffle(ranking)
        recalls = [r for r, _ in pr_curve(ranking, set(ranking[::3]))]
        assert recalls == sorted(recalls)

    @given(st.permutations(list("abcdefghij")), st.sets(st.sampled_from("abcdefghijk"), min_size=1))
    def test_interpolated_matches_brute_force(self, ranking, relevant):
        raw = pr_curve(ranking, relevant)
        curve = [p for _, p in pr_curve(ranking, relevant, interpolated=True)]
        assert curve == brute_interpolation(raw)
        assert all(a >= b for a, b in zip(curve, curve[1:]))

    def test_macro_curve(self):
        run = {"q1": ["a"], "q2": ["x", "b"]}
        curve = macro_curve(run, {"q1": {"a"}, "q2": {"b"}})
        assert curve[0] == (0.0, 0.75) and curve[-1] == (1.0, 0.75)

    def test_curve_csv(self):
        text = curve_csv({"q": ["a", "b"]}, {"q": {"b"}})
        lines = text.splitlines()
        assert lines[0] == "query_id,recall,precision"
        assert lines[1:3] == ["q,0.000000,0.000000", "q,1.000000,0.500000"]
        assert sum(1 for l in lines if l.startswith("macro,")) == 11


class TestFiles:
    def test_qrels(self, tmp_path):
        p = tmp_path / "qrels"
        p.write_text("# q img rel\nq1 a 1\nq1 b 0\nq2 c 2\n", encoding="utf-8")
        assert load_qrels(p) == {"q1": {"a"}, "q2": {"c"}}

    def test_qrels_without_relevant(self, tmp_path):
        p = tmp_path / "qrels"
        p.write_text("q1 a 0\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_qrels(p)

    def test_qrels_bad_line(self, tmp_path):
        p = tmp_path / "qrels"
        p.write_text("q1 a 1\nq1 b\n", encoding="utf-8")
        with pytest.raises(ParseError) as err:
            load_qrels(p)
        assert err.value.line == 2

    def test_run_sorted_by_rank(self, tmp_path):
        p = tmp_path / "run"
        p.write_text("q1 b 2 0.5\nq1 a 1 0.9\n", encoding="utf-8")
        assert load_run(p) == {"q1": ["a", "b"]}

    def test_run_duplicate(self, tmp_path):
        p = tmp_path / "run"
        p.write_text("q1 a 1 1\nq1 a 2 0.5\n", encoding="utf-8")
        with pytest.raises(ValidationError):
            load_run(p)

    def test_write_read(self, tmp_path):
        run = {"q2": ["x", "y"], "q1": ["a"]}
        write_run(run, tmp_path / "run")
        assert load_run(tmp_path / "run") == run
