import pytest
from hypothesis import given
from hypothesis import strategies as st

from src.errors import UndefinedMetricError
from src.metrics.recall import mean_recall_at_k, recall_at_k


def test_recall_values():
    ranked = [3, 1, 2]
    assert recall_at_k(ranked, [1, 2], 1) == 0.0
    assert recall_at_k(ranked, [1, 2], 2) == 0.5
    assert recall_at_k(ranked, [1, 2], 3) == 1.0
    assert recall_at_k(ranked, [1, 2], 30) == 1.0


def test_undefined_and_invalid():
    with pytest.raises(UndefinedMetricError):
        recall_at_k([1, 2], [], 1)
    with pytest.raises(ValueError):
        recall_at_k([1, 2], [1], 0)


def test_mean_skips_questions_without_relevant_sentences():
    rankings = {"q1": [1, 2, 3], "q2": [9, 8], "q3": [4]}
    relevant = {"q1": [1, 3], "q2": [8], "q3": []}
    assert mean_recall_at_k(rankings, relevant, [1, 2]) == {1: pytest.approx(0.25), 2: pytest.approx(0.75)}
    with pytest.raises(UndefinedMetricError):
        mean_recall_at_k({"q3": [4]}, relevant, [1])


@given(
    st.permutations(list(range(12))),
    st.sets(st.integers(0, 11), min_size=1),
)
def test_recall_is_monotonic_in_k(ranked, relevant):
    values = [recall_at_k(ranked, relevant, k) for k in range(1, 13)]
    assert values == sorted(values)
    assert values[-1] == 1.0
