"""Smoke tests for the termminer extension module."""

import pytest

import termminer as tm


def test_levenshtein_basics():
    assert tm.levenshtein([], []) == 0
    assert tm.levenshtein([1, 2, 3], [1, 2, 3]) == 0
    assert tm.levenshtein([1, 2, 3, 4, 5], [1, 2, 9, 4, 5]) == 1
    assert tm.levenshtein([1, 2], []) == 2


def test_normalized_levenshtein():
    value = tm.normalized_levenshtein([0, 1, 2, 3, 4], [0, 1, 2, 3, 9])
    assert value == pytest.approx(0.565685424949238, abs=1e-12)
    assert tm.normalized_levenshtein([7, 7], [7, 7]) == 0.0


def test_merge_boundaries():
    assert tm.merge_boundaries([[100.0, 300.0], [110.0, 500.0]]) == [105.0, 300.0, 500.0]


def test_local_align_identical():
    alignments = tm.local_align([3, 1, 4, 1, 5], [3, 1, 4, 1, 5])
    assert len(alignments) == 1
    assert alignments[0]["score"] == 5.0
    assert alignments[0]["a_span"] == (0, 5)
    assert alignments[0]["b_span"] == (0, 5)


def test_mine_and_cluster():
    corpus = [
        tm.UnitSequence("utt0", [4, 8, 15, 16, 23, 42]),
        tm.UnitSequence("utt1", [4, 8, 15, 16, 23, 42]),
    ]
    bag = tm.mine_pairs(corpus)
    assert len(bag) == 2
    assert all(entry.units == [4, 8, 15, 16, 23, 42] for entry in bag.entries)

    result = tm.leader_cluster(bag)
    assert len(result.clusters) == 1
    assert sorted(result.clusters[0].member_ids) == [0, 1]
    assert result.clusters[0].total_intra_distance == 0.0
    assert result.unassigned == []


def test_kmeans():
    features = [[0.0, 0.0], [0.1, 0.0], [10.0, 10.0], [10.1, 10.0]]
    out = tm.kmeans(features, k=2, seed=3)
    assert len(out["centroids"]) == 2
    assert len(out["assignments"]) == 4
    assert out["assignments"][0] == out["assignments"][1]
    assert out["assignments"][2] == out["assignments"][3]
    history = out["objective_history"]
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_hac_ward():
    out = tm.hac_ward([[0.0], [0.2], [9.0]])
    assert out["leaf_count"] == 3
    assert len(out["merges"]) == 2
    heights = [merge[2] for merge in out["merges"]]
    assert heights == sorted(heights)


def test_generate_corpus():
    corpus = tm.generate_corpus(seed=5)
    assert len(corpus["utterances"]) == 20
    assert len(corpus["keywords"]) == 5
    assert all(len(keyword) == 8 for keyword in corpus["keywords"])
    counts = [0] * 5
    for occ in corpus["occurrences"]:
        counts[occ["keyword_id"]] += 1
        begin, end = occ["span"]
        assert end > begin
    assert all(count >= 3 for count in counts)


def test_ngram_counts():
    grams = tm.ngram_counts(["the", "object", "the", "object"], 1)
    assert grams == [(["object"], 2)]
