#include <doctest.h>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "termminer/evaluation.hpp"

using namespace termminer;

namespace {

BagEntry entry_at(const std::string& utt, std::size_t begin, std::size_t end) {
  BagEntry e;
  e.units.assign(end - begin, 1);
  e.source_utt = utt;
  e.source_span = {begin, end};
  e.pair_utt = "other";
  e.pair_span = {0, end - begin};
  e.score = static_cast<double>(end - begin);
  return e;
}

ClusteringResult one_cluster(std::size_t members) {
  ClusteringResult r;
  KeywordCluster c;
  c.medoid_id = 0;
  for (std::size_t i = 0; i < members; ++i) c.member_ids.push_back(i);
  r.clusters.push_back(std::move(c));
  r.rounds = 1;
  return r;
}

GroundTruth simple_truth() {
  GroundTruth truth;
  truth.utt_ids = {"u0", "u1"};
  truth.keywords = {{1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {4, 4, 4}};
  truth.keyword_words = {"kw0", "kw1", "kw2", "kw3"};
  return truth;
}

}  // namespace

TEST_CASE("a cluster whose members all overlap one keyword is pure") {
  auto truth = simple_truth();
  truth.occurrences = {{"u0", 3, {2, 5}}, {"u1", 3, {0, 3}}};

  SubsequenceBag bag;
  bag.entries = {entry_at("u0", 2, 5), entry_at("u0", 3, 6), entry_at("u1", 0, 3)};
  const auto report = cluster_purity(bag, one_cluster(3), truth);

  REQUIRE(report.clusters.size() == 1);
  CHECK(report.clusters[0].purity == 1.0);
  CHECK(report.clusters[0].dominant_label == "kw3");
  CHECK(report.mean_purity == 1.0);
  CHECK(report.weighted_purity == 1.0);
}

TEST_CASE("an even two-keyword split scores 50 percent") {
  auto truth = simple_truth();
  truth.occurrences = {{"u0", 0, {0, 3}}, {"u0", 1, {6, 9}}};

  SubsequenceBag bag;
  bag.entries = {entry_at("u0", 0, 3), entry_at("u0", 1, 3), entry_at("u0", 6, 9),
                 entry_at("u0", 7, 9)};
  const auto report = cluster_purity(bag, one_cluster(4), truth);

  REQUIRE(report.clusters.size() == 1);
  CHECK(report.clusters[0].purity == 0.5);
  CHECK(report.clusters[0].dominant_label == "kw0");  // lexicographic tie-break
  REQUIRE(report.clusters[0].label_counts.size() == 2);
  CHECK(report.clusters[0].label_counts[0].second == 2);
  CHECK(report.clusters[0].label_counts[1].second == 2);
}

TEST_CASE("members overlapping nothing are labeled filler") {
  auto truth = simple_truth();
  truth.occurrences = {{"u0", 0, {0, 3}}};

  SubsequenceBag bag;
  bag.entries = {entry_at("u0", 5, 9), entry_at("u0", 6, 9)};
  const auto report = cluster_purity(bag, one_cluster(2), truth);
  CHECK(report.clusters[0].dominant_label == "filler");
  CHECK(report.clusters[0].purity == 1.0);
}

TEST_CASE("overlap ties go to the lower keyword id") {
  auto truth = simple_truth();
  // Both keywords overlap [2, 4) by the same two tokens.
  truth.occurrences = {{"u0", 2, {0, 4}}, {"u0", 1, {2, 6}}};

  SubsequenceBag bag;
  bag.entries = {entry_at("u0", 2, 4)};
  const auto report = cluster_purity(bag, one_cluster(1), truth);
  CHECK(report.clusters[0].dominant_label == "kw1");
}

TEST_CASE("singleton clusters are trivially pure") {
  auto truth = simple_truth();
  truth.occurrences = {{"u0", 0, {0, 3}}};
  SubsequenceBag bag;
  bag.entries = {entry_at("u0", 0, 3)};
  const auto report = cluster_purity(bag, one_cluster(1), truth);
  CHECK(report.clusters[0].size == 1);
  CHECK(report.clusters[0].purity == 1.0);
}

TEST_CASE("unknown utterances are rejected") {
  const auto truth = simple_truth();
  SubsequenceBag bag;
  bag.entries = {entry_at("nowhere", 0, 3)};
  CHECK_THROWS_AS(cluster_purity(bag, one_cluster(1), truth), std::invalid_argument);
}

TEST_CASE("weighted and mean purity differ when cluster sizes do") {
  auto truth = simple_truth();
  truth.occurrences = {{"u0", 0, {0, 3}}, {"u0", 1, {6, 9}}};

  SubsequenceBag bag;
  bag.entries = {entry_at("u0", 0, 3), entry_at("u0", 0, 2), entry_at("u0", 1, 3),
                 entry_at("u0", 6, 9), entry_at("u0", 7, 9), entry_at("u0", 6, 8)};
  ClusteringResult r;
  KeywordCluster pure;  // 2 members, both kw0
  pure.medoid_id = 0;
  pure.member_ids = {0, 1};
  KeywordCluster mixed;  // 4 members: kw0 x1, kw1 x3
  mixed.medoid_id = 3;
  mixed.member_ids = {2, 3, 4, 5};
  r.clusters = {pure, mixed};
  r.rounds = 1;

  const auto report = cluster_purity(bag, r, truth);
  REQUIRE(report.clusters.size() == 2);
  CHECK(report.clusters[0].purity == 1.0);
  CHECK(report.clusters[1].purity == 0.75);
  CHECK(report.mean_purity == doctest::Approx(0.875));
  CHECK(report.weighted_purity == doctest::Approx((1.0 * 2 + 0.75 * 4) / 6.0));
}

TEST_CASE("tokenize_transcript lowercases and splits on whitespace") {
  CHECK(tokenize_transcript("The Object\n the  OBJECT") ==
        std::vector<std::string>{"the", "object", "the", "object"});
  CHECK(tokenize_transcript("").empty());
}

TEST_CASE("unigram counting discards stopwords") {
  const auto tokens = tokenize_transcript("the object the object");
  const auto unigrams = ngram_counts(tokens, 1);
  REQUIRE(unigrams.size() == 1);
  CHECK(unigrams[0].words == std::vector<std::string>{"object"});
  CHECK(unigrams[0].count == 2);
}

TEST_CASE("unigram totals equal the non-stopword token count") {
  const auto tokens =
      tokenize_transcript("a linear combination of a vector is a linear map of the vector");
  std::size_t content = 0;
  for (const auto& t : tokens)
    if (!default_stopwords().count(t)) ++content;
  std::size_t total = 0;
  for (const auto& g : ngram_counts(tokens, 1)) total += g.count;
  CHECK(total == content);
}

TEST_CASE("mixed n-grams keep their function words") {
  const auto tokens = tokenize_transcript("an object of the object an object");
  const auto bigrams = ngram_counts(tokens, 2);
  bool saw_an_object = false;
  bool saw_of_the = false;
  for (const auto& g : bigrams) {
    if (g.words == std::vector<std::string>{"an", "object"}) {
      saw_an_object = true;
      CHECK(g.count == 2);
    }
    if (g.words == std::vector<std::string>{"of", "the"}) saw_of_the = true;
  }
  CHECK(saw_an_object);
  CHECK_FALSE(saw_of_the);  // every token is a function word
}

TEST_CASE("n-grams rank by count then lexicographically") {
  const auto tokens = tokenize_transcript("beta alpha beta alpha gamma gamma beta");
  const auto unigrams = ngram_counts(tokens, 1);
  REQUIRE(unigrams.size() == 3);
  CHECK(unigrams[0].words == std::vector<std::string>{"beta"});
  CHECK(unigrams[0].count == 3);
  CHECK(unigrams[1].words == std::vector<std::string>{"alpha"});  // 2, before gamma
  CHECK(unigrams[2].words == std::vector<std::string>{"gamma"});

  CHECK_THROWS_AS(ngram_counts(tokens, 0), std::invalid_argument);
  CHECK(ngram_counts({"of"}, 2).empty());
}

TEST_CASE("coverage verdicts follow the function-word leniency rule") {
  const Ngram full{{"linear", "combination"}, 5};
  const Ngram with_stop{{"linear", "combination", "of"}, 5};
  const Ngram missing_content{{"common", "divisor"}, 3};
  const Ngram unrelated{{"velocity", "field"}, 2};

  const std::vector<std::vector<std::string>> clusters{{"linear", "combination"},
                                                       {"divisor"}};
  const auto report =
      coverage_match({full, with_stop, missing_content, unrelated}, clusters);

  REQUIRE(report.verdicts.size() == 4);
  CHECK(report.verdicts[0].verdict == MatchVerdict::match);
  CHECK(report.verdicts[0].best_cluster == 0);
  // Only "of" is unmatched, so the trigram still counts as matched.
  CHECK(report.verdicts[1].verdict == MatchVerdict::partial_match);
  CHECK(report.verdicts[1].best_cluster == 0);
  // "common" is a content word and no cluster covers it.
  CHECK(report.verdicts[2].verdict == MatchVerdict::mismatch);
  CHECK(report.verdicts[2].best_cluster == 1);
  CHECK(report.verdicts[3].verdict == MatchVerdict::uncovered);

  CHECK(report.matches == 1);
  CHECK(report.partial_matches == 1);
  CHECK(report.mismatches == 1);
  CHECK(report.uncovered == 1);
  CHECK(report.rate == doctest::Approx(0.5));
}

TEST_CASE("no clusters means everything is uncovered at rate zero") {
  const auto report = coverage_match({Ngram{{"alpha"}, 3}, Ngram{{"beta"}, 2}}, {});
  CHECK(report.rate == 0.0);
  CHECK(report.uncovered == 2);
  for (const auto& v : report.verdicts) CHECK(v.verdict == MatchVerdict::uncovered);

  const auto empty = coverage_match({}, {});
  CHECK(empty.rate == 0.0);
  CHECK(empty.verdicts.empty());
}

TEST_CASE("adding clusters never lowers the coverage rate") {
  std::mt19937_64 rng(71);
  const std::vector<std::string> vocab{"alpha", "beta",  "gamma", "delta",
                                       "eps",   "zeta",  "eta",   "theta",
                                       "the",   "of",    "a",     "is"};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Ngram> queries;
    const std::size_t nq = 1 + rng() % 8;
    for (std::size_t q = 0; q < nq; ++q) {
      Ngram g;
      const std::size_t n = 1 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) g.words.push_back(vocab[rng() % vocab.size()]);
      g.count = 1 + rng() % 5;
      queries.push_back(std::move(g));
    }
    std::vector<std::vector<std::string>> clusters;
    double prev_rate = 0.0;
    for (int step = 0; step < 6; ++step) {
      std::vector<std::string> words;
      const std::size_t n = 1 + rng() % 3;
      for (std::size_t i = 0; i < n; ++i) words.push_back(vocab[rng() % vocab.size()]);
      clusters.push_back(std::move(words));
      const double rate = coverage_match(queries, clusters).rate;
      CHECK(rate >= prev_rate - 1e-12);
      prev_rate = rate;
    }
  }
}
