#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "termminer/segment_clustering.hpp"
#include "termminer/segmentation.hpp"
#include "termminer/synthesis.hpp"

using namespace termminer;

namespace {

std::vector<int> slice(const std::vector<int>& units, const TokenSpan& span) {
  return {units.begin() + span.begin, units.begin() + span.end};
}

const UnitSequence& utterance_by_id(const SynthCorpus& corpus, const std::string& id) {
  for (const auto& u : corpus.utterances)
    if (u.utt_id == id) return u;
  throw std::runtime_error("missing utterance " + id);
}

}  // namespace

TEST_CASE("noise-free occurrences quote the inventory exactly") {
  SynthConfig cfg;
  cfg.seed = 3;
  const auto corpus = generate_corpus(cfg);

  CHECK(corpus.utterances.size() == cfg.num_utterances);
  CHECK(corpus.truth.keywords.size() == cfg.num_keywords);
  REQUIRE(!corpus.truth.occurrences.empty());
  for (const auto& occ : corpus.truth.occurrences) {
    const auto& utt = utterance_by_id(corpus, occ.utt_id);
    REQUIRE(occ.span.end <= utt.units.size());
    CHECK(slice(utt.units, occ.span) == corpus.truth.keywords[occ.keyword_id]);
  }
}

TEST_CASE("full substitution noise changes every occurrence") {
  SynthConfig cfg;
  cfg.substitution_rate = 1.0;
  cfg.seed = 4;
  const auto corpus = generate_corpus(cfg);
  REQUIRE(!corpus.truth.occurrences.empty());
  for (const auto& occ : corpus.truth.occurrences) {
    const auto& utt = utterance_by_id(corpus, occ.utt_id);
    const auto planted = slice(utt.units, occ.span);
    const auto& clean = corpus.truth.keywords[occ.keyword_id];
    REQUIRE(planted.size() == clean.size());
    std::size_t differing = 0;
    for (std::size_t i = 0; i < planted.size(); ++i)
      if (planted[i] != clean[i]) ++differing;
    CHECK(differing >= 1);
    CHECK(differing == planted.size());  // substitutions never keep the symbol
  }
}

TEST_CASE("same seed, same corpus") {
  SynthConfig cfg;
  cfg.substitution_rate = 0.1;
  cfg.insertion_rate = 0.05;
  cfg.deletion_rate = 0.05;
  cfg.seed = 11;
  const auto c1 = generate_corpus(cfg);
  const auto c2 = generate_corpus(cfg);

  REQUIRE(c1.utterances.size() == c2.utterances.size());
  for (std::size_t i = 0; i < c1.utterances.size(); ++i) {
    CHECK(c1.utterances[i].utt_id == c2.utterances[i].utt_id);
    CHECK(c1.utterances[i].units == c2.utterances[i].units);
    CHECK(c1.utterances[i].spans == c2.utterances[i].spans);
  }
  CHECK(c1.truth.keywords == c2.truth.keywords);
  REQUIRE(c1.truth.occurrences.size() == c2.truth.occurrences.size());
  for (std::size_t i = 0; i < c1.truth.occurrences.size(); ++i) {
    CHECK(c1.truth.occurrences[i].utt_id == c2.truth.occurrences[i].utt_id);
    CHECK(c1.truth.occurrences[i].keyword_id == c2.truth.occurrences[i].keyword_id);
    CHECK(c1.truth.occurrences[i].span == c2.truth.occurrences[i].span);
  }

  SynthConfig other = cfg;
  other.seed = 12;
  const auto c3 = generate_corpus(other);
  bool same = true;
  for (std::size_t i = 0; i < c1.utterances.size() && same; ++i)
    same = c1.utterances[i].units == c3.utterances[i].units;
  CHECK_FALSE(same);
}

TEST_CASE("keyword occurrence counts are balanced") {
  SynthConfig cfg;
  cfg.num_utterances = 23;  // not a multiple of num_keywords
  cfg.seed = 5;
  const auto corpus = generate_corpus(cfg);
  std::map<std::size_t, std::size_t> counts;
  for (const auto& occ : corpus.truth.occurrences) counts[occ.keyword_id]++;
  REQUIRE(counts.size() == cfg.num_keywords);
  std::size_t lo = corpus.truth.occurrences.size(), hi = 0;
  for (const auto& [kid, n] : counts) {
    lo = std::min(lo, n);
    hi = std::max(hi, n);
  }
  CHECK(hi - lo <= 1);
}

TEST_CASE("occurrence spans are disjoint and inside their utterances") {
  SynthConfig cfg;
  cfg.min_occurrences = 1;
  cfg.max_occurrences = 2;
  cfg.min_utterance_length = 16;
  cfg.max_utterance_length = 28;
  cfg.substitution_rate = 0.1;
  cfg.insertion_rate = 0.1;
  cfg.deletion_rate = 0.1;
  cfg.seed = 6;
  const auto corpus = generate_corpus(cfg);

  std::map<std::string, std::vector<TokenSpan>> by_utt;
  for (const auto& occ : corpus.truth.occurrences) {
    const auto& utt = utterance_by_id(corpus, occ.utt_id);
    REQUIRE(occ.span.begin < occ.span.end);
    REQUIRE(occ.span.end <= utt.units.size());
    by_utt[occ.utt_id].push_back(occ.span);
  }
  for (auto& [id, spans] : by_utt) {
    std::sort(spans.begin(), spans.end());
    for (std::size_t i = 1; i < spans.size(); ++i) CHECK(spans[i].begin >= spans[i - 1].end);
  }
}

TEST_CASE("utterance lengths respect the configured range") {
  SynthConfig cfg;
  cfg.seed = 7;
  const auto corpus = generate_corpus(cfg);
  for (const auto& utt : corpus.utterances) {
    CHECK(utt.units.size() >= cfg.min_utterance_length);
    CHECK(utt.units.size() <= cfg.max_utterance_length);
    CHECK_NOTHROW(utt.validate());
  }
}

TEST_CASE("infeasible packing is rejected") {
  SynthConfig cfg;
  cfg.num_keywords = 1;
  cfg.min_keyword_length = 10;
  cfg.max_keyword_length = 10;
  cfg.min_utterance_length = 4;
  cfg.max_utterance_length = 8;
  CHECK_THROWS_AS(generate_corpus(cfg), std::invalid_argument);
}

TEST_CASE("SynthConfig validation") {
  SynthConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  SynthConfig bad = cfg;
  bad.alphabet_size = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.substitution_rate = 0.6;
  bad.insertion_rate = 0.6;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.deletion_rate = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.min_utterance_length = 30;  // above max
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("generate_features shapes and labels") {
  const auto blobs = generate_features(3, 4, 7, 0.5, 2);
  CHECK(blobs.features.size() == 21);
  CHECK(blobs.labels.size() == 21);
  for (const auto& f : blobs.features) CHECK(f.size() == 4);
  for (std::size_t i = 0; i < blobs.labels.size(); ++i)
    CHECK(blobs.labels[i] == static_cast<int>(i / 7));
  CHECK_THROWS_AS(generate_features(0, 2, 3, 0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_features(2, 2, 3, 0.0, 0), std::invalid_argument);
}

TEST_CASE("synthesize_frames lays out frames per token with edge hypotheses") {
  SynthConfig cfg;
  cfg.num_utterances = 4;
  cfg.seed = 8;
  const auto corpus = generate_corpus(cfg);
  const auto synth = synthesize_frames(corpus, 6, 3, 0.05, 9);

  REQUIRE(synth.frames.size() == corpus.utterances.size());
  REQUIRE(synth.boundaries.size() == corpus.utterances.size());
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
    const auto& utt = corpus.utterances[i];
    const auto& fm = synth.frames[i];
    CHECK(fm.utt_id == utt.utt_id);
    CHECK(fm.frames.size() == utt.units.size() * 3);
    CHECK(fm.dim() == 6);
    CHECK_NOTHROW(fm.validate());

    REQUIRE(synth.boundaries[i].hypotheses.size() == 1);
    const auto& edges = synth.boundaries[i].hypotheses[0];
    REQUIRE(edges.size() == utt.units.size() - 1);
    for (std::size_t t = 1; t < utt.units.size(); ++t)
      CHECK(edges[t - 1] == static_cast<double>(t * 3) * 10.0);
  }

  // Frames hug their unit's blob center.
  for (std::size_t i = 0; i < corpus.utterances.size(); ++i) {
    const auto& utt = corpus.utterances[i];
    const auto& fm = synth.frames[i];
    for (std::size_t t = 0; t < utt.units.size(); ++t) {
      const auto& center = synth.blob_centers[static_cast<std::size_t>(utt.units[t])];
      for (std::size_t f = 0; f < 3; ++f) {
        const auto& frame = fm.frames[t * 3 + f];
        double d = 0.0;
        for (std::size_t j = 0; j < frame.size(); ++j)
          d += (frame[j] - center[j]) * (frame[j] - center[j]);
        CHECK(std::sqrt(d) < 1.0);
      }
    }
  }

  const auto synth2 = synthesize_frames(corpus, 6, 3, 0.05, 9);
  for (std::size_t i = 0; i < synth.frames.size(); ++i)
    CHECK(synth.frames[i].frames == synth2.frames[i].frames);
}

TEST_CASE("blob centers are pairwise well separated") {
  const auto synth = synthesize_frames(generate_corpus(SynthConfig{}), 8, 2, 0.01, 1);
  for (std::size_t a = 0; a < synth.blob_centers.size(); ++a) {
    for (std::size_t b = a + 1; b < synth.blob_centers.size(); ++b) {
      double d = 0.0;
      for (std::size_t j = 0; j < synth.blob_centers[a].size(); ++j) {
        const double diff = synth.blob_centers[a][j] - synth.blob_centers[b][j];
        d += diff * diff;
      }
      CHECK(std::sqrt(d) >= 10.0 - 1e-9);
    }
  }
}
