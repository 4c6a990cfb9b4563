#include "termminer/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace termminer {

namespace {

double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

// inclusive range
std::size_t uniform_range(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + uniform_index(rng, hi - lo + 1);
}

// Box-Muller from raw engine words, for platform-stable normals.
double unit_normal(std::mt19937_64& rng) {
  double u1 = unit_uniform(rng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = unit_uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

template <typename T>
void shuffle_vec(std::mt19937_64& rng, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
}

std::string utt_name(std::size_t i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "utt%04zu", i);
  return buf;
}

}  // namespace

void SynthConfig::validate() const {
  if (alphabet_size < 2) throw std::invalid_argument("alphabet_size must be at least 2");
  if (num_keywords < 1) throw std::invalid_argument("num_keywords must be at least 1");
  if (min_keyword_length < 1 || min_keyword_length > max_keyword_length)
    throw std::invalid_argument("keyword length range is invalid");
  if (num_utterances < 1) throw std::invalid_argument("num_utterances must be at least 1");
  if (min_utterance_length < 1 || min_utterance_length > max_utterance_length)
    throw std::invalid_argument("utterance length range is invalid");
  if (min_occurrences > max_occurrences)
    throw std::invalid_argument("occurrence range is invalid");
  const double rates[] = {substitution_rate, insertion_rate, deletion_rate};
  double sum = 0.0;
  for (const double r : rates) {
    if (r < 0.0 || r > 1.0) throw std::invalid_argument("noise rates must lie in [0, 1]");
    sum += r;
  }
  if (sum > 1.0) throw std::invalid_argument("noise rates must sum to at most 1");
}

SynthCorpus generate_corpus(const SynthConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);

  SynthCorpus corpus;
  auto& truth = corpus.truth;

  truth.keywords.resize(cfg.num_keywords);
  truth.keyword_words.resize(cfg.num_keywords);
  for (std::size_t kid = 0; kid < cfg.num_keywords; ++kid) {
    const std::size_t len =
        uniform_range(rng, cfg.min_keyword_length, cfg.max_keyword_length);
    auto& kw = truth.keywords[kid];
    kw.resize(len);
    for (auto& u : kw) u = static_cast<int>(uniform_index(rng, cfg.alphabet_size));
    truth.keyword_words[kid] = "kw" + std::to_string(kid);
  }

  // Slot counts first, then a balanced rotation of keyword ids over the
  // slots: per-keyword occurrence counts differ by at most one.
  std::vector<std::size_t> slots_per_utt(cfg.num_utterances);
  std::size_t total_slots = 0;
  for (auto& s : slots_per_utt) {
    s = uniform_range(rng, cfg.min_occurrences, cfg.max_occurrences);
    total_slots += s;
  }
  std::vector<std::size_t> slot_kw;
  slot_kw.reserve(total_slots + cfg.num_keywords);
  while (slot_kw.size() < total_slots) {
    std::vector<std::size_t> block(cfg.num_keywords);
    std::iota(block.begin(), block.end(), std::size_t{0});
    shuffle_vec(rng, block);
    slot_kw.insert(slot_kw.end(), block.begin(), block.end());
  }
  slot_kw.resize(total_slots);

  // One noise decision per clean token: substitute / insert-after / delete /
  // copy. Substitutions always pick a different symbol.
  auto emit_noisy = [&](int token, std::vector<int>& out) {
    const double u = unit_uniform(rng);
    if (u < cfg.substitution_rate) {
      auto r = static_cast<int>(uniform_index(rng, cfg.alphabet_size - 1));
      if (r >= token) ++r;
      out.push_back(r);
    } else if (u < cfg.substitution_rate + cfg.insertion_rate) {
      out.push_back(token);
      out.push_back(static_cast<int>(uniform_index(rng, cfg.alphabet_size)));
    } else if (u < cfg.substitution_rate + cfg.insertion_rate + cfg.deletion_rate) {
      // deleted
    } else {
      out.push_back(token);
    }
  };

  std::size_t slot_cursor = 0;
  for (std::size_t u = 0; u < cfg.num_utterances; ++u) {
    const std::string utt_id = utt_name(u);
    truth.utt_ids.push_back(utt_id);
    const std::size_t slots = slots_per_utt[u];

    std::size_t kw_total = 0;
    std::vector<std::size_t> kws(slots);
    for (std::size_t s = 0; s < slots; ++s) {
      kws[s] = slot_kw[slot_cursor++];
      kw_total += truth.keywords[kws[s]].size();
    }
    if (kw_total > cfg.max_utterance_length)
      throw std::invalid_argument("planted keywords do not fit in max_utterance_length");
    const std::size_t len =
        uniform_range(rng, std::max(cfg.min_utterance_length, kw_total),
                      cfg.max_utterance_length);
    const std::size_t filler_total = len - kw_total;

    // stars and bars: sorted uniform cuts split the filler into slots+1 gaps
    std::vector<std::size_t> cuts(slots);
    for (auto& c : cuts) c = uniform_range(rng, 0, filler_total);
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::size_t> gaps(slots + 1);
    std::size_t prev = 0;
    for (std::size_t s = 0; s < slots; ++s) {
      gaps[s] = cuts[s] - prev;
      prev = cuts[s];
    }
    gaps[slots] = filler_total - prev;

    std::vector<int> tokens;
    tokens.reserve(len + 4);
    auto emit_filler = [&](std::size_t count) {
      for (std::size_t f = 0; f < count; ++f) {
        const auto tok = static_cast<int>(uniform_index(rng, cfg.alphabet_size));
        if (cfg.noise_filler)
          emit_noisy(tok, tokens);
        else
          tokens.push_back(tok);
      }
    };
    for (std::size_t s = 0; s < slots; ++s) {
      emit_filler(gaps[s]);
      const std::size_t begin = tokens.size();
      for (const int tok : truth.keywords[kws[s]]) emit_noisy(tok, tokens);
      const std::size_t end = tokens.size();
      if (end > begin)  // fully deleted occurrences leave no span to record
        truth.occurrences.push_back(
            PlantedOccurrence{utt_id, kws[s], TokenSpan{begin, end}});
    }
    emit_filler(gaps[slots]);

    UnitSequence seq;
    seq.utt_id = utt_id;
    seq.units = std::move(tokens);
    seq.spans.reserve(seq.units.size());
    for (std::size_t t = 0; t < seq.units.size(); ++t)
      seq.spans.push_back(Segment{t, t + 1});
    corpus.utterances.push_back(std::move(seq));
  }
  return corpus;
}

namespace {

// Separated deterministic centers: center c sits on axis (c mod dim) at
// magnitude 10*(c+1), so all pairwise distances are at least 10.
std::vector<double> blob_center(std::size_t c, std::size_t dim) {
  std::vector<double> center(dim, 0.0);
  center[c % dim] = 10.0 * static_cast<double>(c + 1);
  return center;
}

}  // namespace

BlobData generate_features(std::size_t k, std::size_t dim, std::size_t points_per_cluster,
                           double spread, std::uint64_t seed) {
  if (k < 1 || dim < 1 || points_per_cluster < 1)
    throw std::invalid_argument("k, dim and points_per_cluster must be at least 1");
  if (spread <= 0.0) throw std::invalid_argument("spread must be positive");
  std::mt19937_64 rng(seed);
  BlobData data;
  data.features.reserve(k * points_per_cluster);
  data.labels.reserve(k * points_per_cluster);
  for (std::size_t c = 0; c < k; ++c) {
    const auto center = blob_center(c, dim);
    for (std::size_t p = 0; p < points_per_cluster; ++p) {
      std::vector<double> v(dim);
      for (std::size_t j = 0; j < dim; ++j) v[j] = center[j] + spread * unit_normal(rng);
      data.features.push_back(std::move(v));
      data.labels.push_back(static_cast<int>(c));
    }
  }
  return data;
}

SynthFrames synthesize_frames(const SynthCorpus& corpus, std::size_t dim,
                              std::size_t frames_per_token, double spread,
                              std::uint64_t seed) {
  if (dim < 1 || frames_per_token < 1)
    throw std::invalid_argument("dim and frames_per_token must be at least 1");
  if (spread <= 0.0) throw std::invalid_argument("spread must be positive");
  std::mt19937_64 rng(seed);

  int max_unit = 0;
  for (const auto& utt : corpus.utterances)
    for (const int u : utt.units) max_unit = std::max(max_unit, u);

  SynthFrames out;
  out.blob_centers.reserve(static_cast<std::size_t>(max_unit) + 1);
  for (std::size_t u = 0; u <= static_cast<std::size_t>(max_unit); ++u)
    out.blob_centers.push_back(blob_center(u, dim));

  const double frame_period_ms = 10.0;
  for (const auto& utt : corpus.utterances) {
    FrameMatrix fm;
    fm.utt_id = utt.utt_id;
    fm.frame_period_ms = frame_period_ms;
    fm.frames.reserve(utt.units.size() * frames_per_token);
    BoundaryHypothesisSet hyps;
    hyps.utt_id = utt.utt_id;
    std::vector<double> edges;
    for (std::size_t t = 0; t < utt.units.size(); ++t) {
      const auto& center = out.blob_centers[static_cast<std::size_t>(utt.units[t])];
      for (std::size_t f = 0; f < frames_per_token; ++f) {
        std::vector<double> frame(dim);
        for (std::size_t j = 0; j < dim; ++j)
          frame[j] = center[j] + spread * unit_normal(rng);
        fm.frames.push_back(std::move(frame));
      }
      if (t > 0)
        edges.push_back(static_cast<double>(t * frames_per_token) * frame_period_ms);
    }
    hyps.hypotheses.push_back(std::move(edges));
    out.frames.push_back(std::move(fm));
    out.boundaries.push_back(std::move(hyps));
  }
  return out;
}

}  // namespace termminer
