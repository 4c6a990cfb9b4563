#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "termminer/alignment.hpp"
#include "termminer/segment_clustering.hpp"
#include "termminer/segmentation.hpp"

namespace termminer {

// Parameters for the planted-keyword corpus generator. Noise rates are per
// token and by default touch keyword occurrences only (filler is random by
// construction); noise_filler extends them to filler.
struct SynthConfig {
  std::size_t alphabet_size = 55;
  std::size_t num_keywords = 5;
  std::size_t min_keyword_length = 8;
  std::size_t max_keyword_length = 8;
  std::size_t num_utterances = 20;
  std::size_t min_utterance_length = 12;
  std::size_t max_utterance_length = 20;
  std::size_t min_occurrences = 1;  // keyword slots per utterance
  std::size_t max_occurrences = 1;
  double substitution_rate = 0.0;
  double insertion_rate = 0.0;
  double deletion_rate = 0.0;
  bool noise_filler = false;
  std::uint64_t seed = 1;

  void validate() const;
};

struct PlantedOccurrence {
  std::string utt_id;
  std::size_t keyword_id = 0;
  TokenSpan span;  // token range actually occupied after noise
};

struct GroundTruth {
  std::vector<std::string> utt_ids;              // the utterance universe
  std::vector<std::vector<int>> keywords;        // keyword_id -> clean unit string
  std::vector<std::string> keyword_words;        // readable names ("kw0", ...)
  std::vector<PlantedOccurrence> occurrences;
};

struct SynthCorpus {
  std::vector<UnitSequence> utterances;
  GroundTruth truth;
};

// Builds num_utterances random unit strings with keyword occurrences planted
// at random filler offsets. Keyword ids fill the slots from a balanced
// shuffled rotation, so occurrence counts per keyword differ by at most one.
// Throws if the drawn keywords cannot fit in max_utterance_length.
SynthCorpus generate_corpus(const SynthConfig& cfg);

// k separated Gaussian blobs for exercising the vector-clustering stage.
struct BlobData {
  std::vector<std::vector<double>> features;
  std::vector<int> labels;  // blob index per feature row
};

BlobData generate_features(std::size_t k, std::size_t dim, std::size_t points_per_cluster,
                           double spread, std::uint64_t seed);

// Frame-level companion to generate_corpus: each token becomes
// frames_per_token frames drawn around a per-unit blob center, with boundary
// hypotheses at the exact token edges, so the segmentation/codebook stages
// can run end-to-end on synthetic data.
struct SynthFrames {
  std::vector<FrameMatrix> frames;                  // one per utterance
  std::vector<BoundaryHypothesisSet> boundaries;
  std::vector<std::vector<double>> blob_centers;    // unit -> center
};

SynthFrames synthesize_frames(const SynthCorpus& corpus, std::size_t dim,
                              std::size_t frames_per_token, double spread, std::uint64_t seed);

}  // namespace termminer
