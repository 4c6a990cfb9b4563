#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "termminer/segmentation.hpp"

namespace termminer {

// Full agglomerative merge history. Leaves are 0..leaf_count-1 and merge t
// creates cluster id leaf_count + t. Heights are the within-cluster variance
// increase of each merge (Ward cost) and are non-decreasing.
struct Dendrogram {
  struct Merge {
    std::size_t cluster_a = 0;
    std::size_t cluster_b = 0;
    double height = 0.0;
    std::size_t size = 0;
  };

  std::size_t leaf_count = 0;
  std::vector<Merge> merges;

  void validate() const;
};

// Learned unit inventory: unit label r is the index of centroid row r.
struct Codebook {
  std::size_t dim = 0;
  std::vector<std::vector<double>> centroids;

  std::size_t size() const { return centroids.size(); }

  // Pipeline-facing codebooks need R >= 2 distinct centroids of uniform
  // dimension; enforced at persistence boundaries.
  void validate() const;
};

struct KmeansResult {
  Codebook codebook;
  std::vector<int> assignments;
  std::vector<double> objective_history;  // WCSS after each assignment pass
  int iterations = 0;
};

// Pseudo transcription: unit labels plus the frame span each token covers.
struct UnitSequence {
  std::string utt_id;
  std::vector<int> units;
  std::vector<Segment> spans;

  void validate() const;
};

// Agglomerative clustering from singletons under the Ward minimum-variance
// criterion, via the nearest-neighbor chain with centroid/size bookkeeping.
// Inputs larger than sample_cap are clustered on a seeded uniform subsample.
Dendrogram hac_ward(const std::vector<std::vector<double>>& features,
                    std::size_t sample_cap = 100000, std::uint64_t seed = 0);

// Candidate cluster counts 2..max_k ranked by the drop in merge height at
// the cut producing k clusters. Advisory only.
std::vector<std::pair<std::size_t, double>> suggest_k(const Dendrogram& d, std::size_t max_k);

// k-means++ seeding followed by Lloyd iterations until assignments are
// stable or max_iters is hit. Empty clusters are reseeded to the point
// farthest from its assigned centroid. Distance ties go to the lowest
// centroid index.
KmeansResult kmeans(const std::vector<std::vector<double>>& features, std::size_t k,
                    std::uint64_t seed, int max_iters = 100);

// Labels each segment with its nearest centroid, order preserved.
UnitSequence transcribe(const Codebook& codebook, const std::vector<SegmentFeature>& segments);

// Fraction of positions where the two label sequences differ.
double label_diff_rate(const std::vector<int>& a, const std::vector<int>& b);

// Expands a unit sequence to per-frame labels using each token's span.
// Frames not covered by any span are labeled -1.
std::vector<int> frame_labels(const UnitSequence& seq, std::size_t frame_count);

}  // namespace termminer
