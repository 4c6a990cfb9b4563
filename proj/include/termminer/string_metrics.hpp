#pragma once

#include <cstddef>
#include <vector>

namespace termminer {

// Knobs of the sequence-clustering stage: cluster radius T, centroid
// separation factor a, the normalization scalar b of the length-normalized
// edit distance, and the minimum mined subsequence length.
struct MiningConfig {
  double radius_t = 1.4;
  double sep_a = 1.8;
  double norm_b = 4.0;
  int min_length = 4;

  void validate() const;
};

// Minimum number of single-token insertions, deletions and substitutions
// (unit costs) transforming x into y.
std::size_t levenshtein(const std::vector<int>& x, const std::vector<int>& y);

// b * L(x, y) / sqrt(|x|^2 + |y|^2), lengths in tokens. Longer sequence
// pairs tolerate more raw edits at the same normalized distance. Rejects
// the empty-vs-empty case (zero denominator).
double normalized_levenshtein(const std::vector<int>& x, const std::vector<int>& y, double b);

}  // namespace termminer
