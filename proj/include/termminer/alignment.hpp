#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "termminer/segment_clustering.hpp"

namespace termminer {

// Half-open token index range.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
  friend auto operator<=>(const TokenSpan&, const TokenSpan&) = default;
};

struct ScoringScheme {
  double match_score = 1.0;
  double mismatch_score = -1.0;
  double gap_score = 0.0;

  void validate() const;  // match_score > 0 and mismatch_score < match_score
};

enum class TracebackMode { last_row, global };

// (n+1) x (m+1) score matrix; row 0 and column 0 are zero and no entry is
// negative.
struct AlignmentMatrix {
  std::size_t rows = 0;  // n + 1
  std::size_t cols = 0;  // m + 1
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

struct LocalAlignment {
  TokenSpan a_span;
  TokenSpan b_span;
  double score = 0.0;
};

AlignmentMatrix alignment_matrix(const std::vector<int>& a, const std::vector<int>& b,
                                 const ScoringScheme& s);

// Fills the score matrix and tracebacks each start cell until a zero cell.
// In last_row mode starts are the leftmost cells of positive local-maximum
// plateaus of row n; in global mode they are positive cells strictly above
// all three forward extensions (down, right, diagonal). Traceback ties
// prefer diagonal, then up, then left. Because gap moves are free under the
// default scheme, one path can stitch stray shared tokens onto a real repeat
// through long gap runs; those detours walk the path off its diagonal,
// unlike a substitution (exactly one up plus one left) after which it
// resumes the same diagonal at once. The reported spans cover the longest
// contiguous stretch of the path interrupted only by single substitutions
// (ties to the earliest), so repeats keep interior mismatches while
// stitched-on noise is shed; score keeps the traceback start's matrix value.
std::vector<LocalAlignment> local_align(const std::vector<int>& a, const std::vector<int>& b,
                                        const ScoringScheme& s,
                                        TracebackMode mode = TracebackMode::last_row);

// One mined subsequence plus provenance: the utterance and token range it
// was read from and the utterance/range it matched against.
struct BagEntry {
  std::vector<int> units;
  std::string source_utt;
  TokenSpan source_span;
  std::string pair_utt;
  TokenSpan pair_span;
  double score = 0.0;
};

// Canonical entry order: longer units first, then lexicographic units, then
// provenance tuple.
bool canonical_less(const BagEntry& lhs, const BagEntry& rhs);

// Dedup identity ignores the score.
bool same_identity(const BagEntry& lhs, const BagEntry& rhs);

struct SubsequenceBag {
  std::vector<BagEntry> entries;

  // Sorts entries canonically and drops duplicated (units, provenance)
  // entries, keeping the highest score.
  void canonicalize();
};

// Emits one entry per alignment side (the two unit subsequences may differ
// under mismatches), dropping sides shorter than min_length.
std::vector<BagEntry> extract_bag_entries(const std::vector<LocalAlignment>& alignments,
                                          const UnitSequence& a, const UnitSequence& b,
                                          int min_length);

// Aligns all N(N-1)/2 unordered pairs and merges the harvested entries into
// one canonical bag. Pair orientation is fixed by utt_id so the result does
// not depend on corpus order or on the worker count.
SubsequenceBag mine_pairs(const std::vector<UnitSequence>& corpus, const ScoringScheme& s,
                          int min_length, TracebackMode mode = TracebackMode::last_row,
                          unsigned jobs = 1);

std::vector<std::pair<std::size_t, std::size_t>> unordered_pairs(std::size_t n);

}  // namespace termminer
