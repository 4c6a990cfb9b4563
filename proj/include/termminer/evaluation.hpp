#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "termminer/leader_clustering.hpp"
#include "termminer/synthesis.hpp"

namespace termminer {

// Purity of one discovered cluster against the planted ground truth. Each
// member entry is labeled with the keyword whose planted span overlaps it the
// most (ties go to the lower keyword id) or "filler" when nothing overlaps.
struct ClusterPurity {
  std::size_t cluster_id = 0;
  std::size_t size = 0;
  std::string dominant_label;
  double purity = 0.0;  // dominant label count / size
  std::vector<std::pair<std::string, std::size_t>> label_counts;  // sorted desc, label asc
};

struct PurityReport {
  std::vector<ClusterPurity> clusters;
  double mean_purity = 0.0;       // unweighted over clusters
  double weighted_purity = 0.0;   // weighted by cluster size
};

// Throws when an entry references an utterance the truth does not know.
PurityReport cluster_purity(const SubsequenceBag& bag, const ClusteringResult& result,
                            const GroundTruth& truth);

struct Ngram {
  std::vector<std::string> words;
  std::size_t count = 0;
};

std::vector<std::string> tokenize_transcript(const std::string& text);

const std::set<std::string>& default_stopwords();

// Counts the n-grams of the token stream, drops those made entirely of
// stopwords, and ranks by count (desc) then words (asc).
std::vector<Ngram> ngram_counts(const std::vector<std::string>& tokens, std::size_t n,
                                const std::set<std::string>& stopwords = default_stopwords());

enum class MatchVerdict { match, partial_match, mismatch, uncovered };

struct NgramVerdict {
  Ngram ngram;
  MatchVerdict verdict = MatchVerdict::uncovered;
  std::size_t best_cluster = 0;  // meaningful unless uncovered
};

struct CoverageReport {
  std::vector<NgramVerdict> verdicts;
  std::size_t matches = 0;
  std::size_t partial_matches = 0;
  std::size_t mismatches = 0;
  std::size_t uncovered = 0;
  double rate = 0.0;  // (matches + partial_matches) / verdicts.size()
};

// Grades each query n-gram against the clusters' word sets, keeping the best
// verdict over clusters: match when every word is covered, partial match
// when only stopwords are missing, mismatch when a content word is missing
// but at least one word is covered.
CoverageReport coverage_match(const std::vector<Ngram>& queries,
                              const std::vector<std::vector<std::string>>& cluster_words,
                              const std::set<std::string>& stopwords = default_stopwords());

}  // namespace termminer
