#include "termminer/evaluation.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace termminer {

namespace {

std::size_t overlap(const TokenSpan& a, const TokenSpan& b) {
  const std::size_t lo = std::max(a.begin, b.begin);
  const std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

}  // namespace

PurityReport cluster_purity(const SubsequenceBag& bag, const ClusteringResult& result,
                            const GroundTruth& truth) {
  std::unordered_map<std::string, std::vector<const PlantedOccurrence*>> by_utt;
  for (const auto& id : truth.utt_ids) by_utt[id];  // known universe
  for (const auto& occ : truth.occurrences) by_utt[occ.utt_id].push_back(&occ);

  auto label_of = [&](const BagEntry& e) -> std::string {
    const auto it = by_utt.find(e.source_utt);
    if (it == by_utt.end())
      throw std::invalid_argument("bag entry references unknown utterance " + e.source_utt);
    std::size_t best_overlap = 0;
    std::size_t best_kid = 0;
    bool found = false;
    for (const PlantedOccurrence* occ : it->second) {
      const std::size_t ov = overlap(e.source_span, occ->span);
      if (ov == 0) continue;
      if (!found || ov > best_overlap ||
          (ov == best_overlap && occ->keyword_id < best_kid)) {
        best_overlap = ov;
        best_kid = occ->keyword_id;
        found = true;
      }
    }
    if (!found) return "filler";
    return truth.keyword_words[best_kid];
  };

  PurityReport report;
  double purity_sum = 0.0;
  double weighted_sum = 0.0;
  std::size_t member_total = 0;
  for (std::size_t c = 0; c < result.clusters.size(); ++c) {
    const KeywordCluster& cluster = result.clusters[c];
    std::map<std::string, std::size_t> counts;
    for (const std::size_t idx : cluster.member_ids) ++counts[label_of(bag.entries[idx])];

    ClusterPurity cp;
    cp.cluster_id = c;
    cp.size = cluster.member_ids.size();
    cp.label_counts.assign(counts.begin(), counts.end());
    std::stable_sort(cp.label_counts.begin(), cp.label_counts.end(),
                     [](const auto& l, const auto& r) { return l.second > r.second; });
    cp.dominant_label = cp.label_counts.front().first;
    cp.purity = static_cast<double>(cp.label_counts.front().second) /
                static_cast<double>(cp.size);
    purity_sum += cp.purity;
    weighted_sum += cp.purity * static_cast<double>(cp.size);
    member_total += cp.size;
    report.clusters.push_back(std::move(cp));
  }
  if (!report.clusters.empty()) {
    report.mean_purity = purity_sum / static_cast<double>(report.clusters.size());
    report.weighted_purity = weighted_sum / static_cast<double>(member_total);
  }
  return report;
}

std::vector<std::string> tokenize_transcript(const std::string& text) {
  std::vector<std::string> tokens;
  std::istringstream in(text);
  std::string word;
  while (in >> word) {
    for (char& ch : word) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    tokens.push_back(std::move(word));
  }
  return tokens;
}

const std::set<std::string>& default_stopwords() {
  // Built-in English function words; override with a stopword file for
  // anything domain-specific.
  static const std::set<std::string> words = {
      "a",     "about", "above", "after",  "again", "all",   "am",    "an",
      "and",   "any",   "are",   "as",     "at",    "be",    "been",  "being",
      "below", "both",  "but",   "by",     "can",   "could", "did",   "do",
      "does",  "down",  "during", "each",  "few",   "for",   "from",  "had",
      "has",   "have",  "he",    "her",    "here",  "his",   "how",   "i",
      "if",    "in",    "into",  "is",     "it",    "its",   "just",  "may",
      "me",    "might", "more",  "most",   "must",  "my",    "no",    "not",
      "now",   "of",    "off",   "on",     "or",    "other", "our",   "out",
      "over",  "own",   "shall", "she",    "should", "so",   "some",  "such",
      "than",  "that",  "the",   "their",  "them",  "then",  "there", "these",
      "they",  "this",  "those", "to",     "too",   "under", "up",    "us",
      "very",  "was",   "we",    "were",   "what",  "when",  "where", "which",
      "while", "who",   "whom",  "why",    "will",  "with",  "would", "you",
      "your"};
  return words;
}

std::vector<Ngram> ngram_counts(const std::vector<std::string>& tokens, std::size_t n,
                                const std::set<std::string>& stopwords) {
  if (n == 0) throw std::invalid_argument("n-gram order must be at least 1");
  std::map<std::vector<std::string>, std::size_t> counts;
  if (tokens.size() >= n) {
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
      bool all_stop = true;
      for (std::size_t j = i; j < i + n; ++j) {
        if (!stopwords.count(tokens[j])) {
          all_stop = false;
          break;
        }
      }
      if (all_stop) continue;  // pure function-word grams are discarded
      ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                        tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
    }
  }
  std::vector<Ngram> ranked;
  ranked.reserve(counts.size());
  for (const auto& [words, count] : counts) ranked.push_back(Ngram{words, count});
  std::stable_sort(ranked.begin(), ranked.end(), [](const Ngram& l, const Ngram& r) {
    return l.count > r.count;  // map order keeps the lexicographic tie-break
  });
  return ranked;
}

CoverageReport coverage_match(const std::vector<Ngram>& queries,
                              const std::vector<std::vector<std::string>>& cluster_words,
                              const std::set<std::string>& stopwords) {
  std::vector<std::unordered_set<std::string>> cluster_sets;
  cluster_sets.reserve(cluster_words.size());
  for (const auto& words : cluster_words)
    cluster_sets.emplace_back(words.begin(), words.end());

  auto verdict_rank = [](MatchVerdict v) {
    switch (v) {
      case MatchVerdict::match: return 3;
      case MatchVerdict::partial_match: return 2;
      case MatchVerdict::mismatch: return 1;
      default: return 0;
    }
  };

  CoverageReport report;
  for (const Ngram& q : queries) {
    NgramVerdict nv;
    nv.ngram = q;
    nv.verdict = MatchVerdict::uncovered;
    for (std::size_t c = 0; c < cluster_sets.size(); ++c) {
      std::size_t covered = 0;
      bool content_missing = false;
      for (const auto& w : q.words) {
        if (cluster_sets[c].count(w))
          ++covered;
        else if (!stopwords.count(w))
          content_missing = true;
      }
      MatchVerdict v;
      if (covered == q.words.size())
        v = MatchVerdict::match;
      else if (!content_missing)
        v = MatchVerdict::partial_match;  // residue is function words only
      else if (covered > 0)
        v = MatchVerdict::mismatch;
      else
        v = MatchVerdict::uncovered;
      if (verdict_rank(v) > verdict_rank(nv.verdict)) {
        nv.verdict = v;
        nv.best_cluster = c;
      }
    }
    switch (nv.verdict) {
      case MatchVerdict::match: ++report.matches; break;
      case MatchVerdict::partial_match: ++report.partial_matches; break;
      case MatchVerdict::mismatch: ++report.mismatches; break;
      case MatchVerdict::uncovered: ++report.uncovered; break;
    }
    report.verdicts.push_back(std::move(nv));
  }
  if (!report.verdicts.empty())
    report.rate = static_cast<double>(report.matches + report.partial_matches) /
                  static_cast<double>(report.verdicts.size());
  return report;
}

}  // namespace termminer
