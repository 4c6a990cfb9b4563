#include "termminer/alignment.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace termminer {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

void ScoringScheme::validate() const {
  if (match_score <= 0.0) throw std::invalid_argument("match score must be positive");
  if (mismatch_score >= match_score)
    throw std::invalid_argument("mismatch score must be below the match score");
}

AlignmentMatrix alignment_matrix(const std::vector<int>& a, const std::vector<int>& b,
                                 const ScoringScheme& s) {
  s.validate();
  if (a.empty() || b.empty())
    throw std::invalid_argument("local alignment needs two non-empty sequences");
  const std::size_t n = a.size();
  const std::size_t m = b.size();
  AlignmentMatrix p;
  p.rows = n + 1;
  p.cols = m + 1;
  p.values.assign(p.rows * p.cols, 0.0);
  for (std::size_t i = 1; i <= n; ++i) {
    const double* prev = &p.values[(i - 1) * p.cols];
    double* cur = &p.values[i * p.cols];
    for (std::size_t j = 1; j <= m; ++j) {
      const double diag =
          prev[j - 1] + (a[i - 1] == b[j - 1] ? s.match_score : s.mismatch_score);
      const double up = prev[j] + s.gap_score;
      const double left = cur[j - 1] + s.gap_score;
      cur[j] = std::max({diag, up, left, 0.0});
    }
  }
  return p;
}

std::vector<LocalAlignment> local_align(const std::vector<int>& a, const std::vector<int>& b,
                                        const ScoringScheme& s, TracebackMode mode) {
  const AlignmentMatrix p = alignment_matrix(a, b, s);
  const std::size_t n = a.size();
  const std::size_t m = b.size();

  std::vector<std::pair<std::size_t, std::size_t>> starts;
  if (mode == TracebackMode::last_row) {
    // Leftmost cell of every positive plateau of row n that rises strictly
    // above both neighboring plateaus.
    std::size_t j = 0;
    while (j <= m) {
      std::size_t k = j;
      while (k + 1 <= m && p.at(n, k + 1) == p.at(n, j)) ++k;
      const double v = p.at(n, j);
      const double before = j > 0 ? p.at(n, j - 1) : kNegInf;
      const double after = k < m ? p.at(n, k + 1) : kNegInf;
      if (v > 0.0 && v > before && v > after) starts.emplace_back(n, j);
      j = k + 1;
    }
  } else {
    // Positive cells strictly above every forward extension: a path ending
    // here cannot be grown without losing score.
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t j2 = 1; j2 <= m; ++j2) {
        const double v = p.at(i, j2);
        if (v <= 0.0) continue;
        const double down = i < n ? p.at(i + 1, j2) : kNegInf;
        const double right = j2 < m ? p.at(i, j2 + 1) : kNegInf;
        const double diag = (i < n && j2 < m) ? p.at(i + 1, j2 + 1) : kNegInf;
        if (v > down && v > right && v > diag) starts.emplace_back(i, j2);
      }
    }
  }

  std::vector<LocalAlignment> out;
  out.reserve(starts.size());
  for (const auto& [si, sj] : starts) {
    std::size_t i = si;
    std::size_t j = sj;
    // Retrace producing moves (diagonal wins ties, then up, then left) until
    // a zero cell; the candidates are recomputed from the same doubles the
    // fill used, so the equality tests are exact.
    //
    // Zero-cost gaps let one path stitch together matches that have nothing
    // to do with each other: any stray token the pair shares gets chained to
    // the real repeat through a run of free gap moves. Those detours walk
    // the path off its matrix diagonal, whereas a substitution inside a
    // repeat shows up as exactly one up plus one left and the path resumes
    // the same diagonal immediately. So the emitted spans cover the longest
    // contiguous stretch of the path whose interruptions are all single
    // substitutions (ties go to the earliest such stretch), which quotes
    // repeats with their interior mismatches intact while shedding the
    // stitched-on noise. The score keeps the traceback start's matrix value.
    std::size_t seg_end_i = 0, seg_end_j = 0;      // current stretch, grown backwards
    std::size_t seg_begin_i = 0, seg_begin_j = 0;  // cell before its first aligned pair
    bool in_seg = false;
    std::size_t burst_up = 0, burst_left = 0;  // gap moves since the last diagonal
    std::size_t best_end_i = 0, best_end_j = 0, best_begin_i = 0, best_begin_j = 0;
    std::size_t best_len = 0;
    const auto commit = [&]() {
      if (!in_seg) return;
      const std::size_t len = seg_end_i - seg_begin_i;
      // The walk sees later stretches first, so >= keeps the earliest one.
      if (len >= best_len) {
        best_len = len;
        best_end_i = seg_end_i;
        best_end_j = seg_end_j;
        best_begin_i = seg_begin_i;
        best_begin_j = seg_begin_j;
      }
    };
    while (p.at(i, j) > 0.0) {
      const double v = p.at(i, j);
      const double diag =
          p.at(i - 1, j - 1) + (a[i - 1] == b[j - 1] ? s.match_score : s.mismatch_score);
      if (v == diag) {
        const bool substitution = burst_up == 1 && burst_left == 1;
        if (!in_seg || !(substitution || (burst_up == 0 && burst_left == 0))) {
          commit();
          in_seg = true;
          seg_end_i = i;
          seg_end_j = j;
        }
        burst_up = burst_left = 0;
        --i;
        --j;
        seg_begin_i = i;
        seg_begin_j = j;
      } else if (v == p.at(i - 1, j) + s.gap_score) {
        ++burst_up;
        --i;
      } else if (v == p.at(i, j - 1) + s.gap_score) {
        ++burst_left;
        --j;
      } else {
        throw std::logic_error("alignment traceback found no producing move");
      }
    }
    commit();
    if (best_len == 0) continue;  // positive path with no aligned pair
    out.push_back(LocalAlignment{TokenSpan{best_begin_i, best_end_i},
                                 TokenSpan{best_begin_j, best_end_j}, p.at(si, sj)});
  }
  return out;
}

bool canonical_less(const BagEntry& lhs, const BagEntry& rhs) {
  if (lhs.units.size() != rhs.units.size()) return lhs.units.size() > rhs.units.size();
  if (lhs.units != rhs.units) return lhs.units < rhs.units;
  return std::tie(lhs.source_utt, lhs.source_span, lhs.pair_utt, lhs.pair_span) <
         std::tie(rhs.source_utt, rhs.source_span, rhs.pair_utt, rhs.pair_span);
}

bool same_identity(const BagEntry& lhs, const BagEntry& rhs) {
  return lhs.units == rhs.units && lhs.source_utt == rhs.source_utt &&
         lhs.source_span == rhs.source_span && lhs.pair_utt == rhs.pair_utt &&
         lhs.pair_span == rhs.pair_span;
}

void SubsequenceBag::canonicalize() {
  std::sort(entries.begin(), entries.end(), [](const BagEntry& l, const BagEntry& r) {
    if (!same_identity(l, r)) return canonical_less(l, r);
    return l.score > r.score;  // duplicates keep the best score
  });
  entries.erase(std::unique(entries.begin(), entries.end(), same_identity), entries.end());
}

std::vector<BagEntry> extract_bag_entries(const std::vector<LocalAlignment>& alignments,
                                          const UnitSequence& a, const UnitSequence& b,
                                          int min_length) {
  const std::size_t min_len = min_length > 0 ? static_cast<std::size_t>(min_length) : 0;
  std::vector<BagEntry> out;
  for (const auto& al : alignments) {
    if (al.a_span.length() >= min_len) {
      BagEntry e;
      e.units.assign(a.units.begin() + static_cast<std::ptrdiff_t>(al.a_span.begin),
                     a.units.begin() + static_cast<std::ptrdiff_t>(al.a_span.end));
      e.source_utt = a.utt_id;
      e.source_span = al.a_span;
      e.pair_utt = b.utt_id;
      e.pair_span = al.b_span;
      e.score = al.score;
      out.push_back(std::move(e));
    }
    if (al.b_span.length() >= min_len) {
      BagEntry e;
      e.units.assign(b.units.begin() + static_cast<std::ptrdiff_t>(al.b_span.begin),
                     b.units.begin() + static_cast<std::ptrdiff_t>(al.b_span.end));
      e.source_utt = b.utt_id;
      e.source_span = al.b_span;
      e.pair_utt = a.utt_id;
      e.pair_span = al.a_span;
      e.score = al.score;
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> unordered_pairs(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  return pairs;
}

SubsequenceBag mine_pairs(const std::vector<UnitSequence>& corpus, const ScoringScheme& s,
                          int min_length, TracebackMode mode, unsigned jobs) {
  if (corpus.size() < 2) throw std::invalid_argument("pair mining needs at least 2 utterances");
  s.validate();
  if (jobs == 0) jobs = 1;

  const auto pairs = unordered_pairs(corpus.size());
  std::vector<std::vector<BagEntry>> per_pair(pairs.size());

  // Each pair lands in a fixed slot and the A side is the lexicographically
  // smaller utt_id, so the merged bag is independent of worker count and of
  // corpus order.
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t t = first; t < pairs.size(); t += stride) {
      const auto [i, j] = pairs[t];
      const UnitSequence* a = &corpus[i];
      const UnitSequence* b = &corpus[j];
      if (b->utt_id < a->utt_id) std::swap(a, b);
      const auto alignments = local_align(a->units, b->units, s, mode);
      per_pair[t] = extract_bag_entries(alignments, *a, *b, min_length);
    }
  };

  if (jobs == 1 || pairs.size() < 2) {
    work(0, 1);
  } else {
    const unsigned workers = std::min<unsigned>(jobs, static_cast<unsigned>(pairs.size()));
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w, workers);
    for (auto& th : threads) th.join();
  }

  SubsequenceBag bag;
  std::size_t total = 0;
  for (const auto& chunk : per_pair) total += chunk.size();
  bag.entries.reserve(total);
  for (auto& chunk : per_pair)
    for (auto& e : chunk) bag.entries.push_back(std::move(e));
  bag.canonicalize();
  return bag;
}

}  // namespace termminer
