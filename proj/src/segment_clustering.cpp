#include "termminer/segment_clustering.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace termminer {

namespace {

double sqdist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// 53-bit uniform in [0, 1); built from raw engine words so the stream is
// identical on every platform (the std distributions are not portable).
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return static_cast<std::size_t>(rng() % n);
}

void check_features(const std::vector<std::vector<double>>& features) {
  if (features.empty()) throw std::invalid_argument("no feature vectors");
  const std::size_t dim = features.front().size();
  if (dim == 0) throw std::invalid_argument("feature dimension must be at least 1");
  for (const auto& f : features)
    if (f.size() != dim) throw std::invalid_argument("feature vectors must share one dimension");
}

}  // namespace

void Dendrogram::validate() const {
  if (leaf_count < 1) throw std::logic_error("dendrogram needs at least one leaf");
  if (merges.size() != leaf_count - 1)
    throw std::logic_error("dendrogram must contain exactly leaf_count - 1 merges");
  std::vector<std::size_t> size(leaf_count + merges.size(), 0);
  std::vector<char> consumed(leaf_count + merges.size(), 0);
  std::fill(size.begin(), size.begin() + static_cast<std::ptrdiff_t>(leaf_count), 1);
  double prev = 0.0;
  for (std::size_t t = 0; t < merges.size(); ++t) {
    const Merge& m = merges[t];
    const std::size_t limit = leaf_count + t;
    if (m.cluster_a >= limit || m.cluster_b >= limit || m.cluster_a == m.cluster_b)
      throw std::logic_error("dendrogram merge references an invalid cluster");
    if (consumed[m.cluster_a] || consumed[m.cluster_b])
      throw std::logic_error("dendrogram merge reuses a consumed cluster");
    if (m.height < 0.0 || m.height < prev)
      throw std::logic_error("dendrogram merge heights must be non-decreasing");
    if (m.size != size[m.cluster_a] + size[m.cluster_b])
      throw std::logic_error("dendrogram merge size does not add up");
    consumed[m.cluster_a] = consumed[m.cluster_b] = 1;
    size[limit] = m.size;
    prev = m.height;
  }
}

void Codebook::validate() const {
  if (dim == 0) throw std::invalid_argument("codebook dimension must be at least 1");
  if (centroids.size() < 2) throw std::invalid_argument("codebook needs at least 2 units");
  for (const auto& c : centroids)
    if (c.size() != dim) throw std::invalid_argument("codebook centroid has wrong dimension");
  auto sorted = centroids;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("codebook centroids must be pairwise distinct");
}

void UnitSequence::validate() const {
  if (units.size() != spans.size())
    throw std::invalid_argument("unit sequence needs one span per unit");
  for (std::size_t i = 0; i < spans.size(); ++i) {
    if (spans[i].begin >= spans[i].end)
      throw std::invalid_argument("unit spans must be non-empty");
    if (i > 0 && spans[i].begin < spans[i - 1].end)
      throw std::invalid_argument("unit spans must be ordered and disjoint");
    if (units[i] < 0) throw std::invalid_argument("unit labels must be non-negative");
  }
}

Dendrogram hac_ward(const std::vector<std::vector<double>>& features, std::size_t sample_cap,
                    std::uint64_t seed) {
  check_features(features);
  if (features.size() < 2)
    throw std::invalid_argument("hierarchical clustering needs at least 2 vectors");
  if (sample_cap < 2) sample_cap = 2;

  // Subsample above the cap: seeded partial Fisher-Yates, then input order.
  std::vector<std::size_t> chosen(features.size());
  std::iota(chosen.begin(), chosen.end(), std::size_t{0});
  if (chosen.size() > sample_cap) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < sample_cap; ++i) {
      const std::size_t j = i + uniform_index(rng, chosen.size() - i);
      std::swap(chosen[i], chosen[j]);
    }
    chosen.resize(sample_cap);
    std::sort(chosen.begin(), chosen.end());
  }
  const std::size_t n = chosen.size();

  struct Node {
    std::vector<double> centroid;
    std::size_t size = 0;
    bool alive = false;
  };
  std::vector<Node> nodes;
  nodes.reserve(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) nodes.push_back(Node{features[chosen[i]], 1, true});

  // Ward merge cost from (centroid, size) bookkeeping.
  auto ward = [&](std::size_t u, std::size_t v) {
    const double su = static_cast<double>(nodes[u].size);
    const double sv = static_cast<double>(nodes[v].size);
    return su * sv / (su + sv) * sqdist(nodes[u].centroid, nodes[v].centroid);
  };

  struct ChronoMerge {
    std::size_t a = 0;  // chrono cluster ids
    std::size_t b = 0;
    double height = 0.0;
    std::size_t size = 0;
  };
  std::vector<ChronoMerge> chrono;
  chrono.reserve(n - 1);

  // Nearest-neighbor chain: extend the chain with strict improvements (the
  // previous chain element wins ties, then the oldest cluster) and merge
  // whenever a mutual nearest-neighbor pair appears.
  std::vector<std::size_t> chain;
  std::size_t lowest_alive = 0;
  while (chrono.size() + 1 < n) {
    if (chain.empty()) {
      while (!nodes[lowest_alive].alive) ++lowest_alive;
      chain.push_back(lowest_alive);
    }
    const std::size_t x = chain.back();
    const bool has_prev = chain.size() >= 2;
    const std::size_t prev = has_prev ? chain[chain.size() - 2] : 0;

    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_d = std::numeric_limits<double>::infinity();
    if (has_prev) {
      best = prev;
      best_d = ward(x, prev);
    }
    for (std::size_t y = 0; y < nodes.size(); ++y) {
      if (!nodes[y].alive || y == x || (has_prev && y == prev)) continue;
      const double d = ward(x, y);
      if (d < best_d) {
        best = y;
        best_d = d;
      }
    }

    if (has_prev && best == prev) {
      Node merged;
      merged.size = nodes[x].size + nodes[prev].size;
      merged.centroid.resize(nodes[x].centroid.size());
      const double wx = static_cast<double>(nodes[x].size);
      const double wp = static_cast<double>(nodes[prev].size);
      for (std::size_t c = 0; c < merged.centroid.size(); ++c)
        merged.centroid[c] =
            (wx * nodes[x].centroid[c] + wp * nodes[prev].centroid[c]) / (wx + wp);
      merged.alive = true;
      chrono.push_back(
          ChronoMerge{std::min(x, prev), std::max(x, prev), best_d, merged.size});
      nodes[x].alive = nodes[prev].alive = false;
      chain.pop_back();
      chain.pop_back();
      nodes.push_back(std::move(merged));
    } else {
      chain.push_back(best);
    }
  }

  // Emit merges by ascending height. A stable sort almost always suffices
  // (Ward is reducible), but float noise near exact ties can order a parent
  // ahead of a child, so blocked merges wait for their children and heights
  // are clamped to stay monotone.
  const std::size_t merge_count = chrono.size();
  std::vector<std::size_t> order(merge_count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
    return chrono[l].height < chrono[r].height;
  });

  std::vector<char> avail(n + merge_count, 0);
  std::fill(avail.begin(), avail.begin() + static_cast<std::ptrdiff_t>(n), 1);
  std::vector<std::vector<std::size_t>> waiters(n + merge_count);
  std::vector<std::size_t> emit;
  emit.reserve(merge_count);
  std::deque<std::size_t> queue;
  for (const std::size_t idx : order) {
    queue.push_back(idx);
    while (!queue.empty()) {
      const std::size_t cur = queue.front();
      queue.pop_front();
      const ChronoMerge& cm = chrono[cur];
      if (!avail[cm.a]) {
        waiters[cm.a].push_back(cur);
        continue;
      }
      if (!avail[cm.b]) {
        waiters[cm.b].push_back(cur);
        continue;
      }
      emit.push_back(cur);
      const std::size_t created = n + cur;
      avail[created] = 1;
      for (const std::size_t w : waiters[created]) queue.push_back(w);
      waiters[created].clear();
    }
  }

  std::vector<std::size_t> final_id(n + merge_count);
  std::iota(final_id.begin(), final_id.begin() + static_cast<std::ptrdiff_t>(n),
            std::size_t{0});
  for (std::size_t pos = 0; pos < emit.size(); ++pos) final_id[n + emit[pos]] = n + pos;

  Dendrogram d;
  d.leaf_count = n;
  d.merges.reserve(merge_count);
  double prev_h = 0.0;
  for (const std::size_t cur : emit) {
    const ChronoMerge& cm = chrono[cur];
    const std::size_t a = final_id[cm.a];
    const std::size_t b = final_id[cm.b];
    const double h = std::max(cm.height, prev_h);
    d.merges.push_back(Dendrogram::Merge{std::min(a, b), std::max(a, b), h, cm.size});
    prev_h = h;
  }
  d.validate();
  return d;
}

std::vector<std::pair<std::size_t, double>> suggest_k(const Dendrogram& d, std::size_t max_k) {
  d.validate();
  const std::size_t n = d.leaf_count;
  std::vector<std::pair<std::size_t, double>> ranked;
  if (n < 2) return ranked;

  // Cutting into k clusters removes the top k-1 merges; credit k with the
  // height gap between the first removed merge and the last kept one.
  const std::size_t kmax = std::min(max_k, n);
  for (std::size_t k = 2; k <= kmax; ++k) {
    const double upper = d.merges[n - k].height;
    const double lower = k < n ? d.merges[n - k - 1].height : 0.0;
    ranked.emplace_back(k, upper - lower);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& l, const auto& r) {
    return l.second > r.second;  // stable keeps smaller k first on ties
  });
  return ranked;
}

KmeansResult kmeans(const std::vector<std::vector<double>>& features, std::size_t k,
                    std::uint64_t seed, int max_iters) {
  check_features(features);
  if (k == 0) throw std::invalid_argument("k must be at least 1");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be at least 1");
  const std::size_t n = features.size();

  {
    auto sorted = features;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t distinct = static_cast<std::size_t>(
        std::distance(sorted.begin(), std::unique(sorted.begin(), sorted.end())));
    if (k > distinct)
      throw std::invalid_argument("k exceeds the number of distinct feature vectors");
  }

  // k-means++ seeding; duplicate-of-centroid points carry zero weight so the
  // seeds are always distinct.
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  centroids.push_back(features[uniform_index(rng, n)]);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], sqdist(features[i], centroids.back()));
      total += d2[i];
    }
    const double target = unit_uniform(rng) * total;
    double cum = 0.0;
    std::size_t pick = std::numeric_limits<std::size_t>::max();
    std::size_t fallback = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < n; ++i) {
      if (d2[i] <= 0.0) continue;
      fallback = i;
      cum += d2[i];
      if (pick == std::numeric_limits<std::size_t>::max() && cum > target) pick = i;
    }
    if (pick == std::numeric_limits<std::size_t>::max()) pick = fallback;
    centroids.push_back(features[pick]);
  }

  KmeansResult result;
  std::vector<int> assignments(n, -1);
  std::vector<double> history;
  int iterations = 0;

  for (int pass = 1;; ++pass) {
    std::vector<int> next(n, 0);
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sqdist(features[i], centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = sqdist(features[i], centroids[c]);
        if (d < best_d) {  // strict: ties stay with the lowest index
          best = static_cast<int>(c);
          best_d = d;
        }
      }
      next[i] = best;
      wcss += best_d;
    }
    history.push_back(wcss);
    iterations = pass;
    const bool stable = next == assignments;
    assignments = std::move(next);
    if (stable || pass == max_iters) break;

    // centroid update
    std::vector<std::vector<double>> sums(k, std::vector<double>(features[0].size(), 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(assignments[i]);
      ++counts[c];
      for (std::size_t j = 0; j < features[i].size(); ++j) sums[c][j] += features[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < sums[c].size(); ++j)
        centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
    // Re-seed empty clusters to the worst-fit point (farthest from its own
    // updated centroid), each empty cluster taking a fresh point.
    std::vector<char> stolen(n, 0);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t worst = std::numeric_limits<std::size_t>::max();
      double worst_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (stolen[i]) continue;
        const double d = sqdist(features[i], centroids[static_cast<std::size_t>(assignments[i])]);
        if (d > worst_d) {
          worst = i;
          worst_d = d;
        }
      }
      if (worst == std::numeric_limits<std::size_t>::max()) continue;
      centroids[c] = features[worst];
      stolen[worst] = 1;
    }
  }

  result.codebook.dim = features[0].size();
  result.codebook.centroids = std::move(centroids);
  result.assignments = std::move(assignments);
  result.objective_history = std::move(history);
  result.iterations = iterations;
  return result;
}

UnitSequence transcribe(const Codebook& codebook, const std::vector<SegmentFeature>& segments) {
  codebook.validate();
  UnitSequence seq;
  if (segments.empty()) return seq;
  seq.utt_id = segments.front().utt_id;
  seq.units.reserve(segments.size());
  seq.spans.reserve(segments.size());
  for (const auto& sf : segments) {
    if (sf.vector.size() != codebook.dim)
      throw std::invalid_argument("segment feature dimension does not match the codebook");
    int best = 0;
    double best_d = sqdist(sf.vector, codebook.centroids[0]);
    for (std::size_t c = 1; c < codebook.size(); ++c) {
      const double d = sqdist(sf.vector, codebook.centroids[c]);
      if (d < best_d) {
        best = static_cast<int>(c);
        best_d = d;
      }
    }
    seq.units.push_back(best);
    seq.spans.push_back(sf.segment);
  }
  return seq;
}

double label_diff_rate(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("label sequences must have equal length");
  if (a.empty()) return 0.0;
  std::size_t diff = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++diff;
  return static_cast<double>(diff) / static_cast<double>(a.size());
}

std::vector<int> frame_labels(const UnitSequence& seq, std::size_t frame_count) {
  std::vector<int> labels(frame_count, -1);
  for (std::size_t t = 0; t < seq.units.size(); ++t) {
    const std::size_t end = std::min(seq.spans[t].end, frame_count);
    for (std::size_t f = seq.spans[t].begin; f < end; ++f) labels[f] = seq.units[t];
  }
  return labels;
}

}  // namespace termminer
