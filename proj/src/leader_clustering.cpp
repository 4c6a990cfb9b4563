#include "termminer/leader_clustering.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace termminer {

ClusteringResult leader_cluster(const SubsequenceBag& bag, const MiningConfig& cfg,
                                std::size_t max_rounds, std::vector<LeaderRound>* trace) {
  cfg.validate();
  const auto& entries = bag.entries;
  if (entries.empty()) throw std::invalid_argument("cannot cluster an empty bag");
  if (max_rounds == 0) throw std::invalid_argument("max_rounds must be at least 1");

  // Scan/tie-break order is canonical regardless of how the bag was stored.
  std::vector<std::size_t> scan_order(entries.size());
  std::iota(scan_order.begin(), scan_order.end(), std::size_t{0});
  std::stable_sort(scan_order.begin(), scan_order.end(), [&](std::size_t l, std::size_t r) {
    return canonical_less(entries[l], entries[r]);
  });
  std::vector<std::size_t> rank(entries.size());
  for (std::size_t pos = 0; pos < scan_order.size(); ++pos) rank[scan_order[pos]] = pos;

  auto dist = [&](std::size_t i, std::size_t j) {
    return normalized_levenshtein(entries[i].units, entries[j].units, cfg.norm_b);
  };
  const double promote_at = cfg.sep_a * cfg.radius_t;

  std::vector<std::size_t> centroids;  // entry indices, list order = cluster id
  std::size_t prev_count = std::numeric_limits<std::size_t>::max();
  std::size_t rounds = 0;
  std::vector<std::optional<std::size_t>> assignment(entries.size());
  std::vector<std::vector<std::size_t>> members;

  while (rounds < max_rounds) {
    LeaderRound round;
    round.carried_over = centroids;

    // (1) promotion scan: anything farther than a*T from every centroid
    // becomes a centroid, in canonical order.
    for (const std::size_t idx : scan_order) {
      bool far = true;
      for (const std::size_t c : centroids) {
        if (dist(idx, c) <= promote_at) {
          far = false;
          break;
        }
      }
      if (far) centroids.push_back(idx);
    }
    round.centroids_after_scan = centroids;

    // (2) assignment: nearest centroid strictly inside T, earliest list
    // index on ties; otherwise unassigned.
    std::fill(assignment.begin(), assignment.end(), std::nullopt);
    members.assign(centroids.size(), {});
    for (std::size_t idx = 0; idx < entries.size(); ++idx) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < centroids.size(); ++c) {
        const double d = dist(idx, centroids[c]);
        if (d < best_d) {
          best = c;
          best_d = d;
        }
      }
      if (best_d < cfg.radius_t) {
        assignment[idx] = best;
        members[best].push_back(idx);
      }
    }
    round.assignment = assignment;

    // (3) medoid update: each surviving cluster keeps the member with the
    // least total distance to its co-members (canonical order on ties).
    // Clusters whose entries were all captured elsewhere are dropped.
    std::vector<std::size_t> updated;
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      if (members[c].empty()) continue;
      std::size_t medoid = members[c].front();
      double medoid_total = std::numeric_limits<double>::infinity();
      for (const std::size_t cand : members[c]) {
        double total = 0.0;
        for (const std::size_t other : members[c])
          if (other != cand) total += dist(cand, other);
        if (total < medoid_total ||
            (total == medoid_total && rank[cand] < rank[medoid])) {
          medoid = cand;
          medoid_total = total;
        }
      }
      updated.push_back(medoid);
    }
    round.centroids_after_update = updated;
    centroids = std::move(updated);
    ++rounds;
    if (trace) trace->push_back(std::move(round));

    if (centroids.size() == prev_count) break;
    prev_count = centroids.size();
  }

  // Rebuild the final membership against the last round's post-scan
  // centroid list (the assignment computed above used exactly that list,
  // minus dropped clusters).
  ClusteringResult result;
  result.rounds = rounds;
  std::vector<std::vector<std::size_t>> final_members(centroids.size());
  // assignment[] indexes the pre-drop list; remap via the medoid survivors.
  // Simplest correct route: reassign against the final centroids' clusters
  // using the membership recorded before medoids moved.
  // members[] above still matches the pre-drop list, so compress it.
  std::size_t out = 0;
  std::vector<std::size_t> unassigned;
  std::vector<std::optional<std::size_t>> compressed(entries.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    if (members[c].empty()) continue;
    for (const std::size_t idx : members[c]) compressed[idx] = out;
    final_members[out] = members[c];
    ++out;
  }
  for (std::size_t idx = 0; idx < entries.size(); ++idx)
    if (!compressed[idx].has_value()) unassigned.push_back(idx);

  result.clusters.reserve(centroids.size());
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    KeywordCluster cluster;
    cluster.medoid_id = centroids[c];
    cluster.member_ids = final_members[c];
    std::sort(cluster.member_ids.begin(), cluster.member_ids.end());
    double total = 0.0;
    for (const std::size_t idx : cluster.member_ids)
      if (idx != cluster.medoid_id) total += dist(cluster.medoid_id, idx);
    cluster.total_intra_distance = total;
    result.clusters.push_back(std::move(cluster));
  }
  result.unassigned = std::move(unassigned);
  return result;
}

std::vector<ClusterSummary> cluster_report(const SubsequenceBag& bag,
                                           const ClusteringResult& result, std::size_t top_n,
                                           ReportOrder order) {
  std::vector<ClusterSummary> summaries;
  summaries.reserve(result.clusters.size());
  for (std::size_t c = 0; c < result.clusters.size(); ++c) {
    const KeywordCluster& cluster = result.clusters[c];
    ClusterSummary s;
    s.cluster_id = c;
    s.size = cluster.member_ids.size();
    s.medoid_units = bag.entries[cluster.medoid_id].units;
    std::set<std::string> utts;
    for (const std::size_t idx : cluster.member_ids)
      utts.insert(bag.entries[idx].source_utt);
    s.utterances.assign(utts.begin(), utts.end());
    summaries.push_back(std::move(s));
  }
  std::stable_sort(summaries.begin(), summaries.end(),
                   [order](const ClusterSummary& l, const ClusterSummary& r) {
                     const std::size_t lv =
                         order == ReportOrder::size ? l.size : l.medoid_units.size();
                     const std::size_t rv =
                         order == ReportOrder::size ? r.size : r.medoid_units.size();
                     return lv > rv;  // stable keeps lower cluster_id on ties
                   });
  if (summaries.size() > top_n) summaries.resize(top_n);
  return summaries;
}

}  // namespace termminer
