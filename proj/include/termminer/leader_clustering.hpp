#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "termminer/alignment.hpp"
#include "termminer/string_metrics.hpp"

namespace termminer {

// Cluster of bag entries around a medoid. member_ids index into the bag the
// clustering was run over.
struct KeywordCluster {
  std::size_t medoid_id = 0;
  std::vector<std::size_t> member_ids;  // includes medoid_id
  double total_intra_distance = 0.0;    // sum of pairwise member distances from the medoid
};

struct ClusteringResult {
  std::vector<KeywordCluster> clusters;
  std::vector<std::size_t> unassigned;  // entries farther than T from every centroid
  std::size_t rounds = 0;
};

// Snapshot of one round, for tests that probe the intermediate states.
struct LeaderRound {
  std::vector<std::size_t> centroids_after_scan;
  std::vector<std::size_t> carried_over;  // centroids inherited from the previous round
  std::vector<std::optional<std::size_t>> assignment;  // entry -> centroid list index
  std::vector<std::size_t> centroids_after_update;     // medoids
};

// Iterative leader clustering with score-normalized edit distance. Each
// round scans entries in bag order promoting any entry farther than sep_a *
// radius_t from every current centroid, assigns entries to the nearest
// centroid within radius_t, then replaces each centroid with the cluster
// medoid. Stops when the cluster count repeats or after max_rounds.
ClusteringResult leader_cluster(const SubsequenceBag& bag, const MiningConfig& cfg,
                                std::size_t max_rounds = 50,
                                std::vector<LeaderRound>* trace = nullptr);

enum class ReportOrder { centroid_length, size };

struct ClusterSummary {
  std::size_t cluster_id = 0;
  std::size_t size = 0;
  std::vector<int> medoid_units;
  std::vector<std::string> utterances;  // distinct source utterances, sorted
};

// Top-n clusters sorted by centroid length or member count, descending,
// ties by cluster_id.
std::vector<ClusterSummary> cluster_report(const SubsequenceBag& bag,
                                           const ClusteringResult& result, std::size_t top_n,
                                           ReportOrder order = ReportOrder::size);

}  // namespace termminer
