#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "termminer/alignment.hpp"
#include "termminer/evaluation.hpp"
#include "termminer/leader_clustering.hpp"
#include "termminer/segment_clustering.hpp"
#include "termminer/segmentation.hpp"
#include "termminer/synthesis.hpp"

namespace termminer {

// Raised by the loaders on unreadable paths or malformed content; the CLI
// maps it to the missing-input exit code.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ManifestEntry {
  std::filesystem::path features;  // CSV, one frame per row
  double duration_ms = 0.0;
  double frame_period_ms = 10.0;
};

// utt_id -> entry, kept sorted by utt_id so iteration order is stable.
struct CorpusManifest {
  std::map<std::string, ManifestEntry> entries;
};

CorpusManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path);

// Frame features CSV: rows of comma-separated decimal floats.
std::vector<std::vector<double>> load_features_csv(const std::filesystem::path& path);
void save_features_csv(const std::vector<std::vector<double>>& frames,
                       const std::filesystem::path& path);

FrameMatrix load_frame_matrix(const std::string& utt_id, const ManifestEntry& entry);

// Boundary hypotheses per utterance: {"utt_id": ..., "hypotheses": [[ms,...],...]}.
BoundaryHypothesisSet load_boundaries(const std::filesystem::path& path);
void save_boundaries(const BoundaryHypothesisSet& hyps, const std::filesystem::path& path);

// Merged segmentation output: {"utt_id": ..., "boundaries_ms": [...],
// "segments": [[begin,end],...]} with segments in frames.
struct SegmentationRecord {
  std::string utt_id;
  std::vector<double> boundaries_ms;
  std::vector<Segment> segments;
};

SegmentationRecord load_segmentation(const std::filesystem::path& path);
void save_segmentation(const SegmentationRecord& record, const std::filesystem::path& path);

Codebook load_codebook(const std::filesystem::path& path);
void save_codebook(const Codebook& codebook, const std::filesystem::path& path);

void save_dendrogram(const Dendrogram& d, const std::filesystem::path& path);
Dendrogram load_dendrogram(const std::filesystem::path& path);

// Pseudo transcriptions: JSON lines, one utterance per line.
std::vector<UnitSequence> load_transcriptions(const std::filesystem::path& path);
void save_transcriptions(const std::vector<UnitSequence>& seqs,
                         const std::filesystem::path& path);

// Mined bag: JSON lines, one entry per line, canonical order preserved.
SubsequenceBag load_bag(const std::filesystem::path& path);
void save_bag(const SubsequenceBag& bag, const std::filesystem::path& path);

// Clusters: a JSON array of {cluster_id, centroid_units, member_count,
// members}; members reference bag entries by index and repeat the units and
// provenance for inspection.
void save_clusters(const SubsequenceBag& bag, const ClusteringResult& result,
                   const std::filesystem::path& path);
ClusteringResult load_clusters(const std::filesystem::path& path);

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);
GroundTruth load_ground_truth(const std::filesystem::path& path);

void save_purity_report(const PurityReport& report, const std::filesystem::path& json_path);
void save_purity_csv(const PurityReport& report, const std::filesystem::path& csv_path);

void save_coverage_report(const CoverageReport& report, const std::filesystem::path& json_path);
void save_coverage_csv(const CoverageReport& report, const std::filesystem::path& csv_path);

std::string load_text(const std::filesystem::path& path);
void save_text(const std::string& text, const std::filesystem::path& path);

// FNV-1a 64-bit over the raw file bytes; used by the run manifests so
// reruns can be compared without timestamps.
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string hash_hex(std::uint64_t h);

}  // namespace termminer
