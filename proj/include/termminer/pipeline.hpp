#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "termminer/alignment.hpp"
#include "termminer/io.hpp"
#include "termminer/string_metrics.hpp"
#include "termminer/synthesis.hpp"

namespace termminer {

// Everything a run needs, collected from (in order of precedence) CLI flags,
// TERMMINER_* environment variables, the JSON config file, and defaults.
struct PipelineConfig {
  std::filesystem::path manifest;        // corpus manifest JSON
  std::filesystem::path boundaries_dir;  // per-utterance hypothesis JSON files
  std::filesystem::path output_dir = "out";
  std::filesystem::path transcript;      // ground-truth text (evaluate, optional)
  std::filesystem::path stopword_file;   // overrides the built-in list (optional)
  std::filesystem::path cluster_words;   // cluster_id -> word list JSON (evaluate, optional)

  double window_ms = 20.0;

  std::size_t codebook_k = 55;
  std::uint64_t seed = 0;
  std::size_t kmeans_max_iters = 100;
  std::size_t hac_sample_cap = 100000;

  ScoringScheme scoring;
  int min_length = 4;
  TracebackMode traceback = TracebackMode::last_row;
  unsigned jobs = 1;

  MiningConfig mining;
  std::size_t max_rounds = 50;

  std::size_t top_unigrams = 30;
  std::size_t top_bigrams = 20;
  std::size_t top_trigrams = 10;

  SynthConfig synth;
  std::size_t synth_dim = 8;              // feature dimension for synthesized frames
  std::size_t synth_frames_per_token = 3;
  double synth_spread = 0.05;

  void validate() const;
};

// Reads a JSON config file into cfg; unknown keys are an error so typos
// fail loudly.
void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path);

// Applies TERMMINER_* environment overrides (e.g. TERMMINER_WINDOW_MS).
// The getter is injectable for tests.
void apply_env_overrides(PipelineConfig& cfg,
                         const std::function<const char*(const char*)>& getenv_fn);

// Each stage reads its inputs from cfg.output_dir (or the configured source
// paths), writes its artifacts there, and appends a run manifest listing
// parameters and content hashes. Stages throw IoError when an upstream
// artifact is missing.
void run_segment(const PipelineConfig& cfg);
void run_codebook(const PipelineConfig& cfg);
void run_transcribe(const PipelineConfig& cfg);
void run_mine(const PipelineConfig& cfg);
void run_cluster(const PipelineConfig& cfg);
void run_evaluate(const PipelineConfig& cfg);
void run_synth(const PipelineConfig& cfg);
void run_pipeline(const PipelineConfig& cfg);

}  // namespace termminer
