#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>

#include "termminer/io.hpp"
#include "termminer/pipeline.hpp"

using namespace termminer;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory per test case, removed on destruction.
struct TempDir {
  fs::path path;

  TempDir() {
    path = fs::temp_directory_path() /
           ("termminer_pipeline_test_" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }

  static std::size_t& counter() {
    static std::size_t c = 0;
    return c;
  }
};

// A corpus small enough that the whole pipeline runs in well under a second.
PipelineConfig small_config(const fs::path& out) {
  PipelineConfig cfg;
  cfg.output_dir = out;
  cfg.codebook_k = 12;
  cfg.synth.alphabet_size = 12;
  cfg.synth.num_keywords = 2;
  cfg.synth.min_keyword_length = 5;
  cfg.synth.max_keyword_length = 5;
  cfg.synth.num_utterances = 8;
  cfg.synth.min_utterance_length = 10;
  cfg.synth.max_utterance_length = 14;
  cfg.synth.min_occurrences = 1;
  cfg.synth.max_occurrences = 2;
  cfg.synth.substitution_rate = 0.0;
  cfg.synth.insertion_rate = 0.0;
  cfg.synth.deletion_rate = 0.0;
  cfg.synth.seed = 7;
  cfg.synth_dim = 4;
  return cfg;
}

// Content hash of every regular file under root, keyed by relative path.
std::map<std::string, std::uint64_t> hash_tree(const fs::path& root) {
  std::map<std::string, std::uint64_t> hashes;
  for (const auto& entry : fs::recursive_directory_iterator(root)) {
    if (!entry.is_regular_file()) continue;
    const std::string rel = entry.path().lexically_relative(root).generic_string();
    hashes[rel] = fnv1a64_file(entry.path());
  }
  return hashes;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out);
  out << text;
}

// getenv stand-in backed by a map; values must outlive the call.
struct FakeEnv {
  std::map<std::string, std::string> vars;

  std::function<const char*(const char*)> fn() const {
    return [this](const char* name) -> const char* {
      auto it = vars.find(name);
      return it == vars.end() ? nullptr : it->second.c_str();
    };
  }
};

}  // namespace

TEST_CASE("pipeline config validation rejects bad values") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());

  PipelineConfig bad = cfg;
  bad.window_ms = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.codebook_k = 1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.jobs = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.min_length = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.mining.radius_t = -1.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.top_bigrams = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  bad = cfg;
  bad.synth_spread = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("config file sets every section") {
  TempDir tmp;
  const fs::path path = tmp.path / "config.json";
  write_file(path, R"({
    "manifest": "corpus/manifest.json",
    "window_ms": 15.5,
    "codebook": {"k": 33, "seed": 9, "max_iters": 17, "hac_sample_cap": 500},
    "mining": {"match": 2.0, "mismatch": -3.0, "gap": -0.5,
               "min_length": 6, "traceback": "global", "jobs": 3},
    "clustering": {"radius_T": 1.1, "sep_a": 2.0, "norm_b": 5.0, "max_rounds": 7},
    "evaluation": {"top_unigrams": 5, "top_bigrams": 4, "top_trigrams": 3},
    "synth": {"alphabet_size": 20, "num_keywords": 3, "seed": 42,
              "substitution_rate": 0.25, "dim": 6, "spread": 0.2}
  })");

  PipelineConfig cfg;
  apply_config_file(cfg, path);
  CHECK(cfg.manifest == fs::path("corpus/manifest.json"));
  CHECK(cfg.window_ms == 15.5);
  CHECK(cfg.codebook_k == 33);
  CHECK(cfg.seed == 9);
  CHECK(cfg.kmeans_max_iters == 17);
  CHECK(cfg.hac_sample_cap == 500);
  CHECK(cfg.scoring.match_score == 2.0);
  CHECK(cfg.scoring.mismatch_score == -3.0);
  CHECK(cfg.scoring.gap_score == -0.5);
  CHECK(cfg.min_length == 6);
  CHECK(cfg.traceback == TracebackMode::global);
  CHECK(cfg.jobs == 3);
  CHECK(cfg.mining.radius_t == 1.1);
  CHECK(cfg.mining.sep_a == 2.0);
  CHECK(cfg.mining.norm_b == 5.0);
  CHECK(cfg.max_rounds == 7);
  CHECK(cfg.top_unigrams == 5);
  CHECK(cfg.top_bigrams == 4);
  CHECK(cfg.top_trigrams == 3);
  CHECK(cfg.synth.alphabet_size == 20);
  CHECK(cfg.synth.num_keywords == 3);
  CHECK(cfg.synth.seed == 42);
  CHECK(cfg.synth.substitution_rate == 0.25);
  CHECK(cfg.synth_dim == 6);
  CHECK(cfg.synth_spread == 0.2);

  // Untouched fields keep their defaults.
  CHECK(cfg.output_dir == fs::path("out"));
  CHECK(cfg.synth.num_utterances == PipelineConfig().synth.num_utterances);
}

TEST_CASE("config file rejects unknown keys and bad JSON") {
  TempDir tmp;
  PipelineConfig cfg;

  const fs::path top = tmp.path / "top.json";
  write_file(top, R"({"window_mss": 10.0})");
  CHECK_THROWS_AS(apply_config_file(cfg, top), std::invalid_argument);

  const fs::path nested = tmp.path / "nested.json";
  write_file(nested, R"({"mining": {"matches": 2.0}})");
  CHECK_THROWS_AS(apply_config_file(cfg, nested), std::invalid_argument);

  const fs::path broken = tmp.path / "broken.json";
  write_file(broken, "{not json");
  CHECK_THROWS_AS(apply_config_file(cfg, broken), std::invalid_argument);

  CHECK_THROWS_AS(apply_config_file(cfg, tmp.path / "absent.json"), IoError);
}

TEST_CASE("environment overrides apply on top of config values") {
  PipelineConfig cfg;
  cfg.window_ms = 15.0;  // pretend this came from a config file

  FakeEnv env;
  env.vars["TERMMINER_WINDOW_MS"] = "25.0";
  env.vars["TERMMINER_K"] = "9";
  env.vars["TERMMINER_TRACEBACK"] = "global";
  env.vars["TERMMINER_JOBS"] = "5";
  env.vars["TERMMINER_RADIUS_T"] = "0.9";
  env.vars["TERMMINER_OUTPUT_DIR"] = "elsewhere";
  apply_env_overrides(cfg, env.fn());

  CHECK(cfg.window_ms == 25.0);
  CHECK(cfg.codebook_k == 9);
  CHECK(cfg.traceback == TracebackMode::global);
  CHECK(cfg.jobs == 5);
  CHECK(cfg.mining.radius_t == 0.9);
  CHECK(cfg.output_dir == fs::path("elsewhere"));
  // Variables that are unset leave the current value alone.
  CHECK(cfg.seed == 0);
  CHECK(cfg.min_length == 4);

  FakeEnv junk;
  junk.vars["TERMMINER_WINDOW_MS"] = "fast";
  CHECK_THROWS_AS(apply_env_overrides(cfg, junk.fn()), std::invalid_argument);

  FakeEnv junk2;
  junk2.vars["TERMMINER_K"] = "-3";
  CHECK_THROWS_AS(apply_env_overrides(cfg, junk2.fn()), std::invalid_argument);
}

TEST_CASE("synth stage writes a loadable corpus") {
  TempDir tmp;
  PipelineConfig cfg = small_config(tmp.path / "out");
  run_synth(cfg);

  const fs::path out = cfg.output_dir;
  REQUIRE(fs::exists(out / "manifest.json"));
  REQUIRE(fs::exists(out / "ground_truth.json"));
  REQUIRE(fs::exists(out / "reference_transcriptions.jsonl"));
  REQUIRE(fs::exists(out / "manifests" / "synth.json"));

  const CorpusManifest manifest = load_manifest(out / "manifest.json");
  REQUIRE(manifest.entries.size() == 8);
  const GroundTruth truth = load_ground_truth(out / "ground_truth.json");
  CHECK(truth.keywords.size() == 2);

  for (const auto& [utt_id, entry] : manifest.entries) {
    const FrameMatrix frames = load_frame_matrix(utt_id, {
        (out / entry.features).string(), entry.duration_ms, entry.frame_period_ms});
    frames.validate();
    CHECK(frames.dim() == 4);
    // Three frames per token, so the frame count is a multiple of three.
    CHECK(frames.frames.size() % 3 == 0);
    CHECK(fs::exists(out / "boundaries" / (utt_id + ".json")));
  }

  const auto refs = load_transcriptions(out / "reference_transcriptions.jsonl");
  CHECK(refs.size() == 8);
}

TEST_CASE("full pipeline produces every stage artifact") {
  TempDir tmp;
  PipelineConfig cfg = small_config(tmp.path / "out");
  run_synth(cfg);
  run_pipeline(cfg);

  const fs::path out = cfg.output_dir;
  REQUIRE(fs::exists(out / "codebook.json"));
  REQUIRE(fs::exists(out / "dendrogram.json"));
  REQUIRE(fs::exists(out / "suggest_k.json"));
  REQUIRE(fs::exists(out / "transcriptions.jsonl"));
  REQUIRE(fs::exists(out / "bag.jsonl"));
  REQUIRE(fs::exists(out / "clusters.json"));
  // Ground truth is present, so evaluation runs as part of the pipeline.
  REQUIRE(fs::exists(out / "purity.json"));
  REQUIRE(fs::exists(out / "purity.csv"));
  for (const char* stage :
       {"segment", "codebook", "transcribe", "mine", "cluster", "evaluate"}) {
    CHECK(fs::exists(out / "manifests" / (std::string(stage) + ".json")));
  }

  const Codebook codebook = load_codebook(out / "codebook.json");
  CHECK(codebook.centroids.size() == 12);
  CHECK(codebook.dim == 4);

  // One transcription per utterance, each as long as its segment count.
  const auto transcripts = load_transcriptions(out / "transcriptions.jsonl");
  REQUIRE(transcripts.size() == 8);
  for (const auto& seq : transcripts) {
    const SegmentationRecord rec =
        load_segmentation(out / "segments" / (seq.utt_id + ".json"));
    CHECK(seq.units.size() == rec.segments.size());
    for (const int u : seq.units) {
      CHECK(u >= 0);
      CHECK(u < 12);
    }
  }

  // Zero noise and well separated blobs: matches should exist and cluster.
  const SubsequenceBag bag = load_bag(out / "bag.jsonl");
  CHECK(!bag.entries.empty());
  const ClusteringResult clusters = load_clusters(out / "clusters.json");
  CHECK(!clusters.clusters.empty());
}

TEST_CASE("pipeline reruns are byte-identical and ignore the job count") {
  TempDir tmp;
  PipelineConfig a = small_config(tmp.path / "a");
  PipelineConfig b = small_config(tmp.path / "b");
  b.jobs = 4;

  run_synth(a);
  run_pipeline(a);
  run_synth(b);
  run_pipeline(b);

  const auto ha = hash_tree(a.output_dir);
  const auto hb = hash_tree(b.output_dir);
  REQUIRE(!ha.empty());
  CHECK(ha == hb);
}

TEST_CASE("rerunning one stage leaves upstream artifacts untouched") {
  TempDir tmp;
  PipelineConfig cfg = small_config(tmp.path / "out");
  run_synth(cfg);
  run_pipeline(cfg);

  const std::uint64_t bag_before = fnv1a64_file(cfg.output_dir / "bag.jsonl");
  const std::uint64_t segments_before =
      fnv1a64_file(cfg.output_dir / "transcriptions.jsonl");

  PipelineConfig loose = cfg;
  loose.mining.radius_t = 2.5;
  loose.mining.sep_a = 1.2;
  run_cluster(loose);

  CHECK(fnv1a64_file(cfg.output_dir / "bag.jsonl") == bag_before);
  CHECK(fnv1a64_file(cfg.output_dir / "transcriptions.jsonl") == segments_before);
  CHECK(fs::exists(cfg.output_dir / "clusters.json"));
}

TEST_CASE("stages report missing upstream artifacts as IoError") {
  TempDir tmp;
  PipelineConfig cfg = small_config(tmp.path / "empty");
  fs::create_directories(cfg.output_dir);

  CHECK_THROWS_AS(run_segment(cfg), IoError);
  CHECK_THROWS_AS(run_codebook(cfg), IoError);
  CHECK_THROWS_AS(run_transcribe(cfg), IoError);
  CHECK_THROWS_AS(run_mine(cfg), IoError);
  CHECK_THROWS_AS(run_cluster(cfg), IoError);
  CHECK_THROWS_AS(run_evaluate(cfg), IoError);
}
