#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "termminer/io.hpp"
#include "termminer/pipeline.hpp"

namespace {

// exit codes: 0 success, 1 usage, 2 missing input, 3 internal invariant
constexpr int kUsageError = 1;
constexpr int kMissingInput = 2;
constexpr int kInternalError = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"termminer - discover recurring unit-sequence terms in untranscribed corpora"};
  app.require_subcommand(1);

  termminer::PipelineConfig cfg;
  std::string config_file;
  std::string traceback = "last-row";
  bool traceback_given = false;

  app.add_option("-c,--config", config_file, "JSON config file")->check(CLI::ExistingFile);

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-o,--output-dir", cfg.output_dir, "artifact directory");
  };

  CLI::App* seg = app.add_subcommand("segment", "merge boundaries and average segment features");
  add_common(seg);
  seg->add_option("--manifest", cfg.manifest, "corpus manifest JSON");
  seg->add_option("--boundaries-dir", cfg.boundaries_dir, "per-utterance boundary JSON dir");
  seg->add_option("--window-ms", cfg.window_ms, "boundary merge window in ms");

  CLI::App* cb = app.add_subcommand("codebook", "learn the unit inventory from segment features");
  add_common(cb);
  cb->add_option("--manifest", cfg.manifest, "corpus manifest JSON");
  cb->add_option("--k", cfg.codebook_k, "number of units");
  cb->add_option("--seed", cfg.seed, "RNG seed");
  cb->add_option("--max-iters", cfg.kmeans_max_iters, "k-means iteration cap");
  cb->add_option("--sample-cap", cfg.hac_sample_cap, "HAC subsample cap");

  CLI::App* tr = app.add_subcommand("transcribe", "label segments with codebook units");
  add_common(tr);
  tr->add_option("--manifest", cfg.manifest, "corpus manifest JSON");

  CLI::App* mine = app.add_subcommand("mine", "align all transcription pairs into a bag");
  add_common(mine);
  mine->add_option("--min-length", cfg.min_length, "shortest kept subsequence");
  mine->add_option("--match", cfg.scoring.match_score, "match score");
  mine->add_option("--mismatch", cfg.scoring.mismatch_score, "mismatch score");
  mine->add_option("--gap", cfg.scoring.gap_score, "gap score");
  mine->add_option("--traceback", traceback, "last-row or global")
      ->check(CLI::IsMember({"last-row", "last_row", "global"}))
      ->each([&](const std::string&) { traceback_given = true; });
  mine->add_option("--jobs", cfg.jobs, "worker threads (output is identical for any value)");

  CLI::App* cl = app.add_subcommand("cluster", "leader-cluster the bag into keyword clusters");
  cl->alias("cluster-keywords");
  add_common(cl);
  cl->add_option("--radius-T", cfg.mining.radius_t, "cluster radius T");
  cl->add_option("--sep-a", cfg.mining.sep_a, "centroid separation factor a");
  cl->add_option("--norm-b", cfg.mining.norm_b, "distance normalization scalar b");
  cl->add_option("--max-rounds", cfg.max_rounds, "round cap");

  CLI::App* ev = app.add_subcommand("evaluate", "score clusters against ground truth");
  add_common(ev);
  ev->add_option("--transcript", cfg.transcript, "reference transcript text file");
  ev->add_option("--stopword-file", cfg.stopword_file, "stopword list, one word per line");
  ev->add_option("--cluster-words", cfg.cluster_words, "cluster id -> word list JSON");
  ev->add_option("--top-unigrams", cfg.top_unigrams, "examined unigram count");
  ev->add_option("--top-bigrams", cfg.top_bigrams, "examined bigram count");
  ev->add_option("--top-trigrams", cfg.top_trigrams, "examined trigram count");

  CLI::App* sy = app.add_subcommand("synth", "generate a planted-keyword corpus");
  add_common(sy);
  sy->add_option("--synth-seed", cfg.synth.seed, "corpus seed");
  sy->add_option("--alphabet", cfg.synth.alphabet_size, "unit alphabet size");
  sy->add_option("--keywords", cfg.synth.num_keywords, "planted keyword count");
  sy->add_option("--utterances", cfg.synth.num_utterances, "utterance count");
  sy->add_option("--substitution-rate", cfg.synth.substitution_rate, "per-token substitution");
  sy->add_option("--insertion-rate", cfg.synth.insertion_rate, "per-token insertion");
  sy->add_option("--deletion-rate", cfg.synth.deletion_rate, "per-token deletion");

  CLI::App* pipe = app.add_subcommand("pipeline", "run every stage in order");
  add_common(pipe);
  pipe->add_option("--manifest", cfg.manifest, "corpus manifest JSON");
  pipe->add_option("--boundaries-dir", cfg.boundaries_dir, "per-utterance boundary JSON dir");
  pipe->add_option("--jobs", cfg.jobs, "worker threads for mining");
  pipe->add_option("--transcript", cfg.transcript, "reference transcript text file");

  // Precedence: defaults < config file < environment < flags. The parse
  // callback runs after options are read, so stash flag values, layer the
  // lower-precedence sources, then let CLI11's bindings win.
  termminer::PipelineConfig flag_defaults = cfg;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  try {
    // Re-layer: start from defaults, add config file and env, then re-parse
    // the command line so explicit flags override everything.
    cfg = flag_defaults;
    if (!config_file.empty()) termminer::apply_config_file(cfg, config_file);
    termminer::apply_env_overrides(cfg, [](const char* name) { return std::getenv(name); });
    try {
      app.clear();
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int rc = app.exit(e);
      return rc == 0 ? 0 : kUsageError;
    }
    if (traceback_given)
      cfg.traceback = traceback == "global" ? termminer::TracebackMode::global
                                            : termminer::TracebackMode::last_row;

    const std::string stage = app.get_subcommands().front()->get_name();
    if (stage == "segment")
      termminer::run_segment(cfg);
    else if (stage == "codebook")
      termminer::run_codebook(cfg);
    else if (stage == "transcribe")
      termminer::run_transcribe(cfg);
    else if (stage == "mine")
      termminer::run_mine(cfg);
    else if (stage == "cluster")
      termminer::run_cluster(cfg);
    else if (stage == "evaluate")
      termminer::run_evaluate(cfg);
    else if (stage == "synth")
      termminer::run_synth(cfg);
    else if (stage == "pipeline")
      termminer::run_pipeline(cfg);
    return 0;
  } catch (const termminer::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMissingInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
