#include "termminer/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "termminer/evaluation.hpp"
#include "termminer/leader_clustering.hpp"
#include "termminer/segmentation.hpp"

namespace termminer {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

double parse_double(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size())
    throw std::invalid_argument(key + " expects a number, got '" + value + "'");
  return v;
}

std::size_t parse_size(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    // stoull would wrap a negative value around instead of failing.
    if (!value.empty() && value.front() == '-') throw std::invalid_argument(key);
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != value.size())
    throw std::invalid_argument(key + " expects a non-negative integer, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

TracebackMode parse_traceback(const std::string& value) {
  if (value == "last-row" || value == "last_row") return TracebackMode::last_row;
  if (value == "global") return TracebackMode::global;
  throw std::invalid_argument("traceback must be 'last-row' or 'global', got '" + value + "'");
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& [key, _] : j.items())
    if (!known.count(key))
      throw std::invalid_argument("unknown config key '" + key + "' in " + where);
}

// Collected file hashes and parameters of one stage run; persisted without
// timestamps so reruns are byte-identical.
class RunManifest {
 public:
  RunManifest(std::string stage, fs::path out_dir)
      : stage_(std::move(stage)), out_dir_(std::move(out_dir)) {
    doc_["stage"] = stage_;
    doc_["parameters"] = json::object();
    doc_["inputs"] = json::object();
    doc_["outputs"] = json::object();
  }

  template <typename T>
  void param(const std::string& key, const T& value) {
    doc_["parameters"][key] = value;
  }

  void input(const fs::path& p) { doc_["inputs"][display(p)] = hash_hex(fnv1a64_file(p)); }
  void output(const fs::path& p) { doc_["outputs"][display(p)] = hash_hex(fnv1a64_file(p)); }

  void save() const {
    const fs::path path = out_dir_ / "manifests" / (stage_ + ".json");
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << doc_.dump(2) << "\n";
  }

 private:
  std::string display(const fs::path& p) const {
    const fs::path rel = p.lexically_proximate(out_dir_);
    const std::string s = rel.generic_string();
    if (!s.empty() && s.rfind("..", 0) != 0) return s;
    return p.generic_string();
  }

  std::string stage_;
  fs::path out_dir_;
  json doc_;
};

fs::path manifest_path(const PipelineConfig& cfg) {
  if (!cfg.manifest.empty()) return cfg.manifest;
  return cfg.output_dir / "manifest.json";
}

fs::path boundaries_dir(const PipelineConfig& cfg) {
  if (!cfg.boundaries_dir.empty()) return cfg.boundaries_dir;
  return cfg.output_dir / "boundaries";
}

// Feature paths in a manifest resolve against the manifest's directory.
fs::path resolve_features(const fs::path& manifest_file, const fs::path& features) {
  if (features.is_absolute()) return features;
  return manifest_file.parent_path() / features;
}

std::vector<std::string> load_stopword_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing input: " + path.string());
  std::vector<std::string> words;
  std::string word;
  while (in >> word) {
    for (char& ch : word)
      ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    words.push_back(word);
  }
  return words;
}

}  // namespace

void PipelineConfig::validate() const {
  if (window_ms <= 0.0) throw std::invalid_argument("window_ms must be positive");
  if (codebook_k < 2) throw std::invalid_argument("codebook k must be at least 2");
  if (kmeans_max_iters < 1) throw std::invalid_argument("kmeans max_iters must be at least 1");
  if (hac_sample_cap < 2) throw std::invalid_argument("hac_sample_cap must be at least 2");
  scoring.validate();
  if (min_length < 1) throw std::invalid_argument("min_length must be at least 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be at least 1");
  mining.validate();
  if (max_rounds < 1) throw std::invalid_argument("max_rounds must be at least 1");
  if (top_unigrams < 1 || top_bigrams < 1 || top_trigrams < 1)
    throw std::invalid_argument("evaluation top-N values must be at least 1");
  if (synth_dim < 1 || synth_frames_per_token < 1)
    throw std::invalid_argument("synth feature dimensions must be at least 1");
  if (synth_spread <= 0.0) throw std::invalid_argument("synth spread must be positive");
}

void apply_config_file(PipelineConfig& cfg, const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(load_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " +
                                e.what());
  }
  reject_unknown_keys(j,
                      {"manifest", "boundaries_dir", "output_dir", "transcript",
                       "stopword_file", "cluster_words", "window_ms", "codebook", "mining",
                       "clustering", "evaluation", "synth"},
                      "top level");

  if (j.contains("manifest")) cfg.manifest = j["manifest"].get<std::string>();
  if (j.contains("boundaries_dir")) cfg.boundaries_dir = j["boundaries_dir"].get<std::string>();
  if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  if (j.contains("transcript")) cfg.transcript = j["transcript"].get<std::string>();
  if (j.contains("stopword_file")) cfg.stopword_file = j["stopword_file"].get<std::string>();
  if (j.contains("cluster_words")) cfg.cluster_words = j["cluster_words"].get<std::string>();
  if (j.contains("window_ms")) cfg.window_ms = j["window_ms"].get<double>();

  if (j.contains("codebook")) {
    const json& c = j["codebook"];
    reject_unknown_keys(c, {"k", "seed", "max_iters", "hac_sample_cap"}, "codebook");
    if (c.contains("k")) cfg.codebook_k = c["k"].get<std::size_t>();
    if (c.contains("seed")) cfg.seed = c["seed"].get<std::uint64_t>();
    if (c.contains("max_iters")) cfg.kmeans_max_iters = c["max_iters"].get<std::size_t>();
    if (c.contains("hac_sample_cap"))
      cfg.hac_sample_cap = c["hac_sample_cap"].get<std::size_t>();
  }
  if (j.contains("mining")) {
    const json& m = j["mining"];
    reject_unknown_keys(m, {"match", "mismatch", "gap", "min_length", "traceback", "jobs"},
                        "mining");
    if (m.contains("match")) cfg.scoring.match_score = m["match"].get<double>();
    if (m.contains("mismatch")) cfg.scoring.mismatch_score = m["mismatch"].get<double>();
    if (m.contains("gap")) cfg.scoring.gap_score = m["gap"].get<double>();
    if (m.contains("min_length")) cfg.min_length = m["min_length"].get<int>();
    if (m.contains("traceback")) cfg.traceback = parse_traceback(m["traceback"].get<std::string>());
    if (m.contains("jobs")) cfg.jobs = m["jobs"].get<unsigned>();
  }
  if (j.contains("clustering")) {
    const json& c = j["clustering"];
    reject_unknown_keys(c, {"radius_T", "sep_a", "norm_b", "max_rounds"}, "clustering");
    if (c.contains("radius_T")) cfg.mining.radius_t = c["radius_T"].get<double>();
    if (c.contains("sep_a")) cfg.mining.sep_a = c["sep_a"].get<double>();
    if (c.contains("norm_b")) cfg.mining.norm_b = c["norm_b"].get<double>();
    if (c.contains("max_rounds")) cfg.max_rounds = c["max_rounds"].get<std::size_t>();
  }
  if (j.contains("evaluation")) {
    const json& e = j["evaluation"];
    reject_unknown_keys(e, {"top_unigrams", "top_bigrams", "top_trigrams"}, "evaluation");
    if (e.contains("top_unigrams")) cfg.top_unigrams = e["top_unigrams"].get<std::size_t>();
    if (e.contains("top_bigrams")) cfg.top_bigrams = e["top_bigrams"].get<std::size_t>();
    if (e.contains("top_trigrams")) cfg.top_trigrams = e["top_trigrams"].get<std::size_t>();
  }
  if (j.contains("synth")) {
    const json& s = j["synth"];
    reject_unknown_keys(s,
                        {"alphabet_size", "num_keywords", "min_keyword_length",
                         "max_keyword_length", "num_utterances", "min_utterance_length",
                         "max_utterance_length", "min_occurrences", "max_occurrences",
                         "substitution_rate", "insertion_rate", "deletion_rate",
                         "noise_filler", "seed", "dim", "frames_per_token", "spread"},
                        "synth");
    auto& sc = cfg.synth;
    if (s.contains("alphabet_size")) sc.alphabet_size = s["alphabet_size"].get<std::size_t>();
    if (s.contains("num_keywords")) sc.num_keywords = s["num_keywords"].get<std::size_t>();
    if (s.contains("min_keyword_length"))
      sc.min_keyword_length = s["min_keyword_length"].get<std::size_t>();
    if (s.contains("max_keyword_length"))
      sc.max_keyword_length = s["max_keyword_length"].get<std::size_t>();
    if (s.contains("num_utterances")) sc.num_utterances = s["num_utterances"].get<std::size_t>();
    if (s.contains("min_utterance_length"))
      sc.min_utterance_length = s["min_utterance_length"].get<std::size_t>();
    if (s.contains("max_utterance_length"))
      sc.max_utterance_length = s["max_utterance_length"].get<std::size_t>();
    if (s.contains("min_occurrences"))
      sc.min_occurrences = s["min_occurrences"].get<std::size_t>();
    if (s.contains("max_occurrences"))
      sc.max_occurrences = s["max_occurrences"].get<std::size_t>();
    if (s.contains("substitution_rate"))
      sc.substitution_rate = s["substitution_rate"].get<double>();
    if (s.contains("insertion_rate")) sc.insertion_rate = s["insertion_rate"].get<double>();
    if (s.contains("deletion_rate")) sc.deletion_rate = s["deletion_rate"].get<double>();
    if (s.contains("noise_filler")) sc.noise_filler = s["noise_filler"].get<bool>();
    if (s.contains("seed")) sc.seed = s["seed"].get<std::uint64_t>();
    if (s.contains("dim")) cfg.synth_dim = s["dim"].get<std::size_t>();
    if (s.contains("frames_per_token"))
      cfg.synth_frames_per_token = s["frames_per_token"].get<std::size_t>();
    if (s.contains("spread")) cfg.synth_spread = s["spread"].get<double>();
  }
}

void apply_env_overrides(PipelineConfig& cfg,
                         const std::function<const char*(const char*)>& getenv_fn) {
  auto get = [&](const char* name) -> std::optional<std::string> {
    const char* v = getenv_fn(name);
    if (!v) return std::nullopt;
    return std::string(v);
  };
  if (auto v = get("TERMMINER_MANIFEST")) cfg.manifest = *v;
  if (auto v = get("TERMMINER_BOUNDARIES_DIR")) cfg.boundaries_dir = *v;
  if (auto v = get("TERMMINER_OUTPUT_DIR")) cfg.output_dir = *v;
  if (auto v = get("TERMMINER_TRANSCRIPT")) cfg.transcript = *v;
  if (auto v = get("TERMMINER_STOPWORD_FILE")) cfg.stopword_file = *v;
  if (auto v = get("TERMMINER_CLUSTER_WORDS")) cfg.cluster_words = *v;
  if (auto v = get("TERMMINER_WINDOW_MS"))
    cfg.window_ms = parse_double("TERMMINER_WINDOW_MS", *v);
  if (auto v = get("TERMMINER_K")) cfg.codebook_k = parse_size("TERMMINER_K", *v);
  if (auto v = get("TERMMINER_SEED")) cfg.seed = parse_size("TERMMINER_SEED", *v);
  if (auto v = get("TERMMINER_MAX_ITERS"))
    cfg.kmeans_max_iters = parse_size("TERMMINER_MAX_ITERS", *v);
  if (auto v = get("TERMMINER_SAMPLE_CAP"))
    cfg.hac_sample_cap = parse_size("TERMMINER_SAMPLE_CAP", *v);
  if (auto v = get("TERMMINER_MATCH"))
    cfg.scoring.match_score = parse_double("TERMMINER_MATCH", *v);
  if (auto v = get("TERMMINER_MISMATCH"))
    cfg.scoring.mismatch_score = parse_double("TERMMINER_MISMATCH", *v);
  if (auto v = get("TERMMINER_GAP")) cfg.scoring.gap_score = parse_double("TERMMINER_GAP", *v);
  if (auto v = get("TERMMINER_MIN_LENGTH"))
    cfg.min_length = static_cast<int>(parse_size("TERMMINER_MIN_LENGTH", *v));
  if (auto v = get("TERMMINER_TRACEBACK")) cfg.traceback = parse_traceback(*v);
  if (auto v = get("TERMMINER_JOBS"))
    cfg.jobs = static_cast<unsigned>(parse_size("TERMMINER_JOBS", *v));
  if (auto v = get("TERMMINER_RADIUS_T"))
    cfg.mining.radius_t = parse_double("TERMMINER_RADIUS_T", *v);
  if (auto v = get("TERMMINER_SEP_A")) cfg.mining.sep_a = parse_double("TERMMINER_SEP_A", *v);
  if (auto v = get("TERMMINER_NORM_B"))
    cfg.mining.norm_b = parse_double("TERMMINER_NORM_B", *v);
  if (auto v = get("TERMMINER_MAX_ROUNDS"))
    cfg.max_rounds = parse_size("TERMMINER_MAX_ROUNDS", *v);
  if (auto v = get("TERMMINER_TOP_UNIGRAMS"))
    cfg.top_unigrams = parse_size("TERMMINER_TOP_UNIGRAMS", *v);
  if (auto v = get("TERMMINER_TOP_BIGRAMS"))
    cfg.top_bigrams = parse_size("TERMMINER_TOP_BIGRAMS", *v);
  if (auto v = get("TERMMINER_TOP_TRIGRAMS"))
    cfg.top_trigrams = parse_size("TERMMINER_TOP_TRIGRAMS", *v);
}

void run_segment(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path mpath = manifest_path(cfg);
  const CorpusManifest manifest = load_manifest(mpath);
  const fs::path bdir = boundaries_dir(cfg);

  RunManifest rm("segment", cfg.output_dir);
  rm.param("window_ms", cfg.window_ms);
  rm.input(mpath);

  for (const auto& [utt_id, entry] : manifest.entries) {
    const fs::path fpath = resolve_features(mpath, entry.features);
    const FrameMatrix fm = load_frame_matrix(utt_id, {fpath, entry.duration_ms,
                                                      entry.frame_period_ms});
    const fs::path bpath = bdir / (utt_id + ".json");
    const BoundaryHypothesisSet hyps = load_boundaries(bpath);
    if (hyps.utt_id != utt_id)
      throw IoError("boundary file " + bpath.string() + " names utterance '" + hyps.utt_id +
                    "'");
    rm.input(fpath);
    rm.input(bpath);

    SegmentationRecord rec;
    rec.utt_id = utt_id;
    bool any = false;
    for (const auto& h : hyps.hypotheses) any = any || !h.empty();
    if (any) rec.boundaries_ms = merge_boundaries(hyps, cfg.window_ms);
    rec.segments = segments_from_boundaries(rec.boundaries_ms, fm);

    const auto feats = segment_features(fm, rec.segments);
    std::vector<std::vector<double>> rows;
    rows.reserve(feats.size());
    for (const auto& f : feats) rows.push_back(f.vector);

    const fs::path rec_path = cfg.output_dir / "segments" / (utt_id + ".json");
    const fs::path feat_path = cfg.output_dir / "segments" / (utt_id + ".features.csv");
    save_segmentation(rec, rec_path);
    save_features_csv(rows, feat_path);
    rm.output(rec_path);
    rm.output(feat_path);
  }
  rm.save();
}

void run_codebook(const PipelineConfig& cfg) {
  cfg.validate();
  const CorpusManifest manifest = load_manifest(manifest_path(cfg));

  RunManifest rm("codebook", cfg.output_dir);
  rm.param("k", cfg.codebook_k);
  rm.param("seed", cfg.seed);
  rm.param("max_iters", cfg.kmeans_max_iters);
  rm.param("hac_sample_cap", cfg.hac_sample_cap);

  std::vector<std::vector<double>> pooled;
  for (const auto& [utt_id, entry] : manifest.entries) {
    const fs::path feat_path = cfg.output_dir / "segments" / (utt_id + ".features.csv");
    auto rows = load_features_csv(feat_path);
    rm.input(feat_path);
    for (auto& r : rows) pooled.push_back(std::move(r));
  }

  const Dendrogram dendro = hac_ward(pooled, cfg.hac_sample_cap, cfg.seed);
  const fs::path dpath = cfg.output_dir / "dendrogram.json";
  save_dendrogram(dendro, dpath);
  rm.output(dpath);

  const std::size_t kmax = std::min(dendro.leaf_count, std::max<std::size_t>(
                                                           2 * cfg.codebook_k, 10));
  auto ranked = suggest_k(dendro, kmax);
  if (ranked.size() > 10) ranked.resize(10);
  json sj = json::array();
  for (const auto& [k, gap] : ranked) sj.push_back(json{{"k", k}, {"height_gap", gap}});
  const fs::path spath = cfg.output_dir / "suggest_k.json";
  {
    std::ofstream out(spath, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + spath.string());
    out << sj.dump(2) << "\n";
  }
  rm.output(spath);

  const KmeansResult km = kmeans(pooled, cfg.codebook_k, cfg.seed,
                                 static_cast<int>(cfg.kmeans_max_iters));
  const fs::path cpath = cfg.output_dir / "codebook.json";
  save_codebook(km.codebook, cpath);
  rm.output(cpath);
  rm.save();
}

void run_transcribe(const PipelineConfig& cfg) {
  cfg.validate();
  const CorpusManifest manifest = load_manifest(manifest_path(cfg));
  const fs::path cbpath = cfg.output_dir / "codebook.json";
  const Codebook codebook = load_codebook(cbpath);

  RunManifest rm("transcribe", cfg.output_dir);
  rm.input(cbpath);

  std::vector<UnitSequence> seqs;
  for (const auto& [utt_id, entry] : manifest.entries) {
    const fs::path rec_path = cfg.output_dir / "segments" / (utt_id + ".json");
    const fs::path feat_path = cfg.output_dir / "segments" / (utt_id + ".features.csv");
    const SegmentationRecord rec = load_segmentation(rec_path);
    const auto rows = load_features_csv(feat_path);
    if (rows.size() != rec.segments.size())
      throw IoError("segment record and features disagree for " + utt_id);
    rm.input(rec_path);
    rm.input(feat_path);

    std::vector<SegmentFeature> feats;
    feats.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
      feats.push_back(SegmentFeature{utt_id, rec.segments[i], rows[i]});
    seqs.push_back(transcribe(codebook, feats));
  }
  const fs::path tpath = cfg.output_dir / "transcriptions.jsonl";
  save_transcriptions(seqs, tpath);
  rm.output(tpath);
  rm.save();
}

void run_mine(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path tpath = cfg.output_dir / "transcriptions.jsonl";
  const auto corpus = load_transcriptions(tpath);

  RunManifest rm("mine", cfg.output_dir);
  rm.param("match", cfg.scoring.match_score);
  rm.param("mismatch", cfg.scoring.mismatch_score);
  rm.param("gap", cfg.scoring.gap_score);
  rm.param("min_length", cfg.min_length);
  rm.param("traceback",
           cfg.traceback == TracebackMode::last_row ? "last-row" : "global");
  // jobs is deliberately not recorded: worker count must never show in output
  rm.input(tpath);

  const SubsequenceBag bag =
      mine_pairs(corpus, cfg.scoring, cfg.min_length, cfg.traceback, cfg.jobs);
  const fs::path bpath = cfg.output_dir / "bag.jsonl";
  save_bag(bag, bpath);
  rm.output(bpath);
  rm.save();
}

void run_cluster(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path bpath = cfg.output_dir / "bag.jsonl";
  const SubsequenceBag bag = load_bag(bpath);

  RunManifest rm("cluster", cfg.output_dir);
  rm.param("radius_T", cfg.mining.radius_t);
  rm.param("sep_a", cfg.mining.sep_a);
  rm.param("norm_b", cfg.mining.norm_b);
  rm.param("max_rounds", cfg.max_rounds);
  rm.input(bpath);

  ClusteringResult result;  // an empty bag legitimately yields zero clusters
  if (!bag.entries.empty()) result = leader_cluster(bag, cfg.mining, cfg.max_rounds);

  const fs::path cpath = cfg.output_dir / "clusters.json";
  save_clusters(bag, result, cpath);
  rm.output(cpath);

  json report;
  for (const auto& [name, order] :
       {std::pair{"by_size", ReportOrder::size},
        std::pair{"by_centroid_length", ReportOrder::centroid_length}}) {
    json list = json::array();
    for (const auto& s : cluster_report(bag, result, 10, order)) {
      json e;
      e["cluster_id"] = s.cluster_id;
      e["size"] = s.size;
      e["centroid_units"] = s.medoid_units;
      e["utterances"] = s.utterances;
      list.push_back(std::move(e));
    }
    report[name] = std::move(list);
  }
  const fs::path rpath = cfg.output_dir / "cluster_report.json";
  {
    std::ofstream out(rpath, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + rpath.string());
    out << report.dump(2) << "\n";
  }
  rm.output(rpath);
  rm.save();
}

void run_evaluate(const PipelineConfig& cfg) {
  cfg.validate();
  const fs::path bpath = cfg.output_dir / "bag.jsonl";
  const fs::path cpath = cfg.output_dir / "clusters.json";
  const SubsequenceBag bag = load_bag(bpath);
  const ClusteringResult result = load_clusters(cpath);

  RunManifest rm("evaluate", cfg.output_dir);
  rm.input(bpath);
  rm.input(cpath);

  const fs::path gtpath = cfg.output_dir / "ground_truth.json";
  const bool have_truth = fs::exists(gtpath);
  const bool have_transcript = !cfg.transcript.empty();
  if (!have_truth && !have_transcript)
    throw IoError("nothing to evaluate: no " + gtpath.string() + " and no transcript");

  std::set<std::string> stopwords = default_stopwords();
  if (!cfg.stopword_file.empty()) {
    const auto words = load_stopword_file(cfg.stopword_file);
    stopwords = std::set<std::string>(words.begin(), words.end());
    rm.input(cfg.stopword_file);
  }

  PurityReport purity;
  if (have_truth) {
    const GroundTruth truth = load_ground_truth(gtpath);
    rm.input(gtpath);
    purity = cluster_purity(bag, result, truth);
    const fs::path pj = cfg.output_dir / "purity.json";
    const fs::path pc = cfg.output_dir / "purity.csv";
    save_purity_report(purity, pj);
    save_purity_csv(purity, pc);
    rm.output(pj);
    rm.output(pc);
  }

  if (have_transcript) {
    rm.input(cfg.transcript);
    const auto tokens = tokenize_transcript(load_text(cfg.transcript));

    // Cluster word labels: an explicit mapping file wins; otherwise fall
    // back to the dominant purity labels.
    std::vector<std::vector<std::string>> cluster_words(result.clusters.size());
    if (!cfg.cluster_words.empty()) {
      rm.input(cfg.cluster_words);
      json j;
      try {
        j = json::parse(load_text(cfg.cluster_words));
        for (const auto& [key, words] : j.items()) {
          const std::size_t id = parse_size("cluster id", key);
          if (id >= cluster_words.size())
            throw std::invalid_argument("cluster id " + key + " out of range");
          cluster_words[id] = words.get<std::vector<std::string>>();
        }
      } catch (const nlohmann::json::exception& e) {
        throw IoError("bad cluster words file " + cfg.cluster_words.string() + ": " +
                      e.what());
      }
    } else if (have_truth) {
      for (const auto& cp : purity.clusters)
        if (cp.dominant_label != "filler")
          cluster_words[cp.cluster_id] = {cp.dominant_label};
    }

    json cj;
    std::size_t matched = 0;
    std::size_t examined = 0;
    const std::pair<std::size_t, std::size_t> orders[] = {
        {3, cfg.top_trigrams}, {2, cfg.top_bigrams}, {1, cfg.top_unigrams}};
    std::string csv = "order,ngram,count,verdict\n";
    for (const auto& [n, top] : orders) {
      auto ranked = ngram_counts(tokens, n, stopwords);
      if (ranked.size() > top) ranked.resize(top);
      const CoverageReport report = coverage_match(ranked, cluster_words, stopwords);
      matched += report.matches + report.partial_matches;
      examined += report.verdicts.size();

      const char* key = n == 3 ? "trigrams" : n == 2 ? "bigrams" : "unigrams";
      json sub;
      json verdicts = json::array();
      for (const auto& nv : report.verdicts) {
        json e;
        e["ngram"] = nv.ngram.words;
        e["count"] = nv.ngram.count;
        switch (nv.verdict) {
          case MatchVerdict::match: e["verdict"] = "match"; break;
          case MatchVerdict::partial_match: e["verdict"] = "partial-match-counted"; break;
          case MatchVerdict::mismatch: e["verdict"] = "mismatch"; break;
          case MatchVerdict::uncovered: e["verdict"] = "uncovered"; break;
        }
        verdicts.push_back(std::move(e));
        std::string phrase;
        for (std::size_t i = 0; i < nv.ngram.words.size(); ++i) {
          if (i) phrase += ' ';
          phrase += nv.ngram.words[i];
        }
        csv += std::to_string(n) + "," + phrase + "," + std::to_string(nv.ngram.count) +
               "," + std::string(verdicts.back()["verdict"].get<std::string>()) + "\n";
      }
      sub["verdicts"] = std::move(verdicts);
      sub["rate"] = report.rate;
      cj[key] = std::move(sub);
    }
    cj["overall_rate"] =
        examined ? static_cast<double>(matched) / static_cast<double>(examined) : 0.0;
    const fs::path covj = cfg.output_dir / "coverage.json";
    const fs::path covc = cfg.output_dir / "coverage.csv";
    {
      std::ofstream out(covj, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + covj.string());
      out << cj.dump(2) << "\n";
    }
    save_text(csv, covc);
    rm.output(covj);
    rm.output(covc);
  }
  rm.save();
}

void run_synth(const PipelineConfig& cfg) {
  cfg.validate();
  cfg.synth.validate();
  const SynthCorpus corpus = generate_corpus(cfg.synth);
  const SynthFrames frames = synthesize_frames(corpus, cfg.synth_dim,
                                               cfg.synth_frames_per_token, cfg.synth_spread,
                                               cfg.synth.seed + 1);

  RunManifest rm("synth", cfg.output_dir);
  rm.param("alphabet_size", cfg.synth.alphabet_size);
  rm.param("num_keywords", cfg.synth.num_keywords);
  rm.param("num_utterances", cfg.synth.num_utterances);
  rm.param("substitution_rate", cfg.synth.substitution_rate);
  rm.param("insertion_rate", cfg.synth.insertion_rate);
  rm.param("deletion_rate", cfg.synth.deletion_rate);
  rm.param("seed", cfg.synth.seed);
  rm.param("dim", cfg.synth_dim);
  rm.param("frames_per_token", cfg.synth_frames_per_token);
  rm.param("spread", cfg.synth_spread);

  CorpusManifest manifest;
  std::vector<UnitSequence> reference;
  for (std::size_t u = 0; u < corpus.utterances.size(); ++u) {
    const auto& utt = corpus.utterances[u];
    const auto& fm = frames.frames[u];

    const fs::path fpath = cfg.output_dir / "features" / (utt.utt_id + ".csv");
    save_features_csv(fm.frames, fpath);
    rm.output(fpath);

    const fs::path bpath = cfg.output_dir / "boundaries" / (utt.utt_id + ".json");
    save_boundaries(frames.boundaries[u], bpath);
    rm.output(bpath);

    ManifestEntry entry;
    entry.features = fs::path("features") / (utt.utt_id + ".csv");
    entry.duration_ms = fm.duration_ms();
    entry.frame_period_ms = fm.frame_period_ms;
    manifest.entries.emplace(utt.utt_id, std::move(entry));

    // reference transcription with frame-level token spans
    UnitSequence ref;
    ref.utt_id = utt.utt_id;
    ref.units = utt.units;
    ref.spans.reserve(utt.units.size());
    for (std::size_t t = 0; t < utt.units.size(); ++t)
      ref.spans.push_back(Segment{t * cfg.synth_frames_per_token,
                                  (t + 1) * cfg.synth_frames_per_token});
    reference.push_back(std::move(ref));
  }

  const fs::path mpath = cfg.output_dir / "manifest.json";
  save_manifest(manifest, mpath);
  rm.output(mpath);

  const fs::path gpath = cfg.output_dir / "ground_truth.json";
  save_ground_truth(corpus.truth, gpath);
  rm.output(gpath);

  const fs::path rpath = cfg.output_dir / "reference_transcriptions.jsonl";
  save_transcriptions(reference, rpath);
  rm.output(rpath);
  rm.save();
}

void run_pipeline(const PipelineConfig& cfg) {
  run_segment(cfg);
  run_codebook(cfg);
  run_transcribe(cfg);
  run_mine(cfg);
  run_cluster(cfg);
  const bool have_truth = fs::exists(cfg.output_dir / "ground_truth.json");
  if (have_truth || !cfg.transcript.empty()) run_evaluate(cfg);
}

}  // namespace termminer
