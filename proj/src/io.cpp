#include "termminer/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace termminer {

namespace {

using json = nlohmann::ordered_json;

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing input: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_all(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("short write to " + path.string());
}

json parse(const std::filesystem::path& path) {
  try {
    return json::parse(read_all(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void dump(const json& j, const std::filesystem::path& path) {
  write_all(path, j.dump(2) + "\n");
}

json span_to_json(const TokenSpan& s) { return json::array({s.begin, s.end}); }
json segment_to_json(const Segment& s) { return json::array({s.begin, s.end}); }

TokenSpan span_from_json(const json& j) {
  return TokenSpan{j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

Segment segment_from_json(const json& j) {
  return Segment{j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

json entry_to_json(const BagEntry& e) {
  json j;
  j["units"] = e.units;
  j["source_utt"] = e.source_utt;
  j["source_span"] = span_to_json(e.source_span);
  j["pair_utt"] = e.pair_utt;
  j["pair_span"] = span_to_json(e.pair_span);
  j["score"] = e.score;
  return j;
}

BagEntry entry_from_json(const json& j) {
  BagEntry e;
  e.units = j.at("units").get<std::vector<int>>();
  e.source_utt = j.at("source_utt").get<std::string>();
  e.source_span = span_from_json(j.at("source_span"));
  e.pair_utt = j.at("pair_utt").get<std::string>();
  e.pair_span = span_from_json(j.at("pair_span"));
  e.score = j.at("score").get<double>();
  return e;
}

// %.17g round-trips doubles exactly and prints the same bytes on every run.
std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CorpusManifest load_manifest(const std::filesystem::path& path) {
  const json j = parse(path);
  CorpusManifest manifest;
  try {
    for (const auto& [utt_id, val] : j.items()) {
      ManifestEntry entry;
      entry.features = val.at("features").get<std::string>();
      entry.duration_ms = val.at("duration_ms").get<double>();
      entry.frame_period_ms = val.value("frame_period_ms", 10.0);
      manifest.entries.emplace(utt_id, std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad manifest " + path.string() + ": " + e.what());
  }
  return manifest;
}

void save_manifest(const CorpusManifest& manifest, const std::filesystem::path& path) {
  json j = json::object();
  for (const auto& [utt_id, entry] : manifest.entries) {
    json e;
    e["features"] = entry.features.generic_string();
    e["duration_ms"] = entry.duration_ms;
    e["frame_period_ms"] = entry.frame_period_ms;
    j[utt_id] = std::move(e);
  }
  dump(j, path);
}

std::vector<std::vector<double>> load_features_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing input: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw IoError("bad number in " + path.string() + " line " + std::to_string(lineno));
      }
    }
    if (row.empty())
      throw IoError("empty row in " + path.string() + " line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw IoError("no frames in " + path.string());
  return rows;
}

void save_features_csv(const std::vector<std::vector<double>>& frames,
                       const std::filesystem::path& path) {
  std::string out;
  for (const auto& row : frames) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += format_double(row[i]);
    }
    out += '\n';
  }
  write_all(path, out);
}

FrameMatrix load_frame_matrix(const std::string& utt_id, const ManifestEntry& entry) {
  FrameMatrix fm;
  fm.utt_id = utt_id;
  fm.frame_period_ms = entry.frame_period_ms;
  fm.frames = load_features_csv(entry.features);
  fm.validate();
  return fm;
}

BoundaryHypothesisSet load_boundaries(const std::filesystem::path& path) {
  const json j = parse(path);
  BoundaryHypothesisSet hyps;
  try {
    hyps.utt_id = j.at("utt_id").get<std::string>();
    hyps.hypotheses = j.at("hypotheses").get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad boundary file " + path.string() + ": " + e.what());
  }
  return hyps;
}

void save_boundaries(const BoundaryHypothesisSet& hyps, const std::filesystem::path& path) {
  json j;
  j["utt_id"] = hyps.utt_id;
  j["hypotheses"] = hyps.hypotheses;
  dump(j, path);
}

SegmentationRecord load_segmentation(const std::filesystem::path& path) {
  const json j = parse(path);
  SegmentationRecord rec;
  try {
    rec.utt_id = j.at("utt_id").get<std::string>();
    rec.boundaries_ms = j.at("boundaries_ms").get<std::vector<double>>();
    for (const auto& s : j.at("segments")) rec.segments.push_back(segment_from_json(s));
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad segmentation file " + path.string() + ": " + e.what());
  }
  return rec;
}

void save_segmentation(const SegmentationRecord& record, const std::filesystem::path& path) {
  json j;
  j["utt_id"] = record.utt_id;
  j["boundaries_ms"] = record.boundaries_ms;
  json segs = json::array();
  for (const auto& s : record.segments) segs.push_back(segment_to_json(s));
  j["segments"] = std::move(segs);
  dump(j, path);
}

Codebook load_codebook(const std::filesystem::path& path) {
  const json j = parse(path);
  Codebook cb;
  try {
    cb.dim = j.at("dim").get<std::size_t>();
    cb.centroids = j.at("centroids").get<std::vector<std::vector<double>>>();
    if (j.at("size").get<std::size_t>() != cb.centroids.size())
      throw IoError("codebook size field disagrees with centroid count in " + path.string());
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad codebook " + path.string() + ": " + e.what());
  }
  cb.validate();
  return cb;
}

void save_codebook(const Codebook& codebook, const std::filesystem::path& path) {
  codebook.validate();
  json j;
  j["dim"] = codebook.dim;
  j["size"] = codebook.size();
  j["centroids"] = codebook.centroids;
  dump(j, path);
}

void save_dendrogram(const Dendrogram& d, const std::filesystem::path& path) {
  d.validate();
  json j;
  j["leaf_count"] = d.leaf_count;
  json merges = json::array();
  for (const auto& m : d.merges) {
    json e;
    e["cluster_a"] = m.cluster_a;
    e["cluster_b"] = m.cluster_b;
    e["height"] = m.height;
    e["size"] = m.size;
    merges.push_back(std::move(e));
  }
  j["merges"] = std::move(merges);
  dump(j, path);
}

Dendrogram load_dendrogram(const std::filesystem::path& path) {
  const json j = parse(path);
  Dendrogram d;
  try {
    d.leaf_count = j.at("leaf_count").get<std::size_t>();
    for (const auto& e : j.at("merges"))
      d.merges.push_back(Dendrogram::Merge{
          e.at("cluster_a").get<std::size_t>(), e.at("cluster_b").get<std::size_t>(),
          e.at("height").get<double>(), e.at("size").get<std::size_t>()});
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad dendrogram " + path.string() + ": " + e.what());
  }
  d.validate();
  return d;
}

std::vector<UnitSequence> load_transcriptions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing input: " + path.string());
  std::vector<UnitSequence> seqs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      UnitSequence seq;
      seq.utt_id = j.at("utt_id").get<std::string>();
      seq.units = j.at("units").get<std::vector<int>>();
      for (const auto& s : j.at("spans")) seq.spans.push_back(segment_from_json(s));
      seq.validate();
      seqs.push_back(std::move(seq));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("bad transcription line " + std::to_string(lineno) + " in " +
                    path.string() + ": " + e.what());
    }
  }
  return seqs;
}

void save_transcriptions(const std::vector<UnitSequence>& seqs,
                         const std::filesystem::path& path) {
  std::string out;
  for (const auto& seq : seqs) {
    json j;
    j["utt_id"] = seq.utt_id;
    j["units"] = seq.units;
    json spans = json::array();
    for (const auto& s : seq.spans) spans.push_back(segment_to_json(s));
    j["spans"] = std::move(spans);
    out += j.dump();
    out += '\n';
  }
  write_all(path, out);
}

SubsequenceBag load_bag(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("missing input: " + path.string());
  SubsequenceBag bag;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      bag.entries.push_back(entry_from_json(json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw IoError("bad bag line " + std::to_string(lineno) + " in " + path.string() +
                    ": " + e.what());
    }
  }
  return bag;
}

void save_bag(const SubsequenceBag& bag, const std::filesystem::path& path) {
  std::string out;
  for (const auto& e : bag.entries) {
    out += entry_to_json(e).dump();
    out += '\n';
  }
  write_all(path, out);
}

void save_clusters(const SubsequenceBag& bag, const ClusteringResult& result,
                   const std::filesystem::path& path) {
  json j;
  j["rounds"] = result.rounds;
  json clusters = json::array();
  for (std::size_t c = 0; c < result.clusters.size(); ++c) {
    const KeywordCluster& cluster = result.clusters[c];
    json e;
    e["cluster_id"] = c;
    e["centroid_units"] = bag.entries[cluster.medoid_id].units;
    e["medoid"] = cluster.medoid_id;
    e["member_count"] = cluster.member_ids.size();
    e["total_intra_distance"] = cluster.total_intra_distance;
    json members = json::array();
    for (const std::size_t idx : cluster.member_ids) {
      json m;
      m["entry"] = idx;
      m["units"] = bag.entries[idx].units;
      m["source_utt"] = bag.entries[idx].source_utt;
      m["source_span"] = span_to_json(bag.entries[idx].source_span);
      members.push_back(std::move(m));
    }
    e["members"] = std::move(members);
    clusters.push_back(std::move(e));
  }
  j["clusters"] = std::move(clusters);
  j["unassigned"] = result.unassigned;
  dump(j, path);
}

ClusteringResult load_clusters(const std::filesystem::path& path) {
  const json j = parse(path);
  ClusteringResult result;
  try {
    result.rounds = j.at("rounds").get<std::size_t>();
    for (const auto& e : j.at("clusters")) {
      KeywordCluster cluster;
      cluster.medoid_id = e.at("medoid").get<std::size_t>();
      cluster.total_intra_distance = e.at("total_intra_distance").get<double>();
      for (const auto& m : e.at("members"))
        cluster.member_ids.push_back(m.at("entry").get<std::size_t>());
      result.clusters.push_back(std::move(cluster));
    }
    result.unassigned = j.at("unassigned").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad clusters file " + path.string() + ": " + e.what());
  }
  return result;
}

void save_ground_truth(const GroundTruth& truth, const std::filesystem::path& path) {
  json j;
  j["utt_ids"] = truth.utt_ids;
  j["keywords"] = truth.keywords;
  j["keyword_words"] = truth.keyword_words;
  json occs = json::array();
  for (const auto& occ : truth.occurrences) {
    json e;
    e["utt_id"] = occ.utt_id;
    e["keyword_id"] = occ.keyword_id;
    e["span"] = span_to_json(occ.span);
    occs.push_back(std::move(e));
  }
  j["occurrences"] = std::move(occs);
  dump(j, path);
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  const json j = parse(path);
  GroundTruth truth;
  try {
    truth.utt_ids = j.at("utt_ids").get<std::vector<std::string>>();
    truth.keywords = j.at("keywords").get<std::vector<std::vector<int>>>();
    truth.keyword_words = j.at("keyword_words").get<std::vector<std::string>>();
    for (const auto& e : j.at("occurrences"))
      truth.occurrences.push_back(PlantedOccurrence{e.at("utt_id").get<std::string>(),
                                                    e.at("keyword_id").get<std::size_t>(),
                                                    span_from_json(e.at("span"))});
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad ground truth " + path.string() + ": " + e.what());
  }
  return truth;
}

void save_purity_report(const PurityReport& report, const std::filesystem::path& json_path) {
  json j;
  json clusters = json::array();
  for (const auto& cp : report.clusters) {
    json e;
    e["cluster_id"] = cp.cluster_id;
    e["size"] = cp.size;
    e["dominant_label"] = cp.dominant_label;
    e["purity"] = cp.purity;
    json counts = json::array();
    for (const auto& [label, count] : cp.label_counts)
      counts.push_back(json::array({label, count}));
    e["label_counts"] = std::move(counts);
    clusters.push_back(std::move(e));
  }
  j["clusters"] = std::move(clusters);
  j["mean_purity"] = report.mean_purity;
  j["weighted_purity"] = report.weighted_purity;
  dump(j, json_path);
}

void save_purity_csv(const PurityReport& report, const std::filesystem::path& csv_path) {
  std::string out = "cluster_id,size,dominant_label,purity\n";
  for (const auto& cp : report.clusters) {
    out += std::to_string(cp.cluster_id);
    out += ',';
    out += std::to_string(cp.size);
    out += ',';
    out += cp.dominant_label;
    out += ',';
    out += format_double(cp.purity);
    out += '\n';
  }
  write_all(csv_path, out);
}

namespace {

const char* verdict_name(MatchVerdict v) {
  switch (v) {
    case MatchVerdict::match: return "match";
    case MatchVerdict::partial_match: return "partial-match-counted";
    case MatchVerdict::mismatch: return "mismatch";
    default: return "uncovered";
  }
}

}  // namespace

void save_coverage_report(const CoverageReport& report,
                          const std::filesystem::path& json_path) {
  json j;
  json verdicts = json::array();
  for (const auto& nv : report.verdicts) {
    json e;
    e["ngram"] = nv.ngram.words;
    e["count"] = nv.ngram.count;
    e["verdict"] = verdict_name(nv.verdict);
    if (nv.verdict != MatchVerdict::uncovered) e["best_cluster"] = nv.best_cluster;
    verdicts.push_back(std::move(e));
  }
  j["verdicts"] = std::move(verdicts);
  j["matches"] = report.matches;
  j["partial_matches"] = report.partial_matches;
  j["mismatches"] = report.mismatches;
  j["uncovered"] = report.uncovered;
  j["rate"] = report.rate;
  dump(j, json_path);
}

void save_coverage_csv(const CoverageReport& report, const std::filesystem::path& csv_path) {
  std::string out = "ngram,count,verdict\n";
  for (const auto& nv : report.verdicts) {
    std::string phrase;
    for (std::size_t i = 0; i < nv.ngram.words.size(); ++i) {
      if (i) phrase += ' ';
      phrase += nv.ngram.words[i];
    }
    out += phrase;
    out += ',';
    out += std::to_string(nv.ngram.count);
    out += ',';
    out += verdict_name(nv.verdict);
    out += '\n';
  }
  write_all(csv_path, out);
}

std::string load_text(const std::filesystem::path& path) { return read_all(path); }

void save_text(const std::string& text, const std::filesystem::path& path) {
  write_all(path, text);
}

std::uint64_t fnv1a64_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("missing input: " + path.string());
  std::uint64_t h = 14695981039346656037ULL;
  char buf[4096];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ULL;
    }
    if (!in) break;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace termminer
