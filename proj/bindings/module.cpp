#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "termminer/alignment.hpp"
#include "termminer/evaluation.hpp"
#include "termminer/leader_clustering.hpp"
#include "termminer/segment_clustering.hpp"
#include "termminer/segmentation.hpp"
#include "termminer/string_metrics.hpp"
#include "termminer/synthesis.hpp"

namespace py = pybind11;
using namespace termminer;

namespace {

TracebackMode traceback_from_string(const std::string& mode) {
  if (mode == "last-row" || mode == "last_row") return TracebackMode::last_row;
  if (mode == "global") return TracebackMode::global;
  throw std::invalid_argument("traceback must be 'last-row' or 'global'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "termminer core operations";

  py::class_<Segment>(m, "Segment")
      .def(py::init<std::size_t, std::size_t>(), py::arg("begin"), py::arg("end"))
      .def_readwrite("begin", &Segment::begin)
      .def_readwrite("end", &Segment::end)
      .def("__len__", &Segment::length)
      .def("__repr__", [](const Segment& s) {
        return "Segment(" + std::to_string(s.begin) + ", " + std::to_string(s.end) + ")";
      });

  py::class_<TokenSpan>(m, "TokenSpan")
      .def(py::init<std::size_t, std::size_t>(), py::arg("begin"), py::arg("end"))
      .def_readwrite("begin", &TokenSpan::begin)
      .def_readwrite("end", &TokenSpan::end)
      .def("__len__", &TokenSpan::length)
      .def("__repr__", [](const TokenSpan& s) {
        return "TokenSpan(" + std::to_string(s.begin) + ", " + std::to_string(s.end) + ")";
      });

  py::class_<UnitSequence>(m, "UnitSequence")
      .def(py::init([](std::string utt_id, std::vector<int> units,
                       std::vector<Segment> spans) {
             UnitSequence seq{std::move(utt_id), std::move(units), std::move(spans)};
             if (seq.spans.empty()) {
               seq.spans.reserve(seq.units.size());
               for (std::size_t t = 0; t < seq.units.size(); ++t)
                 seq.spans.push_back(Segment{t, t + 1});
             }
             seq.validate();
             return seq;
           }),
           py::arg("utt_id"), py::arg("units"), py::arg("spans") = std::vector<Segment>{})
      .def_readwrite("utt_id", &UnitSequence::utt_id)
      .def_readwrite("units", &UnitSequence::units)
      .def_readwrite("spans", &UnitSequence::spans);

  py::class_<BagEntry>(m, "BagEntry")
      .def_readonly("units", &BagEntry::units)
      .def_readonly("source_utt", &BagEntry::source_utt)
      .def_readonly("source_span", &BagEntry::source_span)
      .def_readonly("pair_utt", &BagEntry::pair_utt)
      .def_readonly("pair_span", &BagEntry::pair_span)
      .def_readonly("score", &BagEntry::score);

  py::class_<SubsequenceBag>(m, "SubsequenceBag")
      .def_readonly("entries", &SubsequenceBag::entries)
      .def("__len__", [](const SubsequenceBag& b) { return b.entries.size(); });

  py::class_<KeywordCluster>(m, "KeywordCluster")
      .def_readonly("medoid_id", &KeywordCluster::medoid_id)
      .def_readonly("member_ids", &KeywordCluster::member_ids)
      .def_readonly("total_intra_distance", &KeywordCluster::total_intra_distance);

  py::class_<ClusteringResult>(m, "ClusteringResult")
      .def_readonly("clusters", &ClusteringResult::clusters)
      .def_readonly("unassigned", &ClusteringResult::unassigned)
      .def_readonly("rounds", &ClusteringResult::rounds);

  py::class_<Codebook>(m, "Codebook")
      .def_readonly("dim", &Codebook::dim)
      .def_readonly("centroids", &Codebook::centroids)
      .def("__len__", &Codebook::size);

  m.def("levenshtein", &levenshtein, py::arg("x"), py::arg("y"));
  m.def("normalized_levenshtein", &normalized_levenshtein, py::arg("x"), py::arg("y"),
        py::arg("b") = 4.0);

  m.def("merge_boundaries",
        [](const std::vector<std::vector<double>>& hypotheses, double window_ms) {
          return merge_boundaries(BoundaryHypothesisSet{"", hypotheses}, window_ms);
        },
        py::arg("hypotheses"), py::arg("window_ms") = 20.0);

  m.def("local_align",
        [](const std::vector<int>& a, const std::vector<int>& b, double match,
           double mismatch, double gap, const std::string& traceback) {
          const ScoringScheme s{match, mismatch, gap};
          std::vector<py::dict> out;
          for (const auto& al : local_align(a, b, s, traceback_from_string(traceback))) {
            py::dict d;
            d["a_span"] = py::make_tuple(al.a_span.begin, al.a_span.end);
            d["b_span"] = py::make_tuple(al.b_span.begin, al.b_span.end);
            d["score"] = al.score;
            out.push_back(std::move(d));
          }
          return out;
        },
        py::arg("a"), py::arg("b"), py::arg("match") = 1.0, py::arg("mismatch") = -1.0,
        py::arg("gap") = 0.0, py::arg("traceback") = "last-row");

  m.def("mine_pairs",
        [](const std::vector<UnitSequence>& corpus, double match, double mismatch,
           double gap, int min_length, const std::string& traceback, unsigned jobs) {
          const ScoringScheme s{match, mismatch, gap};
          return mine_pairs(corpus, s, min_length, traceback_from_string(traceback), jobs);
        },
        py::arg("corpus"), py::arg("match") = 1.0, py::arg("mismatch") = -1.0,
        py::arg("gap") = 0.0, py::arg("min_length") = 4,
        py::arg("traceback") = "last-row", py::arg("jobs") = 1);

  m.def("leader_cluster",
        [](const SubsequenceBag& bag, double radius_t, double sep_a, double norm_b,
           std::size_t max_rounds) {
          const MiningConfig cfg{radius_t, sep_a, norm_b, 4};
          return leader_cluster(bag, cfg, max_rounds);
        },
        py::arg("bag"), py::arg("radius_t") = 1.4, py::arg("sep_a") = 1.8,
        py::arg("norm_b") = 4.0, py::arg("max_rounds") = 50);

  m.def("kmeans",
        [](const std::vector<std::vector<double>>& features, std::size_t k,
           std::uint64_t seed, int max_iters) {
          const KmeansResult r = kmeans(features, k, seed, max_iters);
          py::dict d;
          d["centroids"] = r.codebook.centroids;
          d["assignments"] = r.assignments;
          d["objective_history"] = r.objective_history;
          d["iterations"] = r.iterations;
          return d;
        },
        py::arg("features"), py::arg("k"), py::arg("seed") = 0, py::arg("max_iters") = 100);

  m.def("hac_ward",
        [](const std::vector<std::vector<double>>& features, std::size_t sample_cap,
           std::uint64_t seed) {
          const Dendrogram d = hac_ward(features, sample_cap, seed);
          std::vector<py::tuple> merges;
          merges.reserve(d.merges.size());
          for (const auto& mg : d.merges)
            merges.push_back(py::make_tuple(mg.cluster_a, mg.cluster_b, mg.height, mg.size));
          py::dict out;
          out["leaf_count"] = d.leaf_count;
          out["merges"] = merges;
          return out;
        },
        py::arg("features"), py::arg("sample_cap") = 100000, py::arg("seed") = 0);

  m.def("suggest_k",
        [](const std::vector<std::vector<double>>& features, std::size_t max_k,
           std::size_t sample_cap, std::uint64_t seed) {
          return suggest_k(hac_ward(features, sample_cap, seed), max_k);
        },
        py::arg("features"), py::arg("max_k"), py::arg("sample_cap") = 100000,
        py::arg("seed") = 0);

  m.def("generate_corpus",
        [](std::size_t alphabet_size, std::size_t num_keywords, std::size_t keyword_length,
           std::size_t num_utterances, std::size_t min_utterance_length,
           std::size_t max_utterance_length, double substitution_rate,
           double insertion_rate, double deletion_rate, std::uint64_t seed) {
          SynthConfig cfg;
          cfg.alphabet_size = alphabet_size;
          cfg.num_keywords = num_keywords;
          cfg.min_keyword_length = keyword_length;
          cfg.max_keyword_length = keyword_length;
          cfg.num_utterances = num_utterances;
          cfg.min_utterance_length = min_utterance_length;
          cfg.max_utterance_length = max_utterance_length;
          cfg.substitution_rate = substitution_rate;
          cfg.insertion_rate = insertion_rate;
          cfg.deletion_rate = deletion_rate;
          cfg.seed = seed;
          const SynthCorpus corpus = generate_corpus(cfg);
          py::dict d;
          d["utterances"] = corpus.utterances;
          d["keywords"] = corpus.truth.keywords;
          py::list occs;
          for (const auto& occ : corpus.truth.occurrences) {
            py::dict o;
            o["utt_id"] = occ.utt_id;
            o["keyword_id"] = occ.keyword_id;
            o["span"] = py::make_tuple(occ.span.begin, occ.span.end);
            occs.append(std::move(o));
          }
          d["occurrences"] = std::move(occs);
          return d;
        },
        py::arg("alphabet_size") = 55, py::arg("num_keywords") = 5,
        py::arg("keyword_length") = 8, py::arg("num_utterances") = 20,
        py::arg("min_utterance_length") = 12, py::arg("max_utterance_length") = 20,
        py::arg("substitution_rate") = 0.0, py::arg("insertion_rate") = 0.0,
        py::arg("deletion_rate") = 0.0, py::arg("seed") = 1);

  m.def("ngram_counts",
        [](const std::vector<std::string>& tokens, std::size_t n) {
          std::vector<py::tuple> out;
          for (const auto& g : ngram_counts(tokens, n))
            out.push_back(py::make_tuple(g.words, g.count));
          return out;
        },
        py::arg("tokens"), py::arg("n"));
}
