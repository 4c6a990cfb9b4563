#pragma once

#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace termminer {

// Half-open frame index range [begin, end).
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  friend bool operator==(const Segment&, const Segment&) = default;
  friend auto operator<=>(const Segment&, const Segment&) = default;
};

// Per-utterance sequence of fixed-dimension feature vectors sampled at a
// fixed frame period.
struct FrameMatrix {
  std::string utt_id;
  double frame_period_ms = 10.0;
  std::vector<std::vector<double>> frames;

  std::size_t dim() const { return frames.empty() ? 0 : frames.front().size(); }
  std::size_t frame_count() const { return frames.size(); }
  double duration_ms() const { return static_cast<double>(frames.size()) * frame_period_ms; }

  // Requires at least one frame, uniform dimension >= 1, positive period.
  void validate() const;
};

// Independently hypothesized boundary lists for one utterance, each strictly
// increasing, in milliseconds.
struct BoundaryHypothesisSet {
  std::string utt_id;
  std::vector<std::vector<double>> hypotheses;
};

struct SegmentFeature {
  std::string utt_id;
  Segment segment;
  std::vector<double> vector;
};

// Pools every hypothesized boundary, sorts them ascending and greedily chains
// values whose consecutive gap is <= window_ms into one group; each group is
// replaced by its arithmetic mean. The output is strictly increasing and
// consecutive outputs are more than window_ms apart.
std::vector<double> merge_boundaries(const BoundaryHypothesisSet& hyps, double window_ms);

// Snaps boundary times to frame indices (round half up on time / period) and
// tiles [0, frame_count) with the resulting cut points. Duplicate cut points
// collapse and zero-length segments are dropped, so degenerate inputs yield
// the single full-utterance segment.
std::vector<Segment> segments_from_boundaries(const std::vector<double>& boundaries_ms,
                                              const FrameMatrix& frames);

// Elementwise arithmetic mean of frames[seg.begin, seg.end).
SegmentFeature segment_feature(const FrameMatrix& frames, const Segment& seg);

std::vector<SegmentFeature> segment_features(const FrameMatrix& frames,
                                             const std::vector<Segment>& segments);

}  // namespace termminer
