#include "termminer/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace termminer {

void FrameMatrix::validate() const {
  if (frame_period_ms <= 0.0) throw std::invalid_argument("frame period must be positive");
  if (frames.empty()) throw std::invalid_argument("frame matrix needs at least one frame");
  const std::size_t d = frames.front().size();
  if (d == 0) throw std::invalid_argument("frame dimension must be at least 1");
  for (const auto& f : frames)
    if (f.size() != d) throw std::invalid_argument("frames must share one dimension");
}

std::vector<double> merge_boundaries(const BoundaryHypothesisSet& hyps, double window_ms) {
  if (window_ms <= 0.0) throw std::invalid_argument("merge window must be positive");
  std::vector<double> pooled;
  for (const auto& h : hyps.hypotheses) pooled.insert(pooled.end(), h.begin(), h.end());
  if (pooled.empty()) throw std::invalid_argument("no boundaries");
  std::sort(pooled.begin(), pooled.end());

  // Greedy left-to-right chaining: consecutive gaps <= window stay in one
  // group, each group collapses to its mean. Group means are then more than
  // window apart because adjacent group endpoints are.
  std::vector<double> merged;
  std::size_t group_start = 0;
  for (std::size_t i = 1; i <= pooled.size(); ++i) {
    if (i == pooled.size() || pooled[i] - pooled[i - 1] > window_ms) {
      const double sum =
          std::accumulate(pooled.begin() + group_start, pooled.begin() + i, 0.0);
      merged.push_back(sum / static_cast<double>(i - group_start));
      group_start = i;
    }
  }
  return merged;
}

std::vector<Segment> segments_from_boundaries(const std::vector<double>& boundaries_ms,
                                              const FrameMatrix& frames) {
  frames.validate();
  const std::size_t n = frames.frame_count();
  std::vector<std::size_t> cuts{0};
  for (double b : boundaries_ms) {
    double idx = std::floor(b / frames.frame_period_ms + 0.5);  // round half up
    if (idx < 0.0) idx = 0.0;
    const auto snapped = std::min(static_cast<std::size_t>(idx), n);
    cuts.push_back(snapped);
  }
  cuts.push_back(n);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Segment> segments;
  segments.reserve(cuts.size() - 1);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    segments.push_back(Segment{cuts[i], cuts[i + 1]});
  return segments;
}

SegmentFeature segment_feature(const FrameMatrix& frames, const Segment& seg) {
  if (seg.begin >= seg.end || seg.end > frames.frame_count())
    throw std::out_of_range("segment out of range for utterance");
  const std::size_t d = frames.dim();
  std::vector<double> mean(d, 0.0);
  for (std::size_t i = seg.begin; i < seg.end; ++i)
    for (std::size_t c = 0; c < d; ++c) mean[c] += frames.frames[i][c];
  const double inv = 1.0 / static_cast<double>(seg.length());
  for (double& v : mean) v *= inv;
  return SegmentFeature{frames.utt_id, seg, std::move(mean)};
}

std::vector<SegmentFeature> segment_features(const FrameMatrix& frames,
                                             const std::vector<Segment>& segments) {
  std::vector<SegmentFeature> out;
  out.reserve(segments.size());
  for (const auto& seg : segments) out.push_back(segment_feature(frames, seg));
  return out;
}

}  // namespace termminer
