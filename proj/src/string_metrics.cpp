#include "termminer/string_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace termminer {

void MiningConfig::validate() const {
  if (radius_t <= 0.0) throw std::invalid_argument("radius T must be positive");
  if (sep_a <= 0.0) throw std::invalid_argument("separation factor a must be positive");
  if (norm_b <= 0.0) throw std::invalid_argument("normalization scalar b must be positive");
  if (min_length < 1) throw std::invalid_argument("min_length must be at least 1");
}

std::size_t levenshtein(const std::vector<int>& x, const std::vector<int>& y) {
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  if (n == 0) return m;
  if (m == 0) return n;

  // classic two-row DP
  std::vector<std::size_t> prev(m + 1);
  std::vector<std::size_t> cur(m + 1);
  std::iota(prev.begin(), prev.end(), std::size_t{0});
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t subst = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

double normalized_levenshtein(const std::vector<int>& x, const std::vector<int>& y, double b) {
  if (b <= 0.0) throw std::invalid_argument("normalization scalar b must be positive");
  if (x.empty() && y.empty())
    throw std::invalid_argument("normalized distance undefined for two empty sequences");
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  return b * static_cast<double>(levenshtein(x, y)) / std::sqrt(nx * nx + ny * ny);
}

}  // namespace termminer
