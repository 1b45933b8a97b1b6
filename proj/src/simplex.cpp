#include "gmfc/simplex.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace gmfc {

void project_to_simplex(std::span<double> v) {
  const int n = static_cast<int>(v.size());
  if (n == 0) throw std::invalid_argument("cannot project an empty vector");

  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());

  // Largest k with sorted[k-1] > (prefix_sum(k) - 1) / k; the threshold from
  // that k zeroes exactly the right tail.
  double prefix = 0.0;
  double theta = 0.0;
  for (int k = 1; k <= n; ++k) {
    prefix += sorted[k - 1];
    const double candidate = (prefix - 1.0) / k;
    if (sorted[k - 1] - candidate > 0.0) theta = candidate;
  }
  for (auto& x : v) x = std::max(x - theta, 0.0);
}

}  // namespace gmfc
