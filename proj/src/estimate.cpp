#include "hypwalk/estimate.hpp"

#include <cmath>
#include <limits>

#include "hypwalk/error.hpp"

namespace hypwalk {

Estimate make_estimate(std::span<const double> x) {
  require(!x.empty(), "make_estimate: no samples");
  const double n = static_cast<double>(x.size());
  double sum = 0.0;
  for (double v : x) sum += v;
  const double mean = sum / n;
  if (x.size() < 2) return {mean, 0.0, x.size()};
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n), x.size()};
}

double z_score(const Estimate& a, const Estimate& b) {
  const double diff = a.mean - b.mean;
  const double se = std::hypot(a.std_error, b.std_error);
  if (se == 0.0) return diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
  return diff / se;
}

double z_score(const Estimate& a, double exact) { return z_score(a, Estimate{exact, 0.0, 1}); }

}  // namespace hypwalk
