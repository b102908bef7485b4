#pragma once

#include <cstddef>
#include <span>

namespace hypwalk {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;  // sample sd / sqrt(n)
  std::size_t n_samples = 0;
};

// Two-pass mean and standard error, summed in index order.
Estimate make_estimate(std::span<const double> samples);

// (a - b) / sqrt(se_a^2 + se_b^2); 0 when both agree exactly with zero error.
double z_score(const Estimate& a, const Estimate& b);
double z_score(const Estimate& a, double exact);

}  // namespace hypwalk
