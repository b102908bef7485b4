#include "hypwalk/rng.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hypwalk/error.hpp"

namespace hypwalk {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i) {
  return splitmix(splitmix(master) ^ (i * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t i, std::uint64_t j) {
  return derive_seed(derive_seed(master, i), j);
}

void sample_dirichlet(Engine& eng, std::span<const double> alpha, std::span<double> out) {
  require(alpha.size() == out.size() && !alpha.empty(), "sample_dirichlet: size mismatch");
  if (alpha.size() == 1) {
    out[0] = 1.0;
    return;
  }
  double lmax = -INFINITY;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    const double a = alpha[i];
    require(a > 0.0, "sample_dirichlet: parameters must be positive");
    double lg;
    if (a >= 1.0) {
      std::gamma_distribution<double> g(a, 1.0);
      lg = std::log(g(eng));
    } else {
      std::gamma_distribution<double> g(a + 1.0, 1.0);
      const double u = 1.0 - uniform01(eng);  // (0, 1]
      lg = std::log(g(eng)) + std::log(u) / a;
    }
    out[i] = lg;
    lmax = std::max(lmax, lg);
  }
  double total = 0.0;
  for (auto& v : out) {
    v = std::exp(v - lmax);
    total += v;
  }
  for (auto& v : out) v = std::max(v / total, 1e-300);
}

}  // namespace hypwalk
