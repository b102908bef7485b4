#pragma once

#include <vector>

namespace hypwalk {

// n-point Gauss rule for the probability weight t^(a-1) (1-t)^(b-1) / B(a,b)
// on (0,1): sum_k w_k f(t_k) approximates E[f(T)], T ~ Beta(a,b).
struct JacobiRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

JacobiRule gauss_jacobi01(double a, double b, int n);

}  // namespace hypwalk
