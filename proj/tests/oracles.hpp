#pragma once

// Independent reference computations for the unit and acceptance tests. They
// share no code with the library beyond plain data types.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace oracle {

struct Net {
  int n;
  std::vector<std::vector<double>> cap;  // dense, parallel edges summed
  explicit Net(int n_) : n(n_), cap(static_cast<std::size_t>(n_), std::vector<double>(static_cast<std::size_t>(n_), 0.0)) {}
  void add(int u, int v, double c) { cap[static_cast<std::size_t>(u)][static_cast<std::size_t>(v)] += c; }
};

// Edmonds-Karp on a dense residual matrix.
inline double edmonds_karp(Net net, int s, int t) {
  auto& r = net.cap;
  const auto n = static_cast<std::size_t>(net.n);
  double total = 0.0;
  for (;;) {
    std::vector<int> prev(n, -1);
    prev[static_cast<std::size_t>(s)] = s;
    std::deque<int> q{s};
    while (!q.empty() && prev[static_cast<std::size_t>(t)] < 0) {
      const int u = q.front();
      q.pop_front();
      for (std::size_t v = 0; v < n; ++v)
        if (prev[v] < 0 && r[static_cast<std::size_t>(u)][v] > 1e-15) {
          prev[v] = u;
          q.push_back(static_cast<int>(v));
        }
    }
    if (prev[static_cast<std::size_t>(t)] < 0) return total;
    double b = std::numeric_limits<double>::infinity();
    for (int v = t; v != s; v = prev[static_cast<std::size_t>(v)])
      b = std::min(b, r[static_cast<std::size_t>(prev[static_cast<std::size_t>(v)])][static_cast<std::size_t>(v)]);
    for (int v = t; v != s; v = prev[static_cast<std::size_t>(v)]) {
      const auto u = static_cast<std::size_t>(prev[static_cast<std::size_t>(v)]);
      r[u][static_cast<std::size_t>(v)] -= b;
      r[static_cast<std::size_t>(v)][u] += b;
    }
    total += b;
  }
}

// Stationary law of a dense stochastic matrix by least squares on
// [P^T - I; 1^T] pi = [0; 1].
inline Eigen::VectorXd dense_stationary(const Eigen::MatrixXd& p) {
  const auto n = p.rows();
  Eigen::MatrixXd a(n + 1, n);
  a.topRows(n) = p.transpose() - Eigen::MatrixXd::Identity(n, n);
  a.row(n).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n + 1);
  b(n) = 1.0;
  return a.colPivHouseholderQr().solve(b);
}

// log B(a) = sum lgamma(a_i) - lgamma(sum a_i).
inline double log_beta(const std::vector<double>& a) {
  double s = 0.0, t = 0.0;
  for (double v : a) {
    s += std::lgamma(v);
    t += v;
  }
  return s - std::lgamma(t);
}

}  // namespace oracle
