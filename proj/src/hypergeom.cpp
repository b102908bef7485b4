#include "hypwalk/hypergeom.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "hypwalk/error.hpp"
#include "hypwalk/jacobi.hpp"
#include "hypwalk/rng.hpp"

namespace hypwalk {

void HypergeomParams::validate() const {
  require(!alpha.empty(), "alpha must be nonempty");
  require(z.rows() == static_cast<Eigen::Index>(beta.size()) &&
              z.cols() == static_cast<Eigen::Index>(alpha.size()),
          "Z must be l x n (rows = beta entries, columns = alpha entries)");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw PreconditionError("alpha entries must be strictly positive");
  for (double b : beta)
    if (!(b > 0.0) || !std::isfinite(b)) throw PreconditionError("beta entries must be strictly positive");
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!(z.data()[i] > 0.0) || !std::isfinite(z.data()[i]))
      throw PreconditionError("Z entries must be strictly positive");
}

bool HypergeomParams::balanced(double tol) const {
  double sa = 0.0, sb = 0.0;
  for (double a : alpha) sa += a;
  for (double b : beta) sb += b;
  return std::abs(sa - sb) <= tol * std::max(1.0, sa);
}

HypergeomParams HypergeomParams::dual() const { return {beta, alpha, z.transpose()}; }

double log_beta_multivariate(std::span<const double> alpha) {
  require(!alpha.empty(), "beta_multivariate: empty argument");
  double s = 0.0, lg = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0)) throw PreconditionError("beta_multivariate: arguments must be positive");
    s += a;
    lg += std::lgamma(a);
  }
  return lg - std::lgamma(s);
}

double beta_multivariate(std::span<const double> alpha) { return std::exp(log_beta_multivariate(alpha)); }

double phi_density(const HypergeomParams& p, std::span<const double> u) {
  p.validate();
  require(u.size() == p.n(), "phi_density: u has the wrong length");
  double s = 0.0;
  for (double v : u) {
    require(v >= 0.0 && v <= 1.0, "phi_density: u must lie in the simplex");
    s += v;
  }
  require(std::abs(s - 1.0) <= 1e-12, "phi_density: u must sum to 1");
  double lv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) {
      if (p.alpha[i] < 1.0) throw PreconditionError("phi_density: boundary point with alpha_i < 1");
      if (p.alpha[i] > 1.0) return 0.0;
      continue;
    }
    lv += (p.alpha[i] - 1.0) * std::log(u[i]);
  }
  for (std::size_t j = 0; j < p.l(); ++j) {
    double zu = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
      zu += p.z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) * u[i];
    lv -= p.beta[j] * std::log(zu);
  }
  return std::exp(lv);
}

namespace {

bool constant_rows(const Eigen::MatrixXd& z) {
  for (Eigen::Index j = 0; j < z.rows(); ++j)
    for (Eigen::Index i = 1; i < z.cols(); ++i)
      if (z(j, i) != z(j, 0)) return false;
  return true;
}

int max_nodes(std::size_t dims) {
  switch (dims) {
    case 1: return 4096;
    case 2: return 512;
    default: return 128;
  }
}

// E[prod_j ((Z u)_j / zmin_j)^(-beta_j)] under Dirichlet(alpha) by an
// n_nodes^(n-1) tensor rule over the stick-breaking coordinates.
double tensor_mean(const HypergeomParams& p, const std::vector<double>& log_zmin, int n_nodes) {
  const std::size_t n = p.n(), l = p.l(), m = n - 1;
  std::vector<JacobiRule> rules;
  double tail = 0.0;
  for (std::size_t i = 0; i < n; ++i) tail += p.alpha[i];
  for (std::size_t k = 0; k < m; ++k) {
    tail -= p.alpha[k];
    rules.push_back(gauss_jacobi01(p.alpha[k], tail, n_nodes));
  }
  std::vector<std::vector<double>> partial(m + 1, std::vector<double>(l, 0.0));
  double acc = 0.0;
  std::function<void(std::size_t, double, double)> rec = [&](std::size_t k, double rest, double w) {
    const auto& r = rules[k];
    const auto& in = partial[k];
    if (k + 1 == m) {
      for (std::size_t q = 0; q < r.nodes.size(); ++q) {
        const double uk = rest * r.nodes[q], ul = rest * (1.0 - r.nodes[q]);
        double s = 0.0;
        for (std::size_t j = 0; j < l; ++j) {
          const auto jj = static_cast<Eigen::Index>(j);
          const double zu = in[j] + p.z(jj, static_cast<Eigen::Index>(k)) * uk +
                            p.z(jj, static_cast<Eigen::Index>(n - 1)) * ul;
          s -= p.beta[j] * (std::log(zu) - log_zmin[j]);
        }
        acc += w * r.weights[q] * std::exp(s);
      }
      return;
    }
    auto& out = partial[k + 1];
    for (std::size_t q = 0; q < r.nodes.size(); ++q) {
      const double uk = rest * r.nodes[q];
      for (std::size_t j = 0; j < l; ++j)
        out[j] = in[j] + p.z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) * uk;
      rec(k + 1, rest * (1.0 - r.nodes[q]), w * r.weights[q]);
    }
  };
  rec(0, 1.0, 1.0);
  return acc;
}

}  // namespace

PhiValue phi_quadrature(const HypergeomParams& p, double tol) {
  p.validate();
  require(tol > 0.0, "phi_quadrature: tolerance must be positive");
  const std::size_t n = p.n(), l = p.l();
  const double log_b = log_beta_multivariate(p.alpha);
  std::vector<double> log_zmin(l), log_zmax(l);
  double log_upper = 0.0, log_lower = 0.0;
  for (std::size_t j = 0; j < l; ++j) {
    const auto row = p.z.row(static_cast<Eigen::Index>(j));
    log_zmin[j] = std::log(row.minCoeff());
    log_zmax[j] = std::log(row.maxCoeff());
    log_upper -= p.beta[j] * log_zmin[j];
    log_lower -= p.beta[j] * log_zmax[j];
  }
  PhiValue out;
  if (n == 1 || constant_rows(p.z)) {
    out.log_value = log_b + log_upper;
    out.value = std::exp(out.log_value);
    return out;
  }
  require(n <= 4, "phi_quadrature: n > 4 is outside the deterministic range; use phi_mc");
  double prev = -1.0, cur = 0.0;
  int nodes = 8;
  bool converged = false;
  for (; nodes <= max_nodes(n - 1); nodes *= 2) {
    cur = tensor_mean(p, log_zmin, nodes);
    if (prev >= 0.0 && std::abs(cur - prev) <= tol * cur) {
      converged = true;
      break;
    }
    prev = cur;
  }
  if (!converged)
    throw NumericalError("phi_quadrature: no convergence to relative tolerance " + std::to_string(tol));
  const double log_mean = std::log(cur);
  if (log_mean > 1e-12 || log_mean < log_lower - log_upper - 1e-12)
    throw NumericalError("phi_quadrature: value outside the a priori bounds");
  out.log_value = log_b + log_upper + log_mean;
  out.value = std::exp(out.log_value);
  out.error = std::abs(cur - prev) / cur * out.value;
  out.nodes_per_axis = nodes;
  return out;
}

Estimate phi_mc(const HypergeomParams& p, std::size_t n_samples, std::uint64_t seed) {
  p.validate();
  require(n_samples >= 2, "phi_mc: need at least 2 samples");
  const double log_b = log_beta_multivariate(p.alpha);
  Engine eng(seed);
  std::vector<double> u(p.n()), vals(n_samples);
  for (std::size_t s = 0; s < n_samples; ++s) {
    sample_dirichlet(eng, p.alpha, u);
    double lg = 0.0;
    for (std::size_t j = 0; j < p.l(); ++j) {
      double zu = 0.0;
      for (std::size_t i = 0; i < p.n(); ++i) zu += p.z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) * u[i];
      lg -= p.beta[j] * std::log(zu);
    }
    vals[s] = std::exp(log_b + lg);
  }
  return make_estimate(vals);
}

double duality_residual(const HypergeomParams& p, double tol) {
  p.validate();
  require(p.balanced(), "duality_residual: parameters must be balanced (sum alpha = sum beta)");
  const auto q = p.dual();
  const double lhs = std::exp(phi_quadrature(p, tol).log_value - log_beta_multivariate(p.alpha));
  const double rhs = std::exp(phi_quadrature(q, tol).log_value - log_beta_multivariate(q.alpha));
  return lhs - rhs;
}

HypergeomParams vertex_params(const ArcGraphModel& m, const WeightSystem& ws, VertexId x,
                              std::span<const double> extra_xi) {
  const auto& g = m.graph;
  const auto& h = m.arcs;
  require(ws.alpha.size() == g.edge_count() && ws.z.size() == h.arc_count(), "weights do not match the model");
  require(extra_xi.empty() || extra_xi.size() == h.arc_count(), "xi must be empty or one entry per arc");
  auto tilt = [&](ArcId k) {
    double t = 0.0;
    if (!ws.xi.empty()) t += ws.xi[static_cast<std::size_t>(k)];
    if (!extra_xi.empty()) t += extra_xi[static_cast<std::size_t>(k)];
    return t;
  };
  const auto out = g.out_edges(x);
  const auto in = g.in_edges(x);
  HypergeomParams p;
  p.alpha.resize(out.size());
  p.beta.resize(in.size());
  p.z.resize(static_cast<Eigen::Index>(in.size()), static_cast<Eigen::Index>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) {
    double a = ws.alpha[static_cast<std::size_t>(out[i])];
    for (ArcId k : h.in_arcs(out[i])) a += tilt(k);
    p.alpha[i] = a;
  }
  for (std::size_t j = 0; j < in.size(); ++j) {
    const EdgeId e = in[j];
    double b = ws.alpha[static_cast<std::size_t>(e)];
    for (ArcId k = h.out_begin(e); k < h.out_end(e); ++k) {
      b += tilt(k);
      p.z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k - h.out_begin(e))) = ws.z[static_cast<std::size_t>(k)];
    }
    p.beta[j] = b;
  }
  for (double a : p.alpha)
    if (!(a > 0.0)) throw PreconditionError("tilt makes an alpha parameter nonpositive at vertex " + std::to_string(x));
  for (double b : p.beta)
    if (!(b > 0.0)) throw PreconditionError("tilt makes a beta parameter nonpositive at vertex " + std::to_string(x));
  return p;
}

std::vector<VertexId> touched_vertices(const ArcGraphModel& m, std::span<const double> xi) {
  std::vector<char> hit(m.graph.vertex_count(), 0);
  for (std::size_t k = 0; k < xi.size(); ++k)
    if (xi[k] != 0.0) hit[static_cast<std::size_t>(m.graph.head(m.arcs.arc(static_cast<ArcId>(k)).from))] = 1;
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < hit.size(); ++v)
    if (hit[v]) out.push_back(static_cast<VertexId>(v));
  return out;
}

double log_F_product(const ArcGraphModel& m, const WeightSystem& ws, std::span<const double> extra_xi,
                     double tol) {
  double s = 0.0;
  for (std::size_t x = 0; x < m.graph.vertex_count(); ++x)
    s += phi_quadrature(vertex_params(m, ws, static_cast<VertexId>(x), extra_xi), tol).log_value;
  return s;
}

double log_moment_exact(const ArcGraphModel& m, const WeightSystem& ws, std::span<const double> xi,
                        double tol) {
  require(xi.size() == m.arc_count(), "xi must be defined on every arc");
  double s = 0.0;
  for (std::size_t k = 0; k < xi.size(); ++k)
    if (xi[k] != 0.0) s += xi[k] * std::log(ws.z[k]);
  for (VertexId x : touched_vertices(m, xi)) {
    s += phi_quadrature(vertex_params(m, ws, x, xi), tol).log_value;
    s -= phi_quadrature(vertex_params(m, ws, x), tol).log_value;
  }
  return s;
}

double marginal_moment(const ArcGraphModel& m, const WeightSystem& ws, ArcId k, double s, double tol) {
  require(k >= 0 && static_cast<std::size_t>(k) < m.arc_count(), "marginal_moment: arc out of range");
  const auto& a = m.arcs.arc(k);
  const double lo = -std::min(ws.alpha[static_cast<std::size_t>(a.from)], ws.alpha[static_cast<std::size_t>(a.to)]);
  require(s > lo, "marginal_moment: s must exceed -min(alpha_e, alpha_e')");
  if (s == 0.0) return 1.0;
  std::vector<double> xi(m.arc_count(), 0.0);
  xi[static_cast<std::size_t>(k)] = s;
  return std::exp(log_moment_exact(m, ws, xi, tol));
}

}  // namespace hypwalk
