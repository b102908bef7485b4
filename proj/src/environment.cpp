#include "hypwalk/environment.hpp"

#include <cmath>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "hypwalk/error.hpp"

namespace hypwalk {

namespace {

double log_accept(const HypergeomParams& p, std::span<const double> u, std::span<const double> log_zmin) {
  double s = 0.0;
  for (std::size_t j = 0; j < p.l(); ++j) {
    double zu = 0.0;
    for (std::size_t i = 0; i < p.n(); ++i) zu += p.z(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) * u[i];
    s -= p.beta[j] * (std::log(zu) - log_zmin[j]);
  }
  return s;
}

std::vector<double> row_log_min(const HypergeomParams& p) {
  std::vector<double> r(p.l());
  for (std::size_t j = 0; j < p.l(); ++j) r[j] = std::log(p.z.row(static_cast<Eigen::Index>(j)).minCoeff());
  return r;
}

bool constant_rows(const HypergeomParams& p) {
  for (Eigen::Index j = 0; j < p.z.rows(); ++j)
    if (p.z.row(j).maxCoeff() != p.z.row(j).minCoeff()) return false;
  return true;
}

}  // namespace

void sample_simplex(const HypergeomParams& p, Engine& eng, std::span<double> out) {
  require(out.size() == p.n(), "sample_simplex: output has the wrong length");
  if (p.n() == 1) {
    out[0] = 1.0;
    return;
  }
  if (constant_rows(p)) {
    sample_dirichlet(eng, p.alpha, out);
    return;
  }
  const auto lz = row_log_min(p);
  for (std::size_t tries = 0; tries < kProbeBatch; ++tries) {
    sample_dirichlet(eng, p.alpha, out);
    const double la = log_accept(p, out, lz);
    if (la >= 0.0) return;
    if (std::log(1.0 - uniform01(eng)) <= la) return;
  }
  throw SamplerError("rejection sampler: no acceptance in a probe batch of 1e4 proposals (rate below 1e-4); use importance mode");
}

double acceptance_rate(const HypergeomParams& p, std::size_t n, std::uint64_t seed) {
  p.validate();
  require(n > 0, "acceptance_rate: need trials");
  if (constant_rows(p)) return 1.0;
  Engine eng(seed);
  const auto lz = row_log_min(p);
  std::vector<double> u(p.n());
  double acc = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    sample_dirichlet(eng, p.alpha, u);
    acc += std::exp(log_accept(p, u, lz));
  }
  return acc / static_cast<double>(n);
}

EnvironmentSampler::EnvironmentSampler(const ArcGraphModel& m, const WeightSystem& ws) : m_(&m), ws_(ws) {
  validate_weights(m, ws_);
  laws_.reserve(m.graph.vertex_count());
  for (std::size_t x = 0; x < m.graph.vertex_count(); ++x)
    laws_.push_back(vertex_params(m, ws_, static_cast<VertexId>(x)));
}

std::vector<double> EnvironmentSampler::sample_vertex(VertexId x, std::uint64_t seed) const {
  const auto& p = laws_.at(static_cast<std::size_t>(x));
  Engine eng(derive_seed(seed, static_cast<std::uint64_t>(x)));
  std::vector<double> u(p.n());
  sample_simplex(p, eng, u);
  return u;
}

Environment EnvironmentSampler::sample(std::uint64_t seed) const {
  const auto& g = m_->graph;
  std::vector<double> u(g.edge_count());
  std::vector<double> local;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    const auto& p = laws_[x];
    local.resize(p.n());
    Engine eng(derive_seed(seed, x));
    sample_simplex(p, eng, local);
    const auto out = g.out_edges(static_cast<VertexId>(x));
    for (std::size_t i = 0; i < out.size(); ++i) u[static_cast<std::size_t>(out[i])] = local[i];
  }
  return environment_from_u(*m_, ws_, std::move(u));
}

std::vector<double> sample_u_vertex(const ArcGraphModel& m, const WeightSystem& ws, VertexId x,
                                    std::uint64_t seed) {
  validate_weights(m, ws);
  const auto p = vertex_params(m, ws, x);
  Engine eng(derive_seed(seed, static_cast<std::uint64_t>(x)));
  std::vector<double> u(p.n());
  sample_simplex(p, eng, u);
  return u;
}

Environment sample_environment(const ArcGraphModel& m, const WeightSystem& ws, std::uint64_t seed) {
  return EnvironmentSampler(m, ws).sample(seed);
}

Environment environment_from_u(const ArcGraphModel& m, const WeightSystem& ws, std::vector<double> u) {
  const auto& h = m.arcs;
  require(u.size() == m.edge_count(), "environment_from_u: u needs one entry per edge");
  require(ws.z.size() == h.arc_count(), "environment_from_u: Z needs one entry per arc");
  Environment env{std::move(u), std::vector<double>(h.arc_count())};
  for (std::size_t e = 0; e < m.edge_count(); ++e) {
    const auto b = h.out_begin(static_cast<EdgeId>(e)), end = h.out_end(static_cast<EdgeId>(e));
    double den = 0.0;
    for (ArcId k = b; k < end; ++k)
      den += ws.z[static_cast<std::size_t>(k)] * env.u[static_cast<std::size_t>(h.arc(k).to)];
    for (ArcId k = b; k < end; ++k)
      env.omega[static_cast<std::size_t>(k)] =
          ws.z[static_cast<std::size_t>(k)] * env.u[static_cast<std::size_t>(h.arc(k).to)] / den;
  }
  return env;
}

void check_environment(const ArcGraphModel& m, const Environment& env, double tol) {
  const auto& g = m.graph;
  const auto& h = m.arcs;
  require(env.omega.size() == h.arc_count(), "environment: omega has the wrong size");
  if (!env.u.empty()) {
    require(env.u.size() == g.edge_count(), "environment: u has the wrong size");
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      double s = 0.0;
      for (EdgeId e : g.out_edges(static_cast<VertexId>(x))) {
        const double v = env.u[static_cast<std::size_t>(e)];
        if (!(v > 0.0 && v <= 1.0 + tol)) throw NumericalError("environment: u outside (0, 1]");
        s += v;
      }
      if (std::abs(s - 1.0) > tol) throw NumericalError("environment: u does not sum to 1 at a vertex");
    }
  }
  for (std::size_t e = 0; e < g.edge_count(); ++e) {
    double s = 0.0;
    for (ArcId k = h.out_begin(static_cast<EdgeId>(e)); k < h.out_end(static_cast<EdgeId>(e)); ++k) {
      const double w = env.omega[static_cast<std::size_t>(k)];
      if (!(w > 0.0 && w <= 1.0 + tol)) throw NumericalError("environment: omega outside (0, 1]");
      s += w;
    }
    if (std::abs(s - 1.0) > tol) throw NumericalError("environment: omega row does not sum to 1");
  }
}

double log_power(std::span<const double> base, std::span<const double> exponent) {
  require(base.size() == exponent.size(), "log_power: size mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < base.size(); ++k) {
    if (exponent[k] == 0.0) continue;
    require(base[k] > 0.0, "log_power: base must be strictly positive");
    s += exponent[k] * std::log(base[k]);
  }
  return s;
}

double log_rn_weight(const ArcGraphModel& m, const WeightSystem& ws, const Environment& env,
                     std::span<const double> theta) {
  const auto& h = m.arcs;
  require(theta.size() == m.edge_count(), "rn_weight: theta needs one entry per edge");
  require(env.u.size() == m.edge_count(), "rn_weight: environment must carry u");
  double s = 0.0;
  for (std::size_t e = 0; e < theta.size(); ++e) {
    require(theta[e] >= 0.0, "rn_weight: theta must be nonnegative");
    if (theta[e] == 0.0) continue;
    double den = 0.0;
    for (ArcId k = h.out_begin(static_cast<EdgeId>(e)); k < h.out_end(static_cast<EdgeId>(e)); ++k)
      den += ws.z[static_cast<std::size_t>(k)] * env.u[static_cast<std::size_t>(h.arc(k).to)];
    s -= theta[e] * (std::log(env.u[e]) - std::log(den));
  }
  return s;
}

double rn_weight(const ArcGraphModel& m, const WeightSystem& ws, const Environment& env,
                 std::span<const double> theta) {
  return std::exp(log_rn_weight(m, ws, env, theta));
}

Estimate moments_mc(const ArcGraphModel& m, const WeightSystem& ws, std::span<const double> xi,
                    std::size_t n_samples, std::uint64_t seed) {
  require(n_samples >= 2, "moments_mc: need at least 2 samples");
  require(xi.size() == m.arc_count(), "moments_mc: xi needs one entry per arc");
  bool zero = true;
  for (double v : xi) zero = zero && v == 0.0;
  if (zero) return {1.0, 0.0, n_samples};
  EnvironmentSampler sampler(m, ws);
  std::vector<double> vals(n_samples);
  for (std::size_t r = 0; r < n_samples; ++r) {
    auto env = sampler.sample(derive_seed(seed, r));
    vals[r] = std::exp(log_power(env.omega, xi));
  }
  return make_estimate(vals);
}

Estimate moments_importance(const ArcGraphModel& m, const WeightSystem& ws, std::span<const double> xi,
                            std::size_t n_samples, std::uint64_t seed) {
  require(n_samples >= 2, "moments_importance: need at least 2 samples");
  require(xi.size() == m.arc_count(), "moments_importance: xi needs one entry per arc");
  validate_weights(m, ws);
  const auto& g = m.graph;
  std::vector<HypergeomParams> laws;
  std::vector<std::vector<double>> lz;
  for (std::size_t x = 0; x < g.vertex_count(); ++x) {
    laws.push_back(vertex_params(m, ws, static_cast<VertexId>(x)));
    lz.push_back(row_log_min(laws.back()));
  }
  std::vector<double> lw(n_samples), y(n_samples);
  std::vector<double> u(g.edge_count()), local;
  for (std::size_t r = 0; r < n_samples; ++r) {
    double logw = 0.0;
    for (std::size_t x = 0; x < g.vertex_count(); ++x) {
      const auto& p = laws[x];
      local.resize(p.n());
      Engine eng(derive_seed(derive_seed(seed, r), x));
      sample_dirichlet(eng, p.alpha, local);
      if (p.n() > 1) logw += log_accept(p, local, lz[x]);
      const auto out = g.out_edges(static_cast<VertexId>(x));
      for (std::size_t i = 0; i < out.size(); ++i) u[static_cast<std::size_t>(out[i])] = local[i];
    }
    auto env = environment_from_u(m, ws, u);
    lw[r] = logw;
    y[r] = std::exp(log_power(env.omega, xi));
  }
  double lmax = -INFINITY;
  for (double v : lw) lmax = std::max(lmax, v);
  double sw = 0.0, swy = 0.0;
  std::vector<double> w(n_samples);
  for (std::size_t r = 0; r < n_samples; ++r) {
    w[r] = std::exp(lw[r] - lmax);
    sw += w[r];
    swy += w[r] * y[r];
  }
  const double mean = swy / sw;
  double var = 0.0;
  for (std::size_t r = 0; r < n_samples; ++r) var += w[r] * w[r] * (y[r] - mean) * (y[r] - mean);
  return {mean, std::sqrt(var) / sw, n_samples};
}

void write_environment(std::ostream& os, const ArcGraphModel& m, const Environment& env,
                       const std::string& provenance_json) {
  require(env.u.size() == m.edge_count(), "write_environment: environment must carry u");
  nlohmann::ordered_json j;
  j["format"] = "hypwalk-environment";
  j["version"] = 1;
  j["provenance"] = nlohmann::ordered_json::parse(provenance_json);
  auto& verts = j["vertices"] = nlohmann::ordered_json::array();
  for (std::size_t x = 0; x < m.graph.vertex_count(); ++x) {
    nlohmann::ordered_json v;
    v["vertex"] = x;
    auto out = m.graph.out_edges(static_cast<VertexId>(x));
    v["edges"] = std::vector<EdgeId>(out.begin(), out.end());
    std::vector<double> u;
    for (EdgeId e : out) u.push_back(env.u[static_cast<std::size_t>(e)]);
    v["u"] = u;
    verts.push_back(std::move(v));
  }
  os << j.dump(1) << '\n';
}

EnvironmentDump read_environment(std::istream& is, const ArcGraphModel& m, const WeightSystem& ws) {
  nlohmann::ordered_json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& ex) {
    throw PreconditionError(std::string("environment dump: ") + ex.what());
  }
  require(j.value("format", "") == "hypwalk-environment", "environment dump: unknown format");
  std::vector<double> u(m.edge_count(), 0.0);
  const auto& verts = j.at("vertices");
  require(verts.size() == m.graph.vertex_count(), "environment dump: vertex count mismatch");
  for (const auto& v : verts) {
    auto edges = v.at("edges").get<std::vector<EdgeId>>();
    auto vals = v.at("u").get<std::vector<double>>();
    require(edges.size() == vals.size(), "environment dump: edges and u differ in length");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      require(edges[i] >= 0 && static_cast<std::size_t>(edges[i]) < u.size(), "environment dump: bad edge id");
      u[static_cast<std::size_t>(edges[i])] = vals[i];
    }
  }
  EnvironmentDump d{j.at("provenance").dump(), environment_from_u(m, ws, std::move(u))};
  check_environment(m, d.env);
  return d;
}

}  // namespace hypwalk
