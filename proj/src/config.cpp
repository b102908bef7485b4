#include "hypwalk/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <fstream>
#include <functional>
#include <map>

#include "hypwalk/error.hpp"

namespace hypwalk {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad(const std::string& key, const std::string& what) {
  throw PreconditionError("config: " + key + ": " + what);
}

double to_double(const std::string& text, const std::string& key) {
  const auto s = trim(text);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(key, "expected a number, got '" + s + "'");
  return v;
}

template <class Int>
Int to_int(const std::string& text, const std::string& key) {
  const auto s = trim(text);
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) bad(key, "expected an integer, got '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<int> to_ints(const std::string& text, const std::string& key) {
  std::vector<int> v;
  if (trim(text).empty()) return v;
  for (const auto& part : split(text, ',')) v.push_back(to_int<int>(part, key));
  return v;
}

bool to_bool(const std::string& text, const std::string& key) {
  const auto s = trim(text);
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  bad(key, "expected true or false");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"graph.kind",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const auto s = trim(v);
         if (s == "torus") c.exp.graph.kind = GraphSpec::Kind::torus;
         else if (s == "box") c.exp.graph.kind = GraphSpec::Kind::box;
         else if (s == "file") c.exp.graph.kind = GraphSpec::Kind::file;
         else bad(k, "expected torus, box or file");
       }},
      {"graph.d", [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.graph.d = to_int<int>(v, k); }},
      {"graph.n", [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.graph.n = to_int<int>(v, k); }},
      {"graph.root_direction",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.graph.root_direction = to_int<int>(v, k); }},
      {"graph.file", [](RunConfig& c, const std::string& v, const std::string&) { c.exp.graph.file = trim(v); }},
      {"weights.alpha",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.weights.alpha = parse_doubles(v, k); }},
      {"weights.beta",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.weights.beta = parse_doubles(v, k); }},
      {"weights.z",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const auto s = trim(v);
         if (s == "ones" || s == "backtrack" || s == "random") {
           c.exp.weights.z = s;
         } else {
           c.exp.weights.z = "matrix";
           c.exp.weights.z_matrix = parse_matrix(s, k);
         }
       }},
      {"weights.z_backtrack",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.weights.z_backtrack = to_double(v, k); }},
      {"weights.z_range",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const auto r = parse_doubles(v, k);
         if (r.size() != 2) bad(k, "expected two numbers lo, hi");
         c.exp.weights.z_lo = r[0];
         c.exp.weights.z_hi = r[1];
       }},
      {"weights.z_seed",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.weights.z_seed = to_int<std::uint64_t>(v, k); }},
      {"experiment.seed",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.seed = to_int<std::uint64_t>(v, k); }},
      {"experiment.replicas",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         c.exp.n_environments = to_int<std::size_t>(v, k);
         c.replicas_set = true;
       }},
      {"experiment.threads",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.threads = to_int<int>(v, k); }},
      {"experiment.mode",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const auto s = trim(v);
         if (s == "serial") c.exp.mode = ExecutionMode::serial;
         else if (s == "parallel") c.exp.mode = ExecutionMode::parallel;
         else bad(k, "expected serial or parallel");
       }},
      {"experiment.s", [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.s_values = parse_doubles(v, k); }},
      {"experiment.p", [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.p_values = parse_doubles(v, k); }},
      {"experiment.n_values",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.n_values = to_ints(v, k); }},
      {"experiment.directions",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.directions = to_ints(v, k); }},
      {"experiment.samples",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.n_samples = to_int<std::size_t>(v, k); }},
      {"experiment.cycles",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.n_cycles = to_int<std::size_t>(v, k); }},
      {"experiment.cycle_steps",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.cycle_steps = to_int<std::size_t>(v, k); }},
      {"experiment.cases",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.n_cases = to_int<std::size_t>(v, k); }},
      {"experiment.trap_cap",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.trap_cap = to_int<std::uint64_t>(v, k); }},
      {"experiment.tol", [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.quad_tol = to_double(v, k); }},
      {"experiment.z_threshold",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.z_threshold = to_double(v, k); }},
      {"experiment.reversal_z",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.reversal_z = to_double(v, k); }},
      {"experiment.identity_tol",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.identity_tol = to_double(v, k); }},
      {"experiment.duality_tol",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.exp.duality_tol = to_double(v, k); }},
      {"experiment.out", [](RunConfig& c, const std::string& v, const std::string&) { c.out = trim(v); }},
      {"experiment.format",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const auto s = trim(v);
         if (s != "json" && s != "csv" && s != "both") bad(k, "expected json, csv or both");
         c.format = s;
       }},
      {"experiment.method",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const auto s = trim(v);
         if (s != "quadrature" && s != "mc") bad(k, "expected quadrature or mc");
         c.method = s;
       }},
      {"experiment.capacity",
       [](RunConfig& c, const std::string& v, const std::string& k) {
         const auto s = trim(v);
         if (s != "alpha" && s != "boosted" && s != "uniform") bad(k, "expected alpha, boosted or uniform");
         c.capacity = s;
       }},
      {"experiment.capacity_value",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.capacity_value = to_double(v, k); }},
      {"experiment.strength",
       [](RunConfig& c, const std::string& v, const std::string& k) { c.strength = to_double(v, k); }},
      {"experiment.lift", [](RunConfig& c, const std::string& v, const std::string& k) { c.lift = to_bool(v, k); }},
  };
  return table;
}

}  // namespace

std::vector<double> parse_doubles(const std::string& text, const std::string& key) {
  std::vector<double> v;
  if (trim(text).empty()) return v;
  for (const auto& part : split(text, ',')) v.push_back(to_double(part, key));
  return v;
}

std::vector<std::vector<double>> parse_matrix(const std::string& text, const std::string& key) {
  std::vector<std::vector<double>> rows;
  for (const auto& r : split(text, '|')) {
    rows.push_back(parse_doubles(r, key));
    if (rows.back().size() != rows.front().size()) bad(key, "matrix rows differ in length");
  }
  return rows;
}

RunConfig parse_config(std::istream& is) {
  boost::property_tree::ptree pt;
  try {
    boost::property_tree::read_ini(is, pt);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw PreconditionError(std::string("config: ") + e.what());
  }
  RunConfig c;
  const auto& table = setters();
  for (const auto& [section, body] : pt) {
    if (section != "graph" && section != "weights" && section != "experiment")
      throw PreconditionError("config: unknown section [" + section + "]");
    if (body.empty() && !body.data().empty())
      throw PreconditionError("config: key '" + section + "' is outside any section");
    for (const auto& [key, node] : body) {
      const auto full = section + "." + key;
      const auto it = table.find(full);
      if (it == table.end()) throw PreconditionError("config: unknown key '" + full + "'");
      it->second(c, node.data(), full);
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("config: cannot open " + path);
  return parse_config(is);
}

}  // namespace hypwalk
