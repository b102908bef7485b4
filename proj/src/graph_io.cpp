#include "hypwalk/graph_io.hpp"

#include <fstream>
#include <json.hpp>

#include "hypwalk/error.hpp"

namespace hypwalk {

namespace {

using nlohmann::json;

template <class T>
T field(const json& j, const char* key, const char* where) {
  if (!j.contains(key)) throw PreconditionError(std::string("graph file: missing '") + key + "' in " + where);
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw PreconditionError(std::string("graph file: bad type for '") + key + "' in " + where);
  }
}

}  // namespace

GraphFile read_graph_file(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw PreconditionError(std::string("graph file: ") + e.what());
  }
  if (!j.is_object()) throw PreconditionError("graph file: top level must be an object");
  const auto nv = field<long long>(j, "vertices", "graph");
  require(nv >= 1, "graph file: need at least one vertex");
  const auto& je = j.at("edges");
  require(je.is_array(), "graph file: 'edges' must be an array");
  std::vector<Edge> edges;
  std::vector<double> alpha;
  for (std::size_t i = 0; i < je.size(); ++i) {
    const auto& e = je[i];
    if (field<long long>(e, "id", "edge") != static_cast<long long>(i))
      throw PreconditionError("graph file: edge ids must be 0..|E|-1 in order");
    const auto t = field<long long>(e, "tail", "edge"), h = field<long long>(e, "head", "edge");
    require(t >= 0 && t < nv && h >= 0 && h < nv, "graph file: edge endpoint out of range");
    edges.push_back({static_cast<VertexId>(t), static_cast<VertexId>(h)});
    alpha.push_back(e.contains("alpha") ? field<double>(e, "alpha", "edge") : 1.0);
  }
  GraphFile out{ArcGraphModel(DirectedGraph(static_cast<std::size_t>(nv), std::move(edges))), {}, 0};
  const auto& m = out.model;
  out.weights.alpha = std::move(alpha);
  out.weights.z.assign(m.arc_count(), 1.0);
  if (j.contains("z")) {
    require(j.at("z").is_array(), "graph file: 'z' must be an array");
    for (const auto& b : j.at("z")) {
      const auto x = field<long long>(b, "vertex", "z block");
      require(x >= 0 && x < nv, "graph file: z block vertex out of range");
      const auto v = static_cast<VertexId>(x);
      const auto mat = field<std::vector<std::vector<double>>>(b, "matrix", "z block");
      const auto ins = m.graph.in_edges(v), outs = m.graph.out_edges(v);
      require(mat.size() == ins.size(), "graph file: z block needs one row per in-edge");
      for (std::size_t r = 0; r < ins.size(); ++r) {
        require(mat[r].size() == outs.size(), "graph file: z block needs one column per out-edge");
        for (std::size_t c = 0; c < outs.size(); ++c)
          out.weights.z[static_cast<std::size_t>(*m.arcs.find(ins[r], outs[c]))] = mat[r][c];
      }
    }
  }
  if (j.contains("root_edge")) {
    const auto r = field<long long>(j, "root_edge", "graph");
    require(r >= 0 && static_cast<std::size_t>(r) < m.edge_count(), "graph file: root_edge out of range");
    out.root_edge = static_cast<EdgeId>(r);
  }
  validate_weights(m, out.weights);
  return out;
}

GraphFile read_graph_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw PreconditionError("graph file: cannot open " + path);
  return read_graph_file(is);
}

}  // namespace hypwalk
