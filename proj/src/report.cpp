#include "hypwalk/report.hpp"

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>

#include "hypwalk/error.hpp"

namespace hypwalk {

ordered_json report_to_json(const ExperimentReport& r) {
  ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["experiment"] = r.experiment;
  j["provenance"] = {{"version", HYPWALK_VERSION}, {"seed", r.config.at("experiment").at("seed")}};
  j["config"] = r.config;
  j["metadata"] = r.metadata;
  auto& est = j["estimates"] = ordered_json::array();
  for (const auto& g : r.estimates) {
    est.push_back({{"label", g.label},
                   {"params", g.params},
                   {"mean", g.estimate.mean},
                   {"std_error", g.estimate.std_error},
                   {"n_samples", g.estimate.n_samples}});
  }
  auto& flags = j["flags"] = ordered_json::array();
  for (const auto& f : r.flags)
    flags.push_back({{"name", f.name}, {"pass", f.pass}, {"rule", f.rule}, {"evidence", f.evidence}});
  j["all_pass"] = r.all_pass();
  j["notes"] = r.notes;
  return j;
}

void write_report(std::ostream& os, const ExperimentReport& r) { os << report_to_json(r).dump(2) << '\n'; }

ordered_json sidecar_json(double wall_seconds, int threads) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return {{"timestamp", buf}, {"wall_seconds", wall_seconds}, {"threads", threads}};
}

std::string file_safe(const std::string& label) {
  std::string s = label;
  for (auto& c : s) {
    const bool keep = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' ||
                      c == '=' || c == '-';
    if (!keep) c = '_';
  }
  return s;
}

void write_csv(std::ostream& os, const GridEstimate& g) {
  os << "env_index,seed_stream,value\n";
  char buf[64];
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    const auto res = std::to_chars(buf, buf + sizeof buf, g.samples[i]);
    os << i << ',' << (i < g.streams.size() ? g.streams[i] : 0) << ',' << std::string_view(buf, res.ptr - buf) << '\n';
  }
}

std::vector<std::string> write_csv_files(const std::string& prefix, const ExperimentReport& r) {
  std::vector<std::string> paths;
  for (const auto& g : r.estimates) {
    if (g.samples.empty()) continue;
    const auto path = prefix + "_" + file_safe(g.label) + ".csv";
    std::ofstream os(path);
    if (!os) throw PreconditionError("cannot write " + path);
    write_csv(os, g);
    paths.push_back(path);
  }
  return paths;
}

}  // namespace hypwalk
