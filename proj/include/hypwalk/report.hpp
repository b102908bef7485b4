#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hypwalk/experiments.hpp"

namespace hypwalk {

inline constexpr const char* kSchemaVersion = "1.0.0";

// Deterministic: same report, same bytes. Per-environment samples are left to
// the CSV files.
ordered_json report_to_json(const ExperimentReport& r);
void write_report(std::ostream& os, const ExperimentReport& r);

// Run facts that may differ between identical runs (wall clock, threads), kept
// out of the report itself.
ordered_json sidecar_json(double wall_seconds, int threads);

// One CSV per estimate that kept samples: <prefix>_<label>.csv with columns
// env_index,seed_stream,value. Returns the paths written.
std::vector<std::string> write_csv_files(const std::string& prefix, const ExperimentReport& r);
void write_csv(std::ostream& os, const GridEstimate& g);

// Label with every character outside [A-Za-z0-9.=-] replaced by '_'.
std::string file_safe(const std::string& label);

}  // namespace hypwalk
