#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace kflat {

inline constexpr const char* kVersion = "0.1.0";

struct ReportRow {
  std::string name;
  double estimate = 0.0;
  double std_error = 0.0;
  double analytic_target = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

/// Named statistics rows plus run metadata. The CSV serialization is
/// byte-deterministic for a fixed config+seed; wall time therefore stays out
/// of the file.
struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::uint64_t seed = 0;
  std::string config_digest;
  double wall_time_s = 0.0;

  void add(const std::string& name, double estimate, double std_error, double target,
           bool pass);
  bool all_pass() const;
};

/// FNV-1a digest of the canonical config text.
std::string config_digest(const std::string& canonical);

void write_csv(const ExperimentReport& report, std::ostream& os);
std::string csv_string(const ExperimentReport& report);

}  // namespace kflat
