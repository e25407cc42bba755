#include "kflat/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace kflat {

void ExperimentReport::add(const std::string& name, double estimate, double std_error,
                           double target, bool pass) {
  const double ratio = target != 0.0 ? estimate / target : std::nan("");
  rows.push_back(ReportRow{name, estimate, std_error, target, ratio, pass});
}

bool ExperimentReport::all_pass() const {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

std::string config_digest(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {
std::string fmt(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}
}  // namespace

void write_csv(const ExperimentReport& report, std::ostream& os) {
  os << "# seed: " << report.seed << "\n";
  os << "# config_digest: " << report.config_digest << "\n";
  os << "# version: kflat " << kVersion << "\n";
  os << "name,estimate,std_error,analytic_target,ratio,pass\n";
  for (const auto& r : report.rows) {
    os << r.name << ',' << fmt(r.estimate) << ',' << fmt(r.std_error) << ','
       << fmt(r.analytic_target) << ',' << fmt(r.ratio) << ','
       << (r.pass ? "true" : "false") << "\n";
  }
}

std::string csv_string(const ExperimentReport& report) {
  std::ostringstream ss;
  write_csv(report, ss);
  return ss.str();
}

}  // namespace kflat
