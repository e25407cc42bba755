#pragma once

#include <map>
#include <optional>

#include "kflat/functionals.hpp"
#include "kflat/limitlaw.hpp"
#include "kflat/report.hpp"
#include "kflat/stats.hpp"

namespace kflat {

enum class StudyKind {
  Crofton,
  BlaschkePetkantschin,
  Moments,
  CltRadius,
  CltIntensity,
  LimitLaw,
  VarianceShape,
};

/// Seeded, configurable study description; mirrors the JSON config (snake_case
/// keys, unknown keys rejected).
struct StudyConfig {
  StudyKind study = StudyKind::Moments;
  int kappa = -1;
  int d = 2;
  int k = 1;
  double t = 1.0;
  int m = 1;
  std::vector<double> radii;
  std::vector<double> intensities;
  std::int64_t replicates = 1000;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
  std::string output_path;

  double r = 1.0;                       // single-radius studies
  double T = 12.0;                      // limit-law truncation height
  double exact_budget = 1e5;            // hybrid sampler head budget
  std::int64_t pairs = 1000000;         // pair-MC budgets
  std::int64_t flat_samples = 200000;   // crofton MC flats
  std::int64_t z_replicates = 100000;   // limit-variable draws
  bool parallel = true;

  std::string canonical_text;

  double tol(const std::string& name, double fallback) const {
    auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
  }
};

StudyKind parse_study_kind(const std::string& name);
std::string study_kind_name(StudyKind kind);

/// Strict JSON parse: unknown keys raise std::invalid_argument.
StudyConfig parse_study_config(const std::string& json_text);

ExperimentReport run_crofton_check(const StudyConfig& cfg);
ExperimentReport run_bp_check(const StudyConfig& cfg);
ExperimentReport run_moment_check(const StudyConfig& cfg);
ExperimentReport run_clt_study(const StudyConfig& cfg);
ExperimentReport run_limit_study(const StudyConfig& cfg);
ExperimentReport run_variance_shape_study(const StudyConfig& cfg);

/// Dispatch on cfg.study; fills metadata (seed, digest, wall time).
ExperimentReport run_study(const StudyConfig& cfg);

/// Replicate engine: values[i] = f(stream i + stream_base). The OpenMP and
/// serial paths give identical vectors.
std::vector<double> replicate_values(std::int64_t n, std::uint64_t seed,
                                     std::uint64_t stream_base, bool parallel,
                                     const std::function<double(RngStream&)>& f);

struct McEstimate {
  double mean = 0.0;
  double se = 0.0;
};

/// Mean and batch-means standard error over equal-size batches.
McEstimate batch_mean_se(std::span<const double> batch_means);

}  // namespace kflat
