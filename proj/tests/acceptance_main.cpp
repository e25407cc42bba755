// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria. Run a single criterion with --only N.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "brute_force.hpp"
#include "kflat/parallel.hpp"
#include "kflat/studies.hpp"

using namespace kflat;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr std::uint64_t kSeed = 20260810;

struct Criterion {
  int number;
  std::string name;
  std::function<bool(std::string&)> run;
};

bool rows_pass(const ExperimentReport& rep, const std::string& prefix, std::string& detail) {
  bool ok = true;
  for (const auto& row : rep.rows) {
    if (row.name.rfind(prefix, 0) != 0) continue;
    char buf[160];
    std::snprintf(buf, sizeof buf, " %s=%.4g(target %.4g)%s", row.name.c_str(), row.estimate,
                  row.analytic_target, row.pass ? "" : " FAILED");
    detail += buf;
    ok = ok && row.pass;
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 1
bool spherical_normalization(std::string& detail) {
  double worst = 0.0;
  for (int d = 2; d <= 6; ++d) {
    for (int k = 0; k <= d - 1; ++k) {
      const double total = flat_measure_of_ball(SpaceSpec(1, d), k, 0.5 * kPi);
      const double target = omega(d + 1) / omega(k + 1);
      worst = std::max(worst, std::abs(total / target - 1.0));
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max relative error %.2e (tolerance 1e-8)", worst);
  detail = buf;
  return worst <= 1e-8;
}

// ---------------------------------------------------------------- criterion 2
bool crofton_collapse(std::string& detail) {
  double worst = 0.0;
  int cases = 0;
  for (int kappa : {-1, 0, 1}) {
    const std::vector<double> radii = kappa == 1 ? std::vector<double>{0.5, 1.0, 0.5 * kPi}
                                                 : std::vector<double>{0.5, 1.5, 3.0};
    for (int d = 2; d <= 5; ++d) {
      for (int j = 1; j <= d - 1; ++j) {
        for (double r : radii) {
          const double vol = ball_volume(SpaceSpec(kappa, d), r);
          const double got = slice_power_integral(SpaceSpec(kappa, d), j, 1, r);
          worst = std::max(worst, std::abs(got / vol - 1.0));
          ++cases;
        }
      }
    }
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "%d cases, max relative error %.2e (tolerance 1e-8)", cases,
                worst);
  detail = buf;
  return worst <= 1e-8;
}

// ---------------------------------------------------------------- criterion 3
bool blaschke_petkantschin(std::string& detail) {
  struct Cfg {
    int kappa, d, k;
    double r;
  };
  const Cfg cfgs[] = {{0, 2, 1, 1.0}, {-1, 2, 1, 2.0}, {-1, 3, 1, 1.5}, {1, 2, 1, kPi / 4}};
  bool ok = true;
  for (const auto& c : cfgs) {
    StudyConfig cfg;
    cfg.study = StudyKind::BlaschkePetkantschin;
    cfg.kappa = c.kappa;
    cfg.d = c.d;
    cfg.k = c.k;
    cfg.r = c.r;
    cfg.pairs = 1000000;
    cfg.seed = kSeed + c.kappa + 10 * c.d;
    const ExperimentReport rep = run_bp_check(cfg);
    char buf[120];
    std::snprintf(buf, sizeof buf, " (%d,%d,%d): ratio %.5f +- %.5f%s", c.kappa, c.d, c.k,
                  rep.rows[0].ratio, rep.rows[0].std_error / rep.rows[0].analytic_target,
                  rep.rows[0].pass ? "" : " FAILED");
    detail += buf;
    ok = ok && rep.rows[0].pass;
  }
  return ok;
}

// ------------------------------------------------------- criteria 4 and 5
ExperimentReport moment_report(int kappa, int d, int k, int m, double r) {
  StudyConfig cfg;
  cfg.study = StudyKind::Moments;
  cfg.kappa = kappa;
  cfg.d = d;
  cfg.k = k;
  cfg.t = 1.0;
  cfg.m = m;
  cfg.radii = {r};
  cfg.replicates = 10000;
  cfg.seed = kSeed + 1000 + kappa + 10 * d + 100 * m;
  return run_moment_check(cfg);
}

struct MomentCase {
  int kappa, d, k, m;
  double r;
};
const MomentCase kMomentCases[] = {
    {-1, 2, 1, 1, 2.0}, {-1, 2, 1, 2, 2.0}, {0, 2, 1, 2, 1.0}, {1, 2, 1, 1, kPi / 4}};

bool mean_law(std::string& detail) {
  bool ok = true;
  for (const auto& c : kMomentCases) {
    const ExperimentReport rep = moment_report(c.kappa, c.d, c.k, c.m, c.r);
    std::string local;
    const bool good = rows_pass(rep, "mean", local);
    char buf[160];
    std::snprintf(buf, sizeof buf, " (%d,%d,%d,m=%d):%s", c.kappa, c.d, c.k, c.m,
                  local.c_str());
    detail += buf;
    ok = ok && good;
  }
  return ok;
}

bool variance_law(std::string& detail) {
  bool ok = true;
  for (const auto& c : kMomentCases) {
    const ExperimentReport rep = moment_report(c.kappa, c.d, c.k, c.m, c.r);
    std::string local;
    const bool good = rows_pass(rep, "variance", local);
    char buf[160];
    std::snprintf(buf, sizeof buf, " (%d,%d,%d,m=%d):%s", c.kappa, c.d, c.k, c.m,
                  local.c_str());
    detail += buf;
    ok = ok && good;
  }
  // exact Euclidean value by quadrature
  const double exact = functional_variance(ProcessSpec(SpaceSpec(0, 2), 1, 1.0, 1), 1.0);
  const double target = 16.0 / 3.0;
  const bool exact_ok = std::abs(exact - target) <= 1e-10 * target;
  char buf[96];
  std::snprintf(buf, sizeof buf, " exact(0,2,1): |%.12f - 16/3| rel %.1e", exact,
                std::abs(exact / target - 1.0));
  detail += buf;
  return ok && exact_ok;
}

// ---------------------------------------------------------------- criterion 6
bool variance_growth_slopes(std::string& detail) {
  auto slope = [](int d, int k) {
    const ProcessSpec proc(SpaceSpec(-1, d), k, 1.0, 1);
    const double v4 = functional_variance(proc, 4.0);
    const double v6 = functional_variance(proc, 6.0);
    return 0.5 * (std::log(v6) - std::log(v4));
  };
  const double s31 = slope(3, 1);
  const double s43 = slope(4, 3);
  char buf[120];
  std::snprintf(buf, sizeof buf, "(3,1): slope %.4f vs 2; (4,3): slope %.4f vs 4", s31, s43);
  detail = buf;
  return std::abs(s31 - 2.0) <= 0.05 * 2.0 && std::abs(s43 - 4.0) <= 0.05 * 4.0;
}

// ------------------------------------------------------- criteria 7 and 8
bool clt_radius(std::string& detail) {
  bool ok = true;
  for (int m : {1, 2}) {
    StudyConfig cfg;
    cfg.study = StudyKind::CltRadius;
    cfg.kappa = -1;
    cfg.d = 2;
    cfg.k = 1;
    cfg.t = 1.0;
    cfg.m = m;
    cfg.radii = {1.0, 2.0, 3.0};
    cfg.replicates = 2000;
    cfg.seed = kSeed + 7000 + m;
    cfg.tolerances["ks_final"] = 0.05;
    const ExperimentReport rep = run_clt_study(cfg);
    std::string local;
    const bool good = rows_pass(rep, "ks", local);
    char buf[240];
    std::snprintf(buf, sizeof buf, " m=%d:%s", m, local.c_str());
    detail += buf;
    ok = ok && good;
    if (!good && m == 2) {
      // The m=2 distance at r=3 sits near 0.10 (the standardized sample has
      // skewness ~1.1); show that the sequence keeps falling at larger radii.
      StudyConfig ext = cfg;
      ext.radii = {4.0, 5.0};
      ext.tolerances["ks_final"] = 1.0;
      const ExperimentReport erep = run_clt_study(ext);
      std::string einfo;
      rows_pass(erep, "ks_r", einfo);
      detail += " [informational extension:" + einfo + "]";
    }
  }
  return ok;
}

bool clt_intensity(std::string& detail) {
  StudyConfig cfg;
  cfg.study = StudyKind::CltIntensity;
  cfg.kappa = 0;
  cfg.d = 2;
  cfg.k = 1;
  cfg.m = 2;
  cfg.r = 1.0;
  cfg.intensities = {1.0, 4.0, 16.0};
  cfg.replicates = 2000;
  cfg.seed = kSeed + 8000;
  // the criterion pins monotone decrease only
  cfg.tolerances["ks_final"] = 1.0;
  const ExperimentReport rep = run_clt_study(cfg);
  bool ok = true;
  for (const auto& row : rep.rows) {
    char buf[120];
    std::snprintf(buf, sizeof buf, " %s=%.4g%s", row.name.c_str(), row.estimate,
                  row.pass ? "" : " FAILED");
    detail += buf;
    if (row.name == "ks_strictly_decreasing") ok = ok && row.pass;
  }
  return ok;
}

// ---------------------------------------------------------------- criterion 9
StudyConfig limit_cfg() {
  StudyConfig cfg;
  cfg.study = StudyKind::LimitLaw;
  cfg.kappa = -1;
  cfg.d = 4;
  cfg.k = 3;
  cfg.m = 1;
  cfg.r = 6.0;
  cfg.T = 12.0;
  cfg.replicates = 10000;
  cfg.z_replicates = 100000;
  cfg.exact_budget = 1e5;
  cfg.seed = kSeed + 9000;
  return cfg;
}

bool limit_law(std::string& detail) {
  const ExperimentReport rep = run_limit_study(limit_cfg());
  bool ok = true;
  for (const auto& row : rep.rows) {
    const bool gating = row.name == "z_variance" || row.name == "z_cum3" ||
                        row.name == "skewness" || row.name == "prefactor_uniquely_resolved";
    const bool info = row.name == "prefactor_is_2pow_km1" ||
                      row.name == "variance_ratio_c_2pow_km1" ||
                      row.name == "variance_ratio_c_2pow_km2";
    if (!gating && !info) continue;
    char buf[140];
    std::snprintf(buf, sizeof buf, " %s=%.4g%s", row.name.c_str(), row.estimate,
                  !gating || row.pass ? "" : " FAILED");
    detail += buf;
    if (gating) ok = ok && row.pass;
  }
  return ok;
}

// --------------------------------------------------------------- criterion 10
bool characteristic_functions(std::string& detail) {
  const int d = 4, k = 3;
  const double r = 6.0;
  bool ok = true;

  const std::complex<double> at0 = limit_cf(d, k, 0.0);
  ok = ok && std::abs(at0 - std::complex<double>(1.0, 0.0)) == 0.0;

  // second cumulant of the variable behind psi (profile-scaled limit)
  const double h = 1e-3;
  const double second =
      -(limit_log_cf(d, k, h) + limit_log_cf(d, k, -h)).real() / (h * h);
  const double ck = limit_profile_constant(k);
  const double target2 = ck * ck * limit_cumulant(d, k, 2);
  const bool curvature_ok = std::abs(second / target2 - 1.0) <= 1e-4;
  ok = ok && curvature_ok;

  // empirical characteristic function of 1e5 rescaled functional draws
  RescaledFunctionalSampler sampler(d, k, r, QuadratureSpec{}, 1e5);
  const std::int64_t n = 100000;
  std::vector<double> xs(n);
  par::for_each_index(n, par::Exec::OpenMP, [&](std::int64_t i) {
    RngStream rng(kSeed + 10000, static_cast<std::uint64_t>(i));
    xs[static_cast<std::size_t>(i)] = sampler.draw(rng);
  });
  const std::vector<double> grid = {-2.0, -1.0, 1.0, 2.0};
  const auto emp = empirical_cf(xs, grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(emp[i] - prelimit_cf(d, k, r, grid[i])));
  ok = ok && worst < 0.02;

  char buf[200];
  std::snprintf(buf, sizeof buf,
                "|psi(0)-1|=0; -(log psi)''(0)=%.6f vs %.6f (rel %.1e); max CF error %.4f "
                "(tolerance 0.02)",
                second, target2, std::abs(second / target2 - 1.0), worst);
  detail = buf;
  return ok;
}

// --------------------------------------------------------------- criterion 11
bool cumulant_triple(std::string& detail) {
  double worst = 0.0;
  int cases = 0;
  for (int d = 4; d <= 6; ++d) {
    for (int k = 3; k <= d - 1; ++k) {
      if (2 * k <= d + 1) continue;
      for (int l : {2, 3, 4}) {
        const double gamma_form = limit_cumulant(d, k, l);
        const double quad = limit_cumulant_quadrature(d, k, l);
        const double expo = static_cast<double>(d + k - 2) / (k - 1);
        const double c = 2.0 / (k - 1);
        const double levy = integrate_tanh_sinh_offset(
            [&](double y, double, double db) {
              const double inner = -std::expm1(c * std::log1p(-db));
              return omega(d - k) / (k - 1) * std::pow(y, l - expo) *
                     std::pow(inner, 0.5 * (d - k) - 1.0);
            },
            0.0, 1.0, QuadratureSpec{1e-12, 1e-15, 60});
        worst = std::max(worst, std::abs(quad / gamma_form - 1.0));
        worst = std::max(worst, std::abs(levy / gamma_form - 1.0));
        worst = std::max(worst, std::abs(levy / quad - 1.0));
        ++cases;
      }
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "%d (d,k,l) cases, worst pairwise relative gap %.2e (tolerance 1e-8)", cases,
                worst);
  detail = buf;
  return worst <= 1e-8;
}

// --------------------------------------------------------------- criterion 12
bool variance_shape(std::string& detail) {
  bool ok = true;
  struct Cfg {
    int kappa;
    double r;
  };
  for (const Cfg& c : {Cfg{0, 1.0}, Cfg{-1, 1.5}}) {
    StudyConfig cfg;
    cfg.study = StudyKind::VarianceShape;
    cfg.kappa = c.kappa;
    cfg.d = 2;
    cfg.k = 1;
    cfg.m = 1;
    cfg.r = c.r;
    cfg.pairs = 1000000;
    cfg.replicates = 600;
    cfg.seed = kSeed + 12000 + c.kappa;
    const ExperimentReport rep = run_variance_shape_study(cfg);
    for (const auto& row : rep.rows) {
      if (row.name.rfind("ball_minus_competitor", 0) == 0 ||
          row.name == "control_ball_vs_ball") {
        char buf[140];
        std::snprintf(buf, sizeof buf, " kappa=%d %s=%.4g+-%.2g%s", c.kappa, row.name.c_str(),
                      row.estimate, row.std_error, row.pass ? "" : " FAILED");
        detail += buf;
        ok = ok && row.pass;
      }
    }
  }
  return ok;
}

// --------------------------------------------------------------- criterion 13
bool structural_invariants(std::string& detail) {
  // (a) zero degenerate intersections over 1e5 random m-tuples
  struct Cfg {
    int kappa, d, k, m;
  };
  const Cfg cfgs[] = {{0, 2, 1, 2}, {-1, 2, 1, 2}, {1, 2, 1, 2},  {-1, 3, 2, 2},
                      {0, 3, 2, 3}, {1, 3, 2, 2},  {-1, 4, 3, 2}, {-1, 3, 2, 3}};
  std::int64_t degenerates = 0, tuples = 0;
  for (const auto& c : cfgs) {
    const SpaceSpec space(c.kappa, c.d);
    const double r = c.kappa == 1 ? 1.3 : 2.0;
    const std::int64_t reps = 12500;
    std::vector<double> flags(reps);
    par::for_each_index(reps, par::Exec::OpenMP, [&](std::int64_t i) {
      RngStream rng(kSeed + 13000 + c.kappa + 10 * c.d + 100 * c.k,
                    static_cast<std::uint64_t>(i));
      std::vector<Flat> flats;
      for (int j = 0; j < c.m; ++j) flats.push_back(sample_flat(space, c.k, r, rng));
      flags[static_cast<std::size_t>(i)] =
          intersect_flats(space, flats).kind == IntersectKind::Degenerate ? 1.0 : 0.0;
    });
    for (double f : flags) degenerates += static_cast<std::int64_t>(f);
    tuples += reps;
  }

  // (b) brute-force oracle equality on a 200-case corpus with n <= 8 flats
  struct Oracle {
    int kappa, d, k, m;
  };
  const Oracle ocfg[] = {{0, 2, 1, 2}, {-1, 2, 1, 2}, {1, 2, 1, 2}, {-1, 3, 2, 2},
                         {0, 3, 2, 3}, {-1, 3, 2, 3}, {1, 3, 2, 2}, {-1, 4, 3, 2}};
  double worst = 0.0;
  int corpus = 0;
  for (const auto& c : ocfg) {
    const SpaceSpec space(c.kappa, c.d);
    const double r = c.kappa == 1 ? 1.2 : 2.0;
    for (int rep = 0; rep < 25; ++rep) {
      RngStream rng(kSeed + 14000 + corpus, static_cast<std::uint64_t>(rep));
      const int n = 2 + static_cast<int>(rng.uniform() * 7.0);
      FlatProcessSample s{space, c.k, 1.0, r, {}, kSeed, 0, 0};
      for (int i = 0; i < n; ++i) s.flats.push_back(sample_flat(space, c.k, r, rng));
      const double fast = intersection_functional(s, BallWindow{r}, c.m).value;
      const double ref = kflat::testing::brute_force_functional(s, r, c.m);
      const double scale = std::max({1.0, std::abs(fast), std::abs(ref)});
      worst = std::max(worst, std::abs(fast - ref) / scale);
      ++corpus;
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "degenerates %lld/%lld tuples; oracle corpus %d cases, worst gap %.2e "
                "(tolerance 1e-12)",
                static_cast<long long>(degenerates), static_cast<long long>(tuples), corpus,
                worst);
  detail = buf;
  return degenerates == 0 && worst <= 1e-12;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);
  }
  const std::vector<Criterion> criteria = {
      {1, "spherical_normalization", spherical_normalization},
      {2, "crofton_collapse", crofton_collapse},
      {3, "blaschke_petkantschin", blaschke_petkantschin},
      {4, "mean_law", mean_law},
      {5, "variance_law", variance_law},
      {6, "variance_growth", variance_growth_slopes},
      {7, "clt_radius", clt_radius},
      {8, "clt_intensity", clt_intensity},
      {9, "limit_law", limit_law},
      {10, "characteristic_functions", characteristic_functions},
      {11, "cumulant_triple_agreement", cumulant_triple},
      {12, "variance_shape", variance_shape},
      {13, "structural_invariants", structural_invariants},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    if (only != 0 && c.number != only) continue;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %02d %-28s %s  [%.1fs] %s\n", c.number, c.name.c_str(),
                ok ? "PASS" : "FAIL", secs, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
  }
  return failures;
}
