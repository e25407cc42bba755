#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "kflat/studies.hpp"

namespace {

using namespace kflat;

int run_analytic(const std::string& name, int kappa, int d, int k, int i, int l, int m,
                 double t, double r, double s, double xi, double y, bool quiet) {
  double value = 0.0;
  std::string note;
  if (name == "omega") {
    value = omega(l);
  } else if (name == "sn") {
    value = sn(kappa, s);
  } else if (name == "cs") {
    value = cs(kappa, s);
  } else if (name == "ball_volume") {
    value = ball_volume(SpaceSpec(kappa, d), r);
  } else if (name == "slice_volume") {
    value = slice_volume(SpaceSpec(kappa, d), k, r, s);
  } else if (name == "crofton_constant") {
    value = crofton_constant(d, k, i);
  } else if (name == "hyperplane_intersection_constant") {
    value = hyperplane_intersection_constant(d, k);
  } else if (name == "multi_intersection_constant") {
    value = multi_intersection_constant(d, k, m);
  } else if (name == "radial_flat_density") {
    value = radial_flat_density(SpaceSpec(kappa, d), k, s);
  } else if (name == "flat_measure_of_ball") {
    value = flat_measure_of_ball(SpaceSpec(kappa, d), k, r);
  } else if (name == "slice_power_integral") {
    value = slice_power_integral(SpaceSpec(kappa, d), k, l, r);
  } else if (name == "functional_mean") {
    value = functional_mean(ProcessSpec(SpaceSpec(kappa, d), k, t, m), r);
  } else if (name == "functional_variance") {
    value = functional_variance(ProcessSpec(SpaceSpec(kappa, d), k, t, m), r);
  } else if (name == "kernel_prefactor") {
    value = kernel_prefactor(d, k, m, i, t);
  } else if (name == "slice_power_growth") {
    value = slice_power_growth(k, l, d, r);
  } else if (name == "variance_growth") {
    const GrowthClass g = variance_growth(d, k, m);
    if (!quiet) std::printf("%s\n", g.rate_description.c_str());
    return 0;
  } else if (name == "limit_cumulant") {
    value = limit_cumulant(d, k, l);
  } else if (name == "levy_density") {
    value = levy_density(d, k, y);
  } else if (name == "limit_profile") {
    value = limit_profile(d, k, s);
  } else if (name == "prelimit_profile") {
    value = prelimit_profile(d, k, r, s);
  } else if (name == "limit_cf") {
    const auto v = limit_cf(d, k, xi);
    std::printf("%.15g%+.15gi\n", v.real(), v.imag());
    return 0;
  } else if (name == "prelimit_cf") {
    const auto v = prelimit_cf(d, k, r, xi);
    std::printf("%.15g%+.15gi\n", v.real(), v.imag());
    return 0;
  } else {
    std::fprintf(stderr, "unknown analytic quantity: %s\n", name.c_str());
    return 1;
  }
  std::printf("%.15g\n", value);
  return 0;
}

int run_simulate(int kappa, int d, int k, double t, double r, std::uint64_t seed,
                 const std::string& out_path, bool quiet) {
  const SpaceSpec space(kappa, d);
  RngStream rng(seed, 0);
  const FlatProcessSample sample = sample_process(space, k, t, r, rng);
  std::ostringstream os;
  os << "# seed: " << seed << "\n";
  os << "# kappa: " << kappa << " d: " << d << " k: " << k << " t: " << t << " r: " << r
     << "\n";
  os << "# flats: " << sample.flats.size() << "\n";
  os << "distance";
  const int n = space.coord_dim();
  for (int j = 0; j < n; ++j) os << ",dir_" << j;
  os << "\n";
  for (const auto& f : sample.flats) {
    const double s = flat_distance_to_origin(f);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(n);
    if (kappa > 0) {
      Eigen::VectorXd p = Eigen::VectorXd::Zero(n);
      p(d) = 1.0;
      const Eigen::VectorXd coef = f.frame.transpose() * p;
      dir = coef.norm() > 1e-14 ? Eigen::VectorXd(f.frame * coef / coef.norm()) : f.frame.col(0);
    } else if (f.foot.norm() > 1e-14) {
      dir = f.foot / f.foot.norm();
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", s);
    os << buf;
    for (int j = 0; j < n; ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", dir(j));
      os << ',' << buf;
    }
    os << "\n";
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::fprintf(stderr, "cannot open output file %s\n", out_path.c_str());
      return 1;
    }
    f << os.str();
    if (!quiet) std::fprintf(stderr, "wrote %s\n", out_path.c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson k-flat processes in constant curvature spaces: analytics, simulation "
               "and verification studies"};
  app.require_subcommand(1);
  app.fallthrough();

  // analytic
  auto* an = app.add_subcommand("analytic", "print a named closed-form quantity");
  std::string an_name;
  int an_kappa = -1, an_d = 2, an_k = 1, an_i = 0, an_l = 2, an_m = 1;
  double an_t = 1.0, an_r = 1.0, an_s = 0.0, an_xi = 1.0, an_y = 0.5;
  bool quiet = false;
  an->add_option("name", an_name, "quantity name")->required();
  an->add_option("--kappa", an_kappa, "curvature (-1, 0, +1)");
  an->add_option("--d", an_d, "space dimension");
  an->add_option("--k", an_k, "flat dimension (or slice dimension j)");
  an->add_option("--i", an_i, "section dimension / chaos level");
  an->add_option("--l", an_l, "power / cumulant order / omega index");
  an->add_option("--m", an_m, "intersection order");
  an->add_option("--t", an_t, "intensity");
  an->add_option("--r", an_r, "ball radius");
  an->add_option("--s", an_s, "distance argument");
  an->add_option("--xi", an_xi, "characteristic function argument");
  an->add_option("--y", an_y, "Levy density argument in (0,1)");

  // simulate
  auto* sim = app.add_subcommand("simulate", "sample one flat process realization to CSV");
  int sm_kappa = -1, sm_d = 2, sm_k = 1;
  double sm_t = 1.0, sm_r = 2.0;
  std::uint64_t sm_seed = 0;
  std::string sm_out;
  sim->add_option("--kappa", sm_kappa, "curvature");
  sim->add_option("--d", sm_d, "space dimension");
  sim->add_option("--k", sm_k, "flat dimension");
  sim->add_option("--t", sm_t, "intensity");
  sim->add_option("--r", sm_r, "ball radius");
  sim->add_option("--seed", sm_seed, "rng seed");
  sim->add_option("--out", sm_out, "output CSV path (stdout if omitted)");

  // study
  auto* st = app.add_subcommand("study", "run a named verification study");
  std::string st_name, st_config, st_out;
  std::uint64_t st_seed = 0;
  std::int64_t st_replicates = 0;
  bool st_seed_set = false, st_reps_set = false;
  st->add_option("name", st_name, "study name (or give --config)");
  st->add_option("--config", st_config, "JSON config path");
  st->add_option("--seed", st_seed, "override seed")->each([&](const std::string&) {
    st_seed_set = true;
  });
  st->add_option("--replicates", st_replicates, "override replicate count")
      ->each([&](const std::string&) { st_reps_set = true; });
  st->add_option("--out", st_out, "output CSV path (stdout if omitted)");

  app.add_flag("--quiet", quiet, "suppress progress notes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (an->parsed())
      return run_analytic(an_name, an_kappa, an_d, an_k, an_i, an_l, an_m, an_t, an_r, an_s,
                          an_xi, an_y, quiet);
    if (sim->parsed())
      return run_simulate(sm_kappa, sm_d, sm_k, sm_t, sm_r, sm_seed, sm_out, quiet);

    StudyConfig cfg;
    if (!st_config.empty()) {
      std::ifstream f(st_config);
      if (!f) {
        std::fprintf(stderr, "cannot read config %s\n", st_config.c_str());
        return 1;
      }
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = parse_study_config(ss.str());
      if (!st_name.empty() && parse_study_kind(st_name) != cfg.study) {
        std::fprintf(stderr, "study name disagrees with config\n");
        return 1;
      }
    } else if (!st_name.empty()) {
      cfg.study = parse_study_kind(st_name);
      cfg.canonical_text = st_name;
    } else {
      std::fprintf(stderr, "study: give a name or --config\n");
      return 1;
    }
    if (st_seed_set) cfg.seed = st_seed;
    if (st_reps_set) cfg.replicates = st_replicates;
    if (!st_out.empty()) cfg.output_path = st_out;

    const ExperimentReport rep = run_study(cfg);
    if (cfg.output_path.empty()) {
      write_csv(rep, std::cout);
    } else {
      std::ofstream f(cfg.output_path);
      if (!f) {
        std::fprintf(stderr, "cannot open output file %s\n", cfg.output_path.c_str());
        return 1;
      }
      write_csv(rep, f);
    }
    if (!quiet)
      std::fprintf(stderr, "study %s: %zu rows, %s, %.1fs\n",
                   study_kind_name(cfg.study).c_str(), rep.rows.size(),
                   rep.all_pass() ? "all pass" : "FAILURES", rep.wall_time_s);
    return rep.all_pass() ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
