#include <doctest.h>

#include <cmath>

#include "kflat/studies.hpp"

using namespace kflat;

TEST_SUITE_BEGIN("studies");

TEST_CASE("strict config parsing") {
  const char* good = R"({
    "study": "moments",
    "proc": {"kappa": -1, "d": 2, "k": 1, "t": 1.0, "m": 2},
    "radii": [2.0],
    "replicates": 500,
    "seed": 42,
    "tolerances": {"mean_sigma": 3.0},
    "output_path": "out.csv"
  })";
  const StudyConfig cfg = parse_study_config(good);
  CHECK(cfg.study == StudyKind::Moments);
  CHECK(cfg.kappa == -1);
  CHECK(cfg.m == 2);
  CHECK(cfg.radii.size() == 1);
  CHECK(cfg.seed == 42);
  CHECK(cfg.tol("mean_sigma", 0.0) == doctest::Approx(3.0));

  CHECK_THROWS_AS(parse_study_config(R"({"study":"moments","typo_key":1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_study_config(R"({"study":"moments","proc":{"qq":1}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_study_config(R"({"study":"nope"})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_study_config("not json"), std::invalid_argument);
  CHECK_THROWS_AS(parse_study_config(R"({"study":"clt_radius","replicates":10})"),
                  std::invalid_argument);
}

TEST_CASE("regime guard for the radius-mode clt study") {
  StudyConfig cfg;
  cfg.study = StudyKind::CltRadius;
  cfg.kappa = -1;
  cfg.d = 4;
  cfg.k = 3;
  cfg.m = 1;
  cfg.radii = {1.0, 2.0};
  cfg.replicates = 200;
  CHECK_THROWS_WITH_AS(run_clt_study(cfg),
                       "clt_radius: 2k > d+1 is the non-Gaussian regime; use the limit_law "
                       "study",
                       std::invalid_argument);
}

TEST_CASE("reports serialize deterministically") {
  StudyConfig cfg;
  cfg.study = StudyKind::BlaschkePetkantschin;
  cfg.kappa = 0;
  cfg.d = 2;
  cfg.k = 1;
  cfg.r = 1.0;
  cfg.pairs = 20000;
  cfg.seed = 7;
  cfg.canonical_text = "unit-test";
  const ExperimentReport a = run_study(cfg);
  const ExperimentReport b = run_study(cfg);
  CHECK(csv_string(a) == csv_string(b));
  CHECK(a.config_digest == b.config_digest);
  CHECK(a.rows.size() == 1);
  CHECK(a.rows[0].pass);

  // worker-count invariance: serial run serializes identically
  StudyConfig serial = cfg;
  serial.parallel = false;
  CHECK(csv_string(run_study(serial)) == csv_string(a));
}

TEST_CASE("csv shape") {
  ExperimentReport rep;
  rep.seed = 9;
  rep.config_digest = "deadbeef";
  rep.add("alpha", 2.0, 0.1, 2.0, true);
  rep.add("beta", 1.0, 0.0, 4.0, false);
  const std::string csv = csv_string(rep);
  CHECK(csv.find("# seed: 9\n") != std::string::npos);
  CHECK(csv.find("# config_digest: deadbeef\n") != std::string::npos);
  CHECK(csv.find("name,estimate,std_error,analytic_target,ratio,pass\n") != std::string::npos);
  CHECK(csv.find("alpha,2,0.1,2,1,true\n") != std::string::npos);
  CHECK(csv.find("beta,1,0,4,0.25,false\n") != std::string::npos);
  CHECK(!rep.all_pass());
}

TEST_CASE("replicate engine is worker-count invariant") {
  auto f = [](RngStream& rng) { return rng.uniform(); };
  const auto a = replicate_values(500, 11, 0, true, f);
  const auto b = replicate_values(500, 11, 0, false, f);
  CHECK(a == b);
}

TEST_CASE("crofton study on a small budget") {
  for (int kappa : {0, 1}) {
    StudyConfig cfg;
    cfg.study = StudyKind::Crofton;
    cfg.kappa = kappa;
    cfg.d = 2;
    cfg.k = 1;
    cfg.r = kappa == 1 ? 0.7853981633974483 : 1.0;
    cfg.flat_samples = 100000;
    cfg.seed = 12;
    const ExperimentReport rep = run_study(cfg);
    REQUIRE(rep.rows.size() == (kappa == 1 ? 3 : 2));
    for (const auto& row : rep.rows) {
      INFO(row.name);
      CHECK(row.pass);
    }
  }
}

TEST_CASE("limit study on a reduced budget") {
  StudyConfig cfg;
  cfg.study = StudyKind::LimitLaw;
  cfg.kappa = -1;
  cfg.d = 4;
  cfg.k = 3;
  cfg.m = 1;
  cfg.r = 4.0;
  cfg.T = 10.0;
  cfg.replicates = 2000;
  cfg.z_replicates = 6000;
  cfg.exact_budget = 2000;
  cfg.seed = 31;
  // reduced-budget smoke run: loosen the purely statistical tolerances
  cfg.tolerances["cf_tol"] = 0.06;
  cfg.tolerances["z_var_rel"] = 0.08;
  cfg.tolerances["z_cum3_rel"] = 0.2;
  const ExperimentReport rep = run_study(cfg);
  for (const auto& row : rep.rows) {
    INFO(row.name);
    CHECK(row.pass);
  }
}

TEST_CASE("spherical variance-shape windows fit and order correctly") {
  StudyConfig cfg;
  cfg.study = StudyKind::VarianceShape;
  cfg.kappa = 1;
  cfg.d = 2;
  cfg.k = 1;
  cfg.m = 1;
  cfg.r = 0.2617993877991494;  // pi/12 cap radius, fits the pi/4 constraint
  cfg.pairs = 30000;
  cfg.replicates = 100;
  cfg.seed = 77;
  const ExperimentReport rep = run_study(cfg);
  bool saw_gap = false;
  for (const auto& row : rep.rows) {
    if (row.name.rfind("ball_minus_competitor", 0) == 0) {
      saw_gap = true;
      CHECK(row.estimate > 0.0);
      CHECK(row.pass);
    }
    if (row.name == "control_ball_vs_ball") CHECK(row.pass);
  }
  CHECK(saw_gap);
}

TEST_CASE("moment study on a small budget") {
  StudyConfig cfg;
  cfg.study = StudyKind::Moments;
  cfg.kappa = 0;
  cfg.d = 2;
  cfg.k = 1;
  cfg.t = 1.0;
  cfg.m = 2;
  cfg.radii = {1.0};
  cfg.replicates = 2000;
  cfg.seed = 3;
  const ExperimentReport rep = run_study(cfg);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& row : rep.rows) CHECK(row.pass);
  CHECK(rep.wall_time_s > 0.0);
}

TEST_SUITE_END();
