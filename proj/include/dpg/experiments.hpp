#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dpg/theory.hpp"

#include <json.hpp>

namespace dpg {

struct ExperimentConfig {
  std::string experiment = "regression";  // regression | one_dim | custom
  std::uint64_t seed = 7;

  // regression problem shape
  std::size_t n = 50;
  std::size_t d = 5;
  std::size_t p_dim = 2;
  double noise_sigma = 0.1;
  double ball_radius = 3.0;

  // graph
  std::size_t ws_k = 4;
  double ws_rewire = 0.3;

  long T = 5000;
  double init_scale = 1.0;
  std::vector<StepSchedule> schedules;  // empty -> paper presets
  Vec x0_one_dim = {5.0, 10.0};

  std::string out_dir;   // empty -> no files written
  bool bounds = true;    // evaluate theory bounds alongside the run
  bool strict = false;   // reject inadmissible schedules instead of warning
  ConstantVariant variant = ConstantVariant::Theorem;
  // default: 1e9, except 1e6 for the one-dimensional example
  std::optional<double> divergence_threshold;

  // custom experiment: explicit problem + graph
  std::optional<nlohmann::json> problem;
  std::optional<nlohmann::json> graph;
};

// Result of one schedule on one problem.
struct RunReport {
  std::string label;
  StepSchedule schedule = StepSchedule::constant(1.0);
  bool admissible = false;   // against the relevant theorem threshold
  bool skipped = false;      // strict mode refused to run it
  bool diverged = false;
  long diverged_at = -1;
  long T = 0;
  double final_A = 0.0, final_B = 0.0, final_C = 0.0;
  double final_R1 = 0.0, final_R2 = 0.0;
  long checks = 0;
  std::vector<CheckResult> violations;
  // full constant set used by the checkers, when they ran
  std::optional<TheoryConstants> constants;

  // one-dimensional example extras
  double alpha = 0.0;
  double lambda_plus = 0.0;
  long t0_measured = -1;
  double t0_bound = 0.0;
  double fixed_point_x2 = 0.0;    // 1/(1-18 alpha)
  double final_error = 0.0;       // distance to (1, 1/(1-18 alpha))
  double limit_ratio = 0.0;       // (x2(T)-1) / (18a/(1-18a))
};

struct ExperimentReport {
  std::string experiment;
  std::uint64_t seed = 0;
  double L = 0.0, mu = 0.0, D = 0.0, beta = 0.0;
  std::vector<RunReport> runs;

  bool any_violation() const;
};

// The ball-constrained least-squares instance of the regression
// experiment, with seeded data, plus its Watts-Strogatz mixing matrix.
std::pair<ProblemInstance, MixingMatrix> build_regression_problem(
    const ExperimentConfig& cfg);

ExperimentReport run_regression(const ExperimentConfig& cfg);
ExperimentReport run_one_dim(const ExperimentConfig& cfg);

// Runs each schedule on one problem/seed; per-run CSVs plus a summary.
ExperimentReport sweep(const ProblemInstance& problem, const MixingMatrix& w,
                       const ExperimentConfig& cfg,
                       const std::vector<StepSchedule>& schedules);

// ---- certification suite ----------------------------------------------
// Seeded random strongly convex quadratic instances (n in {5,20}, d in
// {2,5}, ball/box/whole-space sets) on which every inequality checker and
// bound evaluator is exercised with case-3-admissible stepsizes.

struct CertInstance {
  std::string label;
  ProblemInstance problem;
  MixingMatrix w;
};

std::vector<CertInstance> make_certification_instances(std::uint64_t seed,
                                                       std::size_t count = 20);

struct CertificationReport {
  long sequential_checks = 0;       // prop 4.1/4.2, lemma 5.2, thm 2.2/2.3
  std::vector<CheckResult> sequential_failures;
  bool uniform_bounded = true;      // C(t) <= max{4 c2 a0/mu, C(0)}
  bool envelope_ok = true;          // limiting B <= (2 G2/mu) alpha
  long decreasing_checks = 0;       // thm 2.4 / 2.5 pointwise
  std::vector<CheckResult> decreasing_failures;

  bool pass() const {
    return sequential_failures.empty() && uniform_bounded && envelope_ok &&
           decreasing_failures.empty();
  }
};

CertificationReport certify_suite(std::uint64_t seed,
                                  ConstantVariant variant,
                                  long T_constant = 5000,
                                  long T_decreasing = 10000);

void to_json(nlohmann::json& j, const RunReport& r);
void to_json(nlohmann::json& j, const ExperimentReport& r);
void to_json(nlohmann::json& j, const CertificationReport& r);
void to_json(nlohmann::json& j, const ExperimentConfig& c);
void from_json(const nlohmann::json& j, ExperimentConfig& c);

}  // namespace dpg
