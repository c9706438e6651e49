// dpgcli — run decentralized projected gradient experiments and certify
// the convergence bounds.  See README.md for the config schema.
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dpg/errors.hpp"
#include "dpg/experiments.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<long> T;
  bool strict = false;
  std::string variant = "theorem";
  std::string bounds = "on";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON config file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "RNG seed override");
  cmd->add_option("--out", o.out_dir, "output directory (CSV + summary.json)");
  cmd->add_option("-T,--steps", o.T, "iteration horizon override");
  cmd->add_flag("--strict", o.strict,
                "skip schedules that violate the admissibility threshold");
  cmd->add_option("--variant", o.variant, "constant variant")
      ->check(CLI::IsMember({"theorem", "proof"}));
  cmd->add_option("--bounds", o.bounds, "evaluate bounds along the run")
      ->check(CLI::IsMember({"on", "off"}));
}

dpg::ExperimentConfig load_config(const CommonOpts& o) {
  dpg::ExperimentConfig cfg;
  if (!o.config_path.empty()) {
    std::ifstream is(o.config_path);
    nlohmann::json j;
    is >> j;
    cfg = j.get<dpg::ExperimentConfig>();
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.T) cfg.T = *o.T;
  if (o.strict) cfg.strict = true;
  cfg.variant = o.variant == "proof" ? dpg::ConstantVariant::Proof
                                     : dpg::ConstantVariant::Theorem;
  cfg.bounds = o.bounds == "on";
  return cfg;
}

dpg::ExperimentReport dispatch(const dpg::ExperimentConfig& cfg) {
  if (cfg.experiment == "regression") return dpg::run_regression(cfg);
  if (cfg.experiment == "one_dim") return dpg::run_one_dim(cfg);
  if (cfg.experiment == "custom") {
    if (!cfg.problem || !cfg.graph)
      throw dpg::Error("custom experiment needs \"problem\" and \"graph\"");
    if (cfg.schedules.empty())
      throw dpg::Error("custom experiment needs \"schedules\"");
    auto problem = cfg.problem->get<dpg::ProblemInstance>();
    auto w = cfg.graph->get<dpg::MixingMatrix>();
    return dpg::sweep(problem, w, cfg, cfg.schedules);
  }
  throw dpg::Error("unknown experiment: " + cfg.experiment);
}

int report_and_exit(const dpg::ExperimentReport& rep, bool fail_on_violation) {
  std::cout << nlohmann::json(rep).dump(2) << '\n';
  if (fail_on_violation && rep.any_violation()) {
    std::cerr << "check: bound violations detected\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"decentralized projected gradient runner and bound certifier"};
  app.require_subcommand(1);

  CommonOpts run_o, reg_o, one_o, sweep_o, const_o, check_o;

  CLI::App* c_run = app.add_subcommand("run", "run the configured experiment");
  add_common(c_run, run_o);

  CLI::App* c_reg =
      app.add_subcommand("regression", "ball-constrained least-squares "
                                       "experiment with preset stepsizes");
  add_common(c_reg, reg_o);

  CLI::App* c_one = app.add_subcommand(
      "example-1d", "two-agent scalar example with its exact analysis");
  add_common(c_one, one_o);

  CLI::App* c_sweep = app.add_subcommand(
      "sweep", "run every schedule from the config on one problem");
  add_common(c_sweep, sweep_o);

  CLI::App* c_const = app.add_subcommand(
      "constants", "emit the full set of theory constants as JSON");
  add_common(c_const, const_o);
  double const_alpha = 0.0;
  c_const->add_option("--alpha", const_alpha,
                      "constant stepsize for the constants (default: half "
                      "the admissible threshold)");

  CLI::App* c_check = app.add_subcommand(
      "check", "run with bounds on; exit nonzero on any violated inequality");
  add_common(c_check, check_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_run->parsed()) {
      return report_and_exit(dispatch(load_config(run_o)), false);
    }
    if (c_reg->parsed()) {
      auto cfg = load_config(reg_o);
      cfg.experiment = "regression";
      return report_and_exit(dispatch(cfg), false);
    }
    if (c_one->parsed()) {
      auto cfg = load_config(one_o);
      cfg.experiment = "one_dim";
      return report_and_exit(dispatch(cfg), false);
    }
    if (c_sweep->parsed()) {
      auto cfg = load_config(sweep_o);
      if (cfg.schedules.empty())
        throw dpg::Error("sweep needs \"schedules\" in the config");
      return report_and_exit(dispatch(cfg), false);
    }
    if (c_const->parsed()) {
      auto cfg = load_config(const_o);
      auto [problem, w] = dpg::build_regression_problem(cfg);
      auto boot = dpg::compute_constants(
          problem.L, problem.mu, problem.n(), problem.D, w.beta,
          dpg::StepSchedule::constant(1.0), 1.0, {}, cfg.variant);
      const double theta = dpg::max_constant_stepsize(
          dpg::BoundednessCase::StronglyConvex, boot, problem.L, problem.mu,
          w.lambda_min);
      const double a = const_alpha > 0.0 ? const_alpha : theta / 2.0;
      const auto s = dpg::StepSchedule::constant(a);
      const dpg::Mat x0 = dpg::random_initial_states(problem, cfg.seed + 2,
                                                     cfg.init_scale);
      const auto traj = dpg::run(problem, w, s, x0, 0);
      const double R = dpg::uniform_bound(
          dpg::compute_constants(problem.L, problem.mu, problem.n(), problem.D,
                                 w.beta, s, 1.0, {}, cfg.variant)
              .c2,
          a, problem.mu, traj.records[0].C);
      const auto k =
          dpg::compute_constants(problem.L, problem.mu, problem.n(), problem.D,
                                 w.beta, s, R, {}, cfg.variant);
      nlohmann::json j = k;
      j["max_constant_stepsize_case3"] = theta;
      std::cout << j.dump(2) << '\n';
      return 0;
    }
    if (c_check->parsed()) {
      auto cfg = load_config(check_o);
      cfg.bounds = true;
      return report_and_exit(dispatch(cfg), true);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
