#include "dpg/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dpg/errors.hpp"
#include "dpg/random.hpp"

namespace dpg {

namespace {

constexpr std::size_t kMaxStoredViolations = 100;

std::string schedule_label(const StepSchedule& s) {
  std::ostringstream os;
  if (s.is_constant()) {
    os << "const_a" << std::get<ConstantStep>(s.v).alpha;
  } else {
    const auto& p = std::get<PolynomialStep>(s.v);
    os << "poly_p" << p.p << "_v" << p.v << "_w" << p.w;
  }
  std::string label = os.str();
  for (char& c : label)
    if (c == '.' || c == '+') c = '_';
  return label;
}

// Theory constants for one schedule on one problem, with R derived from
// the initial records (R = max{4 c2 alpha(0)/mu, C(0)}; c2 does not
// depend on R, so one bootstrap pass suffices).
TheoryConstants constants_for(const ProblemInstance& p, const MixingMatrix& w,
                              const StepSchedule& s, double C0,
                              ConstantVariant variant) {
  const TheoryConstants boot =
      compute_constants(p.L, p.mu, p.n(), p.D, w.beta, s, 1.0, {}, variant);
  const double R = uniform_bound(boot.c2, s.alpha(0), p.mu, C0);
  return compute_constants(p.L, p.mu, p.n(), p.D, w.beta, s, R, {}, variant);
}

void record_violation(RunReport& rep, const CheckResult& c) {
  ++rep.checks;
  if (!c.pass && rep.violations.size() < kMaxStoredViolations)
    rep.violations.push_back(c);
}

// Runs all applicable checkers along a trajectory.  Returns the per-t
// consensus and main bound columns for the CSV.
void check_trajectory(const ProblemInstance& p, const Trajectory& traj,
                      const TheoryConstants& k, RunReport& rep,
                      Vec* consensus_col, Vec* main_col) {
  const auto& recs = traj.records;
  if (recs.empty()) return;
  const double A0 = recs[0].A;
  const double B0 = recs[0].B;

  bool main_applicable = true;
  std::optional<MainBoundEvaluator> main_eval;
  try {
    main_eval.emplace(k, B0);
  } catch (const InadmissibleSchedule&) {
    main_applicable = false;  // p = 1 with mu v / 2 <= 1
  }

  for (std::size_t i = 0; i < recs.size(); ++i) {
    const long t = recs[i].t;
    const double cb = bound_consensus(t, A0, k);
    if (consensus_col) consensus_col->push_back(cb);
    record_violation(rep, CheckResult{"thm_2_2", t, recs[i].A, cb,
                                      recs[i].A <= cb + kCheckTol});
    double mb = std::numeric_limits<double>::infinity();
    if (main_applicable) {
      mb = main_eval->value(t);
      record_violation(rep, CheckResult{"main_bound", t, recs[i].B, mb,
                                        recs[i].B <= mb + kCheckTol});
    }
    if (main_col) main_col->push_back(mb);

    if (i + 1 < recs.size()) {
      const double a = k.schedule.alpha(t);
      record_violation(rep, check_prop_4_1(recs[i], recs[i + 1], k, a));
      record_violation(rep, check_prop_4_2(recs[i], recs[i + 1], k, a));
      record_violation(rep, check_lemma_5_2(recs[i], recs[i + 1], k, a));
    }
  }
  (void)p;
}

void fill_finals(RunReport& rep, const Trajectory& traj) {
  rep.diverged = traj.diverged;
  rep.diverged_at = traj.diverged_at;
  const IterateRecord& last = traj.last();
  rep.T = last.t;
  rep.final_A = last.A;
  rep.final_B = last.B;
  rep.final_C = last.C;
  rep.final_R1 = last.R1;
  rep.final_R2 = last.R2;
}

void write_outputs(const ExperimentConfig& cfg, const ExperimentReport& report,
                   const std::vector<std::pair<std::string, std::string>>& csvs) {
  if (cfg.out_dir.empty()) return;
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  for (const auto& [name, content] : csvs) {
    std::ofstream os(fs::path(cfg.out_dir) / (name + ".csv"));
    os << content;
  }
  {
    std::ofstream os(fs::path(cfg.out_dir) / "summary.json");
    os << nlohmann::json(report).dump(2) << '\n';
  }
  if (report.any_violation()) {
    nlohmann::json v = nlohmann::json::array();
    for (const RunReport& r : report.runs)
      for (const CheckResult& c : r.violations) {
        nlohmann::json e = c;
        e["run"] = r.label;
        v.push_back(e);
      }
    std::ofstream os(fs::path(cfg.out_dir) / "violations.json");
    os << v.dump(2) << '\n';
  }
}

}  // namespace

bool ExperimentReport::any_violation() const {
  for (const RunReport& r : runs)
    if (!r.violations.empty()) return true;
  return false;
}

std::pair<ProblemInstance, MixingMatrix> build_regression_problem(
    const ExperimentConfig& cfg) {
  Rng rng(cfg.seed);
  Vec x_true(cfg.d);
  for (double& v : x_true) v = rng.normal();

  std::vector<LocalCost> costs;
  costs.reserve(cfg.n);
  for (std::size_t i = 0; i < cfg.n; ++i) {
    Mat P(cfg.d, cfg.p_dim);
    for (double& v : P.a) v = rng.uniform01();
    Vec q(cfg.p_dim, 0.0);
    for (std::size_t kk = 0; kk < cfg.p_dim; ++kk) {
      for (std::size_t r = 0; r < cfg.d; ++r) q[kk] += P(r, kk) * x_true[r];
      q[kk] += cfg.noise_sigma * rng.normal();
    }
    costs.push_back({LeastSquares{std::move(P), std::move(q)}});
  }
  ProblemInstance problem = ProblemInstance::make(
      std::move(costs), ConvexSet::ball(Vec(cfg.d, 0.0), cfg.ball_radius));
  const Graph g =
      build_watts_strogatz(cfg.n, cfg.ws_k, cfg.ws_rewire, cfg.seed + 1);
  return {std::move(problem), metropolis_weights(g)};
}

ExperimentReport sweep(const ProblemInstance& problem, const MixingMatrix& w,
                       const ExperimentConfig& cfg,
                       const std::vector<StepSchedule>& schedules) {
  if (schedules.empty()) throw Error("sweep: no schedules");
  ExperimentReport report;
  report.experiment = cfg.experiment;
  report.seed = cfg.seed;
  report.L = problem.L;
  report.mu = problem.mu;
  report.D = problem.D;
  report.beta = w.beta;

  const Mat X0 =
      random_initial_states(problem, cfg.seed + 2, cfg.init_scale);

  RunOptions opts;
  opts.divergence_threshold = cfg.divergence_threshold.value_or(1e9);

  std::vector<std::pair<std::string, std::string>> csvs;
  for (const StepSchedule& s : schedules) {
    RunReport rep;
    rep.schedule = s;
    rep.label = schedule_label(s);

    TheoryConstants boot = compute_constants(problem.L, problem.mu,
                                             problem.n(), problem.D, w.beta, s,
                                             1.0, {}, cfg.variant);
    const double theta3 = max_constant_stepsize(
        BoundednessCase::StronglyConvex, boot, problem.L, problem.mu,
        w.lambda_min);
    // A bounded set keeps the iterates bounded for any stepsize, so the
    // relevant admissibility threshold there is just 2/(L+mu); otherwise
    // the strongly convex case applies in full.
    const double theta = is_bounded(problem.set)
                             ? 2.0 / (problem.L + problem.mu)
                             : theta3;
    rep.admissible = s.alpha(0) <= theta;
    // The sequential/rate inequalities are only claimed in the strongly
    // convex stepsize regime, so checks stay gated on that threshold.
    const bool checkable = s.alpha(0) <= theta3;
    if (!rep.admissible) {
      if (cfg.strict) {
        rep.skipped = true;
        report.runs.push_back(std::move(rep));
        continue;
      }
      std::cerr << "warning: schedule " << rep.label
                << " exceeds the case-3 stepsize threshold " << theta
                << "; running anyway\n";
    }

    Trajectory traj = run(problem, w, s, X0, cfg.T, opts);
    fill_finals(rep, traj);

    Vec consensus_col, main_col;
    if (cfg.bounds && checkable && !traj.diverged) {
      const TheoryConstants k =
          constants_for(problem, w, s, traj.records[0].C, cfg.variant);
      check_trajectory(problem, traj, k, rep, &consensus_col, &main_col);
      rep.constants = k;
    }

    if (!cfg.out_dir.empty()) {
      std::ostringstream os;
      if (!consensus_col.empty())
        write_csv(os, traj, {"bound_A_thm22", "bound_B_main"},
                  {consensus_col, main_col});
      else
        write_csv(os, traj);
      csvs.emplace_back(rep.label, os.str());
    }
    report.runs.push_back(std::move(rep));
  }

  write_outputs(cfg, report, csvs);
  return report;
}

ExperimentReport run_regression(const ExperimentConfig& cfg) {
  auto [problem, w] = build_regression_problem(cfg);
  std::vector<StepSchedule> schedules = cfg.schedules;
  if (schedules.empty()) {
    const double s = problem.mu + problem.L;
    schedules.push_back(StepSchedule::constant(4.0 / s));
    schedules.push_back(StepSchedule::constant(3.0 / s));
    schedules.push_back(StepSchedule::constant(1.0 / s));
    schedules.push_back(StepSchedule::constant(0.5 / s));
    for (double p : {0.25, 0.5, 0.75, 1.0})
      schedules.push_back(
          StepSchedule::polynomial(0.5, std::pow(s, 1.0 / p), p));
  }
  ExperimentReport report = sweep(problem, w, cfg, schedules);
  report.experiment = "regression";
  return report;
}

ExperimentReport run_one_dim(const ExperimentConfig& cfg) {
  const ProblemInstance problem = one_dim_example();
  Mat wt(2, 2);
  wt(0, 0) = 2.0 / 3.0;
  wt(0, 1) = 1.0 / 3.0;
  wt(1, 0) = 1.0 / 3.0;
  wt(1, 1) = 2.0 / 3.0;
  const MixingMatrix w = explicit_matrix(wt);

  std::vector<double> alphas;
  if (cfg.schedules.empty()) {
    alphas = {1.0 / 200.0, 1.0 / 100.0, 1.0 / 46.0, 1.0 / 43.0};
  } else {
    for (const StepSchedule& s : cfg.schedules) {
      if (!s.is_constant())
        throw Error("one_dim: constant stepsizes only");
      alphas.push_back(std::get<ConstantStep>(s.v).alpha);
    }
  }
  if (cfg.x0_one_dim.size() != 2) throw Error("one_dim: x0 must have size 2");

  ExperimentReport report;
  report.experiment = "one_dim";
  report.seed = cfg.seed;
  report.L = problem.L;
  report.mu = problem.mu;
  report.D = problem.D;
  report.beta = w.beta;

  RunOptions opts;
  opts.divergence_threshold = cfg.divergence_threshold.value_or(1e6);

  Mat X0(2, 1);
  X0(0, 0) = cfg.x0_one_dim[0];
  X0(1, 0) = cfg.x0_one_dim[1];

  std::vector<std::pair<std::string, std::string>> csvs;
  for (double a : alphas) {
    const StepSchedule s = StepSchedule::constant(a);
    RunReport rep;
    rep.schedule = s;
    rep.label = schedule_label(s);
    rep.alpha = a;
    rep.admissible = a < 1.0 / 45.0;
    rep.lambda_plus =
        2.0 / 3.0 - 2.0 * a + std::sqrt(1.0 / 9.0 + 64.0 * a * a);
    rep.fixed_point_x2 = 1.0 / (1.0 - 18.0 * a);

    if (!rep.admissible && cfg.strict) {
      rep.skipped = true;
      report.runs.push_back(std::move(rep));
      continue;
    }

    Trajectory traj = run(problem, w, s, X0, cfg.T, opts);
    fill_finals(rep, traj);

    // first time the constraint clamps agent 1 (projection yields exactly 1)
    for (std::size_t i = 1; i < traj.records.size(); ++i) {
      if (traj.records[i].X(0, 0) == 1.0) {
        rep.t0_measured = traj.records[i].t - 1;
        break;
      }
    }
    const double x0norm = std::hypot(X0(0, 0), X0(1, 0));
    rep.t0_bound = std::log(x0norm) / std::log(1.0 / rep.lambda_plus) - 1.0;

    if (!traj.diverged) {
      const IterateRecord& last = traj.last();
      const double e1 = last.X(0, 0) - 1.0;
      const double e2 = last.X(1, 0) - rep.fixed_point_x2;
      rep.final_error = std::hypot(e1, e2);
      const double target = 18.0 * a / (1.0 - 18.0 * a);
      rep.limit_ratio = (last.X(1, 0) - 1.0) / target;
    }

    if (!cfg.out_dir.empty()) {
      // extra column: the fixed-point residual measure R(t)
      Vec measure;
      measure.reserve(traj.records.size());
      for (const IterateRecord& r : traj.records) {
        const double e1 = r.X(0, 0) - 1.0;
        const double e2 = r.X(1, 0) - rep.fixed_point_x2;
        measure.push_back(e1 * e1 + e2 * e2);
      }
      std::ostringstream os;
      write_csv(os, traj, {"R_measure"}, {measure});
      csvs.emplace_back(rep.label, os.str());
    }
    report.runs.push_back(std::move(rep));
  }

  write_outputs(cfg, report, csvs);
  return report;
}

std::vector<CertInstance> make_certification_instances(std::uint64_t seed,
                                                       std::size_t count) {
  std::vector<CertInstance> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(seed + 1000 * i);
    const std::size_t n = (i % 2 == 0) ? 5 : 20;
    const std::size_t d = ((i / 2) % 2 == 0) ? 2 : 5;

    std::vector<LocalCost> costs;
    for (std::size_t a = 0; a < n; ++a) {
      Mat A(d, d);
      for (double& v : A.a) v = rng.normal() / std::sqrt(static_cast<double>(d));
      Mat Q(d, d);
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
          double s = 0.0;
          for (std::size_t m = 0; m < d; ++m) s += A(m, r) * A(m, c);
          Q(r, c) = s + (r == c ? 0.5 : 0.0);
        }
      Vec b(d);
      for (double& v : b) v = rng.normal();
      costs.push_back({Quadratic{std::move(Q), std::move(b), 0.0}});
    }

    ConvexSet set = ConvexSet::whole_space();
    if (i % 3 == 0) set = ConvexSet::ball(Vec(d, 0.0), 3.0);
    if (i % 3 == 1) set = ConvexSet::box(Vec(d, -2.0), Vec(d, 2.0));

    CertInstance inst;
    inst.label = "cert_" + std::to_string(i) + "_n" + std::to_string(n) +
                 "_d" + std::to_string(d);
    inst.problem = ProblemInstance::make(std::move(costs), std::move(set));
    const Graph g = build_watts_strogatz(n, 4, 0.3, seed + i);
    inst.w = metropolis_weights(g);
    out.push_back(std::move(inst));
  }
  return out;
}

CertificationReport certify_suite(std::uint64_t seed, ConstantVariant variant,
                                  long T_constant, long T_decreasing) {
  CertificationReport rep;
  const auto instances = make_certification_instances(seed);

  for (std::size_t idx = 0; idx < instances.size(); ++idx) {
    const CertInstance& inst = instances[idx];
    const ProblemInstance& p = inst.problem;
    const MixingMatrix& w = inst.w;
    const Mat X0 = random_initial_states(p, seed * 7 + idx, 2.0);

    const TheoryConstants boot =
        compute_constants(p.L, p.mu, p.n(), p.D, w.beta,
                          StepSchedule::constant(1.0), 1.0, {}, variant);
    const double theta = max_constant_stepsize(
        BoundednessCase::StronglyConvex, boot, p.L, p.mu, w.lambda_min);

    auto note_failure = [&](std::vector<CheckResult>& sink,
                            const CheckResult& c, const std::string& label) {
      if (!c.pass && sink.size() < kMaxStoredViolations) {
        CheckResult tagged = c;
        tagged.name = label + ":" + c.name;
        sink.push_back(tagged);
      }
    };

    // constant-stepsize certification run
    {
      const StepSchedule s = StepSchedule::constant(theta / 2.0);
      Trajectory traj = run(p, w, s, X0, T_constant);
      const TheoryConstants k =
          constants_for(p, w, s, traj.records[0].C, variant);
      RunReport tmp;
      check_trajectory(p, traj, k, tmp, nullptr, nullptr);
      rep.sequential_checks += tmp.checks;
      for (const CheckResult& c : tmp.violations)
        note_failure(rep.sequential_failures, c, inst.label);
      for (const IterateRecord& r : traj.records)
        if (r.C > k.R + kCheckTol) rep.uniform_bounded = false;
    }

    // O(sqrt(alpha)) envelope across the alpha ladder
    for (double frac : {0.125, 0.25, 0.5}) {
      const StepSchedule s = StepSchedule::constant(theta * frac);
      Trajectory traj = run(p, w, s, X0, T_constant);
      const TheoryConstants k =
          constants_for(p, w, s, traj.records[0].C, variant);
      const double limit = 2.0 * k.G2 * s.alpha(0) / p.mu;
      if (traj.last().B > limit + kCheckTol) rep.envelope_ok = false;
    }

    // decreasing stepsizes: p < 1 uses the 2.4 bound, p = 1 the 2.5 bound
    const double alpha0 = theta / 2.0;
    std::vector<StepSchedule> dec;
    for (double pw : {0.25, 0.5, 0.75}) {
      const double w0 = 4.0;
      dec.push_back(
          StepSchedule::polynomial(alpha0 * std::pow(w0, pw), w0, pw));
    }
    {
      const double v = 4.0 / p.mu;  // mu v / 2 = 2
      const double w0 = std::max(1.0, v / alpha0);
      dec.push_back(StepSchedule::polynomial(v, w0, 1.0));
    }
    for (const StepSchedule& s : dec) {
      Trajectory traj = run(p, w, s, X0, T_decreasing);
      const TheoryConstants k =
          constants_for(p, w, s, traj.records[0].C, variant);
      MainBoundEvaluator eval(k, traj.records[0].B);
      for (const IterateRecord& r : traj.records) {
        ++rep.decreasing_checks;
        const double b = eval.value(r.t);
        if (r.B > b + kCheckTol)
          note_failure(rep.decreasing_failures,
                       CheckResult{"main_bound", r.t, r.B, b, false},
                       inst.label);
      }
    }
  }
  return rep;
}

void to_json(nlohmann::json& j, const RunReport& r) {
  j = {{"label", r.label},
       {"schedule", r.schedule},
       {"admissible", r.admissible},
       {"skipped", r.skipped},
       {"diverged", r.diverged},
       {"diverged_at", r.diverged_at},
       {"T", r.T},
       {"final_A", r.final_A},
       {"final_B", r.final_B},
       {"final_C", r.final_C},
       {"final_R1", r.final_R1},
       {"final_R2", r.final_R2},
       {"checks", r.checks},
       {"violations", r.violations}};
  if (r.constants) j["constants"] = *r.constants;
  if (r.alpha > 0.0) {
    j["alpha"] = r.alpha;
    j["lambda_plus"] = r.lambda_plus;
    j["t0_measured"] = r.t0_measured;
    j["t0_bound"] = r.t0_bound;
    j["fixed_point_x2"] = r.fixed_point_x2;
    j["final_error"] = r.final_error;
    j["limit_ratio"] = r.limit_ratio;
  }
}

void to_json(nlohmann::json& j, const ExperimentReport& r) {
  j = {{"experiment", r.experiment},
       {"seed", r.seed},
       {"L", r.L},
       {"mu", r.mu},
       {"D", r.D},
       {"beta", r.beta},
       {"runs", r.runs}};
}

void to_json(nlohmann::json& j, const CertificationReport& r) {
  j = {{"sequential_checks", r.sequential_checks},
       {"sequential_failures", r.sequential_failures},
       {"uniform_bounded", r.uniform_bounded},
       {"envelope_ok", r.envelope_ok},
       {"decreasing_checks", r.decreasing_checks},
       {"decreasing_failures", r.decreasing_failures},
       {"pass", r.pass()}};
}

void to_json(nlohmann::json& j, const ExperimentConfig& c) {
  j = {{"experiment", c.experiment},
       {"seed", c.seed},
       {"n", c.n},
       {"d", c.d},
       {"p_dim", c.p_dim},
       {"noise_sigma", c.noise_sigma},
       {"ball_radius", c.ball_radius},
       {"ws_k", c.ws_k},
       {"ws_rewire", c.ws_rewire},
       {"T", c.T},
       {"init_scale", c.init_scale},
       {"schedules", c.schedules},
       {"x0_one_dim", c.x0_one_dim},
       {"out_dir", c.out_dir},
       {"bounds", c.bounds},
       {"strict", c.strict},
       {"variant",
        c.variant == ConstantVariant::Theorem ? "theorem" : "proof"}};
  if (c.divergence_threshold) j["divergence_threshold"] = *c.divergence_threshold;
  if (c.problem) j["problem"] = *c.problem;
  if (c.graph) j["graph"] = *c.graph;
}

void from_json(const nlohmann::json& j, ExperimentConfig& c) {
  c = ExperimentConfig{};
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("experiment", c.experiment);
  get("seed", c.seed);
  get("n", c.n);
  get("d", c.d);
  get("p_dim", c.p_dim);
  get("noise_sigma", c.noise_sigma);
  get("ball_radius", c.ball_radius);
  get("ws_k", c.ws_k);
  get("ws_rewire", c.ws_rewire);
  get("T", c.T);
  get("init_scale", c.init_scale);
  get("schedules", c.schedules);
  get("x0_one_dim", c.x0_one_dim);
  get("out_dir", c.out_dir);
  get("bounds", c.bounds);
  get("strict", c.strict);
  if (j.contains("variant"))
    c.variant = j.at("variant").get<std::string>() == "proof"
                    ? ConstantVariant::Proof
                    : ConstantVariant::Theorem;
  if (j.contains("divergence_threshold"))
    c.divergence_threshold = j.at("divergence_threshold").get<double>();
  if (j.contains("problem")) c.problem = j.at("problem");
  if (j.contains("graph")) c.graph = j.at("graph");
}

}  // namespace dpg
