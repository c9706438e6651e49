#pragma once

#include <cstdint>
#include <iosfwd>
#include <variant>
#include <vector>

#include "dpg/costs.hpp"
#include "dpg/network.hpp"

#include <json.hpp>

namespace dpg {

// alpha(t) = alpha, forever
struct ConstantStep {
  double alpha;
};

// alpha(t) = v / (t + w)^p, positive and nonincreasing
struct PolynomialStep {
  double v;
  double w;
  double p;
};

struct StepSchedule {
  std::variant<ConstantStep, PolynomialStep> v;

  static StepSchedule constant(double alpha);
  static StepSchedule polynomial(double v, double w, double p);

  double alpha(long t) const;
  bool is_constant() const { return std::holds_alternative<ConstantStep>(v); }
};

// Per-iteration state and error metrics.  C = A + B holds by the
// mean/deviation orthogonality of the squared distance to x*.
struct IterateRecord {
  long t = 0;
  Mat X;        // n x d agent states
  Vec x_bar;    // mean point
  double alpha = 0.0;
  double A = 0.0;   // ||X - Xbar||^2, consensus error
  double B = 0.0;   // n ||xbar - x*||^2
  double C = 0.0;   // A + B
  double R1 = 0.0;  // ||xbar(t)-x*|| / ||xbar(0)-x*||
  double R2 = 0.0;  // sum_i ||x_i(t)-xbar(t)|| / sum_i ||x_i(0)-xbar(0)||
};

struct Trajectory {
  std::vector<IterateRecord> records;
  bool diverged = false;
  long diverged_at = -1;

  const IterateRecord& last() const { return records.back(); }
};

struct RunOptions {
  double divergence_threshold = 1e9;  // on the Frobenius norm of X
  // false: stop recording and flag the trajectory; true: throw NonFiniteState
  bool throw_on_divergence = false;
};

// One synchronous DPG update: each agent mixes the OLD states of its
// neighbors, steps along its own local gradient, and projects.
// OpenMP-parallel over agents; bitwise identical to dpg_step_serial.
Mat dpg_step(const ProblemInstance& p, const MixingMatrix& w, const Mat& X,
             double alpha_t);

// Serial reference used by the tests and the benchmark.
Mat dpg_step_serial(const ProblemInstance& p, const MixingMatrix& w,
                    const Mat& X, double alpha_t);

// Runs T steps from X0 (rows projected into the set first) and records
// every iterate.  Deterministic.
Trajectory run(const ProblemInstance& p, const MixingMatrix& w,
               const StepSchedule& schedule, Mat X0, long T,
               const RunOptions& opts = {});

// E_alpha(X) = 1/2 (sum ||x_k||^2 - sum_kj w_kj <x_k, x_j>) + alpha sum f_k(x_k).
// One constant-stepsize DPG step is the projected-gradient step on this
// functional over Omega^n.
double energy_functional(const ProblemInstance& p, const MixingMatrix& w,
                         double alpha, const Mat& X);

// Standard-normal n x d initial states, projected row-wise into the set.
Mat random_initial_states(const ProblemInstance& p, std::uint64_t seed,
                          double scale = 1.0);

// CSV schema: t,A,B,C,R1,R2,alpha[,<bound columns>]; 17 significant digits.
void write_csv(std::ostream& os, const Trajectory& traj,
               const std::vector<std::string>& bound_names = {},
               const std::vector<Vec>& bound_columns = {});

void to_json(nlohmann::json& j, const StepSchedule& s);
void from_json(const nlohmann::json& j, StepSchedule& s);

}  // namespace dpg
