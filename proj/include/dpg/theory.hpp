#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dpg/iteration.hpp"

#include <json.hpp>

namespace dpg {

// A few constants appear in two forms: the headline statement and the
// in-proof derivation (J's R^2-vs-R factor, G1's leading 2R, the p<1
// rate's 2e-vs-4 coefficient).  Both are evaluable; Theorem is the default.
enum class ConstantVariant { Theorem, Proof };

// Every named constant of the convergence theory, for one problem
// instance, mixing matrix, and stepsize schedule.
struct TheoryConstants {
  // inputs
  double L = 0.0;
  double mu = 0.0;
  std::size_t n = 0;
  double D = 0.0;
  double beta = 0.0;
  double R = 0.0;  // uniform bound on C(t)
  StepSchedule schedule = StepSchedule::constant(1.0);
  ConstantVariant variant = ConstantVariant::Theorem;

  // Young parameter and the inflated contraction factor (1+delta) beta^2.
  // The default delta = (1-beta)/beta makes beta_tilde = beta.
  double delta = 0.0;
  double beta_tilde = 0.0;

  // c1 = 3L^2(1+1/delta), c2 = 3nD^2(1+1/delta), c3 = c1+L^2, c4 = 4L^2/mu
  double c1 = 0.0, c2 = 0.0, c3 = 0.0, c4 = 0.0;
  // the delta = (1-beta)/beta specialization
  double tc1 = 0.0, tc2 = 0.0, tc3 = 0.0, tc4 = 0.0;

  // positive root threshold of c3 a^2 + (c4 + mu/4) a + beta_tilde - 1 = 0
  double Z = 0.0;

  double J = 0.0;    // consensus constant (schedule- and variant-dependent)
  double G1 = 0.0;   // transient constant
  double G2 = 0.0;   // steady-state constant
  double rho = 0.0;  // sup_t beta^t / alpha(t)^2
  double Q = 1.0;    // ((w+1)/w)^{2p} for polynomial schedules
};

// delta_choice defaults to (1-beta)/beta; an explicit choice must keep
// (1+delta) beta^2 < 1 or BetaTildeNotContractive is thrown.
TheoryConstants compute_constants(double L, double mu, std::size_t n, double D,
                                  double beta, const StepSchedule& schedule,
                                  double R,
                                  std::optional<double> delta_choice = {},
                                  ConstantVariant variant =
                                      ConstantVariant::Theorem);

// R = max{4 c2 alpha(0) / mu, C(0)}
double uniform_bound(double c2, double alpha0, double mu, double C0);

enum class BoundednessCase {
  BoundedSet = 1,    // any alpha; only alpha(0) <= 2/(L+mu) needed downstream
  ConvexCosts = 2,   // constant alpha <= (1 + lambda_n(W)) / L
  StronglyConvex = 3 // alpha(0) < min{Z, mu/(4 c1), 2/(L+mu)}
};

double max_constant_stepsize(BoundednessCase which, const TheoryConstants& k,
                             double L, double mu, double lambda_min);

// One inequality evaluated at one iteration: both sides kept so a
// violation is diagnosable.  pass means lhs <= rhs + tol.
struct CheckResult {
  std::string name;
  long t = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;

  double slack() const { return rhs - lhs; }
};

inline constexpr double kCheckTol = 1e-9;

// A(t+1) <= (c1 a^2 + beta_tilde) A(t) + c1 a^2 B(t) + c2 a^2
CheckResult check_prop_4_1(const IterateRecord& rec_t,
                           const IterateRecord& rec_t1,
                           const TheoryConstants& k, double alpha_t,
                           double tol = kCheckTol);

// C(t+1) <= (c3 a^2 + c4 a + beta_tilde) A(t)
//           + (1 - mu a / 2 + c1 a^2) B(t) + c2 a^2
CheckResult check_prop_4_2(const IterateRecord& rec_t,
                           const IterateRecord& rec_t1,
                           const TheoryConstants& k, double alpha_t,
                           double tol = kCheckTol);

// C(t+1) <= (1 - mu a / 4) C(t) + c2 a^2   (needs the case-3 stepsize)
CheckResult check_lemma_5_2(const IterateRecord& rec_t,
                            const IterateRecord& rec_t1,
                            const TheoryConstants& k, double alpha_t,
                            double tol = kCheckTol);

// consensus bound: beta^t A(0) + J alpha(t)^2 / (1-beta)^2
double bound_consensus(long t, double A0, const TheoryConstants& k);

// Pointwise bound on B(t) for the matching schedule family.  Prefix sums
// of the remainder series are cached, so sequential evaluation over a
// whole trajectory is linear.
class MainBoundEvaluator {
 public:
  MainBoundEvaluator(const TheoryConstants& k, double B0);

  double value(long t);

 private:
  void grow(long t);

  TheoryConstants k_;
  double B0_;
  // polynomial-schedule caches
  std::vector<double> sum_inv_p_;   // prefix of 1/(s+w)^p
  std::vector<double> sum_inv_2p_;  // prefix of 1/(s+w)^{2p}
};

double bound_main(long t, double B0, const TheoryConstants& k);

// Worst-case recursion H(t) = (1 - C1/(t+w-1)^p) H(t-1) + C2/(t+w-1)^{p+q}
// iterated with equality and compared against the closed-form bound
// (p < 1 and p = 1 cases, all three q-vs-C1 branches).
struct RecursionCheck {
  bool pass = false;
  long first_fail = -1;
  double min_slack = 0.0;
};

RecursionCheck check_lemma_7_1(double C1, double C2, double p, double q,
                               double w, double H0, long T,
                               double tol = kCheckTol);

void to_json(nlohmann::json& j, const TheoryConstants& k);
void to_json(nlohmann::json& j, const CheckResult& r);

}  // namespace dpg
