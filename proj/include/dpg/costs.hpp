#pragma once

#include <variant>
#include <vector>

#include "dpg/geometry.hpp"
#include "dpg/linalg.hpp"

#include <json.hpp>

namespace dpg {

// x -> 1/2 x'Qx + b'x + c, Q symmetric (not necessarily PSD)
struct Quadratic {
  Mat Q;
  Vec b;
  double c = 0.0;
};

// x -> ||q - P'x||^2, P is d x p
struct LeastSquares {
  Mat P;
  Vec q;
};

// x -> a x^2 on the line (a may be negative)
struct Scalar1D {
  double a;
};

// Local cost of one agent.  The quadratic family keeps the Hessian
// constant, so L_i and the aggregate mu are exact closed forms.
struct LocalCost {
  std::variant<Quadratic, LeastSquares, Scalar1D> v;

  std::size_t dim() const;
  double value(const Vec& x) const;
  Vec grad(const Vec& x) const;
  Mat hessian() const;
  double smoothness() const;  // L_i = max |eig(Hessian)|
};

// L = max_i L_i and mu = lambda_min of the aggregate Hessian of
// f = (1/n) sum f_i.  Throws NotStronglyConvex when mu <= 1e-12.
std::pair<double, double> aggregate_constants(const std::vector<LocalCost>& costs);

// Centralized projected gradient x <- P[x - (1/L) grad f(x)] run to a
// fixed point; returns x* and D = max_i ||grad f_i(x*)||.
std::pair<Vec, double> solve_reference(const std::vector<LocalCost>& costs,
                                       const ConvexSet& set,
                                       double tol = 1e-12,
                                       long max_iter = 1000000);

// Local costs + feasible set + every constant the theory needs.
struct ProblemInstance {
  std::vector<LocalCost> costs;
  ConvexSet set;
  double L = 0.0;
  double mu = 0.0;
  Vec x_star;
  double D = 0.0;

  std::size_t n() const { return costs.size(); }
  std::size_t dim() const { return costs.front().dim(); }

  // f = (1/n) sum f_i and its gradient
  double f(const Vec& x) const;
  Vec grad_f(const Vec& x) const;

  // Builds the instance: aggregate constants, reference optimizer, D.
  // Verifies the fixed-point identity x* = P[x* - (1/L) grad f(x*)].
  static ProblemInstance make(std::vector<LocalCost> costs, ConvexSet set,
                              double tol = 1e-12, long max_iter = 1000000);
};

// The two-agent scalar example: g1(x) = 5x^2, g2(x) = -3x^2 on [1, inf).
ProblemInstance one_dim_example();

void to_json(nlohmann::json& j, const LocalCost& c);
void from_json(const nlohmann::json& j, LocalCost& c);
void to_json(nlohmann::json& j, const ProblemInstance& p);
void from_json(const nlohmann::json& j, ProblemInstance& p);

}  // namespace dpg
