#include "dpg/costs.hpp"

#include <algorithm>
#include <cmath>

#include "dpg/errors.hpp"

namespace dpg {

std::size_t LocalCost::dim() const {
  return std::visit(
      [](const auto& c) -> std::size_t {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Quadratic>)
          return c.Q.rows;
        else if constexpr (std::is_same_v<T, LeastSquares>)
          return c.P.rows;
        else
          return 1;
      },
      v);
}

double LocalCost::value(const Vec& x) const {
  if (x.size() != dim()) throw DimensionMismatch("cost value: dimension");
  return std::visit(
      [&](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return 0.5 * dot(x, matvec(c.Q, x)) + dot(c.b, x) + c.c;
        } else if constexpr (std::is_same_v<T, LeastSquares>) {
          // residual r = q - P' x
          Vec r = c.q;
          for (std::size_t k = 0; k < c.P.cols; ++k)
            for (std::size_t i = 0; i < c.P.rows; ++i)
              r[k] -= c.P(i, k) * x[i];
          return sq_norm(r);
        } else {
          return c.a * x[0] * x[0];
        }
      },
      v);
}

Vec LocalCost::grad(const Vec& x) const {
  if (x.size() != dim()) throw DimensionMismatch("cost grad: dimension");
  return std::visit(
      [&](const auto& c) -> Vec {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          Vec g = matvec(c.Q, x);
          axpy(1.0, c.b, g);
          return g;
        } else if constexpr (std::is_same_v<T, LeastSquares>) {
          // grad = 2 P (P'x - q)
          Vec r(c.P.cols, 0.0);
          for (std::size_t k = 0; k < c.P.cols; ++k) {
            for (std::size_t i = 0; i < c.P.rows; ++i)
              r[k] += c.P(i, k) * x[i];
            r[k] -= c.q[k];
          }
          Vec g(c.P.rows, 0.0);
          for (std::size_t i = 0; i < c.P.rows; ++i)
            for (std::size_t k = 0; k < c.P.cols; ++k)
              g[i] += 2.0 * c.P(i, k) * r[k];
          return g;
        } else {
          return {2.0 * c.a * x[0]};
        }
      },
      v);
}

Mat LocalCost::hessian() const {
  return std::visit(
      [](const auto& c) -> Mat {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          return c.Q;
        } else if constexpr (std::is_same_v<T, LeastSquares>) {
          Mat h(c.P.rows, c.P.rows);
          for (std::size_t i = 0; i < c.P.rows; ++i)
            for (std::size_t j = 0; j < c.P.rows; ++j) {
              double s = 0.0;
              for (std::size_t k = 0; k < c.P.cols; ++k)
                s += c.P(i, k) * c.P(j, k);
              h(i, j) = 2.0 * s;
            }
          return h;
        } else {
          Mat h(1, 1);
          h(0, 0) = 2.0 * c.a;
          return h;
        }
      },
      v);
}

double LocalCost::smoothness() const {
  const Vec ev = jacobi_eigenvalues(hessian());
  double m = 0.0;
  for (double e : ev) m = std::max(m, std::abs(e));
  return m;
}

std::pair<double, double> aggregate_constants(
    const std::vector<LocalCost>& costs) {
  if (costs.empty()) throw Error("aggregate_constants: empty cost list");
  const std::size_t d = costs.front().dim();
  double L = 0.0;
  Mat h(d, d);
  for (const LocalCost& c : costs) {
    if (c.dim() != d) throw DimensionMismatch("aggregate: mixed dimensions");
    L = std::max(L, c.smoothness());
    const Mat hi = c.hessian();
    for (std::size_t k = 0; k < h.a.size(); ++k) h.a[k] += hi.a[k];
  }
  for (double& x : h.a) x /= static_cast<double>(costs.size());
  const Vec ev = jacobi_eigenvalues(h);
  const double mu = *std::min_element(ev.begin(), ev.end());
  if (mu <= 1e-12)
    throw NotStronglyConvex("aggregate cost is not strongly convex");
  return {L, mu};
}

std::pair<Vec, double> solve_reference(const std::vector<LocalCost>& costs,
                                       const ConvexSet& set, double tol,
                                       long max_iter) {
  const auto [L, mu] = aggregate_constants(costs);
  (void)mu;
  const std::size_t n = costs.size();
  const std::size_t d = costs.front().dim();
  Vec x = project(set, Vec(d, 0.0));
  const double step = 1.0 / L;
  for (long it = 0; it < max_iter; ++it) {
    Vec g(d, 0.0);
    for (const LocalCost& c : costs) axpy(1.0, c.grad(x), g);
    for (double& v : g) v /= static_cast<double>(n);
    Vec y = x;
    axpy(-step, g, y);
    y = project(set, y);
    const double move = norm2(sub(y, x));
    x = std::move(y);
    if (move <= tol) {
      double D = 0.0;
      for (const LocalCost& c : costs) D = std::max(D, norm2(c.grad(x)));
      return {x, D};
    }
  }
  throw NoConvergence("solve_reference: max_iter hit");
}

double ProblemInstance::f(const Vec& x) const {
  double s = 0.0;
  for (const LocalCost& c : costs) s += c.value(x);
  return s / static_cast<double>(n());
}

Vec ProblemInstance::grad_f(const Vec& x) const {
  Vec g(dim(), 0.0);
  for (const LocalCost& c : costs) axpy(1.0, c.grad(x), g);
  for (double& v : g) v /= static_cast<double>(n());
  return g;
}

ProblemInstance ProblemInstance::make(std::vector<LocalCost> costs,
                                      ConvexSet set, double tol,
                                      long max_iter) {
  ProblemInstance p;
  std::tie(p.L, p.mu) = aggregate_constants(costs);
  std::tie(p.x_star, p.D) = solve_reference(costs, set, tol, max_iter);
  p.costs = std::move(costs);
  p.set = std::move(set);
  // fixed-point identity x* = P[x* - (1/L) grad f(x*)]
  Vec y = p.x_star;
  axpy(-1.0 / p.L, p.grad_f(p.x_star), y);
  y = project(p.set, y);
  if (norm2(sub(y, p.x_star)) > 1e-9)
    throw NoConvergence("problem: x* fixed-point residual too large");
  return p;
}

ProblemInstance one_dim_example() {
  std::vector<LocalCost> costs;
  costs.push_back({Scalar1D{5.0}});
  costs.push_back({Scalar1D{-3.0}});
  return ProblemInstance::make(std::move(costs),
                               ConvexSet::interval(1.0, kInf));
}

namespace {

nlohmann::json mat_json(const Mat& m) {
  return {{"rows", m.rows}, {"cols", m.cols}, {"data", m.a}};
}

Mat mat_from_json(const nlohmann::json& j) {
  Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  m.a = j.at("data").get<std::vector<double>>();
  if (m.a.size() != m.rows * m.cols) throw Error("matrix json: bad size");
  return m;
}

}  // namespace

void to_json(nlohmann::json& j, const LocalCost& c) {
  std::visit(
      [&](const auto& cc) {
        using T = std::decay_t<decltype(cc)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          j = {{"type", "quadratic"},
               {"Q", mat_json(cc.Q)},
               {"b", cc.b},
               {"c", cc.c}};
        } else if constexpr (std::is_same_v<T, LeastSquares>) {
          j = {{"type", "least_squares"}, {"P", mat_json(cc.P)}, {"q", cc.q}};
        } else {
          j = {{"type", "scalar"}, {"a", cc.a}};
        }
      },
      c.v);
}

void from_json(const nlohmann::json& j, LocalCost& c) {
  const auto type = j.at("type").get<std::string>();
  if (type == "quadratic") {
    c.v = Quadratic{mat_from_json(j.at("Q")), j.at("b").get<Vec>(),
                    j.at("c").get<double>()};
  } else if (type == "least_squares") {
    c.v = LeastSquares{mat_from_json(j.at("P")), j.at("q").get<Vec>()};
  } else if (type == "scalar") {
    c.v = Scalar1D{j.at("a").get<double>()};
  } else {
    throw Error("cost json: unknown type '" + type + "'");
  }
}

void to_json(nlohmann::json& j, const ProblemInstance& p) {
  j = {{"costs", p.costs}, {"set", p.set},     {"L", p.L},
       {"mu", p.mu},       {"x_star", p.x_star}, {"D", p.D}};
}

void from_json(const nlohmann::json& j, ProblemInstance& p) {
  auto costs = j.at("costs").get<std::vector<LocalCost>>();
  ConvexSet set;
  j.at("set").get_to(set);
  p = ProblemInstance::make(std::move(costs), std::move(set));
}

}  // namespace dpg
