#include "dpg/iteration.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "dpg/errors.hpp"
#include "dpg/random.hpp"

namespace dpg {

StepSchedule StepSchedule::constant(double alpha) {
  if (!(alpha > 0.0)) throw Error("schedule: alpha must be positive");
  return {ConstantStep{alpha}};
}

StepSchedule StepSchedule::polynomial(double v, double w, double p) {
  if (!(v > 0.0)) throw Error("schedule: v must be positive");
  if (!(w >= 1.0)) throw Error("schedule: w must be >= 1");
  if (!(p > 0.0 && p <= 1.0)) throw Error("schedule: p must be in (0,1]");
  return {PolynomialStep{v, w, p}};
}

double StepSchedule::alpha(long t) const {
  if (t < 0) throw Error("schedule: negative t");
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ConstantStep>)
          return s.alpha;
        else
          return s.v / std::pow(static_cast<double>(t) + s.w, s.p);
      },
      v);
}

namespace {

void step_row(const ProblemInstance& p, const MixingMatrix& w, const Mat& X,
              double alpha_t, std::size_t i, Mat& out) {
  const std::size_t n = X.rows;
  const std::size_t d = X.cols;
  Vec y(d, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double wij = w.w(i, j);
    if (wij == 0.0) continue;
    for (std::size_t c = 0; c < d; ++c) y[c] += wij * X(j, c);
  }
  axpy(-alpha_t, p.costs[i].grad(X.row_vec(i)), y);
  const Vec xi = project(p.set, y);
  for (std::size_t c = 0; c < d; ++c) out(i, c) = xi[c];
}

double frobenius(const Mat& x) {
  double s = 0.0;
  for (double v : x.a) s += v * v;
  return std::sqrt(s);
}

bool finite(const Mat& x) {
  for (double v : x.a)
    if (!std::isfinite(v)) return false;
  return true;
}

IterateRecord make_record(const ProblemInstance& p, long t, double alpha_t,
                          Mat X, double r1_den, double r2_den) {
  IterateRecord r;
  r.t = t;
  r.alpha = alpha_t;
  r.x_bar = row_mean(X);
  r.A = sq_dist_rows(X, r.x_bar);
  r.B = static_cast<double>(X.rows) * sq_norm(sub(r.x_bar, p.x_star));
  r.C = r.A + r.B;
  double consensus_sum = 0.0;
  for (std::size_t i = 0; i < X.rows; ++i)
    consensus_sum += norm2(sub(X.row_vec(i), r.x_bar));
  const double dist = norm2(sub(r.x_bar, p.x_star));
  r.R1 = r1_den > 0.0 ? dist / r1_den : 0.0;
  r.R2 = r2_den > 0.0 ? consensus_sum / r2_den : 0.0;
  r.X = std::move(X);
  return r;
}

}  // namespace

Mat dpg_step(const ProblemInstance& p, const MixingMatrix& w, const Mat& X,
             double alpha_t) {
  if (X.rows != p.n() || X.cols != p.dim())
    throw DimensionMismatch("dpg_step: state shape");
  Mat out(X.rows, X.cols);
  const long n = static_cast<long>(X.rows);
#pragma omp parallel for schedule(static)
  for (long i = 0; i < n; ++i)
    step_row(p, w, X, alpha_t, static_cast<std::size_t>(i), out);
  return out;
}

Mat dpg_step_serial(const ProblemInstance& p, const MixingMatrix& w,
                    const Mat& X, double alpha_t) {
  if (X.rows != p.n() || X.cols != p.dim())
    throw DimensionMismatch("dpg_step: state shape");
  Mat out(X.rows, X.cols);
  for (std::size_t i = 0; i < X.rows; ++i) step_row(p, w, X, alpha_t, i, out);
  return out;
}

Trajectory run(const ProblemInstance& p, const MixingMatrix& w,
               const StepSchedule& schedule, Mat X0, long T,
               const RunOptions& opts) {
  for (std::size_t i = 0; i < X0.rows; ++i) {
    const Vec xi = project(p.set, X0.row_vec(i));
    for (std::size_t c = 0; c < X0.cols; ++c) X0(i, c) = xi[c];
  }

  Trajectory traj;
  traj.records.reserve(static_cast<std::size_t>(T) + 1);

  // denominators for the relative errors come from the projected X0
  const Vec xb0 = row_mean(X0);
  const double r1_den = norm2(sub(xb0, p.x_star));
  double r2_den = 0.0;
  for (std::size_t i = 0; i < X0.rows; ++i)
    r2_den += norm2(sub(X0.row_vec(i), xb0));
  traj.records.push_back(
      make_record(p, 0, schedule.alpha(0), Mat(X0), r1_den, r2_den));

  Mat X = std::move(X0);
  for (long t = 0; t < T; ++t) {
    const double a = schedule.alpha(t);
    Mat next = dpg_step(p, w, X, a);
    if (!finite(next) || frobenius(next) > opts.divergence_threshold) {
      if (opts.throw_on_divergence)
        throw NonFiniteState("dpg run: state diverged", t + 1);
      traj.diverged = true;
      traj.diverged_at = t + 1;
      return traj;
    }
    X = std::move(next);
    traj.records.push_back(
        make_record(p, t + 1, schedule.alpha(t + 1), X, r1_den, r2_den));
  }
  return traj;
}

double energy_functional(const ProblemInstance& p, const MixingMatrix& w,
                         double alpha, const Mat& X) {
  const std::size_t n = X.rows;
  double quad = 0.0;
  for (std::size_t k = 0; k < n; ++k) quad += sq_norm(X.row_vec(k));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      const double wkj = w.w(k, j);
      if (wkj == 0.0) continue;
      quad -= wkj * dot(X.row_vec(k), X.row_vec(j));
    }
  double costs = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    costs += p.costs[k].value(X.row_vec(k));
  return 0.5 * quad + alpha * costs;
}

Mat random_initial_states(const ProblemInstance& p, std::uint64_t seed,
                          double scale) {
  Rng rng(seed);
  Mat X(p.n(), p.dim());
  for (double& v : X.a) v = scale * rng.normal();
  return X;  // run() projects rows before the first step
}

void write_csv(std::ostream& os, const Trajectory& traj,
               const std::vector<std::string>& bound_names,
               const std::vector<Vec>& bound_columns) {
  os << "t,A,B,C,R1,R2,alpha";
  for (const auto& name : bound_names) os << ',' << name;
  os << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << ',' << buf;
  };
  for (std::size_t k = 0; k < traj.records.size(); ++k) {
    const IterateRecord& r = traj.records[k];
    os << r.t;
    put(r.A);
    put(r.B);
    put(r.C);
    put(r.R1);
    put(r.R2);
    put(r.alpha);
    for (const Vec& col : bound_columns) put(col[k]);
    os << '\n';
  }
}

void to_json(nlohmann::json& j, const StepSchedule& s) {
  std::visit(
      [&](const auto& ss) {
        using T = std::decay_t<decltype(ss)>;
        if constexpr (std::is_same_v<T, ConstantStep>)
          j = {{"type", "constant"}, {"alpha", ss.alpha}};
        else
          j = {{"type", "polynomial"}, {"v", ss.v}, {"w", ss.w}, {"p", ss.p}};
      },
      s.v);
}

void from_json(const nlohmann::json& j, StepSchedule& s) {
  const auto type = j.at("type").get<std::string>();
  if (type == "constant") {
    s = StepSchedule::constant(j.at("alpha").get<double>());
  } else if (type == "polynomial") {
    s = StepSchedule::polynomial(j.at("v").get<double>(),
                                 j.at("w").get<double>(),
                                 j.at("p").get<double>());
  } else {
    throw Error("schedule json: unknown type '" + type + "'");
  }
}

}  // namespace dpg
