#include "dpg/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "dpg/errors.hpp"

namespace dpg {

ConvexSet ConvexSet::ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw Error("ball: radius must be positive");
  return {Ball{std::move(center), radius}};
}

ConvexSet ConvexSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size()) throw DimensionMismatch("box: bound sizes");
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (lower[i] > upper[i]) throw Error("box: empty (lower > upper)");
  return {Box{std::move(lower), std::move(upper)}};
}

ConvexSet ConvexSet::halfspace(Vec a, double b) {
  if (sq_norm(a) == 0.0) throw Error("halfspace: zero normal");
  return {Halfspace{std::move(a), b}};
}

ConvexSet ConvexSet::interval(double lower, double upper) {
  if (lower > upper) throw Error("interval: empty");
  return {Interval1D{lower, upper}};
}

ConvexSet ConvexSet::simplex(double radius) {
  if (!(radius > 0.0)) throw Error("simplex: radius must be positive");
  return {Simplex{radius}};
}

namespace {

void check_dim(std::size_t want, std::size_t got, const char* what) {
  if (want != got) throw DimensionMismatch(what);
}

Vec project_simplex(const Vec& y, double r) {
  // sort-and-threshold: find tau with sum(max(y_i - tau, 0)) = r
  Vec u = y;
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cum = 0.0;
  double tau = 0.0;
  std::size_t k = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - r) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) {
      tau = t;
      k = i + 1;
    }
  }
  (void)k;
  Vec x(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) x[i] = std::max(y[i] - tau, 0.0);
  return x;
}

}  // namespace

Vec project(const ConvexSet& s, const Vec& y) {
  for (double v : y)
    if (!std::isfinite(v)) throw Error("project: non-finite input");
  return std::visit(
      [&](const auto& set) -> Vec {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return y;
        } else if constexpr (std::is_same_v<T, Ball>) {
          check_dim(set.center.size(), y.size(), "project: ball dimension");
          Vec d = sub(y, set.center);
          const double nd = norm2(d);
          if (nd <= set.radius) return y;
          Vec x = set.center;
          axpy(set.radius / nd, d, x);
          return x;
        } else if constexpr (std::is_same_v<T, Box>) {
          check_dim(set.lower.size(), y.size(), "project: box dimension");
          Vec x(y.size());
          for (std::size_t i = 0; i < y.size(); ++i)
            x[i] = std::min(std::max(y[i], set.lower[i]), set.upper[i]);
          return x;
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          check_dim(set.a.size(), y.size(), "project: halfspace dimension");
          const double excess = dot(set.a, y) - set.b;
          if (excess <= 0.0) return y;
          Vec x = y;
          axpy(-excess / sq_norm(set.a), set.a, x);
          return x;
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          check_dim(1, y.size(), "project: interval dimension");
          return {std::min(std::max(y[0], set.lower), set.upper)};
        } else {  // Simplex
          return project_simplex(y, set.radius);
        }
      },
      s.v);
}

bool contains(const ConvexSet& s, const Vec& y, double tol) {
  return std::visit(
      [&](const auto& set) -> bool {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          return true;
        } else if constexpr (std::is_same_v<T, Ball>) {
          check_dim(set.center.size(), y.size(), "contains: ball dimension");
          return norm2(sub(y, set.center)) <= set.radius + tol;
        } else if constexpr (std::is_same_v<T, Box>) {
          check_dim(set.lower.size(), y.size(), "contains: box dimension");
          for (std::size_t i = 0; i < y.size(); ++i)
            if (y[i] < set.lower[i] - tol || y[i] > set.upper[i] + tol)
              return false;
          return true;
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          check_dim(set.a.size(), y.size(), "contains: halfspace dimension");
          return dot(set.a, y) <= set.b + tol * norm2(set.a);
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          check_dim(1, y.size(), "contains: interval dimension");
          return y[0] >= set.lower - tol && y[0] <= set.upper + tol;
        } else {  // Simplex
          double sum = 0.0;
          for (double v : y) {
            if (v < -tol) return false;
            sum += v;
          }
          return std::abs(sum - set.radius) <= tol;
        }
      },
      s.v);
}

bool is_bounded(const ConvexSet& s) {
  return std::visit(
      [](const auto& set) -> bool {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, Ball> || std::is_same_v<T, Simplex>) {
          return true;
        } else if constexpr (std::is_same_v<T, Box>) {
          for (std::size_t i = 0; i < set.lower.size(); ++i)
            if (set.lower[i] == -kInf || set.upper[i] == kInf) return false;
          return true;
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          return set.lower != -kInf && set.upper != kInf;
        } else {  // WholeSpace, Halfspace
          return false;
        }
      },
      s.v);
}

namespace {

nlohmann::json encode_extended(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return v;
}

double decode_extended(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw Error("convex set json: bad extended real '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

void to_json(nlohmann::json& j, const ConvexSet& s) {
  std::visit(
      [&](const auto& set) {
        using T = std::decay_t<decltype(set)>;
        if constexpr (std::is_same_v<T, WholeSpace>) {
          j = {{"type", "whole_space"}};
        } else if constexpr (std::is_same_v<T, Ball>) {
          j = {{"type", "ball"}, {"center", set.center}, {"radius", set.radius}};
        } else if constexpr (std::is_same_v<T, Box>) {
          nlohmann::json lo = nlohmann::json::array();
          nlohmann::json hi = nlohmann::json::array();
          for (double v : set.lower) lo.push_back(encode_extended(v));
          for (double v : set.upper) hi.push_back(encode_extended(v));
          j = {{"type", "box"}, {"lower", lo}, {"upper", hi}};
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          j = {{"type", "halfspace"}, {"a", set.a}, {"b", set.b}};
        } else if constexpr (std::is_same_v<T, Interval1D>) {
          j = {{"type", "interval"},
               {"lower", encode_extended(set.lower)},
               {"upper", encode_extended(set.upper)}};
        } else {  // Simplex
          j = {{"type", "simplex"}, {"radius", set.radius}};
        }
      },
      s.v);
}

void from_json(const nlohmann::json& j, ConvexSet& s) {
  const auto type = j.at("type").get<std::string>();
  if (type == "whole_space") {
    s = ConvexSet::whole_space();
  } else if (type == "ball") {
    s = ConvexSet::ball(j.at("center").get<Vec>(), j.at("radius").get<double>());
  } else if (type == "box") {
    Vec lo, hi;
    for (const auto& v : j.at("lower")) lo.push_back(decode_extended(v));
    for (const auto& v : j.at("upper")) hi.push_back(decode_extended(v));
    s = ConvexSet::box(std::move(lo), std::move(hi));
  } else if (type == "halfspace") {
    s = ConvexSet::halfspace(j.at("a").get<Vec>(), j.at("b").get<double>());
  } else if (type == "interval") {
    s = ConvexSet::interval(decode_extended(j.at("lower")),
                            decode_extended(j.at("upper")));
  } else if (type == "simplex") {
    s = ConvexSet::simplex(j.at("radius").get<double>());
  } else {
    throw Error("convex set json: unknown type '" + type + "'");
  }
}

}  // namespace dpg
