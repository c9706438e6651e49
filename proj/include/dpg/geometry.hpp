#pragma once

#include <limits>
#include <variant>

#include "dpg/linalg.hpp"

#include <json.hpp>

namespace dpg {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed convex feasible sets with exact Euclidean projections.
// WholeSpace makes unconstrained runs a zero-cost special case.
struct WholeSpace {};

struct Ball {
  Vec center;
  double radius;
};

// Componentwise bounds; +-infinity entries mean unbounded sides.
struct Box {
  Vec lower;
  Vec upper;
};

// { x : <a, x> <= b }
struct Halfspace {
  Vec a;
  double b;
};

// One-dimensional interval [lower, upper], possibly unbounded.
struct Interval1D {
  double lower;
  double upper;
};

// { x : x >= 0, sum x = radius }
struct Simplex {
  double radius;
};

struct ConvexSet {
  std::variant<WholeSpace, Ball, Box, Halfspace, Interval1D, Simplex> v;

  static ConvexSet whole_space() { return {WholeSpace{}}; }
  static ConvexSet ball(Vec center, double radius);
  static ConvexSet box(Vec lower, Vec upper);
  static ConvexSet halfspace(Vec a, double b);
  static ConvexSet interval(double lower, double upper);
  static ConvexSet simplex(double radius);
};

// Unique Euclidean projection of y onto the set.
Vec project(const ConvexSet& s, const Vec& y);

// True iff y lies within tol of the set.
bool contains(const ConvexSet& s, const Vec& y, double tol = 1e-12);

// True iff the set is bounded, which relaxes the stepsize requirements
// (boundedness of the iterates comes for free).
bool is_bounded(const ConvexSet& s);

void to_json(nlohmann::json& j, const ConvexSet& s);
void from_json(const nlohmann::json& j, ConvexSet& s);

}  // namespace dpg
