#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "dpg/errors.hpp"
#include "dpg/linalg.hpp"
#include "dpg/network.hpp"
#include "dpg/random.hpp"

using namespace dpg;

namespace {

// characteristic-polynomial roots for n <= 3, as an independent oracle
std::vector<double> brute_eigs(const Mat& m) {
  if (m.rows == 1) return {m(0, 0)};
  if (m.rows == 2) {
    const double tr = m(0, 0) + m(1, 1);
    const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    const double disc = std::sqrt(tr * tr / 4.0 - det);
    return {tr / 2.0 - disc, tr / 2.0 + disc};
  }
  // 3x3: solve lambda^3 - tr lambda^2 + m2 lambda - det = 0 (Cardano)
  const double a = m(0, 0), b = m(0, 1), c = m(0, 2);
  const double d = m(1, 1), e = m(1, 2), f = m(2, 2);
  const double tr = a + d + f;
  const double m2 = a * d + a * f + d * f - b * b - c * c - e * e;
  const double det = a * (d * f - e * e) - b * (b * f - e * c) +
                     c * (b * e - d * c);
  // shift x = lambda - tr/3 -> x^3 + px + q = 0; symmetric => 3 real roots
  const double p = m2 - tr * tr / 3.0;
  const double q = -2.0 * tr * tr * tr / 27.0 + tr * m2 / 3.0 - det;
  const double r = std::sqrt(std::max(0.0, -p / 3.0));
  std::vector<double> out;
  if (r < 1e-14) {
    out = {tr / 3.0, tr / 3.0, tr / 3.0};
  } else {
    double arg = 3.0 * q / (2.0 * p * r);
    arg = std::clamp(arg, -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k)
      out.push_back(tr / 3.0 +
                    2.0 * r * std::cos(phi - 2.0 * M_PI * k / 3.0));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

}  // namespace

TEST_CASE("watts-strogatz basic shapes") {
  const Graph g = build_watts_strogatz(50, 4, 0.3, 7);
  CHECK(g.n == 50);
  CHECK(g.is_connected());
  for (std::size_t deg : g.degrees()) CHECK(deg >= 2);

  const Graph ring = build_watts_strogatz(3, 2, 0.0, 0);
  CHECK(ring.edges.size() == 3);  // the 3-cycle
  std::set<std::pair<std::size_t, std::size_t>> want{{0, 1}, {0, 2}, {1, 2}};
  CHECK(std::set<std::pair<std::size_t, std::size_t>>(
            ring.edges.begin(), ring.edges.end()) == want);

  const Graph rewired = build_watts_strogatz(10, 4, 1.0, 1);
  CHECK(rewired.edges.size() == 20);  // rewiring preserves edge count
  CHECK(rewired.is_connected());

  CHECK_THROWS_AS(build_watts_strogatz(10, 3, 0.3, 1), InvalidDegree);
  CHECK_THROWS_AS(build_watts_strogatz(4, 4, 0.3, 1), InvalidDegree);
}

TEST_CASE("watts-strogatz is deterministic in the seed") {
  const Graph a = build_watts_strogatz(30, 4, 0.5, 99);
  const Graph b = build_watts_strogatz(30, 4, 0.5, 99);
  CHECK(a.edges == b.edges);
}

TEST_CASE("metropolis weights on small graphs") {
  // 2-node path: both degrees 1 -> all entries 1/2
  const Graph path = Graph::make(2, {{0, 1}});
  const MixingMatrix w2 = metropolis_weights(path);
  for (double v : w2.w.a) CHECK(v == doctest::Approx(0.5).epsilon(1e-15));

  // 3-cycle: degrees 2 -> edge weight 1/3, diagonal 1/3.  All-1/3 is the
  // rank-1 averaging matrix: circulant eigenvalues 1/3 + (2/3)cos(2pi k/3)
  // are {1, 0, 0}, so beta = 0.
  const Graph cyc = Graph::make(3, {{0, 1}, {1, 2}, {0, 2}});
  const MixingMatrix w3 = metropolis_weights(cyc);
  for (double v : w3.w.a) CHECK(v == doctest::Approx(1.0 / 3.0));
  CHECK(w3.beta == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));

  // star on 4 nodes: leaf-center weight 1/4, leaf diagonal 3/4
  const Graph star = Graph::make(4, {{0, 1}, {0, 2}, {0, 3}});
  const MixingMatrix ws = metropolis_weights(star);
  CHECK(ws.w(0, 1) == doctest::Approx(0.25));
  CHECK(ws.w(1, 1) == doctest::Approx(0.75));
  for (std::size_t i = 0; i < 4; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
      row += ws.w(i, j);
      col += ws.w(j, i);
    }
    CHECK(row == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(col == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("explicit matrix validation and spectra") {
  const MixingMatrix w =
      explicit_matrix(mat2(2.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0));
  CHECK(w.beta == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(w.lambda_min == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  Mat one(1, 1);
  one(0, 0) = 1.0;
  const MixingMatrix w1 = explicit_matrix(one);
  CHECK(w1.beta == 0.0);  // single-agent convention
  CHECK(w1.lambda_min == doctest::Approx(1.0));

  const MixingMatrix avg = explicit_matrix(mat2(0.5, 0.5, 0.5, 0.5));
  CHECK(avg.beta == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(explicit_matrix(mat2(0.7, 0.3, 0.2, 0.8)), NotSymmetric);
  CHECK_THROWS_AS(explicit_matrix(mat2(0.7, 0.2, 0.2, 0.7)), NotStochastic);
  CHECK_THROWS_AS(explicit_matrix(mat2(1.0, 0.0, 0.0, 1.0)), NotConnected);
}

TEST_CASE("spectral agrees with characteristic-polynomial oracle, n <= 3") {
  Rng rng(314);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 2 + rng.uniform_index(2);
    Mat m(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i; j < n; ++j)
        m(i, j) = m(j, i) = rng.uniform(-1.0, 1.0);
    const Vec eigs = jacobi_eigenvalues(m);  // sorted descending
    std::vector<double> oracle = brute_eigs(m);
    REQUIRE(oracle.size() == eigs.size());
    for (std::size_t i = 0; i < n; ++i)
      CHECK(eigs[i] ==
            doctest::Approx(oracle[n - 1 - i]).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("mixing contraction property, 1000 random cases") {
  Rng rng(2718);
  int failures = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 3 + rng.uniform_index(10);
    const std::size_t k = 2;
    const Graph g = build_watts_strogatz(n, k, rng.uniform01(), 1000 + rep);
    const MixingMatrix w = metropolis_weights(g);
    const std::size_t d = 1 + rng.uniform_index(4);
    Mat x(n, d);
    for (double& v : x.a) v = rng.normal() * 3.0;
    const Mat wx = w.mix(x);
    const Vec xb = row_mean(x);
    double lhs = 0.0, rhs = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        const double dev = wx(i, c) - xb[c];  // mixing preserves the mean
        lhs += dev * dev;
        const double dv = x(i, c) - xb[c];
        rhs += dv * dv;
      }
    }
    if (lhs > w.beta * w.beta * rhs + 1e-9) ++failures;

    // and double stochasticity: mean preserved to 1e-12
    const Vec wxb = row_mean(wx);
    for (std::size_t c = 0; c < d; ++c)
      CHECK(wxb[c] == doctest::Approx(xb[c]).epsilon(1e-12).scale(1.0));
  }
  CHECK(failures == 0);
}

TEST_CASE("graph construction rejects bad inputs") {
  CHECK_THROWS(Graph::make(3, {{0, 0}}));                 // self-loop
  CHECK_THROWS_AS(Graph::make(4, {{0, 1}, {2, 3}}), NotConnected);
  CHECK(Graph::make(2, {{1, 0}}).edges ==
        std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}});
}

TEST_CASE("mixing matrix JSON round-trip") {
  const Graph g = build_watts_strogatz(8, 4, 0.3, 5);
  const MixingMatrix w = metropolis_weights(g);
  nlohmann::json j = w;
  const auto back = j.get<MixingMatrix>();
  CHECK(back.w.a == w.w.a);
  CHECK(back.beta == w.beta);
}
