// Compares the OpenMP step kernel against the serial reference on a
// large synthetic instance and verifies bitwise agreement.
#include <chrono>
#include <cstdio>
#include <cstring>

#include "dpg/iteration.hpp"
#include "dpg/random.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n = 400;
  std::size_t d = 64;
  int reps = 50;
  if (argc > 1) n = static_cast<std::size_t>(std::atol(argv[1]));
  if (argc > 2) d = static_cast<std::size_t>(std::atol(argv[2]));
  if (argc > 3) reps = std::atoi(argv[3]);

  dpg::Rng rng(7);
  std::vector<dpg::LocalCost> costs;
  for (std::size_t i = 0; i < n; ++i) {
    dpg::Mat A(d, d);
    for (double& v : A.a) v = rng.normal() / std::sqrt(double(d));
    dpg::Mat Q(d, d);
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        double s = 0.0;
        for (std::size_t m = 0; m < d; ++m) s += A(m, r) * A(m, c);
        Q(r, c) = s + (r == c ? 0.5 : 0.0);
      }
    dpg::Vec b(d);
    for (double& v : b) v = rng.normal();
    costs.push_back({dpg::Quadratic{std::move(Q), std::move(b), 0.0}});
  }
  const auto problem = dpg::ProblemInstance::make(
      std::move(costs), dpg::ConvexSet::ball(dpg::Vec(d, 0.0), 3.0));
  const auto g = dpg::build_watts_strogatz(n, 6, 0.3, 11);
  const auto w = dpg::metropolis_weights(g);
  const dpg::Mat x0 = dpg::random_initial_states(problem, 13, 2.0);
  const double alpha = 0.5 / (problem.L + problem.mu);

  // warm-up + bitwise agreement check
  dpg::Mat xp = dpg::dpg_step(problem, w, x0, alpha);
  dpg::Mat xs = dpg::dpg_step_serial(problem, w, x0, alpha);
  const bool identical =
      std::memcmp(xp.a.data(), xs.a.data(), xp.a.size() * sizeof(double)) == 0;

  auto t0 = Clock::now();
  dpg::Mat x = x0;
  for (int r = 0; r < reps; ++r) x = dpg::dpg_step(problem, w, x, alpha);
  const double t_par = seconds_since(t0);

  t0 = Clock::now();
  x = x0;
  for (int r = 0; r < reps; ++r) x = dpg::dpg_step_serial(problem, w, x, alpha);
  const double t_ser = seconds_since(t0);

  std::printf("n=%zu d=%zu reps=%d\n", n, d, reps);
  std::printf("parallel: %.4f s (%.2f us/step/agent)\n", t_par,
              1e6 * t_par / (double(reps) * double(n)));
  std::printf("serial:   %.4f s (%.2f us/step/agent)\n", t_ser,
              1e6 * t_ser / (double(reps) * double(n)));
  std::printf("speedup:  %.2fx\n", t_ser / t_par);
  std::printf("bitwise identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
