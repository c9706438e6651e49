#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dpg/linalg.hpp"

#include <json.hpp>

namespace dpg {

// Undirected connected communication graph.  Edges are stored as ordered
// pairs (i < j); self-loops are forbidden (self-weights live on the
// mixing-matrix diagonal).
struct Graph {
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;

  // Validates (no self-loops, indices in range, connected) and normalizes
  // edge order.  Throws NotConnected / Error on violation.
  static Graph make(std::size_t n,
                    std::vector<std::pair<std::size_t, std::size_t>> edges);

  std::vector<std::size_t> degrees() const;
  bool is_connected() const;
};

// Symmetric doubly stochastic consensus weights with cached spectral
// quantities.  beta = |lambda_2(W)| < 1, lambda_min = lambda_n(W).
struct MixingMatrix {
  Mat w;
  double beta = 0.0;
  double lambda_min = 1.0;

  std::size_t size() const { return w.rows; }

  // Rows of `x` are agent states; returns W x (same shape).
  Mat mix(const Mat& x) const;
};

// Watts-Strogatz small-world graph: ring lattice with k/2 neighbors per
// side, each lattice edge rewired with probability rewire_p.  If a sample
// is disconnected the construction resamples with seed+1 (bounded retries).
Graph build_watts_strogatz(std::size_t n, std::size_t k, double rewire_p,
                           std::uint64_t seed, int max_retries = 64);

// Metropolis weights: w_ij = 1/(1 + max(deg_i, deg_j)) on edges, diagonal
// fills the row to 1.  Satisfies every MixingMatrix invariant on any
// connected graph.
MixingMatrix metropolis_weights(const Graph& g);

// Validates an explicit weight matrix (symmetry, double stochasticity,
// nonnegativity, |lambda_2| < 1) and computes its spectral quantities.
// Throws NotSymmetric / NotStochastic / NotConnected.
MixingMatrix explicit_matrix(const Mat& entries);

// beta = second-largest absolute eigenvalue, lambda_min = smallest
// eigenvalue, via the cyclic Jacobi solver.  n = 1 returns beta = 0 by
// convention (a lone agent has no disagreement subspace).
std::pair<double, double> spectral(const Mat& w);

void to_json(nlohmann::json& j, const Graph& g);
void from_json(const nlohmann::json& j, Graph& g);
void to_json(nlohmann::json& j, const MixingMatrix& m);
void from_json(const nlohmann::json& j, MixingMatrix& m);

}  // namespace dpg
