#include "dpg/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dpg/errors.hpp"
#include "dpg/random.hpp"

namespace dpg {

namespace {

bool connected(std::size_t n, const std::vector<std::vector<std::size_t>>& adj) {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

std::vector<std::vector<std::size_t>> adjacency(const Graph& g) {
  std::vector<std::vector<std::size_t>> adj(g.n);
  for (const auto& [i, j] : g.edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  return adj;
}

}  // namespace

Graph Graph::make(std::size_t n,
                  std::vector<std::pair<std::size_t, std::size_t>> edges) {
  if (n < 1) throw Error("graph: need at least one node");
  std::set<std::pair<std::size_t, std::size_t>> uniq;
  for (auto& [i, j] : edges) {
    if (i == j) throw Error("graph: self-loop");
    if (i >= n || j >= n) throw Error("graph: node index out of range");
    if (i > j) std::swap(i, j);
    uniq.insert({i, j});
  }
  Graph g;
  g.n = n;
  g.edges.assign(uniq.begin(), uniq.end());
  if (!g.is_connected()) throw NotConnected("graph: not connected");
  return g;
}

std::vector<std::size_t> Graph::degrees() const {
  std::vector<std::size_t> deg(n, 0);
  for (const auto& [i, j] : edges) {
    ++deg[i];
    ++deg[j];
  }
  return deg;
}

bool Graph::is_connected() const { return connected(n, adjacency(*this)); }

Graph build_watts_strogatz(std::size_t n, std::size_t k, double rewire_p,
                           std::uint64_t seed, int max_retries) {
  if (n < 3) throw Error("watts_strogatz: need n >= 3");
  if (k < 2 || k >= n || k % 2 != 0)
    throw InvalidDegree("watts_strogatz: k must be even with 2 <= k < n");
  if (rewire_p < 0.0 || rewire_p > 1.0)
    throw Error("watts_strogatz: rewire_p must be in [0,1]");

  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    Rng rng(seed + static_cast<std::uint64_t>(attempt));
    std::set<std::pair<std::size_t, std::size_t>> edges;
    auto key = [](std::size_t a, std::size_t b) {
      return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    // ring lattice
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 1; j <= k / 2; ++j) edges.insert(key(i, (i + j) % n));
    // rewire each lattice edge (i, i+j) with probability rewire_p
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 1; j <= k / 2; ++j) {
        const auto old_edge = key(i, (i + j) % n);
        if (rng.uniform01() >= rewire_p) continue;
        if (!edges.count(old_edge)) continue;
        // pick a fresh endpoint for i, avoiding self-loops and duplicates
        std::size_t h = rng.uniform_index(n);
        int guard = 0;
        while ((h == i || edges.count(key(i, h))) && guard++ < 1000)
          h = rng.uniform_index(n);
        if (h == i || edges.count(key(i, h))) continue;  // saturated node
        edges.erase(old_edge);
        edges.insert(key(i, h));
      }
    }
    Graph g;
    g.n = n;
    g.edges.assign(edges.begin(), edges.end());
    if (g.is_connected()) return g;
  }
  throw DisconnectedAfterRetries("watts_strogatz: no connected sample");
}

MixingMatrix metropolis_weights(const Graph& g) {
  const std::size_t n = g.n;
  const auto deg = g.degrees();
  Mat w(n, n);
  for (const auto& [i, j] : g.edges) {
    const double v = 1.0 / (1.0 + static_cast<double>(std::max(deg[i], deg[j])));
    w(i, j) = v;
    w(j, i) = v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) off += w(i, j);
    w(i, i) = 1.0 - off;
  }
  MixingMatrix m;
  m.w = std::move(w);
  std::tie(m.beta, m.lambda_min) = spectral(m.w);
  return m;
}

MixingMatrix explicit_matrix(const Mat& entries) {
  const std::size_t n = entries.rows;
  if (n != entries.cols) throw DimensionMismatch("mixing: matrix not square");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (entries(i, j) != entries(j, i))
        throw NotSymmetric("mixing: w[i][j] != w[j][i]");
      if (entries(i, j) < 0.0)
        throw NotStochastic("mixing: negative entry");
    }
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      row += entries(i, j);
      col += entries(j, i);
    }
    if (std::abs(row - 1.0) > 1e-12 || std::abs(col - 1.0) > 1e-12)
      throw NotStochastic("mixing: rows/columns must sum to 1");
  }
  MixingMatrix m;
  m.w = entries;
  std::tie(m.beta, m.lambda_min) = spectral(m.w);
  if (m.beta >= 1.0 - 1e-10)
    throw NotConnected("mixing: |lambda_2| >= 1, null(I-W) exceeds span{1}");
  return m;
}

std::pair<double, double> spectral(const Mat& w) {
  if (w.rows != w.cols) throw DimensionMismatch("spectral: matrix not square");
  Vec ev = jacobi_eigenvalues(w);
  const double lambda_min = *std::min_element(ev.begin(), ev.end());
  if (ev.size() == 1) return {0.0, lambda_min};
  // drop the eigenvalue closest to 1 (the consensus direction), take the
  // largest remaining magnitude
  std::size_t top = 0;
  for (std::size_t i = 1; i < ev.size(); ++i)
    if (std::abs(ev[i] - 1.0) < std::abs(ev[top] - 1.0)) top = i;
  double beta = 0.0;
  for (std::size_t i = 0; i < ev.size(); ++i)
    if (i != top) beta = std::max(beta, std::abs(ev[i]));
  return {beta, lambda_min};
}

Mat MixingMatrix::mix(const Mat& x) const {
  const std::size_t n = size();
  if (x.rows != n) throw DimensionMismatch("mix: row count != agent count");
  Mat y(n, x.cols);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      for (std::size_t c = 0; c < x.cols; ++c) y(i, c) += wij * x(j, c);
    }
  return y;
}

void to_json(nlohmann::json& j, const Graph& g) {
  j = nlohmann::json{{"n", g.n}, {"edges", g.edges}};
}

void from_json(const nlohmann::json& j, Graph& g) {
  std::vector<std::pair<std::size_t, std::size_t>> edges =
      j.at("edges").get<std::vector<std::pair<std::size_t, std::size_t>>>();
  g = Graph::make(j.at("n").get<std::size_t>(), std::move(edges));
}

void to_json(nlohmann::json& j, const MixingMatrix& m) {
  j = nlohmann::json{{"n", m.size()},
                     {"w", m.w.a},  // row-major
                     {"beta", m.beta},
                     {"lambda_min", m.lambda_min}};
}

void from_json(const nlohmann::json& j, MixingMatrix& m) {
  const auto n = j.at("n").get<std::size_t>();
  Mat w(n, n);
  w.a = j.at("w").get<std::vector<double>>();
  if (w.a.size() != n * n) throw DimensionMismatch("mixing json: bad size");
  m = explicit_matrix(w);
}

}  // namespace dpg
