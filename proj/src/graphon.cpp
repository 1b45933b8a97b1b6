#include "gmfc/graphon.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "gmfc/rng.hpp"

namespace gmfc {

namespace {

void require_probability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

}  // namespace

Graphon Graphon::erdos_renyi(double p) {
  require_probability(p, "p");
  Graphon g;
  g.kind_ = Kind::ErdosRenyi;
  g.p_ = p;
  return g;
}

Graphon Graphon::stochastic_block(double p_intra, double q_inter,
                                  double boundary) {
  require_probability(p_intra, "p_intra");
  require_probability(q_inter, "q_inter");
  if (!(boundary > 0.0 && boundary < 1.0))
    throw std::invalid_argument("boundary must lie in (0,1)");
  Graphon g;
  g.kind_ = Kind::StochasticBlock;
  g.p_ = p_intra;
  g.q_ = q_inter;
  g.boundary_ = boundary;
  return g;
}

Graphon Graphon::random_geometric() {
  Graphon g;
  g.kind_ = Kind::RandomGeometric;
  return g;
}

Graphon Graphon::step(std::vector<std::vector<double>> matrix) {
  const int k = static_cast<int>(matrix.size());
  if (k == 0) throw std::invalid_argument("step matrix must be non-empty");
  Graphon g;
  g.kind_ = Kind::Step;
  g.step_blocks_ = k;
  g.step_.resize(static_cast<std::size_t>(k) * k);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(matrix[i].size()) != k)
      throw std::invalid_argument("step matrix must be square");
    for (int j = 0; j < k; ++j) {
      require_probability(matrix[i][j], "step matrix entry");
      g.step_[static_cast<std::size_t>(i) * k + j] = matrix[i][j];
    }
  }
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (g.step_[static_cast<std::size_t>(i) * k + j] !=
          g.step_[static_cast<std::size_t>(j) * k + i])
        throw std::invalid_argument("step matrix must be symmetric");
  return g;
}

BlockKernel discretize(const Graphon& g, int m) {
  if (m < 1) throw std::invalid_argument("block count must be >= 1");
  BlockKernel k;
  k.blocks = m;
  k.grid.resize(m);
  for (int i = 0; i < m; ++i) k.grid[i] = static_cast<double>(i + 1) / m;
  k.weights.resize(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) {
      const double w = g.evaluate(k.grid[i], k.grid[j]);
      k.weights[static_cast<std::size_t>(i) * m + j] = w;
      k.weights[static_cast<std::size_t>(j) * m + i] = w;
    }
  return k;
}

Graphon step_of(const Graphon& g, int m) {
  const BlockKernel k = discretize(g, m);
  std::vector<std::vector<double>> rows(m, std::vector<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) rows[i][j] = k.at(i, j);
  return Graphon::step(std::move(rows));
}

EdgeBits sample_edge_bits(const Graphon& g, int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("agent count must be >= 1");
  EdgeBits bits(n);
  Rng rng(seed);
  for (int i = 0; i < n; ++i) {
    const double ai = static_cast<double>(i + 1) / n;
    for (int j = i; j < n; ++j) {
      const double aj = static_cast<double>(j + 1) / n;
      if (rng.bernoulli(g.evaluate(ai, aj))) {
        bits.set(i, j);
        bits.set(j, i);
      }
    }
  }
  return bits;
}

WeightMatrix sample_edges(const Graphon& g, int n, EdgeMode mode,
                          std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("agent count must be >= 1");
  WeightMatrix w;
  w.n = n;
  w.data.resize(static_cast<std::size_t>(n) * n);
  if (mode == EdgeMode::C1) {
    for (int i = 0; i < n; ++i) {
      const double ai = static_cast<double>(i + 1) / n;
      for (int j = i; j < n; ++j) {
        const double aj = static_cast<double>(j + 1) / n;
        const double v = g.evaluate(ai, aj);
        w.data[static_cast<std::size_t>(i) * n + j] = v;
        w.data[static_cast<std::size_t>(j) * n + i] = v;
      }
    }
  } else {
    const EdgeBits bits = sample_edge_bits(g, n, seed);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w.data[static_cast<std::size_t>(i) * n + j] = bits.at(i, j) ? 1.0 : 0.0;
  }
  return w;
}

namespace {

// One alternating-ascent pass of the bilinear form (1/G^2) h' D g over sign
// vectors, starting from g0. D is row-major G x G.
double sign_ascent(const std::vector<double>& d, int g_res,
                   std::vector<double>& g, std::vector<double>& h) {
  const double scale = 1.0 / (static_cast<double>(g_res) * g_res);
  double value = -1.0;
  for (int iter = 0; iter < 64; ++iter) {
    // h = sign(D g)
    for (int u = 0; u < g_res; ++u) {
      double s = 0.0;
      const double* row = d.data() + static_cast<std::size_t>(u) * g_res;
      for (int v = 0; v < g_res; ++v) s += row[v] * g[v];
      h[u] = s >= 0.0 ? 1.0 : -1.0;
    }
    // g = sign(D' h); D is not symmetric in general, walk columns.
    for (int v = 0; v < g_res; ++v) {
      double s = 0.0;
      for (int u = 0; u < g_res; ++u)
        s += d[static_cast<std::size_t>(u) * g_res + v] * h[u];
      g[v] = s >= 0.0 ? 1.0 : -1.0;
    }
    double bilinear = 0.0;
    for (int u = 0; u < g_res; ++u) {
      double s = 0.0;
      const double* row = d.data() + static_cast<std::size_t>(u) * g_res;
      for (int v = 0; v < g_res; ++v) s += row[v] * g[v];
      bilinear += h[u] * s;
    }
    const double next = scale * bilinear;
    if (next <= value + 1e-15) return std::max(value, next);
    value = next;
  }
  return value;
}

}  // namespace

double operator_norm_distance(const Graphon& a, const Graphon& b,
                              int grid_resolution, std::uint64_t seed) {
  if (grid_resolution < 2)
    throw std::invalid_argument("grid_resolution must be >= 2");
  const int g_res = grid_resolution;
  std::vector<double> diff(static_cast<std::size_t>(g_res) * g_res);
  std::vector<double> neg(diff.size());
  for (int u = 0; u < g_res; ++u) {
    const double x = (u + 0.5) / g_res;
    for (int v = 0; v < g_res; ++v) {
      const double y = (v + 0.5) / g_res;
      const double d = a.evaluate(x, y) - b.evaluate(x, y);
      diff[static_cast<std::size_t>(u) * g_res + v] = d;
      neg[static_cast<std::size_t>(u) * g_res + v] = -d;
    }
  }

  constexpr int kRestarts = 16;
  Rng rng(seed);
  std::vector<double> g(g_res), h(g_res);
  double best = 0.0;
  for (int r = 0; r < kRestarts; ++r) {
    std::vector<double> start(g_res, 1.0);
    if (r > 0)
      for (auto& v : start) v = rng.bernoulli(0.5) ? 1.0 : -1.0;
    // Ascending on both D and -D keeps the estimate invariant under
    // swapping the kernels.
    g = start;
    best = std::max(best, sign_ascent(diff, g_res, g, h));
    g = start;
    best = std::max(best, sign_ascent(neg, g_res, g, h));
  }
  return best;
}

}  // namespace gmfc
