#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace gmfc {

/// Symmetric measurable kernel W on [0,1]^2 with values in [0,1]. Immutable
/// after construction and safe to share across threads.
class Graphon {
 public:
  enum class Kind { ErdosRenyi, StochasticBlock, RandomGeometric, Step };

  /// Constant kernel W(a, b) = p.
  static Graphon erdos_renyi(double p);

  /// Two communities split at `boundary`; p_intra within a community,
  /// q_inter across. The boundary point itself belongs to the lower
  /// community.
  static Graphon stochastic_block(double p_intra, double q_inter,
                                  double boundary);

  /// W(a, b) = f(min(|b - a|, 1 - |b - a|)) with f(x) = exp(-x / (0.5 - x))
  /// on [0, 0.5] and f(0.5) = 0 by continuity.
  static Graphon random_geometric();

  /// Piecewise-constant kernel on a uniform KxK partition. The matrix must
  /// be square, symmetric, and entrywise in [0,1]. Cell k covers the
  /// interval ((k-1)/K, k/K]; the point 0 falls into the first cell.
  static Graphon step(std::vector<std::vector<double>> matrix);

  Kind kind() const { return kind_; }

  /// W(alpha, beta). Throws std::domain_error outside the unit square.
  /// Exactly symmetric in its arguments for every kind. Inline: this sits
  /// in the innermost loop of large-population simulations.
  double evaluate(double alpha, double beta) const {
    if (!(alpha >= 0.0 && alpha <= 1.0))
      throw std::domain_error("alpha outside [0,1]");
    if (!(beta >= 0.0 && beta <= 1.0))
      throw std::domain_error("beta outside [0,1]");
    switch (kind_) {
      case Kind::ErdosRenyi:
        return p_;
      case Kind::StochasticBlock: {
        const bool lower_a = alpha <= boundary_;
        const bool lower_b = beta <= boundary_;
        return lower_a == lower_b ? p_ : q_;
      }
      case Kind::RandomGeometric: {
        const double d = std::abs(beta - alpha);
        const double x = std::min(d, 1.0 - d);
        if (x >= 0.5) return 0.0;  // f(0.5) = 0 by continuity
        return std::exp(-x / (0.5 - x));
      }
      case Kind::Step: {
        // Cell k covers ((k-1)/K, k/K]; alpha = 0 maps to the first cell.
        const int ca = std::clamp(
            static_cast<int>(std::ceil(alpha * step_blocks_)) - 1, 0,
            step_blocks_ - 1);
        const int cb = std::clamp(
            static_cast<int>(std::ceil(beta * step_blocks_)) - 1, 0,
            step_blocks_ - 1);
        return step_[static_cast<std::size_t>(ca) * step_blocks_ + cb];
      }
    }
    return 0.0;  // unreachable
  }

  // Parameter accessors for config echoing; only meaningful for the
  // matching kind.
  double p() const { return p_; }
  double q() const { return q_; }
  double boundary() const { return boundary_; }
  int step_blocks() const { return step_blocks_; }
  const std::vector<double>& step_matrix() const { return step_; }

 private:
  Graphon() = default;

  Kind kind_ = Kind::ErdosRenyi;
  double p_ = 0.0;
  double q_ = 0.0;
  double boundary_ = 0.5;
  int step_blocks_ = 0;
  std::vector<double> step_;  // row-major step_blocks_ x step_blocks_
};

/// Kernel sampled on M uniform anchor points alpha_k = k/M, k = 1..M.
struct BlockKernel {
  int blocks = 0;
  std::vector<double> grid;     // anchor points, strictly increasing in (0,1]
  std::vector<double> weights;  // row-major MxM, symmetric, entries in [0,1]

  double at(int m, int mp) const {
    return weights[static_cast<std::size_t>(m) * blocks + mp];
  }
};

/// Evaluates g on the uniform anchor grid. Throws std::invalid_argument for
/// m < 1.
BlockKernel discretize(const Graphon& g, int m);

/// The step graphon induced by the M-block discretization of g.
Graphon step_of(const Graphon& g, int m);

enum class EdgeMode { C1, C2 };

/// Dense symmetric interaction weights for an n-agent system; entry (i,j)
/// uses the anchor points i/n, j/n with 1-based agent indices.
struct WeightMatrix {
  int n = 0;
  std::vector<double> data;  // row-major n x n

  double at(int i, int j) const {
    return data[static_cast<std::size_t>(i) * n + j];
  }
};

/// Symmetric 0/1 edge indicators packed into bits; one Bernoulli draw per
/// unordered pair (diagonal included), mirrored to both triangles.
class EdgeBits {
 public:
  EdgeBits() = default;
  EdgeBits(int n) : n_(n), words_((static_cast<std::size_t>(n) * n + 63) / 64) {}

  int size() const { return n_; }
  bool at(int i, int j) const {
    const std::size_t bit = static_cast<std::size_t>(i) * n_ + j;
    return (words_[bit >> 6] >> (bit & 63)) & 1u;
  }
  void set(int i, int j) {
    const std::size_t bit = static_cast<std::size_t>(i) * n_ + j;
    words_[bit >> 6] |= std::uint64_t{1} << (bit & 63);
  }

 private:
  int n_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Bernoulli(W(i/n, j/n)) edges, one draw per unordered pair, reproducible
/// for equal seeds.
EdgeBits sample_edge_bits(const Graphon& g, int n, std::uint64_t seed);

/// C1: deterministic weights W(i/n, j/n). C2: the EdgeBits realization
/// expanded to a dense 0/1 matrix (same draws as sample_edge_bits).
WeightMatrix sample_edges(const Graphon& g, int n, EdgeMode mode,
                          std::uint64_t seed);

/// Heuristic lower bound on the L_inf -> L_1 operator norm of the kernel
/// difference a - b, evaluated on a midpoint lattice of the given
/// resolution. Alternating sign-vector ascent (h = sign(Dg), g = sign(D'h))
/// from an all-ones start plus 15 random restarts, run on both D and -D so
/// the result is exactly symmetric in (a, b). Deterministic given the seed.
double operator_norm_distance(const Graphon& a, const Graphon& b,
                              int grid_resolution,
                              std::uint64_t seed = 0x6d5a7cULL);

}  // namespace gmfc
