#pragma once

#include <span>

namespace gmfc {

/// In-place Euclidean projection onto the probability simplex
/// {x : x_i >= 0, sum x_i = 1}. Sort-and-threshold algorithm.
void project_to_simplex(std::span<double> v);

}  // namespace gmfc
