#pragma once

#include <array>
#include <vector>

namespace ddiv {

/// Gauss-Legendre rule on [-1, 1] (dim 1) or its tensor product on [-1, 1]^2.
/// For dim 1 only the first coordinate of each point is used.
struct QuadRule {
  int dim = 1;
  std::vector<std::array<double, 2>> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// n-point Gauss-Legendre rule, exact for degree 2n-1 per variable.
/// Throws ParameterError unless 1 <= n <= 16 and dim is 1 or 2.
QuadRule gauss_rule(int n, int dim);

/// Cached reference to a rule; rules are immutable and shared.
const QuadRule& cached_gauss_rule(int n, int dim);

}  // namespace ddiv
