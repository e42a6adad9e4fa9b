#include "ddiv/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "ddiv/error.hpp"

namespace ddiv {

namespace {

// Newton iteration on the Legendre polynomial P_n, started from the
// Tricomi-type asymptotic guess.
void gauss_legendre_1d(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = (n == 1) ? z : p1;
      const double pnm1 = (n == 1) ? 1.0 : p0;
      dp = n * (z * pn - pnm1) / (z * z - 1.0);
      const double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Recompute the derivative at the converged node for the weight.
    double p0 = 1.0;
    double p1 = z;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) {
      dp = 1.0;
    } else {
      dp = n * (z * p1 - p0) / (z * z - 1.0);
    }
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = -z;
    x[hi] = z;
    w[lo] = w[hi] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  if (n % 2 == 1) x[static_cast<std::size_t>(n / 2)] = 0.0;
}

}  // namespace

QuadRule gauss_rule(int n, int dim) {
  if (n < 1 || n > 16) {
    throw ParameterError("gauss_rule: number of points " + std::to_string(n) +
                         " outside [1, 16]");
  }
  if (dim != 1 && dim != 2) {
    throw ParameterError("gauss_rule: dim must be 1 or 2, got " + std::to_string(dim));
  }
  std::vector<double> x;
  std::vector<double> w;
  gauss_legendre_1d(n, x, w);

  QuadRule rule;
  rule.dim = dim;
  if (dim == 1) {
    for (int i = 0; i < n; ++i) {
      rule.points.push_back({x[static_cast<std::size_t>(i)], 0.0});
      rule.weights.push_back(w[static_cast<std::size_t>(i)]);
    }
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        rule.points.push_back({x[static_cast<std::size_t>(i)], x[static_cast<std::size_t>(j)]});
        rule.weights.push_back(w[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(j)]);
      }
  }
  return rule;
}

const QuadRule& cached_gauss_rule(int n, int dim) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, QuadRule> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find({n, dim});
  if (it == cache.end()) it = cache.emplace(std::pair{n, dim}, gauss_rule(n, dim)).first;
  return it->second;
}

}  // namespace ddiv
