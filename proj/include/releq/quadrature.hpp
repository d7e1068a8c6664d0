#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace releq {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

namespace detail {

inline QuadratureRule compute_gauss_legendre(std::size_t n) {
  QuadratureRule q;
  q.nodes.resize(n);
  q.weights.resize(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    q.nodes[i] = -x;
    q.nodes[n - 1 - i] = x;
    q.weights[i] = q.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return q;
}

} // namespace detail

/// n-point Gauss-Legendre rule on [−1, 1], ascending nodes. Cached per n.
inline const QuadratureRule &gauss_legendre(std::size_t n) {
  if (n == 0)
    throw std::invalid_argument("Gauss-Legendre rule needs at least one node");
  static std::mutex mtx;
  static std::map<std::size_t, QuadratureRule> cache;
  std::lock_guard lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end())
    it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// Clenshaw-Curtis weights on [−1, 1] for the n points x_k = −cos(kπ/(n−1)).
inline std::vector<double> clenshaw_curtis_weights(std::size_t n) {
  if (n < 2)
    throw std::invalid_argument("Clenshaw-Curtis rule needs at least two nodes");
  const std::size_t big_n = n - 1;
  std::vector<double> w(n);
  for (std::size_t k = 0; k <= big_n; ++k) {
    const double theta = std::numbers::pi * static_cast<double>(k) / static_cast<double>(big_n);
    double s = 1.0;
    for (std::size_t j = 1; j <= big_n / 2; ++j) {
      const double b = (2 * j == big_n) ? 1.0 : 2.0;
      s -= b * std::cos(2.0 * static_cast<double>(j) * theta) / (4.0 * static_cast<double>(j * j) - 1.0);
    }
    const double c = (k == 0 || k == big_n) ? 1.0 : 2.0;
    w[k] = c * s / static_cast<double>(big_n);
  }
  return w;
}

} // namespace releq
