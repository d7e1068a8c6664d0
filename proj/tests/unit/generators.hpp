#pragma once

// Hand-rolled property generators for the unit tests.

#include <vector>

#include "releq/nbody.hpp"
#include "releq/rng.hpp"

namespace gen {

inline releq::MassVector masses(releq::Rng &rng, std::size_t n) {
  std::vector<double> m(n);
  for (double &v : m)
    v = rng.uniform(0.1, 10.0);
  return releq::MassVector(std::move(m));
}

/// Points in [−2, 2]², redrawn until pairwise separated by at least 0.05.
inline releq::PlanarConfiguration configuration(releq::Rng &rng, const releq::MassVector &m) {
  for (;;) {
    std::vector<releq::Vec2> p(m.size());
    for (auto &x : p)
      x = releq::Vec2(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0));
    bool ok = true;
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = i + 1; j < p.size(); ++j)
        ok = ok && (p[i] - p[j]).norm() > 0.05;
    if (ok)
      return releq::PlanarConfiguration(std::move(p), m);
  }
}

} // namespace gen
