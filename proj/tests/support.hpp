#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <random>

#include "hcdpr/types.hpp"

namespace testing_support {

/// Normwise relative difference, floored so exact zeros compare absolutely.
template <typename A, typename B>
double rel_error(const Eigen::MatrixBase<A>& actual, const Eigen::MatrixBase<B>& expected,
                 double floor = 1e-12) {
  const double scale = std::max(expected.cwiseAbs().maxCoeff(), floor);
  return (actual - expected).cwiseAbs().maxCoeff() / scale;
}

class Sampler {
 public:
  explicit Sampler(unsigned long long seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  /// Platform near the centre, any arm configuration.
  hcdpr::Vector5d configuration(double theta_m_span = 0.2) {
    hcdpr::Vector5d q;
    q << uniform(-0.4, 0.4), uniform(-0.25, 0.25), uniform(-theta_m_span, theta_m_span),
        uniform(-2.5, 2.5), uniform(-2.5, 2.5);
    return q;
  }

  hcdpr::Vector5d velocity(double scale = 2.0) {
    hcdpr::Vector5d v;
    for (int i = 0; i < 5; ++i) v[i] = uniform(-scale, scale);
    return v;
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testing_support
