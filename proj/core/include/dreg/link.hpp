#pragma once

#include <cmath>

namespace dreg {

/// Logistic CDF e^t / (1 + e^t). Saturates to 0/1 without overflow.
inline double logistic(double t) noexcept {
  if (t >= 0.0) {
    return 1.0 / (1.0 + std::exp(-t));
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// Derivative of the logistic CDF, Λ(t)(1 - Λ(t)), evaluated from e^{-|t|}
/// so that the tails keep full relative precision.
inline double logistic_derivative(double t) noexcept {
  const double e = std::exp(-std::abs(t));
  const double d = 1.0 + e;
  return e / (d * d);
}

/// log(1 + e^t)
inline double log1pexp(double t) noexcept {
  if (t > 0.0) {
    return t + std::log1p(std::exp(-t));
  }
  return std::log1p(std::exp(t));
}

/// Negative Bernoulli log-likelihood of y in {0,1} at linear predictor t.
inline double logistic_loss(double y, double t) noexcept {
  return log1pexp(t) - y * t;
}

}  // namespace dreg
