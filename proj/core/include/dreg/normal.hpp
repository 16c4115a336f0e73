#pragma once

namespace dreg {

/// Φ⁻¹(p) for p in (0, 1).
double normal_quantile(double p);

/// Φ⁻¹(1 - tail), evaluated on the complement so that tiny tails keep their
/// precision. tail in (0, 1).
double normal_upper_quantile(double tail);

double normal_cdf(double x);

}  // namespace dreg
