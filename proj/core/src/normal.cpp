#include "dreg/normal.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>

#include "dreg/errors.hpp"

namespace dreg {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::InvalidArgument, "normal quantile needs p in (0,1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double normal_upper_quantile(double tail) {
  if (!(tail > 0.0 && tail < 1.0)) {
    fail(ErrorKind::InvalidArgument, "normal upper quantile needs tail in (0,1)");
  }
  return boost::math::quantile(boost::math::complement(boost::math::normal_distribution<double>(), tail));
}

double normal_cdf(double x) {
  return boost::math::cdf(boost::math::normal_distribution<double>(), x);
}

}  // namespace dreg
