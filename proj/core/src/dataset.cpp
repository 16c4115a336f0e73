#include "dreg/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dreg/errors.hpp"

namespace dreg {
namespace {

std::vector<std::string> default_names(const char* prefix, std::size_t count) {
  std::vector<std::string> names;
  names.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    names.push_back(prefix + std::to_string(k));
  }
  return names;
}

}  // namespace

Dataset::Dataset(VectorXd y, MatrixXd d, MatrixXd x, std::vector<std::string> d_names,
                 std::vector<std::string> x_names)
    : y_(std::move(y)),
      d_(std::move(d)),
      x_(std::move(x)),
      d_names_(std::move(d_names)),
      x_names_(std::move(x_names)) {
  const auto n = y_.size();
  if (n < 2) fail(ErrorKind::InvalidArgument, "dataset needs at least 2 rows");
  if (d_.rows() != n || x_.rows() != n) {
    // an empty control block may come in as 0x0
    if (!(x_.size() == 0 && d_.rows() == n)) {
      fail(ErrorKind::InvalidArgument, "y, D and X must have the same number of rows");
    }
    x_.resize(n, 0);
  }
  if (d_.cols() < 1) fail(ErrorKind::InvalidArgument, "D needs at least one column");
  if (!y_.allFinite() || !d_.allFinite() || !x_.allFinite()) {
    fail(ErrorKind::InvalidArgument, "dataset contains non-finite entries");
  }
  if (d_names_.empty()) d_names_ = default_names("d", static_cast<std::size_t>(d_.cols()));
  if (x_names_.empty()) x_names_ = default_names("x", static_cast<std::size_t>(x_.cols()));
  if (d_names_.size() != static_cast<std::size_t>(d_.cols()) ||
      x_names_.size() != static_cast<std::size_t>(x_.cols())) {
    fail(ErrorKind::InvalidArgument, "column label count does not match matrix width");
  }
}

ResponseThresholds::ResponseThresholds(double lo, double hi) : y_lo(lo), y_hi(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) {
    fail(ErrorKind::InvalidArgument, "response thresholds need finite y_lo <= y_hi");
  }
}

IndexGrid::IndexGrid(std::vector<double> u_values, std::vector<std::size_t> j_values)
    : u_(std::move(u_values)), j_(std::move(j_values)) {
  if (u_.empty() || j_.empty()) fail(ErrorKind::InvalidArgument, "index grid is empty");
  for (std::size_t a = 0; a < u_.size(); ++a) {
    if (!(u_[a] >= 0.0 && u_[a] <= 1.0)) {
      fail(ErrorKind::InvalidArgument, "u values must lie in [0, 1]");
    }
    if (a > 0 && !(u_[a] > u_[a - 1])) {
      fail(ErrorKind::InvalidArgument, "u values must be strictly increasing");
    }
  }
  std::set<std::size_t> seen;
  for (auto j : j_) {
    if (j < 1) fail(ErrorKind::InvalidArgument, "target indices are 1-based");
    if (!seen.insert(j).second) fail(ErrorKind::InvalidArgument, "duplicate target index");
  }
}

IndexGrid IndexGrid::uniform(double lo, double hi, std::size_t count,
                             std::vector<std::size_t> j_values) {
  if (count == 0) fail(ErrorKind::InvalidArgument, "u grid needs at least one point");
  std::vector<double> u(count);
  if (count == 1) {
    u[0] = lo;
  } else {
    for (std::size_t a = 0; a < count; ++a) {
      u[a] = lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(count - 1);
    }
    u.back() = hi;
  }
  return IndexGrid(std::move(u), std::move(j_values));
}

void IndexGrid::check_bounds(std::size_t p_target) const {
  for (auto j : j_) {
    if (j > p_target) {
      fail(ErrorKind::InvalidArgument,
           "target index " + std::to_string(j) + " exceeds p̃ = " + std::to_string(p_target));
    }
  }
}

ThetaBox::ThetaBox(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(lo < hi)) fail(ErrorKind::InvalidArgument, "theta box needs lo < hi");
}

ThetaBox ThetaBox::around(double pilot, double width) {
  const double half = width * std::max(1.0, std::abs(pilot));
  return ThetaBox(pilot - half, pilot + half);
}

VectorXd functional_response(const VectorXd& y, double u, const ResponseThresholds& th) {
  if (!std::isfinite(u)) fail(ErrorKind::InvalidArgument, "u must be finite");
  if (u < 0.0 || u > 1.0) fail(ErrorKind::InvalidArgument, "u must lie in [0, 1]");
  const double cut = th.threshold(u);
  VectorXd out(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) out[i] = y[i] <= cut ? 1.0 : 0.0;
  return out;
}

VectorXd functional_response(const Dataset& ds, double u, const ResponseThresholds& th) {
  return functional_response(ds.y(), u, th);
}

LabeledMatrix full_design(const Dataset& ds) {
  LabeledMatrix out;
  out.values.resize(static_cast<Eigen::Index>(ds.n()), static_cast<Eigen::Index>(ds.p_total()));
  out.values << ds.d(), ds.x();
  out.names = ds.d_names();
  out.names.insert(out.names.end(), ds.x_names().begin(), ds.x_names().end());
  return out;
}

LabeledMatrix design_without_j(const Dataset& ds, std::size_t j) {
  const std::size_t pt = ds.p_target();
  if (j < 1 || j > pt) {
    fail(ErrorKind::InvalidArgument, "target index " + std::to_string(j) + " out of range");
  }
  const auto n = static_cast<Eigen::Index>(ds.n());
  const auto width = static_cast<Eigen::Index>(pt - 1 + ds.p_controls());
  LabeledMatrix out;
  out.values.resize(n, width);
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < pt; ++k) {
    if (k + 1 == j) continue;
    out.values.col(col++) = ds.d().col(static_cast<Eigen::Index>(k));
    out.names.push_back(ds.d_names()[k]);
  }
  if (ds.p_controls() > 0) out.values.rightCols(ds.x().cols()) = ds.x();
  out.names.insert(out.names.end(), ds.x_names().begin(), ds.x_names().end());
  return out;
}

double sample_quantile(const VectorXd& values, double prob) {
  if (values.size() == 0) fail(ErrorKind::InvalidArgument, "quantile of empty vector");
  std::vector<double> v(values.data(), values.data() + values.size());
  std::sort(v.begin(), v.end());
  const double pos = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] + frac * (v[hi] - v[lo]);
}

}  // namespace dreg
