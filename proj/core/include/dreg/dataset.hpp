#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dreg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Raw response Y, target covariates D (n x p̃) and controls X (n x p).
/// Validated on construction and immutable afterwards.
class Dataset {
 public:
  Dataset(VectorXd y, MatrixXd d, MatrixXd x, std::vector<std::string> d_names = {},
          std::vector<std::string> x_names = {});

  std::size_t n() const { return static_cast<std::size_t>(y_.size()); }
  std::size_t p_target() const { return static_cast<std::size_t>(d_.cols()); }
  std::size_t p_controls() const { return static_cast<std::size_t>(x_.cols()); }
  std::size_t p_total() const { return p_target() + p_controls(); }

  const VectorXd& y() const { return y_; }
  const MatrixXd& d() const { return d_; }
  const MatrixXd& x() const { return x_; }
  const std::vector<std::string>& d_names() const { return d_names_; }
  const std::vector<std::string>& x_names() const { return x_names_; }

 private:
  VectorXd y_;
  MatrixXd d_;
  MatrixXd x_;
  std::vector<std::string> d_names_;
  std::vector<std::string> x_names_;
};

/// Bounds y̲ ≤ ȳ that map u ∈ [0,1] to the threshold (1-u)y̲ + uȳ.
struct ResponseThresholds {
  double y_lo = 0.0;
  double y_hi = 1.0;

  ResponseThresholds() = default;
  ResponseThresholds(double lo, double hi);

  double threshold(double u) const { return (1.0 - u) * y_lo + u * y_hi; }
};

/// Finite surrogate for 𝒰 × [p̃]. Target indices are 1-based. Cells are laid
/// out u-major: cell (a, b) has column a * j_values.size() + b.
class IndexGrid {
 public:
  IndexGrid(std::vector<double> u_values, std::vector<std::size_t> j_values);

  /// Evenly spaced u grid on [lo, hi] (a single point when count == 1).
  static IndexGrid uniform(double lo, double hi, std::size_t count,
                           std::vector<std::size_t> j_values);

  const std::vector<double>& u_values() const { return u_; }
  const std::vector<std::size_t>& j_values() const { return j_; }
  std::size_t size() const { return u_.size() * j_.size(); }
  std::size_t cell(std::size_t u_index, std::size_t j_index) const {
    return u_index * j_.size() + j_index;
  }

  /// Throws invalid-argument if any j exceeds p̃.
  void check_bounds(std::size_t p_target) const;

 private:
  std::vector<double> u_;
  std::vector<std::size_t> j_;
};

/// Search interval Θ_uj for the Z-step.
struct ThetaBox {
  double lo = -1.0;
  double hi = 1.0;

  ThetaBox() = default;
  ThetaBox(double lo_, double hi_);

  /// pilot ± width·max(1, |pilot|)
  static ThetaBox around(double pilot, double width = 10.0);
  bool contains(double t) const { return t >= lo && t <= hi; }
};

/// Column matrix with labels.
struct LabeledMatrix {
  MatrixXd values;
  std::vector<std::string> names;
};

/// Y_u = 1{y ≤ (1-u)y̲ + uȳ} as a 0/1 vector.
VectorXd functional_response(const VectorXd& y, double u, const ResponseThresholds& th);
VectorXd functional_response(const Dataset& ds, double u, const ResponseThresholds& th);

/// (D, X) side by side.
LabeledMatrix full_design(const Dataset& ds);

/// X^j = (D without column j, X); j is 1-based.
LabeledMatrix design_without_j(const Dataset& ds, std::size_t j);

/// Sample quantile with linear interpolation between order statistics
/// (type 7). prob in [0,1].
double sample_quantile(const VectorXd& values, double prob);

}  // namespace dreg
