#include "dreg/designs.hpp"

#include <cmath>
#include <string>

#include "dreg/errors.hpp"
#include "dreg/rng.hpp"

namespace dreg {
namespace {

constexpr std::uint64_t kDataLabel = 0x64617461ULL;  // "data"

/// Stationary AR(1) path w_k = ρw_{k−1} + √(1−ρ²)z_k, whose covariance is Σ.
void ar1_row(StreamEngine& engine, double rho, double* out, std::size_t dim) {
  const double innovation = std::sqrt(1.0 - rho * rho);
  double prev = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double z = standard_normal(engine);
    prev = k == 0 ? z : rho * prev + innovation * z;
    out[k] = prev;
  }
}

SimulatedSample finish(const DesignSpec& spec, MatrixXd x, VectorXd y, VectorXd beta,
                       VectorXd vartheta, std::size_t resampled) {
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto pt = static_cast<Eigen::Index>(spec.j_set.size());
  const auto p = static_cast<Eigen::Index>(spec.p);
  std::vector<bool> is_target(spec.p, false);
  for (auto k : spec.j_set) is_target[k - 1] = true;

  MatrixXd d(n, pt);
  MatrixXd controls(n, p - pt);
  std::vector<std::string> d_names;
  std::vector<std::string> x_names;
  for (Eigen::Index a = 0; a < pt; ++a) {
    const std::size_t k = spec.j_set[static_cast<std::size_t>(a)];
    d.col(a) = x.col(static_cast<Eigen::Index>(k - 1));
    d_names.push_back("x" + std::to_string(k));
  }
  Eigen::Index at = 0;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (is_target[static_cast<std::size_t>(k)]) continue;
    controls.col(at++) = x.col(k);
    x_names.push_back("x" + std::to_string(k + 1));
  }
  Dataset data(y, std::move(d), std::move(controls), std::move(d_names), std::move(x_names));
  return SimulatedSample{std::move(data), std::move(x), std::move(y), std::move(beta),
                         std::move(vartheta), spec.design, spec.u_range(), resampled};
}

}  // namespace

void DesignSpec::validate() const {
  if (n < 10) fail(ErrorKind::InvalidConfiguration, "design needs n >= 10");
  if (p < 8) fail(ErrorKind::InvalidConfiguration, "design needs p >= 8");
  if (!(rho > -1.0 && rho < 1.0)) fail(ErrorKind::InvalidConfiguration, "rho must lie in (-1, 1)");
  if (j_set.empty() || j_set.size() >= p) {
    fail(ErrorKind::InvalidConfiguration, "j_set must be nonempty and leave at least one control");
  }
  std::vector<bool> seen(p, false);
  for (auto k : j_set) {
    if (k < 1 || k > p || seen[k - 1]) {
      fail(ErrorKind::InvalidConfiguration, "j_set entries must be distinct indices in 1..p");
    }
    seen[k - 1] = true;
  }
  if (u_set.empty()) fail(ErrorKind::InvalidConfiguration, "u_set is empty");
  const ResponseThresholds bounds = u_range();
  if (!(bounds.y_lo < bounds.y_hi)) fail(ErrorKind::InvalidConfiguration, "u range must have lo < hi");
  for (std::size_t a = 0; a < u_set.size(); ++a) {
    if (!(u_set[a] >= bounds.y_lo && u_set[a] <= bounds.y_hi)) {
      fail(ErrorKind::InvalidConfiguration, "u_set value outside the design's range");
    }
    if (a > 0 && !(u_set[a] > u_set[a - 1])) {
      fail(ErrorKind::InvalidConfiguration, "u_set must be strictly increasing");
    }
  }
}

ResponseThresholds DesignSpec::u_range() const {
  if (range) return *range;
  return design == DesignId::D1 ? ResponseThresholds{1.0, 2.5} : ResponseThresholds{-0.5, 0.5};
}

std::vector<double> DesignSpec::mapped_u() const {
  const ResponseThresholds bounds = u_range();
  std::vector<double> out;
  out.reserve(u_set.size());
  for (double u : u_set) out.push_back((u - bounds.y_lo) / (bounds.y_hi - bounds.y_lo));
  return out;
}

VectorXd beta0(BetaVariant variant, std::size_t p) {
  VectorXd b(static_cast<Eigen::Index>(p));
  for (std::size_t k = 1; k <= p; ++k) {
    const double j = static_cast<double>(k);
    if (variant == BetaVariant::I) {
      b[static_cast<Eigen::Index>(k - 1)] = 2.0 / (j * j);
    } else {
      b[static_cast<Eigen::Index>(k - 1)] = k == 1 ? -10.0 : 0.5 / ((j - 3.5) * (j - 3.5));
    }
  }
  return b;
}

VectorXd vartheta0(std::size_t p) {
  if (p < 8) fail(ErrorKind::InvalidArgument, "vartheta0 needs p >= 8");
  VectorXd v = VectorXd::Zero(static_cast<Eigen::Index>(p));
  v.head(4).setConstant(0.125);
  v.tail(4).setConstant(0.125);
  return v;
}

MatrixXd toeplitz_covariance(std::size_t dim, double rho) {
  MatrixXd s(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < s.rows(); ++k) {
    for (Eigen::Index l = 0; l < s.cols(); ++l) {
      s(k, l) = std::pow(rho, static_cast<double>(std::abs(k - l)));
    }
  }
  return s;
}

double SimulatedSample::truth(double u_raw, std::size_t k) const {
  if (k < 1 || k > static_cast<std::size_t>(beta.size())) {
    fail(ErrorKind::InvalidArgument, "truth index out of range");
  }
  const auto kk = static_cast<Eigen::Index>(k - 1);
  if (design == DesignId::D1) return (k == 1 ? u_raw : 0.0) - beta[kk];
  return std::cbrt(u_raw) * vartheta[kk] - beta[kk];
}

SimulatedSample gen_design1(const DesignSpec& spec, std::uint64_t replication) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.p);
  StreamEngine engine(derive_seed(spec.seed, kDataLabel), replication);
  const VectorXd beta = beta0(spec.variant, spec.p);
  // Row-major fill so each row's draws are contiguous in the stream.
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(n, p);
  VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    ar1_row(engine, spec.rho, x.row(i).data() + 1, spec.p - 1);
    y[i] = x.row(i).dot(beta) + standard_logistic(engine);
  }
  return finish(spec, MatrixXd(x), std::move(y), beta, VectorXd::Zero(p), 0);
}

SimulatedSample gen_design2(const DesignSpec& spec, std::uint64_t replication) {
  spec.validate();
  const auto n = static_cast<Eigen::Index>(spec.n);
  const auto p = static_cast<Eigen::Index>(spec.p);
  StreamEngine engine(derive_seed(spec.seed, kDataLabel), replication);
  const VectorXd beta = beta0(spec.variant, spec.p);
  const VectorXd vt = vartheta0(spec.p);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x(n, p);
  VectorXd y(n);
  std::size_t resampled = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double scale = 0.0;
    for (;;) {
      ar1_row(engine, spec.rho, x.row(i).data(), spec.p);
      x.row(i) = x.row(i).cwiseAbs();
      scale = x.row(i).dot(vt);
      if (scale >= 1e-12) break;
      ++resampled;
    }
    const double ratio = (x.row(i).dot(beta) + standard_logistic(engine)) / scale;
    y[i] = ratio * ratio * ratio;
  }
  return finish(spec, MatrixXd(x), std::move(y), beta, vt, resampled);
}

SimulatedSample simulate(const DesignSpec& spec, std::uint64_t replication) {
  return spec.design == DesignId::D1 ? gen_design1(spec, replication)
                                     : gen_design2(spec, replication);
}

}  // namespace dreg
