#include "dreg/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "dreg/errors.hpp"
#include "dreg/normal.hpp"
#include "dreg/parallel.hpp"
#include "dreg/rng.hpp"

namespace dreg {
namespace {

constexpr std::size_t kBlock = 64;
constexpr std::uint64_t kMultiplierLabel = 0x6d756c7469706c79ULL;  // "multiply"

}  // namespace

void BootstrapConfig::validate() const {
  if (b < 1) fail(ErrorKind::InvalidConfiguration, "bootstrap replications must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    fail(ErrorKind::InvalidConfiguration, "alpha must lie in (0, 1)");
  }
}

double multiplier_sup_draw(const MatrixXd& psi, const VectorXd& xi) {
  if (xi.size() != psi.rows()) fail(ErrorKind::InvalidArgument, "multiplier length differs from n");
  const double root_n = std::sqrt(static_cast<double>(psi.rows()));
  return (psi.transpose() * xi).cwiseAbs().maxCoeff() / root_n;
}

std::vector<double> bootstrap_sup_draws(const MatrixXd& psi, std::size_t b, std::uint64_t seed,
                                        std::size_t threads) {
  if (psi.rows() < 1 || psi.cols() < 1) fail(ErrorKind::InvalidArgument, "empty score panel");
  if (!psi.allFinite()) fail(ErrorKind::NumericalFailure, "score panel has non-finite entries");
  const std::uint64_t key = derive_seed(seed, kMultiplierLabel);
  const Eigen::Index n = psi.rows();
  const double root_n = std::sqrt(static_cast<double>(n));
  const std::size_t blocks = (b + kBlock - 1) / kBlock;
  std::vector<double> draws(b);
  parallel_for(blocks, threads, [&](std::size_t blk) {
    const std::size_t first = blk * kBlock;
    const std::size_t count = std::min(kBlock, b - first);
    MatrixXd xi(n, static_cast<Eigen::Index>(count));
    for (std::size_t r = 0; r < count; ++r) {
      StreamEngine engine(key, first + r);
      for (Eigen::Index i = 0; i < n; ++i) xi(i, static_cast<Eigen::Index>(r)) = standard_normal(engine);
    }
    const MatrixXd sums = psi.transpose() * xi;
    for (std::size_t r = 0; r < count; ++r) {
      draws[first + r] = sums.col(static_cast<Eigen::Index>(r)).cwiseAbs().maxCoeff() / root_n;
    }
  });
  return draws;
}

double quantile_of_draws(std::vector<double> draws, double alpha) {
  if (draws.empty()) fail(ErrorKind::InvalidArgument, "no bootstrap draws");
  const double b = static_cast<double>(draws.size());
  // Guard ⌈(1−α)B⌉ against representation error, e.g. 0.95 * 200000.
  const double target = (1.0 - alpha) * b;
  auto rank = static_cast<std::size_t>(std::ceil(target - 1e-9 * b));
  rank = std::clamp<std::size_t>(rank, 1, draws.size());
  std::nth_element(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(rank - 1), draws.end());
  return draws[rank - 1];
}

double critical_value(const MatrixXd& psi, const BootstrapConfig& cfg) {
  cfg.validate();
  return quantile_of_draws(bootstrap_sup_draws(psi, cfg.b, cfg.seed, cfg.threads), cfg.alpha);
}

double bonferroni_critical(double alpha, std::size_t cells) {
  if (cells < 1) fail(ErrorKind::InvalidArgument, "Bonferroni needs at least one cell");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  return normal_upper_quantile(alpha / (2.0 * static_cast<double>(cells)));
}

BandTable bands_with_critical(const ScorePanel& panel, double c_alpha, double alpha) {
  BandTable table;
  table.c_alpha = c_alpha;
  table.alpha = alpha;
  table.z_pointwise = normal_upper_quantile(alpha / 2.0);
  table.n = static_cast<std::size_t>(panel.psi.rows());
  const double root_n = std::sqrt(static_cast<double>(table.n));
  table.rows.reserve(panel.cells.size());
  for (const auto& cell : panel.cells) {
    const double se = cell.sigma_hat / root_n;
    table.rows.push_back({cell, cell.theta_check - table.z_pointwise * se,
                          cell.theta_check + table.z_pointwise * se, cell.theta_check - c_alpha * se,
                          cell.theta_check + c_alpha * se});
  }
  return table;
}

BandTable build_bands(const ScorePanel& panel, const BootstrapConfig& cfg) {
  BandTable table = bands_with_critical(panel, critical_value(panel.psi, cfg), cfg.alpha);
  table.b = cfg.b;
  return table;
}

}  // namespace dreg
