#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dreg/ortho_inference.hpp"

namespace dreg {

struct BootstrapConfig {
  std::size_t b = 5000;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

/// max over columns of |Σ_i ξ_i ψ_i| / √n for one multiplier vector ξ.
double multiplier_sup_draw(const MatrixXd& psi, const VectorXd& xi);

/// B sup draws with ξ ~ N(0,1). Replication r uses Philox stream
/// (derive_seed(seed, "multiplier"), r), so the result does not depend on the
/// thread count.
std::vector<double> bootstrap_sup_draws(const MatrixXd& psi, std::size_t b, std::uint64_t seed,
                                        std::size_t threads = 1);

/// The ⌈(1−α)B⌉-th order statistic of the draws.
double quantile_of_draws(std::vector<double> draws, double alpha);

double critical_value(const MatrixXd& psi, const BootstrapConfig& cfg);

/// Φ⁻¹(1 − α/(2K)).
double bonferroni_critical(double alpha, std::size_t cells);

struct BandRow {
  CellEstimate cell;
  double lo_point = 0.0;
  double hi_point = 0.0;
  double lo_simul = 0.0;
  double hi_simul = 0.0;
};

struct BandTable {
  std::vector<BandRow> rows;
  double c_alpha = 0.0;
  double z_pointwise = 0.0;
  std::size_t b = 0;
  double alpha = 0.0;
  std::size_t n = 0;
};

/// θ̌ ± c_α σ̂/√n and θ̌ ± Φ⁻¹(1−α/2) σ̂/√n for every cell of the panel.
BandTable build_bands(const ScorePanel& panel, const BootstrapConfig& cfg);

/// Bands from a supplied critical value.
BandTable bands_with_critical(const ScorePanel& panel, double c_alpha, double alpha);

}  // namespace dreg
