#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dreg/dataset.hpp"

namespace dreg {

enum class DesignId { D1, D2 };
enum class BetaVariant { I, II };

struct DesignSpec {
  DesignId design = DesignId::D1;
  BetaVariant variant = BetaVariant::I;
  std::size_t n = 300;
  std::size_t p = 200;
  /// Thresholds on the raw y scale, e.g. {1.0} or a grid over [1, 2.5].
  std::vector<double> u_set{1.0};
  /// 1-based indices of the x columns treated as targets D.
  std::vector<std::size_t> j_set{1};
  double rho = 0.5;
  std::uint64_t seed = 0;
  /// Replaces the design's raw 𝒰 range, e.g. to place u where Y_u is balanced.
  std::optional<ResponseThresholds> range;

  void validate() const;
  /// Raw 𝒰 range: `range` if set, else [1, 2.5] (D1) or [−0.5, 0.5] (D2).
  ResponseThresholds u_range() const;
  /// u_set mapped affinely onto [0, 1] by u_range().
  std::vector<double> mapped_u() const;
};

/// β₀ of the chosen variant, length p.
VectorXd beta0(BetaVariant variant, std::size_t p);

/// (1/8)(1,1,1,1,0,…,0,1,1,1,1)′, length p ≥ 8.
VectorXd vartheta0(std::size_t p);

/// Σ_{kl} = ρ^{|k−l|}.
MatrixXd toeplitz_covariance(std::size_t dim, double rho);

struct SimulatedSample {
  Dataset data;
  /// Full n × p design x before the D/X split.
  MatrixXd x;
  VectorXd y;
  VectorXd beta;
  VectorXd vartheta;
  DesignId design = DesignId::D1;
  ResponseThresholds thresholds;
  /// Design 2 rows redrawn because x′ϑ₀ < 1e−12.
  std::size_t resampled = 0;

  /// True θ_u at x column k (1-based) for a raw threshold u.
  double truth(double u_raw, std::size_t k) const;
};

/// Design 1: x₁ ≡ 1, x₂..x_p ~ N(0, Σ), y = x′β₀ + ξ with logistic ξ.
SimulatedSample gen_design1(const DesignSpec& spec, std::uint64_t replication);

/// Design 2: x = |w|, w ~ N(0, Σ), y = ((x′β₀ + ξ)/x′ϑ₀)³.
SimulatedSample gen_design2(const DesignSpec& spec, std::uint64_t replication);

SimulatedSample simulate(const DesignSpec& spec, std::uint64_t replication);

}  // namespace dreg
