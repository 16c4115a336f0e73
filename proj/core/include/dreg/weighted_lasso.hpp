#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "dreg/penalized_logistic.hpp"

namespace dreg {

/// Estimated conditional-variance weights f̂_u² = Λ'(linear predictor).
class WeightVector {
 public:
  WeightVector() = default;
  /// Validates 0 < f2_i ≤ 1/4.
  explicit WeightVector(VectorXd f2);

  const VectorXd& f2() const { return f2_; }
  std::size_t size() const { return static_cast<std::size_t>(f2_.size()); }

 private:
  VectorXd f2_;
};

struct GammaFit {
  VectorXd gamma;
  Support support;
  VectorXd loadings;
  double lambda = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Post-refit only: normal equations needed ridge jitter.
  bool jittered = false;
};

struct GammaAlgorithmFit {
  GammaFit lasso;
  GammaFit post;
  int refinements = 0;
};

/// Λ'(z·b) for the post-fit coefficients, floored at `floor`.
WeightVector estimated_weights(const MatrixXd& z, const PostFit& post, double floor = 1e-6);

/// Plug-in level with N_n = p·p̃²·n² and p_total = p + p̃.
double penalty_level_wlasso(std::size_t n, std::size_t p_target, std::size_t p_controls,
                            const PenaltyConfig& cfg);

/// max_i ‖f̂_i X_i^j‖_∞ · (E_n[f̂² D_j²])^{1/2}, the same for every coordinate.
VectorXd initial_loadings_wlasso(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w);

/// (E_n[f̂⁴ (D_j − X^jγ̃)² (X_k^j)²])^{1/2}, floored at floor × initial.
VectorXd refine_loadings_wlasso(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w,
                                const GammaFit& post_gamma, double floor = 1e-3);

/// Gradient of ½E_n[f̂²(D_j − X^jγ)²].
VectorXd wlasso_gradient(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w,
                         const VectorXd& gamma);

/// min ½E_n[f̂²(D_j − X^jγ)²] + (λ/n)‖Ψγ‖₁ by exact cyclic coordinate descent.
GammaFit weighted_lasso(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w,
                        double lambda, const VectorXd& loadings, const PenaltyConfig& cfg,
                        const VectorXd* warm_start = nullptr);

/// Weighted least squares restricted to `support`.
GammaFit post_weighted_lasso(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w,
                             const Support& support);

/// Penalty level, m̄ ≥ 1 loading refinements, and post refits.
GammaAlgorithmFit fit_gamma_algorithm4(const VectorXd& dj, const MatrixXd& xj,
                                       const WeightVector& w, std::size_t p_target,
                                       std::size_t p_controls, const PenaltyConfig& cfg);

}  // namespace dreg
