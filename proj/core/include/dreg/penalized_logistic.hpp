#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace dreg {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Support = std::vector<std::size_t>;

/// Plug-in penalty level and loading iteration settings shared by the
/// logistic and weighted-lasso fits.
struct PenaltyConfig {
  double c = 1.1;
  /// Defaults to 0.1 / log n when unset.
  std::optional<double> gamma;
  /// N_n in the penalty level. Algorithms 3/4 overwrite it.
  double n_n = 1.0;
  /// Upper bound m̄ on loading refinements.
  int max_loops = 1;
  /// KKT residual tolerance of the penalized solvers.
  double solver_tol = 1e-7;
  /// Sweep budget of the coordinate-descent solvers.
  int max_iter = 20000;
  /// Restricted gradient tolerance of the unpenalized refits.
  double refit_tol = 1e-10;
  /// Refined loadings are floored at loading_floor times the initial ones.
  double loading_floor = 1e-3;
  /// |coefficient| above this in a refit is reported as separation.
  double coefficient_cap = 30.0;

  double resolved_gamma(std::size_t n) const;
  void validate(std::size_t n) const;
};

struct PenalizedFit {
  VectorXd coefficients;
  Support support;
  VectorXd loadings;
  double lambda = 0.0;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective after every sweep (non-increasing).
  std::vector<double> objective_trace;
};

struct PostFit {
  VectorXd coefficients;
  Support support;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool separated = false;
  bool jittered = false;
};

struct LogisticAlgorithmFit {
  PenalizedFit penalized;
  PostFit post;
  /// Number of loading refinements that fed a new fit.
  int refinements = 0;
};

/// c·√n·Φ⁻¹(1 − γ/(2·p_total·N_n)), with N_n taken from cfg.n_n.
double penalty_level(std::size_t n, std::size_t p_total, const PenaltyConfig& cfg);

/// Mean negative log-likelihood E_n[M_u] at coefficients b.
double logistic_mean_loss(const VectorXd& yu, const MatrixXd& z, const VectorXd& b);

/// Analytic gradient of E_n[M_u].
VectorXd logistic_gradient(const VectorXd& yu, const MatrixXd& z, const VectorXd& b);

/// max_k of the subgradient-optimality violation for
/// loss + Σ_k pen_k |b_k| with pen_k = λ·loading_k / n.
double kkt_residual(const VectorXd& gradient, const VectorXd& coefficients, double lambda,
                    const VectorXd& loadings, std::size_t n);

VectorXd initial_loadings_logistic(const VectorXd& yu, const MatrixXd& z);

VectorXd refine_loadings_logistic(const VectorXd& yu, const MatrixXd& z, const PostFit& post,
                                  double floor = 1e-3);

/// ℓ1-penalized logistic regression by cyclic coordinate descent. Each
/// coordinate step tries the local Newton curvature and falls back to the
/// global curvature bound ¼·E_n[z_k²], which majorizes the loss; every
/// accepted step decreases the objective.
PenalizedFit l1_logistic(const VectorXd& yu, const MatrixXd& z, double lambda,
                         const VectorXd& loadings, const PenaltyConfig& cfg,
                         const VectorXd* warm_start = nullptr);

/// Unpenalized logistic MLE on the given support by damped Newton.
PostFit post_logistic_refit(const VectorXd& yu, const MatrixXd& z, const Support& support,
                            const PenaltyConfig& cfg);

/// Penalty level with N_n = n plus m̄ rounds of loading refinement.
LogisticAlgorithmFit fit_logistic_algorithm3(const VectorXd& yu, const MatrixXd& z,
                                             const PenaltyConfig& cfg);

/// Indices of the nonzero entries.
Support support_of(const VectorXd& v);

}  // namespace dreg
