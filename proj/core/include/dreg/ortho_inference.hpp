#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dreg/dataset.hpp"
#include "dreg/penalized_logistic.hpp"
#include "dreg/weighted_lasso.hpp"

namespace dreg {

enum class Method { OrthogonalScore, DoubleSelection, OneStep, Naive };

const char* to_string(Method m);
Method method_from_string(const std::string& name);

/// How the alternative variance component is formed from the weighted
/// instrument moment m = E_n[f̂²(D_j − X^jγ̃)²].
enum class AltVarianceRule {
  /// Σ̂² = 1/m, on the scale of σ̂².
  Inverse,
  /// Σ̂² = m as printed in the variance remark.
  Literal,
};

/// Cell-level diagnostic bits.
enum CellFlag : unsigned {
  kBoundarySolution = 1u << 0,
  kPilotNotConverged = 1u << 1,
  kLassoNotConverged = 1u << 2,
  kSeparated = 1u << 3,
  kJittered = 1u << 4,
  kObservedInformationVariance = 1u << 5,
  kOutsideBox = 1u << 6,
};

/// "boundary|separated", or "" when no flag is set.
std::string flags_to_string(unsigned flags);

struct InferenceConfig {
  PenaltyConfig logistic{};
  PenaltyConfig lasso{};
  double weight_floor = 1e-6;
  double theta_box_width = 10.0;
  double z_tol = 1e-10;
  AltVarianceRule alt_variance = AltVarianceRule::Inverse;
  /// σ̂ evaluates ψ at the pilot θ̃ (true) or at θ̌ (false).
  bool sigma_at_pilot = true;
  /// Double selection regresses D_j on the controls X only instead of X^j.
  bool literal_double_selection = false;
  std::size_t threads = 1;
};

struct CellEstimate {
  double u = 0.0;
  std::size_t j = 1;
  Method method = Method::OrthogonalScore;
  double theta_check = 0.0;
  double theta_pilot = 0.0;
  double j_hat = 0.0;
  double sigma_hat = 0.0;
  double sigma_raw = 0.0;
  double sigma_alt = 0.0;
  ThetaBox box{};
  std::size_t pilot_support = 0;
  std::size_t gamma_support = 0;
  unsigned flags = 0;
};

/// A cell estimate plus its standardized score ψ̂_uj(W_i), i = 1..n.
struct CellResult {
  CellEstimate estimate;
  VectorXd score;
};

/// Per-u Steps 1-2: Algorithm 3 fit of Y_u on (D, X) and the weights f̂_u².
struct Pilot {
  double u = 0.0;
  VectorXd yu;
  LogisticAlgorithmFit fit;
  WeightVector weights;
};

struct ScorePanel {
  std::vector<CellEstimate> cells;
  /// n × |grid| standardized scores, cells in IndexGrid order.
  MatrixXd psi;
};

struct SigmaEstimate {
  double sigma = 0.0;
  double raw = 0.0;
  double alt = 0.0;
};

Pilot fit_pilot(const Dataset& ds, const MatrixXd& design, double u, const VectorXd& yu,
                const InferenceConfig& cfg);

/// {Y_u − Λ(D_jθ + X^jβ̂)}(D_j − X^jγ̃) per observation; `offset` is X^jβ̂.
VectorXd score_psi(const VectorXd& yu, const VectorXd& dj, const VectorXd& offset, double theta,
                   const VectorXd& instrument);

/// Same as score_psi but assembling X^jβ̂ and D_j − X^jγ̃ from the pieces.
VectorXd score_psi(const Dataset& ds, const VectorXd& yu, std::size_t j, double theta,
                   const VectorXd& beta_hat_j, const VectorXd& gamma_tilde);

struct ZSolution {
  double theta = 0.0;
  double mean_score = 0.0;
  bool boundary = false;
};

/// Minimizes |f| over the box: a bracketed root when f changes sign on a
/// scan of the box, else the scan minimum refined locally. A minimum at an
/// endpoint is returned exactly and flagged as a boundary solution.
ZSolution solve_z(const std::function<double(double)>& mean_score, const ThetaBox& box,
                  double tol);

ZSolution solve_theta_check(const VectorXd& yu, const VectorXd& dj, const VectorXd& offset,
                            const VectorXd& instrument, const ThetaBox& box, double tol);

/// −E_n[Λ'(D_jθ̃ + X^jβ̂)·D_j·(D_j − X^jγ̃)], with Λ' floored at
/// `curvature_floor` as for f̂². Throws degenerate-identification when
/// |Ĵ| < 1e-10.
double j_hat(const VectorXd& dj, const VectorXd& offset, double theta_tilde,
             const VectorXd& instrument, double curvature_floor = 0.0);

/// max(σ̂_raw, Σ̂_alt) with σ̂²_raw = Ĵ⁻²E_n[ψ²].
SigmaEstimate sigma_hat(const VectorXd& psi, double j_hat_value, const WeightVector& w,
                        const VectorXd& instrument,
                        AltVarianceRule rule = AltVarianceRule::Inverse);

/// θ̂ − Ĵ⁻¹·E_n[ψ(θ̂)].
double one_step_correction(double theta_hat, double j_hat_value, double mean_psi);

/// Algorithm 1 Steps 3-5 for one j given the cached pilot. Method must be
/// OrthogonalScore or OneStep.
CellResult fit_cell_orthogonal(const Dataset& ds, const Pilot& pilot, std::size_t j,
                               const InferenceConfig& cfg, Method method = Method::OrthogonalScore);

/// Runs the pilot and then the cell.
CellResult fit_cell_orthogonal(const Dataset& ds, double u, const ResponseThresholds& th,
                               std::size_t j, const InferenceConfig& cfg);

/// Double selection: refit Y_u on D_j plus the union of both selected sets.
CellResult fit_cell_double_selection(const Dataset& ds, const Pilot& pilot, std::size_t j,
                                     const InferenceConfig& cfg);

CellResult fit_cell_double_selection(const Dataset& ds, double u, const ResponseThresholds& th,
                                     std::size_t j, const InferenceConfig& cfg);

/// Naive post-selection comparator: refit on supp(θ̂_u, β̂_u) ∪ {j} with σ̂
/// from the inverse observed information.
CellResult naive_post_selection_fit(const Dataset& ds, const Pilot& pilot, std::size_t j,
                                    const InferenceConfig& cfg);

CellResult naive_post_selection_fit(const Dataset& ds, double u, const ResponseThresholds& th,
                                    std::size_t j, const InferenceConfig& cfg);

CellResult fit_cell(const Dataset& ds, const Pilot& pilot, std::size_t j,
                    const InferenceConfig& cfg, Method method);

/// Pilots per u (in parallel over u), then every (u, j) cell.
ScorePanel build_score_panel(const Dataset& ds, const IndexGrid& grid,
                             const ResponseThresholds& th, const InferenceConfig& cfg,
                             Method method);

/// Stacks already computed cells into a panel.
ScorePanel assemble_panel(std::vector<CellResult> cells);

}  // namespace dreg
