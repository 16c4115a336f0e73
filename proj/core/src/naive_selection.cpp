#include <algorithm>
#include <cmath>

#include "dreg/errors.hpp"
#include "dreg/link.hpp"
#include "dreg/ortho_inference.hpp"

namespace dreg {

CellResult naive_post_selection_fit(const Dataset& ds, const Pilot& pilot, std::size_t j,
                                    const InferenceConfig& cfg) {
  if (j < 1 || j > ds.p_target()) {
    fail(ErrorKind::InvalidArgument, "target index " + std::to_string(j) + " out of range");
  }
  const std::size_t jj = j - 1;
  const MatrixXd design = full_design(ds).values;

  Support support = pilot.fit.penalized.support;
  support.push_back(jj);
  std::sort(support.begin(), support.end());
  support.erase(std::unique(support.begin(), support.end()), support.end());
  const PostFit refit = post_logistic_refit(pilot.yu, design, support, cfg.logistic);

  const auto s = static_cast<Eigen::Index>(support.size());
  const auto pos = static_cast<Eigen::Index>(
      std::find(support.begin(), support.end(), jj) - support.begin());
  MatrixXd zs(design.rows(), s);
  for (Eigen::Index a = 0; a < s; ++a) zs.col(a) = design.col(static_cast<Eigen::Index>(support[a]));
  const VectorXd eta = design * refit.coefficients;
  const double nd = static_cast<double>(design.rows());

  VectorXd curvature(eta.size());
  VectorXd residual(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    curvature[i] = logistic_derivative(eta[i]);
    residual[i] = pilot.yu[i] - logistic(eta[i]);
  }
  MatrixXd info = zs.transpose() * curvature.asDiagonal() * zs / nd;
  const Eigen::LDLT<MatrixXd> ldlt(info);
  VectorXd e0 = VectorXd::Zero(s);
  e0[pos] = 1.0;
  const VectorXd row = ldlt.solve(e0);
  const double var = row[pos];
  if (ldlt.info() != Eigen::Success || !(var > 0.0) || !std::isfinite(var)) {
    fail(ErrorKind::DegenerateIdentification, "observed information is singular at the target");
  }

  CellResult out;
  CellEstimate& est = out.estimate;
  est.u = pilot.u;
  est.j = j;
  est.method = Method::Naive;
  est.theta_check = refit.coefficients[static_cast<Eigen::Index>(jj)];
  est.theta_pilot = pilot.fit.post.coefficients[static_cast<Eigen::Index>(jj)];
  est.box = ThetaBox::around(est.theta_pilot, cfg.theta_box_width);
  est.sigma_hat = std::sqrt(var);
  est.sigma_raw = est.sigma_hat;
  est.sigma_alt = 0.0;
  est.j_hat = -1.0 / var;
  est.pilot_support = pilot.fit.penalized.support.size();
  est.flags = kObservedInformationVariance;
  if (!pilot.fit.penalized.converged) est.flags |= kPilotNotConverged;
  if (refit.separated) est.flags |= kSeparated;
  if (refit.jittered) est.flags |= kJittered;
  if (!est.box.contains(est.theta_check)) est.flags |= kOutsideBox;

  const VectorXd influence = zs * row;
  out.score = influence.cwiseProduct(residual) / est.sigma_hat;
  return out;
}

}  // namespace dreg
