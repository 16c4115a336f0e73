#include "dreg/weighted_lasso.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dreg/errors.hpp"
#include "dreg/link.hpp"

namespace dreg {
namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

void check_problem(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w) {
  if (dj.size() != xj.rows() || static_cast<Eigen::Index>(w.size()) != dj.size()) {
    fail(ErrorKind::InvalidArgument, "weighted lasso inputs have mismatched lengths");
  }
}

}  // namespace

WeightVector::WeightVector(VectorXd f2) : f2_(std::move(f2)) {
  for (Eigen::Index i = 0; i < f2_.size(); ++i) {
    if (!(f2_[i] > 0.0 && f2_[i] <= 0.25 + 1e-12)) {
      fail(ErrorKind::InvalidArgument, "weights must lie in (0, 1/4]");
    }
  }
}

WeightVector estimated_weights(const MatrixXd& z, const PostFit& post, double floor) {
  const VectorXd eta = z * post.coefficients;
  return WeightVector(eta.unaryExpr([floor](double t) { return std::max(logistic_derivative(t), floor); }));
}

double penalty_level_wlasso(std::size_t n, std::size_t p_target, std::size_t p_controls,
                            const PenaltyConfig& cfg) {
  PenaltyConfig local = cfg;
  // A control-free design still needs N_n ≥ 1.
  const double p = static_cast<double>(std::max<std::size_t>(p_controls, 1));
  const double pt = static_cast<double>(p_target);
  const double nd = static_cast<double>(n);
  local.n_n = p * pt * pt * nd * nd;
  return penalty_level(n, p_target + p_controls, local);
}

VectorXd initial_loadings_wlasso(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w) {
  check_problem(dj, xj, w);
  if (xj.cols() == 0) return VectorXd();
  const VectorXd f = w.f2().cwiseSqrt();
  const double sup = (f.asDiagonal() * xj).cwiseAbs().maxCoeff();
  const double scale = std::sqrt((w.f2().array() * dj.array().square()).mean());
  const double value = sup * scale;
  if (!(value > 0.0)) fail(ErrorKind::DegenerateDesign, "initial weighted-lasso loading is zero");
  return VectorXd::Constant(xj.cols(), value);
}

VectorXd refine_loadings_wlasso(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w,
                                const GammaFit& post_gamma, double floor) {
  const VectorXd initial = initial_loadings_wlasso(dj, xj, w);
  const VectorXd resid = dj - xj * post_gamma.gamma;
  const VectorXd weight = w.f2().array().square() * resid.array().square();
  VectorXd l(xj.cols());
  for (Eigen::Index k = 0; k < xj.cols(); ++k) {
    const double m = (weight.array() * xj.col(k).array().square()).mean();
    l[k] = std::max(std::sqrt(m), floor * initial[k]);
  }
  return l;
}

VectorXd wlasso_gradient(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w,
                         const VectorXd& gamma) {
  check_problem(dj, xj, w);
  const VectorXd wr = w.f2().cwiseProduct(dj - xj * gamma);
  return -(xj.transpose() * wr) / static_cast<double>(dj.size());
}

GammaFit weighted_lasso(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w,
                        double lambda, const VectorXd& loadings, const PenaltyConfig& cfg,
                        const VectorXd* warm_start) {
  check_problem(dj, xj, w);
  const Eigen::Index n = xj.rows();
  const Eigen::Index p = xj.cols();
  const double nd = static_cast<double>(n);
  if (loadings.size() != p) fail(ErrorKind::InvalidArgument, "loading count does not match design width");
  if ((loadings.array() <= 0.0).any()) fail(ErrorKind::InvalidArgument, "loadings must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorKind::InvalidArgument, "lambda must be finite and >= 0");

  const VectorXd& f2 = w.f2();
  const VectorXd pen = lambda * loadings / nd;
  VectorXd curv(p);
  for (Eigen::Index k = 0; k < p; ++k) curv[k] = (f2.array() * xj.col(k).array().square()).sum() / nd;

  GammaFit fit;
  fit.lambda = lambda;
  fit.loadings = loadings;
  VectorXd g = warm_start != nullptr ? *warm_start : VectorXd::Zero(p);
  if (g.size() != p) fail(ErrorKind::InvalidArgument, "warm start has the wrong length");
  VectorXd resid = dj - xj * g;

  auto update = [&](Eigen::Index k) -> double {
    if (curv[k] == 0.0) return 0.0;
    const auto col = xj.col(k);
    double rho = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) rho += f2[i] * col[i] * resid[i];
    rho = rho / nd + curv[k] * g[k];
    const double cand = soft_threshold(rho, pen[k]) / curv[k];
    const double delta = cand - g[k];
    if (delta == 0.0) return 0.0;
    resid -= delta * col;
    g[k] = cand;
    return curv[k] * std::abs(delta);
  };

  int sweeps = 0;
  double kkt = 0.0;
  while (sweeps < cfg.max_iter) {
    for (Eigen::Index k = 0; k < p; ++k) update(k);
    ++sweeps;
    resid = dj - xj * g;
    const VectorXd grad = -(xj.transpose() * f2.cwiseProduct(resid)) / nd;
    kkt = kkt_residual(grad, g, lambda, loadings, static_cast<std::size_t>(n));
    if (kkt <= cfg.solver_tol) {
      fit.converged = true;
      break;
    }
    const Support active = support_of(g);
    for (int inner = 0; inner < 1000 && sweeps < cfg.max_iter && !active.empty(); ++inner) {
      double largest = 0.0;
      for (auto k : active) largest = std::max(largest, update(static_cast<Eigen::Index>(k)));
      ++sweeps;
      if (largest < 0.1 * cfg.solver_tol) break;
    }
  }
  resid = dj - xj * g;
  fit.gamma = g;
  fit.support = support_of(g);
  fit.objective = 0.5 * (f2.array() * resid.array().square()).mean() + pen.dot(g.cwiseAbs());
  fit.kkt_residual = kkt;
  fit.iterations = sweeps;
  return fit;
}

GammaFit post_weighted_lasso(const VectorXd& dj, const MatrixXd& xj, const WeightVector& w,
                             const Support& support) {
  check_problem(dj, xj, w);
  const Eigen::Index n = xj.rows();
  const double nd = static_cast<double>(n);
  GammaFit fit;
  fit.gamma = VectorXd::Zero(xj.cols());
  fit.support = support;
  fit.converged = true;
  if (!support.empty()) {
    const auto s = static_cast<Eigen::Index>(support.size());
    MatrixXd xs(n, s);
    for (Eigen::Index a = 0; a < s; ++a) {
      const auto k = static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)]);
      if (k >= xj.cols()) fail(ErrorKind::InvalidArgument, "support index out of range");
      xs.col(a) = xj.col(k);
    }
    const MatrixXd wx = w.f2().asDiagonal() * xs;
    MatrixXd gram = xs.transpose() * wx / nd;
    const VectorXd rhs = wx.transpose() * dj / nd;
    Eigen::LDLT<MatrixXd> ldlt(gram);
    const auto& dvals = ldlt.vectorD();
    const double dmax = dvals.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(dvals.minCoeff() > 1e-13 * std::max(dmax, 1e-300))) {
      gram.diagonal().array() += 1e-10;
      ldlt.compute(gram);
      fit.jittered = true;
    }
    VectorXd sol = ldlt.solve(rhs);
    // One round of iterative refinement tightens the normal-equation residual.
    sol += ldlt.solve(rhs - gram * sol);
    for (Eigen::Index a = 0; a < s; ++a) {
      fit.gamma[static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)])] = sol[a];
    }
  }
  const VectorXd resid = dj - xj * fit.gamma;
  fit.objective = 0.5 * (w.f2().array() * resid.array().square()).mean();
  return fit;
}

GammaAlgorithmFit fit_gamma_algorithm4(const VectorXd& dj, const MatrixXd& xj,
                                       const WeightVector& w, std::size_t p_target,
                                       std::size_t p_controls, const PenaltyConfig& cfg) {
  check_problem(dj, xj, w);
  if (cfg.max_loops < 1) {
    fail(ErrorKind::InvalidConfiguration, "weighted-lasso loading loop bound must be >= 1");
  }
  const auto n = static_cast<std::size_t>(dj.size());
  GammaAlgorithmFit out;
  if (xj.cols() == 0) {
    out.lasso.converged = out.post.converged = true;
    return out;
  }
  const double lambda = penalty_level_wlasso(n, p_target, p_controls, cfg);
  VectorXd loadings = initial_loadings_wlasso(dj, xj, w);
  for (int m = 0;; ++m) {
    const VectorXd* warm = m == 0 ? nullptr : &out.lasso.gamma;
    GammaFit lasso = weighted_lasso(dj, xj, w, lambda, loadings, cfg, warm);
    out.lasso = std::move(lasso);
    out.post = post_weighted_lasso(dj, xj, w, out.lasso.support);
    out.post.lambda = lambda;
    out.post.loadings = loadings;
    if (m >= cfg.max_loops) break;
    loadings = refine_loadings_wlasso(dj, xj, w, out.post, cfg.loading_floor);
    ++out.refinements;
  }
  return out;
}

}  // namespace dreg
