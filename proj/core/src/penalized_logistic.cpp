#include "dreg/penalized_logistic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dreg/errors.hpp"
#include "dreg/link.hpp"
#include "dreg/normal.hpp"

namespace dreg {
namespace {

double soft_threshold(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

void check_problem(const VectorXd& yu, const MatrixXd& z) {
  if (yu.size() != z.rows()) fail(ErrorKind::InvalidArgument, "response and design row counts differ");
  if (!z.allFinite()) fail(ErrorKind::InvalidArgument, "design has non-finite entries");
}

double mean_loss_at(const VectorXd& yu, const VectorXd& eta) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) total += logistic_loss(yu[i], eta[i]);
  return total / static_cast<double>(eta.size());
}

VectorXd probabilities(const VectorXd& eta) {
  return eta.unaryExpr([](double t) { return logistic(t); });
}

}  // namespace

double PenaltyConfig::resolved_gamma(std::size_t n) const {
  return gamma ? *gamma : 0.1 / std::log(static_cast<double>(n));
}

void PenaltyConfig::validate(std::size_t n) const {
  if (!(c > 1.0)) fail(ErrorKind::InvalidConfiguration, "penalty slack c must exceed 1");
  const double g = resolved_gamma(n);
  if (!(g > 0.0 && g < 1.0)) fail(ErrorKind::InvalidConfiguration, "penalty gamma must lie in (0,1)");
  if (!(solver_tol > 0.0) || !(refit_tol > 0.0)) {
    fail(ErrorKind::InvalidConfiguration, "solver tolerances must be positive");
  }
  if (max_loops < 0) fail(ErrorKind::InvalidConfiguration, "max_loops must be >= 0");
  if (max_iter < 1) fail(ErrorKind::InvalidConfiguration, "max_iter must be >= 1");
  if (!(loading_floor > 0.0)) fail(ErrorKind::InvalidConfiguration, "loading floor must be positive");
  if (!(n_n > 0.0)) fail(ErrorKind::InvalidConfiguration, "N_n must be positive");
}

double penalty_level(std::size_t n, std::size_t p_total, const PenaltyConfig& cfg) {
  if (n < 2 || p_total < 1) fail(ErrorKind::InvalidArgument, "penalty level needs n >= 2 and p_total >= 1");
  cfg.validate(n);
  const double tail = cfg.resolved_gamma(n) / (2.0 * static_cast<double>(p_total) * cfg.n_n);
  if (!(tail > 0.0) || !std::isfinite(tail) || tail > 0.5) {
    fail(ErrorKind::InvalidConfiguration,
         "penalty quantile tail " + std::to_string(tail) + " is outside (0, 0.5]");
  }
  const double q = tail == 0.5 ? 0.0 : normal_upper_quantile(tail);
  return cfg.c * std::sqrt(static_cast<double>(n)) * q;
}

double logistic_mean_loss(const VectorXd& yu, const MatrixXd& z, const VectorXd& b) {
  check_problem(yu, z);
  return mean_loss_at(yu, z * b);
}

VectorXd logistic_gradient(const VectorXd& yu, const MatrixXd& z, const VectorXd& b) {
  check_problem(yu, z);
  const VectorXd resid = probabilities(z * b) - yu;
  return z.transpose() * resid / static_cast<double>(z.rows());
}

double kkt_residual(const VectorXd& gradient, const VectorXd& coefficients, double lambda,
                    const VectorXd& loadings, std::size_t n) {
  double worst = 0.0;
  for (Eigen::Index k = 0; k < gradient.size(); ++k) {
    const double pen = lambda * loadings[k] / static_cast<double>(n);
    const double g = gradient[k];
    const double b = coefficients[k];
    const double v = b == 0.0 ? std::max(0.0, std::abs(g) - pen)
                              : std::abs(g + (b > 0.0 ? pen : -pen));
    worst = std::max(worst, v);
  }
  return worst;
}

Support support_of(const VectorXd& v) {
  Support s;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (v[k] != 0.0) s.push_back(static_cast<std::size_t>(k));
  }
  return s;
}

VectorXd initial_loadings_logistic(const VectorXd& yu, const MatrixXd& z) {
  check_problem(yu, z);
  const double n = static_cast<double>(z.rows());
  VectorXd l(z.cols());
  for (Eigen::Index k = 0; k < z.cols(); ++k) {
    l[k] = 0.5 * std::sqrt(z.col(k).squaredNorm() / n);
    if (!(l[k] > 0.0)) {
      fail(ErrorKind::DegenerateColumn, "design column " + std::to_string(k + 1) + " is identically zero");
    }
  }
  return l;
}

VectorXd refine_loadings_logistic(const VectorXd& yu, const MatrixXd& z, const PostFit& post,
                                  double floor) {
  const VectorXd initial = initial_loadings_logistic(yu, z);
  const VectorXd resid = yu - probabilities(z * post.coefficients);
  const VectorXd r2 = resid.array().square();
  const double n = static_cast<double>(z.rows());
  VectorXd l(z.cols());
  for (Eigen::Index k = 0; k < z.cols(); ++k) {
    const double m = (z.col(k).array().square() * r2.array()).sum() / n;
    l[k] = std::max(std::sqrt(m), floor * initial[k]);
  }
  return l;
}

PenalizedFit l1_logistic(const VectorXd& yu, const MatrixXd& z, double lambda,
                         const VectorXd& loadings, const PenaltyConfig& cfg,
                         const VectorXd* warm_start) {
  check_problem(yu, z);
  const Eigen::Index n = z.rows();
  const Eigen::Index p = z.cols();
  const double nd = static_cast<double>(n);
  if (loadings.size() != p) fail(ErrorKind::InvalidArgument, "loading count does not match design width");
  if ((loadings.array() <= 0.0).any()) fail(ErrorKind::InvalidArgument, "loadings must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorKind::InvalidArgument, "lambda must be finite and >= 0");

  const VectorXd pen = lambda * loadings / nd;
  VectorXd bound(p);
  for (Eigen::Index k = 0; k < p; ++k) bound[k] = 0.25 * z.col(k).squaredNorm() / nd;

  VectorXd b = warm_start != nullptr ? *warm_start : VectorXd::Zero(p);
  if (b.size() != p) fail(ErrorKind::InvalidArgument, "warm start has the wrong length");
  VectorXd eta = z * b;
  VectorXd prob = probabilities(eta);
  double loss = mean_loss_at(yu, eta);
  VectorXd trial(n);

  auto objective = [&] { return loss + pen.dot(b.cwiseAbs()); };

  // Returns bound-scaled step size (0 when the coordinate did not move).
  auto update = [&](Eigen::Index k) -> double {
    if (bound[k] == 0.0) return 0.0;
    const auto col = z.col(k);
    double g = 0.0;
    double w = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      g += (prob[i] - yu[i]) * col[i];
      w += prob[i] * (1.0 - prob[i]) * col[i] * col[i];
    }
    g /= nd;
    w /= nd;
    const double old = b[k];
    if (old == 0.0 && std::abs(g) <= pen[k]) return 0.0;

    auto try_step = [&](double h) -> bool {
      const double cand = soft_threshold(h * old - g, pen[k]) / h;
      const double delta = cand - old;
      if (delta == 0.0) return false;
      double trial_loss = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        trial[i] = eta[i] + delta * col[i];
        trial_loss += logistic_loss(yu[i], trial[i]);
      }
      trial_loss /= nd;
      const double change = trial_loss - loss + pen[k] * (std::abs(cand) - std::abs(old));
      // Near the optimum the true decrease falls below the rounding noise of
      // the summed loss; accept steps within that noise.
      if (change > 1e-15 * std::max(1.0, loss)) return false;
      eta.swap(trial);
      for (Eigen::Index i = 0; i < n; ++i) prob[i] = logistic(eta[i]);
      loss = trial_loss;
      b[k] = cand;
      return true;
    };

    const double newton = std::max(w, 1e-8 * bound[k]);
    if (try_step(newton) || try_step(bound[k])) return bound[k] * 4.0 * std::abs(b[k] - old);
    return 0.0;
  };

  PenalizedFit fit;
  fit.lambda = lambda;
  fit.loadings = loadings;
  fit.objective_trace.push_back(objective());

  int sweeps = 0;
  double kkt = 0.0;
  while (sweeps < cfg.max_iter) {
    double moved = 0.0;
    for (Eigen::Index k = 0; k < p; ++k) moved = std::max(moved, update(k));
    ++sweeps;
    eta = z * b;
    prob = probabilities(eta);
    loss = mean_loss_at(yu, eta);
    fit.objective_trace.push_back(objective());

    const VectorXd grad = z.transpose() * (prob - yu) / nd;
    kkt = kkt_residual(grad, b, lambda, loadings, static_cast<std::size_t>(n));
    if (kkt <= cfg.solver_tol) {
      fit.converged = true;
      break;
    }
    if (moved == 0.0) break;
    const Support active = support_of(b);
    for (int inner = 0; inner < 1000 && sweeps < cfg.max_iter && !active.empty(); ++inner) {
      double largest = 0.0;
      for (auto k : active) largest = std::max(largest, update(static_cast<Eigen::Index>(k)));
      ++sweeps;
      fit.objective_trace.push_back(objective());
      if (largest < 0.1 * cfg.solver_tol) break;
    }
  }

  fit.coefficients = b;
  fit.support = support_of(b);
  fit.objective = objective();
  fit.kkt_residual = kkt;
  fit.iterations = sweeps;
  return fit;
}

PostFit post_logistic_refit(const VectorXd& yu, const MatrixXd& z, const Support& support,
                            const PenaltyConfig& cfg) {
  check_problem(yu, z);
  const Eigen::Index n = z.rows();
  const double nd = static_cast<double>(n);
  PostFit fit;
  fit.coefficients = VectorXd::Zero(z.cols());
  fit.support = support;
  if (support.empty()) {
    fit.gradient_norm = logistic_gradient(yu, z, fit.coefficients).lpNorm<Eigen::Infinity>();
    return fit;
  }

  const auto s = static_cast<Eigen::Index>(support.size());
  MatrixXd zs(n, s);
  for (Eigen::Index a = 0; a < s; ++a) {
    const auto k = static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)]);
    if (k >= z.cols()) fail(ErrorKind::InvalidArgument, "support index out of range");
    zs.col(a) = z.col(k);
  }

  VectorXd b = VectorXd::Zero(s);
  VectorXd eta = VectorXd::Zero(n);
  double loss = mean_loss_at(yu, eta);
  VectorXd grad;
  int iter = 0;
  for (; iter < 200; ++iter) {
    const VectorXd prob = probabilities(eta);
    grad = zs.transpose() * (prob - yu) / nd;
    if (grad.lpNorm<Eigen::Infinity>() <= cfg.refit_tol) break;

    const VectorXd w = prob.array() * (1.0 - prob.array());
    MatrixXd h = zs.transpose() * w.asDiagonal() * zs / nd;
    Eigen::LDLT<MatrixXd> ldlt(h);
    const auto& dvals = ldlt.vectorD();
    const double dmax = dvals.cwiseAbs().maxCoeff();
    if (ldlt.info() != Eigen::Success || !(dvals.minCoeff() > 1e-13 * std::max(dmax, 1e-300))) {
      const double jitter = 1e-10 * std::max(1.0, h.diagonal().maxCoeff());
      h.diagonal().array() += jitter;
      ldlt.compute(h);
      fit.jittered = true;
    }
    const VectorXd dir = ldlt.solve(-grad);
    const double slope = grad.dot(dir);

    double step = 1.0;
    VectorXd cand = b + dir;
    VectorXd cand_eta = zs * cand;
    double cand_loss = mean_loss_at(yu, cand_eta);
    // Below floating resolution of the loss the full step is taken as is.
    if (-slope > 1e-14) {
      while (cand_loss > loss + 1e-4 * step * slope && step > 1e-12) {
        step *= 0.5;
        cand = b + step * dir;
        cand_eta = zs * cand;
        cand_loss = mean_loss_at(yu, cand_eta);
      }
    }
    b = cand;
    eta = cand_eta;
    loss = cand_loss;
    if (b.lpNorm<Eigen::Infinity>() > cfg.coefficient_cap) {
      fit.separated = true;
      grad = zs.transpose() * (probabilities(eta) - yu) / nd;
      ++iter;
      break;
    }
  }
  if (iter == 200) grad = zs.transpose() * (probabilities(eta) - yu) / nd;

  for (Eigen::Index a = 0; a < s; ++a) {
    fit.coefficients[static_cast<Eigen::Index>(support[static_cast<std::size_t>(a)])] = b[a];
  }
  fit.gradient_norm = grad.lpNorm<Eigen::Infinity>();
  fit.iterations = iter;
  return fit;
}

LogisticAlgorithmFit fit_logistic_algorithm3(const VectorXd& yu, const MatrixXd& z,
                                             const PenaltyConfig& cfg) {
  check_problem(yu, z);
  const auto n = static_cast<std::size_t>(z.rows());
  PenaltyConfig local = cfg;
  local.n_n = static_cast<double>(n);
  local.validate(n);
  const double lambda = penalty_level(n, static_cast<std::size_t>(z.cols()), local);

  LogisticAlgorithmFit out;
  VectorXd loadings = initial_loadings_logistic(yu, z);
  for (int m = 0;; ++m) {
    const VectorXd* warm = m == 0 ? nullptr : &out.penalized.coefficients;
    PenalizedFit pen = l1_logistic(yu, z, lambda, loadings, local, warm);
    out.penalized = std::move(pen);
    out.post = post_logistic_refit(yu, z, out.penalized.support, local);
    if (m >= local.max_loops) break;
    loadings = refine_loadings_logistic(yu, z, out.post, local.loading_floor);
    ++out.refinements;
  }
  return out;
}

}  // namespace dreg
