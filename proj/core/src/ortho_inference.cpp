#include "dreg/ortho_inference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "dreg/errors.hpp"
#include "dreg/link.hpp"
#include "dreg/parallel.hpp"

namespace dreg {
namespace {

constexpr int kScanIntervals = 256;

VectorXd drop_entry(const VectorXd& v, Eigen::Index skip) {
  VectorXd out(v.size() - 1);
  Eigen::Index at = 0;
  for (Eigen::Index k = 0; k < v.size(); ++k) {
    if (k != skip) out[at++] = v[k];
  }
  return out;
}

unsigned pilot_flags(const Pilot& pilot) {
  unsigned flags = 0;
  if (!pilot.fit.penalized.converged) flags |= kPilotNotConverged;
  if (pilot.fit.post.separated) flags |= kSeparated;
  if (pilot.fit.post.jittered) flags |= kJittered;
  return flags;
}

unsigned gamma_flags(const GammaAlgorithmFit& g) {
  unsigned flags = 0;
  if (!g.lasso.converged) flags |= kLassoNotConverged;
  if (g.post.jittered) flags |= kJittered;
  return flags;
}

void check_target(const Dataset& ds, std::size_t j) {
  if (j < 1 || j > ds.p_target()) {
    fail(ErrorKind::InvalidArgument, "target index " + std::to_string(j) + " out of range");
  }
}

Pilot make_pilot(const Dataset& ds, double u, const ResponseThresholds& th,
                 const InferenceConfig& cfg) {
  return fit_pilot(ds, full_design(ds).values, u, functional_response(ds, u, th), cfg);
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::OrthogonalScore: return "os";
    case Method::DoubleSelection: return "ds";
    case Method::OneStep: return "onestep";
    case Method::Naive: return "naive";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "os") return Method::OrthogonalScore;
  if (name == "ds") return Method::DoubleSelection;
  if (name == "onestep") return Method::OneStep;
  if (name == "naive") return Method::Naive;
  fail(ErrorKind::InvalidConfiguration, "unknown method '" + name + "' (expected os|ds|onestep|naive)");
}

std::string flags_to_string(unsigned flags) {
  static const std::pair<unsigned, const char*> names[] = {
      {kBoundarySolution, "boundary"},
      {kPilotNotConverged, "pilot-not-converged"},
      {kLassoNotConverged, "lasso-not-converged"},
      {kSeparated, "separated"},
      {kJittered, "jittered"},
      {kObservedInformationVariance, "observed-information"},
      {kOutsideBox, "outside-box"},
  };
  std::string out;
  for (const auto& [bit, name] : names) {
    if (flags & bit) {
      if (!out.empty()) out += '|';
      out += name;
    }
  }
  return out;
}

Pilot fit_pilot(const Dataset& ds, const MatrixXd& design, double u, const VectorXd& yu,
                const InferenceConfig& cfg) {
  if (static_cast<std::size_t>(yu.size()) != ds.n()) {
    fail(ErrorKind::InvalidArgument, "functional response length differs from n");
  }
  Pilot pilot;
  pilot.u = u;
  pilot.yu = yu;
  pilot.fit = fit_logistic_algorithm3(yu, design, cfg.logistic);
  pilot.weights = estimated_weights(design, pilot.fit.post, cfg.weight_floor);
  return pilot;
}

VectorXd score_psi(const VectorXd& yu, const VectorXd& dj, const VectorXd& offset, double theta,
                   const VectorXd& instrument) {
  VectorXd psi(yu.size());
  for (Eigen::Index i = 0; i < yu.size(); ++i) {
    psi[i] = (yu[i] - logistic(dj[i] * theta + offset[i])) * instrument[i];
  }
  return psi;
}

VectorXd score_psi(const Dataset& ds, const VectorXd& yu, std::size_t j, double theta,
                   const VectorXd& beta_hat_j, const VectorXd& gamma_tilde) {
  check_target(ds, j);
  const MatrixXd xj = design_without_j(ds, j).values;
  if (beta_hat_j.size() != xj.cols() || gamma_tilde.size() != xj.cols()) {
    fail(ErrorKind::InvalidArgument, "nuisance vectors must have length p̃ + p - 1");
  }
  const VectorXd dj = ds.d().col(static_cast<Eigen::Index>(j - 1));
  return score_psi(yu, dj, xj * beta_hat_j, theta, dj - xj * gamma_tilde);
}

ZSolution solve_z(const std::function<double(double)>& mean_score, const ThetaBox& box,
                  double tol) {
  std::vector<double> grid(kScanIntervals + 1);
  std::vector<double> values(kScanIntervals + 1);
  for (int a = 0; a <= kScanIntervals; ++a) {
    grid[a] = a == kScanIntervals
                  ? box.hi
                  : box.lo + (box.hi - box.lo) * static_cast<double>(a) / kScanIntervals;
    values[a] = mean_score(grid[a]);
    if (!std::isfinite(values[a])) fail(ErrorKind::NumericalFailure, "non-finite score mean in Z-step");
  }

  // Sign changes: take the bracket nearest the box centre.
  const double centre = 0.5 * (box.lo + box.hi);
  int best = -1;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int a = 0; a <= kScanIntervals; ++a) {
    if (values[a] == 0.0) {
      const double d = std::abs(grid[a] - centre);
      if (d < best_dist) {
        best_dist = d;
        best = -2 - a;
      }
    } else if (a < kScanIntervals && values[a] * values[a + 1] < 0.0) {
      const double d = std::abs(0.5 * (grid[a] + grid[a + 1]) - centre);
      if (d < best_dist) {
        best_dist = d;
        best = a;
      }
    }
  }
  if (best <= -2) {
    const int a = -2 - best;
    return {grid[a], 0.0, false};
  }
  if (best >= 0) {
    std::uintmax_t max_iter = 300;
    auto done = [tol](double lo, double hi) { return std::abs(hi - lo) <= tol; };
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        mean_score, grid[best], grid[best + 1], values[best], values[best + 1], done, max_iter);
    const double flo = mean_score(lo);
    const double fhi = mean_score(hi);
    return std::abs(flo) <= std::abs(fhi) ? ZSolution{lo, flo, false} : ZSolution{hi, fhi, false};
  }

  // No root on the scan: the smallest |f|, refined locally when interior.
  int arg = 0;
  for (int a = 1; a <= kScanIntervals; ++a) {
    if (std::abs(values[a]) < std::abs(values[arg])) arg = a;
  }
  if (arg == 0 || arg == kScanIntervals) return {grid[arg], values[arg], true};
  ZSolution sol{grid[arg], values[arg], false};
  std::uintmax_t max_iter = 200;
  const auto [t, v] = boost::math::tools::brent_find_minima(
      [&](double th) { return std::abs(mean_score(th)); }, grid[arg - 1], grid[arg + 1], 52,
      max_iter);
  if (v < std::abs(sol.mean_score)) sol = {t, mean_score(t), false};
  return sol;
}

ZSolution solve_theta_check(const VectorXd& yu, const VectorXd& dj, const VectorXd& offset,
                            const VectorXd& instrument, const ThetaBox& box, double tol) {
  const double nd = static_cast<double>(yu.size());
  auto mean_score = [&](double theta) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < yu.size(); ++i) {
      total += (yu[i] - logistic(dj[i] * theta + offset[i])) * instrument[i];
    }
    return total / nd;
  };
  return solve_z(mean_score, box, tol);
}

double j_hat(const VectorXd& dj, const VectorXd& offset, double theta_tilde,
             const VectorXd& instrument, double curvature_floor) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < dj.size(); ++i) {
    const double curvature =
        std::max(logistic_derivative(dj[i] * theta_tilde + offset[i]), curvature_floor);
    total += curvature * dj[i] * instrument[i];
  }
  const double value = -total / static_cast<double>(dj.size());
  if (!(std::abs(value) >= 1e-10)) {
    fail(ErrorKind::DegenerateIdentification, "|J| below 1e-10; the target is not identified");
  }
  return value;
}

SigmaEstimate sigma_hat(const VectorXd& psi, double j_hat_value, const WeightVector& w,
                        const VectorXd& instrument, AltVarianceRule rule) {
  if (j_hat_value == 0.0) fail(ErrorKind::DegenerateIdentification, "J is zero");
  SigmaEstimate out;
  out.raw = std::sqrt(psi.squaredNorm() / static_cast<double>(psi.size())) / std::abs(j_hat_value);
  const double moment = (w.f2().array() * instrument.array().square()).mean();
  if (!(moment > 0.0)) fail(ErrorKind::DegenerateIdentification, "instrument residual has zero weighted moment");
  out.alt = rule == AltVarianceRule::Inverse ? std::sqrt(1.0 / moment) : std::sqrt(moment);
  out.sigma = std::max(out.raw, out.alt);
  return out;
}

double one_step_correction(double theta_hat, double j_hat_value, double mean_psi) {
  if (j_hat_value == 0.0) fail(ErrorKind::DegenerateIdentification, "J is zero");
  return theta_hat - mean_psi / j_hat_value;
}

CellResult fit_cell_orthogonal(const Dataset& ds, const Pilot& pilot, std::size_t j,
                               const InferenceConfig& cfg, Method method) {
  check_target(ds, j);
  if (method != Method::OrthogonalScore && method != Method::OneStep) {
    fail(ErrorKind::InvalidArgument, "orthogonal-score cell needs method os or onestep");
  }
  const auto jj = static_cast<Eigen::Index>(j - 1);
  const MatrixXd xj = design_without_j(ds, j).values;
  const VectorXd dj = ds.d().col(jj);
  const VectorXd& coef = pilot.fit.post.coefficients;
  const double theta_tilde = coef[jj];
  const VectorXd offset = xj * drop_entry(coef, jj);

  const GammaAlgorithmFit gamma =
      fit_gamma_algorithm4(dj, xj, pilot.weights, ds.p_target(), ds.p_controls(), cfg.lasso);
  const VectorXd instrument = xj.cols() > 0 ? VectorXd(dj - xj * gamma.post.gamma) : dj;

  CellResult out;
  CellEstimate& est = out.estimate;
  est.u = pilot.u;
  est.j = j;
  est.method = method;
  est.theta_pilot = theta_tilde;
  est.box = ThetaBox::around(theta_tilde, cfg.theta_box_width);
  est.pilot_support = pilot.fit.penalized.support.size();
  est.gamma_support = gamma.lasso.support.size();
  est.flags = pilot_flags(pilot) | gamma_flags(gamma);

  est.j_hat = j_hat(dj, offset, theta_tilde, instrument, cfg.weight_floor);
  const VectorXd psi_pilot = score_psi(pilot.yu, dj, offset, theta_tilde, instrument);
  if (method == Method::OrthogonalScore) {
    const ZSolution z = solve_theta_check(pilot.yu, dj, offset, instrument, est.box, cfg.z_tol);
    est.theta_check = z.theta;
    if (z.boundary) est.flags |= kBoundarySolution;
  } else {
    est.theta_check = one_step_correction(theta_tilde, est.j_hat, psi_pilot.mean());
    if (!est.box.contains(est.theta_check)) est.flags |= kOutsideBox;
  }
  const VectorXd psi_check = score_psi(pilot.yu, dj, offset, est.theta_check, instrument);
  const SigmaEstimate sig = sigma_hat(cfg.sigma_at_pilot ? psi_pilot : psi_check, est.j_hat,
                                      pilot.weights, instrument, cfg.alt_variance);
  est.sigma_hat = sig.sigma;
  est.sigma_raw = sig.raw;
  est.sigma_alt = sig.alt;
  out.score = -psi_check / (est.sigma_hat * est.j_hat);
  return out;
}

CellResult fit_cell_orthogonal(const Dataset& ds, double u, const ResponseThresholds& th,
                               std::size_t j, const InferenceConfig& cfg) {
  return fit_cell_orthogonal(ds, make_pilot(ds, u, th, cfg), j, cfg);
}

CellResult fit_cell_double_selection(const Dataset& ds, const Pilot& pilot, std::size_t j,
                                     const InferenceConfig& cfg) {
  check_target(ds, j);
  const auto jj = static_cast<Eigen::Index>(j - 1);
  const auto pt = static_cast<Eigen::Index>(ds.p_target());
  const MatrixXd xj = design_without_j(ds, j).values;
  const VectorXd dj = ds.d().col(jj);
  const MatrixXd& regressors = cfg.literal_double_selection ? ds.x() : xj;
  const Eigen::Index shift = cfg.literal_double_selection ? pt - 1 : 0;

  const GammaAlgorithmFit gamma = fit_gamma_algorithm4(dj, regressors, pilot.weights,
                                                       ds.p_target(), ds.p_controls(), cfg.lasso);

  // Union of both selections in X^j coordinates.
  std::vector<Eigen::Index> selected;
  for (auto k : pilot.fit.penalized.support) {
    const auto kk = static_cast<Eigen::Index>(k);
    if (kk == jj) continue;
    selected.push_back(kk < jj ? kk : kk - 1);
  }
  for (auto k : gamma.lasso.support) selected.push_back(static_cast<Eigen::Index>(k) + shift);
  std::sort(selected.begin(), selected.end());
  selected.erase(std::unique(selected.begin(), selected.end()), selected.end());

  const auto t = static_cast<Eigen::Index>(selected.size());
  MatrixXd refit_design(dj.size(), t + 1);
  refit_design.col(0) = dj;
  for (Eigen::Index a = 0; a < t; ++a) refit_design.col(a + 1) = xj.col(selected[a]);
  Support all(static_cast<std::size_t>(t + 1));
  for (std::size_t a = 0; a < all.size(); ++a) all[a] = a;
  const PostFit refit = post_logistic_refit(pilot.yu, refit_design, all, cfg.logistic);

  const VectorXd offset = refit_design.rightCols(t) * refit.coefficients.tail(t);
  const VectorXd instrument =
      regressors.cols() > 0 ? VectorXd(dj - regressors * gamma.post.gamma) : dj;

  CellResult out;
  CellEstimate& est = out.estimate;
  est.u = pilot.u;
  est.j = j;
  est.method = Method::DoubleSelection;
  est.theta_check = refit.coefficients[0];
  est.theta_pilot = pilot.fit.post.coefficients[jj];
  est.box = ThetaBox::around(est.theta_pilot, cfg.theta_box_width);
  est.pilot_support = pilot.fit.penalized.support.size();
  est.gamma_support = gamma.lasso.support.size();
  est.flags = pilot_flags(pilot) | gamma_flags(gamma);
  if (refit.separated) est.flags |= kSeparated;
  if (refit.jittered) est.flags |= kJittered;
  if (!est.box.contains(est.theta_check)) est.flags |= kOutsideBox;

  est.j_hat = j_hat(dj, offset, est.theta_check, instrument, cfg.weight_floor);
  const VectorXd psi = score_psi(pilot.yu, dj, offset, est.theta_check, instrument);
  const SigmaEstimate sig = sigma_hat(psi, est.j_hat, pilot.weights, instrument, cfg.alt_variance);
  est.sigma_hat = sig.sigma;
  est.sigma_raw = sig.raw;
  est.sigma_alt = sig.alt;
  out.score = -psi / (est.sigma_hat * est.j_hat);
  return out;
}

CellResult fit_cell_double_selection(const Dataset& ds, double u, const ResponseThresholds& th,
                                     std::size_t j, const InferenceConfig& cfg) {
  return fit_cell_double_selection(ds, make_pilot(ds, u, th, cfg), j, cfg);
}

CellResult naive_post_selection_fit(const Dataset& ds, double u, const ResponseThresholds& th,
                                    std::size_t j, const InferenceConfig& cfg) {
  return naive_post_selection_fit(ds, make_pilot(ds, u, th, cfg), j, cfg);
}

CellResult fit_cell(const Dataset& ds, const Pilot& pilot, std::size_t j,
                    const InferenceConfig& cfg, Method method) {
  switch (method) {
    case Method::OrthogonalScore:
    case Method::OneStep:
      return fit_cell_orthogonal(ds, pilot, j, cfg, method);
    case Method::DoubleSelection:
      return fit_cell_double_selection(ds, pilot, j, cfg);
    case Method::Naive:
      return naive_post_selection_fit(ds, pilot, j, cfg);
  }
  fail(ErrorKind::InvalidArgument, "unknown method");
}

ScorePanel assemble_panel(std::vector<CellResult> cells) {
  ScorePanel panel;
  if (cells.empty()) return panel;
  const Eigen::Index n = cells.front().score.size();
  panel.psi.resize(n, static_cast<Eigen::Index>(cells.size()));
  panel.cells.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].score.size() != n || !cells[c].score.allFinite()) {
      fail(ErrorKind::NumericalFailure, "cell score column is malformed or non-finite");
    }
    panel.psi.col(static_cast<Eigen::Index>(c)) = cells[c].score;
    panel.cells.push_back(cells[c].estimate);
  }
  return panel;
}

ScorePanel build_score_panel(const Dataset& ds, const IndexGrid& grid,
                             const ResponseThresholds& th, const InferenceConfig& cfg,
                             Method method) {
  grid.check_bounds(ds.p_target());
  const MatrixXd design = full_design(ds).values;
  const auto& us = grid.u_values();
  const auto& js = grid.j_values();

  std::vector<Pilot> pilots(us.size());
  parallel_for(us.size(), cfg.threads, [&](std::size_t a) {
    pilots[a] = fit_pilot(ds, design, us[a], functional_response(ds, us[a], th), cfg);
  });

  std::vector<CellResult> cells(grid.size());
  parallel_for(grid.size(), cfg.threads, [&](std::size_t c) {
    const std::size_t a = c / js.size();
    const std::size_t b = c % js.size();
    cells[c] = fit_cell(ds, pilots[a], js[b], cfg, method);
  });
  return assemble_panel(std::move(cells));
}

}  // namespace dreg
