#include <gtest/gtest.h>

#include <cmath>

#include "dreg/designs.hpp"
#include "dreg/errors.hpp"
#include "dreg/ortho_inference.hpp"
#include "dreg/weighted_lasso.hpp"
#include "instances.hpp"

using namespace dreg;

namespace {

PenaltyConfig tight() {
  PenaltyConfig cfg;
  cfg.solver_tol = 1e-10;
  return cfg;
}

double soft(double v, double t) { return std::copysign(std::max(std::abs(v) - t, 0.0), v); }

}  // namespace

TEST(WeightVector, Bounds) {
  EXPECT_THROW(WeightVector(VectorXd::Constant(3, 0.3)), Error);
  EXPECT_THROW(WeightVector(VectorXd::Zero(3)), Error);
  EXPECT_NO_THROW(WeightVector(VectorXd::Constant(3, 0.25)));
}

TEST(EstimatedWeights, Examples) {
  MatrixXd z = MatrixXd::Ones(3, 1);
  PostFit post{VectorXd::Zero(1), {}, 0.0, 0, false, false};
  EXPECT_TRUE(estimated_weights(z, post).f2().isApproxToConstant(0.25));
  post.coefficients(0) = 800.0;
  EXPECT_TRUE(estimated_weights(z, post, 1e-6).f2().isApproxToConstant(1e-6));
  post.coefficients(0) = 1.0;
  EXPECT_NEAR(estimated_weights(z, post).f2()(0), 0.19661193324148185254, 1e-15);
}

TEST(PenaltyLevelWlasso, Examples) {
  PenaltyConfig cfg;
  EXPECT_NEAR(penalty_level_wlasso(100, 2, 10, cfg), 64.501809122028961691, 1e-9);
  PenaltyConfig alg3 = cfg;
  alg3.n_n = 100;
  EXPECT_GE(penalty_level_wlasso(100, 2, 10, cfg), penalty_level(100, 12, alg3));
  PenaltyConfig one = cfg;
  one.n_n = 10.0 * 100 * 100;
  EXPECT_DOUBLE_EQ(penalty_level_wlasso(100, 1, 10, cfg), penalty_level(100, 11, one));
}

TEST(InitialLoadingsWlasso, Examples) {
  // Constant weights f² = 1/4 in place of f ≡ 1: the loading scales by 1/4.
  const WeightVector w(VectorXd::Constant(2, 0.25));
  const VectorXd l = initial_loadings_wlasso(VectorXd::Ones(2), MatrixXd::Ones(2, 3), w);
  EXPECT_TRUE(l.isApproxToConstant(0.25));
  const VectorXd l2 = initial_loadings_wlasso(VectorXd::Constant(2, 2.0), MatrixXd::Ones(2, 3), w);
  EXPECT_TRUE(l2.isApprox(2.0 * l));
  EXPECT_THROW(initial_loadings_wlasso(VectorXd::Zero(2), MatrixXd::Ones(2, 3), w), Error);
}

TEST(InitialLoadingsWlasso, MatchesLoop) {
  const MatrixXd x = fixtures::random_matrix(1, 5, 3);
  const VectorXd d = fixtures::random_matrix(2, 5, 1).col(0);
  const VectorXd f2 = fixtures::random_f2(3, 5);
  const VectorXd l = initial_loadings_wlasso(d, x, WeightVector(f2));
  double mx = 0.0, m2 = 0.0;
  for (int i = 0; i < 5; ++i) {
    for (int k = 0; k < 3; ++k) mx = std::max(mx, std::abs(std::sqrt(f2(i)) * x(i, k)));
    m2 += f2(i) * d(i) * d(i) / 5;
  }
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(l(k), mx * std::sqrt(m2), 1e-12);
}

TEST(RefineLoadingsWlasso, ExamplesAndLoop) {
  const MatrixXd x = fixtures::random_matrix(4, 30, 4);
  const VectorXd f2 = fixtures::random_f2(5, 30);
  const WeightVector w(f2);
  GammaFit zero;
  zero.gamma = VectorXd::Zero(4);
  // D_j equal to column 2 and γ̃ = 0: loading 2 is (E_n[f⁴ X₂⁴])^{1/2}.
  const VectorXd l = refine_loadings_wlasso(x.col(2), x, w, zero);
  double s = 0.0;
  for (int i = 0; i < 30; ++i) s += f2(i) * f2(i) * std::pow(x(i, 2), 4) / 30;
  EXPECT_NEAR(l(2), std::sqrt(s), 1e-12);

  GammaFit g;
  g.gamma = (VectorXd(4) << 0.5, 0, -1.0, 0).finished();
  g.support = {0, 2};
  const VectorXd d = x.col(0) * 0.4 + x.col(3);
  const VectorXd lr = refine_loadings_wlasso(d, x, w, g);
  for (int k = 0; k < 4; ++k) {
    double acc = 0.0;
    for (int i = 0; i < 30; ++i) {
      const double r = d(i) - 0.5 * x(i, 0) + 1.0 * x(i, 2);
      acc += f2(i) * f2(i) * r * r * x(i, k) * x(i, k);
    }
    EXPECT_NEAR(lr(k), std::sqrt(acc / 30), 1e-12);
  }

  GammaFit exact;
  exact.gamma = (VectorXd(4) << 0, 0, 1.0, 0).finished();
  exact.support = {2};
  const VectorXd init = initial_loadings_wlasso(x.col(2), x, w);
  const VectorXd lf = refine_loadings_wlasso(x.col(2), x, w, exact, 1e-3);
  EXPECT_TRUE(lf.isApprox(1e-3 * init));
}

TEST(WeightedLasso, SoftThresholdExample) {
  // n = 2, one column with E_n[f²X²] = 1, E_n[f²XD] = 0.5, λ/n = 0.2.
  const WeightVector w(VectorXd::Constant(2, 0.25));
  const MatrixXd x = MatrixXd::Constant(2, 1, 2.0);
  const VectorXd d = VectorXd::Constant(2, 1.0);
  const GammaFit fit = weighted_lasso(d, x, w, 0.4, VectorXd::Ones(1), tight());
  EXPECT_NEAR(fit.gamma(0), 0.3, 1e-12);
}

TEST(WeightedLasso, OrthonormalDesignsMatchSoftThreshold) {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const int n = 80, p = 10;
    const VectorXd f2 = fixtures::random_f2(s, n);
    const MatrixXd raw = fixtures::random_matrix(100 + s, n, p);
    // Orthonormalize in the f²-weighted inner product E_n[f² · ·].
    const MatrixXd a = (f2.cwiseSqrt().asDiagonal() * raw) / std::sqrt(double(n));
    Eigen::HouseholderQR<MatrixXd> qr(a);
    const MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    const MatrixXd x = raw * r.inverse();
    const VectorXd d = fixtures::random_matrix(200 + s, n, 1).col(0) * 2.0;
    const double lambda = 0.1 * n;
    const GammaFit fit =
        weighted_lasso(d, x, WeightVector(f2), lambda, VectorXd::Ones(p), tight());
    const VectorXd inner = x.transpose() * f2.asDiagonal() * d / n;
    for (int k = 0; k < p; ++k) EXPECT_NEAR(fit.gamma(k), soft(inner(k), 0.1), 1e-8);
  }
}

TEST(WeightedLasso, HugeLambdaAndExactSpan) {
  const MatrixXd x = fixtures::random_matrix(6, 40, 5);
  const WeightVector w(fixtures::random_f2(7, 40));
  const VectorXd d = 1.7 * x.col(3);
  EXPECT_TRUE(weighted_lasso(d, x, w, 1e9, VectorXd::Ones(5), tight()).gamma.isZero(0.0));
  const GammaFit exact = weighted_lasso(d, x.col(3), w, 0.0, VectorXd::Ones(1), tight());
  EXPECT_NEAR(exact.gamma(0), 1.7, 1e-10);
}

TEST(WeightedLasso, KktOnRandomInstances) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const int n = 150, p = 40;
    const MatrixXd x = fixtures::random_matrix(300 + s, n, p);
    const VectorXd d = x.col(0) - 0.5 * x.col(1) + fixtures::random_matrix(400 + s, n, 1).col(0);
    const VectorXd f2 = fixtures::random_f2(500 + s, n);
    const WeightVector w(f2);
    const VectorXd l = initial_loadings_wlasso(d, x, w);
    const double lambda = 0.02;
    const GammaFit fit = weighted_lasso(d, x, w, lambda * n / l(0), l, tight());
    ASSERT_TRUE(fit.converged);
    const VectorXd g = wlasso_gradient(d, x, w, fit.gamma);
    const VectorXd resid_moment = x.transpose() * (f2.asDiagonal() * (d - x * fit.gamma)) / n;
    EXPECT_LE((g + resid_moment).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(kkt_residual(g, fit.gamma, fit.lambda, l, n), 1e-10);
  }
}

TEST(PostWeightedLasso, EmptyFullAndSingleSupport) {
  const int n = 60, p = 4;
  const MatrixXd x = fixtures::random_matrix(8, n, p);
  const VectorXd d = fixtures::random_matrix(9, n, 1).col(0) + x.col(1);
  const WeightVector flat(VectorXd::Constant(n, 0.25));
  EXPECT_TRUE(post_weighted_lasso(d, x, flat, {}).gamma.isZero(0.0));

  const GammaFit full = post_weighted_lasso(d, x, flat, {0, 1, 2, 3});
  const VectorXd ols = (x.transpose() * x).ldlt().solve(x.transpose() * d);
  EXPECT_LE((full.gamma - ols).cwiseAbs().maxCoeff(), 1e-8);

  const VectorXd f2 = fixtures::random_f2(10, n);
  const GammaFit one = post_weighted_lasso(d, x, WeightVector(f2), {2});
  const double expected = (f2.array() * x.col(2).array() * d.array()).sum() /
                          (f2.array() * x.col(2).array().square()).sum();
  EXPECT_NEAR(one.gamma(2), expected, 1e-12);
  EXPECT_EQ(one.gamma(0), 0.0);
}

TEST(PostWeightedLasso, OrthogonalityAndObjective) {
  const int n = 120, p = 30;
  const MatrixXd x = fixtures::random_matrix(11, n, p);
  const VectorXd d = x.col(0) + 0.5 * x.col(5) + fixtures::random_matrix(12, n, 1).col(0);
  const VectorXd f2 = fixtures::random_f2(13, n);
  const WeightVector w(f2);
  const VectorXd l = initial_loadings_wlasso(d, x, w);
  const GammaFit lasso = weighted_lasso(d, x, w, 3.0 / l(0), l, tight());
  ASSERT_FALSE(lasso.support.empty());
  const GammaFit post = post_weighted_lasso(d, x, w, lasso.support);
  const VectorXd moment = x.transpose() * (f2.asDiagonal() * (d - x * post.gamma)) / n;
  for (auto k : lasso.support) EXPECT_LE(std::abs(moment(static_cast<Eigen::Index>(k))), 1e-8);
  auto loss = [&](const VectorXd& g) {
    return 0.5 * (f2.array() * (d - x * g).array().square()).mean();
  };
  EXPECT_LE(loss(post.gamma), loss(lasso.gamma) + 1e-14);
}

TEST(Algorithm4, LoopCountAndValidation) {
  const int n = 100;
  const MatrixXd x = fixtures::random_matrix(14, n, 20);
  const VectorXd d = 3.0 * x.col(0) + fixtures::random_matrix(15, n, 1).col(0);
  const WeightVector w(fixtures::random_f2(16, n));
  PenaltyConfig cfg;
  cfg.max_loops = 0;
  EXPECT_THROW(fit_gamma_algorithm4(d, x, w, 1, 20, cfg), Error);
  cfg.max_loops = 1;
  const GammaAlgorithmFit fit = fit_gamma_algorithm4(d, x, w, 1, 20, cfg);
  EXPECT_EQ(fit.refinements, 1);
  EXPECT_DOUBLE_EQ(fit.lasso.lambda, penalty_level_wlasso(n, 1, 20, cfg));
}

// γ̃ support for D = x₂ on Design 1(i): every selected control should have
// Toeplitz correlation at least 0.25 with x₂ in most replications.
TEST(Algorithm4, Design1GammaSupportIsLocal) {
  DesignSpec spec;
  spec.n = 300;
  spec.p = 100;
  spec.j_set = {2};
  spec.seed = 77;
  int local = 0;
  const int reps = 50;
  for (int r = 0; r < reps; ++r) {
    const SimulatedSample s = simulate(spec, r);
    const VectorXd yu = functional_response(s.data, 0.0, s.thresholds);
    const MatrixXd full = full_design(s.data).values;
    const Pilot pilot = fit_pilot(s.data, full, 0.0, yu, InferenceConfig{});
    const MatrixXd xj = design_without_j(s.data, 1).values;
    const GammaAlgorithmFit g =
        fit_gamma_algorithm4(s.data.d().col(0), xj, pilot.weights, 1, s.data.p_controls(),
                             PenaltyConfig{});
    bool ok = true;
    for (auto k : g.post.support) {
      // Control k of X is x column k+2 (1-based) when k ≥ 1, x₁ when k = 0.
      const std::size_t col = k == 0 ? 1 : k + 2;
      const double corr = col == 1 ? 0.0 : std::pow(0.5, std::abs(double(col) - 2.0));
      ok = ok && corr >= 0.25;
    }
    local += ok;
  }
  EXPECT_GE(static_cast<double>(local) / reps, 0.8);
}
