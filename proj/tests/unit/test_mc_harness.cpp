#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "dreg/designs.hpp"
#include "dreg/errors.hpp"
#include "dreg/montecarlo.hpp"
#include "dreg/normal.hpp"

using namespace dreg;

TEST(Designs, Design1Truths) {
  DesignSpec spec;
  spec.p = 20;
  const SimulatedSample s = gen_design1(spec, 0);
  EXPECT_DOUBLE_EQ(s.truth(1.0, 1), -1.0);
  EXPECT_DOUBLE_EQ(s.truth(1.0, 2), -0.5);
  EXPECT_DOUBLE_EQ(s.truth(2.5, 1), 0.5);
  EXPECT_TRUE(s.x.col(0).isOnes(0.0));
  const VectorXd b2 = beta0(BetaVariant::II, 6);
  EXPECT_EQ(b2(0), -10.0);
  EXPECT_DOUBLE_EQ(b2(1), 0.5 / 2.25);
  EXPECT_DOUBLE_EQ(b2(3), 2.0);
  EXPECT_DOUBLE_EQ(b2(4), 0.5 / 2.25);
}

TEST(Designs, Design2Truths) {
  DesignSpec spec;
  spec.design = DesignId::D2;
  spec.p = 12;
  spec.u_set = {0.0};
  const SimulatedSample s = gen_design2(spec, 0);
  const VectorXd th = vartheta0(12);
  EXPECT_EQ((th.array() != 0.0).count(), 8);
  EXPECT_TRUE((th.array() == 0.0 || th.array() == 0.125).all());
  EXPECT_DOUBLE_EQ(s.truth(0.0, 3), -s.beta(2));
  EXPECT_DOUBLE_EQ(s.truth(0.125, 1), 0.0625 - s.beta(0));
  EXPECT_DOUBLE_EQ(s.truth(-0.125, 1), -0.0625 - s.beta(0));
  EXPECT_TRUE((s.x.array() >= 0.0).all());
  EXPECT_TRUE((s.x * th).minCoeff() >= 1e-12);
}

TEST(Designs, ToeplitzAndEmpiricalCovariance) {
  const MatrixXd sigma = toeplitz_covariance(9, 0.5);
  EXPECT_TRUE(sigma.diagonal().isOnes(0.0));
  EXPECT_DOUBLE_EQ(sigma(2, 5), 0.125);
  DesignSpec spec;
  spec.n = 100000;
  spec.p = 10;
  spec.seed = 4;
  const SimulatedSample s = gen_design1(spec, 0);
  const MatrixXd w = s.x.rightCols(9);
  const MatrixXd centered = w.rowwise() - w.colwise().mean();
  const MatrixXd cov = centered.transpose() * centered / double(spec.n - 1);
  EXPECT_LE((cov - sigma).cwiseAbs().maxCoeff(), 0.02);
}

TEST(Designs, ReplicationsAreIndependentlyReproducible) {
  DesignSpec spec;
  spec.n = 50;
  spec.p = 10;
  spec.seed = 12;
  const SimulatedSample a = simulate(spec, 5);
  simulate(spec, 4);
  const SimulatedSample b = simulate(spec, 5);
  EXPECT_EQ(a.y, b.y);
  EXPECT_NE(a.y, simulate(spec, 6).y);
}

TEST(Designs, RangeMappingAndSplit) {
  DesignSpec spec;
  spec.u_set = {1.0, 1.75, 2.5};
  spec.j_set = {2, 4};
  spec.p = 10;
  const auto m = spec.mapped_u();
  EXPECT_DOUBLE_EQ(m[0], 0.0);
  EXPECT_DOUBLE_EQ(m[1], 0.5);
  EXPECT_DOUBLE_EQ(m[2], 1.0);
  const SimulatedSample s = simulate(spec, 0);
  EXPECT_EQ(s.data.p_target(), 2u);
  EXPECT_EQ(s.data.p_controls(), 8u);
  EXPECT_EQ(s.data.d().col(1), s.x.col(3));
  EXPECT_EQ(s.data.d_names()[0], "x2");
  // Y_u on the unit scale reproduces 1{y ≤ u} on the raw scale.
  const VectorXd yu = functional_response(s.data, m[1], s.thresholds);
  EXPECT_EQ(yu, (s.y.array() <= 1.75).cast<double>().matrix());
  DesignSpec d2;
  d2.design = DesignId::D2;
  d2.u_set = {-0.5, 0.5};
  EXPECT_DOUBLE_EQ(d2.mapped_u()[1], 1.0);
}

TEST(Designs, Validation) {
  DesignSpec spec;
  spec.n = 5;
  EXPECT_THROW(spec.validate(), Error);
  spec = DesignSpec{};
  spec.p = 7;
  EXPECT_THROW(spec.validate(), Error);
  spec = DesignSpec{};
  spec.j_set = {300};
  EXPECT_THROW(spec.validate(), Error);
  spec = DesignSpec{};
  spec.u_set = {3.0};
  EXPECT_THROW(spec.validate(), Error);
}

namespace {

ExperimentConfig small_experiment() {
  ExperimentConfig cfg;
  cfg.design.n = 200;
  cfg.design.p = 40;
  cfg.design.u_set = {1.0, 1.5, 2.0};
  cfg.design.j_set = {1, 2};
  cfg.design.seed = 2024;
  cfg.reps = 12;
  cfg.bootstrap.b = 300;
  return cfg;
}

}  // namespace

TEST(Experiment, ContainmentAuditAndComparators) {
  const ExperimentConfig cfg = small_experiment();
  const RejectionReport report = run_rejection_experiment(cfg);
  EXPECT_EQ(report.requested, 12u);
  EXPECT_EQ(report.rows.size(), 8u);
  const double z = normal_upper_quantile(0.025);
  const double sqrt_n = std::sqrt(200.0);
  for (const auto& rec : report.log) {
    ASSERT_TRUE(rec.ok) << rec.error;
    ASSERT_EQ(rec.truth.size(), 6u);
    const MethodOutcome* mb = nullptr;
    const MethodOutcome* bf = nullptr;
    for (const auto& o : rec.outcomes) {
      bool any = false;
      for (std::size_t c = 0; c < rec.truth.size(); ++c) {
        const double t = std::abs(o.theta_check[c] - rec.truth[c]) * sqrt_n / o.sigma_hat[c];
        EXPECT_EQ(o.pointwise_reject[c], t > z);
        // Event containment at the method's critical value.
        if (t > o.critical) EXPECT_TRUE(o.uniform_reject);
        any = any || t > o.critical;
      }
      EXPECT_EQ(o.uniform_reject, any);
      if (o.method == McMethod::NaiveMB) mb = &o;
      if (o.method == McMethod::NaiveBF) bf = &o;
    }
    ASSERT_TRUE(mb != nullptr && bf != nullptr);
    EXPECT_EQ(bf->critical, bonferroni_critical(0.05, 6));
    EXPECT_EQ(bf->theta_check, mb->theta_check);
    if (mb->critical <= bf->critical) EXPECT_TRUE(!bf->uniform_reject || mb->uniform_reject);
  }
  const RejectionReport again = summarize(cfg, report.log);
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    const ReportRow& row = report.rows[r];
    EXPECT_EQ(row.frequency, again.rows[r].frequency);
    EXPECT_GE(row.frequency, 0.0);
    EXPECT_LE(row.frequency, 1.0);
    EXPECT_DOUBLE_EQ(row.mc_se, std::sqrt(row.frequency * (1 - row.frequency) / row.reps));
  }
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
  ExperimentConfig a = small_experiment();
  a.reps = 6;
  ExperimentConfig b = a;
  b.threads = 4;
  std::ostringstream sa, sb;
  write_report_json(sa, run_rejection_experiment(a), a);
  write_report_json(sb, run_rejection_experiment(b), b);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Experiment, SingleReplicationSmoke) {
  ExperimentConfig cfg = small_experiment();
  cfg.reps = 1;
  cfg.methods = {McMethod::ProposedOS};
  const RejectionReport report = run_rejection_experiment(cfg);
  ASSERT_EQ(report.rows.size(), 2u);
  EXPECT_EQ(report.rows[0].reps, 1u);
  std::ostringstream csv;
  write_report_csv(csv, report);
  EXPECT_EQ(csv.str().substr(0, csv.str().find('\n')), "method,scope,frequency,reps,mc_se,failures");
  EXPECT_EQ(report.row(McMethod::ProposedOS, "uniform").scope, "uniform");
}

TEST(Experiment, Validation) {
  ExperimentConfig cfg = small_experiment();
  cfg.reps = 0;
  EXPECT_THROW(run_rejection_experiment(cfg), Error);
  cfg = small_experiment();
  cfg.methods.clear();
  EXPECT_THROW(run_rejection_experiment(cfg), Error);
  EXPECT_EQ(mc_method_from_string("naive-bf"), McMethod::NaiveBF);
  EXPECT_THROW(mc_method_from_string("x"), Error);
}
