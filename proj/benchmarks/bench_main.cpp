#include <benchmark/benchmark.h>

#include "dreg/bootstrap.hpp"
#include "dreg/designs.hpp"
#include "dreg/ortho_inference.hpp"
#include "dreg/penalized_logistic.hpp"
#include "dreg/rng.hpp"
#include "dreg/weighted_lasso.hpp"

using namespace dreg;

namespace {

MatrixXd normal_matrix(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols) {
  StreamEngine eng(seed, 0);
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = standard_normal(eng);
  return m;
}

SimulatedSample sample(std::size_t n, std::size_t p) {
  DesignSpec spec;
  spec.n = n;
  spec.p = p;
  spec.seed = 11;
  return simulate(spec, 0);
}

void BM_L1Logistic(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto p = static_cast<std::size_t>(state.range(1));
  const SimulatedSample s = sample(n, p);
  const VectorXd yu = functional_response(s.data, 0.5, s.thresholds);
  const MatrixXd z = full_design(s.data).values;
  PenaltyConfig cfg;
  cfg.n_n = static_cast<double>(n);
  const double lambda = penalty_level(n, p, cfg);
  const VectorXd l = initial_loadings_logistic(yu, z);
  for (auto _ : state) benchmark::DoNotOptimize(l1_logistic(yu, z, lambda, l, cfg));
}
BENCHMARK(BM_L1Logistic)->Args({300, 200})->Args({500, 2000})->Unit(benchmark::kMillisecond);

void BM_WeightedLasso(benchmark::State& state) {
  const auto n = state.range(0);
  const auto p = state.range(1);
  const MatrixXd x = normal_matrix(5, n, p);
  const VectorXd d = x.col(0) - 0.5 * x.col(1) + normal_matrix(6, n, 1).col(0);
  const VectorXd f2 = VectorXd::Constant(n, 0.2);
  const WeightVector w(f2);
  PenaltyConfig cfg;
  const double lambda = penalty_level_wlasso(static_cast<std::size_t>(n), 1,
                                             static_cast<std::size_t>(p), cfg);
  const VectorXd l = initial_loadings_wlasso(d, x, w);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_lasso(d, x, w, lambda, l, cfg));
}
BENCHMARK(BM_WeightedLasso)->Args({300, 200})->Args({500, 2000})->Unit(benchmark::kMillisecond);

void BM_BootstrapSupDraws(benchmark::State& state) {
  const Eigen::Index cells = state.range(0);
  const std::size_t b = static_cast<std::size_t>(state.range(1));
  const MatrixXd psi = normal_matrix(7, 500, cells);
  for (auto _ : state) benchmark::DoNotOptimize(bootstrap_sup_draws(psi, b, 3, 1));
}
BENCHMARK(BM_BootstrapSupDraws)->Args({1, 5000})->Args({10, 5000})->Args({50, 1000})
    ->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
