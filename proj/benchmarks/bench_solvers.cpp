#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "chromalign/colorspace.hpp"
#include "chromalign/gromov.hpp"
#include "chromalign/kmeans.hpp"
#include "chromalign/lmap.hpp"
#include "chromalign/rsa.hpp"
#include "chromalign/sinkhorn.hpp"

using namespace chromalign;

namespace {

Eigen::MatrixXd gaussian(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return x;
}

Eigen::MatrixXd lab_cosine(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> c(0, 255);
  Eigen::MatrixXd x(n, 3);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto lab = srgb_to_lab({c(rng), c(rng), c(rng)});
    x.row(i) << lab.L, lab.a, lab.b;
  }
  return cosine_similarity(x);
}

void BM_Sinkhorn(benchmark::State& state) {
  const auto n = Eigen::Index(state.range(0));
  const auto x = gaussian(n, 3, 1), y = gaussian(n, 3, 2);
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) cost(i, j) = (x.row(i) - y.row(j)).squaredNorm();
  const Eigen::VectorXd u = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn(cost, u, u, {.epsilon = 0.05, .tol = 1e-9}).plan.data());
}
BENCHMARK(BM_Sinkhorn)->Arg(100)->Arg(250)->Arg(500)->Unit(benchmark::kMillisecond);

void BM_GromovWasserstein(benchmark::State& state) {
  const auto n = Eigen::Index(state.range(0));
  const auto c1 = lab_cosine(n, 3), c2 = lab_cosine(n, 4);
  GwOptions o;
  o.vertex_restarts = std::size_t(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(gromov_wasserstein(c1, c2, o).cost);
}
BENCHMARK(BM_GromovWasserstein)
    ->Args({50, 64})
    ->Args({100, 64})
    ->Args({250, 0})
    ->Args({250, 64})
    ->Unit(benchmark::kMillisecond);

void BM_KendallTauB(benchmark::State& state) {
  const auto n = std::size_t(state.range(0));
  const auto x = gaussian(Eigen::Index(n), 2, 5);
  const std::vector<double> a(x.col(0).data(), x.col(0).data() + n), b(x.col(1).data(), x.col(1).data() + n);
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau_b(a, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTauB)->RangeMultiplier(4)->Range(64, 1 << 18)->Complexity(benchmark::oNLogN);

void BM_Rsa(benchmark::State& state) {
  const auto n = Eigen::Index(state.range(0));
  const auto x = gaussian(n, 64, 6), y = gaussian(n, 3, 7);
  for (auto _ : state) benchmark::DoNotOptimize(rsa(x, y).score);
}
BENCHMARK(BM_Rsa)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_Lasso(benchmark::State& state) {
  const auto n = Eigen::Index(state.range(0)), d = Eigen::Index(state.range(1));
  const auto x = gaussian(n, d, 8);
  const Eigen::VectorXd y = x * gaussian(d, 1, 9).col(0) + gaussian(n, 1, 10).col(0);
  for (auto _ : state) benchmark::DoNotOptimize(lasso_coordinate_descent(x, y, {.alpha = 1e-2}).w.data());
}
BENCHMARK(BM_Lasso)->Args({200, 16})->Args({1000, 128})->Args({5000, 768})->Unit(benchmark::kMillisecond);

void BM_Lmap(benchmark::State& state) {
  const auto n = Eigen::Index(state.range(0));
  const auto x = gaussian(n, 64, 11);
  const Eigen::MatrixXd y = x * gaussian(64, 3, 12) + gaussian(n, 3, 13);
  for (auto _ : state) benchmark::DoNotOptimize(fit_lmap(x, y).score);
}
BENCHMARK(BM_Lmap)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_KMeans(benchmark::State& state) {
  const auto x = gaussian(Eigen::Index(state.range(0)), 3, 14);
  for (auto _ : state) benchmark::DoNotOptimize(kmeans(x, std::size_t(state.range(1)), {.seed = 1}).inertia);
}
BENCHMARK(BM_KMeans)->Args({1000, 10})->Args({10000, 22})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
