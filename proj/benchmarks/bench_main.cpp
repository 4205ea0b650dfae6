#include <benchmark/benchmark.h>

#include <gdeconv/experiments.hpp>
#include <gdeconv/solver.hpp>
#include <gdeconv/spectral.hpp>

using namespace gdeconv;

namespace {

Instance instance(std::size_t n, std::size_t p) {
  return generate_instance(GraphSource::random(n, 0.3), ShiftKind::normalized_adjacency,
                           InstanceSpec{n / 2, p, 5, 0.1}, 17);
}

void BM_EigSym(benchmark::State& state) {
  const Instance inst = instance(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(eig_sym(inst.shift));
}
BENCHMARK(BM_EigSym)->Arg(20)->Arg(50)->Arg(100)->Arg(200);

void BM_KhatriRao(benchmark::State& state) {
  const Instance inst = instance(50, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(khatri_rao_z(inst.truth.y, inst.dec));
}
BENCHMARK(BM_KhatriRao)->Arg(2)->Arg(10)->Arg(20);

void BM_WeightedL1(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Instance inst = instance(n, 10);
  const Eigen::MatrixXd z = khatri_rao_z(inst.truth.y, inst.dec);
  const L1Problem prob{z, Eigen::VectorXd::Ones(z.rows())};
  for (auto _ : state) benchmark::DoNotOptimize(solve_weighted_l1(prob));
}
BENCHMARK(BM_WeightedL1)->Arg(20)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Reweighted(benchmark::State& state) {
  const Instance inst = instance(50, static_cast<std::size_t>(state.range(0)));
  const Eigen::MatrixXd z = khatri_rao_z(inst.truth.y, inst.dec);
  for (auto _ : state) benchmark::DoNotOptimize(reweighted_l1(z));
}
BENCHMARK(BM_Reweighted)->Arg(4)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
