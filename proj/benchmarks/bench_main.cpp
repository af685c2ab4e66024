#include <benchmark/benchmark.h>

#include <vector>

#include "invdiv/bias.hpp"
#include "invdiv/conditions.hpp"
#include "invdiv/estimator.hpp"
#include "invdiv/model_spec.hpp"
#include "invdiv/sampling.hpp"
#include "invdiv/special.hpp"

using namespace invdiv;

namespace {

void BM_IgtSampler(benchmark::State& state, const char* g) {
  const IgtSampler s(IgtModel(2.0, 3.0, parse_g(g)));
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s(rng));
}
BENCHMARK_CAPTURE(BM_IgtSampler, gauss, "gauss");
BENCHMARK_CAPTURE(BM_IgtSampler, student5, "student:5");

void BM_GigSampler(benchmark::State& state) {
  const GigSampler s(GigModel(1.0, 1.5, 0.0));
  RngStream rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(s(rng));
}
BENCHMARK(BM_GigSampler);

void BM_MigtSampler(benchmark::State& state) {
  const MigtSampler s(MigtModel({1.0, 2.0, 1.5}, {1.0, 3.0, 2.0}, parse_g("student:5")));
  RngStream rng(1, 0);
  std::vector<double> x(3);
  for (auto _ : state) {
    s(rng, x);
    benchmark::DoNotOptimize(x.data());
  }
}
BENCHMARK(BM_MigtSampler);

void BM_BesselK(benchmark::State& state) {
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_k(0.75, x));
    x = x < 50 ? x * 1.01 : 0.1;
  }
}
BENCHMARK(BM_BesselK);

void BM_Solve(benchmark::State& state) {
  const ModelSampler igt(ModelSpec::parse("igt(theta=2,lambda=3)"));
  RngStream rng(2, 0);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = igt.draw(rng);
  const EstimationProblem p(x, 1, DivergenceKind::inverse, {3.0}, parse_f("log1p:1"));
  for (auto _ : state) benchmark::DoNotOptimize(solve(p).theta_hat);
}
BENCHMARK(BM_Solve)->Arg(100)->Arg(10000);

void BM_ConditionCheck(benchmark::State& state) {
  const auto g = parse_g("student:5");
  const auto f = parse_f("log1p:1");
  for (auto _ : state) benchmark::DoNotOptimize(check_theorem1(g, f).value);
}
BENCHMARK(BM_ConditionCheck)->Unit(benchmark::kMillisecond);

void BM_BiasQuadrature(benchmark::State& state) {
  const BiasQuery q(ModelSpec::parse("igt(theta=2,lambda=3,g=student:5)"), parse_f("log1p:1"));
  for (auto _ : state) benchmark::DoNotOptimize(bias_quadrature(q).bias);
}
BENCHMARK(BM_BiasQuadrature)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
