#include "pdm/catalog.hpp"
#include "pdm/families.hpp"
#include "pdm/verify.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace pdm;

namespace {

const PhysicalSetup kSetup{1.0, 1.0};

void BM_Parse(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(parse("m0*sech(w*x)^2 * (1 + A*exp(-x^2)) / (1 + x^2)"));
}
BENCHMARK(BM_Parse);

void BM_SecondDerivativeSymbolic(benchmark::State& state) {
    const Expr m = parse("sech(1.2*x)^2 * (1 + 0.5*exp(-x^2))");
    for (auto _ : state) benchmark::DoNotOptimize(differentiate(ln(m), 2));
}
BENCHMARK(BM_SecondDerivativeSymbolic);

void BM_Sample(benchmark::State& state) {
    const Grid g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
    const Expr e = differentiate(ln(parse("sech(1.2*x)^2")), 2);
    for (auto _ : state) benchmark::DoNotOptimize(sample(e, g));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sample)->Arg(1001)->Arg(4001)->Arg(16001);

void BM_CumulativeIntegral(benchmark::State& state) {
    const Grid g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
    const Samples s = Samples::generate(g, [](double x) { return std::cos(x); });
    for (auto _ : state) benchmark::DoNotOptimize(cumulative_integral(s, 0));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CumulativeIntegral)->Arg(1001)->Arg(4001)->Arg(16001);

void BM_DerivativeFd(benchmark::State& state) {
    const Grid g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
    const Samples s = Samples::generate(g, [](double x) { return std::sin(x); });
    for (auto _ : state) benchmark::DoNotOptimize(derivative_fd(s, 2));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_DerivativeFd)->Arg(4001);

// one per family, on the gaussian-bump mass
void BM_Build(benchmark::State& state) {
    const Expr m = find_catalog_entry("gauss")->bound();
    const Expr f4 = parse("1 + 0.5*tanh(x)^2");
    const FamilySpec specs[] = {family::Case1{0.5, 1.0},
                                family::Case2{1.0, 0.0},
                                family::Case3{1.0, Branch::Plus},
                                family::Theorem4{f4, Branch::Plus, 1.0, std::nullopt},
                                family::Case4a{1.0},
                                family::Case4b{1.0},
                                family::Theorem5{parse("1"), Branch::Minus, 1.0},
                                family::Theorem6{parse("tanh(x)"), 1.0},
                                family::Theorem7{parse("2 + tanh(x)"), parse("1 + 0.2*exp(-x^2)"), 1.0, 0.0}};
    const FamilySpec& spec = specs[state.range(0)];
    const Grid g(-4.0, 4.0, 4001);
    state.SetLabel(family_name(spec));
    for (auto _ : state) benchmark::DoNotOptimize(build(spec, m, 1.0, kSetup, g));
}
BENCHMARK(BM_Build)->DenseRange(0, 8);

void BM_VerifyBundle(benchmark::State& state) {
    const Grid g(-4.0, 4.0, static_cast<std::size_t>(state.range(0)));
    const SolutionBundle b = build(family::Case1{0.5, 1.0}, find_catalog_entry("sech2")->bound({{"w", 1.2}}), 1.0,
                                   kSetup, g);
    for (auto _ : state) benchmark::DoNotOptimize(verify_bundle(b, Tolerances{}));
}
BENCHMARK(BM_VerifyBundle)->Arg(1001)->Arg(4001);

void BM_Sweep(benchmark::State& state) {
    const Grid g(-4.0, 4.0, 4001);
    std::vector<SweepCase> cases;
    for (double beta : {0.25, 0.5, 1.0})
        for (const auto& e : mass_catalog()) cases.push_back({family::Case1{beta, 1.0}, e.bound(), kSetup});
    for (auto _ : state) benchmark::DoNotOptimize(sweep(cases, g, std::nullopt, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_Sweep)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
