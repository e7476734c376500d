// Serial reference vs OpenMP for the hot loops. Arg 0 selects the path:
// 0 = serial, 1 = parallel. Sizes follow the candidate-center setting (N = 100).

#include <random>

#include <benchmark/benchmark.h>

#include "sparsekern/datasets.hpp"
#include "sparsekern/parallel.hpp"
#include "sparsekern/quadrature.hpp"
#include "sparsekern/solver.hpp"

using namespace sparsekern;

namespace {

struct Setup {
    SampleSet samples;
    KernelSpec kernel;
    NodeSet nodes;
    compute::DesignMatrix design;
    Vector lambda;

    explicit Setup(std::size_t width_points) {
        datasets::MixedGaussOptions opt;
        opt.n = 100;
        samples = datasets::gen_mixed_gauss(opt, 1).first;
        kernel.center_domain = samples.box;
        nodes = quadrature_nodes(kernel, ProblemVariant::fixed_centers(samples.X), {1, width_points});
        design = compute::build_design(samples.X, nodes, compute::Exec::Serial);
        std::mt19937_64 rng(3);
        std::normal_distribution<double> n(0.0, 1.0);
        lambda.resize(samples.X.rows());
        for (auto& l : lambda) l = n(rng);
    }
};

const Setup& setup() {
    static const Setup s(256);
    return s;
}

compute::Exec exec_of(const benchmark::State& st) {
    return st.range(0) ? compute::Exec::Parallel : compute::Exec::Serial;
}

void BM_build_design(benchmark::State& st) {
    const auto& s = setup();
    for (auto _ : st) benchmark::DoNotOptimize(compute::build_design(s.samples.X, s.nodes, exec_of(st)));
}

void BM_field_at_nodes(benchmark::State& st) {
    const auto& s = setup();
    Vector out;
    for (auto _ : st) {
        compute::field_at_nodes(s.design.phi, s.lambda, out, exec_of(st));
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_back_project(benchmark::State& st) {
    const auto& s = setup();
    const Vector v = Vector::Ones(static_cast<Eigen::Index>(s.nodes.size()));
    Vector out;
    for (auto _ : st) {
        compute::back_project(s.design.phi_t, v, out, exec_of(st));
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_back_project_active(benchmark::State& st) {
    const auto& s = setup();
    std::vector<Eigen::Index> active;
    for (Eigen::Index n = 0; n < static_cast<Eigen::Index>(s.nodes.size()); n += 10) active.push_back(n);
    const Vector v = Vector::Ones(static_cast<Eigen::Index>(active.size()));
    Vector out;
    for (auto _ : st) {
        compute::back_project_active(s.design.phi, active, v, out, exec_of(st));
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_dual_step(benchmark::State& st) {
    const auto& s = setup();
    DualProblem p;
    p.samples = s.samples;
    p.kernel = s.kernel;
    p.loss = {LossKind::QuadraticEps, 0.01, 1.0};
    p.variant = ProblemVariant::fixed_centers(s.samples.X);
    p.gamma = 10.0;
    const DualEvaluator ev(p, QuadratureRule{1, 256}, exec_of(st));
    const Vector mu = Vector::Ones(s.lambda.size());
    for (auto _ : st) benchmark::DoNotOptimize(ev.evaluate(s.lambda, mu).g);
}

}  // namespace

BENCHMARK(BM_build_design)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_field_at_nodes)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_back_project)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_back_project_active)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dual_step)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

int main(int argc, char** argv) {
    compute::configure_threads();
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    benchmark::Shutdown();
    return 0;
}
