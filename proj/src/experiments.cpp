#include "sparsekern/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "sparsekern/baselines.hpp"
#include "sparsekern/datasets.hpp"
#include "sparsekern/error.hpp"

namespace sparsekern::experiments {

Scale scale_from_string(const std::string& s) {
    if (s == "desk") return Scale::Desk;
    if (s == "paper") return Scale::Paper;
    throw ConfigError("unknown scale '" + s + "' (expected desk or paper)");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the pair
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

PipelineResult run_pipeline(const SampleSet& train, const Pipeline& p) {
    FitResult fit = sparsekern::fit(train, p.kernel, p.loss, p.variant, p.solver);
    DiscreteModel model = extract_model(fit.field, p.peaks, p.refit_ridge);
    return {std::move(fit), std::move(model)};
}

Pipeline remark1_pipeline() {
    Pipeline p;
    p.kernel.width_domain = {0.1, 1.0};
    p.kernel.center_domain = Box::uniform(1, 0.0, 5.0);
    p.loss = {LossKind::QuadraticEps, 1e-3, 0.1};
    p.variant = ProblemVariant::fixed_width(1.0);
    p.solver.gamma = 1.0;
    p.solver.eta_lambda = 0.3;
    p.solver.eta_mu = 3000.0;
    p.solver.iterations = 20000;
    p.solver.schedule = StepSchedule::InvSqrt;
    p.solver.integrator = QuadratureRule{1024, 1};
    return p;
}

Pipeline candidate_centers_pipeline(const SampleSet& train) {
    Pipeline p;
    p.kernel.width_domain = {0.1, 1.0};
    p.kernel.center_domain = train.box;
    p.loss = {LossKind::QuadraticEps, 0.01, 1.0};
    p.variant = ProblemVariant::fixed_centers(train.X);
    p.solver.gamma = 10.0;
    p.solver.eta_lambda = 2e-3;
    p.solver.eta_mu = 30.0;
    p.solver.iterations = 10000;
    p.solver.schedule = StepSchedule::InvSqrt;
    p.solver.integrator = QuadratureRule{1, 64};
    return p;
}

Pipeline fixed_width_pipeline(double w0) {
    Pipeline p;
    p.kernel.width_domain = {0.1, 1.0};
    p.kernel.center_domain = Box::uniform(1, 0.0, 3.0);
    p.loss = {LossKind::QuadraticEps, 0.01, 1.0};
    p.variant = ProblemVariant::fixed_width(w0);
    p.solver.gamma = 300.0;
    p.solver.eta_lambda = 0.1;
    p.solver.eta_mu = 30.0;
    p.solver.iterations = 20000;
    p.solver.schedule = StepSchedule::InvSqrt;
    p.solver.integrator = QuadratureRule{1024, 1};
    return p;
}

Pipeline full_mixed_pipeline() {
    Pipeline p;
    p.kernel.width_domain = {0.1, 1.0};
    p.kernel.center_domain = Box::uniform(1, 0.0, 3.0);
    p.loss = {LossKind::QuadraticEps, 0.01, 1.0};
    p.variant = ProblemVariant::full();
    p.solver.gamma = 30.0;
    p.solver.eta_lambda = 5e-4;
    p.solver.eta_mu = 30.0;
    p.solver.iterations = 3000;
    p.solver.integrator = QuadratureRule{256, 64};
    return p;
}

Pipeline sin_squared_pipeline() {
    Pipeline p;
    p.kernel.width_domain = {0.1, 1.0};
    p.kernel.center_domain = Box::uniform(1, -5.0, 5.0);
    p.loss = {LossKind::QuadraticEps, 0.01, 1.0};
    p.variant = ProblemVariant::full();
    p.solver.gamma = 2.0;
    p.solver.eta_lambda = 3e-3;
    p.solver.eta_mu = 30.0;
    p.solver.iterations = 3000;
    p.solver.integrator = QuadratureRule{256, 64};
    p.peaks.grid = 256;
    return p;
}

namespace {

std::size_t reps_for(const Options& opt, std::size_t desk, std::size_t paper) {
    if (opt.repetitions) return *opt.repetitions;
    return opt.scale == Scale::Desk ? desk : paper;
}

// Repetitions run concurrently; results land in their own slot so the
// aggregation order never depends on scheduling.
template <class Rep, class F>
std::vector<Rep> repeat(std::size_t reps, std::uint64_t seed, F&& body) {
    std::vector<Rep> out(reps);
    std::vector<std::exception_ptr> err(reps);
    const auto n = static_cast<long>(reps);
#pragma omp parallel for schedule(dynamic)
    for (long r = 0; r < n; ++r) {
        try {
            out[static_cast<std::size_t>(r)] = body(seed + static_cast<std::uint64_t>(r));
        } catch (...) {
            err[static_cast<std::size_t>(r)] = std::current_exception();
        }
    }
    for (auto& e : err)
        if (e) std::rethrow_exception(e);
    return out;
}

double mean(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::ofstream open_csv(const Options& opt, const std::string& name) {
    std::filesystem::create_directories(*opt.outdir);
    std::ofstream f(*opt.outdir / name);
    if (!f) throw ConfigError("cannot write " + (*opt.outdir / name).string());
    f.precision(10);
    return f;
}

template <class T>
std::map<T, std::size_t> histogram(const std::vector<T>& v) {
    std::map<T, std::size_t> h;
    for (const auto& x : v) ++h[x];
    return h;
}

void write_width_histogram(const Options& opt, const std::string& name, const std::vector<double>& widths, double lo,
                           double hi, std::size_t bins) {
    std::vector<std::size_t> count(bins, 0);
    for (double w : widths) {
        auto b = static_cast<std::size_t>((w - lo) / (hi - lo) * static_cast<double>(bins));
        ++count[std::min(b, bins - 1)];
    }
    auto f = open_csv(opt, name);
    f << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < bins; ++b)
        f << lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(bins) << ','
          << lo + (hi - lo) * static_cast<double>(b + 1) / static_cast<double>(bins) << ',' << count[b] << '\n';
}

void write_count_histogram(const Options& opt, const std::string& name, const std::vector<std::size_t>& counts) {
    auto f = open_csv(opt, name);
    f << "kernel_count,repetitions\n";
    for (const auto& [k, n] : histogram(counts)) f << k << ',' << n << '\n';
}

std::size_t count_above(const DiscreteModel& m, double tol) {
    std::size_t n = 0;
    for (const auto& t : m.terms)
        if (std::abs(t.a) > tol) ++n;
    return n;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<Remark1Rep> remark1(const Options& opt) {
    const std::size_t reps = reps_for(opt, 3, 10);
    const Pipeline pipe = remark1_pipeline();
    const auto out = repeat<Remark1Rep>(reps, opt.seed, [&](std::uint64_t seed) {
        Remark1Rep r;
        r.seed = seed;
        const SampleSet train = datasets::gen_remark1(20, seed);
        SampleSet test;
        test.box = train.box;
        const auto xs = linspace(0.0, 5.0, 501);
        test.X = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
        test.y = test.X.col(0).unaryExpr([](double x) { return datasets::remark1_signal(x); });

        const PipelineResult res = run_pipeline(train, pipe);
        r.kernel_count = res.model.size();
        if (!res.model.empty()) {
            r.center = res.model.terms[0].z[0];
            r.center_error = std::abs(r.center - 2.5);
        } else {
            r.center_error = 2.5;
        }
        r.test_mse = mse(res.model, test.X, test.y);

        // Duality gap and feasibility under the solver's own quadrature.
        DualEvaluator ev(DualProblem{train, pipe.kernel, pipe.loss, pipe.variant, pipe.solver.gamma},
                         pipe.solver.integrator);
        const auto e = ev.evaluate(res.fit.state.lambda, res.fit.state.mu);
        const NodeSet nodes = quadrature_nodes(pipe.kernel, pipe.variant, std::get<QuadratureRule>(pipe.solver.integrator));
        Vector alpha(static_cast<Eigen::Index>(nodes.size()));
        for (std::size_t n = 0; n < nodes.size(); ++n)
            alpha[static_cast<Eigen::Index>(n)] = threshold_alpha(
                res.fit.field.abar_unchecked(nodes.center(n), nodes.w[static_cast<Eigen::Index>(n)]),
                res.fit.field.threshold());
        r.primal = primal_objective(alpha, nodes, pipe.solver.gamma);
        r.dual = e.g;
        r.gap = r.primal - r.dual;
        r.max_violation = e.max_violation;

        r.ridge_best_mse = std::numeric_limits<double>::infinity();
        for (double reg : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8}) {
            const DiscreteModel rm = ridge_fit(train, pipe.kernel, 1.0, reg);
            const double m = mse(rm, test.X, test.y);
            r.ridge_best_mse = std::min(r.ridge_best_mse, m);
            if (m < 1e-3) {
                const auto nz = static_cast<long>(count_above(rm, 1e-3));
                if (r.ridge_nonzero < 0 || nz < r.ridge_nonzero) r.ridge_nonzero = nz;
            }
        }
        return r;
    });

    if (opt.outdir) {
        auto f = open_csv(opt, "remark1_reps.csv");
        f << "rep,seed,kernel_count,center,center_error,test_mse,primal,dual,gap,max_violation,ridge_best_mse,"
             "ridge_nonzero\n";
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto& r = out[i];
            f << i << ',' << r.seed << ',' << r.kernel_count << ',' << r.center << ',' << r.center_error << ','
              << r.test_mse << ',' << r.primal << ',' << r.dual << ',' << r.gap << ',' << r.max_violation << ','
              << r.ridge_best_mse << ',' << r.ridge_nonzero << '\n';
        }
        auto s = open_csv(opt, "remark1_summary.csv");
        std::vector<double> kc, ce, mse_v, gap;
        for (const auto& r : out) {
            kc.push_back(static_cast<double>(r.kernel_count));
            ce.push_back(r.center_error);
            mse_v.push_back(r.test_mse);
            gap.push_back(r.gap);
        }
        s << "repetitions,kernel_count_mean,center_error_max,test_mse_mean,gap_max\n";
        s << out.size() << ',' << mean(kc) << ',' << *std::max_element(ce.begin(), ce.end()) << ',' << mean(mse_v)
          << ',' << *std::max_element(gap.begin(), gap.end()) << '\n';
    }
    return out;
}

std::vector<GridRep> grid_vs_pii2(const Options& opt) {
    const std::size_t reps = reps_for(opt, 50, 1000);
    datasets::MixedGaussOptions gen;
    gen.n = 100;
    const auto out = repeat<GridRep>(reps, opt.seed, [&](std::uint64_t seed) {
        GridRep r;
        r.seed = seed;
        const auto [train, truth] = datasets::gen_mixed_gauss(gen, seed);
        const SampleSet test = datasets::sample_model(truth, gen.box, 1000, gen.noise_sd, derive_seed(seed, 1));
        const PipelineResult res = run_pipeline(train, candidate_centers_pipeline(train));
        r.pii2_mse = mse(res.model, test.X, test.y);
        r.pii2_kernels = res.model.size();
        for (const auto& t : res.model.terms) r.pii2_widths.push_back(t.w);
        KernelSpec k;
        k.center_domain = gen.box;
        for (double w : kGridWidths) r.ridge_mse.push_back(mse(ridge_fit(train, k, w, kRidgeReg), test.X, test.y));
        return r;
    });

    if (opt.outdir) {
        auto f = open_csv(opt, "grid_vs_pii2_reps.csv");
        f << "rep,seed,pii2_mse,pii2_kernels";
        for (double w : kGridWidths) f << ",ridge_mse_w" << w;
        f << '\n';
        for (std::size_t i = 0; i < out.size(); ++i) {
            f << i << ',' << out[i].seed << ',' << out[i].pii2_mse << ',' << out[i].pii2_kernels;
            for (double m : out[i].ridge_mse) f << ',' << m;
            f << '\n';
        }
        std::vector<double> pm;
        std::vector<double> widths;
        std::vector<std::size_t> counts;
        for (const auto& r : out) {
            pm.push_back(r.pii2_mse);
            widths.insert(widths.end(), r.pii2_widths.begin(), r.pii2_widths.end());
            counts.push_back(r.pii2_kernels);
        }
        auto s = open_csv(opt, "grid_vs_pii2_summary.csv");
        s << "w,ridge_mse_mean,ridge_mse_sd,pii2_mse_mean,pii2_mse_sd\n";
        for (std::size_t g = 0; g < kGridWidths.size(); ++g) {
            std::vector<double> rm;
            for (const auto& r : out) rm.push_back(r.ridge_mse[g]);
            s << kGridWidths[g] << ',' << mean(rm) << ',' << stddev(rm) << ',' << mean(pm) << ',' << stddev(pm) << '\n';
        }
        write_width_histogram(opt, "grid_vs_pii2_widths.csv", widths, 0.1, 1.0, 18);
        write_count_histogram(opt, "grid_vs_pii2_kernel_counts.csv", counts);
    }
    return out;
}

std::vector<PiiFullRep> pii_full(const Options& opt) {
    const std::size_t reps = reps_for(opt, 5, 1000);
    datasets::MixedGaussOptions gen;
    const Pipeline pipe = full_mixed_pipeline();
    const auto out = repeat<PiiFullRep>(reps, opt.seed, [&](std::uint64_t seed) {
        PiiFullRep r;
        r.seed = seed;
        const auto [train, truth] = datasets::gen_mixed_gauss(gen, seed);
        const SampleSet test = datasets::sample_model(truth, gen.box, 1000, gen.noise_sd, derive_seed(seed, 1));
        const PipelineResult res = run_pipeline(train, pipe);
        r.kernel_count = res.model.size();
        for (const auto& t : res.model.terms) r.widths.push_back(t.w);
        r.test_mse = mse(res.model, test.X, test.y);
        return r;
    });

    if (opt.outdir) {
        auto f = open_csv(opt, "pii_full_reps.csv");
        f << "rep,seed,kernel_count,test_mse\n";
        std::vector<double> widths, m;
        std::vector<std::size_t> counts;
        for (std::size_t i = 0; i < out.size(); ++i) {
            f << i << ',' << out[i].seed << ',' << out[i].kernel_count << ',' << out[i].test_mse << '\n';
            widths.insert(widths.end(), out[i].widths.begin(), out[i].widths.end());
            counts.push_back(out[i].kernel_count);
            m.push_back(out[i].test_mse);
        }
        std::vector<double> kc(counts.begin(), counts.end());
        auto s = open_csv(opt, "pii_full_summary.csv");
        s << "repetitions,kernel_count_mean,kernel_count_sd,test_mse_mean,test_mse_sd\n";
        s << out.size() << ',' << mean(kc) << ',' << stddev(kc) << ',' << mean(m) << ',' << stddev(m) << '\n';
        write_width_histogram(opt, "pii_full_widths.csv", widths, 0.1, 1.0, 18);
        write_count_histogram(opt, "pii_full_kernel_counts.csv", counts);
    }
    return out;
}

std::vector<KompRep> komp_sparsity(const Options& opt) {
    const std::size_t reps = reps_for(opt, 50, 1000);
    datasets::MixedGaussOptions gen;
    gen.m = 5;
    gen.n = 20;
    gen.w0 = 0.5;
    const Pipeline pipe = fixed_width_pipeline(gen.w0);
    const auto out = repeat<KompRep>(reps, opt.seed, [&](std::uint64_t seed) {
        KompRep r;
        r.seed = seed;
        const auto [train, truth] = datasets::gen_mixed_gauss(gen, seed);
        const SampleSet test = datasets::sample_model(truth, gen.box, 1000, gen.noise_sd, derive_seed(seed, 1));
        const PipelineResult res = run_pipeline(train, pipe);
        r.ours_kernels = res.model.size();
        r.ours_train_mse = mse(res.model, train.X, train.y);
        r.ours_test_mse = mse(res.model, test.X, test.y);
        KompConfig kc;
        kc.stop = KompErrorTarget{r.ours_train_mse};
        const KompResult komp = komp_fit(train, pipe.kernel, gen.w0, kc);
        r.komp_kernels = komp.model.size();
        r.komp_train_mse = mse(komp.model, train.X, train.y);
        r.komp_test_mse = mse(komp.model, test.X, test.y);
        return r;
    });

    if (opt.outdir) {
        auto f = open_csv(opt, "komp_sparsity_reps.csv");
        f << "rep,seed,ours_kernels,komp_kernels,ours_train_mse,komp_train_mse,ours_test_mse,komp_test_mse,sparser\n";
        std::size_t wins = 0;
        std::vector<double> ok, kk, om, km;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const auto& r = out[i];
            f << i << ',' << r.seed << ',' << r.ours_kernels << ',' << r.komp_kernels << ',' << r.ours_train_mse << ','
              << r.komp_train_mse << ',' << r.ours_test_mse << ',' << r.komp_test_mse << ',' << r.sparser() << '\n';
            wins += r.sparser();
            ok.push_back(static_cast<double>(r.ours_kernels));
            kk.push_back(static_cast<double>(r.komp_kernels));
            om.push_back(r.ours_test_mse);
            km.push_back(r.komp_test_mse);
        }
        auto s = open_csv(opt, "komp_sparsity_summary.csv");
        s << "repetitions,fraction_sparser,ours_kernels_mean,komp_kernels_mean,ours_test_mse_mean,komp_test_mse_mean\n";
        s << out.size() << ',' << static_cast<double>(wins) / static_cast<double>(out.size()) << ',' << mean(ok) << ','
          << mean(kk) << ',' << mean(om) << ',' << mean(km) << '\n';
    }
    return out;
}

std::vector<StabilityRep> sample_stability(const Options& opt) {
    const std::size_t reps = reps_for(opt, 1, 10);
    const std::vector<std::size_t> sizes = {51, 101, 201};
    const double noise_sd = datasets::MixedGaussOptions{}.noise_sd;
    const Pipeline pipe = sin_squared_pipeline();
    std::vector<StabilityRep> out;
    const auto per_rep = repeat<std::vector<StabilityRep>>(reps, opt.seed, [&](std::uint64_t seed) {
        std::vector<StabilityRep> rows;
        const SampleSet test = datasets::gen_sin_squared(1000, noise_sd, derive_seed(seed, 1), datasets::Sampling::Uniform);
        for (std::size_t n : sizes) {
            StabilityRep r;
            r.seed = seed;
            r.n = n;
            const SampleSet train = datasets::gen_sin_squared(n, noise_sd, derive_seed(seed, n));
            const PipelineResult res = run_pipeline(train, pipe);
            r.kernel_count = res.model.size();
            r.test_mse = mse(res.model, test.X, test.y);
            std::vector<double> widths;
            for (const auto& t : res.model.terms) widths.push_back(t.w);
            r.komp_width = widths.empty() ? 1.0 : median(widths);
            if (r.kernel_count > 0) {
                KompConfig kc;
                kc.stop = KompKernelCount{r.kernel_count};
                r.komp_test_mse = mse(komp_fit(train, pipe.kernel, r.komp_width, kc).model, test.X, test.y);
            } else {
                r.komp_test_mse = test.y.squaredNorm() / static_cast<double>(test.size());
            }
            rows.push_back(r);
        }
        return rows;
    });
    for (const auto& rows : per_rep) out.insert(out.end(), rows.begin(), rows.end());

    if (opt.outdir) {
        auto f = open_csv(opt, "sample_stability_reps.csv");
        f << "seed,n,kernel_count,test_mse,komp_width,komp_test_mse\n";
        for (const auto& r : out)
            f << r.seed << ',' << r.n << ',' << r.kernel_count << ',' << r.test_mse << ',' << r.komp_width << ','
              << r.komp_test_mse << '\n';
        auto s = open_csv(opt, "sample_stability_summary.csv");
        s << "n,kernel_count_mean,test_mse_mean,test_mse_sd,komp_test_mse_mean,komp_test_mse_sd\n";
        for (std::size_t n : sizes) {
            std::vector<double> kc, m, km;
            for (const auto& r : out)
                if (r.n == n) {
                    kc.push_back(static_cast<double>(r.kernel_count));
                    m.push_back(r.test_mse);
                    km.push_back(r.komp_test_mse);
                }
            s << n << ',' << mean(kc) << ',' << mean(m) << ',' << stddev(m) << ',' << mean(km) << ',' << stddev(km)
              << '\n';
        }
    }
    return out;
}

std::vector<std::size_t> gamma_sweep(const SampleSet& train, const std::vector<double>& gammas) {
    std::vector<std::size_t> counts;
    for (double g : gammas) {
        Pipeline p = candidate_centers_pipeline(train);
        // Larger gamma moves the dual optimum further out and tolerates larger steps.
        p.solver.eta_lambda *= std::pow(g / p.solver.gamma, 0.25);
        p.solver.gamma = g;
        counts.push_back(run_pipeline(train, p).model.size());
    }
    return counts;
}

const std::vector<std::string>& experiment_ids() {
    static const std::vector<std::string> ids = {"remark1", "grid_vs_pii2", "pii_full", "komp_sparsity",
                                                 "sample_stability"};
    return ids;
}

void run(const std::string& id, const Options& opt) {
    if (id == "remark1") remark1(opt);
    else if (id == "grid_vs_pii2") grid_vs_pii2(opt);
    else if (id == "pii_full") pii_full(opt);
    else if (id == "komp_sparsity") komp_sparsity(opt);
    else if (id == "sample_stability") sample_stability(opt);
    else throw ConfigError("unknown experiment '" + id + "'");
}

}  // namespace sparsekern::experiments
