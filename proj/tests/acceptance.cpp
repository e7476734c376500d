// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Pass criterion ids (A1 A7 ...) as arguments to run a subset.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sparsekern/baselines.hpp"
#include "sparsekern/datasets.hpp"
#include "sparsekern/dual_field.hpp"
#include "sparsekern/experiments.hpp"
#include "sparsekern/kernels.hpp"
#include "sparsekern/losses.hpp"
#include "sparsekern/solver.hpp"

using namespace sparsekern;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

KernelSpec spec_1d(double lo, double hi, double wlo = 0.1, double whi = 1.0) {
    KernelSpec k;
    k.width_domain = {wlo, whi};
    k.center_domain = Box::uniform(1, lo, hi);
    return k;
}

SampleSet random_samples(std::size_t n, std::size_t dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::normal_distribution<double> g(0.0, 1.0);
    SampleSet s;
    s.box = Box::uniform(dim, 0.0, 3.0);
    s.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
    s.y.resize(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < s.X.rows(); ++i) {
        for (Eigen::Index k = 0; k < s.X.cols(); ++k) s.X(i, k) = u(rng);
        s.y[i] = g(rng);
    }
    return s;
}

DualProblem n4_problem() {
    DualProblem p;
    p.samples.box = Box::uniform(1, 0.0, 3.0);
    p.samples.X.resize(4, 1);
    p.samples.X << 0.4, 1.1, 1.8, 2.5;
    p.samples.y.resize(4);
    p.samples.y << 0.3, 0.9, 0.7, -0.2;
    p.kernel = spec_1d(0.0, 3.0, 0.2, 1.0);
    p.loss = {LossKind::QuadraticEps, 0.01, 1.0};
    p.variant = ProblemVariant::full();
    p.gamma = 0.2;
    return p;
}

Outcome a1_threshold_law() {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 2.0);
    std::size_t bad = 0, nonzero = 0;
    const int queries = 10000;
    for (int q = 0; q < queries; ++q) {
        SampleSet s = random_samples(5, 1, rng);
        Vector lambda(5);
        for (auto& l : lambda) l = g(rng);
        const double gamma = q % 10 == 0 ? 0.0 : 3.0 * u(rng);
        const AlphaField f(s, lambda, gamma, spec_1d(0.0, 3.0), ProblemVariant::full());
        const double z[] = {3.0 * u(rng)};
        const double w = 0.1 + 0.9 * u(rng);
        const double a = f.alpha_d(Point(z), w);
        const double abar = f.abar(Point(z), w);
        const double thr = std::sqrt(2.0 * gamma);
        if (a != 0.0) {
            ++nonzero;
            if (!(std::abs(a) > thr) || a != abar) ++bad;
        } else if (std::abs(abar) > thr) {
            ++bad;
        }
    }
    return {bad == 0, fmt("%zu violations in %d queries (%zu nonzero)", bad, queries, nonzero)};
}

Outcome a2_scalar_minimizer() {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> g(0.0, 2.0);
    std::size_t bad = 0;
    double worst = -1e300;
    for (int q = 0; q < 1000; ++q) {
        SampleSet s = random_samples(5, 1, rng);
        Vector lambda(5);
        for (auto& l : lambda) l = g(rng);
        const double gamma = 2.0 * u(rng);
        const AlphaField f(s, lambda, gamma, spec_1d(0.0, 3.0), ProblemVariant::full());
        const double z[] = {3.0 * u(rng)};
        const double w = 0.1 + 0.9 * u(rng);
        const double abar = f.abar(Point(z), w);
        const auto F = [&](double a) { return 0.5 * a * a + (a != 0.0 ? gamma : 0.0) - abar * a; };
        const double span = 2.0 * std::abs(abar) + 1.0;
        const double ref = oracle::grid_min(F, -span, span, 20000, {0.0});
        const double got = F(f.alpha_d(Point(z), w));
        worst = std::max(worst, got - ref);
        if (got > ref + 1e-9) ++bad;
    }
    return {bad == 0, fmt("%zu violations in 1000 cases, max F - gridmin = %.3g", bad, worst)};
}

Outcome a3_inner_minimizers() {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 4000;
    std::size_t bad = 0, cases = 0;
    const LossKind kinds[] = {LossKind::QuadraticEps, LossKind::AbsoluteEps, LossKind::HingeEps};
    for (int q = 0; q < 10000; ++q) {
        const LossKind kind = kinds[q % 3];
        const Loss l{kind, 0.01, 0.5 + std::abs(u(rng))};
        const double y = kind == LossKind::HingeEps ? (u(rng) > 0 ? 1.0 : -1.0) : 3.0 * u(rng);
        const double lambda = 5.0 * u(rng);
        const double mu = q % 17 == 0 ? 0.0 : 3.0 * std::abs(u(rng));
        const double lo = y - l.clamp_radius, hi = y + l.clamp_radius;
        const auto f = [&](double v) { return inner_objective(l, lambda, mu, y, v); };
        const double got = inner_minimize(l, lambda, mu, y);
        const double lip = std::abs(lambda) + mu * (2.0 * l.clamp_radius + 1.0);
        const double res = (hi - lo) / n;
        ++cases;
        if (got < lo || got > hi || f(got) > oracle::grid_min(f, lo, hi, n) + lip * res) ++bad;
    }
    return {bad == 0, fmt("%zu violations in %zu cases", bad, cases)};
}

Outcome a4_supergradient_inequality() {
    const DualProblem p = n4_problem();
    const DualEvaluator ev(p, QuadratureRule{128, 32});
    std::mt19937_64 rng(404);
    std::normal_distribution<double> n(0.0, 3.0);
    std::size_t bad = 0;
    double min_slack = 1e300;
    for (int rep = 0; rep < 100; ++rep) {
        Vector l1(4), m1(4), l2(4), m2(4);
        // Half the pairs are close together, where the linear bound is tight.
        const double step = rep % 2 ? 1.0 : 1e-3;
        for (int i = 0; i < 4; ++i) {
            l1[i] = n(rng);
            m1[i] = std::abs(n(rng));
            l2[i] = l1[i] + step * n(rng);
            m2[i] = std::abs(m1[i] + step * n(rng));
        }
        const auto e1 = ev.evaluate(l1, m1);
        const double g2 = ev.evaluate(l2, m2).g;
        const double slack = e1.g + e1.d_lambda.dot(l2 - l1) + e1.d_mu.dot(m2 - m1) - g2;
        min_slack = std::min(min_slack, slack);
        if (slack < -1e-8) ++bad;
    }
    return {bad == 0, fmt("%zu violations in 100 pairs, min slack %.3g", bad, min_slack)};
}

Outcome a5_mc_unbiased() {
    const DualProblem p = n4_problem();
    Vector lambda(4), mu = Vector::Ones(4);
    lambda << 2.0, -1.5, 2.5, 1.0;
    const auto q = supergradient(p, lambda, mu, QuadratureRule{4096, 1024});
    const DualEvaluator ev(p, MonteCarloRule{500, 0});
    std::mt19937_64 rng(505);
    const int batches = 10000;
    Vector sum = Vector::Zero(4), sq = Vector::Zero(4);
    for (int b = 0; b < batches; ++b) {
        const auto e = ev.evaluate(lambda, mu, rng);
        sum += e.d_lambda;
        sq += e.d_lambda.cwiseProduct(e.d_lambda);
    }
    const Vector mean = sum / batches;
    const Vector var = (sq / batches - mean.cwiseProduct(mean)) * batches / (batches - 1.0);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) worst = std::max(worst, std::abs(mean[i] - q.d_lambda[i]) / std::sqrt(var[i] / batches));
    return {worst <= 3.0, fmt("max |mean - quadrature| = %.2f standard errors over 4 components", worst)};
}

Outcome a6_bump_convergence() {
    const KernelSpec k = spec_1d(0.0, 3.0, 0.1, 1.0);
    DiscreteModel m;
    m.terms.push_back({1.3, Vector::Constant(1, 1.0), 0.4});
    m.terms.push_back({-0.7, Vector::Constant(1, 2.0), 0.6});
    std::vector<std::vector<double>> err;
    for (int mm : {4, 8, 16, 32}) {
        const BumpField b(m, mm, k, ProblemVariant::full());
        std::vector<double> e;
        for (int j = 0; j < 10; ++j) {
            const double x[] = {0.15 + 0.3 * j};
            e.push_back(std::abs(b.integrate(Point(x)) - predict_discrete(m, Point(x))));
        }
        err.push_back(e);
    }
    std::size_t bad = 0;
    for (std::size_t j = 0; j < 10; ++j)
        for (std::size_t r = 1; r < err.size(); ++r)
            if (!(err[r][j] < err[r - 1][j])) ++bad;
    double e4 = 0.0, e32 = 0.0;
    for (std::size_t j = 0; j < 10; ++j) {
        e4 = std::max(e4, err[0][j]);
        e32 = std::max(e32, err[3][j]);
    }
    return {bad == 0, fmt("%zu non-decreasing steps at 10 probes; max error m=4 %.3g, m=32 %.3g", bad, e4, e32)};
}

Outcome a7_gradients() {
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t bad = 0;
    double worst = 0.0;
    for (int q = 0; q < 1000; ++q) {
        const std::size_t dim = 1 + q % 3;
        KernelSpec k;
        k.width_domain = {0.2, 1.0};
        k.center_domain = Box::uniform(dim, 0.0, 1.0);
        std::vector<double> x(dim), z(dim);
        for (auto& v : x) v = u(rng);
        for (auto& v : z) v = u(rng);
        const double w = 0.2 + 0.8 * u(rng);
        const auto g = kernels::grad(k, Point(x), Point(z), w);
        std::vector<double> zw = z;
        zw.push_back(w);
        const auto fd = oracle::fd_gradient(
            [&](const std::vector<double>& p) {
                return oracle::gauss(x, std::vector<double>(p.begin(), p.end() - 1), p.back());
            },
            zw);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j < dim; ++j) {
            num += std::pow(g.dz[static_cast<Eigen::Index>(j)] - fd[j], 2);
            den += fd[j] * fd[j];
        }
        num += std::pow(g.dw - fd[dim], 2);
        den += fd[dim] * fd[dim];
        const double rel = std::sqrt(num) / std::max(std::sqrt(den), 1e-2);
        worst = std::max(worst, rel);
        if (rel > 1e-6) ++bad;
    }
    return {bad == 0, fmt("%zu of 1000 above 1e-6, worst relative error %.3g", bad, worst)};
}

Outcome a8_komp_oracle() {
    std::mt19937_64 rng(808);
    std::size_t bad = 0, steps = 0, index_diff = 0;
    for (int inst = 0; inst < 60; ++inst) {
        const std::size_t n = 2 + static_cast<std::size_t>(inst) % 9;
        const SampleSet s = random_samples(n, 1, rng);
        const double w = 0.25;
        const auto r = komp_fit(s, spec_1d(0.0, 3.0, 0.1, 1.0), w, {KompKernelCount{1}});
        const RowMatrix K = oracle::gram(s.X, s.X, w);
        std::vector<std::size_t> cols(n);
        for (std::size_t i = 0; i < n; ++i) cols[i] = i;
        for (const auto& step : r.path) {
            ++steps;
            const std::size_t pick = oracle::best_removal(K, s.y, cols);
            const auto it = std::find(cols.begin(), cols.end(), step.removed);
            if (it == cols.end()) {
                ++bad;
                break;
            }
            std::vector<std::size_t> best_set = cols, ours = cols;
            best_set.erase(best_set.begin() + static_cast<std::ptrdiff_t>(pick));
            ours.erase(ours.begin() + (it - cols.begin()));
            const double e_best = oracle::ls_mse(K, s.y, best_set);
            const double e_ours = oracle::ls_mse(K, s.y, ours);
            if (cols[pick] != step.removed) ++index_diff;
            // A different index only counts as a mismatch if it is not an exact tie.
            if (e_ours > e_best * (1.0 + 1e-9) + 1e-15) ++bad;
            cols = ours;
        }
    }
    return {bad == 0, fmt("%zu mismatches in %zu greedy steps (%zu index differences on ties)", bad, steps, index_diff)};
}

struct Remark1Cache {
    std::vector<experiments::Remark1Rep> reps;
    bool done = false;
    const std::vector<experiments::Remark1Rep>& get() {
        if (!done) {
            reps = experiments::remark1({});
            done = true;
        }
        return reps;
    }
} remark1_cache;

Outcome a9_remark1() {
    const auto& reps = remark1_cache.get();
    bool ok = true;
    std::size_t max_k = 0, min_k = 1000;
    double ce = 0.0, tm = 0.0;
    long ridge_min = 1000000;
    for (const auto& r : reps) {
        ok = ok && r.kernel_count == 1 && r.center_error <= 0.05 && r.test_mse < 1e-3 &&
             (r.ridge_nonzero < 0 || r.ridge_nonzero >= 3);
        max_k = std::max(max_k, r.kernel_count);
        min_k = std::min(min_k, r.kernel_count);
        ce = std::max(ce, r.center_error);
        tm = std::max(tm, r.test_mse);
        ridge_min = std::min(ridge_min, r.ridge_nonzero < 0 ? 1000000L : r.ridge_nonzero);
    }
    return {ok, fmt("%zu reps: kernels %zu..%zu, max center error %.4f, max test MSE %.3g, ridge needs >= %ld nonzeros",
                    reps.size(), min_k, max_k, ce, tm, ridge_min)};
}

Outcome a10_duality_gap() {
    const auto& reps = remark1_cache.get();
    bool ok = true;
    double gap = -1e300, viol = 0.0;
    for (const auto& r : reps) {
        ok = ok && r.gap <= 1e-2 && r.max_violation <= 1e-3;
        gap = std::max(gap, r.gap);
        viol = std::max(viol, r.max_violation);
    }
    return {ok, fmt("max primal - dual %.4g, max constraint violation %.3g", gap, viol)};
}

Outcome a11_grid() {
    const auto reps = experiments::grid_vs_pii2({});
    double ours = 0.0;
    std::vector<double> ridge(experiments::kGridWidths.size(), 0.0);
    for (const auto& r : reps) {
        ours += r.pii2_mse / static_cast<double>(reps.size());
        for (std::size_t k = 0; k < ridge.size(); ++k) ridge[k] += r.ridge_mse[k] / static_cast<double>(reps.size());
    }
    const auto best = std::min_element(ridge.begin(), ridge.end());
    const double w = experiments::kGridWidths[static_cast<std::size_t>(best - ridge.begin())];
    const double ratio = ours / *best;
    return {ratio <= 1.5, fmt("%zu reps: mean test MSE %.5f vs best grid %.5f (w = %.1f), ratio %.3f", reps.size(), ours,
                              *best, w, ratio)};
}

Outcome a12_komp() {
    const auto reps = experiments::komp_sparsity({});
    std::size_t sparser = 0;
    double ours = 0.0, komp = 0.0;
    for (const auto& r : reps) {
        sparser += r.sparser() ? 1 : 0;
        ours += static_cast<double>(r.ours_kernels) / static_cast<double>(reps.size());
        komp += static_cast<double>(r.komp_kernels) / static_cast<double>(reps.size());
    }
    const double frac = static_cast<double>(sparser) / static_cast<double>(reps.size());
    return {frac >= 0.9, fmt("strictly sparser in %zu/%zu (%.0f%%), mean kernels %.2f vs %.2f", sparser, reps.size(),
                             100.0 * frac, ours, komp)};
}

Outcome a13_stability() {
    const auto rows = experiments::sample_stability({});
    const std::vector<std::size_t> sizes = {51, 101, 201};
    std::vector<double> kc, m, km;
    for (std::size_t n : sizes) {
        double a = 0.0, b = 0.0, c = 0.0, cnt = 0.0;
        for (const auto& r : rows)
            if (r.n == n) {
                a += static_cast<double>(r.kernel_count);
                b += r.test_mse;
                c += r.komp_test_mse;
                cnt += 1.0;
            }
        kc.push_back(a / cnt);
        m.push_back(b / cnt);
        km.push_back(c / cnt);
    }
    const double kmin = *std::min_element(kc.begin(), kc.end()), kmax = *std::max_element(kc.begin(), kc.end());
    const double mmin = *std::min_element(m.begin(), m.end()), mmax = *std::max_element(m.begin(), m.end());
    const double count_var = kmin > 0.0 ? (kmax - kmin) / kmin : INFINITY;
    const double mse_ratio = mmin > 0.0 ? mmax / mmin : INFINITY;
    const bool komp_up = km[0] < km[1] && km[1] < km[2];
    const bool ok = count_var <= 0.2 && mse_ratio <= 2.0 && komp_up;
    return {ok, fmt("kernels %.1f/%.1f/%.1f (spread %.0f%%), test MSE %.4f/%.4f/%.4f (ratio %.2f), "
                    "KOMP MSE %.4f/%.4f/%.4f (%s)",
                    kc[0], kc[1], kc[2], 100.0 * count_var, m[0], m[1], m[2], mse_ratio, km[0], km[1], km[2],
                    komp_up ? "increasing" : "not increasing")};
}

Outcome a14_gamma_monotone() {
    datasets::MixedGaussOptions gen;
    gen.n = 100;
    const auto [train, truth] = datasets::gen_mixed_gauss(gen, 1);
    const auto counts = experiments::gamma_sweep(train, {10.0, 1e2, 1e3, 1e4});
    bool ok = true;
    for (std::size_t k = 1; k < counts.size(); ++k) ok = ok && counts[k] <= counts[k - 1];
    return {ok, fmt("kernel counts %zu/%zu/%zu/%zu for gamma 1e1..1e4", counts[0], counts[1], counts[2], counts[3])};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"A1", a1_threshold_law},     {"A2", a2_scalar_minimizer}, {"A3", a3_inner_minimizers},
        {"A4", a4_supergradient_inequality}, {"A5", a5_mc_unbiased}, {"A6", a6_bump_convergence},
        {"A7", a7_gradients},         {"A8", a8_komp_oracle},      {"A9", a9_remark1},
        {"A10", a10_duality_gap},     {"A11", a11_grid},           {"A12", a12_komp},
        {"A13", a13_stability},       {"A14", a14_gamma_monotone},
    };
    std::set<std::string> only(argv + 1, argv + argc);
    int failures = 0;
    for (const auto& [id, run] : criteria) {
        if (!only.empty() && !only.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("%-4s %s  %s  [%.1fs]\n", id.c_str(), o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
