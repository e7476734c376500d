#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracles.hpp"
#include "sparsekern/baselines.hpp"
#include "sparsekern/datasets.hpp"
#include "sparsekern/error.hpp"

using namespace sparsekern;

namespace {

KernelSpec spec_for(const SampleSet& s) {
    KernelSpec k;
    k.width_domain = {0.05, 2.0};
    k.center_domain = s.box;
    return k;
}

SampleSet random_set(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    std::normal_distribution<double> g(0.0, 1.0);
    SampleSet s;
    s.box = Box::uniform(1, 0.0, 3.0);
    s.X.resize(static_cast<Eigen::Index>(n), 1);
    s.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        s.X(static_cast<Eigen::Index>(i), 0) = u(rng);
        s.y[static_cast<Eigen::Index>(i)] = g(rng);
    }
    return s;
}

}  // namespace

TEST_CASE("ridge on one sample") {
    SampleSet s;
    s.box = Box::uniform(1, 0.0, 1.0);
    s.X = RowMatrix::Constant(1, 1, 0.3);
    s.y = Vector::Constant(1, 1.0);
    const auto m = ridge_fit(s, spec_for(s), 0.5, 0.25);
    REQUIRE(m.size() == 1);
    CHECK(m.terms[0].a == doctest::Approx(1.0 / 1.25));
    CHECK(m.terms[0].z[0] == 0.3);
}

TEST_CASE("ridge on zero labels is zero") {
    SampleSet s = random_set(12, 1);
    s.y.setZero();
    for (const auto& t : ridge_fit(s, spec_for(s), 0.4, 1e-3).terms) CHECK(t.a == 0.0);
}

TEST_CASE("ridge matches a direct solve") {
    const SampleSet s = random_set(25, 2);
    const double w = 0.3, reg = 1e-2;
    Eigen::MatrixXd A = oracle::gram(s.X, s.X, w);
    A.diagonal().array() += reg;
    const Vector ref = A.colPivHouseholderQr().solve(s.y);
    const auto m = ridge_fit(s, spec_for(s), w, reg);
    for (Eigen::Index i = 0; i < 25; ++i) CHECK(m.terms[static_cast<std::size_t>(i)].a == doctest::Approx(ref[i]).epsilon(1e-8));
}

TEST_CASE("ridge rejects a nonpositive regularizer") {
    const SampleSet s = random_set(5, 3);
    CHECK_THROWS_AS(ridge_fit(s, spec_for(s), 0.4, 0.0), ConfigError);
}

TEST_CASE("KOMP with a count of N keeps every kernel") {
    const SampleSet s = random_set(8, 4);
    const auto r = komp_fit(s, spec_for(s), 0.3, {KompKernelCount{8}});
    CHECK(r.survivors.size() == 8);
    CHECK(r.path.empty());
    CHECK(r.model.size() == 8);
}

TEST_CASE("KOMP with an unbounded error target removes everything") {
    const SampleSet s = random_set(8, 5);
    const auto r = komp_fit(s, spec_for(s), 0.3, {KompErrorTarget{std::numeric_limits<double>::infinity()}});
    CHECK(r.model.empty());
    CHECK(r.path.size() == 8);
    CHECK(r.path.back().mse == doctest::Approx(s.y.squaredNorm() / 8.0));
}

TEST_CASE("KOMP rejects a count above N") {
    const SampleSet s = random_set(5, 6);
    CHECK_THROWS_AS(komp_fit(s, spec_for(s), 0.3, {KompKernelCount{6}}), ConfigError);
    CHECK_THROWS_AS(komp_fit(s, spec_for(s), 0.3, {KompKernelCount{0}}), ConfigError);
}

TEST_CASE("every KOMP step is the exhaustive best removal") {
    for (std::uint64_t seed = 10; seed < 30; ++seed) {
        const std::size_t n = 4 + seed % 7;
        const SampleSet s = random_set(n, seed);
        const double w = 0.25;
        const auto r = komp_fit(s, spec_for(s), w, {KompKernelCount{1}, 0.0});
        const RowMatrix K = oracle::gram(s.X, s.X, w);
        std::vector<std::size_t> cols(n);
        for (std::size_t i = 0; i < n; ++i) cols[i] = i;
        REQUIRE(r.path.size() == n - 1);
        for (const auto& step : r.path) {
            const std::size_t pick = oracle::best_removal(K, s.y, cols, 1e-9);
            CHECK(step.removed == cols[pick]);
            cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(pick));
            CHECK(step.mse == doctest::Approx(oracle::ls_mse(K, s.y, cols)).epsilon(1e-6));
        }
    }
}

// Evenly spaced points with narrow kernels keep the Gram matrix well conditioned.
SampleSet spaced_set(std::uint64_t seed) {
    SampleSet s = random_set(30, seed);
    for (Eigen::Index i = 0; i < 30; ++i) s.X(i, 0) = 0.05 + 0.1 * static_cast<double>(i);
    return s;
}

TEST_CASE("KOMP training error grows along the path") {
    const SampleSet s = spaced_set(7);
    const auto r = komp_fit(s, spec_for(s), 0.1, {KompKernelCount{1}});
    for (std::size_t k = 1; k < r.path.size(); ++k) CHECK(r.path[k].mse >= r.path[k - 1].mse - 1e-12);
}

TEST_CASE("KOMP error target stops before exceeding the target") {
    const SampleSet s = spaced_set(8);
    const double target = 0.3 * s.y.squaredNorm() / 30.0;
    const auto r = komp_fit(s, spec_for(s), 0.1, {KompErrorTarget{target}});
    CHECK(mse(r.model, s.X, s.y) <= target);
    CHECK(r.model.size() < 30);
    const auto all = komp_fit(s, spec_for(s), 0.1, {KompKernelCount{1}});
    // The next step on the full path would cross the target.
    const std::size_t removed = r.path.size();
    if (removed < all.path.size()) CHECK(all.path[removed].mse > target);
}

TEST_CASE("KOMP on Remark-1 data keeps the sample nearest the center") {
    const SampleSet s = datasets::gen_remark1(20, 3);
    const auto r = komp_fit(s, spec_for(s), 1.0, {KompKernelCount{1}});
    REQUIRE(r.survivors.size() == 1);
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < s.size(); ++i)
        if (std::abs(s.X(static_cast<Eigen::Index>(i), 0) - 2.5) < std::abs(s.X(static_cast<Eigen::Index>(nearest), 0) - 2.5))
            nearest = i;
    CHECK(r.survivors[0] == nearest);
}
