#include <doctest.h>

#include <filesystem>

#include "sparsekern/datasets.hpp"
#include "sparsekern/error.hpp"
#include "sparsekern/json_io.hpp"

using namespace sparsekern;
namespace fs = std::filesystem;

namespace {

// Round trip through text, so the numeric formatting is exercised too.
io::json through_text(const io::json& j) {
    return io::json::parse(j.dump());
}

DiscreteModel sample_model() {
    DiscreteModel m;
    Vector z(2);
    z << 0.1, 1.0 / 3.0;
    m.terms.push_back({1.25, z, 0.4});
    z << 2.0, -1e-300;
    m.terms.push_back({-3.0e-7, z, 0.99});
    return m;
}

bool same(const DiscreteModel& a, const DiscreteModel& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (a.terms[j].a != b.terms[j].a || a.terms[j].z != b.terms[j].z || a.terms[j].w != b.terms[j].w) return false;
    return true;
}

}  // namespace

TEST_CASE("model round trip is exact") {
    const DiscreteModel m = sample_model();
    CHECK(same(io::model_from_json(through_text(io::to_json(m))), m));
    CHECK(io::model_from_json(through_text(io::to_json(DiscreteModel{}))).empty());
}

TEST_CASE("kernel, loss and variant round trips") {
    KernelSpec k;
    k.width_domain = {0.05, 0.7};
    k.center_domain = Box::uniform(2, -1.0, 4.0);
    const KernelSpec k2 = io::kernel_from_json(through_text(io::to_json(k)));
    CHECK(k2.width_domain.lo == 0.05);
    CHECK(k2.width_domain.hi == 0.7);
    CHECK(k2.center_domain.axes[1].lo == -1.0);

    const Loss l{LossKind::HingeEps, 0.05, 3.0};
    const Loss l2 = io::loss_from_json(through_text(io::to_json(l)));
    CHECK(l2.kind == LossKind::HingeEps);
    CHECK(l2.epsilon == 0.05);
    CHECK(l2.clamp_radius == 3.0);

    CHECK(io::variant_from_json(through_text(io::to_json(ProblemVariant::fixed_width(0.3)))).width == 0.3);
    RowMatrix c(2, 1);
    c << 1.0, 2.0;
    const auto v = io::variant_from_json(through_text(io::to_json(ProblemVariant::fixed_centers(c))));
    CHECK(v.kind == ProblemVariant::Kind::FixedCenters);
    CHECK(v.centers == c);
}

TEST_CASE("solver config round trip and partial configs") {
    SolverConfig c;
    c.gamma = 7.5;
    c.eta_lambda = 2e-3;
    c.iterations = 123;
    c.integrator = MonteCarloRule{77, 5};
    c.schedule = StepSchedule::InvSqrt;
    const SolverConfig c2 = io::solver_config_from_json(through_text(io::to_json(c)));
    CHECK(c2.gamma == 7.5);
    CHECK(c2.eta_lambda == 2e-3);
    CHECK(c2.iterations == 123);
    CHECK(c2.schedule == StepSchedule::InvSqrt);
    REQUIRE(std::holds_alternative<MonteCarloRule>(c2.integrator));
    CHECK(std::get<MonteCarloRule>(c2.integrator).batch == 77);

    const SolverConfig partial = io::solver_config_from_json(io::json{{"gamma", 3.0}});
    CHECK(partial.gamma == 3.0);
    CHECK(partial.iterations == SolverConfig{}.iterations);
    CHECK_THROWS_AS(io::solver_config_from_json(io::json{{"gamma", "big"}}), ParseError);
}

TEST_CASE("field round trip reproduces abar") {
    const SampleSet s = datasets::gen_remark1(6, 2);
    KernelSpec k;
    k.center_domain = s.box;
    Vector lambda(6);
    lambda << 0.1, -0.2, 0.3, 0.4, -0.5, 0.6;
    const AlphaField f(s, lambda, 0.01, k, ProblemVariant::full());
    const AlphaField g = io::field_from_json(through_text(io::to_json(f)));
    const double z[] = {1.7};
    CHECK(g.abar(Point(z), 0.6) == f.abar(Point(z), 0.6));
    CHECK(g.threshold() == f.threshold());
}

TEST_CASE("ovo ensemble round trip") {
    OvoEnsemble e;
    e.classes = {1.0, 4.0};
    e.pairwise[{1.0, 4.0}] = sample_model();
    const io::json j = through_text(io::to_json(e));
    CHECK(io::is_ovo(j));
    CHECK_FALSE(io::is_ovo(io::to_json(sample_model())));
    const OvoEnsemble e2 = io::ovo_from_json(j);
    CHECK(e2.classes == e.classes);
    CHECK(same(e2.pairwise.at({1.0, 4.0}), sample_model()));
}

TEST_CASE("files and malformed input") {
    const auto p = fs::temp_directory_path() / "sparsekern_test_model.json";
    io::write_file(io::to_json(sample_model()), p);
    CHECK(same(io::model_from_json(io::read_file(p)), sample_model()));
    fs::remove(p);
    CHECK_THROWS_AS(io::read_file(p), ParseError);
    CHECK_THROWS_AS(io::model_from_json(io::json{{"terms", 3}}), ParseError);
    CHECK_THROWS_AS(io::model_from_json(io::json::object()), ParseError);
}
