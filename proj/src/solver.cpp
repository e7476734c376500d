#include "sparsekern/solver.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sparsekern/error.hpp"

namespace sparsekern {

std::string to_string(StepSchedule s) { return s == StepSchedule::Constant ? "constant" : "inv_sqrt"; }

StepSchedule step_schedule_from_string(const std::string& s) {
    if (s == "constant") return StepSchedule::Constant;
    if (s == "inv_sqrt") return StepSchedule::InvSqrt;
    throw ConfigError("unknown step schedule '" + s + "'");
}

void SolverConfig::validate() const {
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ConfigError("gamma must be a finite nonnegative number");
    if (!(eta_lambda > 0.0) || !(eta_mu > 0.0)) throw ConfigError("step sizes must be positive");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
    if (batch < 1) throw ConfigError("batch must be >= 1");
    if (!(mu_floor >= 0.0)) throw ConfigError("mu_floor must be nonnegative");
    if (!(mu_init >= 0.0)) throw ConfigError("mu_init must be nonnegative");
    sparsekern::validate(integrator);
}

void DualProblem::validate() const {
    samples.validate();
    kernel.validate();
    loss.validate();
    variant.validate(kernel);
    if (samples.dim() != kernel.dim()) throw ConfigError("sample dimension does not match the kernel box");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
}

DualEvaluator::DualEvaluator(DualProblem problem, Integrator integrator, compute::Exec exec)
    : problem_(std::move(problem)), integrator_(integrator), exec_(exec) {
    problem_.validate();
    sparsekern::validate(integrator_);
    if (const auto* q = std::get_if<QuadratureRule>(&integrator_)) {
        nodes_ = quadrature_nodes(problem_.kernel, problem_.variant, *q);
        design_ = compute::build_design(problem_.samples.X, nodes_, exec_);
    }
}

DualEvaluation DualEvaluator::evaluate(const Vector& lambda, const Vector& mu) const {
    std::mt19937_64 rng(0);
    return evaluate(lambda, mu, rng);
}

DualEvaluation DualEvaluator::evaluate(const Vector& lambda, const Vector& mu, std::mt19937_64& rng) const {
    const auto n = static_cast<Eigen::Index>(problem_.samples.size());
    if (lambda.size() != n || mu.size() != n) throw ConfigError("multiplier length does not match the samples");
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(mu[i] >= 0.0)) throw DomainError("mu must be nonnegative");
    if (is_quadrature(integrator_)) return evaluate_on(nodes_, design_, lambda, mu);
    const auto& mc = std::get<MonteCarloRule>(integrator_);
    const NodeSet nodes = monte_carlo_nodes(problem_.kernel, problem_.variant, mc.batch, rng);
    const auto design = compute::build_design(problem_.samples.X, nodes, exec_);
    return evaluate_on(nodes, design, lambda, mu);
}

DualEvaluation DualEvaluator::evaluate_on(const NodeSet& nodes, const compute::DesignMatrix& design,
                                          const Vector& lambda, const Vector& mu) const {
    const double gamma = problem_.gamma;
    const double thr = std::sqrt(2.0 * gamma);

    Vector abar;
    compute::field_at_nodes(design.phi, lambda, abar, exec_);
    // Only nodes where alpha_d is nonzero feed the back-projection.
    std::vector<Eigen::Index> active;
    std::vector<double> coef;
    double field_term = 0.0;
    for (Eigen::Index k = 0; k < abar.size(); ++k) {
        const double a = threshold_alpha(abar[k], thr);
        if (a == 0.0) continue;
        active.push_back(k);
        coef.push_back(nodes.weight[k] * a);
        field_term += nodes.weight[k] * (gamma - 0.5 * a * a);
    }

    DualEvaluation out;
    compute::back_project_active(design.phi, active,
                                 Eigen::Map<const Vector>(coef.data(), static_cast<Eigen::Index>(coef.size())),
                                 out.prediction, exec_);

    const auto& s = problem_.samples;
    const auto n = static_cast<Eigen::Index>(s.size());
    out.yhat.resize(n);
    out.d_lambda.resize(n);
    out.d_mu.resize(n);
    double sample_term = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double yh = inner_minimize(problem_.loss, lambda[i], mu[i], s.y[i]);
        const double c = loss_value(problem_.loss, yh, s.y[i]);
        out.yhat[i] = yh;
        out.d_lambda[i] = yh - out.prediction[i];
        out.d_mu[i] = c;
        sample_term += mu[i] * c + lambda[i] * yh;
        out.max_violation = std::max(out.max_violation, loss_value(problem_.loss, out.prediction[i], s.y[i]));
    }
    out.g = sample_term + field_term;
    return out;
}

double dual_objective(const DualProblem& problem, const Vector& lambda, const Vector& mu, const QuadratureRule& rule) {
    return DualEvaluator(problem, rule).evaluate(lambda, mu).g;
}

Supergradient supergradient(const DualProblem& problem, const Vector& lambda, const Vector& mu,
                            const Integrator& integrator, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    auto e = DualEvaluator(problem, integrator).evaluate(lambda, mu, rng);
    return {std::move(e.d_lambda), std::move(e.d_mu)};
}

namespace {

double step(double eta, StepSchedule s, std::size_t t) {
    return s == StepSchedule::Constant ? eta : eta / std::sqrt(static_cast<double>(t) + 1.0);
}

void record(DualState& st, const DualEvaluation& e, std::size_t t) {
    TracePoint p{t, e.g, e.d_lambda.norm(), e.max_violation};
    st.trace.push_back(p);
    if (!st.best || p.g > st.best->g) st.best = p;
}

}  // namespace

FitResult fit(const SampleSet& samples, const KernelSpec& kernel, const Loss& loss, const ProblemVariant& variant,
              const SolverConfig& config, compute::Exec exec) {
    config.validate();
    Integrator integrator = config.integrator;
    if (auto* mc = std::get_if<MonteCarloRule>(&integrator)) mc->batch = config.batch;
    DualEvaluator ev(DualProblem{samples, kernel, loss, variant, config.gamma}, integrator, exec);

    const auto n = static_cast<Eigen::Index>(samples.size());
    DualState st;
    st.lambda = Vector::Zero(n);
    st.mu = Vector::Constant(n, std::max(config.mu_init, config.mu_floor));
    std::mt19937_64 rng(config.seed);

    for (std::size_t t = 0; t < config.iterations; ++t) {
        const DualEvaluation e = ev.evaluate(st.lambda, st.mu, rng);
        if (!e.d_lambda.allFinite() || !e.d_mu.allFinite() || !std::isfinite(e.g)) {
            std::ostringstream msg;
            msg << "dual ascent diverged at iteration " << t << " (|lambda| = " << st.lambda.norm()
                << ", |mu| = " << st.mu.norm() << ")";
            throw NumericError(msg.str());
        }
        if (config.trace_every > 0 && t % config.trace_every == 0) record(st, e, t);
        st.lambda += step(config.eta_lambda, config.schedule, t) * e.d_lambda;
        st.mu = (st.mu + step(config.eta_mu, config.schedule, t) * e.d_mu).cwiseMax(config.mu_floor);
        st.t = t + 1;
        if (!st.lambda.allFinite() || !st.mu.allFinite()) {
            std::ostringstream msg;
            msg << "dual ascent diverged at iteration " << t << " (|lambda| = " << st.lambda.norm()
                << ", |mu| = " << st.mu.norm() << ")";
            throw NumericError(msg.str());
        }
    }
    if (config.trace_every > 0) record(st, ev.evaluate(st.lambda, st.mu, rng), st.t);

    AlphaField field(samples, st.lambda, config.gamma, kernel, variant);
    return {std::move(st), std::move(field)};
}

void write_trace_csv(const std::vector<TracePoint>& trace, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << "t,g_estimate,dlambda_norm,max_violation\n";
    f.precision(17);
    for (const auto& p : trace) f << p.t << ',' << p.g << ',' << p.dlambda_norm << ',' << p.max_violation << '\n';
}

}  // namespace sparsekern
