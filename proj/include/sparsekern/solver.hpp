#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "sparsekern/datasets.hpp"
#include "sparsekern/dual_field.hpp"
#include "sparsekern/kernels.hpp"
#include "sparsekern/losses.hpp"
#include "sparsekern/parallel.hpp"
#include "sparsekern/quadrature.hpp"
#include "sparsekern/variant.hpp"

namespace sparsekern {

enum class StepSchedule {
    Constant,  ///< eta
    InvSqrt,   ///< eta / sqrt(t + 1)
};

std::string to_string(StepSchedule s);
StepSchedule step_schedule_from_string(const std::string& s);

struct SolverConfig {
    double gamma = 1.0;
    double eta_lambda = 1e-3;
    double eta_mu = 0.1;
    std::size_t iterations = 5000;
    std::size_t batch = 1000;  ///< Monte-Carlo nodes per step
    std::uint64_t seed = 0;
    double mu_floor = 1e-8;
    double mu_init = 1.0;
    Integrator integrator = QuadratureRule{};
    std::size_t trace_every = 0;  ///< 0 disables the trace
    StepSchedule schedule = StepSchedule::Constant;

    /// Throws ConfigError when an invariant fails.
    void validate() const;
};

struct TracePoint {
    std::size_t t = 0;
    double g = 0.0;  ///< exact under quadrature, an estimate under Monte Carlo
    double dlambda_norm = 0.0;
    double max_violation = 0.0;
};

struct DualState {
    Vector lambda;
    Vector mu;
    std::size_t t = 0;
    std::vector<TracePoint> trace;
    std::optional<TracePoint> best;  ///< trace point with the largest g
};

/// The data of one sparse functional program.
struct DualProblem {
    SampleSet samples;
    KernelSpec kernel;
    Loss loss;
    ProblemVariant variant;
    double gamma = 0.0;

    void validate() const;
};

struct DualEvaluation {
    double g = 0.0;
    Vector d_lambda;
    Vector d_mu;
    Vector yhat;        ///< inner minimizers yhat_d
    Vector prediction;  ///< integral of alpha_d k(x_i, .)
    double max_violation = 0.0;  ///< max_i c(prediction_i, y_i), clipped at 0
};

/// Dual function and supergradient at (lambda, mu). Quadrature nodes and their
/// design matrix are built once; Monte-Carlo nodes are redrawn on every call.
class DualEvaluator {
public:
    DualEvaluator(DualProblem problem, Integrator integrator, compute::Exec exec = compute::Exec::Parallel);

    /// Throws DomainError on a negative or NaN mu entry, ConfigError on a size mismatch.
    DualEvaluation evaluate(const Vector& lambda, const Vector& mu, std::mt19937_64& rng) const;
    DualEvaluation evaluate(const Vector& lambda, const Vector& mu) const;

    const DualProblem& problem() const noexcept { return problem_; }

private:
    DualEvaluation evaluate_on(const NodeSet& nodes, const compute::DesignMatrix& design, const Vector& lambda,
                               const Vector& mu) const;

    DualProblem problem_;
    Integrator integrator_;
    compute::Exec exec_;
    NodeSet nodes_;
    compute::DesignMatrix design_;
};

double dual_objective(const DualProblem& problem, const Vector& lambda, const Vector& mu,
                      const QuadratureRule& rule = {});

struct Supergradient {
    Vector d_lambda;
    Vector d_mu;
};

Supergradient supergradient(const DualProblem& problem, const Vector& lambda, const Vector& mu,
                            const Integrator& integrator, std::uint64_t seed = 0);

struct FitResult {
    DualState state;
    AlphaField field;
};

/// Projected supergradient ascent from lambda = 0, mu = max(mu_init, mu_floor).
/// Throws NumericError when an iterate stops being finite.
FitResult fit(const SampleSet& samples, const KernelSpec& kernel, const Loss& loss, const ProblemVariant& variant,
              const SolverConfig& config, compute::Exec exec = compute::Exec::Parallel);

/// CSV columns t,g_estimate,dlambda_norm,max_violation.
void write_trace_csv(const std::vector<TracePoint>& trace, const std::filesystem::path& path);

}  // namespace sparsekern
