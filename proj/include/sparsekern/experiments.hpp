#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sparsekern/extraction.hpp"
#include "sparsekern/solver.hpp"

namespace sparsekern::experiments {

enum class Scale { Desk, Paper };
Scale scale_from_string(const std::string& s);

struct Options {
    Scale scale = Scale::Desk;
    std::uint64_t seed = 1;
    std::optional<std::size_t> repetitions;  ///< overrides the scale's count
    std::optional<std::filesystem::path> outdir;  ///< CSV output; nothing is written when empty
};

/// Independent stream seed derived from (seed, stream).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Everything needed to go from samples to a finite model.
struct Pipeline {
    KernelSpec kernel;
    Loss loss;
    ProblemVariant variant;
    SolverConfig solver;
    PeakConfig peaks;
    double refit_ridge = 1e-10;
};

struct PipelineResult {
    FitResult fit;
    DiscreteModel model;
};

PipelineResult run_pipeline(const SampleSet& train, const Pipeline& p);

// Presets shared by the harness, the CLI and the acceptance suite.
Pipeline remark1_pipeline();
Pipeline candidate_centers_pipeline(const SampleSet& train);  // widths free, centers at the samples
Pipeline fixed_width_pipeline(double w0);                    // sparsity vs KOMP
Pipeline full_mixed_pipeline();                              // centers and widths free on [0, 3]
Pipeline sin_squared_pipeline();                             // centers and widths free on [-5, 5]

inline const std::vector<double> kGridWidths = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
inline constexpr double kRidgeReg = 1e-3;

// ---------------------------------------------------------------------------
struct Remark1Rep {
    std::uint64_t seed = 0;
    std::size_t kernel_count = 0;
    double center = 0.0;
    double center_error = 0.0;
    double test_mse = 0.0;
    double primal = 0.0;
    double dual = 0.0;
    double gap = 0.0;
    double max_violation = 0.0;
    double ridge_best_mse = 0.0;
    long ridge_nonzero = -1;  ///< fewest |a| > 1e-3 among ridge fits with test MSE < 1e-3; -1 if none
};
std::vector<Remark1Rep> remark1(const Options& opt);

struct GridRep {
    std::uint64_t seed = 0;
    double pii2_mse = 0.0;
    std::size_t pii2_kernels = 0;
    std::vector<double> pii2_widths;
    std::vector<double> ridge_mse;  ///< one per kGridWidths entry
};
std::vector<GridRep> grid_vs_pii2(const Options& opt);

struct PiiFullRep {
    std::uint64_t seed = 0;
    std::size_t kernel_count = 0;
    std::vector<double> widths;
    double test_mse = 0.0;
};
std::vector<PiiFullRep> pii_full(const Options& opt);

struct KompRep {
    std::uint64_t seed = 0;
    std::size_t ours_kernels = 0;
    std::size_t komp_kernels = 0;
    double ours_train_mse = 0.0;
    double komp_train_mse = 0.0;
    double ours_test_mse = 0.0;
    double komp_test_mse = 0.0;
    bool sparser() const { return ours_kernels < komp_kernels; }
};
std::vector<KompRep> komp_sparsity(const Options& opt);

struct StabilityRep {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t kernel_count = 0;
    double test_mse = 0.0;
    double komp_width = 0.0;
    double komp_test_mse = 0.0;
};
std::vector<StabilityRep> sample_stability(const Options& opt);

/// Extracted kernel counts on one candidate-center instance for each gamma; the
/// dual step grows like gamma^(1/4) from the preset.
std::vector<std::size_t> gamma_sweep(const SampleSet& train, const std::vector<double>& gammas);

/// The ids accepted by run(); run() throws ConfigError for anything else.
const std::vector<std::string>& experiment_ids();
void run(const std::string& id, const Options& opt);

}  // namespace sparsekern::experiments
