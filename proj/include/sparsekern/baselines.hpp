#pragma once

#include <variant>

#include "sparsekern/datasets.hpp"
#include "sparsekern/kernels.hpp"
#include "sparsekern/model.hpp"

namespace sparsekern {

/// Kernel ridge at the sample points: centers x_i, width w0, (K + reg I) a = y.
/// Throws ConfigError unless reg > 0.
DiscreteModel ridge_fit(const SampleSet& samples, const KernelSpec& kernel, double w0, double reg);

struct KompErrorTarget {
    double mse = 0.0;  ///< stop once the next removal would exceed this training MSE
};
struct KompKernelCount {
    std::size_t count = 1;
};

struct KompConfig {
    std::variant<KompErrorTarget, KompKernelCount> stop = KompKernelCount{};
    double ridge = 0.0;  ///< optional ridge on the survivor refits

    void validate() const;
};

struct KompStep {
    std::size_t removed = 0;  ///< sample index of the removed kernel
    double mse = 0.0;         ///< training MSE after the removal and refit
};

struct KompResult {
    DiscreteModel model;
    std::vector<std::size_t> survivors;  ///< sample indices of the kept kernels
    std::vector<KompStep> path;
};

/// Backward kernel matching pursuit with pre-fitting: start from a kernel at
/// every sample and repeatedly drop the kernel whose removal, after a least-squares
/// refit of the survivors, leaves the smallest training error (ties: lowest index).
/// Throws ConfigError when kernel_count exceeds N.
KompResult komp_fit(const SampleSet& samples, const KernelSpec& kernel, double w0, const KompConfig& cfg);

/// Training MSE of the least-squares fit on the kernels in `active`, plus the amplitudes.
/// With ridge = 0 a numerically singular system falls back to a tiny relative ridge.
double komp_refit(const RowMatrix& K, const Vector& y, const std::vector<std::size_t>& active, double ridge,
                  Vector* amplitudes = nullptr);

}  // namespace sparsekern
