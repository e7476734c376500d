#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "sparsekern/geometry.hpp"

namespace sparsekern {

struct DiscreteModel;

/// Observations x_i (rows of X), labels y_i and the domain box containing them.
struct SampleSet {
    RowMatrix X;
    Vector y;
    Box box;

    std::size_t size() const noexcept { return static_cast<std::size_t>(y.size()); }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(X.cols()); }
    Point x(std::size_t i) const { return row_span(X, static_cast<Eigen::Index>(i)); }

    /// Throws ConfigError on N = 0, shape mismatch, a point outside the box or a non-finite label.
    void validate() const;
    SampleSet subset(const std::vector<std::size_t>& idx) const;

    bool operator==(const SampleSet& o) const;
};

namespace datasets {

struct MixedGaussOptions {
    std::size_t m = 10;
    double w0 = 0.453;
    std::size_t n = 50;
    double noise_sd = 0.0316227766016838;  // variance 1e-3
    std::size_t dim = 1;
    Interval center_range{1.0, 2.0};
    Interval amplitude_range{1.0, 2.0};
    Box box = Box::uniform(1, 0.0, 3.0);
};

/// Sum of m Gaussians with random amplitudes and centers, sampled uniformly
/// on the box with additive Gaussian noise. Also returns the noiseless ground truth.
std::pair<SampleSet, DiscreteModel> gen_mixed_gauss(const MixedGaussOptions& opt, std::uint64_t seed);

/// n uniform draws of a known model on a box, plus noise.
SampleSet sample_model(const DiscreteModel& truth, const Box& box, std::size_t n, double noise_sd,
                       std::uint64_t seed);

enum class Sampling { Grid, Uniform };

/// y = sin(pi/2 x^2) + noise on [-5, 5]. Grid sampling includes both endpoints.
SampleSet gen_sin_squared(std::size_t n, double noise_sd, std::uint64_t seed, Sampling sampling = Sampling::Grid);

inline double sin_squared(double x) { return std::sin(0.5 * M_PI * x * x); }

/// y = exp(-(x - 2.5)^2 / 2) at n uniform points of [0, 5], none equal to 2.5.
SampleSet gen_remark1(std::size_t n, std::uint64_t seed);

inline double remark1_signal(double x) { return std::exp(-0.5 * (x - 2.5) * (x - 2.5)); }

struct KMeansResult {
    RowMatrix centers;
    std::vector<std::size_t> assignment;
    std::vector<double> objective_history;  ///< sum of squared distances after each assignment step
};

/// Lloyd iterations from k distinct random points; empty clusters are reseeded
/// to the point farthest from its center. Throws ConfigError unless 1 <= k <= M.
KMeansResult kmeans(const RowMatrix& points, std::size_t k, std::uint64_t seed, int max_iter = 300);

/// CSV with header x1,...,xp,y (or label as the last column). An optional
/// first line "# box=lo:hi,lo:hi" pins the domain; otherwise the bounding box is used.
SampleSet load_csv(const std::filesystem::path& path);
void save_csv(const SampleSet& set, const std::filesystem::path& path, bool label_column = false);

/// Random train/test split; fraction goes to the first part.
std::pair<SampleSet, SampleSet> split(const SampleSet& set, double fraction, std::uint64_t seed);

/// Index folds partitioning 0..N-1. Stratified folds deal each label group
/// round-robin so every fold holds each label within +-1.
std::vector<std::vector<std::size_t>> k_folds(const SampleSet& set, std::size_t k, std::uint64_t seed,
                                              bool stratified);

}  // namespace datasets
}  // namespace sparsekern
