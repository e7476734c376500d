#pragma once

#include <optional>
#include <vector>

#include "sparsekern/dual_field.hpp"
#include "sparsekern/model.hpp"

namespace sparsekern {

struct PeakConfig {
    std::size_t grid = 64;        ///< coarse points per center axis
    std::size_t width_grid = 32;  ///< coarse points on the width axis
    std::size_t refine_steps = 50;
    double merge_radius = 0.5;        ///< in units of the kept peak's width
    std::optional<double> threshold;  ///< defaults to sqrt(2 gamma)

    void validate() const;
};

struct Peak {
    Vector z;
    double w = 0.0;
    double value = 0.0;  ///< signed abar at the peak
    std::size_t center_index = 0;  ///< candidate index for fixed_centers, 0 otherwise
};

/// Local maxima of |abar| above the threshold: coarse grid scan, projected
/// gradient ascent with backtracking, then greedy merging. Sorted by
/// decreasing |abar|. Candidate-center fields merge only within one center.
std::vector<Peak> find_peaks(const AlphaField& field, const PeakConfig& cfg = {});

struct RefitReport {
    double ridge = 0.0;  ///< ridge actually used
    bool rank_deficient = false;
};

/// Least squares a = argmin sum_i (y_i - sum_j a_j k(x_i, z_j; w_j))^2 + ridge |a|^2
/// via the normal equations. A singular system is reported and retried with a larger ridge.
DiscreteModel refit_amplitudes(const std::vector<Peak>& peaks, const SampleSet& samples, double ridge = 1e-10,
                               RefitReport* report = nullptr);

/// find_peaks followed by refit_amplitudes; empty model when nothing clears the threshold.
DiscreteModel extract_model(const AlphaField& field, const PeakConfig& cfg = {}, double ridge = 1e-10);

}  // namespace sparsekern
