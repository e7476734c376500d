#pragma once

#include <string>

#include "sparsekern/geometry.hpp"
#include "sparsekern/kernels.hpp"

namespace sparsekern {

/// Which sparse functional program is solved.
///  full           centers and widths both free
///  fixed_width    one width w0, centers free
///  fixed_centers  candidate centers z_j given, one width field per center
struct ProblemVariant {
    enum class Kind { Full, FixedWidth, FixedCenters };

    Kind kind = Kind::Full;
    double width = 0.0;  ///< fixed_width only
    RowMatrix centers;   ///< fixed_centers only, M x p

    static ProblemVariant full() { return {}; }
    static ProblemVariant fixed_width(double w0) { return {Kind::FixedWidth, w0, {}}; }
    static ProblemVariant fixed_centers(RowMatrix c) { return {Kind::FixedCenters, 0.0, std::move(c)}; }

    std::size_t num_centers() const noexcept { return static_cast<std::size_t>(centers.rows()); }

    /// Throws ConfigError when w0 leaves the width domain, a center leaves the box,
    /// or the candidate list is empty.
    void validate(const KernelSpec& kernel) const;

    /// Measure of the integration domain: vol(X)|W|, vol(X) or M|W|.
    double domain_volume(const KernelSpec& kernel) const;
};

std::string to_string(ProblemVariant::Kind k);

}  // namespace sparsekern
