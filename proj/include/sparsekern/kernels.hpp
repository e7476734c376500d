#pragma once

#include <cmath>
#include <string>

#include "sparsekern/geometry.hpp"

namespace sparsekern {

enum class KernelFamily { Gaussian };

std::string to_string(KernelFamily f);
KernelFamily kernel_family_from_string(const std::string& s);

/// Parametrized kernel dictionary: a family plus the compact sets that
/// centers and widths range over.
struct KernelSpec {
    KernelFamily family = KernelFamily::Gaussian;
    Interval width_domain{0.1, 1.0};
    Box center_domain;

    /// Throws ConfigError unless w_lo > 0, w_hi >= w_lo and the box has positive extent.
    void validate() const;
    std::size_t dim() const noexcept { return center_domain.dim(); }
    double width_length() const noexcept { return width_domain.length(); }
};

namespace kernels {

/// exp(-||x - z||^2 / (2 w^2)). No domain checks; the hot-loop form.
inline double gaussian(double sq_dist, double w) noexcept {
    return std::exp(-sq_dist / (2.0 * w * w));
}

inline double gaussian(Point x, Point z, double w) noexcept {
    return gaussian(squared_distance(x, z), w);
}

/// Kernel value with width-domain check. Throws DomainError if w is outside the width domain.
double eval(const KernelSpec& spec, Point x, Point z, double w);

/// eval for every row of X against a single center.
Vector eval_batch(const KernelSpec& spec, const RowMatrix& X, Point z, double w);

struct Gradient {
    Vector dz;  ///< d k / d z
    double dw = 0.0;
};

/// Analytic partials of the Gaussian with respect to the center and the width.
Gradient grad(const KernelSpec& spec, Point x, Point z, double w);

}  // namespace kernels
}  // namespace sparsekern
