#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "sparsekern/geometry.hpp"
#include "sparsekern/kernels.hpp"
#include "sparsekern/variant.hpp"

namespace sparsekern {

/// Tensor midpoint rule: center_points per center axis, width_points on the width axis.
struct QuadratureRule {
    std::size_t center_points = 256;
    std::size_t width_points = 64;
};

/// Uniform Monte-Carlo draws over the variant's domain.
struct MonteCarloRule {
    std::size_t batch = 1000;
    std::uint64_t seed = 0;
};

using Integrator = std::variant<QuadratureRule, MonteCarloRule>;

void validate(const Integrator& integrator);
bool is_quadrature(const Integrator& integrator) noexcept;

/// Integration nodes (z_n, w_n) with weights; the integral of f over the
/// variant's domain is approximated by sum_n weight_n f(z_n, w_n).
struct NodeSet {
    RowMatrix z;                     ///< n x p
    Vector w;                        ///< n
    Vector weight;                   ///< n
    std::vector<std::size_t> owner;  ///< fixed_centers: candidate index of each node; empty otherwise

    std::size_t size() const noexcept { return static_cast<std::size_t>(w.size()); }
    Point center(std::size_t n) const { return row_span(z, static_cast<Eigen::Index>(n)); }
};

/// Midpoint nodes. Ordering: center cells lexicographic (first axis slowest), width fastest.
/// Throws ConfigError on a zero-size grid.
NodeSet quadrature_nodes(const KernelSpec& kernel, const ProblemVariant& variant, const QuadratureRule& rule);

/// batch uniform draws with weight vol / batch each. Throws ConfigError on batch = 0.
NodeSet monte_carlo_nodes(const KernelSpec& kernel, const ProblemVariant& variant, std::size_t batch,
                          std::mt19937_64& rng);

/// n points evenly spaced on [lo, hi] including both ends (n = 1 gives the midpoint).
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace sparsekern
