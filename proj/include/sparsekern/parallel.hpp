#pragma once

// Data-parallel kernels behind the solver, the field evaluation and the
// baselines. Every kernel has a serial reference with the same per-output
// summation order, so Exec::Serial and Exec::Parallel agree bit for bit and
// results do not depend on the worker count.

#include <vector>

#include "sparsekern/geometry.hpp"
#include "sparsekern/quadrature.hpp"

namespace sparsekern::compute {

enum class Exec { Serial, Parallel };

/// Caps OpenMP workers at SPARSEKERN_THREADS when set; returns the worker count in effect.
int configure_threads();

/// Kernel values between samples and integration nodes, stored both ways
/// so that each reduction walks contiguous memory.
struct DesignMatrix {
    RowMatrix phi;    ///< nodes x N, phi(n, i) = k(x_i, z_n; w_n)
    RowMatrix phi_t;  ///< N x nodes

    std::size_t nodes() const noexcept { return static_cast<std::size_t>(phi.rows()); }
    std::size_t samples() const noexcept { return static_cast<std::size_t>(phi.cols()); }
};

DesignMatrix build_design(const RowMatrix& X, const NodeSet& nodes, Exec exec = Exec::Parallel);

/// out(n) = sum_i phi(n, i) lambda(i)
void field_at_nodes(const RowMatrix& phi, const Vector& lambda, Vector& out, Exec exec = Exec::Parallel);

/// out(i) = sum_n phi_t(i, n) v(n)
void back_project(const RowMatrix& phi_t, const Vector& v, Vector& out, Exec exec = Exec::Parallel);

/// out(i) = sum_k phi(active[k], i) v(k), summed in the order of `active`.
/// Agrees with back_project up to rounding when v vanishes off `active`.
void back_project_active(const RowMatrix& phi, const std::vector<Eigen::Index>& active, const Vector& v, Vector& out,
                         Exec exec = Exec::Parallel);

/// K(i, j) = k(x_i, z_j; w_j)
RowMatrix kernel_matrix(const RowMatrix& X, const RowMatrix& Z, const Vector& W, Exec exec = Exec::Parallel);

/// Same as kernel_matrix with one shared width.
RowMatrix kernel_matrix(const RowMatrix& X, const RowMatrix& Z, double w, Exec exec = Exec::Parallel);

}  // namespace sparsekern::compute
