#include "sparsekern/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#include <omp.h>

#include "sparsekern/kernels.hpp"

namespace sparsekern::compute {

int configure_threads() {
    if (const char* env = std::getenv("SPARSEKERN_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
    }
    return omp_get_max_threads();
}

namespace {

// Four interleaved partial sums: vectorizes without reassociation flags and
// the summation order stays fixed.
inline double dot(const double* a, const double* b, Eigen::Index n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    Eigen::Index k = 0;
    for (; k + 4 <= n; k += 4) {
        s0 += a[k] * b[k];
        s1 += a[k + 1] * b[k + 1];
        s2 += a[k + 2] * b[k + 2];
        s3 += a[k + 3] * b[k + 3];
    }
    for (; k < n; ++k) s0 += a[k] * b[k];
    return (s0 + s1) + (s2 + s3);
}

inline void axpy_rows(const RowMatrix& phi, const std::vector<Eigen::Index>& active, const Vector& v, double* out,
                      Eigen::Index i0, Eigen::Index i1) {
    for (Eigen::Index i = i0; i < i1; ++i) out[i] = 0.0;
    const Eigen::Index cols = phi.cols();
    for (std::size_t k = 0; k < active.size(); ++k) {
        const double c = v[static_cast<Eigen::Index>(k)];
        const double* row = phi.data() + active[k] * cols;
        for (Eigen::Index i = i0; i < i1; ++i) out[i] += c * row[i];
    }
}

inline void design_row(const RowMatrix& X, const NodeSet& nodes, Eigen::Index n, double* out) {
    const Point z = nodes.center(static_cast<std::size_t>(n));
    const double w = nodes.w[n];
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = kernels::gaussian(row_span(X, i), z, w);
}

inline void kernel_row(const RowMatrix& X, const RowMatrix& Z, const Vector& W, Eigen::Index i, double* out) {
    const Point x = row_span(X, i);
    for (Eigen::Index j = 0; j < Z.rows(); ++j) out[j] = kernels::gaussian(x, row_span(Z, j), W[j]);
}

}  // namespace

DesignMatrix build_design(const RowMatrix& X, const NodeSet& nodes, Exec exec) {
    DesignMatrix d;
    const auto n_nodes = static_cast<Eigen::Index>(nodes.size());
    d.phi.resize(n_nodes, X.rows());
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index n = 0; n < n_nodes; ++n) design_row(X, nodes, n, d.phi.data() + n * X.rows());
    } else {
        for (Eigen::Index n = 0; n < n_nodes; ++n) design_row(X, nodes, n, d.phi.data() + n * X.rows());
    }
    d.phi_t = d.phi.transpose();
    return d;
}

void field_at_nodes(const RowMatrix& phi, const Vector& lambda, Vector& out, Exec exec) {
    const Eigen::Index rows = phi.rows();
    const Eigen::Index cols = phi.cols();
    out.resize(rows);
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index n = 0; n < rows; ++n) out[n] = dot(phi.data() + n * cols, lambda.data(), cols);
    } else {
        for (Eigen::Index n = 0; n < rows; ++n) out[n] = dot(phi.data() + n * cols, lambda.data(), cols);
    }
}

void back_project(const RowMatrix& phi_t, const Vector& v, Vector& out, Exec exec) {
    field_at_nodes(phi_t, v, out, exec);
}

void back_project_active(const RowMatrix& phi, const std::vector<Eigen::Index>& active, const Vector& v, Vector& out,
                         Exec exec) {
    const Eigen::Index cols = phi.cols();
    out.resize(cols);
    if (exec == Exec::Serial) {
        axpy_rows(phi, active, v, out.data(), 0, cols);
        return;
    }
#pragma omp parallel
    {
        const Eigen::Index nt = omp_get_num_threads();
        const Eigen::Index t = omp_get_thread_num();
        const Eigen::Index chunk = (cols + nt - 1) / nt;
        const Eigen::Index i0 = std::min(cols, t * chunk);
        const Eigen::Index i1 = std::min(cols, i0 + chunk);
        axpy_rows(phi, active, v, out.data(), i0, i1);
    }
}

RowMatrix kernel_matrix(const RowMatrix& X, const RowMatrix& Z, const Vector& W, Exec exec) {
    RowMatrix K(X.rows(), Z.rows());
    const Eigen::Index rows = X.rows();
    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (Eigen::Index i = 0; i < rows; ++i) kernel_row(X, Z, W, i, K.data() + i * Z.rows());
    } else {
        for (Eigen::Index i = 0; i < rows; ++i) kernel_row(X, Z, W, i, K.data() + i * Z.rows());
    }
    return K;
}

RowMatrix kernel_matrix(const RowMatrix& X, const RowMatrix& Z, double w, Exec exec) {
    return kernel_matrix(X, Z, Vector::Constant(Z.rows(), w), exec);
}

}  // namespace sparsekern::compute
