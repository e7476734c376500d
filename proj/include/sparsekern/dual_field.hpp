#pragma once

#include <cmath>
#include <optional>

#include "sparsekern/datasets.hpp"
#include "sparsekern/kernels.hpp"
#include "sparsekern/model.hpp"
#include "sparsekern/quadrature.hpp"
#include "sparsekern/variant.hpp"

namespace sparsekern {

/// Hard threshold at sqrt(2 gamma): the pointwise minimizer of
/// a^2/2 + gamma 1[a != 0] - abar a.
inline double threshold_alpha(double abar, double threshold) noexcept {
    return std::abs(abar) > threshold ? abar : 0.0;
}

struct IntegralEstimate {
    double value = 0.0;
    double std_error = 0.0;  ///< zero for quadrature
};

/// The functional solution determined by the multipliers lambda:
///   abar(z, w)    = sum_i lambda_i k(x_i, z; w)
///   alpha_d(z, w) = abar if |abar| > sqrt(2 gamma), else 0
/// and the function it represents, h(x) = integral of alpha_d(z, w) k(x, z; w).
class AlphaField {
public:
    /// Throws ConfigError on shape mismatch, negative gamma or an invalid kernel/variant.
    AlphaField(SampleSet samples, Vector lambda, double gamma, KernelSpec kernel, ProblemVariant variant);

    const SampleSet& samples() const noexcept { return samples_; }
    const Vector& lambda() const noexcept { return lambda_; }
    double gamma() const noexcept { return gamma_; }
    const KernelSpec& kernel() const noexcept { return kernel_; }
    const ProblemVariant& variant() const noexcept { return variant_; }
    double threshold() const noexcept { return threshold_; }

    /// Throws DomainError when (z, w) is outside the variant's domain: z outside
    /// the box, w outside the width domain, w != w0 for fixed_width, or z not a
    /// candidate for fixed_centers.
    double abar(Point z, double w) const;
    double alpha_d(Point z, double w) const;

    /// fixed_centers access by candidate index.
    double abar_center(std::size_t j, double w) const;

    /// Unchecked sum over samples, used in hot loops after the caller validated the domain.
    double abar_unchecked(Point z, double w) const noexcept;

    double predict(Point x, const Integrator& integrator) const;
    Vector predict_many(const RowMatrix& X, const Integrator& integrator) const;
    /// Value with Monte-Carlo standard error (zero under quadrature).
    IntegralEstimate predict_estimate(Point x, const Integrator& integrator) const;

    /// Fraction of the nodes of `nodes` on which alpha_d is nonzero.
    double support_fraction(const NodeSet& nodes) const;

private:
    void check_domain(Point z, double w) const;

    SampleSet samples_;
    Vector lambda_;
    double gamma_;
    KernelSpec kernel_;
    ProblemVariant variant_;
    double threshold_;
};

/// 1/2 int alpha^2 + gamma |supp alpha|, evaluated with the weights of `nodes`
/// from the values of alpha at those nodes.
double primal_objective(const Vector& alpha_at_nodes, const NodeSet& nodes, double gamma);

/// Piecewise-constant approximation of the identity built from a finite model:
///   alpha_m(z, w) = sum_j a_j r_m(w - w_j) prod_k r_m(z_k - z_jk),  r_m(x) = (m/2) 1[|x| < 1/m].
/// r_m has unit mass, so each bump contributes exactly a_j to the integral.
/// Only the free coordinates of the variant carry a bump factor (z for fixed_width,
/// w for fixed_centers). As m grows, the represented function converges pointwise
/// to the model.
class BumpField {
public:
    /// Throws ConfigError for m < 1 and DomainError when a bump leaves the domain
    /// (or a term does not sit on the variant's fixed width / a candidate center).
    BumpField(DiscreteModel model, int m, KernelSpec kernel, ProblemVariant variant);

    double operator()(Point z, double w) const;

    /// Integral of alpha_m k(x, .) over the domain, exact up to the tensor
    /// Gauss-Legendre rule (order points per axis) applied on each bump box.
    double integrate(Point x, int order = 8) const;

    /// Integral of alpha_m over the domain.
    double mass() const;

    int m() const noexcept { return m_; }
    const DiscreteModel& model() const noexcept { return model_; }

private:
    bool term_matches(const Term& t, Point z, double w) const;

    DiscreteModel model_;
    int m_;
    KernelSpec kernel_;
    ProblemVariant variant_;
};

}  // namespace sparsekern
