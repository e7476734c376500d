#pragma once

#include <string>

namespace sparsekern {

enum class LossKind { QuadraticEps, AbsoluteEps, HingeEps };

std::string to_string(LossKind k);
LossKind loss_kind_from_string(const std::string& s);

/// Convex per-sample fit functional c(yhat, y). c <= 0 means the sample is fitted.
///
/// quadratic_eps: (yhat - y)^2 - eps
/// absolute_eps:  |yhat - y| - eps
/// hinge_eps:     max(0, 1 - y yhat) - eps
///
/// clamp_radius bounds the inner minimizer to [y - R, y + R].
struct Loss {
    LossKind kind = LossKind::QuadraticEps;
    double epsilon = 1e-3;
    double clamp_radius = 1.0;

    void validate() const;
};

inline constexpr double kDefaultRegressionEpsilon = 1e-3;
inline constexpr double kDefaultHingeEpsilon = 0.05;

/// Default clamp radius: ten times the label range (1 when the labels are constant).
double default_clamp_radius(double y_min, double y_max);

double loss_value(const Loss& loss, double yhat, double y);

/// argmin over yhat in [y - R, y + R] of  mu * c(yhat, y) + lambda * yhat.
///
/// The box is always applied, so the result is the exact minimizer of the
/// box-constrained problem; when the unconstrained problem is unbounded the
/// minimizer sits on a box face. Throws DomainError for negative mu.
double inner_minimize(const Loss& loss, double lambda, double mu, double y);

/// mu * c(yhat, y) + lambda * yhat.
inline double inner_objective(const Loss& loss, double lambda, double mu, double y, double yhat) {
    return mu * loss_value(loss, yhat, y) + lambda * yhat;
}

}  // namespace sparsekern
