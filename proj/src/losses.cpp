#include "sparsekern/losses.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "sparsekern/error.hpp"

namespace sparsekern {

std::string to_string(LossKind k) {
    switch (k) {
        case LossKind::QuadraticEps: return "quadratic_eps";
        case LossKind::AbsoluteEps: return "absolute_eps";
        case LossKind::HingeEps: return "hinge_eps";
    }
    return "unknown";
}

LossKind loss_kind_from_string(const std::string& s) {
    if (s == "quadratic_eps" || s == "quad") return LossKind::QuadraticEps;
    if (s == "absolute_eps" || s == "abs") return LossKind::AbsoluteEps;
    if (s == "hinge_eps" || s == "hinge") return LossKind::HingeEps;
    throw ConfigError("unknown loss '" + s + "'");
}

void Loss::validate() const {
    if (!(epsilon >= 0.0)) throw ConfigError("loss epsilon must be nonnegative");
    if (!(clamp_radius > 0.0)) throw ConfigError("loss clamp_radius must be positive");
}

double default_clamp_radius(double y_min, double y_max) {
    const double range = y_max - y_min;
    return range > 0.0 ? 10.0 * range : 1.0;
}

double loss_value(const Loss& loss, double yhat, double y) {
    switch (loss.kind) {
        case LossKind::QuadraticEps: return (yhat - y) * (yhat - y) - loss.epsilon;
        case LossKind::AbsoluteEps: return std::abs(yhat - y) - loss.epsilon;
        case LossKind::HingeEps: return std::max(0.0, 1.0 - y * yhat) - loss.epsilon;
    }
    return 0.0;
}

double inner_minimize(const Loss& loss, double lambda, double mu, double y) {
    if (mu < 0.0 || std::isnan(mu)) throw DomainError("inner_minimize: mu must be nonnegative");
    const double lo = y - loss.clamp_radius;
    const double hi = y + loss.clamp_radius;

    if (loss.kind == LossKind::QuadraticEps) {
        if (mu > 0.0) return std::clamp(y - lambda / (2.0 * mu), lo, hi);
        if (lambda > 0.0) return lo;
        if (lambda < 0.0) return hi;
        return y;
    }

    // Piecewise-linear objectives: the minimum over the box is at the kink or a face.
    // Candidates are tried in order, so ties resolve to the kink first.
    double kink = y;
    bool has_kink = true;
    if (loss.kind == LossKind::HingeEps) {
        has_kink = y != 0.0;
        kink = has_kink ? 1.0 / y : y;
    }
    std::array<double, 3> cand{};
    std::size_t n = 0;
    if (has_kink && kink >= lo && kink <= hi) cand[n++] = kink;
    cand[n++] = lo;
    cand[n++] = hi;
    double best = cand[0];
    double best_val = inner_objective(loss, lambda, mu, y, best);
    for (std::size_t k = 1; k < n; ++k) {
        const double v = inner_objective(loss, lambda, mu, y, cand[k]);
        if (v < best_val) {
            best_val = v;
            best = cand[k];
        }
    }
    return best;
}

}  // namespace sparsekern
