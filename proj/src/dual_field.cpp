#include "sparsekern/dual_field.hpp"

#include <cmath>
#include <sstream>

#include "sparsekern/error.hpp"
#include "sparsekern/parallel.hpp"

namespace sparsekern {

double predict_discrete(const DiscreteModel& model, Point x) {
    double s = 0.0;
    for (const auto& t : model.terms) s += t.a * kernels::gaussian(x, as_point(t.z), t.w);
    return s;
}

Vector predict_discrete(const DiscreteModel& model, const RowMatrix& X) {
    Vector out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = predict_discrete(model, row_span(X, i));
    return out;
}

double mse(const DiscreteModel& model, const RowMatrix& X, const Vector& y) {
    if (y.size() == 0) return 0.0;
    return (predict_discrete(model, X) - y).squaredNorm() / static_cast<double>(y.size());
}

AlphaField::AlphaField(SampleSet samples, Vector lambda, double gamma, KernelSpec kernel, ProblemVariant variant)
    : samples_(std::move(samples)),
      lambda_(std::move(lambda)),
      gamma_(gamma),
      kernel_(std::move(kernel)),
      variant_(std::move(variant)),
      threshold_(std::sqrt(2.0 * gamma)) {
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be nonnegative");
    if (static_cast<std::size_t>(lambda_.size()) != samples_.size())
        throw ConfigError("lambda length does not match the number of samples");
    kernel_.validate();
    if (samples_.dim() != kernel_.dim()) throw ConfigError("sample dimension does not match the kernel box");
    variant_.validate(kernel_);
}

void AlphaField::check_domain(Point z, double w) const {
    if (!kernel_.center_domain.contains(z)) throw DomainError("center query outside the box");
    if (!kernel_.width_domain.contains(w)) throw DomainError("width query outside the width domain");
    if (variant_.kind == ProblemVariant::Kind::FixedWidth && w != variant_.width)
        throw DomainError("fixed_width field queried at a different width");
    if (variant_.kind == ProblemVariant::Kind::FixedCenters) {
        for (Eigen::Index j = 0; j < variant_.centers.rows(); ++j)
            if (squared_distance(z, row_span(variant_.centers, j)) == 0.0) return;
        throw DomainError("fixed_centers field queried away from the candidate centers");
    }
}

double AlphaField::abar_unchecked(Point z, double w) const noexcept {
    double s = 0.0;
    for (std::size_t i = 0; i < samples_.size(); ++i)
        s += lambda_[static_cast<Eigen::Index>(i)] * kernels::gaussian(samples_.x(i), z, w);
    return s;
}

double AlphaField::abar(Point z, double w) const {
    check_domain(z, w);
    return abar_unchecked(z, w);
}

double AlphaField::alpha_d(Point z, double w) const { return threshold_alpha(abar(z, w), threshold_); }

double AlphaField::abar_center(std::size_t j, double w) const {
    if (variant_.kind != ProblemVariant::Kind::FixedCenters || j >= variant_.num_centers())
        throw DomainError("abar_center needs a fixed_centers field and a valid candidate index");
    if (!kernel_.width_domain.contains(w)) throw DomainError("width query outside the width domain");
    return abar_unchecked(row_span(variant_.centers, static_cast<Eigen::Index>(j)), w);
}

namespace {

NodeSet integration_nodes(const KernelSpec& kernel, const ProblemVariant& variant, const Integrator& integrator) {
    validate(integrator);
    if (const auto* q = std::get_if<QuadratureRule>(&integrator)) return quadrature_nodes(kernel, variant, *q);
    const auto& mc = std::get<MonteCarloRule>(integrator);
    std::mt19937_64 rng(mc.seed);
    return monte_carlo_nodes(kernel, variant, mc.batch, rng);
}

// Active nodes (alpha_d != 0) with their weighted coefficients.
struct ActiveNodes {
    std::vector<std::size_t> index;
    std::vector<double> coef;  // weight * alpha_d
};

ActiveNodes active_nodes(const AlphaField& f, const NodeSet& nodes) {
    const auto design = compute::build_design(f.samples().X, nodes);
    Vector abar;
    compute::field_at_nodes(design.phi, f.lambda(), abar);
    ActiveNodes out;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const double a = threshold_alpha(abar[static_cast<Eigen::Index>(n)], f.threshold());
        if (a != 0.0) {
            out.index.push_back(n);
            out.coef.push_back(nodes.weight[static_cast<Eigen::Index>(n)] * a);
        }
    }
    return out;
}

}  // namespace

Vector AlphaField::predict_many(const RowMatrix& X, const Integrator& integrator) const {
    const NodeSet nodes = integration_nodes(kernel_, variant_, integrator);
    const ActiveNodes act = active_nodes(*this, nodes);
    Vector out(X.rows());
    const Eigen::Index rows = X.rows();
#pragma omp parallel for schedule(static)
    for (Eigen::Index r = 0; r < rows; ++r) {
        const Point x = row_span(X, r);
        double s = 0.0;
        for (std::size_t k = 0; k < act.index.size(); ++k) {
            const std::size_t n = act.index[k];
            s += act.coef[k] * kernels::gaussian(x, nodes.center(n), nodes.w[static_cast<Eigen::Index>(n)]);
        }
        out[r] = s;
    }
    return out;
}

double AlphaField::predict(Point x, const Integrator& integrator) const {
    RowMatrix X(1, static_cast<Eigen::Index>(x.size()));
    for (std::size_t k = 0; k < x.size(); ++k) X(0, static_cast<Eigen::Index>(k)) = x[k];
    return predict_many(X, integrator)[0];
}

IntegralEstimate AlphaField::predict_estimate(Point x, const Integrator& integrator) const {
    if (is_quadrature(integrator)) return {predict(x, integrator), 0.0};
    const NodeSet nodes = integration_nodes(kernel_, variant_, integrator);
    const auto B = static_cast<double>(nodes.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const Point z = nodes.center(n);
        const double w = nodes.w[static_cast<Eigen::Index>(n)];
        const double a = threshold_alpha(abar_unchecked(z, w), threshold_);
        const double v = a == 0.0 ? 0.0 : B * nodes.weight[static_cast<Eigen::Index>(n)] * a * kernels::gaussian(x, z, w);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / B;
    const double var = nodes.size() > 1 ? std::max(0.0, (sum_sq - B * mean * mean) / (B - 1.0)) : 0.0;
    return {mean, std::sqrt(var / B)};
}

double AlphaField::support_fraction(const NodeSet& nodes) const {
    if (nodes.size() == 0) return 0.0;
    std::size_t on = 0;
    for (std::size_t n = 0; n < nodes.size(); ++n)
        if (threshold_alpha(abar_unchecked(nodes.center(n), nodes.w[static_cast<Eigen::Index>(n)]), threshold_) != 0.0)
            ++on;
    return static_cast<double>(on) / static_cast<double>(nodes.size());
}

double primal_objective(const Vector& alpha_at_nodes, const NodeSet& nodes, double gamma) {
    double s = 0.0;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const double a = alpha_at_nodes[static_cast<Eigen::Index>(n)];
        if (a != 0.0) s += nodes.weight[static_cast<Eigen::Index>(n)] * (0.5 * a * a + gamma);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Bump construction

namespace {

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
    x.assign(static_cast<std::size_t>(order), 0.0);
    w.assign(static_cast<std::size_t>(order), 0.0);
    for (int i = 0; i < order; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (order == 1) p0 = 1.0, p1 = t;
            dp = order * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-16) break;
        }
        x[static_cast<std::size_t>(i)] = t;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

}  // namespace

BumpField::BumpField(DiscreteModel model, int m, KernelSpec kernel, ProblemVariant variant)
    : model_(std::move(model)), m_(m), kernel_(std::move(kernel)), variant_(std::move(variant)) {
    if (m_ < 1) throw ConfigError("bump resolution m must be >= 1");
    kernel_.validate();
    variant_.validate(kernel_);
    const double r = 1.0 / m_;
    for (const auto& t : model_.terms) {
        if (static_cast<std::size_t>(t.z.size()) != kernel_.dim()) throw DomainError("term center has the wrong dimension");
        const bool free_z = variant_.kind != ProblemVariant::Kind::FixedCenters;
        const bool free_w = variant_.kind != ProblemVariant::Kind::FixedWidth;
        if (free_z) {
            for (std::size_t k = 0; k < kernel_.dim(); ++k) {
                const auto& ax = kernel_.center_domain.axes[k];
                if (t.z[static_cast<Eigen::Index>(k)] - r < ax.lo || t.z[static_cast<Eigen::Index>(k)] + r > ax.hi)
                    throw DomainError("bump support leaves the center box");
            }
        } else {
            bool found = false;
            for (Eigen::Index j = 0; j < variant_.centers.rows() && !found; ++j)
                found = squared_distance(as_point(t.z), row_span(variant_.centers, j)) == 0.0;
            if (!found) throw DomainError("term center is not a candidate center");
        }
        if (free_w) {
            if (t.w - r < kernel_.width_domain.lo || t.w + r > kernel_.width_domain.hi)
                throw DomainError("bump support leaves the width domain");
        } else if (t.w != variant_.width) {
            throw DomainError("term width differs from the fixed width");
        }
    }
}

bool BumpField::term_matches(const Term& t, Point z, double w) const {
    const double r = 1.0 / m_;
    if (variant_.kind == ProblemVariant::Kind::FixedCenters) {
        if (squared_distance(as_point(t.z), z) != 0.0) return false;
    } else {
        for (std::size_t k = 0; k < z.size(); ++k)
            if (!(std::abs(z[k] - t.z[static_cast<Eigen::Index>(k)]) < r)) return false;
    }
    if (variant_.kind == ProblemVariant::Kind::FixedWidth) return w == t.w;
    return std::abs(w - t.w) < r;
}

double BumpField::operator()(Point z, double w) const {
    const double h = 0.5 * m_;
    int dims = 0;
    if (variant_.kind != ProblemVariant::Kind::FixedCenters) dims += static_cast<int>(kernel_.dim());
    if (variant_.kind != ProblemVariant::Kind::FixedWidth) dims += 1;
    const double height = std::pow(h, dims);
    double s = 0.0;
    for (const auto& t : model_.terms)
        if (term_matches(t, z, w)) s += t.a * height;
    return s;
}

double BumpField::integrate(Point x, int order) const {
    if (order < 1) throw ConfigError("Gauss-Legendre order must be >= 1");
    std::vector<double> gx, gw;
    gauss_legendre(order, gx, gw);
    const double r = 1.0 / m_;
    const bool free_z = variant_.kind != ProblemVariant::Kind::FixedCenters;
    const bool free_w = variant_.kind != ProblemVariant::Kind::FixedWidth;
    const std::size_t p = kernel_.dim();
    const std::size_t dims = (free_z ? p : 0) + (free_w ? 1 : 0);
    // Bump height (m/2)^dims times the Jacobian r^dims of the map [-1,1] -> [c-r, c+r].
    const double scale = std::pow(0.5 * m_ * r, static_cast<double>(dims));

    double total = 0.0;
    std::vector<std::size_t> digit(dims, 0);
    Vector z(static_cast<Eigen::Index>(p));
    for (const auto& t : model_.terms) {
        std::fill(digit.begin(), digit.end(), 0);
        double acc = 0.0;
        while (true) {
            double wt = 1.0;
            std::size_t d = 0;
            if (free_z) {
                for (std::size_t k = 0; k < p; ++k, ++d) {
                    z[static_cast<Eigen::Index>(k)] = t.z[static_cast<Eigen::Index>(k)] + r * gx[digit[d]];
                    wt *= gw[digit[d]];
                }
            } else {
                z = t.z;
            }
            double w = t.w;
            if (free_w) {
                w = t.w + r * gx[digit[d]];
                wt *= gw[digit[d]];
            }
            acc += wt * kernels::gaussian(x, as_point(z), w);
            std::size_t k = dims;
            while (k-- > 0) {
                if (++digit[k] < static_cast<std::size_t>(order)) break;
                digit[k] = 0;
            }
            if (k == static_cast<std::size_t>(-1)) break;
        }
        total += t.a * scale * acc;
    }
    return total;
}

double BumpField::mass() const {
    double s = 0.0;
    for (const auto& t : model_.terms) s += t.a;
    return s;
}

}  // namespace sparsekern
