#include "sparsekern/quadrature.hpp"

#include "sparsekern/error.hpp"

namespace sparsekern {

void validate(const Integrator& integrator) {
    if (const auto* q = std::get_if<QuadratureRule>(&integrator)) {
        if (q->center_points == 0 || q->width_points == 0) throw ConfigError("quadrature grid has zero size");
    } else if (std::get<MonteCarloRule>(integrator).batch == 0) {
        throw ConfigError("Monte-Carlo batch size must be positive");
    }
}

bool is_quadrature(const Integrator& integrator) noexcept {
    return std::holds_alternative<QuadratureRule>(integrator);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = 0.5 * (lo + hi);
        return v;
    }
    for (std::size_t k = 0; k < n; ++k)
        v[k] = k + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    return v;
}

namespace {

std::vector<double> midpoints(const Interval& iv, std::size_t n) {
    std::vector<double> v(n);
    const double h = iv.length() / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) v[k] = iv.lo + h * (static_cast<double>(k) + 0.5);
    return v;
}

}  // namespace

NodeSet quadrature_nodes(const KernelSpec& kernel, const ProblemVariant& variant, const QuadratureRule& rule) {
    validate(Integrator{rule});
    const std::size_t p = kernel.dim();
    NodeSet nodes;

    if (variant.kind == ProblemVariant::Kind::FixedCenters) {
        const std::size_t m = variant.num_centers();
        const auto ws = midpoints(kernel.width_domain, rule.width_points);
        const double wt = kernel.width_length() / static_cast<double>(rule.width_points);
        const std::size_t n = m * ws.size();
        nodes.z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
        nodes.w.resize(static_cast<Eigen::Index>(n));
        nodes.weight = Vector::Constant(static_cast<Eigen::Index>(n), wt);
        nodes.owner.resize(n);
        std::size_t idx = 0;
        for (std::size_t j = 0; j < m; ++j) {
            for (double w : ws) {
                nodes.z.row(static_cast<Eigen::Index>(idx)) = variant.centers.row(static_cast<Eigen::Index>(j));
                nodes.w[static_cast<Eigen::Index>(idx)] = w;
                nodes.owner[idx] = j;
                ++idx;
            }
        }
        return nodes;
    }

    std::vector<std::vector<double>> axes(p);
    double cell = 1.0;
    std::size_t n_centers = 1;
    for (std::size_t k = 0; k < p; ++k) {
        axes[k] = midpoints(kernel.center_domain.axes[k], rule.center_points);
        cell *= kernel.center_domain.axes[k].length() / static_cast<double>(rule.center_points);
        n_centers *= rule.center_points;
    }
    std::vector<double> ws;
    if (variant.kind == ProblemVariant::Kind::FixedWidth) {
        ws = {variant.width};
    } else {
        ws = midpoints(kernel.width_domain, rule.width_points);
        cell *= kernel.width_length() / static_cast<double>(rule.width_points);
    }

    const std::size_t n = n_centers * ws.size();
    nodes.z.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    nodes.w.resize(static_cast<Eigen::Index>(n));
    nodes.weight = Vector::Constant(static_cast<Eigen::Index>(n), cell);
    std::vector<std::size_t> digit(p, 0);
    std::size_t idx = 0;
    for (std::size_t c = 0; c < n_centers; ++c) {
        for (double w : ws) {
            for (std::size_t k = 0; k < p; ++k)
                nodes.z(static_cast<Eigen::Index>(idx), static_cast<Eigen::Index>(k)) = axes[k][digit[k]];
            nodes.w[static_cast<Eigen::Index>(idx)] = w;
            ++idx;
        }
        for (std::size_t k = p; k-- > 0;) {
            if (++digit[k] < rule.center_points) break;
            digit[k] = 0;
        }
    }
    return nodes;
}

NodeSet monte_carlo_nodes(const KernelSpec& kernel, const ProblemVariant& variant, std::size_t batch,
                          std::mt19937_64& rng) {
    if (batch == 0) throw ConfigError("Monte-Carlo batch size must be positive");
    const std::size_t p = kernel.dim();
    NodeSet nodes;
    nodes.z.resize(static_cast<Eigen::Index>(batch), static_cast<Eigen::Index>(p));
    nodes.w.resize(static_cast<Eigen::Index>(batch));
    nodes.weight =
        Vector::Constant(static_cast<Eigen::Index>(batch), variant.domain_volume(kernel) / static_cast<double>(batch));

    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto& wd = kernel.width_domain;
    if (variant.kind == ProblemVariant::Kind::FixedCenters) {
        nodes.owner.resize(batch);
        std::uniform_int_distribution<std::size_t> pick(0, variant.num_centers() - 1);
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t j = pick(rng);
            nodes.owner[b] = j;
            nodes.z.row(static_cast<Eigen::Index>(b)) = variant.centers.row(static_cast<Eigen::Index>(j));
            nodes.w[static_cast<Eigen::Index>(b)] = wd.lo + wd.length() * unit(rng);
        }
        return nodes;
    }
    for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t k = 0; k < p; ++k) {
            const auto& ax = kernel.center_domain.axes[k];
            nodes.z(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(k)) = ax.lo + ax.length() * unit(rng);
        }
        nodes.w[static_cast<Eigen::Index>(b)] = variant.kind == ProblemVariant::Kind::FixedWidth
                                                    ? variant.width
                                                    : wd.lo + wd.length() * unit(rng);
    }
    return nodes;
}

std::string to_string(ProblemVariant::Kind k) {
    switch (k) {
        case ProblemVariant::Kind::Full: return "full";
        case ProblemVariant::Kind::FixedWidth: return "fixed_width";
        case ProblemVariant::Kind::FixedCenters: return "fixed_centers";
    }
    return "unknown";
}

void ProblemVariant::validate(const KernelSpec& kernel) const {
    switch (kind) {
        case Kind::Full: break;
        case Kind::FixedWidth:
            if (!kernel.width_domain.contains(width)) throw ConfigError("fixed width outside the width domain");
            break;
        case Kind::FixedCenters:
            if (centers.rows() == 0) throw ConfigError("fixed_centers needs at least one candidate center");
            if (static_cast<std::size_t>(centers.cols()) != kernel.dim())
                throw ConfigError("candidate centers have the wrong dimension");
            for (Eigen::Index j = 0; j < centers.rows(); ++j)
                if (!kernel.center_domain.contains(row_span(centers, j)))
                    throw ConfigError("candidate center " + std::to_string(j) + " lies outside the center box");
            break;
    }
}

double ProblemVariant::domain_volume(const KernelSpec& kernel) const {
    switch (kind) {
        case Kind::Full: return kernel.center_domain.volume() * kernel.width_length();
        case Kind::FixedWidth: return kernel.center_domain.volume();
        case Kind::FixedCenters: return static_cast<double>(num_centers()) * kernel.width_length();
    }
    return 0.0;
}

}  // namespace sparsekern
