#include "sparsekern/kernels.hpp"

#include <limits>
#include <sstream>

#include "sparsekern/error.hpp"

namespace sparsekern {

double Box::volume() const noexcept {
    double v = 1.0;
    for (const auto& a : axes) v *= a.length();
    return v;
}

bool Box::contains(Point p) const noexcept {
    if (p.size() != axes.size()) return false;
    for (std::size_t k = 0; k < axes.size(); ++k)
        if (!axes[k].contains(p[k])) return false;
    return true;
}

void Box::validate() const {
    if (axes.empty()) throw ConfigError("box has no axes");
    for (std::size_t k = 0; k < axes.size(); ++k) {
        if (!(axes[k].hi > axes[k].lo)) {
            std::ostringstream os;
            os << "box axis " << k << " has non-positive extent [" << axes[k].lo << ", " << axes[k].hi << "]";
            throw ConfigError(os.str());
        }
    }
}

Box Box::uniform(std::size_t dim, double lo, double hi) {
    return Box{std::vector<Interval>(dim, Interval{lo, hi})};
}

Box Box::bounding(const RowMatrix& X) {
    Box b;
    b.axes.resize(static_cast<std::size_t>(X.cols()));
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
        double lo = X.col(k).minCoeff();
        double hi = X.col(k).maxCoeff();
        if (hi <= lo) {
            lo -= 0.5;
            hi += 0.5;
        }
        b.axes[static_cast<std::size_t>(k)] = {lo, hi};
    }
    return b;
}

double squared_distance(Point a, Point b) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

std::string to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::Gaussian: return "gaussian";
    }
    return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& s) {
    if (s == "gaussian") return KernelFamily::Gaussian;
    throw ConfigError("unknown kernel family '" + s + "'");
}

void KernelSpec::validate() const {
    if (!(width_domain.lo > 0.0)) throw ConfigError("kernel width lower bound must be positive");
    if (!(width_domain.hi >= width_domain.lo)) throw ConfigError("kernel width domain is inverted");
    center_domain.validate();
}

namespace kernels {
namespace {

void check_width(const KernelSpec& spec, double w) {
    if (!spec.width_domain.contains(w)) {
        std::ostringstream os;
        os.precision(std::numeric_limits<double>::max_digits10);
        os << "width " << w << " outside [" << spec.width_domain.lo << ", " << spec.width_domain.hi << "]";
        throw DomainError(os.str());
    }
}

void check_dims(Point x, Point z) {
    if (x.size() != z.size()) throw DomainError("point dimensions differ");
}

}  // namespace

double eval(const KernelSpec& spec, Point x, Point z, double w) {
    check_width(spec, w);
    check_dims(x, z);
    return gaussian(x, z, w);
}

Vector eval_batch(const KernelSpec& spec, const RowMatrix& X, Point z, double w) {
    check_width(spec, w);
    if (static_cast<std::size_t>(X.cols()) != z.size()) throw DomainError("point dimensions differ");
    Vector out(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) out[i] = gaussian(row_span(X, i), z, w);
    return out;
}

Gradient grad(const KernelSpec& spec, Point x, Point z, double w) {
    check_width(spec, w);
    check_dims(x, z);
    const double d2 = squared_distance(x, z);
    const double k = gaussian(d2, w);
    Gradient g;
    g.dz.resize(static_cast<Eigen::Index>(z.size()));
    const double inv_w2 = 1.0 / (w * w);
    for (std::size_t j = 0; j < z.size(); ++j) g.dz[static_cast<Eigen::Index>(j)] = k * (x[j] - z[j]) * inv_w2;
    g.dw = k * d2 * inv_w2 / w;
    return g;
}

}  // namespace kernels
}  // namespace sparsekern
