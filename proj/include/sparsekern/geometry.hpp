#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sparsekern {

/// Row-major dense matrix; row i is one point, contiguous in memory.
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Point = std::span<const double>;

inline Point row_span(const RowMatrix& m, Eigen::Index i) {
    return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

inline Point as_point(const Vector& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const noexcept { return hi - lo; }
    bool contains(double v) const noexcept { return v >= lo && v <= hi; }
    double clamp(double v) const noexcept { return v < lo ? lo : (v > hi ? hi : v); }
};

/// Axis-aligned box in R^p.
struct Box {
    std::vector<Interval> axes;

    std::size_t dim() const noexcept { return axes.size(); }
    double volume() const noexcept;
    bool contains(Point p) const noexcept;
    /// Throws ConfigError when an axis is empty or inverted.
    void validate() const;

    static Box uniform(std::size_t dim, double lo, double hi);
    /// Tight bounding box of the rows of X; degenerate axes are padded by 0.5.
    static Box bounding(const RowMatrix& X);
};

double squared_distance(Point a, Point b) noexcept;

}  // namespace sparsekern
