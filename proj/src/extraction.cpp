#include "sparsekern/extraction.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "sparsekern/error.hpp"
#include "sparsekern/parallel.hpp"

namespace sparsekern {

void PeakConfig::validate() const {
    if (grid < 2 || width_grid < 2) throw ConfigError("peak grid needs at least 2 points per axis");
    if (!(merge_radius > 0.0)) throw ConfigError("merge_radius must be positive");
    if (threshold && !(*threshold >= 0.0)) throw ConfigError("peak threshold must be nonnegative");
}

namespace {

// Search space of one slice: the free coordinates of (z, w) mapped to the unit cube.
// For fixed_centers every candidate center is its own slice with only w free.
struct Slice {
    const AlphaField& field;
    bool free_z;
    bool free_w;
    Vector z0;  // fixed center (fixed_centers)
    double w0;  // fixed width (fixed_width)

    std::size_t dims() const { return (free_z ? field.kernel().dim() : 0) + (free_w ? 1 : 0); }

    void decode(const Vector& u, Vector& z, double& w) const {
        const auto& box = field.kernel().center_domain;
        if (free_z) {
            z.resize(static_cast<Eigen::Index>(box.dim()));
            for (std::size_t k = 0; k < box.dim(); ++k)
                z[static_cast<Eigen::Index>(k)] = box.axes[k].lo + u[static_cast<Eigen::Index>(k)] * box.axes[k].length();
        } else {
            z = z0;
        }
        if (free_w) {
            const auto& wd = field.kernel().width_domain;
            w = wd.lo + u[static_cast<Eigen::Index>(dims() - 1)] * wd.length();
        } else {
            w = w0;
        }
    }

    double value(const Vector& u) const {
        Vector z;
        double w;
        decode(u, z, w);
        return field.abar_unchecked(as_point(z), w);
    }

    // Gradient of abar with respect to u.
    Vector gradient(const Vector& u) const {
        Vector z;
        double w;
        decode(u, z, w);
        const auto& s = field.samples();
        const auto& kernel = field.kernel();
        Vector g = Vector::Zero(static_cast<Eigen::Index>(dims()));
        for (std::size_t i = 0; i < s.size(); ++i) {
            const double l = field.lambda()[static_cast<Eigen::Index>(i)];
            if (l == 0.0) continue;
            const auto kg = kernels::grad(kernel, s.x(i), as_point(z), w);
            if (free_z)
                for (std::size_t k = 0; k < kernel.dim(); ++k)
                    g[static_cast<Eigen::Index>(k)] += l * kg.dz[static_cast<Eigen::Index>(k)] * kernel.center_domain.axes[k].length();
            if (free_w) g[g.size() - 1] += l * kg.dw * kernel.width_length();
        }
        return g;
    }
};

struct Candidate {
    Vector u;
    double value;
    std::size_t slice;
};

std::vector<std::size_t> axis_sizes(const Slice& sl, const PeakConfig& cfg) {
    std::vector<std::size_t> sizes;
    if (sl.free_z) sizes.assign(sl.field.kernel().dim(), cfg.grid);
    if (sl.free_w) sizes.push_back(cfg.width_grid);
    return sizes;
}

Vector grid_point(std::size_t idx, const std::vector<std::size_t>& sizes) {
    Vector u(static_cast<Eigen::Index>(sizes.size()));
    for (std::size_t k = sizes.size(); k-- > 0;) {
        u[static_cast<Eigen::Index>(k)] = static_cast<double>(idx % sizes[k]) / static_cast<double>(sizes[k] - 1);
        idx /= sizes[k];
    }
    return u;
}

// Grid points that dominate their 3^D neighborhood; on plateaus the lowest index wins.
std::vector<std::size_t> grid_maxima(const std::vector<double>& f, const std::vector<std::size_t>& sizes) {
    const std::size_t D = sizes.size();
    std::vector<std::size_t> stride(D, 1);
    for (std::size_t k = D - 1; k-- > 0;) stride[k] = stride[k + 1] * sizes[k + 1];
    std::size_t n_offsets = 1;
    for (std::size_t k = 0; k < D; ++k) n_offsets *= 3;

    std::vector<std::size_t> out;
    std::vector<long> pos(D);
    for (std::size_t idx = 0; idx < f.size(); ++idx) {
        std::size_t rem = idx;
        for (std::size_t k = D; k-- > 0;) {
            pos[k] = static_cast<long>(rem % sizes[k]);
            rem /= sizes[k];
        }
        bool is_max = true;
        for (std::size_t o = 0; o < n_offsets && is_max; ++o) {
            std::size_t code = o;
            long nb = 0;
            bool inside = true;
            bool self = true;
            for (std::size_t k = D; k-- > 0;) {
                const long d = static_cast<long>(code % 3) - 1;
                code /= 3;
                const long p = pos[k] + d;
                if (d != 0) self = false;
                if (p < 0 || p >= static_cast<long>(sizes[k])) inside = false;
                nb += p * static_cast<long>(stride[k]);
            }
            if (self || !inside) continue;
            const auto j = static_cast<std::size_t>(nb);
            if (j < idx ? !(f[idx] > f[j]) : !(f[idx] >= f[j])) is_max = false;
        }
        if (is_max) out.push_back(idx);
    }
    return out;
}

// Projected ascent on |abar| in unit coordinates; the value never decreases.
void refine(const Slice& sl, Candidate& c, const PeakConfig& cfg) {
    double step = 1.0 / static_cast<double>(std::max(cfg.grid, cfg.width_grid) - 1);
    double f = std::abs(c.value);
    for (std::size_t it = 0; it < cfg.refine_steps; ++it) {
        Vector g = sl.gradient(c.u);
        if (c.value < 0.0) g = -g;
        const double gn = g.norm();
        if (!(gn > 0.0)) break;
        const Vector dir = g / gn;
        bool moved = false;
        while (step > 1e-12) {
            const Vector trial = (c.u + step * dir).cwiseMax(0.0).cwiseMin(1.0);
            const double v = sl.value(trial);
            if (std::abs(v) > f) {
                c.u = trial;
                c.value = v;
                f = std::abs(v);
                step = std::min(2.0 * step, 0.25);
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) break;
    }
}

}  // namespace

std::vector<Peak> find_peaks(const AlphaField& field, const PeakConfig& cfg) {
    cfg.validate();
    const double thr = cfg.threshold.value_or(field.threshold());
    if (field.lambda().isZero(0.0)) return {};

    const auto& variant = field.variant();
    std::vector<Slice> slices;
    using Kind = ProblemVariant::Kind;
    if (variant.kind == Kind::FixedCenters) {
        for (Eigen::Index j = 0; j < variant.centers.rows(); ++j)
            slices.push_back({field, false, true, variant.centers.row(j).transpose(), 0.0});
    } else {
        slices.push_back({field, true, variant.kind == Kind::Full, Vector(), variant.width});
    }

    std::vector<Candidate> cands;
    for (std::size_t s = 0; s < slices.size(); ++s) {
        const Slice& sl = slices[s];
        const auto sizes = axis_sizes(sl, cfg);
        std::size_t total = 1;
        for (auto n : sizes) total *= n;
        std::vector<double> f(total);
        const auto total_i = static_cast<long>(total);
#pragma omp parallel for schedule(static)
        for (long idx = 0; idx < total_i; ++idx)
            f[static_cast<std::size_t>(idx)] = std::abs(sl.value(grid_point(static_cast<std::size_t>(idx), sizes)));
        for (std::size_t idx : grid_maxima(f, sizes)) {
            Vector u = grid_point(idx, sizes);
            cands.push_back({u, sl.value(u), s});
        }
    }

    const auto n_cands = static_cast<long>(cands.size());
#pragma omp parallel for schedule(dynamic)
    for (long c = 0; c < n_cands; ++c) {
        auto& cand = cands[static_cast<std::size_t>(c)];
        refine(slices[cand.slice], cand, cfg);
    }

    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return std::abs(a.value) > std::abs(b.value); });

    std::vector<Peak> kept;
    std::vector<std::size_t> kept_slice;
    for (const auto& c : cands) {
        if (!(std::abs(c.value) > thr)) continue;
        Peak p;
        slices[c.slice].decode(c.u, p.z, p.w);
        p.value = c.value;
        p.center_index = variant.kind == Kind::FixedCenters ? c.slice : 0;
        bool merged = false;
        for (std::size_t q = 0; q < kept.size() && !merged; ++q) {
            if (kept_slice[q] != c.slice) continue;
            const double d2 = (p.z - kept[q].z).squaredNorm() + (p.w - kept[q].w) * (p.w - kept[q].w);
            const double r = cfg.merge_radius * kept[q].w;
            merged = d2 < r * r;
        }
        if (!merged) {
            kept.push_back(std::move(p));
            kept_slice.push_back(c.slice);
        }
    }
    return kept;
}

DiscreteModel refit_amplitudes(const std::vector<Peak>& peaks, const SampleSet& samples, double ridge,
                               RefitReport* report) {
    if (!(ridge >= 0.0)) throw ConfigError("ridge must be nonnegative");
    DiscreteModel model;
    if (peaks.empty()) return model;

    RowMatrix Z(static_cast<Eigen::Index>(peaks.size()), static_cast<Eigen::Index>(samples.dim()));
    Vector W(static_cast<Eigen::Index>(peaks.size()));
    for (std::size_t j = 0; j < peaks.size(); ++j) {
        Z.row(static_cast<Eigen::Index>(j)) = peaks[j].z.transpose();
        W[static_cast<Eigen::Index>(j)] = peaks[j].w;
    }
    const RowMatrix K = compute::kernel_matrix(samples.X, Z, W);
    const Eigen::MatrixXd G = K.transpose() * K;
    const Vector rhs = K.transpose() * samples.y;

    bool deficient = false;
    if (ridge == 0.0) {
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(K);
        deficient = qr.rank() < K.cols();
    }
    double r = ridge;
    if (deficient) r = 1e-8;
    Vector a;
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd A = G;
        A.diagonal().array() += r;
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() == Eigen::Success) {
            a = llt.solve(rhs);
            if (a.allFinite()) break;
        }
        deficient = true;
        r = std::max(r * 100.0, 1e-8);
    }
    if (!a.allFinite() || a.size() != W.size()) throw NumericError("least-squares refit failed");
    if (report) *report = {r, deficient};

    for (std::size_t j = 0; j < peaks.size(); ++j)
        model.terms.push_back({a[static_cast<Eigen::Index>(j)], peaks[j].z, peaks[j].w});
    return model;
}

DiscreteModel extract_model(const AlphaField& field, const PeakConfig& cfg, double ridge) {
    const auto peaks = find_peaks(field, cfg);
    return refit_amplitudes(peaks, field.samples(), ridge);
}

}  // namespace sparsekern
