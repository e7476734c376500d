#include "sparsekern/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "sparsekern/error.hpp"
#include "sparsekern/model.hpp"
#include "sparsekern/quadrature.hpp"

namespace sparsekern {

void SampleSet::validate() const {
    if (y.size() == 0) throw ConfigError("sample set is empty");
    if (X.rows() != y.size()) throw ConfigError("X and y have different lengths");
    if (X.cols() < 1) throw ConfigError("samples need at least one feature");
    if (box.dim() != dim()) throw ConfigError("box dimension does not match the samples");
    box.validate();
    for (std::size_t i = 0; i < size(); ++i) {
        if (!box.contains(x(i))) throw ConfigError("sample " + std::to_string(i) + " lies outside the box");
        if (!std::isfinite(y[static_cast<Eigen::Index>(i)])) throw ConfigError("non-finite label at sample " + std::to_string(i));
    }
}

SampleSet SampleSet::subset(const std::vector<std::size_t>& idx) const {
    SampleSet s;
    s.box = box;
    s.X.resize(static_cast<Eigen::Index>(idx.size()), X.cols());
    s.y.resize(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(idx[k]);
        if (r >= X.rows()) throw ConfigError("subset index out of range");
        s.X.row(static_cast<Eigen::Index>(k)) = X.row(r);
        s.y[static_cast<Eigen::Index>(k)] = y[r];
    }
    return s;
}

bool SampleSet::operator==(const SampleSet& o) const {
    if (X.rows() != o.X.rows() || X.cols() != o.X.cols() || box.dim() != o.box.dim()) return false;
    for (std::size_t k = 0; k < box.dim(); ++k)
        if (box.axes[k].lo != o.box.axes[k].lo || box.axes[k].hi != o.box.axes[k].hi) return false;
    return X == o.X && y == o.y;
}

namespace datasets {

namespace {

RowMatrix uniform_points(const Box& box, std::size_t n, std::mt19937_64& rng) {
    RowMatrix X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(box.dim()));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < box.dim(); ++k) {
            std::uniform_real_distribution<double> u(box.axes[k].lo, box.axes[k].hi);
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = u(rng);
        }
    return X;
}

double noise(double sd, std::mt19937_64& rng) {
    if (sd == 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sd)(rng);
}

}  // namespace

std::pair<SampleSet, DiscreteModel> gen_mixed_gauss(const MixedGaussOptions& opt, std::uint64_t seed) {
    if (opt.m < 1 || opt.n < 1) throw ConfigError("mixed-Gaussian generator needs m, n >= 1");
    if (!(opt.w0 > 0.0)) throw ConfigError("w0 must be positive");
    if (opt.box.dim() != opt.dim) throw ConfigError("box dimension does not match dim");
    std::mt19937_64 rng(seed);
    DiscreteModel truth;
    std::uniform_real_distribution<double> amp(opt.amplitude_range.lo, opt.amplitude_range.hi);
    std::uniform_real_distribution<double> ctr(opt.center_range.lo, opt.center_range.hi);
    for (std::size_t j = 0; j < opt.m; ++j) {
        Term t;
        t.a = amp(rng);
        t.z.resize(static_cast<Eigen::Index>(opt.dim));
        for (std::size_t k = 0; k < opt.dim; ++k) t.z[static_cast<Eigen::Index>(k)] = ctr(rng);
        t.w = opt.w0;
        truth.terms.push_back(std::move(t));
    }
    SampleSet s = sample_model(truth, opt.box, opt.n, opt.noise_sd, rng());
    return {std::move(s), std::move(truth)};
}

SampleSet sample_model(const DiscreteModel& truth, const Box& box, std::size_t n, double noise_sd,
                       std::uint64_t seed) {
    if (n < 1) throw ConfigError("need at least one sample");
    std::mt19937_64 rng(seed);
    SampleSet s;
    s.box = box;
    s.X = uniform_points(box, n, rng);
    s.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) s.y[static_cast<Eigen::Index>(i)] = predict_discrete(truth, s.x(i));
    for (std::size_t i = 0; i < n; ++i) s.y[static_cast<Eigen::Index>(i)] += noise(noise_sd, rng);
    return s;
}

SampleSet gen_sin_squared(std::size_t n, double noise_sd, std::uint64_t seed, Sampling sampling) {
    if (n < 1) throw ConfigError("need at least one sample");
    std::mt19937_64 rng(seed);
    SampleSet s;
    s.box = Box::uniform(1, -5.0, 5.0);
    if (sampling == Sampling::Grid) {
        const auto g = linspace(-5.0, 5.0, n);
        s.X = Eigen::Map<const Vector>(g.data(), static_cast<Eigen::Index>(n));
    } else {
        s.X = uniform_points(s.box, n, rng);
    }
    s.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        s.y[static_cast<Eigen::Index>(i)] = sin_squared(s.X(static_cast<Eigen::Index>(i), 0)) + noise(noise_sd, rng);
    return s;
}

SampleSet gen_remark1(std::size_t n, std::uint64_t seed) {
    if (n < 2) throw ConfigError("the Remark-1 dataset needs at least two samples");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    SampleSet s;
    s.box = Box::uniform(1, 0.0, 5.0);
    s.X.resize(static_cast<Eigen::Index>(n), 1);
    s.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        double x = 2.5;
        while (x == 2.5) x = u(rng);
        s.X(static_cast<Eigen::Index>(i), 0) = x;
        s.y[static_cast<Eigen::Index>(i)] = remark1_signal(x);
    }
    return s;
}

KMeansResult kmeans(const RowMatrix& points, std::size_t k, std::uint64_t seed, int max_iter) {
    const auto M = static_cast<std::size_t>(points.rows());
    if (k < 1 || k > M) throw ConfigError("k-means needs 1 <= k <= number of points");
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(M);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    KMeansResult res;
    res.centers.resize(static_cast<Eigen::Index>(k), points.cols());
    for (std::size_t c = 0; c < k; ++c) res.centers.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(order[c]));
    res.assignment.assign(M, k);

    std::vector<double> dist(M);
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        double obj = 0.0;
        for (std::size_t i = 0; i < M; ++i) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < k; ++c) {
                const double d = (points.row(static_cast<Eigen::Index>(i)) - res.centers.row(static_cast<Eigen::Index>(c))).squaredNorm();
                if (d < bd) {
                    bd = d;
                    best = c;
                }
            }
            if (res.assignment[i] != best) changed = true;
            res.assignment[i] = best;
            dist[i] = bd;
            obj += bd;
        }
        res.objective_history.push_back(obj);
        if (!changed) break;

        RowMatrix sum = RowMatrix::Zero(static_cast<Eigen::Index>(k), points.cols());
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < M; ++i) {
            sum.row(static_cast<Eigen::Index>(res.assignment[i])) += points.row(static_cast<Eigen::Index>(i));
            ++count[res.assignment[i]];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] > 0) {
                res.centers.row(static_cast<Eigen::Index>(c)) = sum.row(static_cast<Eigen::Index>(c)) / static_cast<double>(count[c]);
            } else {
                const auto far = static_cast<std::size_t>(std::max_element(dist.begin(), dist.end()) - dist.begin());
                res.centers.row(static_cast<Eigen::Index>(c)) = points.row(static_cast<Eigen::Index>(far));
                dist[far] = 0.0;
            }
        }
    }
    return res;
}

namespace {

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

bool parse_double(std::string s, double& v) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    s = s.substr(b);
    if (s.empty()) return false;
    char* end = nullptr;
    v = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size();
}

}  // namespace

SampleSet load_csv(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path.string(), 0);
    std::string line;
    std::size_t lineno = 0;
    std::optional<Box> box;
    std::vector<std::vector<double>> rows;
    std::size_t cols = 0;
    bool header_seen = false;

    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto pos = line.find("box=");
            if (pos == std::string::npos) continue;
            Box b;
            for (const auto& ax : split_fields(line.substr(pos + 4), ',')) {
                const auto c = ax.find(':');
                double lo = 0.0, hi = 0.0;
                if (c == std::string::npos || !parse_double(ax.substr(0, c), lo) || !parse_double(ax.substr(c + 1), hi))
                    throw ParseError("malformed box comment", lineno);
                b.axes.push_back({lo, hi});
            }
            box = b;
            continue;
        }
        const auto fields = split_fields(line, ',');
        std::vector<double> vals(fields.size());
        bool numeric = true;
        for (std::size_t k = 0; k < fields.size() && numeric; ++k) numeric = parse_double(fields[k], vals[k]);
        if (!header_seen && rows.empty() && !numeric) {
            header_seen = true;
            cols = fields.size();
            if (cols < 2) throw ParseError("header needs at least one feature and a label", lineno);
            continue;
        }
        if (!numeric) throw ParseError("malformed row", lineno);
        if (cols == 0) cols = vals.size();
        if (vals.size() != cols || cols < 2)
            throw ParseError("expected " + std::to_string(cols) + " fields, got " + std::to_string(vals.size()), lineno);
        for (double v : vals)
            if (!std::isfinite(v)) throw ParseError("non-finite value", lineno);
        rows.push_back(std::move(vals));
    }
    if (rows.empty()) throw ParseError("no data rows in " + path.string(), lineno);

    SampleSet s;
    s.X.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols - 1));
    s.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t k = 0; k + 1 < cols; ++k) s.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
        s.y[static_cast<Eigen::Index>(i)] = rows[i][cols - 1];
    }
    if (box) {
        if (box->dim() != cols - 1) throw ParseError("box dimension does not match the columns", 1);
        s.box = *box;
    } else {
        s.box = Box::bounding(s.X);
    }
    s.validate();
    return s;
}

void save_csv(const SampleSet& set, const std::filesystem::path& path, bool label_column) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) throw ConfigError("cannot write " + path.string());
    std::fprintf(f, "# box=");
    for (std::size_t k = 0; k < set.box.dim(); ++k)
        std::fprintf(f, "%s%.17g:%.17g", k ? "," : "", set.box.axes[k].lo, set.box.axes[k].hi);
    std::fprintf(f, "\n");
    for (std::size_t k = 0; k < set.dim(); ++k) std::fprintf(f, "x%zu,", k + 1);
    std::fprintf(f, "%s\n", label_column ? "label" : "y");
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t k = 0; k < set.dim(); ++k)
            std::fprintf(f, "%.17g,", set.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)));
        std::fprintf(f, "%.17g\n", set.y[static_cast<Eigen::Index>(i)]);
    }
    std::fclose(f);
}

std::pair<SampleSet, SampleSet> split(const SampleSet& set, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
    const std::size_t n = set.size();
    const auto first = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    if (first == 0 || first == n) throw ConfigError("split would leave one part empty");
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    std::vector<std::size_t> a(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(first));
    std::vector<std::size_t> b(idx.begin() + static_cast<std::ptrdiff_t>(first), idx.end());
    return {set.subset(a), set.subset(b)};
}

std::vector<std::vector<std::size_t>> k_folds(const SampleSet& set, std::size_t k, std::uint64_t seed,
                                              bool stratified) {
    const std::size_t n = set.size();
    if (k < 2 || k > n) throw ConfigError("fold count must lie in [2, N]");
    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::size_t>> groups;
    if (stratified) {
        std::map<double, std::vector<std::size_t>> by_label;
        for (std::size_t i = 0; i < n; ++i) by_label[set.y[static_cast<Eigen::Index>(i)]].push_back(i);
        for (auto& [label, g] : by_label) groups.push_back(std::move(g));
    } else {
        groups.emplace_back(n);
        std::iota(groups[0].begin(), groups[0].end(), 0);
    }
    std::vector<std::vector<std::size_t>> folds(k);
    std::size_t deal = 0;
    for (auto& g : groups) {
        std::shuffle(g.begin(), g.end(), rng);
        for (std::size_t i : g) folds[deal++ % k].push_back(i);
    }
    for (auto& f : folds) std::sort(f.begin(), f.end());
    return folds;
}

}  // namespace datasets
}  // namespace sparsekern
