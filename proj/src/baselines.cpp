#include "sparsekern/baselines.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "sparsekern/error.hpp"
#include "sparsekern/parallel.hpp"

namespace sparsekern {

DiscreteModel ridge_fit(const SampleSet& samples, const KernelSpec& kernel, double w0, double reg) {
    if (!(reg > 0.0)) throw ConfigError("ridge regularization must be positive");
    if (!(w0 > 0.0)) throw DomainError("ridge width must be positive");
    (void)kernel;
    samples.validate();
    Eigen::MatrixXd A = compute::kernel_matrix(samples.X, samples.X, w0);
    A.diagonal().array() += reg;
    const Vector a = Eigen::LDLT<Eigen::MatrixXd>(A).solve(samples.y);
    DiscreteModel m;
    for (std::size_t i = 0; i < samples.size(); ++i)
        m.terms.push_back({a[static_cast<Eigen::Index>(i)], samples.X.row(static_cast<Eigen::Index>(i)).transpose(), w0});
    return m;
}

void KompConfig::validate() const {
    if (const auto* e = std::get_if<KompErrorTarget>(&stop)) {
        if (!(e->mse >= 0.0)) throw ConfigError("KOMP error target must be nonnegative");
    } else if (std::get<KompKernelCount>(stop).count < 1) {
        throw ConfigError("KOMP kernel count must be >= 1");
    }
    if (!(ridge >= 0.0)) throw ConfigError("KOMP ridge must be nonnegative");
}

namespace {

// Least squares on the columns `active` of K through a Householder QR of
// [K_a; sqrt(ridge) I], so the conditioning is that of K_a rather than its square.
struct LsFit {
    Vector a;
    Eigen::MatrixXd R;
    double mse = 0.0;
};

LsFit ls_fit(const RowMatrix& K, const Vector& y, const std::vector<std::size_t>& active, double ridge) {
    const auto n = static_cast<Eigen::Index>(active.size());
    const Eigen::Index rows = K.rows() + (ridge > 0.0 ? n : 0);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, n);
    for (Eigen::Index j = 0; j < n; ++j) A.col(j).head(K.rows()) = K.col(static_cast<Eigen::Index>(active[static_cast<std::size_t>(j)]));
    if (ridge > 0.0) A.bottomRows(n).diagonal().setConstant(std::sqrt(ridge));
    Vector b = Vector::Zero(rows);
    b.head(K.rows()) = y;

    LsFit f;
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    f.R = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    const Vector qtb = (qr.householderQ().transpose() * b).head(n);
    f.a = f.R.triangularView<Eigen::Upper>().solve(qtb);
    Eigen::MatrixXd Ka = A.topRows(K.rows());
    f.mse = (Ka * f.a - y).squaredNorm() / static_cast<double>(y.size());
    return f;
}

bool well_posed(const LsFit& f) {
    if (!f.a.allFinite()) return false;
    const double d0 = f.R.diagonal().cwiseAbs().maxCoeff();
    return f.R.diagonal().cwiseAbs().minCoeff() > 1e-13 * d0;
}

// Plain least squares when the columns are independent enough, otherwise a
// tiny ridge relative to the column scale.
LsFit stable_fit(const RowMatrix& K, const Vector& y, const std::vector<std::size_t>& active, double ridge) {
    LsFit f = ls_fit(K, y, active, ridge);
    if (ridge == 0.0 && !well_posed(f)) f = ls_fit(K, y, active, 1e-12 * K.squaredNorm() / static_cast<double>(K.cols()));
    return f;
}

}  // namespace

double komp_refit(const RowMatrix& K, const Vector& y, const std::vector<std::size_t>& active, double ridge,
                  Vector* amplitudes) {
    if (active.empty()) {
        if (amplitudes) amplitudes->resize(0);
        return y.squaredNorm() / static_cast<double>(y.size());
    }
    LsFit f = stable_fit(K, y, active, ridge);
    if (amplitudes) *amplitudes = f.a;
    return f.mse;
}

KompResult komp_fit(const SampleSet& samples, const KernelSpec& kernel, double w0, const KompConfig& cfg) {
    cfg.validate();
    samples.validate();
    if (!(w0 > 0.0)) throw DomainError("KOMP width must be positive");
    (void)kernel;
    const std::size_t N = samples.size();
    const auto* count = std::get_if<KompKernelCount>(&cfg.stop);
    if (count && count->count > N) throw ConfigError("KOMP kernel count exceeds the number of samples");

    const RowMatrix K = compute::kernel_matrix(samples.X, samples.X, w0);
    KompResult res;
    for (std::size_t i = 0; i < N; ++i) res.survivors.push_back(i);

    while (!res.survivors.empty()) {
        if (count && res.survivors.size() <= count->count) break;
        // Dropping kernel j from the least-squares fit raises the residual sum of
        // squares by a_j^2 / ((R^T R)^-1)_jj, so one factorization ranks every candidate.
        const std::size_t n = res.survivors.size();
        const LsFit f = stable_fit(K, samples.y, res.survivors, cfg.ridge);
        const Eigen::MatrixXd Rinv =
            f.R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(f.R.rows(), f.R.cols()));
        std::size_t best = 0;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t r = 0; r < n; ++r) {
            const auto k = static_cast<Eigen::Index>(r);
            const double cost = f.a[k] * f.a[k] / Rinv.row(k).squaredNorm();
            if (cost < best_cost) {
                best_cost = cost;
                best = r;
            }
        }
        std::vector<std::size_t> trial = res.survivors;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(best));
        const double err_best = komp_refit(K, samples.y, trial, cfg.ridge);
        if (!count && err_best > std::get<KompErrorTarget>(cfg.stop).mse) break;
        res.path.push_back({res.survivors[best], err_best});
        res.survivors = std::move(trial);
    }

    Vector a;
    komp_refit(K, samples.y, res.survivors, cfg.ridge, &a);
    for (std::size_t j = 0; j < res.survivors.size(); ++j)
        res.model.terms.push_back({a[static_cast<Eigen::Index>(j)],
                                   samples.X.row(static_cast<Eigen::Index>(res.survivors[j])).transpose(), w0});
    return res;
}

}  // namespace sparsekern
