// sparsekern: fit, predict, evaluate and reproduce experiments from the shell.
//
//   sparsekern generate remark1 --n 20 --seed 3 --out train.csv
//   sparsekern fit train.csv --variant fixed-width=1 --gamma 1 --out model.json
//   sparsekern eval model.json test.csv --metric mse
//   sparsekern experiment komp_sparsity --scale desk --outdir results/
//
// Exit codes: 0 ok, 2 usage or configuration error, 3 numeric failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "sparsekern/baselines.hpp"
#include "sparsekern/datasets.hpp"
#include "sparsekern/error.hpp"
#include "sparsekern/experiments.hpp"
#include "sparsekern/extraction.hpp"
#include "sparsekern/json_io.hpp"
#include "sparsekern/multiclass.hpp"
#include "sparsekern/parallel.hpp"
#include "sparsekern/solver.hpp"

namespace fs = std::filesystem;
using namespace sparsekern;

namespace {

struct FitArgs {
    std::string data;
    std::string config;
    std::string variant = "full";
    std::string out = "model.json";
    std::optional<double> gamma, eta_lambda, eta_mu, epsilon, clamp_radius, w_lo, w_hi;
    std::optional<std::size_t> iters, batch, trace_every;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> loss, integrator, schedule;
    bool ovo = false;
};

// Centers file: CSV with a header line and one center per row.
RowMatrix read_centers(const fs::path& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path.string(), 0);
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str()) numeric = false;
            row.push_back(v);
        }
        if (!numeric) {
            if (rows.empty()) continue;  // header
            throw ParseError("malformed center row", lineno);
        }
        if (!rows.empty() && row.size() != rows[0].size()) throw ParseError("ragged center row", lineno);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError("no centers in " + path.string(), lineno);
    RowMatrix c(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t k = 0; k < rows[i].size(); ++k) c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
    return c;
}

ProblemVariant parse_variant(const std::string& s) {
    if (s == "full") return ProblemVariant::full();
    const auto eq = s.find('=');
    const std::string key = s.substr(0, eq);
    const std::string val = eq == std::string::npos ? "" : s.substr(eq + 1);
    if (key == "fixed-width" && !val.empty()) {
        char* end = nullptr;
        const double w = std::strtod(val.c_str(), &end);
        if (*end != '\0') throw ConfigError("bad width in --variant " + s);
        return ProblemVariant::fixed_width(w);
    }
    if (key == "fixed-centers" && !val.empty()) return ProblemVariant::fixed_centers(read_centers(val));
    throw ConfigError("--variant must be full, fixed-width=W or fixed-centers=FILE");
}

fs::path sidecar(const fs::path& out, const std::string& suffix) {
    fs::path p = out;
    p.replace_extension();
    return p.string() + suffix;
}

experiments::Pipeline build_pipeline(const FitArgs& a, const SampleSet& train) {
    experiments::Pipeline p;
    p.kernel.center_domain = train.box;
    p.loss.clamp_radius = 1.0;
    if (!a.config.empty()) {
        const auto j = io::read_file(a.config);
        const bool sectioned = j.contains("solver") || j.contains("kernel") || j.contains("loss") || j.contains("peaks");
        p.solver = io::solver_config_from_json(sectioned ? j.value("solver", io::json::object()) : j);
        if (j.contains("kernel")) {
            const auto& k = j.at("kernel");
            p.kernel.width_domain = {k.value("w_lo", p.kernel.width_domain.lo), k.value("w_hi", p.kernel.width_domain.hi)};
            if (k.contains("box")) p.kernel.center_domain = io::box_from_json(k.at("box"));
        }
        if (j.contains("loss")) p.loss = io::loss_from_json(j.at("loss"));
        if (j.contains("peaks")) {
            const auto& pk = j.at("peaks");
            p.peaks.grid = pk.value("grid", p.peaks.grid);
            p.peaks.width_grid = pk.value("width_grid", p.peaks.width_grid);
            p.peaks.refine_steps = pk.value("refine_steps", p.peaks.refine_steps);
            p.peaks.merge_radius = pk.value("merge_radius", p.peaks.merge_radius);
            if (pk.contains("threshold")) p.peaks.threshold = pk.at("threshold").get<double>();
        }
    }
    auto& s = p.solver;
    if (a.gamma) s.gamma = *a.gamma;
    if (a.eta_lambda) s.eta_lambda = *a.eta_lambda;
    if (a.eta_mu) s.eta_mu = *a.eta_mu;
    if (a.iters) s.iterations = *a.iters;
    if (a.batch) s.batch = *a.batch;
    if (a.seed) s.seed = *a.seed;
    if (a.trace_every) s.trace_every = *a.trace_every;
    if (s.trace_every == 0) s.trace_every = std::max<std::size_t>(1, s.iterations / 100);
    if (a.schedule) s.schedule = step_schedule_from_string(*a.schedule);
    if (a.integrator) {
        if (*a.integrator == "quadrature") {
            if (!is_quadrature(s.integrator)) s.integrator = QuadratureRule{};
        } else if (*a.integrator == "mc") {
            s.integrator = MonteCarloRule{s.batch, s.seed};
        } else {
            throw ConfigError("--integrator must be quadrature or mc");
        }
    }
    if (a.loss) p.loss.kind = loss_kind_from_string(*a.loss);
    if (a.epsilon) p.loss.epsilon = *a.epsilon;
    if (a.clamp_radius) p.loss.clamp_radius = *a.clamp_radius;
    if (a.w_lo) p.kernel.width_domain.lo = *a.w_lo;
    if (a.w_hi) p.kernel.width_domain.hi = *a.w_hi;
    p.variant = parse_variant(a.variant);
    return p;
}

int cmd_fit(const FitArgs& a) {
    const SampleSet train = datasets::load_csv(a.data);
    experiments::Pipeline p = build_pipeline(a, train);
    const fs::path out = a.out;

    if (a.ovo) {
        if (!a.loss) p.loss = {LossKind::HingeEps, kDefaultHingeEpsilon, p.loss.clamp_radius};
        const OvoEnsemble ens = ovo_train(train, [&](const SampleSet& pair) {
            experiments::Pipeline q = p;
            if (q.variant.kind == ProblemVariant::Kind::FixedCenters) q.variant.centers = pair.X;
            return experiments::run_pipeline(pair, q).model;
        });
        io::write_file(io::to_json(ens), out);
        std::size_t terms = 0;
        for (const auto& [pair, m] : ens.pairwise) terms += m.size();
        std::printf("models: %zu\nterms: %zu\ntraining accuracy: %.6f\n", ens.pairwise.size(), terms,
                    ovo_accuracy(ens, train));
        return 0;
    }

    const auto res = experiments::run_pipeline(train, p);
    io::write_file(io::to_json(res.model), out);
    io::write_file(io::to_json(res.fit.field), sidecar(out, ".field.json"));
    write_trace_csv(res.fit.state.trace, sidecar(out, ".trace.csv"));

    const Vector pred = res.fit.field.predict_many(train.X, p.solver.integrator);
    double viol = 0.0;
    for (std::size_t i = 0; i < train.size(); ++i)
        viol = std::max(viol, loss_value(p.loss, pred[static_cast<Eigen::Index>(i)], train.y[static_cast<Eigen::Index>(i)]));
    std::printf("terms: %zu\nthreshold: %.17g\nmax_violation: %.17g\n", res.model.size(), res.fit.field.threshold(), viol);
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data, const std::string& out_path) {
    const auto j = io::read_file(model_path);
    const SampleSet s = datasets::load_csv(data);
    std::ofstream file;
    if (!out_path.empty()) {
        file.open(out_path);
        if (!file) throw ConfigError("cannot write " + out_path);
    }
    std::ostream& os = out_path.empty() ? std::cout : file;
    os.precision(17);
    os << "prediction\n";
    if (io::is_ovo(j)) {
        const auto ens = io::ovo_from_json(j);
        for (std::size_t i = 0; i < s.size(); ++i) os << ovo_predict(ens, s.x(i)) << '\n';
    } else {
        const auto m = io::model_from_json(j);
        const Vector p = predict_discrete(m, s.X);
        for (Eigen::Index i = 0; i < p.size(); ++i) os << p[i] << '\n';
    }
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data, const std::string& metric) {
    const auto j = io::read_file(model_path);
    const SampleSet s = datasets::load_csv(data);
    if (metric == "mse") {
        if (io::is_ovo(j)) throw ConfigError("metric mse needs a regression model, got a one-vs-one ensemble");
        std::printf("%.17g\n", mse(io::model_from_json(j), s.X, s.y));
    } else {
        if (!io::is_ovo(j)) throw ConfigError("metric accuracy needs a one-vs-one ensemble");
        std::printf("%.17g\n", ovo_accuracy(io::ovo_from_json(j), s));
    }
    return 0;
}

int cmd_generate(const std::string& kind, std::size_t n, std::uint64_t seed, std::optional<double> noise,
                 const std::string& out, const std::string& truth_out) {
    SampleSet s;
    if (kind == "remark1") {
        s = datasets::gen_remark1(n, seed);
    } else if (kind == "sin_squared" || kind == "sin_squared_uniform") {
        const double sd = noise.value_or(datasets::MixedGaussOptions{}.noise_sd);
        s = datasets::gen_sin_squared(n, sd, seed,
                                      kind == "sin_squared" ? datasets::Sampling::Grid : datasets::Sampling::Uniform);
    } else if (kind == "mixed_gauss") {
        datasets::MixedGaussOptions opt;
        opt.n = n;
        if (noise) opt.noise_sd = *noise;
        auto [set, truth] = datasets::gen_mixed_gauss(opt, seed);
        s = std::move(set);
        if (!truth_out.empty()) io::write_file(io::to_json(truth), truth_out);
    } else {
        throw ConfigError("unknown generator '" + kind + "'");
    }
    datasets::save_csv(s, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse multi-kernel function estimation"};
    app.require_subcommand(1);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Solve the sparse functional program and extract a kernel model");
    fit->add_option("data", fa.data, "training CSV")->required()->check(CLI::ExistingFile);
    fit->add_option("--config", fa.config, "JSON config (solver keys, or sections solver/kernel/loss/peaks)");
    fit->add_option("--variant", fa.variant, "full | fixed-width=W | fixed-centers=FILE");
    fit->add_option("--out", fa.out, "model JSON; the field and trace are written next to it");
    fit->add_option("--gamma", fa.gamma);
    fit->add_option("--eta-lambda", fa.eta_lambda);
    fit->add_option("--eta-mu", fa.eta_mu);
    fit->add_option("--iters", fa.iters);
    fit->add_option("--batch", fa.batch, "Monte-Carlo nodes per step");
    fit->add_option("--seed", fa.seed);
    fit->add_option("--trace-every", fa.trace_every);
    fit->add_option("--schedule", fa.schedule, "constant | inv_sqrt");
    fit->add_option("--loss", fa.loss, "quad | abs | hinge");
    fit->add_option("--epsilon", fa.epsilon);
    fit->add_option("--clamp-radius", fa.clamp_radius);
    fit->add_option("--integrator", fa.integrator, "quadrature | mc");
    fit->add_option("--w-lo", fa.w_lo, "smallest kernel width");
    fit->add_option("--w-hi", fa.w_hi, "largest kernel width");
    fit->add_flag("--ovo", fa.ovo, "one-vs-one classification on integer labels");

    std::string model_path, data_path, pred_out, metric = "mse";
    auto* predict = app.add_subcommand("predict", "Evaluate a saved model on the rows of a CSV");
    predict->add_option("model", model_path)->required()->check(CLI::ExistingFile);
    predict->add_option("data", data_path)->required()->check(CLI::ExistingFile);
    predict->add_option("--out", pred_out, "write predictions here instead of stdout");

    auto* eval = app.add_subcommand("eval", "Print a metric of a saved model on a CSV");
    eval->add_option("model", model_path)->required()->check(CLI::ExistingFile);
    eval->add_option("data", data_path)->required()->check(CLI::ExistingFile);
    eval->add_option("--metric", metric)->check(CLI::IsMember({"mse", "accuracy"}));

    std::string exp_id, scale = "desk", outdir = "results";
    std::uint64_t exp_seed = 1;
    std::optional<std::size_t> reps;
    auto* exp = app.add_subcommand("experiment", "Reproduce an experiment as CSV tables");
    exp->add_option("id", exp_id)->required();
    exp->add_option("--scale", scale)->check(CLI::IsMember({"desk", "paper"}));
    exp->add_option("--seed", exp_seed);
    exp->add_option("--reps", reps, "override the repetition count");
    exp->add_option("--outdir", outdir);

    std::string gen_kind, gen_out, truth_out;
    std::size_t gen_n = 50;
    std::uint64_t gen_seed = 1;
    std::optional<double> gen_noise;
    auto* gen = app.add_subcommand("generate", "Write a synthetic dataset to CSV");
    gen->add_option("kind", gen_kind, "remark1 | mixed_gauss | sin_squared | sin_squared_uniform")->required();
    gen->add_option("--n", gen_n);
    gen->add_option("--seed", gen_seed);
    gen->add_option("--noise-sd", gen_noise);
    gen->add_option("--out", gen_out)->required();
    gen->add_option("--truth", truth_out, "mixed_gauss: also write the ground-truth model JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    compute::configure_threads();
    try {
        if (*fit) return cmd_fit(fa);
        if (*predict) return cmd_predict(model_path, data_path, pred_out);
        if (*eval) return cmd_eval(model_path, data_path, metric);
        if (*gen) return cmd_generate(gen_kind, gen_n, gen_seed, gen_noise, gen_out, truth_out);
        if (*exp) {
            experiments::Options opt;
            opt.scale = experiments::scale_from_string(scale);
            opt.seed = exp_seed;
            opt.repetitions = reps;
            opt.outdir = outdir;
            experiments::run(exp_id, opt);
            std::printf("wrote %s\n", outdir.c_str());
            return 0;
        }
    } catch (const NumericError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
