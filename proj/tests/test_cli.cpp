#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "sparsekern/datasets.hpp"
#include "sparsekern/experiments.hpp"
#include "sparsekern/json_io.hpp"

using namespace sparsekern;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = -1;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(SPARSEKERN_CLI) + " " + args + " 2>/dev/null";
    Run r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), buf.size(), p)) r.out += buf.data();
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// Value printed after "key: " on its own line.
double field(const std::string& out, const std::string& key) {
    std::istringstream is(out);
    std::string line;
    while (std::getline(is, line))
        if (line.rfind(key + ": ", 0) == 0) return std::stod(line.substr(key.size() + 2));
    FAIL("missing key " << key);
    return 0.0;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("sparsekern_cli_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& f) const { return (path / f).string(); }
};

// Config file carrying the Remark-1 preset.
void write_remark1_config(const std::string& path) {
    const auto p = experiments::remark1_pipeline();
    io::json j;
    j["solver"] = io::to_json(p.solver);
    j["loss"] = io::to_json(p.loss);
    j["kernel"] = {{"w_lo", p.kernel.width_domain.lo}, {"w_hi", p.kernel.width_domain.hi}};
    io::write_file(j, path);
}

}  // namespace

TEST_CASE("fit on Remark-1 data recovers one kernel and is reproducible") {
    TempDir d("remark1");
    REQUIRE(run("generate remark1 --n 20 --seed 3 --out " + (d / "train.csv")).code == 0);
    write_remark1_config(d / "cfg.json");
    const std::string base = "fit " + (d / "train.csv") + " --config " + (d / "cfg.json") + " --variant fixed-width=1";
    const Run a = run(base + " --out " + (d / "a.json"));
    REQUIRE(a.code == 0);
    CHECK(field(a.out, "terms") == 1.0);
    CHECK(field(a.out, "threshold") == doctest::Approx(std::sqrt(2.0)));
    CHECK(fs::exists(d / "a.field.json"));
    CHECK(fs::exists(d / "a.trace.csv"));
    CHECK(slurp(d / "a.trace.csv").rfind("t,g_estimate,dlambda_norm,max_violation\n", 0) == 0);

    const Run b = run(base + " --out " + (d / "b.json"));
    REQUIRE(b.code == 0);
    CHECK(slurp(d / "a.json") == slurp(d / "b.json"));
    CHECK(slurp(d / "a.field.json") == slurp(d / "b.field.json"));

    // The reported violation is reproducible from the saved field.
    const AlphaField f = io::field_from_json(io::read_file(d / "a.field.json"));
    const auto pipe = experiments::remark1_pipeline();
    const Vector pred = f.predict_many(f.samples().X, pipe.solver.integrator);
    double viol = 0.0;
    for (Eigen::Index i = 0; i < pred.size(); ++i) viol = std::max(viol, loss_value(pipe.loss, pred[i], f.samples().y[i]));
    CHECK(std::abs(field(a.out, "max_violation") - viol) < 1e-9);
    CHECK(viol <= 1e-3);

    const Run e = run("eval " + (d / "a.json") + " " + (d / "train.csv") + " --metric mse");
    REQUIRE(e.code == 0);
    CHECK(std::stod(e.out) < 1e-3);

    const Run pr = run("predict " + (d / "a.json") + " " + (d / "train.csv"));
    REQUIRE(pr.code == 0);
    CHECK(pr.out.rfind("prediction\n", 0) == 0);
    CHECK(std::count(pr.out.begin(), pr.out.end(), '\n') == 21);
}

TEST_CASE("gamma zero gives a zero threshold") {
    TempDir d("gamma0");
    REQUIRE(run("generate remark1 --n 10 --seed 1 --out " + (d / "train.csv")).code == 0);
    const Run r = run("fit " + (d / "train.csv") + " --variant fixed-width=1 --gamma 0 --iters 50 --out " + (d / "m.json"));
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "threshold") == 0.0);
}

TEST_CASE("empty model on zero labels has zero error") {
    TempDir d("empty");
    std::ofstream(d / "data.csv") << "x1,y\n0.5,0\n1.5,0\n";
    std::ofstream(d / "m.json") << R"({"terms": []})";
    const Run r = run("eval " + (d / "m.json") + " " + (d / "data.csv") + " --metric mse");
    REQUIRE(r.code == 0);
    CHECK(std::stod(r.out) == 0.0);
}

TEST_CASE("usage errors exit with code 2") {
    TempDir d("errors");
    std::ofstream(d / "data.csv") << "x1,y\n0.5,1\n1.5,2\n";
    std::ofstream(d / "m.json") << R"({"terms": []})";
    CHECK(run("eval " + (d / "m.json") + " " + (d / "data.csv") + " --metric accuracy").code == 2);
    CHECK(run("experiment no_such_experiment").code == 2);
    CHECK(run("fit " + (d / "data.csv") + " --variant diagonal").code == 2);
    CHECK(run("fit " + (d / "missing.csv")).code == 2);
    CHECK(run("").code == 2);
}

TEST_CASE("diverging solver exits with code 3") {
    TempDir d("diverge");
    REQUIRE(run("generate remark1 --n 10 --seed 1 --out " + (d / "train.csv")).code == 0);
    const Run r = run("fit " + (d / "train.csv") + " --gamma 0 --eta-lambda 1e300 --eta-mu 1e300 --iters 50 --out " +
                      (d / "m.json"));
    CHECK(r.code == 3);
}
