#include "sparsekern/json_io.hpp"

#include <fstream>

#include "sparsekern/error.hpp"

namespace sparsekern::io {

namespace {

template <class T>
T get(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'", 0);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field '") + key + "': " + e.what(), 0);
    }
}

json vec(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

json matrix(const RowMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec(m.row(r).transpose()));
    return rows;
}

RowMatrix to_matrix(const json& j) {
    if (!j.is_array()) throw ParseError("expected an array of rows", 0);
    const auto rows = j.get<std::vector<std::vector<double>>>();
    const std::size_t cols = rows.empty() ? 0 : rows[0].size();
    RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw ParseError("ragged matrix", 0);
        for (std::size_t c = 0; c < cols; ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
}

}  // namespace

json to_json(const Box& box) {
    json j = json::array();
    for (const auto& a : box.axes) j.push_back({a.lo, a.hi});
    return j;
}

Box box_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("box must be an array of [lo, hi] pairs", 0);
    Box b;
    for (const auto& ax : j) {
        const auto p = ax.get<std::vector<double>>();
        if (p.size() != 2) throw ParseError("box axis must be [lo, hi]", 0);
        b.axes.push_back({p[0], p[1]});
    }
    return b;
}

json to_json(const KernelSpec& k) {
    return {{"family", to_string(k.family)},
            {"w_lo", k.width_domain.lo},
            {"w_hi", k.width_domain.hi},
            {"box", to_json(k.center_domain)}};
}

KernelSpec kernel_from_json(const json& j) {
    KernelSpec k;
    k.family = kernel_family_from_string(j.value("family", std::string("gaussian")));
    k.width_domain = {get<double>(j, "w_lo"), get<double>(j, "w_hi")};
    k.center_domain = box_from_json(j.at("box"));
    return k;
}

json to_json(const Loss& l) {
    return {{"kind", to_string(l.kind)}, {"epsilon", l.epsilon}, {"clamp_radius", l.clamp_radius}};
}

Loss loss_from_json(const json& j) {
    Loss l;
    l.kind = loss_kind_from_string(get<std::string>(j, "kind"));
    l.epsilon = j.value("epsilon", l.epsilon);
    l.clamp_radius = j.value("clamp_radius", l.clamp_radius);
    return l;
}

json to_json(const DiscreteModel& m) {
    json terms = json::array();
    for (const auto& t : m.terms) terms.push_back({{"a", t.a}, {"z", vec(t.z)}, {"w", t.w}});
    return {{"terms", terms}};
}

DiscreteModel model_from_json(const json& j) {
    DiscreteModel m;
    const auto terms = j.contains("terms") ? j.at("terms") : throw ParseError("missing field 'terms'", 0);
    if (!terms.is_array()) throw ParseError("'terms' must be an array", 0);
    for (const auto& t : terms)
        m.terms.push_back({get<double>(t, "a"), to_vector(get<std::vector<double>>(t, "z")), get<double>(t, "w")});
    return m;
}

json to_json(const ProblemVariant& v) {
    json j = {{"kind", to_string(v.kind)}};
    if (v.kind == ProblemVariant::Kind::FixedWidth) j["width"] = v.width;
    if (v.kind == ProblemVariant::Kind::FixedCenters) j["centers"] = matrix(v.centers);
    return j;
}

ProblemVariant variant_from_json(const json& j) {
    const auto kind = get<std::string>(j, "kind");
    if (kind == "full") return ProblemVariant::full();
    if (kind == "fixed_width") return ProblemVariant::fixed_width(get<double>(j, "width"));
    if (kind == "fixed_centers") return ProblemVariant::fixed_centers(to_matrix(j.at("centers")));
    throw ParseError("unknown variant '" + kind + "'", 0);
}

json to_json(const SolverConfig& c) {
    json j = {{"gamma", c.gamma},         {"eta_lambda", c.eta_lambda}, {"eta_mu", c.eta_mu},
              {"iterations", c.iterations}, {"batch", c.batch},           {"seed", c.seed},
              {"mu_floor", c.mu_floor},    {"mu_init", c.mu_init},       {"trace_every", c.trace_every},
              {"schedule", to_string(c.schedule)}};
    if (const auto* q = std::get_if<QuadratureRule>(&c.integrator)) {
        j["integrator"] = {{"kind", "quadrature"}, {"center_points", q->center_points}, {"width_points", q->width_points}};
    } else {
        const auto& mc = std::get<MonteCarloRule>(c.integrator);
        j["integrator"] = {{"kind", "monte_carlo"}, {"batch", mc.batch}, {"seed", mc.seed}};
    }
    return j;
}

SolverConfig solver_config_from_json(const json& j, SolverConfig c) {
    if (!j.is_object()) throw ParseError("solver config must be an object", 0);
    try {
        c.gamma = j.value("gamma", c.gamma);
        c.eta_lambda = j.value("eta_lambda", c.eta_lambda);
        c.eta_mu = j.value("eta_mu", c.eta_mu);
        c.iterations = j.value("iterations", c.iterations);
        c.batch = j.value("batch", c.batch);
        c.seed = j.value("seed", c.seed);
        c.mu_floor = j.value("mu_floor", c.mu_floor);
        c.mu_init = j.value("mu_init", c.mu_init);
        c.trace_every = j.value("trace_every", c.trace_every);
        if (j.contains("schedule")) c.schedule = step_schedule_from_string(j.at("schedule").get<std::string>());
        if (j.contains("integrator")) {
            const auto& i = j.at("integrator");
            const auto kind = i.value("kind", std::string("quadrature"));
            if (kind == "quadrature") {
                QuadratureRule q;
                q.center_points = i.value("center_points", q.center_points);
                q.width_points = i.value("width_points", q.width_points);
                c.integrator = q;
            } else if (kind == "monte_carlo" || kind == "mc") {
                MonteCarloRule mc;
                mc.batch = i.value("batch", c.batch);
                mc.seed = i.value("seed", mc.seed);
                c.integrator = mc;
            } else {
                throw ParseError("unknown integrator '" + kind + "'", 0);
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad solver config: ") + e.what(), 0);
    }
    return c;
}

json to_json(const SampleSet& s) { return {{"X", matrix(s.X)}, {"y", vec(s.y)}, {"box", to_json(s.box)}}; }

SampleSet samples_from_json(const json& j) {
    SampleSet s;
    s.X = to_matrix(j.at("X"));
    s.y = to_vector(get<std::vector<double>>(j, "y"));
    s.box = box_from_json(j.at("box"));
    return s;
}

json to_json(const AlphaField& f) {
    return {{"samples", to_json(f.samples())},
            {"lambda", vec(f.lambda())},
            {"gamma", f.gamma()},
            {"threshold", f.threshold()},
            {"kernel", to_json(f.kernel())},
            {"variant", to_json(f.variant())}};
}

AlphaField field_from_json(const json& j) {
    try {
        return AlphaField(samples_from_json(j.at("samples")), to_vector(get<std::vector<double>>(j, "lambda")),
                          get<double>(j, "gamma"), kernel_from_json(j.at("kernel")), variant_from_json(j.at("variant")));
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad field file: ") + e.what(), 0);
    }
}

json to_json(const OvoEnsemble& e) {
    json pairs = json::array();
    for (const auto& [p, m] : e.pairwise) pairs.push_back({{"a", p.first}, {"b", p.second}, {"model", to_json(m)}});
    return {{"kind", "ovo"}, {"classes", e.classes}, {"pairwise", pairs}};
}

bool is_ovo(const json& j) { return j.is_object() && j.value("kind", std::string()) == "ovo"; }

OvoEnsemble ovo_from_json(const json& j) {
    if (!is_ovo(j)) throw ParseError("not a one-vs-one ensemble", 0);
    OvoEnsemble e;
    e.classes = get<std::vector<double>>(j, "classes");
    for (const auto& p : j.at("pairwise"))
        e.pairwise.emplace(std::make_pair(get<double>(p, "a"), get<double>(p, "b")), model_from_json(p.at("model")));
    return e;
}

json read_file(const std::filesystem::path& path) {
    std::ifstream f(path);
    if (!f) throw ParseError("cannot open " + path.string(), 0);
    try {
        return json::parse(f);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

void write_file(const json& j, const std::filesystem::path& path) {
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write " + path.string());
    f << j.dump(2) << '\n';
}

}  // namespace sparsekern::io
