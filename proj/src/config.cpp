#include "cryptodyn/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "cryptodyn/models.hpp"

namespace cryptodyn::cli {

using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& problems) {
    std::string out;
    for (const auto& p : problems) {
        if (!out.empty()) out += "; ";
        out += p;
    }
    return out;
}

// Collects every schema violation instead of stopping at the first one.
class Checker {
public:
    void problem(const std::string& path, const std::string& what) { problems_.push_back(path + ": " + what); }
    bool ok() const { return problems_.empty(); }
    std::vector<std::string> take() { return std::move(problems_); }

    void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
        std::set<std::string> keys(allowed.begin(), allowed.end());
        for (const auto& [key, value] : obj.items()) {
            if (!keys.count(key)) problem(path.empty() ? key : path + "." + key, "unknown key");
        }
    }

    bool object(const json& j, const std::string& path) {
        if (!j.is_object()) {
            problem(path, "expected an object");
            return false;
        }
        return true;
    }

    std::optional<double> number(const json& j, const std::string& path) {
        if (!j.is_number()) {
            problem(path, "expected a number");
            return std::nullopt;
        }
        const double v = j.get<double>();
        if (!std::isfinite(v)) {
            problem(path, "must be finite");
            return std::nullopt;
        }
        return v;
    }

    std::optional<long long> integer(const json& j, const std::string& path) {
        if (!j.is_number_integer()) {
            problem(path, "expected an integer");
            return std::nullopt;
        }
        return j.get<long long>();
    }

    std::optional<Matrix> matrix(const json& j, const std::string& path) {
        try {
            Matrix m = matrix_from_json(j);
            if (m.rows() != m.cols()) {
                problem(path, "matrix must be square (" + std::to_string(m.rows()) + "x" +
                                  std::to_string(m.cols()) + ")");
                return std::nullopt;
            }
            return m;
        } catch (const std::exception& e) {
            problem(path, e.what());
            return std::nullopt;
        }
    }

    std::optional<Vector> vector(const json& j, const std::string& path) {
        try {
            return vector_from_json(j);
        } catch (const std::exception& e) {
            problem(path, e.what());
            return std::nullopt;
        }
    }

private:
    std::vector<std::string> problems_;
};

std::size_t line_of(std::string_view doc, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < doc.size(); ++i) line += (doc[i] == '\n');
    return line;
}

std::size_t column_of(std::string_view doc, std::size_t byte) {
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < doc.size(); ++i) col = (doc[i] == '\n') ? 1 : col + 1;
    return col;
}

bool is_evolution(Command c) {
    return c == Command::evolve || c == Command::naive_evolve || c == Command::crosscheck ||
           c == Command::demo;
}

void parse_model(const json& j, RunConfig& cfg, Checker& chk) {
    if (!chk.object(j, "model")) return;
    chk.reject_unknown(j, "model", {"matrix", "taylor", "scenario", "dim"});
    const int sources = static_cast<int>(j.contains("matrix")) + static_cast<int>(j.contains("taylor")) +
                        static_cast<int>(j.contains("scenario"));
    if (sources != 1) chk.problem("model", "exactly one of matrix, taylor, scenario is required");

    if (j.contains("matrix")) {
        if (auto m = chk.matrix(j["matrix"], "model.matrix")) cfg.taylor = {*m};
    }
    if (j.contains("taylor")) {
        const json& t = j["taylor"];
        if (!t.is_array() || t.empty()) {
            chk.problem("model.taylor", "expected a non-empty array of matrices");
        } else {
            for (std::size_t m = 0; m < t.size(); ++m) {
                const std::string path = "model.taylor[" + std::to_string(m) + "]";
                if (auto mat = chk.matrix(t[m], path)) {
                    if (!cfg.taylor.empty() && mat->rows() != cfg.taylor.front().rows()) {
                        chk.problem(path, "dimension " + std::to_string(mat->rows()) + " differs from " +
                                              std::to_string(cfg.taylor.front().rows()));
                    } else {
                        cfg.taylor.push_back(std::move(*mat));
                    }
                }
            }
        }
    }
    if (j.contains("scenario")) {
        if (!j["scenario"].is_string()) {
            chk.problem("model.scenario", "expected a string");
        } else {
            const std::string name = j["scenario"].get<std::string>();
            if (name != "falsification" && name != "falsification-flat" && name != "random-covariant") {
                chk.problem("model.scenario", "unknown scenario '" + name + "'");
            }
            cfg.scenario = name;
        }
    }
    if (j.contains("dim")) {
        if (auto d = chk.integer(j["dim"], "model.dim")) {
            if (*d < 1 || *d > 64) chk.problem("model.dim", "must be in [1, 64]");
            else cfg.scenario_dim = static_cast<int>(*d);
        }
    }
}

void parse_dyson(const json& j, RunConfig& cfg, Checker& chk) {
    if (!chk.object(j, "dyson")) return;
    if (!j.contains("kind") || !j["kind"].is_string()) {
        chk.problem("dyson.kind", "required string: constant or exp_poly");
        return;
    }
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "constant") {
        chk.reject_unknown(j, "dyson", {"kind", "matrix"});
        if (!j.contains("matrix")) {
            chk.problem("dyson.matrix", "required for kind constant");
            return;
        }
        if (auto m = chk.matrix(j["matrix"], "dyson.matrix")) {
            if (condition_number(*m) > 1.0 / kSingularTol) {
                chk.problem("dyson.matrix", "Dyson map must be invertible");
            } else {
                cfg.dyson = DysonFamily::constant(std::move(*m));
            }
        }
    } else if (kind == "exp_poly") {
        chk.reject_unknown(j, "dyson", {"kind", "generator", "theta"});
        std::optional<Matrix> g;
        std::vector<double> theta;
        bool theta_ok = false;
        if (!j.contains("generator")) chk.problem("dyson.generator", "required for kind exp_poly");
        else g = chk.matrix(j["generator"], "dyson.generator");
        if (!j.contains("theta") || !j["theta"].is_array() || j["theta"].empty()) {
            chk.problem("dyson.theta", "required non-empty array of polynomial coefficients");
        } else {
            theta_ok = true;
            for (std::size_t i = 0; i < j["theta"].size(); ++i) {
                auto v = chk.number(j["theta"][i], "dyson.theta[" + std::to_string(i) + "]");
                if (v) theta.push_back(*v);
                else theta_ok = false;
            }
        }
        if (g && theta_ok) cfg.dyson = DysonFamily::exp_poly(std::move(*g), std::move(theta));
    } else {
        chk.problem("dyson.kind", "unknown kind '" + kind + "'");
    }
}

void parse_grid(const json& j, RunConfig& cfg, Checker& chk) {
    if (!chk.object(j, "grid")) return;
    chk.reject_unknown(j, "grid", {"t_start", "t_end", "n_samples"});
    GridConfig g;
    bool complete = true;
    for (const char* key : {"t_start", "t_end", "n_samples"}) {
        if (!j.contains(key)) {
            chk.problem(std::string("grid.") + key, "required");
            complete = false;
        }
    }
    if (!complete) return;
    auto t0 = chk.number(j["t_start"], "grid.t_start");
    auto t1 = chk.number(j["t_end"], "grid.t_end");
    auto n = chk.integer(j["n_samples"], "grid.n_samples");
    if (!t0 || !t1 || !n) return;
    if (!(*t1 > *t0)) chk.problem("grid.t_end", "must exceed t_start");
    if (*n < 2) chk.problem("grid.n_samples", "must be >= 2 for evolution commands");
    g.t_start = *t0;
    g.t_end = *t1;
    g.n_samples = static_cast<int>(*n);
    cfg.grid = g;
}

void parse_scan(const json& j, RunConfig& cfg, Checker& chk) {
    if (!chk.object(j, "scan")) return;
    chk.reject_unknown(j, "scan", {"sampler", "trials", "dim"});
    if (j.contains("sampler")) {
        const auto s = j["sampler"].is_string() ? parse_sampler(j["sampler"].get<std::string>()) : std::nullopt;
        if (!s) chk.problem("scan.sampler", "expected independent, shared or shared-all");
        else cfg.scan.sampler = *s;
    }
    if (j.contains("trials")) {
        if (auto t = chk.integer(j["trials"], "scan.trials")) {
            if (*t < 1) chk.problem("scan.trials", "must be >= 1");
            else cfg.scan.trials = static_cast<int>(*t);
        }
    }
    if (j.contains("dim")) {
        if (auto d = chk.integer(j["dim"], "scan.dim")) {
            if (*d < 1 || *d > 64) chk.problem("scan.dim", "must be in [1, 64]");
            else cfg.scan.dim = static_cast<int>(*d);
        }
    }
}

Eigen::Index model_dim(const RunConfig& cfg) {
    if (!cfg.taylor.empty()) return cfg.taylor.front().rows();
    if (cfg.scenario) return cfg.scenario->rfind("falsification", 0) == 0 ? 2 : cfg.scenario_dim;
    return 0;
}

void validate_command(RunConfig& cfg, Checker& chk, const json& root) {
    const Command c = cfg.command;
    if (c == Command::demo && !root.contains("model")) cfg.scenario = "falsification";
    const bool has_model = !cfg.taylor.empty() || cfg.scenario.has_value();
    const Eigen::Index dim = model_dim(cfg);

    if (c != Command::qs_scan && !has_model && !root.contains("model")) {
        chk.problem("model", "required for command " + std::string(to_string(c)));
    }

    if (c == Command::decompose || c == Command::metric || c == Command::hermitize) {
        if (cfg.scenario) chk.problem("model", "command needs an inline matrix, not a scenario");
    }
    if (c == Command::qs_check) {
        if (cfg.scenario) chk.problem("model", "qs-check needs inline taylor coefficients");
        else if (!cfg.taylor.empty() && cfg.taylor.size() < 2) {
            chk.problem("model.taylor", "qs-check needs degree >= 1 (at least two coefficients)");
        }
    }
    if (is_evolution(c)) {
        if (!cfg.scenario) {
            if (!cfg.dyson) chk.problem("dyson", "required for evolution commands with an inline model");
            if (!cfg.grid) chk.problem("grid", "required for evolution commands with an inline model");
            if (!cfg.step) chk.problem("step", "required for evolution commands with an inline model");
            if (!cfg.initial_state) chk.problem("initial_state", "required for evolution commands with an inline model");
        }
        if (cfg.grid && cfg.step && *cfg.step > 0.0) {
            const double interval = (cfg.grid->t_end - cfg.grid->t_start) / (cfg.grid->n_samples - 1);
            const double ratio = interval / *cfg.step;
            if (std::llround(ratio) < 1 || std::abs(std::llround(ratio) * *cfg.step - interval) > 1e-9 * interval) {
                chk.problem("step", "must divide the grid spacing " + std::to_string(interval));
            }
        }
    }

    if (dim > 0) {
        if (cfg.dyson && cfg.dyson->dim() != dim) chk.problem("dyson", "dimension differs from model");
        if (cfg.kappa && cfg.kappa->size() != dim) chk.problem("kappa", "expected " + std::to_string(dim) + " weights");
        if (cfg.initial_state && cfg.initial_state->size() != dim) chk.problem("initial_state", "dimension differs from model");
        if (cfg.initial_psi && cfg.initial_psi->size() != dim) chk.problem("initial_psi", "dimension differs from model");
    }
}

}  // namespace

ConfigError::ConfigError(Kind kind, std::vector<std::string> problems)
    : std::runtime_error(std::string(kind == Kind::parse ? "ParseError" : "ValidationError") + ": " +
                         join_problems(problems)),
      kind_(kind),
      problems_(std::move(problems)) {}

std::string_view to_string(Command command) noexcept {
    switch (command) {
        case Command::decompose: return "decompose";
        case Command::metric: return "metric";
        case Command::hermitize: return "hermitize";
        case Command::evolve: return "evolve";
        case Command::naive_evolve: return "naive-evolve";
        case Command::crosscheck: return "crosscheck";
        case Command::qs_check: return "qs-check";
        case Command::qs_scan: return "qs-scan";
        case Command::demo: return "demo";
    }
    return "unknown";
}

std::optional<Command> parse_command(std::string_view name) noexcept {
    for (Command c : {Command::decompose, Command::metric, Command::hermitize, Command::evolve,
                      Command::naive_evolve, Command::crosscheck, Command::qs_check, Command::qs_scan,
                      Command::demo}) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(complex_to_json(v(i)));
    return out;
}

json matrix_to_json(const Matrix& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        out.push_back(std::move(row));
    }
    return out;
}

cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
        const cplx z(j[0].get<double>(), j[1].get<double>());
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw std::invalid_argument("non-finite complex number");
        return z;
    }
    throw std::invalid_argument("expected a complex number [re, im] or a real number");
}

Vector vector_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty array of complex numbers");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
    return v;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw std::invalid_argument("expected a non-empty array of rows");
    const std::size_t rows = j.size();
    if (!j[0].is_array() || j[0].empty()) throw std::invalid_argument("row 0 is not a non-empty array");
    const std::size_t cols = j[0].size();
    Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) {
            throw std::invalid_argument("row " + std::to_string(r) + " has a different length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
        }
    }
    return m;
}

RunConfig parse_config(std::string_view document) {
    json root;
    try {
        root = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte > 0 ? e.byte - 1 : 0;
        throw ConfigError(ConfigError::Kind::parse,
                          {"line " + std::to_string(line_of(document, byte)) + ", column " +
                           std::to_string(column_of(document, byte)) + ": " + e.what()});
    }

    Checker chk;
    RunConfig cfg;
    if (!root.is_object()) {
        throw ConfigError(ConfigError::Kind::validation, {"<root>: expected an object"});
    }
    chk.reject_unknown(root, "", {"command", "model", "dyson", "kappa", "initial_state", "initial_psi",
                                  "grid", "step", "tolerances", "scan", "seed", "output"});

    if (!root.contains("command") || !root["command"].is_string()) {
        chk.problem("command", "required string");
        throw ConfigError(ConfigError::Kind::validation, chk.take());
    }
    const auto command = parse_command(root["command"].get<std::string>());
    if (!command) {
        chk.problem("command", "unknown command '" + root["command"].get<std::string>() + "'");
        throw ConfigError(ConfigError::Kind::validation, chk.take());
    }
    cfg.command = *command;

    if (root.contains("model")) parse_model(root["model"], cfg, chk);
    if (root.contains("dyson")) parse_dyson(root["dyson"], cfg, chk);
    if (root.contains("kappa")) {
        const json& k = root["kappa"];
        if (!k.is_array() || k.empty()) {
            chk.problem("kappa", "expected a non-empty array of positive reals");
        } else {
            RealVector kappa(static_cast<Eigen::Index>(k.size()));
            bool good = true;
            for (std::size_t i = 0; i < k.size(); ++i) {
                const std::string path = "kappa[" + std::to_string(i) + "]";
                auto v = chk.number(k[i], path);
                if (!v) {
                    good = false;
                } else if (!(*v > 0.0)) {
                    chk.problem(path, "must be real and positive");
                    good = false;
                } else {
                    kappa(static_cast<Eigen::Index>(i)) = *v;
                }
            }
            if (good) cfg.kappa = kappa;
        }
    }
    if (root.contains("initial_state")) cfg.initial_state = chk.vector(root["initial_state"], "initial_state");
    if (root.contains("initial_psi")) cfg.initial_psi = chk.vector(root["initial_psi"], "initial_psi");
    if (root.contains("grid")) parse_grid(root["grid"], cfg, chk);
    if (root.contains("step")) {
        if (auto s = chk.number(root["step"], "step")) {
            if (!(*s > 0.0)) chk.problem("step", "must be > 0");
            cfg.step = *s;
        }
    }
    if (root.contains("tolerances")) {
        const json& t = root["tolerances"];
        if (chk.object(t, "tolerances")) {
            chk.reject_unknown(t, "tolerances", {"decompose", "qs"});
            if (t.contains("decompose")) {
                if (auto v = chk.number(t["decompose"], "tolerances.decompose")) {
                    if (!(*v > 0.0)) chk.problem("tolerances.decompose", "must be > 0");
                    else cfg.decompose_tol = *v;
                }
            }
            if (t.contains("qs")) {
                if (auto v = chk.number(t["qs"], "tolerances.qs")) {
                    if (!(*v > 0.0)) chk.problem("tolerances.qs", "must be > 0");
                    else cfg.qs_tol = *v;
                }
            }
        }
    }
    if (root.contains("scan")) parse_scan(root["scan"], cfg, chk);
    if (root.contains("seed")) {
        if (!root["seed"].is_number_unsigned()) chk.problem("seed", "expected a non-negative integer");
        else cfg.seed = root["seed"].get<std::uint64_t>();
    }
    if (root.contains("output")) {
        const json& o = root["output"];
        if (chk.object(o, "output")) {
            chk.reject_unknown(o, "output", {"dir", "format"});
            if (o.contains("dir")) {
                if (!o["dir"].is_string()) chk.problem("output.dir", "expected a string");
                else cfg.output_dir = o["dir"].get<std::string>();
            }
            if (o.contains("format")) {
                const std::string f = o["format"].is_string() ? o["format"].get<std::string>() : "";
                if (f == "csv") cfg.delimiter = ',';
                else if (f == "tsv") cfg.delimiter = '\t';
                else chk.problem("output.format", "expected csv or tsv");
            }
        }
    }

    validate_command(cfg, chk, root);
    if (!chk.ok()) throw ConfigError(ConfigError::Kind::validation, chk.take());
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(ConfigError::Kind::parse, {path + ": cannot open config file"});
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace cryptodyn::cli
