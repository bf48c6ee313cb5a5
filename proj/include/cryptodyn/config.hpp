#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cryptodyn/dyson_family.hpp"
#include "cryptodyn/operator_core.hpp"
#include "cryptodyn/quasistationary.hpp"

// Run configuration for the command-line front end.
//
// A config is one JSON document. Complex numbers are [re, im] (a bare number
// is read as real), vectors are arrays of complex numbers and matrices are
// row-major arrays of rows. Unknown keys are rejected at every level.
//
//   {
//     "command": "evolve",
//     "model": {"taylor": [H0, H1, ...]} | {"matrix": H} | {"scenario": "falsification"},
//     "dyson": {"kind": "constant", "matrix": W}
//            | {"kind": "exp_poly", "generator": G, "theta": [t0, t1, ...]},
//     "kappa": [k1, ..., kN],
//     "initial_state": [...], "initial_psi": [...],
//     "grid": {"t_start": 0, "t_end": 1, "n_samples": 11},
//     "step": 1e-3,
//     "tolerances": {"decompose": 1e-10, "qs": 1e-8},
//     "scan": {"sampler": "independent", "trials": 100, "dim": 4},
//     "seed": 7,
//     "output": {"dir": "out", "format": "csv"}
//   }

namespace cryptodyn::cli {

enum class Command { decompose, metric, hermitize, evolve, naive_evolve, crosscheck, qs_check, qs_scan, demo };

std::string_view to_string(Command command) noexcept;
std::optional<Command> parse_command(std::string_view name) noexcept;

// ParseError: the document is not well-formed JSON (message carries line and
// column). ValidationError: well-formed but violates the schema; problems()
// lists every violation found, each prefixed with its field path.
class ConfigError : public std::runtime_error {
public:
    enum class Kind { parse, validation };

    ConfigError(Kind kind, std::vector<std::string> problems);

    Kind kind() const noexcept { return kind_; }
    const std::vector<std::string>& problems() const noexcept { return problems_; }
    std::string_view name() const noexcept {
        return kind_ == Kind::parse ? "ParseError" : "ValidationError";
    }

private:
    Kind kind_;
    std::vector<std::string> problems_;
};

struct GridConfig {
    double t_start = 0.0;
    double t_end = 1.0;
    int n_samples = 11;
};

struct ScanConfig {
    QsSampler sampler = QsSampler::independent;
    int trials = 100;
    int dim = 4;
};

struct RunConfig {
    Command command = Command::decompose;

    std::optional<std::string> scenario;
    int scenario_dim = 4;                 // random-covariant only
    std::vector<Matrix> taylor;           // inline model; "matrix" is degree 0

    std::optional<DysonFamily> dyson;
    std::optional<RealVector> kappa;
    std::optional<Vector> initial_state;
    std::optional<Vector> initial_psi;

    std::optional<GridConfig> grid;
    std::optional<double> step;

    double decompose_tol = 1e-10;
    double qs_tol = kDefaultQsTol;

    ScanConfig scan;
    std::uint64_t seed = 0;

    std::optional<std::string> output_dir;
    char delimiter = ',';
};

RunConfig parse_config(std::string_view document);
RunConfig load_config(const std::string& path);

// JSON codecs shared with the writers.
nlohmann::json complex_to_json(cplx z);
nlohmann::json vector_to_json(const Vector& v);
nlohmann::json matrix_to_json(const Matrix& m);
cplx complex_from_json(const nlohmann::json& j);
Vector vector_from_json(const nlohmann::json& j);
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace cryptodyn::cli
