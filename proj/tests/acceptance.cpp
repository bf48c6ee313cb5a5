// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 only if
// every criterion passes.

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <sys/wait.h>
#include <vector>

#include "cryptodyn/errors.hpp"
#include "cryptodyn/metric.hpp"
#include "cryptodyn/models.hpp"
#include "cryptodyn/quasistationary.hpp"

using namespace cryptodyn;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string summary;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> body;
};

// Corpus shared by criteria 1-3: planted real spectra behind random
// similarities, 200 matrices cycling through N = 2, 4, 8.
struct CorpusItem {
    Matrix h;
    RealVector spectrum;
};

const std::vector<CorpusItem>& corpus() {
    static const std::vector<CorpusItem> items = [] {
        std::vector<CorpusItem> out;
        const Eigen::Index sizes[] = {2, 4, 8};
        for (int i = 0; i < 200; ++i) {
            const Eigen::Index n = sizes[i % 3];
            std::mt19937_64 rng(1000 + static_cast<std::uint64_t>(i));
            RealVector d = random_spectrum(n, rng);
            out.push_back({random_cryptohermitian(d, 5000 + static_cast<std::uint64_t>(i)), d});
        }
        return out;
    }();
    return items;
}

std::vector<Scenario> covariant_scenarios() {
    std::vector<Scenario> out;
    for (std::uint64_t s = 0; s < 20; ++s) out.push_back(scenario_random_covariant(4, 700 + s));
    return out;
}

Outcome biorthogonality() {
    double worst_bi = 0.0, worst_comp = 0.0, worst_spec = 0.0;
    for (const auto& item : corpus()) {
        const BiorthonormalSystem sys = biorthogonal_decompose(item.h);
        worst_bi = std::max(worst_bi, sys.biorthonormality_residual());
        worst_comp = std::max(worst_comp, sys.completeness_residual());
        const double scale = item.spectrum.cwiseAbs().maxCoeff();
        for (Eigen::Index j = 0; j < sys.dim(); ++j) {
            worst_spec = std::max(worst_spec, std::abs(sys.eigenvalues(j) - item.spectrum(j)) / scale);
        }
    }
    return {worst_bi <= 1e-10 && worst_comp <= 1e-10 && worst_spec <= 1e-8,
            fmt::format("200 matrices: biorthonormality {:.2e}, completeness {:.2e}, spectrum {:.2e}",
                        worst_bi, worst_comp, worst_spec)};
}

Outcome quasi_hermiticity() {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> weight(0.1, 10.0);
    double worst = 0.0;
    for (const auto& item : corpus()) {
        const BiorthonormalSystem sys = biorthogonal_decompose(item.h);
        RealVector kappa(sys.dim());
        for (Eigen::Index j = 0; j < kappa.size(); ++j) kappa(j) = weight(rng);
        const MetricOperator theta = metric_from_spectral(sys, kappa);
        worst = std::max(worst, quasi_hermiticity_residual(item.h, theta.matrix()));
    }
    return {worst <= 1e-9, fmt::format("max ||H^dag Theta - Theta H|| / (||H|| ||Theta||) = {:.2e}", worst)};
}

Outcome hermitization() {
    double worst = 0.0;
    for (const auto& item : corpus()) {
        const BiorthonormalSystem sys = biorthogonal_decompose(item.h);
        const MetricOperator theta = metric_from_spectral(sys, RealVector::Ones(sys.dim()));
        const Matrix h = hermitize(item.h, dyson_from_metric(theta));
        worst = std::max(worst, (h - h.adjoint()).norm() / h.norm());
    }
    return {worst <= 1e-8, fmt::format("max ||h - h^dag|| / ||h|| = {:.2e}", worst)};
}

Outcome unitarity() {
    double worst = 0.0;
    std::vector<double> ratios;
    for (const Scenario& sc : covariant_scenarios()) {
        const Vector psi0 = pullback_psi0(sc.dyson, sc.phi0);
        const auto full = propagate_pair(sc.hamiltonian, sc.dyson, sc.phi0, psi0, sc.grid, 1e-3);
        const auto half = propagate_pair(sc.hamiltonian, sc.dyson, sc.phi0, psi0, sc.grid, 5e-4);
        worst = std::max(worst, full.max_norm_drift);
        ratios.push_back(full.max_norm_drift / half.max_norm_drift);
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    const bool ratios_ok = *lo >= 12.0 && *hi <= 20.0;
    return {worst <= 1e-8 && ratios_ok,
            fmt::format("20 scenarios: max drift {:.2e} (<= 1e-8: {}), halving ratio in [{:.2f}, {:.2f}] "
                        "(required [12, 20]: {})",
                        worst, worst <= 1e-8 ? "yes" : "no", *lo, *hi, ratios_ok ? "yes" : "no")};
}

Outcome picture_equivalence() {
    double worst = 0.0;
    for (const Scenario& sc : covariant_scenarios()) {
        const PictureReport r = crosscheck_pictures(sc.hamiltonian, sc.dyson, sc.phi0, sc.grid, 1e-3);
        worst = std::max(worst, r.max_deviation());
    }
    return {worst <= 1e-7, fmt::format("20 scenarios: max pairwise deviation {:.2e}", worst)};
}

Outcome falsification() {
    const Scenario sc = scenario_falsification();
    const Vector psi0 = pullback_psi0(sc.dyson, sc.phi0);
    const auto cov = propagate_pair(sc.hamiltonian, sc.dyson, sc.phi0, psi0, sc.grid, sc.step);
    const auto naive = propagate_naive(sc.hamiltonian, sc.dyson, sc.phi0, psi0, sc.grid, sc.step);
    const double ratio = naive.max_metric_drift / std::max(cov.max_metric_drift, 1e-300);
    return {ratio >= 100.0,
            fmt::format("physical-norm drift: naive {:.2e}, covariant {:.2e}, ratio {:.2e}",
                        naive.max_metric_drift, cov.max_metric_drift, ratio)};
}

Outcome operator_consistency() {
    double product = 0.0, applied = 0.0;
    for (const Scenario& sc : covariant_scenarios()) {
        const auto ops = evolution_operators(sc.hamiltonian, sc.dyson, sc.grid, 1e-3);
        const auto traj = propagate_pair(sc.hamiltonian, sc.dyson, sc.phi0, pullback_psi0(sc.dyson, sc.phi0),
                                         sc.grid, 1e-3);
        product = std::max(product, ops.max_product_deviation);
        for (std::size_t k = 0; k < sc.grid.size(); ++k) {
            applied = std::max(applied, (ops.u_right[k] * sc.phi0 - traj.phi[k]).norm());
        }
    }
    return {product <= 1e-8 && applied <= 1e-8,
            fmt::format("||U_L U_R - U_L(0) U_R(0)|| = {:.2e}, ||U_R phi0 - Phi|| = {:.2e}", product, applied)};
}

Outcome genericity() {
    constexpr std::uint64_t seed = 1;
    const QsScanStats independent = qs_scan(QsSampler::independent, 100, 4, seed);
    const QsScanStats shared = qs_scan(QsSampler::shared, 100, 4, seed);
    const bool ok = independent.pair_incompatible >= 99 && shared.pair_compatible == 100 &&
                    shared.extension_first_violation_2 >= 99;
    return {ok, fmt::format("independent: {} incompatible; shared: {} compatible, {} first violated at order 2",
                            independent.pair_incompatible, shared.pair_compatible,
                            shared.extension_first_violation_2)};
}

Outcome hermitian_fixed_points() {
    std::mt19937_64 rng(91);
    double metric_dev = 0.0, generator_dev = 0.0, picture_dev = 0.0, naive_dev = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::Index n = 2 + trial % 4;
        const Matrix h0 = random_hermitian(n, rng);
        const Matrix h1 = random_hermitian(n, rng);
        const TaylorHamiltonian h({h0, h1});
        const Matrix unit = Matrix::Identity(n, n);

        const QSCertificate cert = qs_certify(h);
        if (cert.status != QsStatus::compatible) return {false, "Hermitian pair not certified compatible"};
        metric_dev = std::max(metric_dev, (cert.metric->matrix() - unit).norm());
        const MetricOperator spectral = metric_from_spectral(biorthogonal_decompose(h0), RealVector::Ones(n));
        metric_dev = std::max(metric_dev, (spectral.matrix() - unit).norm());

        const DysonFamily fam = DysonFamily::constant(unit);
        for (double t : {0.0, 0.5, 1.0}) {
            generator_dev = std::max(generator_dev, (generator(h, fam, t) - h.evaluate(t)).norm());
        }

        Vector phi0 = random_complex(n, rng).col(0);
        phi0.normalize();
        const auto grid = uniform_grid(0.0, 1.0, 11);
        const PictureReport r = crosscheck_pictures(h, fam, phi0, grid, 1e-3);
        picture_dev = std::max(picture_dev, r.max_deviation());
        const auto naive = propagate_naive(h, fam, phi0, phi0, grid, 1e-3);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            naive_dev = std::max(naive_dev, (naive.phi[k] - r.pair.phi[k]).norm());
        }
    }
    const bool ok = metric_dev <= 1e-9 && generator_dev == 0.0 && picture_dev <= 1e-10 && naive_dev <= 1e-12;
    return {ok, fmt::format("||Theta - I|| = {:.2e}, ||H_gen - H|| = {:.1e}, picture deviation {:.2e}, "
                            "naive vs covariant {:.2e}",
                            metric_dev, generator_dev, picture_dev, naive_dev)};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Outcome cli_determinism() {
    const fs::path root = fs::temp_directory_path() / "cryptodyn_acceptance_cli";
    fs::remove_all(root);
    std::vector<fs::path> dirs = {root / "run1", root / "run2"};
    for (const auto& dir : dirs) {
        const std::string cmd = fmt::format("\"{}\" --quiet --config \"{}\" --out \"{}\"", CRYPTODYN_CLI_PATH,
                                            CRYPTODYN_DEMO_CONFIG, dir.string());
        const int status = std::system(cmd.c_str());
        if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return {false, "demo run exited with an error"};
    }
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dirs[0])) names.push_back(entry.path().filename().string());
    std::sort(names.begin(), names.end());
    std::size_t identical = 0;
    for (const auto& name : names) {
        if (fs::exists(dirs[1] / name) && slurp(dirs[0] / name) == slurp(dirs[1] / name)) ++identical;
    }
    const std::size_t second = static_cast<std::size_t>(std::distance(fs::directory_iterator(dirs[1]), {}));
    const bool ok = names.size() >= 3 && identical == names.size() && second == names.size();
    return {ok, fmt::format("{} of {} output files byte-identical", identical, names.size())};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "biorthogonality", 10.0, biorthogonality},
        {2, "quasi-hermiticity", 10.0, quasi_hermiticity},
        {3, "hermitization", 10.0, hermitization},
        {4, "physical-space unitarity", 60.0, unitarity},
        {5, "picture equivalence", 120.0, picture_equivalence},
        {6, "naive-law falsification", 5.0, falsification},
        {7, "evolution-operator consistency", 60.0, operator_consistency},
        {8, "quasi-stationarity genericity", 30.0, genericity},
        {9, "hermitian fixed points", 5.0, hermitian_fixed_points},
        {10, "cli determinism", 10.0, cli_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = c.body();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds < c.budget_seconds;
        const bool pass = outcome.pass && in_time;
        if (!pass) ++failures;
        fmt::print("[{}] {:2d} {:<31} {} ({:.2f} s of {:.0f} s{})\n", pass ? "PASS" : "FAIL", c.id, c.name,
                   outcome.summary, seconds, c.budget_seconds, in_time ? "" : ", over budget");
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
