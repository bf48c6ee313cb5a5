#include "cryptodyn/runner.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <ostream>
#include <system_error>

#include "cryptodyn/metric.hpp"
#include "cryptodyn/models.hpp"
#include "cryptodyn/quasistationary.hpp"

namespace cryptodyn::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ResolvedModel {
    TaylorHamiltonian hamiltonian;
    std::optional<DysonFamily> dyson;
    std::optional<Vector> phi0;
    std::vector<double> grid;
    double step = 0.0;
};

std::string num(double v) { return fmt::format("{:.17g}", v); }

ResolvedModel resolve_model(const RunConfig& cfg, std::uint64_t seed) {
    std::optional<Scenario> sc;
    if (cfg.scenario) {
        sc = (*cfg.scenario == "random-covariant")
                 ? scenario_random_covariant(cfg.scenario_dim, seed)
                 : named_scenario(*cfg.scenario);
    }
    ResolvedModel m{sc ? sc->hamiltonian : TaylorHamiltonian(cfg.taylor), std::nullopt, std::nullopt, {}, 0.0};
    if (sc) {
        m.dyson = sc->dyson;
        m.phi0 = sc->phi0;
        m.grid = sc->grid;
        m.step = sc->step;
    }
    if (cfg.dyson) m.dyson = cfg.dyson;
    if (cfg.initial_state) m.phi0 = cfg.initial_state;
    if (cfg.grid) m.grid = uniform_grid(cfg.grid->t_start, cfg.grid->t_end, cfg.grid->n_samples);
    if (cfg.step) m.step = *cfg.step;
    return m;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open " + path.string() + " for writing");
    os << content;
    if (!os) throw IoError("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& doc) { write_file(path, doc.dump(2) + "\n"); }

json eigenvalues_json(const Vector& v) { return vector_to_json(v); }

json trajectory_summary(const StateTrajectory& t, std::string_view picture) {
    return json{
        {"picture", picture},
        {"samples", t.times.size()},
        {"max_norm_drift", t.max_norm_drift},
        {"max_metric_drift", t.max_metric_drift},
        {"max_pullback_residual", t.max_pullback_residual},
        {"initial_overlap", complex_to_json(t.overlap.front())},
        {"final_overlap", complex_to_json(t.overlap.back())},
        {"initial_metric_norm", t.metric_norm.front()},
        {"final_metric_norm", t.metric_norm.back()},
        {"exact_derivative", t.exact_derivative},
    };
}

json certificate_json(const QSCertificate& c) {
    json doc{
        {"status", to_string(c.status)},
        {"kappa", json::array()},
        {"first_violation_order", nullptr},
        {"residuals", c.residuals},
        {"free_weights", c.free_weights},
        {"order1_residual", c.order1_residual},
        {"detail", c.detail},
        {"metric", nullptr},
    };
    for (Eigen::Index k = 0; k < c.kappa.size(); ++k) doc["kappa"].push_back(c.kappa(k));
    if (c.first_violation_order) doc["first_violation_order"] = *c.first_violation_order;
    if (c.metric) doc["metric"] = matrix_to_json(c.metric->matrix());
    return doc;
}

class Runner {
public:
    Runner(const RunConfig& cfg, const RunOptions& opt, std::ostream& out)
        : cfg_(cfg), opt_(opt), out_(out), seed_(opt.seed.value_or(cfg.seed)) {
        dir_ = opt.out_dir ? *opt.out_dir : fs::path(cfg.output_dir.value_or("out"));
    }

    void execute() {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory " + dir_.string() + ": " + ec.message());

        switch (cfg_.command) {
            case Command::decompose: decompose(); break;
            case Command::metric: metric(); break;
            case Command::hermitize: hermitize_cmd(); break;
            case Command::evolve: evolve(false); break;
            case Command::naive_evolve: evolve(true); break;
            case Command::crosscheck: crosscheck(); break;
            case Command::qs_check: qs_check(); break;
            case Command::qs_scan: qs_scan_cmd(); break;
            case Command::demo: demo(); break;
        }
    }

private:
    void say(const std::string& line) {
        if (!opt_.quiet) out_ << line << '\n';
    }

    const Matrix& h0() const { return cfg_.taylor.front(); }

    void decompose() {
        const BiorthonormalSystem sys = biorthogonal_decompose(h0(), cfg_.decompose_tol);
        const double recon = (sys.reconstruct() - h0()).norm() / std::max(h0().norm(), 1e-300);
        write_json(dir_ / "decomposition.json",
                   json{{"command", "decompose"},
                        {"dim", sys.dim()},
                        {"eigenvalues", eigenvalues_json(sys.eigenvalues)},
                        {"right", matrix_to_json(sys.right)},
                        {"left", matrix_to_json(sys.left)},
                        {"condition_estimate", sys.condition_estimate},
                        {"biorthonormality_residual", sys.biorthonormality_residual()},
                        {"completeness_residual", sys.completeness_residual()},
                        {"reconstruction_residual", recon}});
        say(fmt::format("decompose: N = {}, cond(V) = {:.3e}, biorthonormality residual = {:.3e}",
                        sys.dim(), sys.condition_estimate, sys.biorthonormality_residual()));
        for (Eigen::Index j = 0; j < sys.dim(); ++j) {
            say(fmt::format("  eps[{}] = {:.12g} {:+.3e}i", j, sys.eigenvalues(j).real(), sys.eigenvalues(j).imag()));
        }
    }

    MetricOperator spectral_metric(const BiorthonormalSystem& sys) const {
        const RealVector kappa = cfg_.kappa.value_or(RealVector::Ones(sys.dim()));
        return metric_from_spectral(sys, kappa);
    }

    void metric() {
        const BiorthonormalSystem sys = biorthogonal_decompose(h0(), cfg_.decompose_tol);
        const MetricOperator theta = spectral_metric(sys);
        const Matrix omega = dyson_from_metric(theta);
        const double resid = quasi_hermiticity_residual(h0(), theta.matrix());
        json kappa = json::array();
        const RealVector k = cfg_.kappa.value_or(RealVector::Ones(sys.dim()));
        for (Eigen::Index i = 0; i < k.size(); ++i) kappa.push_back(k(i));
        write_json(dir_ / "metric.json", json{{"command", "metric"},
                                               {"kappa", kappa},
                                               {"theta", matrix_to_json(theta.matrix())},
                                               {"min_eig", theta.min_eig()},
                                               {"max_eig", theta.max_eig()},
                                               {"dyson_condition", std::sqrt(theta.condition())},
                                               {"quasi_hermiticity_residual", resid},
                                               {"dyson", matrix_to_json(omega)}});
        say(fmt::format("metric: eigenvalues in [{:.6g}, {:.6g}], ||H^dag Theta - Theta H|| rel = {:.3e}",
                        theta.min_eig(), theta.max_eig(), resid));
    }

    void hermitize_cmd() {
        Matrix omega;
        if (cfg_.dyson) {
            omega = cfg_.dyson->omega(cfg_.grid ? cfg_.grid->t_start : 0.0);
        } else {
            const BiorthonormalSystem sys = biorthogonal_decompose(h0(), cfg_.decompose_tol);
            omega = dyson_from_metric(spectral_metric(sys));
        }
        const Matrix h = hermitize(h0(), omega);
        const double resid = (h - h.adjoint()).norm() / std::max(h.norm(), 1e-300);
        const BiorthonormalSystem upper = biorthogonal_decompose(h0(), cfg_.decompose_tol);
        const BiorthonormalSystem lower = biorthogonal_decompose(h, cfg_.decompose_tol);
        write_json(dir_ / "hermitized.json", json{{"command", "hermitize"},
                                                   {"h", matrix_to_json(h)},
                                                   {"omega", matrix_to_json(omega)},
                                                   {"omega_condition", condition_number(omega)},
                                                   {"ill_conditioned", ill_conditioned_dyson(omega)},
                                                   {"hermiticity_residual", resid},
                                                   {"eigenvalues_upper", eigenvalues_json(upper.eigenvalues)},
                                                   {"eigenvalues_lower", eigenvalues_json(lower.eigenvalues)}});
        say(fmt::format("hermitize: ||h - h^dag|| / ||h|| = {:.3e}", resid));
    }

    ResolvedModel evolution_model() const {
        ResolvedModel m = resolve_model(cfg_, seed_);
        if (!m.dyson || !m.phi0 || m.grid.empty() || !(m.step > 0.0)) {
            fail(ErrorCode::InvalidArgument, "evolution needs a Dyson family, initial state, grid and step");
        }
        return m;
    }

    Vector psi0_for(const ResolvedModel& m) const {
        return cfg_.initial_psi ? *cfg_.initial_psi : pullback_psi0(*m.dyson, *m.phi0);
    }

    void evolve(bool naive) {
        const ResolvedModel m = evolution_model();
        const Vector psi0 = psi0_for(m);
        const StateTrajectory t = naive ? propagate_naive(m.hamiltonian, *m.dyson, *m.phi0, psi0, m.grid, m.step)
                                        : propagate_pair(m.hamiltonian, *m.dyson, *m.phi0, psi0, m.grid, m.step);
        write_file(dir_ / (naive ? "trajectory_naive.csv" : "trajectory.csv"), trajectory_table(t, cfg_.delimiter));
        json summary = trajectory_summary(t, naive ? "naive" : "covariant");
        summary["step"] = m.step;
        write_json(dir_ / "summary.json", summary);
        say(fmt::format("{}: {} samples, max |<Psi|Phi> drift| = {:.3e}, max metric-norm drift = {:.3e}",
                        naive ? "naive-evolve" : "evolve", t.times.size(), t.max_norm_drift, t.max_metric_drift));
    }

    void crosscheck() {
        const ResolvedModel m = evolution_model();
        const PictureReport r = crosscheck_pictures(m.hamiltonian, *m.dyson, *m.phi0, m.grid, m.step);
        const StateTrajectory naive =
            propagate_naive(m.hamiltonian, *m.dyson, *m.phi0, pullback_psi0(*m.dyson, *m.phi0), m.grid, m.step);
        write_json(dir_ / "crosscheck.json",
                   json{{"command", "crosscheck"},
                        {"step", m.step},
                        {"dev_pair_lower", r.dev_pair_lower},
                        {"dev_pair_operator", r.dev_pair_operator},
                        {"dev_lower_operator", r.dev_lower_operator},
                        {"max_deviation", r.max_deviation()},
                        {"pair_max_norm_drift", r.pair.max_norm_drift},
                        {"pair_max_metric_drift", r.pair.max_metric_drift},
                        {"lower_max_norm_drift", r.lower.max_norm_drift},
                        {"lower_max_hermiticity_residual", r.lower.max_hermiticity_residual},
                        {"naive_max_metric_drift", naive.max_metric_drift}});
        say(fmt::format("crosscheck: max pairwise deviation = {:.3e} (pair/lower {:.3e}, pair/operator {:.3e}, "
                        "lower/operator {:.3e})",
                        r.max_deviation(), r.dev_pair_lower, r.dev_pair_operator, r.dev_lower_operator));
        say(fmt::format("  metric-norm drift: covariant {:.3e}, naive {:.3e}", r.pair.max_metric_drift,
                        naive.max_metric_drift));
    }

    void qs_check() {
        const QSCertificate c = qs_certify(TaylorHamiltonian(cfg_.taylor), cfg_.qs_tol);
        json doc = certificate_json(c);
        doc["command"] = "qs-check";
        doc["tol_qs"] = cfg_.qs_tol;
        write_json(dir_ / "certificate.json", doc);
        say(fmt::format("qs-check: {} ({})", to_string(c.status), c.detail));
    }

    void qs_scan_cmd() {
        const QsScanStats s = qs_scan(cfg_.scan.sampler, cfg_.scan.trials, cfg_.scan.dim, seed_, cfg_.qs_tol);
        write_json(dir_ / "scan.json", json{{"sampler", to_string(s.sampler)},
                                             {"trials", s.trials},
                                             {"dim", s.dim},
                                             {"seed", s.seed},
                                             {"tol_qs", s.tol_qs},
                                             {"pair_compatible", s.pair_compatible},
                                             {"pair_incompatible", s.pair_incompatible},
                                             {"pair_exceptional", s.pair_exceptional},
                                             {"extension_compatible", s.extension_compatible},
                                             {"extension_incompatible", s.extension_incompatible},
                                             {"extension_exceptional", s.extension_exceptional},
                                             {"extension_first_violation_2", s.extension_first_violation_2}});
        say(fmt::format("qs-scan ({}, N = {}, {} trials): pairs {} compatible / {} incompatible / {} exceptional; "
                        "degree-2 {} compatible / {} incompatible ({} first violated at order 2)",
                        to_string(s.sampler), s.dim, s.trials, s.pair_compatible, s.pair_incompatible,
                        s.pair_exceptional, s.extension_compatible, s.extension_incompatible,
                        s.extension_first_violation_2));
    }

    void demo() {
        const ResolvedModel m = evolution_model();
        const Vector psi0 = psi0_for(m);
        const StateTrajectory cov = propagate_pair(m.hamiltonian, *m.dyson, *m.phi0, psi0, m.grid, m.step);
        const StateTrajectory naive = propagate_naive(m.hamiltonian, *m.dyson, *m.phi0, psi0, m.grid, m.step);
        write_file(dir_ / "trajectory_covariant.csv", trajectory_table(cov, cfg_.delimiter));
        write_file(dir_ / "trajectory_naive.csv", trajectory_table(naive, cfg_.delimiter));
        const double ratio = cov.max_metric_drift > 0.0 ? naive.max_metric_drift / cov.max_metric_drift : 0.0;
        write_json(dir_ / "summary.json", json{{"command", "demo"},
                                               {"scenario", cfg_.scenario.value_or("inline")},
                                               {"step", m.step},
                                               {"covariant", trajectory_summary(cov, "covariant")},
                                               {"naive", trajectory_summary(naive, "naive")},
                                               {"metric_drift_ratio", ratio}});
        say(fmt::format("demo {}: metric-norm drift covariant {:.3e}, naive {:.3e} (ratio {:.3e})",
                        cfg_.scenario.value_or("inline"), cov.max_metric_drift, naive.max_metric_drift, ratio));
    }

    const RunConfig& cfg_;
    const RunOptions& opt_;
    std::ostream& out_;
    std::uint64_t seed_;
    fs::path dir_;
};

}  // namespace

std::string trajectory_table(const StateTrajectory& traj, char delimiter) {
    const Eigen::Index n = traj.phi.empty() ? 0 : traj.phi.front().size();
    const std::string d(1, delimiter);
    std::string out = "t";
    for (Eigen::Index j = 0; j < n; ++j) out += fmt::format("{0}phi{1}_re{0}phi{1}_im", d, j);
    for (Eigen::Index j = 0; j < n; ++j) out += fmt::format("{0}psi{1}_re{0}psi{1}_im", d, j);
    out += fmt::format("{0}overlap_re{0}overlap_im{0}drift{0}metric_norm{0}metric_drift\n", d);

    double drift = 0.0, metric_drift = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        drift = std::max(drift, std::abs(traj.overlap[k] - traj.overlap.front()));
        metric_drift = std::max(metric_drift, std::abs(traj.metric_norm[k] - traj.metric_norm.front()));
        out += num(traj.times[k]);
        for (Eigen::Index j = 0; j < n; ++j) out += d + num(traj.phi[k](j).real()) + d + num(traj.phi[k](j).imag());
        for (Eigen::Index j = 0; j < n; ++j) out += d + num(traj.psi[k](j).real()) + d + num(traj.psi[k](j).imag());
        out += d + num(traj.overlap[k].real()) + d + num(traj.overlap[k].imag()) + d + num(drift);
        out += d + num(traj.metric_norm[k]) + d + num(metric_drift) + "\n";
    }
    return out;
}

int run(const RunConfig& config, const RunOptions& options, std::ostream& out, std::ostream& err) {
    try {
        Runner(config, options, out).execute();
        return kExitOk;
    } catch (const NumericError& e) {
        err << e.what() << '\n';
        return kExitNumeric;
    } catch (const IoError& e) {
        err << "IOError: " << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace cryptodyn::cli
