#include "cryptodyn/quasistationary.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <sstream>

#include "cryptodyn/models.hpp"

namespace cryptodyn {

namespace {

constexpr double kDecomposeTol = 1e-10;
constexpr double kRealSpectrumTol = 1e-8;

BiorthonormalSystem decompose_real(const Matrix& h, const char* label) {
    BiorthonormalSystem sys = biorthogonal_decompose(h, kDecomposeTol);
    const double scale = std::max(h.norm(), 1.0);
    if (sys.max_imag_eigenvalue() > kRealSpectrumTol * scale) {
        fail(ErrorCode::ExpectsRealSpectrum,
             std::string(label) + " has eigenvalue imaginary part " +
                 std::to_string(sys.max_imag_eigenvalue()));
    }
    return sys;
}

double min_gap(const BiorthonormalSystem& sys) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 1; j < sys.dim(); ++j) {
        gap = std::min(gap, std::abs(sys.eigenvalues(j) - sys.eigenvalues(j - 1)));
    }
    return gap;
}

// Breadth-first propagation of kappa_k = kappa_j M_jk / conj(M_kj) from
// index 0. Nodes not reachable through two-sided couplings start a new
// component at weight 1.
Eigen::VectorXcd propagate_weights(const Matrix& m, double threshold, int& free_weights) {
    const Eigen::Index n = m.rows();
    Eigen::VectorXcd kappa = Eigen::VectorXcd::Zero(n);
    std::vector<bool> assigned(static_cast<std::size_t>(n), false);
    free_weights = 0;

    for (Eigen::Index root = 0; root < n; ++root) {
        if (assigned[static_cast<std::size_t>(root)]) continue;
        if (root != 0) ++free_weights;
        kappa(root) = 1.0;
        assigned[static_cast<std::size_t>(root)] = true;
        std::deque<Eigen::Index> queue{root};
        while (!queue.empty()) {
            const Eigen::Index j = queue.front();
            queue.pop_front();
            for (Eigen::Index k = 0; k < n; ++k) {
                if (assigned[static_cast<std::size_t>(k)]) continue;
                if (std::abs(m(j, k)) < threshold || std::abs(m(k, j)) < threshold) continue;
                kappa(k) = kappa(j) * m(j, k) / std::conj(m(k, j));
                assigned[static_cast<std::size_t>(k)] = true;
                queue.push_back(k);
            }
        }
    }
    return kappa;
}

std::string format_complex(cplx z) {
    std::ostringstream os;
    os.precision(6);
    os << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return os.str();
}

}  // namespace

std::string_view to_string(QsStatus status) noexcept {
    switch (status) {
        case QsStatus::compatible: return "compatible";
        case QsStatus::incompatible: return "incompatible";
        case QsStatus::exceptional: return "exceptional";
    }
    return "unknown";
}

std::string_view to_string(QsSampler sampler) noexcept {
    switch (sampler) {
        case QsSampler::independent: return "independent";
        case QsSampler::shared: return "shared";
        case QsSampler::shared_all: return "shared-all";
    }
    return "unknown";
}

std::optional<QsSampler> parse_sampler(std::string_view name) noexcept {
    if (name == "independent") return QsSampler::independent;
    if (name == "shared") return QsSampler::shared;
    if (name == "shared-all") return QsSampler::shared_all;
    return std::nullopt;
}

Matrix qs_overlap_operator(const BiorthonormalSystem& sys0, const BiorthonormalSystem& sys1) {
    if (sys0.dim() != sys1.dim()) {
        fail(ErrorCode::DimensionMismatch, "qs_overlap_operator: systems differ in dimension");
    }
    const Matrix a = sys0.left.adjoint() * sys1.right;  // A_jk = <Psi_0j|Phi_1k>
    const Matrix a_inv = invert(a);
    const Eigen::VectorXcd f = sys1.eigenvalues.real().cast<cplx>();
    return a * f.asDiagonal() * a_inv;
}

QSCertificate qs_solve(const Matrix& h0, const Matrix& h1, double tol_qs) {
    require_square(h0, "qs_solve");
    require_square(h1, "qs_solve");
    if (h0.rows() != h1.rows()) fail(ErrorCode::DimensionMismatch, "qs_solve: H0 and H1 differ in dimension");
    if (!(tol_qs > 0.0)) fail(ErrorCode::InvalidArgument, "qs_solve: tol_qs must be > 0");

    const BiorthonormalSystem sys0 = decompose_real(h0, "H_(0)");
    const BiorthonormalSystem sys1 = decompose_real(h1, "H_(1)");
    const Eigen::Index n = h0.rows();

    QSCertificate cert;
    if (n > 1 && min_gap(sys0) <= tol_qs * std::max(h0.norm(), 1.0)) {
        cert.status = QsStatus::exceptional;
        cert.detail = "H_(0) has a repeated eigenvalue; spectral metrics are not the general solution";
        return cert;
    }

    const Matrix m = qs_overlap_operator(sys0, sys1);
    const double m_norm = m.norm();
    const double threshold = tol_qs * m_norm;

    Eigen::VectorXcd kappa = Eigen::VectorXcd::Ones(n);
    if (m_norm > 0.0) kappa = propagate_weights(m, threshold, cert.free_weights);
    else cert.free_weights = static_cast<int>(n) - 1;

    for (Eigen::Index k = 0; k < n; ++k) {
        const cplx w = kappa(k);
        if (std::abs(w.imag()) > tol_qs * std::max(1.0, std::abs(w)) || !(w.real() > tol_qs)) {
            cert.status = QsStatus::incompatible;
            cert.first_violation_order = 1;
            cert.detail = "weight kappa[" + std::to_string(k) + "] = " + format_complex(w) +
                          " is not real and positive";
            return cert;
        }
    }

    const RealVector weights = kappa.real();
    const double kappa_max = weights.maxCoeff();
    double worst = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index k = 0; k < n; ++k) {
            worst = std::max(worst, std::abs(weights(j) * m(j, k) - std::conj(m(k, j)) * weights(k)));
        }
    }
    cert.order1_residual = m_norm > 0.0 ? worst / (m_norm * kappa_max) : 0.0;
    cert.kappa = weights;

    MetricOperator theta = metric_from_spectral(sys0, weights);
    cert.residuals = {quasi_hermiticity_residual(h0, theta.matrix()),
                      quasi_hermiticity_residual(h1, theta.matrix())};
    cert.metric = std::move(theta);

    if (cert.order1_residual > tol_qs) {
        cert.status = QsStatus::incompatible;
        cert.first_violation_order = 1;
        cert.detail = "order-1 compatibility condition fails (relative residual " +
                      std::to_string(cert.order1_residual) + ")";
        return cert;
    }
    for (int order = 0; order < 2; ++order) {
        if (cert.residuals[static_cast<std::size_t>(order)] > tol_qs) {
            cert.status = QsStatus::incompatible;
            cert.first_violation_order = order;
            cert.detail = "metric residual at order " + std::to_string(order) + " exceeds tolerance";
            return cert;
        }
    }

    cert.status = QsStatus::compatible;
    cert.detail = cert.free_weights == 0
                      ? "weights fixed uniquely by the order-1 data"
                      : std::to_string(cert.free_weights) +
                            " weight(s) unconstrained at order 1, set to 1";
    return cert;
}

QSCertificate qs_certify(const TaylorHamiltonian& h, double tol_qs) {
    if (h.degree() < 1) fail(ErrorCode::InvalidArgument, "qs_certify: degree must be >= 1");
    QSCertificate cert = qs_solve(h.coefficient(0), h.coefficient(1), tol_qs);
    if (cert.status != QsStatus::compatible) return cert;

    const Matrix& theta = cert.metric->matrix();
    for (int m = 2; m <= h.degree(); ++m) {
        const double r = quasi_hermiticity_residual(h.coefficient(m), theta);
        cert.residuals.push_back(r);
        if (r > tol_qs && !cert.first_violation_order) {
            cert.first_violation_order = m;
            cert.status = QsStatus::incompatible;
            cert.detail = "coefficient H_(" + std::to_string(m) +
                          ") is not quasi-Hermitian for the order-0/1 metric";
        }
    }
    return cert;
}

std::vector<Matrix> qs_sample(QsSampler sampler, int dim, std::uint64_t seed, int trial) {
    if (dim < 1) fail(ErrorCode::InvalidArgument, "qs_sample: dim must be >= 1");
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(trial));
    const Eigen::Index n = dim;

    auto similar = [](const Matrix& s, const RealVector& d) -> Matrix {
        return s * d.cast<cplx>().asDiagonal() * s.fullPivLu().inverse();
    };

    const Matrix s0 = random_similarity(n, rng);
    const RealVector d0 = random_spectrum(n, rng);
    const RealVector d1 = random_spectrum(n, rng);
    const RealVector d2 = random_spectrum(n, rng);
    const Matrix s1 = random_similarity(n, rng);
    const Matrix s2 = random_similarity(n, rng);

    switch (sampler) {
        case QsSampler::independent:
            return {similar(s0, d0), similar(s1, d1), similar(s2, d2)};
        case QsSampler::shared:
            return {similar(s0, d0), similar(s0, d1), similar(s2, d2)};
        case QsSampler::shared_all:
            return {similar(s0, d0), similar(s0, d1), similar(s0, d2)};
    }
    return {};
}

QsScanStats qs_scan(QsSampler sampler, int trials, int dim, std::uint64_t seed, double tol_qs) {
    if (trials < 1) fail(ErrorCode::InvalidArgument, "qs_scan: trials must be >= 1");
    QsScanStats stats;
    stats.sampler = sampler;
    stats.trials = trials;
    stats.dim = dim;
    stats.seed = seed;
    stats.tol_qs = tol_qs;

    for (int trial = 0; trial < trials; ++trial) {
        const std::vector<Matrix> c = qs_sample(sampler, dim, seed, trial);

        const QSCertificate pair = qs_certify(TaylorHamiltonian({c[0], c[1]}), tol_qs);
        switch (pair.status) {
            case QsStatus::compatible: ++stats.pair_compatible; break;
            case QsStatus::incompatible: ++stats.pair_incompatible; break;
            case QsStatus::exceptional: ++stats.pair_exceptional; break;
        }

        const QSCertificate ext = qs_certify(TaylorHamiltonian(c), tol_qs);
        switch (ext.status) {
            case QsStatus::compatible: ++stats.extension_compatible; break;
            case QsStatus::incompatible: ++stats.extension_incompatible; break;
            case QsStatus::exceptional: ++stats.extension_exceptional; break;
        }
        if (ext.first_violation_order == 2) ++stats.extension_first_violation_2;
    }
    return stats;
}

}  // namespace cryptodyn
