#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cryptodyn/evolution.hpp"
#include "cryptodyn/metric.hpp"

// Search for a time-independent metric compatible with every Taylor
// coefficient of H(t) = H_(0) + t H_(1) + t^2 H_(2) + ...
//
// The candidate metric is the spectral expansion over the left eigenvectors
// of H_(0), Theta = sum_n |Psi_0n> kappa_n <Psi_0n|. With A_jk =
// <Psi_0j|Phi_1k>, F = diag(eps_1k) and M = A F A^{-1}, the order-1 condition
// reads kappa_j M_jk = conj(M_kj) kappa_k, which fixes the ratios of the
// weights along every pair with both M_jk and M_kj non-negligible.

namespace cryptodyn {

inline constexpr double kDefaultQsTol = 1e-8;

enum class QsStatus { compatible, incompatible, exceptional };
std::string_view to_string(QsStatus status) noexcept;

struct QSCertificate {
    QsStatus status = QsStatus::incompatible;
    RealVector kappa;                    // empty unless weights were found; kappa(0) = 1
    std::optional<MetricOperator> metric;
    std::optional<int> first_violation_order;
    std::vector<double> residuals;       // ||H_m^dag Theta - Theta H_m|| / (||H_m|| ||Theta||)
    int free_weights = 0;                // weights left unfixed by the order-1 data (set to 1)
    double order1_residual = 0.0;        // max |kappa_j M_jk - conj(M_kj) kappa_k| / (||M|| max kappa)
    std::string detail;
};

// Orders 0 and 1. Throws ExpectsRealSpectrum, DefectiveMatrix, SingularMatrix.
QSCertificate qs_solve(const Matrix& h0, const Matrix& h1, double tol_qs = kDefaultQsTol);

// The overlap construction's M = A F A^{-1}; exposed for diagnostics and tests.
Matrix qs_overlap_operator(const BiorthonormalSystem& sys0, const BiorthonormalSystem& sys1);

// qs_solve on (H_(0), H_(1)), then residual checks for every m >= 2.
QSCertificate qs_certify(const TaylorHamiltonian& h, double tol_qs = kDefaultQsTol);

enum class QsSampler {
    independent,  // H_(m) = S_m D_m S_m^{-1} with independent S_m
    shared,       // H_(0), H_(1) share S; degree-2 extension uses an independent S
    shared_all,   // every coefficient shares S
};
std::string_view to_string(QsSampler sampler) noexcept;
std::optional<QsSampler> parse_sampler(std::string_view name) noexcept;

struct QsScanStats {
    QsSampler sampler = QsSampler::independent;
    int trials = 0;
    int dim = 0;
    std::uint64_t seed = 0;
    double tol_qs = kDefaultQsTol;

    int pair_compatible = 0;
    int pair_incompatible = 0;
    int pair_exceptional = 0;

    int extension_compatible = 0;
    int extension_incompatible = 0;
    int extension_exceptional = 0;
    int extension_first_violation_2 = 0;
};

// Trial i draws from std::mt19937_64(seed + i).
QsScanStats qs_scan(QsSampler sampler, int trials, int dim, std::uint64_t seed,
                    double tol_qs = kDefaultQsTol);

// Coefficients (H_(0), H_(1), H_(2)) of trial `trial` as drawn by qs_scan.
std::vector<Matrix> qs_sample(QsSampler sampler, int dim, std::uint64_t seed, int trial);

}  // namespace cryptodyn
