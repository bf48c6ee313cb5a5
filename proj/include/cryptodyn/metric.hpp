#pragma once

#include <optional>

#include "cryptodyn/operator_core.hpp"

namespace cryptodyn {

// Hermitian positive-definite kernel of the physical inner product <a|Theta|b>.
// Construction validates both invariants and throws PositivityFailure.
class MetricOperator {
public:
    explicit MetricOperator(Matrix theta);

    const Matrix& matrix() const noexcept { return theta_; }
    Eigen::Index dim() const noexcept { return theta_.rows(); }
    double min_eig() const noexcept { return min_eig_; }
    double max_eig() const noexcept { return max_eig_; }
    double condition() const noexcept { return max_eig_ / min_eig_; }

private:
    Matrix theta_;
    double min_eig_ = 0.0;
    double max_eig_ = 0.0;
};

// Theta = sum_n |Psi_n> kappa_n <Psi_n| over the left vectors of sys.
// Throws InvalidWeights unless every kappa is finite and > 0.
MetricOperator metric_from_spectral(const BiorthonormalSystem& sys, const RealVector& kappa);

// Hermitian principal root of Theta, optionally post-composed with a
// user-supplied unitary gauge: Omega = gauge * sqrt(Theta).
Matrix dyson_from_metric(const MetricOperator& theta,
                         const std::optional<Matrix>& gauge = std::nullopt);

// Residual bounds downstream assume cond(Omega) <= 1e6. Past that, results
// are still returned but flagged by the callers that report them.
inline constexpr double kIllConditionedDyson = 1e6;
bool ill_conditioned_dyson(const Matrix& omega);

// h = Omega H Omega^{-1}.
Matrix hermitize(const Matrix& h_upper, const Matrix& omega);

// ||H^dagger Theta - Theta H||_F / (||H|| ||Theta||).
double quasi_hermiticity_residual(const Matrix& h, const Matrix& theta);

cplx physical_inner(const Vector& a, const Vector& b, const MetricOperator& theta);

// Pi = |Phi><Psi| / <Psi|Phi>. Throws DegenerateOverlap when
// |<Psi|Phi>| <= 1e-12 ||Phi|| ||Psi||.
Matrix projector_pair(const Vector& phi, const Vector& psi);

// <Psi|Lambda|Phi> / <Psi|Phi>.
cplx expectation(const Matrix& lambda, const Vector& phi, const Vector& psi);

}  // namespace cryptodyn
