#include "cryptodyn/metric.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace cryptodyn {

namespace {

void require_vector_dims(const Vector& a, const Vector& b, const char* who) {
    if (a.size() != b.size() || a.size() == 0) {
        fail(ErrorCode::DimensionMismatch, std::string(who) + ": vector sizes " +
                                               std::to_string(a.size()) + " and " +
                                               std::to_string(b.size()));
    }
}

cplx checked_overlap(const Vector& phi, const Vector& psi, const char* who) {
    require_vector_dims(phi, psi, who);
    const cplx ov = psi.dot(phi);  // Eigen's dot conjugates the left operand
    if (!(std::abs(ov) > 1e-12 * phi.norm() * psi.norm())) {
        fail(ErrorCode::DegenerateOverlap, std::string(who) + ": <Psi|Phi> is numerically zero");
    }
    return ov;
}

}  // namespace

MetricOperator::MetricOperator(Matrix theta) : theta_(std::move(theta)) {
    if (theta_.rows() < 1 || theta_.rows() != theta_.cols() || !theta_.allFinite()) {
        fail(ErrorCode::PositivityFailure, "metric must be a finite non-empty square matrix");
    }
    const double scale = theta_.norm();
    if ((theta_ - theta_.adjoint()).norm() > 1e-12 * scale) {
        fail(ErrorCode::PositivityFailure, "metric is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(theta_, Eigen::EigenvaluesOnly);
    min_eig_ = es.eigenvalues()(0);
    max_eig_ = es.eigenvalues()(theta_.rows() - 1);
    if (!(min_eig_ > 1e-12 * max_eig_) || max_eig_ <= 0.0) {
        fail(ErrorCode::PositivityFailure,
             "metric is not positive definite (min eigenvalue " + std::to_string(min_eig_) + ")");
    }
}

MetricOperator metric_from_spectral(const BiorthonormalSystem& sys, const RealVector& kappa) {
    if (kappa.size() != sys.dim()) {
        fail(ErrorCode::DimensionMismatch, "metric_from_spectral: expected " +
                                               std::to_string(sys.dim()) + " weights, got " +
                                               std::to_string(kappa.size()));
    }
    for (Eigen::Index n = 0; n < kappa.size(); ++n) {
        if (!std::isfinite(kappa(n)) || !(kappa(n) > 0.0)) {
            fail(ErrorCode::InvalidWeights,
                 "metric_from_spectral: kappa[" + std::to_string(n) + "] must be real and positive");
        }
    }
    Matrix theta = sys.left * kappa.cast<cplx>().asDiagonal() * sys.left.adjoint();
    theta = 0.5 * (theta + theta.adjoint());
    return MetricOperator(std::move(theta));
}

Matrix dyson_from_metric(const MetricOperator& theta, const std::optional<Matrix>& gauge) {
    Matrix omega = principal_sqrt(theta.matrix());
    if (gauge) {
        const Matrix& u = *gauge;
        if (u.rows() != omega.rows() || u.cols() != omega.cols()) {
            fail(ErrorCode::DimensionMismatch, "dyson_from_metric: gauge dimension mismatch");
        }
        const Matrix defect = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
        if (defect.norm() > 1e-10) {
            fail(ErrorCode::InvalidArgument, "dyson_from_metric: gauge is not unitary");
        }
        omega = u * omega;
    }
    return omega;
}

bool ill_conditioned_dyson(const Matrix& omega) {
    return condition_number(omega) > kIllConditionedDyson;
}

Matrix hermitize(const Matrix& h_upper, const Matrix& omega) {
    require_square(h_upper, "hermitize");
    if (omega.rows() != h_upper.rows() || omega.cols() != h_upper.cols()) {
        fail(ErrorCode::DimensionMismatch, "hermitize: H and Omega differ in dimension");
    }
    return omega * h_upper * invert(omega);
}

double quasi_hermiticity_residual(const Matrix& h, const Matrix& theta) {
    const double scale = h.norm() * theta.norm();
    const double r = (h.adjoint() * theta - theta * h).norm();
    return scale > 0.0 ? r / scale : r;
}

cplx physical_inner(const Vector& a, const Vector& b, const MetricOperator& theta) {
    require_vector_dims(a, b, "physical_inner");
    if (a.size() != theta.dim()) {
        fail(ErrorCode::DimensionMismatch, "physical_inner: metric dimension differs from vectors");
    }
    return a.dot(theta.matrix() * b);
}

Matrix projector_pair(const Vector& phi, const Vector& psi) {
    const cplx ov = checked_overlap(phi, psi, "projector_pair");
    return (phi * psi.adjoint()) / ov;
}

cplx expectation(const Matrix& lambda, const Vector& phi, const Vector& psi) {
    const cplx ov = checked_overlap(phi, psi, "expectation");
    if (lambda.rows() != phi.size() || lambda.cols() != phi.size()) {
        fail(ErrorCode::DimensionMismatch, "expectation: observable dimension differs from state");
    }
    return psi.dot(lambda * phi) / ov;
}

}  // namespace cryptodyn
