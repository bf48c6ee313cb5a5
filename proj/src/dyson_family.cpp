#include "cryptodyn/dyson_family.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace cryptodyn {

DysonFamily DysonFamily::constant(Matrix omega0) {
    require_square(omega0, "DysonFamily::constant");
    DysonFamily f;
    f.kind_ = Kind::constant;
    f.dim_ = omega0.rows();
    f.base_ = std::move(omega0);
    return f;
}

DysonFamily DysonFamily::exp_poly(Matrix generator, std::vector<double> theta) {
    require_square(generator, "DysonFamily::exp_poly");
    if (theta.empty()) theta.push_back(0.0);
    for (double c : theta) {
        if (!std::isfinite(c)) fail(ErrorCode::InvalidArgument, "DysonFamily::exp_poly: non-finite theta");
    }
    DysonFamily f;
    f.kind_ = Kind::exp_poly;
    f.dim_ = generator.rows();
    f.base_ = std::move(generator);
    f.theta_ = std::move(theta);
    return f;
}

DysonFamily DysonFamily::sampled(std::function<Matrix(double)> omega, Eigen::Index dim) {
    if (!omega || dim < 1) fail(ErrorCode::InvalidArgument, "DysonFamily::sampled: empty source");
    DysonFamily f;
    f.kind_ = Kind::sampled;
    f.dim_ = dim;
    f.sampler_ = std::move(omega);
    return f;
}

double DysonFamily::theta_at(double t) const {
    double acc = 0.0;
    for (auto it = theta_.rbegin(); it != theta_.rend(); ++it) acc = acc * t + *it;
    return acc;
}

double DysonFamily::theta_prime_at(double t) const {
    double acc = 0.0;
    for (std::size_t m = theta_.size(); m-- > 1;) acc = acc * t + static_cast<double>(m) * theta_[m];
    return acc;
}

Matrix DysonFamily::omega(double t) const {
    switch (kind_) {
        case Kind::constant:
            return base_;
        case Kind::exp_poly: {
            const Matrix arg = theta_at(t) * base_;
            return arg.exp();
        }
        case Kind::sampled: {
            Matrix m = sampler_(t);
            if (m.rows() != dim_ || m.cols() != dim_) {
                fail(ErrorCode::DimensionMismatch, "DysonFamily::sampled returned wrong dimension");
            }
            return m;
        }
    }
    return base_;
}

Matrix DysonFamily::omega_dot(double t) const {
    switch (kind_) {
        case Kind::constant:
            return Matrix::Zero(dim_, dim_);
        case Kind::exp_poly:
            return theta_prime_at(t) * base_ * omega(t);
        case Kind::sampled: {
            const double h = 1e-6 * std::max(1.0, std::abs(t));
            return (omega(t + h) - omega(t - h)) / (2.0 * h);
        }
    }
    return Matrix::Zero(dim_, dim_);
}

Matrix DysonFamily::connection(double t) const {
    switch (kind_) {
        case Kind::constant:
            return Matrix::Zero(dim_, dim_);
        case Kind::exp_poly:
            // G commutes with exp(theta G).
            return theta_prime_at(t) * base_;
        case Kind::sampled:
            return invert(omega(t)) * omega_dot(t);
    }
    return Matrix::Zero(dim_, dim_);
}

Matrix DysonFamily::metric_matrix(double t) const {
    const Matrix om = omega(t);
    Matrix theta = om.adjoint() * om;
    return 0.5 * (theta + theta.adjoint());
}

void DysonFamily::require_invertible(std::span<const double> times) const {
    if (kind_ == Kind::constant) {
        if (condition_number(base_) > 1.0 / kSingularTol) {
            fail(ErrorCode::SingularMatrix, "constant Dyson map is singular");
        }
        return;
    }
    for (double t : times) {
        if (condition_number(omega(t)) > 1.0 / kSingularTol) {
            fail(ErrorCode::SingularMatrix, "Dyson map singular at t = " + std::to_string(t));
        }
    }
}

MetricOperator metric_from_dyson(const DysonFamily& family, double t) {
    const double times[] = {t};
    family.require_invertible(times);
    return MetricOperator(family.metric_matrix(t));
}

}  // namespace cryptodyn
