#pragma once

#include <functional>
#include <span>
#include <vector>

#include "cryptodyn/metric.hpp"
#include "cryptodyn/operator_core.hpp"

namespace cryptodyn {

// Time-parametrized invertible map Omega(t).
//
//   constant  Omega(t) = Omega_0, Omega'(t) = 0
//   exp_poly  Omega(t) = exp(theta(t) G) with theta a real polynomial;
//             Omega'(t) = theta'(t) G Omega(t) exactly
//   sampled   Omega(t) from a user callable; Omega' by central differences
//             with relative step 1e-6 (exact_derivative() is false)
class DysonFamily {
public:
    enum class Kind { constant, exp_poly, sampled };

    static DysonFamily constant(Matrix omega0);
    // theta holds theta_0, theta_1, ... (ascending powers of t).
    static DysonFamily exp_poly(Matrix generator, std::vector<double> theta);
    static DysonFamily sampled(std::function<Matrix(double)> omega, Eigen::Index dim);

    Kind kind() const noexcept { return kind_; }
    Eigen::Index dim() const noexcept { return dim_; }
    bool exact_derivative() const noexcept { return kind_ != Kind::sampled; }

    // constant: Omega_0; exp_poly: G.
    const Matrix& base() const noexcept { return base_; }
    const std::vector<double>& theta() const noexcept { return theta_; }

    double theta_at(double t) const;
    double theta_prime_at(double t) const;

    Matrix omega(double t) const;
    Matrix omega_dot(double t) const;
    // Omega^{-1}(t) Omega'(t).
    Matrix connection(double t) const;
    // Omega^dagger(t) Omega(t).
    Matrix metric_matrix(double t) const;

    // Throws SingularMatrix if Omega(t) fails the 1e-12 singular-value
    // ratio at any of the given times.
    void require_invertible(std::span<const double> times) const;

private:
    DysonFamily() = default;

    Kind kind_ = Kind::constant;
    Eigen::Index dim_ = 0;
    Matrix base_;
    std::vector<double> theta_;
    std::function<Matrix(double)> sampler_;
};

// Theta(t) = Omega^dagger(t) Omega(t).
MetricOperator metric_from_dyson(const DysonFamily& family, double t);

}  // namespace cryptodyn
