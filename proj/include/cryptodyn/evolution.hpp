#pragma once

#include <functional>
#include <vector>

#include "cryptodyn/dyson_family.hpp"
#include "cryptodyn/operator_core.hpp"

namespace cryptodyn {

// H(t) = sum_m t^m H_(m), evaluated by Horner's rule.
class TaylorHamiltonian {
public:
    explicit TaylorHamiltonian(std::vector<Matrix> coefficients);

    int degree() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    Eigen::Index dim() const noexcept { return coeffs_.front().rows(); }
    const std::vector<Matrix>& coefficients() const noexcept { return coeffs_; }
    const Matrix& coefficient(int m) const { return coeffs_.at(static_cast<std::size_t>(m)); }

    Matrix evaluate(double t) const;

private:
    std::vector<Matrix> coeffs_;
};

// Strictly increasing sample times; n >= 2 uniform points from t0 to t1.
std::vector<double> uniform_grid(double t0, double t1, int n);

// Upper-case trajectory of the doublet (Phi, Psi).
//
// overlap/max_norm_drift follow <Psi|Phi>. metric_norm is
// <Phi(t)|Theta(t)|Phi(t)> with Theta(t) = Omega^dagger Omega of the supplied
// family; pullback_residual tracks ||Psi - Theta Phi|| / ||Theta Phi||, which
// stays at integrator level only while Psi remains the pull-back of the same
// physical state.
struct StateTrajectory {
    std::vector<double> times;
    std::vector<Vector> phi;
    std::vector<Vector> psi;
    std::vector<cplx> overlap;
    double max_norm_drift = 0.0;

    std::vector<double> metric_norm;
    double max_metric_drift = 0.0;
    double max_pullback_residual = 0.0;
    bool exact_derivative = true;
};

// Lower-case trajectory of |phi(t)> under a Hermitian h(t).
struct HermitianTrajectory {
    std::vector<double> times;
    std::vector<Vector> phi;
    std::vector<double> norm;
    double max_norm_drift = 0.0;
    // Largest ||h - h^dagger|| / ||h|| seen before symmetrization.
    double max_hermiticity_residual = 0.0;
};

struct OperatorTrajectory {
    std::vector<double> times;
    std::vector<Matrix> u_right;     // U_R(t_k)
    std::vector<Matrix> u_left_dag;  // U_L^dagger(t_k)
    // max_k ||U_L(t_k) U_R(t_k) - U_L(0) U_R(0)||_F
    double max_product_deviation = 0.0;
};

struct PictureReport {
    StateTrajectory pair;
    HermitianTrajectory lower;
    std::vector<Vector> lower_pulled_back;  // Omega^{-1}(t) phi(t)
    std::vector<Vector> operator_applied;   // U_R(t) Phi(0)
    double dev_pair_lower = 0.0;
    double dev_pair_operator = 0.0;
    double dev_lower_operator = 0.0;

    double max_deviation() const;
};

// H_gen(t) = H(t) - i Omega^{-1}(t) Omega'(t).
Matrix generator(const TaylorHamiltonian& h, const DysonFamily& family, double t);

// Psi(0) = Theta(0) Phi(0), i.e. <Psi(0)| = <phi(0)| Omega(0).
Vector pullback_psi0(const DysonFamily& family, const Vector& phi0);

// Classical RK4 on i d/dt Phi = H_gen Phi, i d/dt Psi = H_gen^dagger Psi.
// step must divide every grid interval.
StateTrajectory propagate_pair(const TaylorHamiltonian& h, const DysonFamily& family,
                               const Vector& phi0, const Vector& psi0,
                               const std::vector<double>& grid, double step);

// Same integrator driven by H(t), H^dagger(t) instead of H_gen.
StateTrajectory propagate_naive(const TaylorHamiltonian& h, const DysonFamily& family,
                                const Vector& phi0, const Vector& psi0,
                                const std::vector<double>& grid, double step);

// i d/dt phi = h(t) phi with h sampled at every RK4 stage. Throws
// NotHermitian when a sample breaks ||h - h^dagger|| <= 1e-10 ||h||.
HermitianTrajectory propagate_h(const std::function<Matrix(double)>& h_of_t, const Vector& phi0,
                                const std::vector<double>& grid, double step);

// U_R and U_L^dagger from their operator ODEs, both starting at I.
OperatorTrajectory evolution_operators(const TaylorHamiltonian& h, const DysonFamily& family,
                                       const std::vector<double>& grid, double step);

// Phi(t) three ways: the doublet equations, Omega^{-1} u Omega(0) through the
// Hermitian picture, and U_R(t) Phi(0). Psi(0) = Theta(0) Phi(0).
PictureReport crosscheck_pictures(const TaylorHamiltonian& h, const DysonFamily& family,
                                  const Vector& phi0, const std::vector<double>& grid,
                                  double step);

}  // namespace cryptodyn
