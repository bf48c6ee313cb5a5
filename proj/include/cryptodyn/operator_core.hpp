#pragma once

#include <Eigen/Dense>

#include <complex>

#include "cryptodyn/errors.hpp"

// Dense complex linear algebra shared by every other module: arithmetic,
// inversion with a singular-value guard, principal square roots of positive
// matrices, and biorthonormal eigensystems of diagonalizable non-normal
// matrices.

namespace cryptodyn {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kSingularTol = 1e-12;
inline constexpr double kBiorthoTol = 1e-10;

Matrix identity(Eigen::Index n);
Matrix adjoint(const Matrix& m);
Matrix multiply(const Matrix& a, const Matrix& b);
double norm_fro(const Matrix& m);

// Throws SingularMatrix when sigma_min < 1e-12 * sigma_max.
Matrix invert(const Matrix& m);

// sigma_max / sigma_min; +inf for exactly singular input.
double condition_number(const Matrix& m);

// Throws InvalidArgument for empty, non-square or non-finite input.
void require_square(const Matrix& m, const char* who);
bool all_finite(const Matrix& m);
bool is_hermitian(const Matrix& m, double rel_tol);

// Unique Hermitian positive-definite S with S*S = P.
Matrix principal_sqrt(const Matrix& p);

// Paired right/left eigenvectors with <left_j|right_k> = delta_jk.
// Right vectors are unit 2-norm; the normalization phase sits in the left
// vectors. Eigenvalues are ordered by real part, then imaginary part, then
// original solver index.
struct BiorthonormalSystem {
    Vector eigenvalues;
    Matrix right;  // columns |Phi_j>
    Matrix left;   // columns |Psi_j>
    double condition_estimate = 1.0;  // cond_2 of the right-eigenvector matrix

    Eigen::Index dim() const { return eigenvalues.size(); }

    // sum_j |Phi_j> eps_j <Psi_j|
    Matrix reconstruct() const;
    // max_{j,k} |<Psi_j|Phi_k> - delta_jk|
    double biorthonormality_residual() const;
    // || sum_j |Phi_j><Psi_j| - I ||_F
    double completeness_residual() const;
    // max_j |Im eps_j|
    double max_imag_eigenvalue() const;
};

// Throws DefectiveMatrix when the eigenvector matrix has
// sigma_min < tol * sigma_max.
BiorthonormalSystem biorthogonal_decompose(const Matrix& m, double tol = 1e-10);

}  // namespace cryptodyn
