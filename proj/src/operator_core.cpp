#include "cryptodyn/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace cryptodyn {

Matrix identity(Eigen::Index n) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "identity: dimension must be >= 1");
    return Matrix::Identity(n, n);
}

Matrix adjoint(const Matrix& m) { return m.adjoint(); }

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        fail(ErrorCode::DimensionMismatch,
             "multiply: " + std::to_string(a.cols()) + " columns vs " + std::to_string(b.rows()) +
                 " rows");
    }
    return a * b;
}

double norm_fro(const Matrix& m) { return m.norm(); }

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_square(const Matrix& m, const char* who) {
    if (m.rows() < 1 || m.rows() != m.cols()) {
        fail(ErrorCode::InvalidArgument, std::string(who) + ": expected a non-empty square matrix");
    }
    if (!m.allFinite()) fail(ErrorCode::InvalidArgument, std::string(who) + ": non-finite entry");
}

bool is_hermitian(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    return (m - m.adjoint()).norm() <= rel_tol * std::max(m.norm(), std::numeric_limits<double>::min());
}

double condition_number(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

Matrix invert(const Matrix& m) {
    require_square(m, "invert");
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& s = svd.singularValues();
    if (!(s(s.size() - 1) >= kSingularTol * s(0)) || s(0) == 0.0) {
        fail(ErrorCode::SingularMatrix, "invert: smallest singular value below 1e-12 of largest");
    }
    return m.fullPivLu().inverse();
}

Matrix principal_sqrt(const Matrix& p) {
    require_square(p, "principal_sqrt");
    const double scale = p.norm();
    if (!is_hermitian(p, 1e-12)) {
        fail(ErrorCode::NotPositiveDefinite, "principal_sqrt: input is not Hermitian");
    }
    const Matrix sym = 0.5 * (p + p.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
    if (es.info() != Eigen::Success) {
        fail(ErrorCode::NotPositiveDefinite, "principal_sqrt: eigensolver did not converge");
    }
    const RealVector& w = es.eigenvalues();
    if (scale == 0.0 || !(w(0) > 1e-12 * w(w.size() - 1))) {
        fail(ErrorCode::NotPositiveDefinite, "principal_sqrt: smallest eigenvalue not positive");
    }
    const Matrix& q = es.eigenvectors();
    Matrix s = q * w.cwiseSqrt().cast<cplx>().asDiagonal() * q.adjoint();
    return 0.5 * (s + s.adjoint());
}

Matrix BiorthonormalSystem::reconstruct() const {
    return right * eigenvalues.asDiagonal() * left.adjoint();
}

double BiorthonormalSystem::biorthonormality_residual() const {
    const Matrix g = left.adjoint() * right - Matrix::Identity(dim(), dim());
    return g.cwiseAbs().maxCoeff();
}

double BiorthonormalSystem::completeness_residual() const {
    return (right * left.adjoint() - Matrix::Identity(dim(), dim())).norm();
}

double BiorthonormalSystem::max_imag_eigenvalue() const {
    return eigenvalues.imag().cwiseAbs().maxCoeff();
}

BiorthonormalSystem biorthogonal_decompose(const Matrix& m, double tol) {
    require_square(m, "biorthogonal_decompose");
    if (!(tol > 0.0)) fail(ErrorCode::InvalidArgument, "biorthogonal_decompose: tol must be > 0");

    Eigen::ComplexEigenSolver<Matrix> es(m, true);
    if (es.info() != Eigen::Success) {
        fail(ErrorCode::DefectiveMatrix, "biorthogonal_decompose: eigensolver did not converge");
    }
    const Vector& raw_values = es.eigenvalues();
    const Matrix& raw_vectors = es.eigenvectors();
    const Eigen::Index n = m.rows();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const cplx x = raw_values(a), y = raw_values(b);
        if (x.real() != y.real()) return x.real() < y.real();
        if (x.imag() != y.imag()) return x.imag() < y.imag();
        return a < b;
    });

    BiorthonormalSystem sys;
    sys.eigenvalues.resize(n);
    sys.right.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        sys.eigenvalues(j) = raw_values(src);
        sys.right.col(j) = raw_vectors.col(src).normalized();
    }

    Eigen::JacobiSVD<Matrix> svd(sys.right);
    const auto& s = svd.singularValues();
    const double smin = s(n - 1);
    if (!(smin >= tol * s(0))) {
        fail(ErrorCode::DefectiveMatrix,
             "biorthogonal_decompose: eigenvector matrix numerically singular (sigma ratio " +
                 std::to_string(smin / s(0)) + ")");
    }
    sys.condition_estimate = s(0) / smin;

    // Rows of V^{-1} are the dual basis: <Psi_j| = e_j^T V^{-1}.
    sys.left = sys.right.fullPivLu().inverse().adjoint();
    return sys;
}

}  // namespace cryptodyn
