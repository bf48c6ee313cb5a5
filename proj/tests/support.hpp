#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "cryptodyn/operator_core.hpp"

namespace testing_support {

using cryptodyn::cplx;
using cryptodyn::Matrix;
using cryptodyn::RealVector;
using cryptodyn::Vector;

// Scaling and squaring around a truncated Taylor series; kept independent of
// the library's exponential on purpose.
inline Matrix expm_oracle(const Matrix& a) {
    const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Matrix scaled = a / std::ldexp(1.0, squarings);

    Matrix term = Matrix::Identity(a.rows(), a.cols());
    Matrix sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * scaled / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

inline Matrix random_matrix(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Matrix m(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) m(i, j) = cplx(normal(rng), normal(rng));
    return m;
}

inline Matrix random_hermitian_matrix(Eigen::Index n, std::mt19937_64& rng) {
    const Matrix a = random_matrix(n, rng);
    return (a + a.adjoint()) / 2.0;
}

inline Vector random_unit_vector(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal;
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(normal(rng), normal(rng));
    return v.normalized();
}

// Planted spectrum S D S^{-1}, returned with the similarity S.
struct Planted {
    Matrix h;
    Matrix s;
    RealVector spectrum;
};

inline Planted planted_matrix(Eigen::Index n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uniform(-5.0, 5.0);
    RealVector d(n);
    for (;;) {
        for (Eigen::Index i = 0; i < n; ++i) d(i) = uniform(rng);
        std::sort(d.data(), d.data() + n);
        bool separated = true;
        for (Eigen::Index i = 1; i < n; ++i) separated = separated && d(i) - d(i - 1) > 0.05;
        if (separated) break;
    }
    Matrix s;
    for (;;) {
        s = Matrix::Identity(n, n) + 0.4 * random_matrix(n, rng) / std::sqrt(static_cast<double>(n));
        Eigen::JacobiSVD<Matrix> svd(s);
        const auto& sv = svd.singularValues();
        if (sv(0) / sv(n - 1) < 50.0) break;
    }
    return {s * d.cast<cplx>().asDiagonal() * s.inverse(), s, d};
}

inline double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace testing_support
