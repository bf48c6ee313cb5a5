#include "cryptodyn/models.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace cryptodyn {

namespace {

constexpr int kMaxResample = 100;

using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    return out;
}

void add_scaled(std::vector<Matrix>& coeffs, std::size_t power, double scale, const Matrix& m) {
    if (coeffs.size() <= power) coeffs.resize(power + 1, Matrix::Zero(m.rows(), m.cols()));
    coeffs[power] += scale * m;
}

}  // namespace

void GridSpec::validate() const {
    if (!(x_min < x_max) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
        fail(ErrorCode::InvalidArgument, "GridSpec: x_min must be below x_max");
    }
    if (n_points < 3) fail(ErrorCode::InvalidArgument, "GridSpec: n_points must be >= 3");
}

std::vector<double> GridSpec::coordinates() const {
    validate();
    std::vector<double> x(static_cast<std::size_t>(n_points));
    const double dx = spacing();
    for (int j = 0; j < n_points; ++j) x[static_cast<std::size_t>(j)] = x_min + dx * j;
    x.back() = x_max;
    return x;
}

Matrix discretize_schrodinger(const GridSpec& grid, const std::vector<cplx>& potential) {
    grid.validate();
    if (potential.size() != static_cast<std::size_t>(grid.n_points)) {
        fail(ErrorCode::DimensionMismatch, "discretize_schrodinger: expected " +
                                               std::to_string(grid.n_points) + " samples, got " +
                                               std::to_string(potential.size()));
    }
    const Eigen::Index n = grid.n_points;
    const double inv_dx2 = 1.0 / (grid.spacing() * grid.spacing());
    Matrix h = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        h(j, j) = 2.0 * inv_dx2 + potential[static_cast<std::size_t>(j)];
        if (j + 1 < n) {
            h(j, j + 1) = -inv_dx2;
            h(j + 1, j) = -inv_dx2;
        }
    }
    return h;
}

Matrix model_2x2(double r, double s, double phi) {
    if (s == 0.0) fail(ErrorCode::InvalidArgument, "model_2x2: s must be non-zero");
    Matrix h(2, 2);
    h << r * std::polar(1.0, phi), s, s, r * std::polar(1.0, -phi);
    return h;
}

Matrix random_complex(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(n, n);
    // Column-major fill, real part first, keeps the draw order fixed.
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) {
            const double re = normal(rng);
            const double im = normal(rng);
            m(r, c) = cplx(re, im);
        }
    }
    return m;
}

Matrix random_hermitian(Eigen::Index n, std::mt19937_64& rng) {
    const Matrix x = random_complex(n, rng);
    return 0.5 * (x + x.adjoint());
}

Matrix random_similarity(Eigen::Index n, std::mt19937_64& rng, double cond_cap) {
    if (n < 1) fail(ErrorCode::InvalidArgument, "random_similarity: n must be >= 1");
    if (!(cond_cap >= 1.0)) fail(ErrorCode::InvalidArgument, "random_similarity: cond_cap must be >= 1");
    for (int attempt = 0; attempt < kMaxResample; ++attempt) {
        Matrix s = random_complex(n, rng);
        if (condition_number(s) <= cond_cap) return s;
    }
    fail(ErrorCode::ResampleExhausted,
         "no similarity with cond <= " + std::to_string(cond_cap) + " in 100 attempts");
}

RealVector random_spectrum(Eigen::Index n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (;;) {
        RealVector d(n);
        for (Eigen::Index j = 0; j < n; ++j) d(j) = normal(rng);
        std::sort(d.data(), d.data() + n);
        bool distinct = true;
        for (Eigen::Index j = 1; j < n; ++j) distinct = distinct && (d(j) - d(j - 1) > 1e-3);
        if (distinct) return d;
    }
}

Matrix random_cryptohermitian(const RealVector& spectrum, std::uint64_t seed, double cond_cap) {
    if (spectrum.size() < 1) fail(ErrorCode::InvalidArgument, "random_cryptohermitian: empty spectrum");
    std::mt19937_64 rng(seed);
    const Matrix s = random_similarity(spectrum.size(), rng, cond_cap);
    return s * spectrum.cast<cplx>().asDiagonal() * s.fullPivLu().inverse();
}

Scenario scenario_falsification(bool with_connection) {
    Matrix h0(2, 2), h1(2, 2), g = Matrix::Zero(2, 2);
    h0 << 1.0, 1.0, 1.0, -1.0;
    h1 << 0.0, 4.0, 0.0, 2.0;
    if (with_connection) g(0, 1) = 2.0;

    Vector phi0(2);
    phi0 << 1.0, 0.0;
    return Scenario{
        with_connection ? "falsification" : "falsification-flat",
        TaylorHamiltonian({h0, h1}),
        DysonFamily::exp_poly(g, {0.0, 1.0}),
        phi0,
        uniform_grid(0.0, 1.0, 11),
        1e-3,
    };
}

Scenario scenario_random_covariant(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const Matrix h0 = random_hermitian(n, rng);
    const Matrix h1 = random_hermitian(n, rng);
    Matrix g = random_complex(n, rng);
    g *= 0.5 / g.norm();
    const Poly theta = {0.0, 1.0, 0.5};
    const double theta_max = 1.5;  // theta(1)

    // exp(-theta G) X exp(theta G) = sum_m theta^m / m! L^m(X), L(X) = XG - GX.
    std::vector<Matrix> coeffs;
    Matrix l0 = h0, l1 = h1;
    Poly theta_pow = {1.0};
    double factorial = 1.0;
    const double scale = std::max(h0.norm(), h1.norm());
    for (int m = 0; m < 200; ++m) {
        if (m > 0) {
            l0 = l0 * g - g * l0;
            l1 = l1 * g - g * l1;
            theta_pow = poly_mul(theta_pow, theta);
            factorial *= m;
        }
        for (std::size_t p = 0; p < theta_pow.size(); ++p) {
            if (theta_pow[p] == 0.0) continue;
            add_scaled(coeffs, p, theta_pow[p] / factorial, l0);
            add_scaled(coeffs, p + 1, theta_pow[p] / factorial, l1);
        }
        const double tail = std::pow(theta_max, m) / factorial * (l0.norm() + l1.norm());
        if (m > 2 && tail < 1e-18 * scale) break;
    }

    Vector phi0 = random_complex(n, rng).col(0);
    phi0.normalize();
    return Scenario{
        "random-covariant",
        TaylorHamiltonian(std::move(coeffs)),
        DysonFamily::exp_poly(g, theta),
        phi0,
        uniform_grid(0.0, 1.0, 11),
        1e-3,
    };
}

Scenario named_scenario(const std::string& name) {
    if (name == "falsification") return scenario_falsification(true);
    if (name == "falsification-flat") return scenario_falsification(false);
    fail(ErrorCode::InvalidArgument, "unknown scenario '" + name + "'");
}

}  // namespace cryptodyn
