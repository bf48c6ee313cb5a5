#include <doctest.h>

#include <random>

#include "cryptodyn/dyson_family.hpp"
#include "cryptodyn/errors.hpp"
#include "cryptodyn/metric.hpp"
#include "support.hpp"

using namespace cryptodyn;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const NumericError& e) {
        return e.code();
    }
    FAIL("expected a NumericError");
    return ErrorCode::InvalidArgument;
}

Matrix example_h() {
    Matrix h(2, 2);
    h << 1.0, 1.0, 4.0, 1.0;
    return h;
}

Matrix diag2(double a, double b) {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

}  // namespace

TEST_CASE("Hermitian input with unit weights gives the identity metric") {
    std::mt19937_64 rng(1);
    const Matrix h = testing_support::random_hermitian_matrix(5, rng);
    const MetricOperator theta =
        metric_from_spectral(biorthogonal_decompose(h), RealVector::Ones(5));
    CHECK((theta.matrix() - Matrix::Identity(5, 5)).norm() < 1e-10);
}

TEST_CASE("metric for the hand-computed 2x2 example") {
    const Matrix h = example_h();
    const MetricOperator theta = metric_from_spectral(biorthogonal_decompose(h), RealVector::Ones(2));
    const Matrix& t = theta.matrix();
    CHECK((t - t.adjoint()).norm() == 0.0);
    CHECK(theta.min_eig() > 0.0);
    CHECK(quasi_hermiticity_residual(h, t) <= 1e-10);
    CHECK((h.adjoint() * t - t * h).norm() <= 1e-10 * h.norm() * t.norm());

    const Matrix omega = dyson_from_metric(theta);
    CHECK((omega.adjoint() * omega - t).norm() <= 1e-10 * t.norm());
}

TEST_CASE("weights must be positive, finite and sized") {
    const BiorthonormalSystem sys = biorthogonal_decompose(example_h());
    RealVector bad(2);
    bad << 1.0, -1.0;
    CHECK(code_of([&] { metric_from_spectral(sys, bad); }) == ErrorCode::InvalidWeights);
    bad << 1.0, std::numeric_limits<double>::infinity();
    CHECK(code_of([&] { metric_from_spectral(sys, bad); }) == ErrorCode::InvalidWeights);
    bad << 1.0, 0.0;
    CHECK(code_of([&] { metric_from_spectral(sys, bad); }) == ErrorCode::InvalidWeights);
    CHECK(code_of([&] { metric_from_spectral(sys, RealVector::Ones(3)); }) ==
          ErrorCode::DimensionMismatch);
}

TEST_CASE("MetricOperator validates positivity") {
    CHECK(code_of([] { MetricOperator(diag2(1.0, -1.0)); }) == ErrorCode::PositivityFailure);
    Matrix skew = Matrix::Identity(2, 2);
    skew(0, 1) = 0.5;
    CHECK(code_of([&] { MetricOperator m(skew); }) == ErrorCode::PositivityFailure);
    const MetricOperator ok(diag2(4.0, 1.0));
    CHECK(ok.condition() == doctest::Approx(4.0));
    CHECK(MetricOperator(diag2(1.0, 1e-11)).condition() == doctest::Approx(1e11));
    CHECK(code_of([] { MetricOperator(diag2(1.0, 1e-13)); }) == ErrorCode::PositivityFailure);
    CHECK_FALSE(ill_conditioned_dyson(diag2(2.0, 1.0)));
    CHECK(ill_conditioned_dyson(diag2(1.0, 1e-7)));
}

TEST_CASE("metric from a Dyson family") {
    const DysonFamily unit = DysonFamily::constant(Matrix::Identity(3, 3));
    CHECK((metric_from_dyson(unit, 0.7).matrix() - Matrix::Identity(3, 3)).norm() < 1e-15);

    std::mt19937_64 rng(9);
    const Matrix g = testing_support::random_hermitian_matrix(3, rng);
    const DysonFamily fam = DysonFamily::exp_poly(g, {0.0, 1.0});
    CHECK((metric_from_dyson(fam, 0.0).matrix() - Matrix::Identity(3, 3)).norm() < 1e-14);

    const Matrix w = Matrix::Identity(4, 4) + 0.3 * testing_support::random_matrix(4, rng);
    const MetricOperator theta = metric_from_dyson(DysonFamily::constant(w), 0.0);
    CHECK((theta.matrix() - w.adjoint() * w).norm() < 1e-14 * theta.matrix().norm());
    const Eigen::JacobiSVD<Matrix> svd(w);
    CHECK(theta.min_eig() == doctest::Approx(svd.singularValues()(3) * svd.singularValues()(3)));
}

TEST_CASE("Dyson map from simple metrics") {
    CHECK((dyson_from_metric(MetricOperator(Matrix::Identity(2, 2))) - Matrix::Identity(2, 2))
              .norm() < 1e-15);
    const Matrix omega = dyson_from_metric(MetricOperator(diag2(4.0, 1.0)));
    CHECK((omega - diag2(2.0, 1.0)).norm() < 1e-14);
}

TEST_CASE("Dyson map gauge freedom") {
    const MetricOperator theta(diag2(4.0, 1.0));
    Matrix u(2, 2);
    u << 0.0, 1.0, 1.0, 0.0;
    const Matrix omega = dyson_from_metric(theta, u);
    CHECK((omega.adjoint() * omega - theta.matrix()).norm() < 1e-14);
    CHECK(code_of([&] { dyson_from_metric(theta, Matrix(2.0 * u)); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([&] { dyson_from_metric(theta, Matrix(Matrix::Identity(3, 3))); }) ==
          ErrorCode::DimensionMismatch);
}

TEST_CASE("hermitization") {
    std::mt19937_64 rng(21);
    const Matrix hh = testing_support::random_hermitian_matrix(3, rng);
    CHECK((hermitize(hh, Matrix::Identity(3, 3)) - hh).norm() < 1e-14);

    for (int trial = 0; trial < 20; ++trial) {
        const auto planted = testing_support::planted_matrix(3 + trial % 4, rng);
        const Eigen::Index n = planted.h.rows();
        const BiorthonormalSystem sys = biorthogonal_decompose(planted.h);
        const MetricOperator theta = metric_from_spectral(sys, RealVector::Ones(n));
        const Matrix h = hermitize(planted.h, dyson_from_metric(theta));
        CHECK((h - h.adjoint()).norm() <= 1e-8 * h.norm());

        Eigen::SelfAdjointEigenSolver<Matrix> es((h + h.adjoint()) / 2.0);
        for (Eigen::Index j = 0; j < n; ++j) {
            CHECK(std::abs(es.eigenvalues()(j) - planted.spectrum(j)) < 1e-8 * planted.spectrum.norm());
        }
    }
    CHECK(code_of([] { hermitize(Matrix::Identity(2, 2), Matrix::Identity(3, 3)); }) ==
          ErrorCode::DimensionMismatch);
}

TEST_CASE("metric of the planted similarity") {
    // For H = S D S^{-1} every metric with unit weights is (S S^dag)^{-1} up to
    // the per-column normalisation of S.
    std::mt19937_64 rng(33);
    const auto planted = testing_support::planted_matrix(4, rng);
    Matrix s = planted.s;
    for (Eigen::Index j = 0; j < 4; ++j) s.col(j).normalize();
    const Matrix expected = (s * s.adjoint()).inverse();
    const MetricOperator theta =
        metric_from_spectral(biorthogonal_decompose(planted.h), RealVector::Ones(4));
    CHECK((theta.matrix() - expected).norm() < 1e-9 * expected.norm());
}

TEST_CASE("physical inner product") {
    std::mt19937_64 rng(4);
    const Vector a = testing_support::random_unit_vector(3, rng);
    const Vector b = testing_support::random_unit_vector(3, rng);
    const MetricOperator unit(Matrix::Identity(3, 3));
    CHECK(std::abs(physical_inner(a, b, unit) - a.dot(b)) < 1e-15);

    Vector e1 = Vector::Zero(2);
    e1(0) = 1.0;
    CHECK(std::abs(physical_inner(e1, e1, MetricOperator(diag2(4.0, 1.0))) - 4.0) < 1e-15);

    const Matrix w = Matrix::Identity(3, 3) + 0.4 * testing_support::random_matrix(3, rng);
    const MetricOperator theta(w.adjoint() * w);
    const Matrix omega = dyson_from_metric(theta);
    const cplx inner = physical_inner(a, a, theta);
    CHECK(std::abs(inner.imag()) < 1e-14);
    CHECK(inner.real() == doctest::Approx((omega * a).squaredNorm()).epsilon(1e-12));
    CHECK(code_of([&] { physical_inner(e1, a, unit); }) == ErrorCode::DimensionMismatch);
}

TEST_CASE("biorthogonal projector") {
    Vector e1 = Vector::Zero(2), e2 = Vector::Zero(2);
    e1(0) = 1.0;
    e2(1) = 1.0;
    CHECK((projector_pair(e1, e1) - e1 * e1.adjoint()).norm() < 1e-15);

    Vector phi(2);
    phi << 1.0, 1.0;
    Matrix expected(2, 2);
    expected << 1.0, 0.0, 1.0, 0.0;
    const Matrix p = projector_pair(phi, e1);
    CHECK((p - expected).norm() < 1e-15);
    CHECK((p * p - p).norm() < 1e-15);
    CHECK(code_of([&] { projector_pair(e1, e2); }) == ErrorCode::DegenerateOverlap);
}

TEST_CASE("expectation values") {
    std::mt19937_64 rng(8);
    const Vector phi = testing_support::random_unit_vector(3, rng);
    const Vector psi = testing_support::random_unit_vector(3, rng);
    CHECK(std::abs(expectation(Matrix::Identity(3, 3), phi, psi) - 1.0) < 1e-14);

    const auto planted = testing_support::planted_matrix(3, rng);
    const BiorthonormalSystem sys = biorthogonal_decompose(planted.h);
    const MetricOperator theta = metric_from_spectral(sys, RealVector::Constant(3, 2.0));
    const Vector eig = sys.right.col(1);
    const cplx value = expectation(planted.h, eig, theta.matrix() * eig);
    CHECK(std::abs(value - planted.spectrum(1)) < 1e-10);

    // Lambda = (X + Theta^{-1} X^dag Theta)/2 is Theta-pseudo-Hermitian.
    const Matrix& t = theta.matrix();
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix x = testing_support::random_matrix(3, rng);
        const Matrix lambda = 0.5 * (x + t.inverse() * x.adjoint() * t);
        const Vector f = testing_support::random_unit_vector(3, rng);
        const cplx v = expectation(lambda, f, t * f);
        CHECK(std::abs(v.imag()) <= 1e-9 * std::abs(v));
    }
}

TEST_CASE("physical norm is positive for random metrics") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 1000; ++trial) {
        const Eigen::Index n = 2 + trial % 5;
        const Matrix w = Matrix::Identity(n, n) + 0.5 * testing_support::random_matrix(n, rng);
        const MetricOperator theta(0.5 * (w.adjoint() * w + (w.adjoint() * w).adjoint()));
        const Vector a = testing_support::random_unit_vector(n, rng);
        const cplx v = physical_inner(a, a, theta);
        CHECK(v.real() > 0.0);
        CHECK(std::abs(v.imag()) <= 1e-12 * v.real());
    }
}

TEST_CASE("positive Hermitian Dyson maps are recovered from their metric") {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix a = testing_support::random_matrix(4, rng);
        const Matrix omega = a.adjoint() * a + 0.5 * Matrix::Identity(4, 4);
        const Matrix recovered = dyson_from_metric(metric_from_dyson(DysonFamily::constant(omega), 0.0));
        CHECK((recovered - omega).norm() <= 1e-10 * omega.norm());
    }
}
