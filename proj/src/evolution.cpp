#include "cryptodyn/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace cryptodyn {

namespace {

constexpr cplx kMinusI{0.0, -1.0};
constexpr double kBlowUp = 1e12;

void require_grid(const std::vector<double>& grid) {
    if (grid.empty()) fail(ErrorCode::InvalidArgument, "time grid is empty");
    for (std::size_t k = 1; k < grid.size(); ++k) {
        if (!(grid[k] > grid[k - 1])) {
            fail(ErrorCode::InvalidArgument, "time grid must be strictly increasing");
        }
    }
}

long substeps(double interval, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        fail(ErrorCode::InvalidArgument, "integrator step must be positive and finite");
    }
    const long n = std::lround(interval / step);
    if (n < 1 || std::abs(static_cast<double>(n) * step - interval) > 1e-9 * interval) {
        fail(ErrorCode::InvalidArgument, "integrator step " + std::to_string(step) +
                                             " does not divide grid interval " +
                                             std::to_string(interval));
    }
    return n;
}

void require_bounded(const Matrix& y, double t) {
    if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kBlowUp) {
        fail(ErrorCode::NonFiniteState, "state left the finite range at t = " + std::to_string(t));
    }
}

// Fixed-step classical RK4 for i dY/dt = A(t) Y and, optionally, the companion
// i dZ/dt = A(t)^dagger Z sharing the same stage times. on_sample(k) is called
// after the states reach grid[k].
template <typename OnSample>
void rk4_drive(const std::vector<double>& grid, double step,
               const std::function<Matrix(double)>& gen, Matrix& y, Matrix* z,
               OnSample&& on_sample) {
    require_grid(grid);
    on_sample(std::size_t{0});

    double cached_t = grid.front();
    Matrix cached_a = gen(cached_t);

    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t_begin = grid[k - 1];
        const double interval = grid[k] - t_begin;
        const long n = substeps(interval, step);
        const double h = interval / static_cast<double>(n);

        for (long s = 0; s < n; ++s) {
            const double t = t_begin + static_cast<double>(s) * h;
            const double t_end = (s + 1 == n) ? grid[k] : t_begin + static_cast<double>(s + 1) * h;
            const Matrix a0 = (t == cached_t) ? cached_a : gen(t);
            const Matrix am = gen(t + 0.5 * h);
            const Matrix a1 = gen(t_end);
            const double dt = t_end - t;

            {
                const Matrix k1 = kMinusI * (a0 * y);
                const Matrix k2 = kMinusI * (am * (y + (0.5 * dt) * k1));
                const Matrix k3 = kMinusI * (am * (y + (0.5 * dt) * k2));
                const Matrix k4 = kMinusI * (a1 * (y + dt * k3));
                y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            if (z != nullptr) {
                Matrix& w = *z;
                const Matrix k1 = kMinusI * (a0.adjoint() * w);
                const Matrix k2 = kMinusI * (am.adjoint() * (w + (0.5 * dt) * k1));
                const Matrix k3 = kMinusI * (am.adjoint() * (w + (0.5 * dt) * k2));
                const Matrix k4 = kMinusI * (a1.adjoint() * (w + dt * k3));
                w += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                require_bounded(w, t_end);
            }
            require_bounded(y, t_end);
            cached_t = t_end;
            cached_a = a1;
        }
        on_sample(k);
    }
}

void require_state(const Vector& v, Eigen::Index dim, const char* what) {
    if (v.size() != dim) {
        fail(ErrorCode::DimensionMismatch, std::string(what) + " has " + std::to_string(v.size()) +
                                               " components, expected " + std::to_string(dim));
    }
    if (!v.allFinite()) fail(ErrorCode::InvalidArgument, std::string(what) + " is not finite");
}

StateTrajectory propagate_doublet(const TaylorHamiltonian& h, const DysonFamily& family,
                                  const Vector& phi0, const Vector& psi0,
                                  const std::vector<double>& grid, double step,
                                  std::function<Matrix(double)> gen) {
    if (family.dim() != h.dim()) {
        fail(ErrorCode::DimensionMismatch, "Hamiltonian and Dyson family differ in dimension");
    }
    require_state(phi0, h.dim(), "phi0");
    require_state(psi0, h.dim(), "psi0");
    require_grid(grid);
    family.require_invertible(grid);

    StateTrajectory out;
    out.exact_derivative = family.exact_derivative();
    Matrix y = phi0;
    Matrix z = psi0;

    rk4_drive(grid, step, gen, y, &z, [&](std::size_t k) {
        const double t = grid[k];
        Vector phi = y.col(0);
        Vector psi = z.col(0);
        const cplx ov = psi.dot(phi);
        const Vector theta_phi = family.metric_matrix(t) * phi;
        const double mnorm = phi.dot(theta_phi).real();

        out.times.push_back(t);
        out.overlap.push_back(ov);
        out.metric_norm.push_back(mnorm);
        out.max_norm_drift = std::max(out.max_norm_drift, std::abs(ov - out.overlap.front()));
        out.max_metric_drift =
            std::max(out.max_metric_drift, std::abs(mnorm - out.metric_norm.front()));
        const double scale = theta_phi.norm();
        if (scale > 0.0) {
            out.max_pullback_residual =
                std::max(out.max_pullback_residual, (psi - theta_phi).norm() / scale);
        }
        out.phi.push_back(std::move(phi));
        out.psi.push_back(std::move(psi));
    });
    return out;
}

}  // namespace

TaylorHamiltonian::TaylorHamiltonian(std::vector<Matrix> coefficients)
    : coeffs_(std::move(coefficients)) {
    if (coeffs_.empty()) fail(ErrorCode::InvalidArgument, "TaylorHamiltonian needs a coefficient");
    require_square(coeffs_.front(), "TaylorHamiltonian");
    for (const Matrix& c : coeffs_) {
        require_square(c, "TaylorHamiltonian");
        if (c.rows() != coeffs_.front().rows()) {
            fail(ErrorCode::DimensionMismatch, "TaylorHamiltonian coefficients differ in dimension");
        }
    }
}

Matrix TaylorHamiltonian::evaluate(double t) const {
    Matrix acc = coeffs_.back();
    for (std::size_t m = coeffs_.size() - 1; m-- > 0;) {
        acc *= t;
        acc += coeffs_[m];
    }
    return acc;
}

std::vector<double> uniform_grid(double t0, double t1, int n) {
    if (n < 2 || !(t1 > t0)) {
        fail(ErrorCode::InvalidArgument, "uniform_grid needs n >= 2 and t_end > t_start");
    }
    std::vector<double> grid(static_cast<std::size_t>(n));
    const double dt = (t1 - t0) / static_cast<double>(n - 1);
    for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = t0 + dt * k;
    grid.back() = t1;
    return grid;
}

double PictureReport::max_deviation() const {
    return std::max({dev_pair_lower, dev_pair_operator, dev_lower_operator});
}

Matrix generator(const TaylorHamiltonian& h, const DysonFamily& family, double t) {
    if (family.dim() != h.dim()) {
        fail(ErrorCode::DimensionMismatch, "Hamiltonian and Dyson family differ in dimension");
    }
    Matrix out = h.evaluate(t);
    if (family.kind() == DysonFamily::Kind::constant) return out;
    out += kMinusI * family.connection(t);
    return out;
}

Vector pullback_psi0(const DysonFamily& family, const Vector& phi0) {
    require_state(phi0, family.dim(), "phi0");
    return family.metric_matrix(0.0) * phi0;
}

StateTrajectory propagate_pair(const TaylorHamiltonian& h, const DysonFamily& family,
                               const Vector& phi0, const Vector& psi0,
                               const std::vector<double>& grid, double step) {
    return propagate_doublet(h, family, phi0, psi0, grid, step,
                             [&](double t) { return generator(h, family, t); });
}

StateTrajectory propagate_naive(const TaylorHamiltonian& h, const DysonFamily& family,
                                const Vector& phi0, const Vector& psi0,
                                const std::vector<double>& grid, double step) {
    return propagate_doublet(h, family, phi0, psi0, grid, step,
                             [&](double t) { return h.evaluate(t); });
}

HermitianTrajectory propagate_h(const std::function<Matrix(double)>& h_of_t, const Vector& phi0,
                                const std::vector<double>& grid, double step) {
    if (!h_of_t) fail(ErrorCode::InvalidArgument, "propagate_h: empty Hamiltonian source");
    require_grid(grid);
    HermitianTrajectory out;

    auto gen = [&](double t) -> Matrix {
        const Matrix sample = h_of_t(t);
        if (sample.rows() != phi0.size() || sample.cols() != phi0.size()) {
            fail(ErrorCode::DimensionMismatch, "propagate_h: sample dimension differs from state");
        }
        const double scale = sample.norm();
        const double resid = (sample - sample.adjoint()).norm();
        const double rel = scale > 0.0 ? resid / scale : resid;
        if (resid > 1e-10 * scale) {
            fail(ErrorCode::NotHermitian, "propagate_h: h(t) anti-Hermitian residual " +
                                              std::to_string(rel) + " at t = " + std::to_string(t));
        }
        out.max_hermiticity_residual = std::max(out.max_hermiticity_residual, rel);
        return 0.5 * (sample + sample.adjoint());
    };

    Matrix y = phi0;
    rk4_drive(grid, step, gen, y, nullptr, [&](std::size_t k) {
        Vector phi = y.col(0);
        const double nrm = phi.squaredNorm();
        out.times.push_back(grid[k]);
        out.norm.push_back(nrm);
        out.max_norm_drift = std::max(out.max_norm_drift, std::abs(nrm - out.norm.front()));
        out.phi.push_back(std::move(phi));
    });
    return out;
}

OperatorTrajectory evolution_operators(const TaylorHamiltonian& h, const DysonFamily& family,
                                       const std::vector<double>& grid, double step) {
    require_grid(grid);
    family.require_invertible(grid);
    const Eigen::Index n = h.dim();
    OperatorTrajectory out;
    Matrix u_right = Matrix::Identity(n, n);
    Matrix u_left_dag = Matrix::Identity(n, n);

    rk4_drive(
        grid, step, [&](double t) { return generator(h, family, t); }, u_right, &u_left_dag,
        [&](std::size_t k) {
            out.times.push_back(grid[k]);
            out.u_right.push_back(u_right);
            out.u_left_dag.push_back(u_left_dag);
            const Matrix product = u_left_dag.adjoint() * u_right;
            const Matrix initial = out.u_left_dag.front().adjoint() * out.u_right.front();
            out.max_product_deviation =
                std::max(out.max_product_deviation, (product - initial).norm());
        });
    return out;
}

PictureReport crosscheck_pictures(const TaylorHamiltonian& h, const DysonFamily& family,
                                  const Vector& phi0, const std::vector<double>& grid,
                                  double step) {
    PictureReport report;
    report.pair = propagate_pair(h, family, phi0, pullback_psi0(family, phi0), grid, step);

    const Vector lower0 = family.omega(grid.front()) * phi0;
    report.lower = propagate_h(
        [&](double t) { return hermitize(h.evaluate(t), family.omega(t)); }, lower0, grid, step);

    const OperatorTrajectory ops = evolution_operators(h, family, grid, step);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Matrix omega = family.omega(grid[k]);
        report.lower_pulled_back.push_back(omega.fullPivLu().solve(report.lower.phi[k]));
        report.operator_applied.push_back(ops.u_right[k] * phi0);

        const Vector& a = report.pair.phi[k];
        const Vector& b = report.lower_pulled_back.back();
        const Vector& c = report.operator_applied.back();
        report.dev_pair_lower = std::max(report.dev_pair_lower, (a - b).norm());
        report.dev_pair_operator = std::max(report.dev_pair_operator, (a - c).norm());
        report.dev_lower_operator = std::max(report.dev_lower_operator, (b - c).norm());
    }
    return report;
}

}  // namespace cryptodyn
