#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cryptodyn/dyson_family.hpp"
#include "cryptodyn/evolution.hpp"
#include "cryptodyn/operator_core.hpp"

namespace cryptodyn {

// Uniform coordinate grid for the finite-difference Schroedinger operator.
struct GridSpec {
    double x_min = -1.0;
    double x_max = 1.0;
    int n_points = 3;

    // Throws InvalidArgument unless x_min < x_max and n_points >= 3.
    void validate() const;
    double spacing() const { return (x_max - x_min) / static_cast<double>(n_points - 1); }
    std::vector<double> coordinates() const;
};

// H = -D2 + diag(V) on a Dirichlet grid (hbar = 1, mass = 1/2).
Matrix discretize_schrodinger(const GridSpec& grid, const std::vector<cplx>& potential);

// [[r e^{i phi}, s], [s, r e^{-i phi}]]; eigenvalues r cos(phi) +- sqrt(s^2 - r^2 sin^2(phi)).
Matrix model_2x2(double r, double s, double phi);

// Complex matrix with i.i.d. standard normal real and imaginary parts.
Matrix random_complex(Eigen::Index n, std::mt19937_64& rng);

// Hermitian matrix (X + X^dagger)/2 with X from random_complex.
Matrix random_hermitian(Eigen::Index n, std::mt19937_64& rng);

// S diag(spectrum) S^{-1} with S resampled until cond(S) <= cond_cap.
// Throws ResampleExhausted after 100 attempts.
Matrix random_cryptohermitian(const RealVector& spectrum, std::uint64_t seed,
                              double cond_cap = 100.0);

// Invertible S with cond_2(S) <= cond_cap drawn from rng.
Matrix random_similarity(Eigen::Index n, std::mt19937_64& rng, double cond_cap = 100.0);

// Sorted, pairwise distinct real spectrum of standard normal draws.
RealVector random_spectrum(Eigen::Index n, std::mt19937_64& rng);

struct Scenario {
    std::string name;
    TaylorHamiltonian hamiltonian;
    DysonFamily dyson;
    Vector phi0;
    std::vector<double> grid;
    double step = 1e-3;
};

// 2x2 linear H(t) = H0 + t H1 with Omega(t) = exp(t G), G = 2 E_12 nilpotent.
// Omega H Omega^{-1} = [[1, 1], [1, -1]] + t diag(2, 0) is Hermitian for all t,
// ||Omega^{-1} Omega'|| = ||G|| = 2 and [H0, G] != 0.
// with_connection = false replaces G by the zero matrix.
Scenario scenario_falsification(bool with_connection = true);

// N-dimensional H(t) whose hermitized partner is h0 + t h1 (random Hermitian)
// under Omega(t) = exp(theta(t) G), theta(t) = t + t^2/2, G random with
// ||G||_F = 1/2. H(t) = exp(-theta G) h(t) exp(theta G) is expanded as a
// Taylor polynomial truncated below 1e-18 relative on t in [0, 1].
Scenario scenario_random_covariant(Eigen::Index n, std::uint64_t seed);

// Looks up a named scenario ("falsification", "falsification-flat").
Scenario named_scenario(const std::string& name);

}  // namespace cryptodyn
