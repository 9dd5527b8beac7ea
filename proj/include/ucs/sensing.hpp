#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "ucs/quantize.hpp"

namespace ucs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct NoiseSpec {
    enum class Kind { none, gaussian, fixed_norm };
    Kind kind = Kind::none;
    // Standard deviation (gaussian) or exact l2 norm (fixed_norm).
    double level = 0.0;

    static NoiseSpec none() { return {}; }
    static NoiseSpec gaussian(double sd) { return {Kind::gaussian, sd}; }
    static NoiseSpec fixed_norm(double c) { return {Kind::fixed_norm, c}; }
};

// A and y = A x + z; A is reproducible from (m, n, matrix_seed).
struct MeasurementSet {
    Matrix A;
    Vector y;
    std::uint64_t matrix_seed = 0;
    NoiseSpec noise;

    Eigen::Index m() const { return A.rows(); }
    Eigen::Index n() const { return A.cols(); }
};

// m x n i.i.d. N(0, 1) entries, unnormalized. Entry (i, j) is normal draw
// number i * n + j of Rng(seed).
Matrix gaussian_matrix(std::size_t m, std::size_t n, std::uint64_t seed);

// y = A x plus noise drawn from Rng(noise_seed). fixed_norm adds a uniformly
// random direction scaled to l2 norm exactly `level`.
Vector measure(const Matrix& A, std::span<const double> x, const NoiseSpec& noise = {},
               std::uint64_t noise_seed = 0);

MeasurementSet make_measurements(std::span<const double> x, std::size_t m, std::uint64_t matrix_seed,
                                 const NoiseSpec& noise = {}, std::uint64_t noise_seed = 0);

struct SigmaMaxCheck {
    double sigma_max;
    double bound;  // sqrt(n) + 2 sqrt(m)
    bool within;
    std::size_t iterations;
};

// Power iteration on A^T A until the eigenvalue estimate changes by at most
// rel_tol relatively. Throws std::runtime_error on non-convergence.
SigmaMaxCheck sigma_max_check(const Matrix& A, double rel_tol = 1e-6, std::size_t max_iter = 10000);

// P(chi2_m < m(1 - tau)) <= exp((m/2)(tau + ln(1 - tau))), 0 < tau < 1.
double chi2_lower_tail_bound(std::size_t m, double tau);
// P(chi2_m > m(1 + tau)) <= exp(-(m/2)(tau - ln(1 + tau))), tau > 0.
double chi2_upper_tail_bound(std::size_t m, double tau);

struct Chi2TailBounds {
    double lower_tail_bound;
    double upper_tail_bound;
};

Chi2TailBounds chi2_tail_bounds(std::size_t m, double tau);

struct Chi2Empirical {
    double lower_tail;  // fraction of draws with sum < m(1 - tau)
    double upper_tail;  // fraction of draws with sum > m(1 + tau)
};

// Monte-Carlo tails of sum_{i=1}^m U_i^2, U_i ~ N(0, 1).
Chi2Empirical chi2_empirical_tails(std::size_t m, double tau, std::size_t draws, std::uint64_t seed);

struct MeasurementCount {
    std::size_t m;
    // Set when d_o = 0 and the floor m_min was used instead of the rate.
    bool floor_used;
};

// ceil((1 + delta) d_o n) clamped to [1, n]. For d_o = 0 returns m_min
// (default ceil(log2 n)).
MeasurementCount measurement_count(std::size_t n, double d_o, double delta,
                                   std::optional<std::size_t> m_min = std::nullopt);

// Row-major little-endian float64 with a 24-byte header: 8-byte magic,
// uint64 m, uint64 n.
void write_matrix_binary(const Matrix& A, const std::filesystem::path& path);
Matrix read_matrix_binary(const std::filesystem::path& path);

}  // namespace ucs
